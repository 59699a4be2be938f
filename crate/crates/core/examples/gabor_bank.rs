//! Prints the fixed first-layer Gabor kernels.

use dvs_snn::net::{gabor_bank, GaborParams, ORIENTATIONS_DEG};

fn main() -> dvs_snn::Result<()> {
    let params = GaborParams::default();
    let bank = gabor_bank(&params)?;
    println!(
        "size {}, wavelength {}, sigma {}, aspect {}",
        params.size, params.wavelength, params.sigma, params.aspect
    );
    for (deg, k) in ORIENTATIONS_DEG.iter().zip(&bank.kernels) {
        println!("\n{deg} deg (sum {:.4})", k.iter().sum::<f64>());
        for row in k.chunks(bank.size) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.2}")).collect();
            println!("  {}", cells.join(" "));
        }
    }
    Ok(())
}
