//! One frame through the five-layer network, with and without PENT.
//!
//! A cross-shaped target is drawn on an otherwise empty sensor, then the
//! same frame is buried under 2% uniform noise. Layers 3 and 5 keep their
//! untrained initial weights, so the last layer saturates; see
//! `train_layers` for learned features.

use dvs_snn::eval::{inject_noise, NoiseSpec};
use dvs_snn::event::{SensorGeometry, TimestampFrame};
use dvs_snn::net::{Network, NetworkConfig, PentConfig};

fn cross(geometry: SensorGeometry) -> TimestampFrame {
    let mut cells = Vec::new();
    for y in 80u32..100 {
        for x in 110u32..130 {
            if x.abs_diff(120) <= 1 || y.abs_diff(90) <= 1 {
                cells.push((y * geometry.width as u32 + x, (x - 110) as f64 / 20.0));
            }
        }
    }
    TimestampFrame::from_cells(geometry, 0, 50_000, cells).unwrap()
}

fn main() -> dvs_snn::Result<()> {
    let geometry = SensorGeometry::default();
    let net = Network::new(NetworkConfig::default(), 7)?;
    let pent = PentConfig::default();
    let clean = cross(geometry);
    let noisy = inject_noise(&clean, &NoiseSpec::new(0.02, 1)?)?.frame;

    println!("shapes (maps, h, w): {:?}", net.config().shapes()?);
    for (name, frame) in [("clean", &clean), ("2% noise", &noisy)] {
        for (label, p) in [("PENT on ", Some(&pent)), ("PENT off", None)] {
            // untrained deeper layers still run; forward() would refuse them
            let trace = net.forward_to(frame, 5, p)?;
            println!(
                "{name:>9} {label}: input {:>4}, theta1 {:.2}, spikes per layer {:?}",
                frame.populated_count(),
                trace.first_layer_threshold,
                trace.spike_counts()
            );
        }
    }
    Ok(())
}
