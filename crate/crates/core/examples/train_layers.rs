//! Layer-wise STDP training on a small synthetic corpus.
//!
//! cargo run --release --example train_layers -- [weights.snnw]

use dvs_snn::eval::{generate_corpus, SyntheticConfig};
use dvs_snn::event::TimestampFrame;
use dvs_snn::net::{write_weight_file, Network, NetworkConfig, PentConfig};
use dvs_snn::train::{train_network, FrameOrder, StdpParams, TrainSchedule};

fn main() -> dvs_snn::Result<()> {
    let cfg = SyntheticConfig {
        uav_frames: 150,
        distractor_frames: 150,
        ..SyntheticConfig::default()
    };
    let corpus = generate_corpus(&cfg, 1)?;
    let frames: Vec<TimestampFrame> = corpus.iter().map(|f| f.labeled.frame.clone()).collect();

    let mut net = Network::new(NetworkConfig::default(), 7)?;
    let schedule = TrainSchedule {
        frames_layer2: 6000,
        frames_layer3: 3000,
        ..TrainSchedule::default()
    };
    let pent = PentConfig::default();
    let reports = train_network(
        &mut net,
        &frames,
        &StdpParams::default(),
        &schedule,
        FrameOrder::Shuffled { seed: 3 },
        Some(&pent),
        None,
    )?;

    for r in &reports {
        println!(
            "layer {}: {} frames, {} updates, C {:.4}{}",
            r.layer,
            r.presentations,
            r.updates,
            r.final_convergence,
            if r.converged { " (converged)" } else { "" }
        );
        // the log has one line per presented frame
        for e in r.log.iter().step_by((r.log.len() / 5).max(1)) {
            println!("    {e}");
        }
    }

    if let Some(path) = std::env::args().nth(1) {
        let text = write_weight_file(&net, &[("seed", "7".into())]);
        std::fs::write(&path, text).map_err(|e| dvs_snn::Error::Io { path: path.clone().into(), source: e })?;
        println!("wrote {path}");
    }
    Ok(())
}
