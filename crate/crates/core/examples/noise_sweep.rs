//! Detection accuracy under additive noise, PENT on and off.
//!
//! Trains a network briefly on one synthetic corpus and sweeps a held-out
//! corpus over the default noise fractions.
//!
//! cargo run --release --example noise_sweep

use dvs_snn::cli::DEFAULT_NOISE_FRACTIONS;
use dvs_snn::eval::{generate_corpus, noise_sweep, LabeledFrame, SnnDetector, SweepRow, SyntheticConfig};
use dvs_snn::event::TimestampFrame;
use dvs_snn::net::{Network, NetworkConfig, PentConfig};
use dvs_snn::train::{train_network, FrameOrder, StdpParams, TrainSchedule};

fn main() -> dvs_snn::Result<()> {
    let cfg = SyntheticConfig {
        uav_frames: 200,
        distractor_frames: 200,
        ..SyntheticConfig::default()
    };
    let train: Vec<TimestampFrame> = generate_corpus(&cfg, 1)?.into_iter().map(|f| f.labeled.frame).collect();
    let test: Vec<LabeledFrame> = generate_corpus(&cfg, 2)?.into_iter().map(|f| f.labeled).collect();

    let pent = PentConfig::default();
    let mut net = Network::new(NetworkConfig::default(), 7)?;
    let schedule = TrainSchedule {
        frames_layer2: 8000,
        frames_layer3: 4000,
        ..TrainSchedule::default()
    };
    train_network(&mut net, &train, &StdpParams::default(), &schedule, FrameOrder::Corpus, Some(&pent), None)?;

    let mut fractions = vec![0.0];
    fractions.extend(DEFAULT_NOISE_FRACTIONS);
    for (name, p) in [("PENT on", Some(&pent)), ("PENT off", None)] {
        let detector = SnnDetector { network: &net, pent: p };
        println!("{name}\n{}", SweepRow::CSV_HEADER);
        for row in noise_sweep(&detector, &test, &fractions, 5)? {
            println!("{}", row.csv());
        }
    }
    Ok(())
}
