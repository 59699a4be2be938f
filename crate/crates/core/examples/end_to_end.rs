//! The full desk-scale experiment through library calls: 1000-frame
//! synthetic training corpus, Table-1 network, held-out evaluation and the
//! noise sweep. Takes about two minutes in release mode on one core.
//!
//! cargo run --release --example end_to_end

use dvs_snn::eval::{evaluate, generate_corpus, noise_sweep, SceneKind, SnnDetector, SyntheticConfig};
use dvs_snn::event::active_pixel_fraction;
use dvs_snn::net::{Network, NetworkConfig, PentConfig};
use dvs_snn::train::{train_network, FrameOrder, StdpParams, TrainSchedule};
use std::time::Instant;

fn main() -> dvs_snn::Result<()> {
    let cfg = SyntheticConfig::default();
    let t0 = Instant::now();
    let train = generate_corpus(&cfg, 1)?;
    let test = generate_corpus(&cfg, 2)?;
    println!("generated 2 x {} frames in {:.1?}", train.len(), t0.elapsed());

    let pent = PentConfig::default();
    let mut net = Network::new(NetworkConfig::default(), 7)?;
    let frames: Vec<_> = train.iter().map(|f| f.labeled.frame.clone()).collect();
    let t0 = Instant::now();
    let reports = train_network(
        &mut net,
        &frames,
        &StdpParams::default(),
        &TrainSchedule::default(),
        FrameOrder::Corpus,
        Some(&pent),
        None,
    )?;
    for r in &reports {
        println!(
            "layer {}: {} presentations, {} updates, C {:.4}, converged {}",
            r.layer, r.presentations, r.updates, r.final_convergence, r.converged
        );
    }
    println!("trained in {:.1?}", t0.elapsed());

    let labeled: Vec<_> = test.iter().map(|f| f.labeled.clone()).collect();
    let (m, dets) = evaluate(&SnnDetector { network: &net, pent: Some(&pent) }, &labeled)?;
    println!("held-out: {m}");
    for kind in [SceneKind::Uav, SceneKind::Blob, SceneKind::Line, SceneKind::Bird] {
        let hits: Vec<bool> = test.iter().zip(&dets).filter(|(f, _)| f.kind == kind).map(|(_, d)| d.present).collect();
        let rate = hits.iter().filter(|h| **h).count() as f64 / hits.len().max(1) as f64;
        println!("  {kind:?}: {} frames, detection rate {rate:.3}", hits.len());
    }
    let positive: Vec<f64> = test
        .iter()
        .zip(&dets)
        .filter(|(_, d)| d.present)
        .map(|(f, _)| active_pixel_fraction(&f.labeled.frame))
        .collect();
    println!(
        "mean active pixel fraction of positive frames: {:.4}",
        positive.iter().sum::<f64>() / positive.len().max(1) as f64
    );

    for (name, p) in [("PENT on", Some(&pent)), ("PENT off", None)] {
        let rows = noise_sweep(&SnnDetector { network: &net, pent: p }, &labeled, &[0.005, 0.01, 0.02, 0.03, 0.04, 0.05], 7)?;
        let accs: Vec<String> = rows.iter().map(|r| format!("{}:{:.3}", r.fraction, r.matrix.accuracy())).collect();
        println!("{name:>8}: {}", accs.join("  "));
    }
    Ok(())
}
