//! Turns a synthetic intensity video into an address-event stream.
//!
//! A bright square slides across a dark, faintly textured 240x180 frame; the simulator emits
//! log-contrast events, keeps only those on strong edges and the result is
//! written as EVT-CSV.
//!
//! cargo run --example simulate_video -- [out.evt]

use dvs_snn::event::{serialize_event_stream, EventFormat, Polarity, SensorGeometry};
use dvs_snn::sim::{simulate_events, simulate_video, IntensityFrame, SimConfig};

fn square_frame(x0: usize, t: u64) -> IntensityFrame {
    let values = (0..240 * 180)
        .map(|i| {
            let (x, y) = (i % 240, i / 240);
            if (x0..x0 + 16).contains(&x) && (82..98).contains(&y) {
                0.85
            } else {
                // faint static texture so the gradient quantile is not just zero
                0.08 + 0.03 * (x as f64 / 7.0).sin() * (y as f64 / 5.0).cos()
            }
        })
        .collect();
    IntensityFrame::new(240, 180, values, t).unwrap()
}

fn main() -> dvs_snn::Result<()> {
    let frames: Vec<IntensityFrame> = (0..12).map(|i| square_frame(30 + 4 * i, i as u64 * 33_333)).collect();
    let cfg = SimConfig::default();

    let raw = simulate_events(&frames, &cfg)?;
    let events = simulate_video(&frames, &cfg)?;
    let on = events.iter().filter(|e| e.p == Polarity::On).count();
    println!("{} frames, C = {}", frames.len(), cfg.log_threshold);
    println!("raw events {}, after edge sparsification {}", raw.len(), events.len());
    println!("ON {on}, OFF {}", events.len() - on);

    for c in [0.15, 0.3, 0.6] {
        let n = simulate_events(&frames, &SimConfig { log_threshold: c, ..cfg.clone() })?.len();
        println!("  C = {c:<4} -> {n} events");
    }

    if let Some(path) = std::env::args().nth(1) {
        let bytes = serialize_event_stream(&events, SensorGeometry::default(), EventFormat::Csv)?;
        std::fs::write(&path, bytes).map_err(|e| dvs_snn::Error::Io { path: path.clone().into(), source: e })?;
        println!("wrote {path}");
    }
    Ok(())
}
