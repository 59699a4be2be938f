use dvs_snn::event::{Event, Polarity, SensorGeometry};
use dvs_snn::sim::{simulate_events, IntensityFrame, SimConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const VIDEO_W: usize = 24;
pub const VIDEO_H: usize = 18;

/// Every pixel of every frame drawn independently from U[0, 1).
pub fn random_video(rng: &mut ChaCha8Rng, frames: usize) -> Vec<IntensityFrame> {
    (0..frames)
        .map(|i| {
            let values = (0..VIDEO_W * VIDEO_H).map(|_| rng.random()).collect();
            IntensityFrame::new(VIDEO_W, VIDEO_H, values, i as u64 * 1000).unwrap()
        })
        .collect()
}

pub fn uncapped(c: f64) -> SimConfig {
    SimConfig {
        log_threshold: c,
        max_events_per_pixel_per_interval: u32::MAX,
        target_geometry: SensorGeometry::new(VIDEO_W as u16, VIDEO_H as u16).unwrap(),
        ..SimConfig::default()
    }
}

/// Emits one event at a time while the pixel is a full threshold away
/// from its running reference.
pub fn stepping_oracle(video: &[IntensityFrame], cfg: &SimConfig) -> Vec<Event> {
    let c = cfg.log_threshold;
    let log = |v: f64| (v + cfg.eps).ln();
    let w = video[0].width;
    let mut out = Vec::new();
    for idx in 0..video[0].values.len() {
        let mut steps = 0i64;
        let base = log(video[0].values[idx]);
        for pair in video.windows(2) {
            let target = log(pair[1].values[idx]);
            let mut emitted = Vec::new();
            loop {
                let d = target - (base + steps as f64 * c);
                if d.abs() < c * (1.0 - 1e-9) || emitted.len() as u64 >= cfg.max_events_per_pixel_per_interval as u64 {
                    break;
                }
                let p = if d > 0.0 { Polarity::On } else { Polarity::Off };
                steps += if d > 0.0 { 1 } else { -1 };
                emitted.push(p);
            }
            let k = emitted.len() as u64;
            let dt = pair[1].t - pair[0].t;
            for (j, p) in emitted.into_iter().enumerate() {
                let t = pair[0].t + ((j as u64 + 1) * dt).div_ceil(k);
                out.push(Event::new((idx % w) as u16, (idx / w) as u16, t, p));
            }
        }
    }
    out
}

/// Replays events as +-C steps from the first frame and checks every pixel
/// ends within C of the last frame's log intensity.
pub fn check_consistency(video: &[IntensityFrame], cfg: &SimConfig) -> Result<(), String> {
    let events = simulate_events(video, cfg).map_err(|e| e.to_string())?;
    let log = |v: f64| (v + cfg.eps).ln();
    let w = video[0].width;
    let mut level: Vec<f64> = video[0].values.iter().map(|&v| log(v)).collect();
    for e in &events {
        let idx = e.y as usize * w + e.x as usize;
        level[idx] += if e.p == Polarity::On { cfg.log_threshold } else { -cfg.log_threshold };
    }
    let last = video.last().unwrap();
    for (idx, l) in level.iter().enumerate() {
        let gap = (log(last.values[idx]) - l).abs();
        if gap >= cfg.log_threshold {
            return Err(format!("pixel {idx} ends {gap:.4} from its reference at C={}", cfg.log_threshold));
        }
    }
    Ok(())
}

/// Thresholds 0.05, 0.06, ..., 1.00.
pub fn threshold_grid() -> Vec<f64> {
    (5..=100).map(|i| i as f64 / 100.0).collect()
}

/// Total event count must not grow along the threshold grid, with and
/// without the per-interval cap.
pub fn check_monotone(video: &[IntensityFrame]) -> Result<(), String> {
    for cap in [SimConfig::default().max_events_per_pixel_per_interval, u32::MAX] {
        let mut prev = usize::MAX;
        for c in threshold_grid() {
            let cfg = SimConfig {
                max_events_per_pixel_per_interval: cap,
                ..uncapped(c)
            };
            let n = simulate_events(video, &cfg).map_err(|e| e.to_string())?.len();
            if n > prev {
                return Err(format!("count rose to {n} from {prev} at C={c} (cap {cap})"));
            }
            prev = n;
        }
    }
    Ok(())
}

pub fn check_video(video: &[IntensityFrame]) -> Result<(), String> {
    for c in [0.1, 0.3, 0.5, 0.9] {
        check_consistency(video, &uncapped(c))?;
    }
    check_monotone(video)
}
