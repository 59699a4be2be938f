//! Frame-to-event conversion: box-filter downsampling, per-pixel
//! log-intensity reference-level thresholding with linear timestamp
//! interpolation, and gradient-quantile edge sparsification.
//!
//! The sparsifier is a stand-in for the photographic post-processing that
//! usually follows frame-based event simulation: it keeps only events on
//! the strongest spatial edges of the source frame.

mod io;

pub use io::{load_frame_dir, read_manifest, ManifestEntry};

use crate::event::{Event, Polarity, SensorGeometry};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Greyscale frame with luminance in `[0, 1]`, captured at `t` µs.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityFrame {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    pub t: u64,
}

impl IntensityFrame {
    pub fn new(width: usize, height: usize, values: Vec<f64>, t: u64) -> Result<Self> {
        if width == 0 || height == 0 || values.len() != width * height {
            return Err(Error::Validation(format!(
                "intensity frame {width}x{height} with {} values",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Validation(format!("intensity {v} outside [0, 1]")));
        }
        Ok(IntensityFrame {
            width,
            height,
            values,
            t,
        })
    }

    pub fn uniform(width: usize, height: usize, value: f64, t: u64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height], t)
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Contrast threshold on the natural-log intensity scale.
    pub log_threshold: f64,
    /// Offset added before taking the log.
    pub eps: f64,
    pub target_geometry: SensorGeometry,
    pub max_events_per_pixel_per_interval: u32,
    /// Fraction of each frame's gradient magnitudes kept by
    /// [`sparsify_edges`]; 1.0 keeps everything.
    pub edge_keep_fraction: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            log_threshold: 0.3,
            eps: 1e-3,
            target_geometry: SensorGeometry::default(),
            max_events_per_pixel_per_interval: 10,
            edge_keep_fraction: 0.5,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.log_threshold > 0.0) {
            return Err(Error::Config(format!(
                "log_threshold must be positive, got {}",
                self.log_threshold
            )));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive, got {}", self.eps)));
        }
        if self.max_events_per_pixel_per_interval == 0 {
            return Err(Error::Config("event cap must be at least 1".into()));
        }
        if !(self.edge_keep_fraction > 0.0 && self.edge_keep_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "edge_keep_fraction {} outside (0, 1]",
                self.edge_keep_fraction
            )));
        }
        Ok(())
    }
}

/// Box-filter downsampling. Output pixel `(i, j)` is the mean of source
/// rows `[floor(j*H/h), floor((j+1)*H/h))` and the analogous columns.
pub fn downsample(frame: &IntensityFrame, target: SensorGeometry) -> Result<IntensityFrame> {
    let (tw, th) = (target.width as usize, target.height as usize);
    if tw > frame.width || th > frame.height {
        return Err(Error::Config(format!(
            "cannot downsample {}x{} to larger {target}",
            frame.width, frame.height
        )));
    }
    let bounds = |i: usize, out: usize, src: usize| (i * src / out, (i + 1) * src / out);
    let mut values = Vec::with_capacity(tw * th);
    for j in 0..th {
        let (y0, y1) = bounds(j, th, frame.height);
        for i in 0..tw {
            let (x0, x1) = bounds(i, tw, frame.width);
            let mut sum = 0.0;
            for y in y0..y1 {
                sum += frame.values[y * frame.width + x0..y * frame.width + x1]
                    .iter()
                    .sum::<f64>();
            }
            let mean = sum / ((y1 - y0) * (x1 - x0)) as f64;
            values.push(mean.clamp(0.0, 1.0));
        }
    }
    Ok(IntensityFrame {
        width: tw,
        height: th,
        values,
        t: frame.t,
    })
}

// Guards floor(|d| / C) against rounding just below an exact multiple.
const THRESHOLD_SLACK: f64 = 1e-9;

fn check_sequence(frames: &[IntensityFrame]) -> Result<()> {
    if frames.len() < 2 {
        return Err(Error::Validation(format!(
            "event simulation needs at least 2 frames, got {}",
            frames.len()
        )));
    }
    let (w, h) = (frames[0].width, frames[0].height);
    if w > u16::MAX as usize || h > u16::MAX as usize {
        return Err(Error::Validation(format!("frame {w}x{h} exceeds sensor address range")));
    }
    for (i, pair) in frames.windows(2).enumerate() {
        let b = &pair[1];
        if b.width != w || b.height != h {
            return Err(Error::Validation(format!(
                "frame {} is {}x{}, expected {w}x{h}",
                i + 1,
                b.width,
                b.height
            )));
        }
        if b.t <= pair[0].t {
            return Err(Error::Validation(format!(
                "frame {} timestamp {} does not follow {}",
                i + 1,
                b.t,
                pair[0].t
            )));
        }
    }
    Ok(())
}

/// Per-pixel reference-level event emulation.
///
/// Each pixel keeps a reference `log(I0 + eps) + n*C`. For every frame
/// interval `(t1, t2]` the change `d = log(I2 + eps) - reference` yields
/// `k = min(floor(|d| / C), cap)` events of polarity `sign(d)` at
/// `t1 + ceil(j * (t2 - t1) / k)`, `j = 1..=k`, and the reference moves by
/// `k*C*sign(d)`. Output is sorted by `(t, y, x)`.
pub fn simulate_events(frames: &[IntensityFrame], cfg: &SimConfig) -> Result<Vec<Event>> {
    cfg.validate()?;
    check_sequence(frames)?;
    let (w, h) = (frames[0].width, frames[0].height);
    let c = cfg.log_threshold;
    let log = |v: f64| (v + cfg.eps).ln();

    let base: Vec<f64> = frames[0].values.iter().map(|&v| log(v)).collect();
    let mut steps = vec![0i64; w * h];
    let mut events = Vec::new();

    for pair in frames.windows(2) {
        let (t1, t2) = (pair[0].t, pair[1].t);
        let dt = t2 - t1;
        for (idx, &v) in pair[1].values.iter().enumerate() {
            let reference = base[idx] + steps[idx] as f64 * c;
            let d = log(v) - reference;
            let k = ((d.abs() / c + THRESHOLD_SLACK).floor() as u64)
                .min(cfg.max_events_per_pixel_per_interval as u64);
            if k == 0 {
                continue;
            }
            let (p, sign) = if d > 0.0 {
                (Polarity::On, 1)
            } else {
                (Polarity::Off, -1)
            };
            steps[idx] += sign * k as i64;
            let (x, y) = ((idx % w) as u16, (idx / w) as u16);
            for j in 1..=k {
                let t = t1 + (j * dt).div_ceil(k);
                events.push(Event::new(x, y, t, p));
            }
        }
    }
    events.sort_by_key(|e| (e.t, e.y, e.x));
    Ok(events)
}

/// Sobel gradient magnitude with clamped borders.
pub fn gradient_magnitude(frame: &IntensityFrame) -> Vec<f64> {
    let (w, h) = (frame.width as isize, frame.height as isize);
    let px = |x: isize, y: isize| frame.values[(y.clamp(0, h - 1) * w + x.clamp(0, w - 1)) as usize];
    let mut out = Vec::with_capacity(frame.values.len());
    for y in 0..h {
        for x in 0..w {
            let gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1))
                - (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            let gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1))
                - (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

/// Smallest gradient magnitude inside the top `fraction` of `mags`.
fn quantile_threshold(mags: &[f64], fraction: f64) -> f64 {
    let mut sorted = mags.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let keep = ((fraction * sorted.len() as f64) - THRESHOLD_SLACK).ceil().max(1.0) as usize;
    sorted[keep.min(sorted.len()) - 1]
}

/// Keeps events whose pixel lies on a strong edge of the frame that closes
/// the event's interval: gradient magnitude at or above that frame's
/// `edge_keep_fraction` quantile.
pub fn sparsify_edges(events: &[Event], frames: &[IntensityFrame], cfg: &SimConfig) -> Result<Vec<Event>> {
    cfg.validate()?;
    if cfg.edge_keep_fraction >= 1.0 || events.is_empty() {
        return Ok(events.to_vec());
    }
    check_sequence(frames)?;
    let w = frames[0].width;
    let fields: Vec<(Vec<f64>, f64)> = frames
        .iter()
        .map(|f| {
            let mags = gradient_magnitude(f);
            let thr = quantile_threshold(&mags, cfg.edge_keep_fraction);
            (mags, thr)
        })
        .collect();

    let mut out = Vec::with_capacity(events.len());
    for ev in events {
        // the closing frame is the first with capture time >= t
        let j = frames.partition_point(|f| f.t < ev.t).min(frames.len() - 1);
        let (mags, thr) = &fields[j];
        let idx = ev.y as usize * w + ev.x as usize;
        if idx < mags.len() && mags[idx] >= *thr {
            out.push(*ev);
        }
    }
    Ok(out)
}

/// Downsamples every frame to `cfg.target_geometry` (when it differs),
/// simulates events and applies edge sparsification.
pub fn simulate_video(frames: &[IntensityFrame], cfg: &SimConfig) -> Result<Vec<Event>> {
    let target = cfg.target_geometry;
    let frames: Vec<IntensityFrame> = frames
        .iter()
        .map(|f| {
            if f.width == target.width as usize && f.height == target.height as usize {
                Ok(f.clone())
            } else {
                downsample(f, target)
            }
        })
        .collect::<Result<_>>()?;
    let events = simulate_events(&frames, cfg)?;
    sparsify_edges(&events, &frames, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SimConfig {
        SimConfig::default()
    }

    fn frame(w: usize, h: usize, values: Vec<f64>, t: u64) -> IntensityFrame {
        IntensityFrame::new(w, h, values, t).unwrap()
    }

    #[test]
    fn downsample_identity() {
        let values: Vec<f64> = (0..240 * 180).map(|i| (i % 97) as f64 / 96.0).collect();
        let f = frame(240, 180, values, 7);
        assert_eq!(downsample(&f, SensorGeometry::default()).unwrap(), f);
    }

    #[test]
    fn downsample_constant() {
        let f = IntensityFrame::uniform(2, 2, 0.5, 0).unwrap();
        let d = downsample(&f, SensorGeometry::new(1, 1).unwrap()).unwrap();
        assert_eq!(d.values, vec![0.5]);
    }

    #[test]
    fn downsample_checkerboard() {
        let (w, h) = (1920, 1080);
        let values: Vec<f64> = (0..w * h).map(|i| ((i % w + i / w) % 2) as f64).collect();
        let d = downsample(&frame(w, h, values.clone(), 0), SensorGeometry::default()).unwrap();
        // independent box means: 8x6 boxes
        for j in 0..180 {
            for i in 0..240 {
                let mut s = 0.0;
                for y in j * 6..j * 6 + 6 {
                    for x in i * 8..i * 8 + 8 {
                        s += values[y * w + x];
                    }
                }
                assert_eq!(d.at(i, j), s / 48.0);
            }
        }
        assert!(d.values.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn downsample_rejects_upscaling() {
        let f = IntensityFrame::uniform(4, 4, 0.5, 0).unwrap();
        assert!(matches!(
            downsample(&f, SensorGeometry::new(5, 4).unwrap()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn identical_frames_emit_nothing() {
        let a = IntensityFrame::uniform(8, 8, 0.4, 0).unwrap();
        let b = IntensityFrame::uniform(8, 8, 0.4, 1000).unwrap();
        assert!(simulate_events(&[a, b], &cfg()).unwrap().is_empty());
    }

    #[test]
    fn step_emits_three_on_events() {
        let d = (0.30f64 + 1e-3).ln() - (0.10f64 + 1e-3).ln();
        assert!((d - 1.0919).abs() < 1e-4);
        assert_eq!((d / 0.3).floor(), 3.0);

        let a = frame(1, 1, vec![0.10], 0);
        let b = frame(1, 1, vec![0.30], 3000);
        let evs = simulate_events(&[a, b], &cfg()).unwrap();
        assert_eq!(evs.len(), 3);
        assert!(evs.iter().all(|e| e.p == Polarity::On));
        assert_eq!(evs.iter().map(|e| e.t).collect::<Vec<_>>(), vec![1000, 2000, 3000]);
    }

    #[test]
    fn up_then_down_is_balanced() {
        let fs = [
            frame(1, 1, vec![0.10], 0),
            frame(1, 1, vec![0.30], 1000),
            frame(1, 1, vec![0.10], 2000),
        ];
        let evs = simulate_events(&fs, &cfg()).unwrap();
        let ons = evs.iter().filter(|e| e.p == Polarity::On).count();
        let offs = evs.iter().filter(|e| e.p == Polarity::Off).count();
        assert_eq!((ons, offs), (3, 3));
    }

    #[test]
    fn cap_limits_burst() {
        let fs = [frame(1, 1, vec![0.0], 0), frame(1, 1, vec![1.0], 10)];
        let evs = simulate_events(&fs, &cfg()).unwrap();
        assert_eq!(evs.len(), 10);
    }

    #[test]
    fn mismatched_frames_rejected() {
        let a = IntensityFrame::uniform(4, 4, 0.5, 0).unwrap();
        let b = IntensityFrame::uniform(4, 3, 0.5, 10).unwrap();
        assert!(matches!(simulate_events(&[a.clone(), b], &cfg()), Err(Error::Validation(_))));
        assert!(matches!(simulate_events(&[a], &cfg()), Err(Error::Validation(_))));
    }

    #[test]
    fn keep_all_and_uniform_ties() {
        let a = frame(4, 1, vec![0.1, 0.2, 0.3, 0.4], 0);
        let b = frame(4, 1, vec![0.9, 0.9, 0.9, 0.9], 10);
        let evs = simulate_events(&[a.clone(), b.clone()], &cfg()).unwrap();
        let all = SimConfig {
            edge_keep_fraction: 1.0,
            ..cfg()
        };
        assert_eq!(sparsify_edges(&evs, &[a.clone(), b.clone()], &all).unwrap(), evs);
        // closing frame is uniform: every gradient ties at the threshold
        let half = SimConfig {
            edge_keep_fraction: 0.5,
            ..cfg()
        };
        assert_eq!(sparsify_edges(&evs, &[a, b], &half).unwrap(), evs);
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = SimConfig {
            log_threshold: 0.0,
            ..cfg()
        };
        assert!(bad.validate().is_err());
        let bad = SimConfig {
            edge_keep_fraction: 0.0,
            ..cfg()
        };
        assert!(bad.validate().is_err());
    }
}
