//! Seeded generator of labelled event frames: small quadcopter-like rigid
//! shapes versus blobs, line segments and flapping bird silhouettes.
//!
//! Each scene is rendered as a binary silhouette at a handful of sub-steps
//! across the window; pixels whose state flips between consecutive
//! sub-steps emit one event, like an ideal sensor watching a bright object
//! on a dark background.

use super::{Label, LabeledFrame};
use crate::event::{integrate_frame, Event, Polarity, SensorGeometry};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub geometry: SensorGeometry,
    pub uav_frames: usize,
    pub distractor_frames: usize,
    /// Integration window per frame, microseconds.
    pub window_us: u64,
    pub substeps: usize,
    /// Tip-to-tip span of the quadcopter shape, pixels.
    pub uav_span: [f64; 2],
    /// Displacement over one window, pixels.
    pub motion: [f64; 2],
    pub blob_radius: [f64; 2],
    pub line_length: [f64; 2],
    pub bird_wing: [f64; 2],
    /// Background edge fragments per frame (clouds, ground texture), all
    /// sharing one ego-motion.
    pub clutter_fragments: [usize; 2],
    pub clutter_length: [f64; 2],
    /// Draw rotors as rim outlines instead of spinning blades.
    pub rotor_rims: bool,
    /// Largest absolute attitude of the quadcopter shape, radians.
    pub uav_tilt: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            geometry: SensorGeometry::default(),
            uav_frames: 500,
            distractor_frames: 500,
            window_us: 50_000,
            substeps: 6,
            uav_span: [24.0, 32.0],
            motion: [0.5, 1.5],
            blob_radius: [2.0, 5.0],
            line_length: [15.0, 35.0],
            bird_wing: [4.0, 8.0],
            clutter_fragments: [22, 26],
            clutter_length: [3.0, 8.0],
            rotor_rims: true,
            uav_tilt: 0.3,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let ranges = [
            ("uav_span", self.uav_span),
            ("motion", self.motion),
            ("blob_radius", self.blob_radius),
            ("line_length", self.line_length),
            ("bird_wing", self.bird_wing),
            ("clutter_length", self.clutter_length),
        ];
        for (name, [lo, hi]) in ranges {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return Err(Error::Config(format!("synthetic {name} range [{lo}, {hi}] is invalid")));
            }
        }
        if self.clutter_fragments[0] > self.clutter_fragments[1] {
            return Err(Error::Config("synthetic clutter_fragments range is invalid".into()));
        }
        if self.window_us == 0 || self.substeps == 0 {
            return Err(Error::Config("synthetic window and substeps must be positive".into()));
        }
        let margin = self.uav_span[1].max(self.line_length[1]) / 2.0 + self.motion[1] + 2.0;
        if 2.0 * margin >= self.geometry.width.min(self.geometry.height) as f64 {
            return Err(Error::Config(format!(
                "sensor {} is too small for the synthetic shapes",
                self.geometry
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SceneKind {
    Uav,
    Blob,
    Line,
    Bird,
}

impl SceneKind {
    pub fn label(self) -> Label {
        match self {
            SceneKind::Uav => Label::Present,
            _ => Label::Absent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticFrame {
    pub kind: SceneKind,
    /// Span, radius, length or wing length of the object, pixels.
    pub size: f64,
    pub labeled: LabeledFrame,
}

#[derive(Debug, Clone, Copy)]
enum Stroke {
    Segment { a: (f64, f64), b: (f64, f64), half_width: f64 },
    Disc { c: (f64, f64), r: f64 },
    Rim { c: (f64, f64), r: f64, half_width: f64 },
}

impl Stroke {
    fn covers(&self, p: (f64, f64)) -> bool {
        match *self {
            Stroke::Disc { c, r } => (p.0 - c.0).hypot(p.1 - c.1) <= r,
            Stroke::Rim { c, r, half_width } => ((p.0 - c.0).hypot(p.1 - c.1) - r).abs() <= half_width,
            Stroke::Segment { a, b, half_width } => {
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                let len2 = dx * dx + dy * dy;
                let s = if len2 == 0.0 {
                    0.0
                } else {
                    (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
                };
                (p.0 - a.0 - s * dx).hypot(p.1 - a.1 - s * dy) <= half_width
            }
        }
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        match *self {
            Stroke::Disc { c, r } => (c.0 - r, c.1 - r, c.0 + r, c.1 + r),
            Stroke::Rim { c, r, half_width: h } => (c.0 - r - h, c.1 - r - h, c.0 + r + h, c.1 + r + h),
            Stroke::Segment { a, b, half_width: h } => {
                (a.0.min(b.0) - h, a.1.min(b.1) - h, a.0.max(b.0) + h, a.1.max(b.1) + h)
            }
        }
    }
}

/// Everything needed to pose one object at normalized time `s` in `[0, 1]`.
#[derive(Debug, Clone)]
struct Scene {
    kind: SceneKind,
    start: (f64, f64),
    velocity: (f64, f64),
    angle: f64,
    spin: f64,
    size: f64,
    // per-rotor blade phase (uav) or flap phase (bird)
    phases: [f64; 4],
    rate: f64,
    rims: bool,
}

const LINE_HALF_WIDTH: f64 = 0.6;

fn polar(c: (f64, f64), r: f64, a: f64) -> (f64, f64) {
    (c.0 + r * a.cos(), c.1 + r * a.sin())
}

impl Scene {
    fn strokes(&self, s: f64) -> Vec<Stroke> {
        let c = (self.start.0 + self.velocity.0 * s, self.start.1 + self.velocity.1 * s);
        let angle = self.angle + self.spin * s;
        let h = LINE_HALF_WIDTH;
        match self.kind {
            SceneKind::Uav => {
                let rotor = 0.2 * self.size;
                let arm = self.size / 2.0 - rotor;
                let mut out = vec![Stroke::Disc { c, r: 0.09 * self.size }];
                for k in 0..4 {
                    let a = angle + FRAC_PI_4 + k as f64 * FRAC_PI_2;
                    let hub = polar(c, arm, a);
                    out.push(Stroke::Segment { a: c, b: hub, half_width: h });
                    if self.rims {
                        out.push(Stroke::Rim { c: hub, r: rotor, half_width: h });
                    } else {
                        let blade = self.phases[k] + self.rate * s;
                        out.push(Stroke::Segment {
                            a: polar(hub, rotor, blade),
                            b: polar(hub, rotor, blade + PI),
                            half_width: h,
                        });
                    }
                }
                out
            }
            SceneKind::Blob => vec![Stroke::Disc { c, r: self.size }],
            SceneKind::Line => {
                let half = self.size / 2.0;
                vec![Stroke::Segment {
                    a: polar(c, half, angle),
                    b: polar(c, half, angle + PI),
                    half_width: h,
                }]
            }
            SceneKind::Bird => {
                let flap = 0.5 * (self.phases[0] + self.rate * s).sin();
                let spread = 0.6 + flap;
                let back = angle + PI;
                vec![
                    Stroke::Segment { a: c, b: polar(c, self.size, back - spread), half_width: h },
                    Stroke::Segment { a: c, b: polar(c, self.size, back + spread), half_width: h },
                ]
            }
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

fn sample_scene(kind: SceneKind, cfg: &SyntheticConfig, rng: &mut ChaCha8Rng) -> Scene {
    let size = match kind {
        SceneKind::Uav => uniform(rng, cfg.uav_span),
        SceneKind::Blob => uniform(rng, cfg.blob_radius),
        SceneKind::Line => uniform(rng, cfg.line_length),
        SceneKind::Bird => uniform(rng, cfg.bird_wing),
    };
    let reach = cfg.uav_span[1].max(cfg.line_length[1]) / 2.0 + cfg.motion[1] + 2.0;
    let (w, h) = (cfg.geometry.width as f64, cfg.geometry.height as f64);
    let start = (rng.random_range(reach..w - reach), rng.random_range(reach..h - reach));
    let heading = rng.random_range(0.0..TAU);
    let dist = uniform(rng, cfg.motion);
    let velocity = (dist * heading.cos(), dist * heading.sin());
    let spin = match kind {
        SceneKind::Uav | SceneKind::Line => rng.random_range(-0.15..0.15),
        _ => 0.0,
    };
    let angle = match kind {
        SceneKind::Bird => heading,
        SceneKind::Uav if cfg.uav_tilt < PI => rng.random_range(-cfg.uav_tilt..=cfg.uav_tilt),
        _ => rng.random_range(0.0..TAU),
    };
    let phases = [
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
    ];
    let rate = match kind {
        SceneKind::Uav => rng.random_range(2.0..4.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
        SceneKind::Bird => rng.random_range(2.0..5.0),
        _ => 0.0,
    };
    Scene {
        kind,
        start,
        velocity,
        angle,
        spin,
        size,
        phases,
        rate,
        rims: cfg.rotor_rims,
    }
}

/// Events of one scene over `[window_start, window_start + window_us)`,
/// sorted by time.
fn render_events(scenes: &[Scene], cfg: &SyntheticConfig, window_start: u64, rng: &mut ChaCha8Rng) -> Vec<Event> {
    let mut events = Vec::new();
    for scene in scenes {
        render_scene(scene, cfg, window_start, rng, &mut events);
    }
    events.sort_by_key(|e| (e.t, e.y, e.x));
    // overlapping objects can flip the same pixel twice in one slot
    events.dedup();
    events
}

fn render_scene(scene: &Scene, cfg: &SyntheticConfig, window_start: u64, rng: &mut ChaCha8Rng, events: &mut Vec<Event>) {
    let steps = cfg.substeps;
    let poses: Vec<Vec<Stroke>> = (0..=steps).map(|i| scene.strokes(i as f64 / steps as f64)).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for st in poses.iter().flatten() {
        let b = st.bounds();
        x0 = x0.min(b.0);
        y0 = y0.min(b.1);
        x1 = x1.max(b.2);
        y1 = y1.max(b.3);
    }
    let (gw, gh) = (cfg.geometry.width as i64, cfg.geometry.height as i64);
    let cx0 = (x0.floor() as i64 - 1).clamp(0, gw);
    let cy0 = (y0.floor() as i64 - 1).clamp(0, gh);
    let cx1 = (x1.ceil() as i64 + 1).clamp(0, gw);
    let cy1 = (y1.ceil() as i64 + 1).clamp(0, gh);

    let slot = cfg.window_us as f64 / steps as f64;
    for y in cy0..cy1 {
        for x in cx0..cx1 {
            let p = (x as f64 + 0.5, y as f64 + 0.5);
            let mut prev = poses[0].iter().any(|s| s.covers(p));
            for (i, pose) in poses.iter().enumerate().skip(1) {
                let now = pose.iter().any(|s| s.covers(p));
                if now != prev {
                    let offset = (((i - 1) as f64 + rng.random::<f64>()) * slot) as u64;
                    let t = window_start + offset.min(cfg.window_us - 1);
                    let pol = if now { Polarity::On } else { Polarity::Off };
                    events.push(Event::new(x as u16, y as u16, t, pol));
                }
                prev = now;
            }
        }
    }
}

/// Short static-looking background edges drifting with a common velocity.
fn sample_clutter(cfg: &SyntheticConfig, rng: &mut ChaCha8Rng) -> Vec<Scene> {
    let [lo, hi] = cfg.clutter_fragments;
    let n = if lo == hi { lo } else { rng.random_range(lo..=hi) };
    let heading = rng.random_range(0.0..TAU);
    let dist = uniform(rng, cfg.motion);
    let velocity = (dist * heading.cos(), dist * heading.sin());
    let (w, h) = (cfg.geometry.width as f64, cfg.geometry.height as f64);
    (0..n)
        .map(|_| Scene {
            kind: SceneKind::Line,
            start: (rng.random_range(0.0..w), rng.random_range(0.0..h)),
            velocity,
            angle: rng.random_range(0.0..TAU),
            spin: 0.0,
            size: uniform(rng, cfg.clutter_length),
            phases: [0.0; 4],
            rate: 0.0,
            rims: false,
        })
        .collect()
}

fn frame_seed(seed: u64, idx: usize) -> u64 {
    super::noise::frame_noise_seed(seed, -1.0, idx)
}

/// Generates the labelled corpus: `uav_frames` target scenes and
/// `distractor_frames` scenes split evenly across blobs, lines and birds,
/// in a seeded random order. Frame `i` covers window `i * window_us`.
pub fn generate_corpus(cfg: &SyntheticConfig, seed: u64) -> Result<Vec<SyntheticFrame>> {
    cfg.validate()?;
    let distractors = [SceneKind::Blob, SceneKind::Line, SceneKind::Bird];
    let mut kinds: Vec<SceneKind> = std::iter::repeat_n(SceneKind::Uav, cfg.uav_frames)
        .chain((0..cfg.distractor_frames).map(|i| distractors[i % 3]))
        .collect();
    kinds.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut out = Vec::with_capacity(kinds.len());
    for (i, kind) in kinds.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(frame_seed(seed, i));
        let scene = sample_scene(kind, cfg, &mut rng);
        let start = i as u64 * cfg.window_us;
        let region = bounding_region(&render_events(std::slice::from_ref(&scene), cfg, start, &mut rng.clone()));
        let size = scene.size;
        let mut scenes = sample_clutter(cfg, &mut rng);
        scenes.push(scene);
        let events = render_events(&scenes, cfg, start, &mut rng);
        let frame = integrate_frame(&events, cfg.geometry, start, cfg.window_us)?;
        out.push(SyntheticFrame {
            kind,
            size,
            labeled: LabeledFrame {
                frame,
                label: kind.label(),
                region,
            },
        });
    }
    Ok(out)
}

fn bounding_region(events: &[Event]) -> Option<(u16, u16, u16, u16)> {
    let first = events.first()?;
    let mut r = (first.x, first.y, first.x + 1, first.y + 1);
    for e in events {
        r = (r.0.min(e.x), r.1.min(e.y), r.2.max(e.x + 1), r.3.max(e.y + 1));
    }
    Some(r)
}
