//! Detection decisions, confusion-matrix scoring, noise robustness and the
//! synthetic labelled corpus.

mod noise;
mod synthetic;

pub use noise::{inject_noise, noise_sweep, snr_db, NoiseOutcome, NoiseSpec, SweepRow};
pub use synthetic::{generate_corpus, SceneKind, SyntheticConfig, SyntheticFrame};

use crate::event::TimestampFrame;
use crate::net::{Network, PentConfig, SpikeMap};
use crate::{Error, Result};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Absent,
    Present,
}

impl Label {
    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Label::Absent),
            1 => Some(Label::Present),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Label::Absent => 0,
            Label::Present => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFrame {
    pub frame: TimestampFrame,
    pub label: Label,
    /// Optional `(x0, y0, x1, y1)` region around the target, half-open.
    pub region: Option<(u16, u16, u16, u16)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub present: bool,
    /// `(map, row, col)` of each final-layer spike, earliest first.
    pub locations: Vec<(usize, usize, usize)>,
    pub spike_count: usize,
}

/// Presence decision: the target is reported iff the final layer fired.
pub fn detect(final_layer: &SpikeMap) -> Detection {
    let locations: Vec<_> = final_layer.spikes.iter().map(|s| (s.map, s.row, s.col)).collect();
    Detection {
        present: !locations.is_empty(),
        spike_count: locations.len(),
        locations,
    }
}

/// Anything that can turn a frame into a [`Detection`].
pub trait FrameDetector: Sync {
    fn detect_frame(&self, frame: &TimestampFrame) -> Result<Detection>;
}

/// The trained network with PENT on or off.
#[derive(Debug, Clone, Copy)]
pub struct SnnDetector<'a> {
    pub network: &'a Network,
    pub pent: Option<&'a PentConfig>,
}

impl FrameDetector for SnnDetector<'_> {
    fn detect_frame(&self, frame: &TimestampFrame) -> Result<Detection> {
        let trace = self.network.forward(frame, self.pent)?;
        Ok(detect(trace.last()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub true_pos: usize,
    pub false_neg: usize,
    pub false_pos: usize,
    pub true_neg: usize,
}

impl ConfusionMatrix {
    pub fn new(true_pos: usize, false_neg: usize, false_pos: usize, true_neg: usize) -> Self {
        ConfusionMatrix {
            true_pos,
            false_neg,
            false_pos,
            true_neg,
        }
    }

    pub fn record(&mut self, label: Label, present: bool) {
        match (label, present) {
            (Label::Present, true) => self.true_pos += 1,
            (Label::Present, false) => self.false_neg += 1,
            (Label::Absent, true) => self.false_pos += 1,
            (Label::Absent, false) => self.true_neg += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.false_neg + self.false_pos + self.true_neg
    }

    /// `(tp + tn) / total`; zero for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => (self.true_pos + self.true_neg) as f64 / n as f64,
        }
    }
}

impl std::fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "tp={} fn={} fp={} tn={} accuracy={:.4}",
            self.true_pos,
            self.false_neg,
            self.false_pos,
            self.true_neg,
            self.accuracy()
        )
    }
}

/// Scores `detector` on every frame. Frames are processed in parallel on the
/// current rayon pool; the result does not depend on the pool size.
pub fn evaluate(detector: &dyn FrameDetector, frames: &[LabeledFrame]) -> Result<(ConfusionMatrix, Vec<Detection>)> {
    if frames.is_empty() {
        return Err(Error::Validation("cannot evaluate an empty corpus".into()));
    }
    let detections: Vec<Detection> = frames
        .par_iter()
        .map(|f| detector.detect_frame(&f.frame))
        .collect::<Result<_>>()?;
    let mut matrix = ConfusionMatrix::default();
    for (f, d) in frames.iter().zip(&detections) {
        matrix.record(f.label, d.present);
    }
    Ok((matrix, detections))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::SensorGeometry;
    use crate::net::SpikeRecord;

    struct Always(bool);

    impl FrameDetector for Always {
        fn detect_frame(&self, _: &TimestampFrame) -> Result<Detection> {
            Ok(Detection {
                present: self.0,
                locations: Vec::new(),
                spike_count: self.0 as usize,
            })
        }
    }

    fn frame(label: Label) -> LabeledFrame {
        LabeledFrame {
            frame: TimestampFrame::empty(SensorGeometry::default(), 0, 10),
            label,
            region: None,
        }
    }

    #[test]
    fn detect_empty_and_single() {
        let empty = SpikeMap::new(10, 1, 3, Vec::new());
        assert!(!detect(&empty).present);
        let one = SpikeMap::new(
            10,
            8,
            8,
            vec![SpikeRecord {
                layer: 5,
                map: 3,
                row: 5,
                col: 7,
                rank: 2.0,
            }],
        );
        let d = detect(&one);
        assert!(d.present);
        assert_eq!(d.locations, vec![(3, 5, 7)]);
        assert_eq!(d.spike_count, 1);
    }

    #[test]
    fn silent_detector_on_absent_frames() {
        let frames = vec![frame(Label::Absent); 7];
        let (m, _) = evaluate(&Always(false), &frames).unwrap();
        assert_eq!(m, ConfusionMatrix::new(0, 0, 0, 7));
        assert_eq!(m.accuracy(), 1.0);
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(evaluate(&Always(true), &[]).is_err());
    }

    #[test]
    fn tallies() {
        let frames = vec![frame(Label::Absent), frame(Label::Present), frame(Label::Present)];
        let (m, _) = evaluate(&Always(true), &frames).unwrap();
        assert_eq!(m, ConfusionMatrix::new(2, 0, 1, 0));
        assert_eq!(m.total(), 3);
    }
}
