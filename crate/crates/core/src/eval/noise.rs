use super::{ConfusionMatrix, FrameDetector, LabeledFrame};
use crate::event::TimestampFrame;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Fraction of all sensor pixels that receive a spurious event.
    pub pixel_fraction: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(pixel_fraction: f64, seed: u64) -> Result<Self> {
        let spec = NoiseSpec { pixel_fraction, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.pixel_fraction) {
            return Err(Error::Validation(format!(
                "noise fraction {} outside [0, 1]",
                self.pixel_fraction
            )));
        }
        Ok(())
    }

    /// Number of noise cells requested on a sensor of `pixels` cells.
    pub fn requested(&self, pixels: usize) -> usize {
        (self.pixel_fraction * pixels as f64 + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseOutcome {
    pub frame: TimestampFrame,
    /// Cells actually populated; below the request only when the frame ran
    /// out of empty cells.
    pub injected: usize,
}

/// Populates `floor(fraction * pixels)` distinct empty cells, chosen
/// uniformly, with uniform timestamps in `[0, 1)`. Existing cells are kept.
pub fn inject_noise(frame: &TimestampFrame, spec: &NoiseSpec) -> Result<NoiseOutcome> {
    spec.validate()?;
    let pixels = frame.geometry.pixel_count();
    let requested = spec.requested(pixels);
    if requested == 0 {
        return Ok(NoiseOutcome {
            frame: frame.clone(),
            injected: 0,
        });
    }
    let mut occupied = vec![false; pixels];
    for &(i, _) in frame.cells() {
        occupied[i as usize] = true;
    }
    let empty: Vec<u32> = (0..pixels as u32).filter(|&i| !occupied[i as usize]).collect();
    let amount = requested.min(empty.len());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let chosen = rand::seq::index::sample(&mut rng, empty.len(), amount);
    let mut cells = frame.cells().to_vec();
    for pos in chosen.iter() {
        cells.push((empty[pos], rng.random::<f64>()));
    }
    let noisy = TimestampFrame::from_cells(frame.geometry, frame.window_start, frame.window_len, cells)?;
    Ok(NoiseOutcome {
        frame: noisy,
        injected: amount,
    })
}

/// `10 log10(signal / noise)` in decibels, with `+inf` when there is no
/// noise and `-inf` when there is no signal.
pub fn snr_db(signal: usize, noise: usize) -> Result<f64> {
    match (signal, noise) {
        (0, 0) => Err(Error::Validation("SNR undefined with no signal and no noise".into())),
        (_, 0) => Ok(f64::INFINITY),
        (0, _) => Ok(f64::NEG_INFINITY),
        (s, n) => Ok(10.0 * (s as f64 / n as f64).log10()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub fraction: f64,
    /// Mean per-frame SNR over frames where it is defined.
    pub mean_snr_db: f64,
    pub matrix: ConfusionMatrix,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "fraction,mean_snr_db,tp,fn,fp,tn,accuracy";

    pub fn csv(&self) -> String {
        let m = &self.matrix;
        format!(
            "{},{:.4},{},{},{},{},{:.4}",
            self.fraction,
            self.mean_snr_db,
            m.true_pos,
            m.false_neg,
            m.false_pos,
            m.true_neg,
            m.accuracy()
        )
    }
}

/// Per-frame noise seed; depends only on the sweep seed, the fraction and
/// the frame index, so rows are stable under any thread count.
pub(crate) fn frame_noise_seed(seed: u64, fraction: f64, frame_idx: usize) -> u64 {
    let mut z = seed
        ^ fraction.to_bits().wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (frame_idx as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Evaluates the detector on noisy copies of the corpus, one row per
/// fraction in ascending order.
pub fn noise_sweep(
    detector: &dyn FrameDetector,
    frames: &[LabeledFrame],
    fractions: &[f64],
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if frames.is_empty() {
        return Err(Error::Validation("cannot sweep an empty corpus".into()));
    }
    let mut sorted = fractions.to_vec();
    for &f in &sorted {
        NoiseSpec::new(f, 0)?;
    }
    sorted.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(sorted.len());
    for fraction in sorted {
        let results: Vec<(bool, Option<f64>)> = frames
            .par_iter()
            .enumerate()
            .map(|(i, lf)| {
                let spec = NoiseSpec::new(fraction, frame_noise_seed(seed, fraction, i))?;
                let noisy = inject_noise(&lf.frame, &spec)?;
                let d = detector.detect_frame(&noisy.frame)?;
                Ok((d.present, snr_db(lf.frame.populated_count(), noisy.injected).ok()))
            })
            .collect::<Result<_>>()?;
        let mut matrix = ConfusionMatrix::default();
        let mut snr_sum = 0.0;
        let mut snr_n = 0usize;
        for (lf, (present, snr)) in frames.iter().zip(&results) {
            matrix.record(lf.label, *present);
            if let Some(s) = snr {
                snr_sum += s;
                snr_n += 1;
            }
        }
        let mean_snr_db = if snr_n == 0 { f64::NAN } else { snr_sum / snr_n as f64 };
        rows.push(SweepRow {
            fraction,
            mean_snr_db,
            matrix,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::SensorGeometry;
    use proptest::prelude::*;

    fn blank() -> TimestampFrame {
        TimestampFrame::empty(SensorGeometry::default(), 0, 1000)
    }

    #[test]
    fn zero_fraction_is_identity() {
        let f = TimestampFrame::from_cells(SensorGeometry::default(), 0, 10, vec![(5, 0.5)]).unwrap();
        let out = inject_noise(&f, &NoiseSpec::new(0.0, 3).unwrap()).unwrap();
        assert_eq!(out.frame, f);
        assert_eq!(out.injected, 0);
    }

    #[test]
    fn half_percent_of_empty_sensor() {
        let out = inject_noise(&blank(), &NoiseSpec::new(0.005, 1).unwrap()).unwrap();
        assert_eq!(out.frame.populated_count(), 216);
        assert_eq!(out.injected, 216);
        assert!(out.frame.cells().iter().all(|&(_, v)| (0.0..1.0).contains(&v)));
    }

    #[test]
    fn requested_counts_are_exact_floors() {
        for (f, n) in [(0.01, 432), (0.02, 864), (0.03, 1296), (0.04, 1728), (0.05, 2160)] {
            assert_eq!(NoiseSpec::new(f, 0).unwrap().requested(43_200), n);
        }
    }

    #[test]
    fn seeded_noise_reproducible() {
        let spec = NoiseSpec::new(0.02, 99).unwrap();
        assert_eq!(inject_noise(&blank(), &spec).unwrap(), inject_noise(&blank(), &spec).unwrap());
    }

    #[test]
    fn saturated_frame_fills_remaining() {
        let g = SensorGeometry::new(4, 4).unwrap();
        let f = TimestampFrame::from_cells(g, 0, 10, (0..10).map(|i| (i, 0.1)).collect()).unwrap();
        let out = inject_noise(&f, &NoiseSpec::new(1.0, 4).unwrap()).unwrap();
        assert_eq!(out.injected, 6);
        assert_eq!(out.frame.populated_count(), 16);
    }

    #[test]
    fn invalid_fraction() {
        assert!(NoiseSpec::new(1.5, 0).is_err());
        assert!(NoiseSpec::new(-0.1, 0).is_err());
    }

    #[test]
    fn snr_values() {
        assert_eq!(snr_db(40, 40).unwrap(), 0.0);
        assert!((snr_db(200, 1).unwrap() - 23.0103).abs() < 1e-4);
        assert_eq!(snr_db(3, 0).unwrap(), f64::INFINITY);
        assert_eq!(snr_db(0, 3).unwrap(), f64::NEG_INFINITY);
        assert!(snr_db(0, 0).is_err());
    }

    proptest! {
        #[test]
        fn signal_cells_untouched(
            cells in proptest::collection::btree_map(0u32..43_200, 0.0f64..=1.0, 0..300),
            fraction in 0.0f64..0.06,
            seed in any::<u64>(),
        ) {
            let f = TimestampFrame::from_cells(SensorGeometry::default(), 0, 10, cells.clone().into_iter().collect()).unwrap();
            let out = inject_noise(&f, &NoiseSpec::new(fraction, seed).unwrap()).unwrap();
            for (i, v) in &cells {
                let (x, y) = ((i % 240) as u16, (i / 240) as u16);
                prop_assert_eq!(out.frame.get(x, y), Some(*v));
            }
            prop_assert_eq!(out.frame.populated_count(), cells.len() + out.injected);
            prop_assert_eq!(out.injected, NoiseSpec::new(fraction, 0).unwrap().requested(43_200));
        }
    }
}
