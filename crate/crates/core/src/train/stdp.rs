use crate::net::{SpikeMap, SpikeRecord, WeightTensor};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StdpParams {
    pub a_plus: f64,
    pub a_minus: f64,
    /// Training of a layer stops once [`convergence_metric`] drops below this.
    pub convergence_eps: f64,
}

impl Default for StdpParams {
    fn default() -> Self {
        StdpParams {
            a_plus: 0.04,
            a_minus: 0.03,
            convergence_eps: 0.01,
        }
    }
}

impl StdpParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a_plus", self.a_plus), ("a_minus", self.a_minus)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

/// Which afferents of `winner` fired at or before the winner's rank, laid out
/// `(in_map, dy, dx)` like [`WeightTensor::map_slice`].
pub fn afferent_mask(input: &SpikeMap, winner: &SpikeRecord, k: usize, stride: usize) -> Vec<bool> {
    let grid = input.rank_grid();
    afferent_mask_from_grid(&grid, input, winner, k, stride)
}

pub(crate) fn afferent_mask_from_grid(
    grid: &[f64],
    input: &SpikeMap,
    winner: &SpikeRecord,
    k: usize,
    stride: usize,
) -> Vec<bool> {
    let mut mask = Vec::with_capacity(input.maps * k * k);
    for c in 0..input.maps {
        for dy in 0..k {
            let row = winner.row * stride + dy;
            for dx in 0..k {
                let col = winner.col * stride + dx;
                let fired = row < input.height
                    && col < input.width
                    && grid[(c * input.height + row) * input.width + col] <= winner.rank;
                mask.push(fired);
            }
        }
    }
    mask
}

/// Multiplicative STDP on the weights of `out_map`:
/// `w += a_plus * w * (1 - w)` where the afferent fired, otherwise
/// `w -= a_minus * w * (1 - w)`.
pub fn stdp_update(weights: &mut WeightTensor, out_map: usize, mask: &[bool], params: &StdpParams) {
    let slice = weights.map_slice_mut(out_map);
    debug_assert_eq!(slice.len(), mask.len());
    for (w, &fired) in slice.iter_mut().zip(mask) {
        let delta = *w * (1.0 - *w);
        let next = if fired {
            *w + params.a_plus * delta
        } else {
            *w - params.a_minus * delta
        };
        *w = next.clamp(0.0, 1.0);
    }
}

/// Mean of `w(1 - w)`: 0 for fully binarized weights, 0.25 at `w = 0.5`.
pub fn convergence_metric(weights: &WeightTensor) -> f64 {
    if weights.is_empty() {
        return 0.0;
    }
    weights.values().iter().map(|w| w * (1.0 - w)).sum::<f64>() / weights.len() as f64
}
