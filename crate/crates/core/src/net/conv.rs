use super::{SpikeMap, SpikeRecord, WeightTensor};
use crate::train::wta_select;
use crate::{Error, Result};

/// Lateral inhibition applied to a convolution layer's output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inhibition {
    Off,
    /// One spike per map per frame, and no two spikes (in any maps) closer
    /// than `radius` in Chebyshev distance.
    Wta { radius: usize },
}

#[derive(Debug, Clone)]
pub struct ConvOutput {
    pub spikes: SpikeMap,
    /// Membrane potentials at the end of the frame, `(map, row, col)`;
    /// fired neurons keep the value they fired with.
    pub potentials: Vec<f64>,
}

/// Output extent of a valid convolution or pooling pass.
pub(crate) fn output_extent(input: usize, k: usize, stride: usize) -> usize {
    if input < k {
        0
    } else {
        (input - k) / stride + 1
    }
}

/// Event-driven integrate-and-fire convolution.
///
/// Input spikes are consumed in processing order. Each adds its weight to
/// every output neuron whose receptive field covers it; a neuron fires once,
/// with the rank of the spike that first lifts its potential to `threshold`,
/// and ignores later input. Padding is none (valid convolution).
///
/// With [`Inhibition::Wta`] a neuron that crosses threshold is only allowed
/// to fire if winner-takes-all arbitration admits it. Since the inhibition
/// constraints only accumulate during a frame this is the same as filtering
/// the uninhibited output through [`wta_select`].
pub fn conv_forward(
    input: &SpikeMap,
    weights: &WeightTensor,
    stride: usize,
    threshold: f64,
    inhibition: Inhibition,
    layer: usize,
) -> Result<ConvOutput> {
    if weights.in_maps != input.maps {
        return Err(Error::Validation(format!(
            "layer {layer}: weights expect {} input maps, input has {}",
            weights.in_maps, input.maps
        )));
    }
    if stride == 0 || weights.k == 0 {
        return Err(Error::Validation(format!("layer {layer}: zero stride or kernel")));
    }
    let k = weights.k;
    let oh = output_extent(input.height, k, stride);
    let ow = output_extent(input.width, k, stride);
    let maps = weights.out_maps;
    let mut potentials = vec![0.0f64; maps * oh * ow];
    let mut fired = vec![false; maps * oh * ow];
    let mut out = Vec::new();

    for s in &input.spikes {
        if s.map >= input.maps || s.row >= input.height || s.col >= input.width {
            return Err(Error::Validation(format!(
                "layer {layer}: input spike ({}, {}, {}) outside {}x{}x{}",
                s.map, s.row, s.col, input.maps, input.height, input.width
            )));
        }
        let (rows, cols) = (covering(s.row, k, stride, oh), covering(s.col, k, stride, ow));
        for i in rows.clone() {
            let dy = s.row - i * stride;
            for j in cols.clone() {
                let dx = s.col - j * stride;
                for m in 0..maps {
                    let idx = (m * oh + i) * ow + j;
                    if fired[idx] {
                        continue;
                    }
                    potentials[idx] += weights.get(m, s.map, dy, dx);
                    if potentials[idx] >= threshold {
                        fired[idx] = true;
                        out.push(SpikeRecord {
                            layer,
                            map: m,
                            row: i,
                            col: j,
                            rank: s.rank,
                        });
                    }
                }
            }
        }
    }

    let mut spikes = SpikeMap::new(maps, oh, ow, out);
    if let Inhibition::Wta { radius } = inhibition {
        spikes.spikes = wta_select(&spikes.spikes, radius, maps).winners;
    }
    Ok(ConvOutput { spikes, potentials })
}

/// Output positions along one axis whose window `[i*stride, i*stride + k)`
/// contains `pos`.
fn covering(pos: usize, k: usize, stride: usize, extent: usize) -> std::ops::Range<usize> {
    let lo = if pos + 1 >= k { (pos + 1 - k).div_ceil(stride) } else { 0 };
    let hi = (pos / stride + 1).min(extent);
    lo..hi.max(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spike(map: usize, row: usize, col: usize, rank: f64) -> SpikeRecord {
        SpikeRecord {
            layer: 0,
            map,
            row,
            col,
            rank,
        }
    }

    #[test]
    fn covering_ranges() {
        assert_eq!(covering(0, 5, 1, 10), 0..1);
        assert_eq!(covering(4, 5, 1, 10), 0..5);
        assert_eq!(covering(13, 5, 1, 10), 9..10);
        assert_eq!(covering(7, 5, 5, 3), 1..2);
        assert_eq!(covering(7, 3, 2, 10), 3..4);
        assert_eq!(covering(6, 3, 2, 10), 2..4);
    }

    #[test]
    fn no_input_no_output() {
        let input = SpikeMap::new(1, 8, 8, vec![]);
        let w = WeightTensor::filled(2, 1, 3, 1.0);
        let out = conv_forward(&input, &w, 1, 1.0, Inhibition::Off, 1).unwrap();
        assert!(out.spikes.is_empty());
        assert_eq!((out.spikes.height, out.spikes.width), (6, 6));
    }

    #[test]
    fn fires_once_at_second_input() {
        // one 3x3 neuron, unit weights, inputs at ranks 1, 2, 3
        let input = SpikeMap::new(
            1,
            3,
            3,
            vec![spike(0, 0, 0, 1.0), spike(0, 1, 1, 2.0), spike(0, 2, 2, 3.0)],
        );
        let w = WeightTensor::filled(1, 1, 3, 1.0);
        let out = conv_forward(&input, &w, 1, 2.0, Inhibition::Off, 1).unwrap();
        assert_eq!(out.spikes.len(), 1);
        assert_eq!(out.spikes.spikes[0].rank, 2.0);
        // frozen after firing: the rank-3 input is not integrated
        assert_eq!(out.potentials, vec![2.0]);
    }

    #[test]
    fn shape_mismatch_is_validation_error() {
        let input = SpikeMap::new(2, 8, 8, vec![]);
        let w = WeightTensor::filled(2, 1, 3, 1.0);
        assert!(matches!(
            conv_forward(&input, &w, 1, 1.0, Inhibition::Off, 1),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn wta_limits_each_map_to_one_spike() {
        let spikes = (0..6).map(|i| spike(0, i, i, i as f64 / 10.0)).collect();
        let input = SpikeMap::new(1, 12, 12, spikes);
        let w = WeightTensor::filled(3, 1, 2, 1.0);
        let free = conv_forward(&input, &w, 1, 1.0, Inhibition::Off, 1).unwrap();
        let wta = conv_forward(&input, &w, 1, 1.0, Inhibition::Wta { radius: 2 }, 1).unwrap();
        assert!(free.spikes.len() > wta.spikes.len());
        let mut maps: Vec<usize> = wta.spikes.spikes.iter().map(|s| s.map).collect();
        maps.dedup();
        assert_eq!(maps.len(), wta.spikes.len());
    }
}
