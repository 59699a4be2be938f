use super::conv::output_extent;
use super::{SpikeMap, SpikeRecord};

/// Earliest-spike max pooling.
///
/// Each full `k x k` window of each map emits at most one spike: the first
/// input spike in processing order, provided the window received at least
/// `threshold` spikes. Partial windows at the right and bottom borders are
/// dropped.
pub fn pool_forward(input: &SpikeMap, k: usize, stride: usize, threshold: f64, layer: usize) -> SpikeMap {
    let oh = output_extent(input.height, k, stride);
    let ow = output_extent(input.width, k, stride);
    let cells = input.maps * oh * ow;
    let mut counts = vec![0usize; cells];
    let mut first: Vec<Option<f64>> = vec![None; cells];

    for s in &input.spikes {
        // windows [i*stride, i*stride + k) containing the spike
        let rows = window_range(s.row, k, stride, oh);
        let cols = window_range(s.col, k, stride, ow);
        for i in rows {
            for j in cols.clone() {
                let idx = (s.map * oh + i) * ow + j;
                counts[idx] += 1;
                first[idx].get_or_insert(s.rank);
            }
        }
    }

    let mut out = Vec::new();
    for m in 0..input.maps {
        for i in 0..oh {
            for j in 0..ow {
                let idx = (m * oh + i) * ow + j;
                if let Some(rank) = first[idx] {
                    if counts[idx] as f64 >= threshold {
                        out.push(SpikeRecord {
                            layer,
                            map: m,
                            row: i,
                            col: j,
                            rank,
                        });
                    }
                }
            }
        }
    }
    SpikeMap::new(input.maps, oh, ow, out)
}

fn window_range(pos: usize, k: usize, stride: usize, extent: usize) -> std::ops::Range<usize> {
    let lo = if pos + 1 >= k { (pos + 1 - k).div_ceil(stride) } else { 0 };
    let hi = (pos / stride + 1).min(extent);
    lo..hi.max(lo)
}
