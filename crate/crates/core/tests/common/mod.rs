#![allow(dead_code)]

use dvs_snn::event::{SensorGeometry, TimestampFrame};
use dvs_snn::net::{SpikeMap, SpikeRecord, WeightTensor};
use dvs_snn::train::WtaOutcome;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Input map with each cell populated with probability `density`. Ranks
/// are drawn from a coarse grid so equal ranks occur often.
pub fn random_spike_map(rng: &mut ChaCha8Rng, maps: usize, height: usize, width: usize, density: f64) -> SpikeMap {
    let mut spikes = Vec::new();
    for map in 0..maps {
        for row in 0..height {
            for col in 0..width {
                if rng.random_bool(density) {
                    spikes.push(SpikeRecord {
                        layer: 0,
                        map,
                        row,
                        col,
                        rank: rng.random_range(0..16) as f64 / 16.0,
                    });
                }
            }
        }
    }
    SpikeMap::new(maps, height, width, spikes)
}

/// Weights on a 1/64 grid so every partial sum is exact.
pub fn dyadic_weights(rng: &mut ChaCha8Rng, out_maps: usize, in_maps: usize, k: usize) -> WeightTensor {
    let values = (0..out_maps * in_maps * k * k)
        .map(|_| rng.random_range(0..=64) as f64 / 64.0)
        .collect();
    WeightTensor::from_values(out_maps, in_maps, k, values).unwrap()
}

/// Brute-force integrate-and-fire: for every output neuron, collect its
/// receptive field in processing order and report the first rank at which
/// the running sum reaches `threshold`. Returns `(map, row, col, rank)`
/// sorted lexicographically.
pub fn dense_conv_oracle(
    input: &SpikeMap,
    weights: &WeightTensor,
    stride: usize,
    threshold: f64,
) -> Vec<(usize, usize, usize, f64)> {
    let k = weights.k;
    let extent = |n: usize| if n < k { 0 } else { (n - k) / stride + 1 };
    let (oh, ow) = (extent(input.height), extent(input.width));
    let mut fired = Vec::new();
    for m in 0..weights.out_maps {
        for i in 0..oh {
            for j in 0..ow {
                let mut field: Vec<&SpikeRecord> = input
                    .spikes
                    .iter()
                    .filter(|s| {
                        s.row >= i * stride && s.row < i * stride + k && s.col >= j * stride && s.col < j * stride + k
                    })
                    .collect();
                field.sort_by(|a, b| a.processing_order(b));
                let mut v = 0.0;
                for s in field {
                    v += weights.get(m, s.map, s.row - i * stride, s.col - j * stride);
                    if v >= threshold {
                        fired.push((m, i, j, s.rank));
                        break;
                    }
                }
            }
        }
    }
    fired.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
    fired
}

pub fn spike_tuples(map: &SpikeMap) -> Vec<(usize, usize, usize, f64)> {
    let mut v: Vec<_> = map.spikes.iter().map(|s| (s.map, s.row, s.col, s.rank)).collect();
    v.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
    v
}

fn chebyshev(a: &SpikeRecord, b: &SpikeRecord) -> usize {
    a.row.abs_diff(b.row).max(a.col.abs_diff(b.col))
}

fn conflicts(a: &SpikeRecord, b: &SpikeRecord, kernel: usize) -> bool {
    a.map == b.map || chebyshev(a, b) < kernel
}

/// All constraint violations of `outcome` for `candidates` (given in rank
/// order). Empty means valid.
pub fn wta_violations(candidates: &[SpikeRecord], outcome: &WtaOutcome, kernel: usize) -> Vec<String> {
    let mut errs = Vec::new();
    if outcome.winners.len() + outcome.suppressed.len() != candidates.len() {
        errs.push(format!(
            "{} winners + {} suppressed != {} candidates",
            outcome.winners.len(),
            outcome.suppressed.len(),
            candidates.len()
        ));
    }
    let position = |s: &SpikeRecord| candidates.iter().position(|c| c == s);
    for (a_i, a) in outcome.winners.iter().enumerate() {
        if position(a).is_none() {
            errs.push(format!("winner {a:?} is not a candidate"));
        }
        for b in &outcome.winners[a_i + 1..] {
            if a.map == b.map {
                errs.push(format!("map {} has two winners", a.map));
            }
            if chebyshev(a, b) < kernel {
                errs.push(format!("winners {a:?} and {b:?} closer than {kernel}"));
            }
        }
    }
    for s in &outcome.suppressed {
        let Some(pos) = position(s) else {
            errs.push(format!("suppressed {s:?} is not a candidate"));
            continue;
        };
        let vetoed = outcome
            .winners
            .iter()
            .any(|w| position(w).is_some_and(|p| p < pos) && w.rank <= s.rank && conflicts(w, s, kernel));
        if !vetoed {
            errs.push(format!("{s:?} suppressed without an earlier conflicting winner"));
        }
    }
    errs
}

/// Greedy rank-order selection characterised without a scan: the feasible
/// subset whose membership vector is lexicographically largest (earliest
/// candidate most significant). Exponential; for small inputs only.
pub fn exhaustive_wta(candidates: &[SpikeRecord], kernel: usize) -> Vec<SpikeRecord> {
    let n = candidates.len();
    assert!(n <= 16);
    let feasible = |mask: u32| {
        (0..n).all(|a| {
            mask & (1 << a) == 0
                || (a + 1..n).all(|b| mask & (1 << b) == 0 || !conflicts(&candidates[a], &candidates[b], kernel))
        })
    };
    // bit (n-1-i) holds candidate i so larger masks prefer earlier candidates
    let best = (0..1u32 << n)
        .rev()
        .find(|&m| {
            let set = (0..n).fold(0u32, |acc, i| if m & (1 << (n - 1 - i)) != 0 { acc | 1 << i } else { acc });
            feasible(set)
        })
        .unwrap_or(0);
    (0..n)
        .filter(|i| best & (1 << (n - 1 - i)) != 0)
        .map(|i| candidates[i])
        .collect()
}

/// A frame on `geometry` from `(x, y, value)` triples.
pub fn frame_from(geometry: SensorGeometry, cells: &[(u16, u16, f64)]) -> TimestampFrame {
    let w = geometry.width as u32;
    let cells = cells.iter().map(|&(x, y, v)| (y as u32 * w + x as u32, v)).collect();
    TimestampFrame::from_cells(geometry, 0, 50_000, cells).unwrap()
}

/// Plus-shaped blob of the given span centred at `(cx, cy)`, arms three
/// pixels thick, timestamps sweeping left to right.
pub fn cross_blob(geometry: SensorGeometry, cx: u16, cy: u16, span: u16) -> TimestampFrame {
    let half = span / 2;
    let mut cells = Vec::new();
    for y in cy - half..cy + half {
        for x in cx - half..cx + half {
            if x.abs_diff(cx) <= 1 || y.abs_diff(cy) <= 1 {
                cells.push((x, y, (x - (cx - half)) as f64 / span as f64));
            }
        }
    }
    frame_from(geometry, &cells)
}

/// Uniformly scattered cells with random timestamps.
pub fn random_frame(rng: &mut ChaCha8Rng, geometry: SensorGeometry, count: usize) -> TimestampFrame {
    let n = geometry.pixel_count();
    let idx = rand::seq::index::sample(rng, n, count.min(n));
    let cells = idx.into_iter().map(|i| (i as u32, rng.random::<f64>())).collect();
    TimestampFrame::from_cells(geometry, 0, 50_000, cells).unwrap()
}

pub mod sim;
