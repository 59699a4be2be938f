mod common;

use common::*;
use dvs_snn::net::{conv_forward, Inhibition, SpikeRecord};
use dvs_snn::train::wta_select;
use rand::Rng;

fn candidates(rng: &mut rand_chacha::ChaCha8Rng, n: usize, maps: usize, extent: usize) -> Vec<SpikeRecord> {
    let mut c: Vec<SpikeRecord> = (0..n)
        .map(|_| SpikeRecord {
            layer: 3,
            map: rng.random_range(0..maps),
            row: rng.random_range(0..extent),
            col: rng.random_range(0..extent),
            rank: rng.random_range(0..8) as f64 / 8.0,
        })
        .collect();
    // a neuron fires at most once per frame
    c.sort_by_key(|s| (s.map, s.row, s.col));
    c.dedup_by_key(|s| (s.map, s.row, s.col));
    c.sort_by(|a, b| a.processing_order(b));
    c
}

#[test]
fn fuzzed_frames_satisfy_both_constraints() {
    let mut rng = rng(0x3A);
    let mut checked = 0;
    for frame in 0..10_000 {
        let kernel = rng.random_range(1..=6);
        let maps = rng.random_range(1..=5);
        let n = rng.random_range(0..=10);
        let cands = candidates(&mut rng, n, maps, 20);
        let out = wta_select(&cands, kernel, maps);
        let errs = wta_violations(&cands, &out, kernel);
        assert!(errs.is_empty(), "frame {frame}: {errs:?}");
        assert_eq!(out.winners, exhaustive_wta(&cands, kernel), "frame {frame}");
        checked += 1;
    }
    assert_eq!(checked, 10_000);
}

#[test]
fn large_frames_from_conv_output() {
    let mut rng = rng(0x3B);
    for _ in 0..200 {
        let input = random_spike_map(&mut rng, 2, 30, 30, 0.15);
        let weights = dyadic_weights(&mut rng, 6, 2, 5);
        let free = conv_forward(&input, &weights, 1, 2.0, Inhibition::Off, 3).unwrap();
        let out = wta_select(&free.spikes.spikes, 5, 6);
        assert!(wta_violations(&free.spikes.spikes, &out, 5).is_empty());
        let inhibited = conv_forward(&input, &weights, 1, 2.0, Inhibition::Wta { radius: 5 }, 3).unwrap();
        assert_eq!(inhibited.spikes.spikes, out.winners);
    }
}

#[test]
fn same_map_pair_has_no_two_winner_assignment() {
    let a = SpikeRecord {
        layer: 3,
        map: 0,
        row: 0,
        col: 0,
        rank: 0.1,
    };
    let b = SpikeRecord {
        row: 40,
        col: 40,
        rank: 0.2,
        ..a
    };
    assert_eq!(exhaustive_wta(&[a, b], 5), vec![a]);
    assert_eq!(wta_select(&[a, b], 5, 1).winners, vec![a]);
    let c = SpikeRecord {
        map: 1,
        row: 3,
        col: 0,
        ..b
    };
    assert_eq!(exhaustive_wta(&[a, c], 5), vec![a]);
    assert_eq!(wta_select(&[a, c], 5, 2).winners, vec![a]);
}
