use crate::net::SpikeRecord;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WtaOutcome {
    pub winners: Vec<SpikeRecord>,
    pub suppressed: Vec<SpikeRecord>,
}

/// Greedy winner-takes-all over rank-ordered candidates.
///
/// A candidate wins iff its map has no winner yet and no earlier winner (in
/// any map) lies within Chebyshev distance `< kernel_size` of it.
pub fn wta_select(candidates: &[SpikeRecord], kernel_size: usize, map_count: usize) -> WtaOutcome {
    let mut has_winner = vec![false; map_count];
    let mut out = WtaOutcome::default();
    for c in candidates {
        let map_free = !has_winner.get(c.map).copied().unwrap_or(false);
        let region_free = out.winners.iter().all(|w| {
            let d = w.row.abs_diff(c.row).max(w.col.abs_diff(c.col));
            d >= kernel_size
        });
        if map_free && region_free {
            if c.map >= has_winner.len() {
                has_winner.resize(c.map + 1, false);
            }
            has_winner[c.map] = true;
            out.winners.push(*c);
        } else {
            out.suppressed.push(*c);
        }
    }
    out
}
