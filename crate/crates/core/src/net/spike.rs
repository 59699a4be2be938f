use crate::event::TimestampFrame;
use std::cmp::Ordering;

/// A neuron spike. `rank` orders propagation: smaller fires earlier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeRecord {
    pub layer: usize,
    pub map: usize,
    pub row: usize,
    pub col: usize,
    pub rank: f64,
}

impl SpikeRecord {
    /// Processing order: rank, then `(row, col, map)` for equal ranks.
    pub fn processing_order(&self, other: &Self) -> Ordering {
        self.rank
            .total_cmp(&other.rank)
            .then(self.row.cmp(&other.row))
            .then(self.col.cmp(&other.col))
            .then(self.map.cmp(&other.map))
    }
}

/// The spikes of one layer over a frame, with the layer's output shape.
/// `spikes` is always in processing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeMap {
    pub maps: usize,
    pub height: usize,
    pub width: usize,
    pub spikes: Vec<SpikeRecord>,
}

impl SpikeMap {
    pub fn new(maps: usize, height: usize, width: usize, mut spikes: Vec<SpikeRecord>) -> Self {
        spikes.sort_by(SpikeRecord::processing_order);
        SpikeMap {
            maps,
            height,
            width,
            spikes,
        }
    }

    /// Input spikes for the first layer: one per populated cell, ranked by
    /// its normalized timestamp.
    pub fn from_frame(frame: &TimestampFrame) -> Self {
        let spikes = frame
            .populated()
            .map(|(x, y, v)| SpikeRecord {
                layer: 0,
                map: 0,
                row: y as usize,
                col: x as usize,
                rank: v,
            })
            .collect();
        SpikeMap::new(
            1,
            frame.geometry.height as usize,
            frame.geometry.width as usize,
            spikes,
        )
    }

    pub fn len(&self) -> usize {
        self.spikes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spikes.is_empty()
    }

    /// Dense `(map, row, col)` grid of firing ranks, `INFINITY` where silent.
    pub fn rank_grid(&self) -> Vec<f64> {
        let mut grid = vec![f64::INFINITY; self.maps * self.height * self.width];
        for s in &self.spikes {
            let idx = (s.map * self.height + s.row) * self.width + s.col;
            if s.rank < grid[idx] {
                grid[idx] = s.rank;
            }
        }
        grid
    }
}
