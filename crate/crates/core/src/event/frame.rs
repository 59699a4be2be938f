use super::{Event, SensorGeometry};
use crate::{Error, Result};
use std::io::Write;

/// Single-channel frame whose populated cells hold the earliest normalized
/// event time `(t - window_start) / window_len` within the window.
///
/// Cells are stored sparsely as `(y * width + x, value)` pairs sorted by
/// cell index; frames are typically well under 1% populated.
#[derive(Debug, Clone, PartialEq)]
pub struct TimestampFrame {
    pub geometry: SensorGeometry,
    pub window_start: u64,
    pub window_len: u64,
    cells: Vec<(u32, f64)>,
}

impl TimestampFrame {
    pub fn empty(geometry: SensorGeometry, window_start: u64, window_len: u64) -> Self {
        TimestampFrame {
            geometry,
            window_start,
            window_len,
            cells: Vec::new(),
        }
    }

    /// Builds a frame from `(cell_index, value)` pairs. Indices must be
    /// unique and in range; values must lie in `[0, 1]`.
    pub fn from_cells(
        geometry: SensorGeometry,
        window_start: u64,
        window_len: u64,
        mut cells: Vec<(u32, f64)>,
    ) -> Result<Self> {
        cells.sort_by_key(|&(i, _)| i);
        let n = geometry.pixel_count() as u32;
        for pair in cells.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Validation(format!("duplicate frame cell {}", pair[0].0)));
            }
        }
        for &(i, v) in &cells {
            if i >= n {
                return Err(Error::Validation(format!("frame cell {i} outside {geometry}")));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Validation(format!("frame cell {i} value {v} outside [0, 1]")));
            }
        }
        Ok(TimestampFrame {
            geometry,
            window_start,
            window_len,
            cells,
        })
    }

    pub fn get(&self, x: u16, y: u16) -> Option<f64> {
        if !self.geometry.contains(x, y) {
            return None;
        }
        let idx = y as u32 * self.geometry.width as u32 + x as u32;
        self.cells
            .binary_search_by_key(&idx, |&(i, _)| i)
            .ok()
            .map(|pos| self.cells[pos].1)
    }

    /// Populated cells as `(cell_index, value)`, ascending by index.
    pub fn cells(&self) -> &[(u32, f64)] {
        &self.cells
    }

    /// Populated cells as `(x, y, value)`.
    pub fn populated(&self) -> impl Iterator<Item = (u16, u16, f64)> + '_ {
        let w = self.geometry.width as u32;
        self.cells
            .iter()
            .map(move |&(i, v)| ((i % w) as u16, (i / w) as u16, v))
    }

    pub fn populated_count(&self) -> usize {
        self.cells.len()
    }

    /// Writes a binary PGM where absent cells are 0 and populated cells map
    /// to `1 + round(254 * value)`.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let (w, h) = (self.geometry.width as usize, self.geometry.height as usize);
        writeln!(out, "P5\n{w} {h}\n255")?;
        let mut pixels = vec![0u8; w * h];
        for &(i, v) in &self.cells {
            pixels[i as usize] = 1 + (254.0 * v).round() as u8;
        }
        out.write_all(&pixels)
    }
}

/// Integrates the events with `window_start <= t < window_start + window_len`
/// into a frame. Polarity is ignored; the earliest event per pixel wins.
pub fn integrate_frame(
    events: &[Event],
    geometry: SensorGeometry,
    window_start: u64,
    window_len: u64,
) -> Result<TimestampFrame> {
    if window_len == 0 {
        return Err(Error::Config("integration window length must be positive".into()));
    }
    let end = window_start.saturating_add(window_len);
    let lo = events.partition_point(|e| e.t < window_start);
    let hi = events.partition_point(|e| e.t < end);

    let mut seen = vec![false; geometry.pixel_count()];
    let mut cells = Vec::new();
    let w = geometry.width as u32;
    for ev in &events[lo..hi] {
        if !geometry.contains(ev.x, ev.y) {
            return Err(Error::Validation(format!(
                "event at ({}, {}) lies outside {geometry} sensor",
                ev.x, ev.y
            )));
        }
        let idx = ev.y as u32 * w + ev.x as u32;
        if !seen[idx as usize] {
            seen[idx as usize] = true;
            let v = (ev.t - window_start) as f64 / window_len as f64;
            cells.push((idx, v));
        }
    }
    cells.sort_by_key(|&(i, _)| i);
    Ok(TimestampFrame {
        geometry,
        window_start,
        window_len,
        cells,
    })
}

pub fn active_pixel_fraction(frame: &TimestampFrame) -> f64 {
    frame.populated_count() as f64 / frame.geometry.pixel_count() as f64
}
