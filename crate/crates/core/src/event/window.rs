use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Integration window lengths (µs) and overlap fractions. Every
/// (length, overlap) pair defines one family of windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSchedule {
    pub lengths: Vec<u64>,
    pub overlaps: Vec<f64>,
}

impl Default for WindowSchedule {
    fn default() -> Self {
        WindowSchedule {
            lengths: vec![10_000, 50_000, 100_000, 200_000],
            overlaps: vec![0.10, 0.50, 0.90],
        }
    }
}

impl WindowSchedule {
    pub fn new(lengths: Vec<u64>, overlaps: Vec<f64>) -> Result<Self> {
        let schedule = WindowSchedule { lengths, overlaps };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn single(length: u64, overlap: f64) -> Result<Self> {
        Self::new(vec![length], vec![overlap])
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() || self.overlaps.is_empty() {
            return Err(Error::Config("window schedule needs at least one length and overlap".into()));
        }
        for &len in &self.lengths {
            for &f in &self.overlaps {
                stride(len, f)?;
            }
        }
        Ok(())
    }

    /// Stride of every (length, overlap) family, lengths outermost.
    pub fn strides(&self) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(self.lengths.len() * self.overlaps.len());
        for &len in &self.lengths {
            for &f in &self.overlaps {
                out.push(stride(len, f)?);
            }
        }
        Ok(out)
    }
}

/// Window stride `L(1-f)`, rounded to whole microseconds.
fn stride(len: u64, overlap: f64) -> Result<u64> {
    if len == 0 {
        return Err(Error::Config("window length must be positive".into()));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::Config(format!("overlap {overlap} outside [0, 1)")));
    }
    let s = (len as f64 * (1.0 - overlap)).round() as u64;
    if s == 0 {
        return Err(Error::Config(format!(
            "window length {len} with overlap {overlap} gives a zero stride"
        )));
    }
    Ok(s)
}

/// Half-open integration window `[start, start + len)` in µs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub start: u64,
    pub len: u64,
}

impl Window {
    pub fn end(&self) -> u64 {
        self.start + self.len
    }

    pub fn contains(&self, t: u64) -> bool {
        t >= self.start && t < self.end()
    }
}

/// Enumerates windows over the half-open span `[t_min, t_max)`.
///
/// Windows are anchored at `t_min`; each family advances by its stride
/// while the start is still inside the span. Families are emitted in
/// schedule order (lengths outermost), starts ascending within a family.
/// For a stream with events at `t_first..=t_last` pass `t_max = t_last + 1`.
pub fn enumerate_windows(t_min: u64, t_max: u64, schedule: &WindowSchedule) -> Result<Vec<Window>> {
    if t_max < t_min {
        return Err(Error::Config(format!("span end {t_max} precedes start {t_min}")));
    }
    let mut out = Vec::new();
    for &len in &schedule.lengths {
        for &f in &schedule.overlaps {
            let step = stride(len, f)?;
            let mut start = t_min;
            while start < t_max {
                out.push(Window { start, len });
                start += step;
            }
        }
    }
    Ok(out)
}
