//! Address-event data model, on-disk event stream formats, integration
//! windows and timestamp-embedded frames.

mod format;
mod frame;
mod window;

pub use format::{parse_event_stream, serialize_event_stream, EventFormat, EventStream};
pub use frame::{active_pixel_fraction, integrate_frame, TimestampFrame};
pub use window::{enumerate_windows, Window, WindowSchedule};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Direction of the brightness change reported by a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Off,
    On,
}

impl Polarity {
    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Polarity::Off),
            1 => Some(Polarity::On),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Polarity::Off => 0,
            Polarity::On => 1,
        }
    }
}

/// One address-event. `t` is in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub x: u16,
    pub y: u16,
    pub t: u64,
    pub p: Polarity,
}

impl Event {
    pub fn new(x: u16, y: u16, t: u64, p: Polarity) -> Self {
        Event { x, y, t, p }
    }
}

/// Sensor pixel array dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SensorGeometry {
    pub width: u16,
    pub height: u16,
}

impl Default for SensorGeometry {
    fn default() -> Self {
        SensorGeometry {
            width: 240,
            height: 180,
        }
    }
}

impl SensorGeometry {
    pub fn new(width: u16, height: u16) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Config(format!(
                "sensor geometry must be non-empty, got {width}x{height}"
            )));
        }
        Ok(SensorGeometry { width, height })
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn contains(&self, x: u16, y: u16) -> bool {
        x < self.width && y < self.height
    }
}

impl std::fmt::Display for SensorGeometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// Checks geometry bounds and timestamp order for a sequence of events.
pub fn validate_events(events: &[Event], geometry: SensorGeometry) -> Result<()> {
    let mut last_t = 0u64;
    for (i, ev) in events.iter().enumerate() {
        if !geometry.contains(ev.x, ev.y) {
            return Err(Error::Validation(format!(
                "event {i} at ({}, {}) lies outside {geometry} sensor",
                ev.x, ev.y
            )));
        }
        if ev.t < last_t {
            return Err(Error::Ordering(format!(
                "event {i} has timestamp {} after {last_t}",
                ev.t
            )));
        }
        last_t = ev.t;
    }
    Ok(())
}
