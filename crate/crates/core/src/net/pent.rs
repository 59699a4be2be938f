use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Pre-emptive neuron thresholding for the first convolution layer.
///
/// Before a frame is propagated, its input event count is compared with
/// the saturation cap `S`; above it the layer threshold is raised to
/// `base * (count / S)^exponent` for that frame, so a burst of noise cannot
/// saturate the first layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PentState {
    pub base_threshold: f64,
    pub saturation_cap: usize,
    pub scale_exponent: f64,
}

impl PentState {
    /// Cap set to `round(cap_fraction * frame_pixels)`.
    pub fn from_fraction(base_threshold: f64, frame_pixels: usize, cfg: &PentConfig) -> Result<Self> {
        let state = PentState {
            base_threshold,
            saturation_cap: (cfg.cap_fraction * frame_pixels as f64).round() as usize,
            scale_exponent: cfg.exponent,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        if self.saturation_cap == 0 {
            return Err(Error::Config("PENT saturation cap must be positive".into()));
        }
        if !(self.scale_exponent >= 0.0) {
            return Err(Error::Config(format!(
                "PENT exponent must be non-negative, got {}",
                self.scale_exponent
            )));
        }
        Ok(())
    }
}

/// PENT settings in run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PentConfig {
    /// Saturation cap as a fraction of sensor pixels.
    pub cap_fraction: f64,
    pub exponent: f64,
}

impl Default for PentConfig {
    fn default() -> Self {
        PentConfig {
            cap_fraction: 0.01,
            exponent: 1.0,
        }
    }
}

/// Effective first-layer threshold for a frame with `input_event_count`
/// populated cells.
pub fn pent_threshold(input_event_count: usize, state: &PentState) -> Result<f64> {
    state.validate()?;
    let cap = state.saturation_cap;
    if input_event_count <= cap {
        return Ok(state.base_threshold);
    }
    let ratio = input_event_count as f64 / cap as f64;
    Ok(state.base_threshold * ratio.powf(state.scale_exponent))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(gamma: f64) -> PentState {
        PentState {
            base_threshold: 1.5,
            saturation_cap: 432,
            scale_exponent: gamma,
        }
    }

    #[test]
    fn below_and_at_cap_unchanged() {
        assert_eq!(pent_threshold(0, &state(1.0)).unwrap(), 1.5);
        assert_eq!(pent_threshold(432, &state(1.0)).unwrap(), 1.5);
    }

    #[test]
    fn linear_scaling_above_cap() {
        assert_eq!(pent_threshold(4 * 432, &state(1.0)).unwrap(), 6.0);
        assert_eq!(pent_threshold(4 * 432, &state(0.0)).unwrap(), 1.5);
        assert_eq!(pent_threshold(4 * 432, &state(2.0)).unwrap(), 24.0);
    }

    #[test]
    fn zero_cap_is_config_error() {
        let s = PentState {
            saturation_cap: 0,
            ..state(1.0)
        };
        assert!(matches!(pent_threshold(1, &s), Err(Error::Config(_))));
        assert!(PentState::from_fraction(1.0, 20, &PentConfig::default()).is_err());
    }

    #[test]
    fn default_cap_is_one_percent_of_sensor() {
        let s = PentState::from_fraction(1.0, 240 * 180, &PentConfig::default()).unwrap();
        assert_eq!(s.saturation_cap, 432);
    }

    #[test]
    fn never_below_base() {
        for count in (0..10_000).step_by(37) {
            assert!(pent_threshold(count, &state(0.7)).unwrap() >= 1.5);
        }
    }
}
