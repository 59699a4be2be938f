use crate::eval::SyntheticConfig;
use crate::event::{SensorGeometry, WindowSchedule};
use crate::net::{NetworkConfig, PentConfig};
use crate::sim::SimConfig;
use crate::train::{FrameOrder, StdpParams, TrainSchedule};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Sweep grid used when `noise-sweep` gets no `--fractions`.
pub const DEFAULT_NOISE_FRACTIONS: [f64; 6] = [0.005, 0.01, 0.02, 0.03, 0.04, 0.05];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathConfig {
    /// Training log; defaults to the weight path with a `.log` extension.
    pub train_log: Option<PathBuf>,
    /// Where checkpoints go; defaults to `<weights>.ckpt/`.
    pub checkpoint_dir: Option<PathBuf>,
}

/// Everything a pipeline run depends on, loadable from TOML.
///
/// The top-level `geometry` is authoritative and is copied into the
/// simulator, network and generator sections by [`RunConfig::resolved`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub geometry: SensorGeometry,
    pub windows: WindowSchedule,
    pub sim: SimConfig,
    pub network: NetworkConfig,
    pub stdp: StdpParams,
    pub schedule: TrainSchedule,
    pub frame_order: FrameOrder,
    /// Write a weight checkpoint every this many training frames; 0 disables.
    pub checkpoint_every: usize,
    pub pent: PentConfig,
    pub synthetic: SyntheticConfig,
    pub noise_fractions: Vec<f64>,
    pub paths: PathConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 7,
            geometry: SensorGeometry::default(),
            windows: WindowSchedule::default(),
            sim: SimConfig::default(),
            network: NetworkConfig::default(),
            stdp: StdpParams::default(),
            schedule: TrainSchedule::default(),
            frame_order: FrameOrder::Corpus,
            checkpoint_every: 0,
            pent: PentConfig::default(),
            synthetic: SyntheticConfig::default(),
            noise_fractions: DEFAULT_NOISE_FRACTIONS.to_vec(),
            paths: PathConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.resolved()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Propagates the top-level geometry and validates every section.
    pub fn resolved(mut self) -> Result<Self> {
        self.sim.target_geometry = self.geometry;
        self.network.geometry = self.geometry;
        self.synthetic.geometry = self.geometry;
        self.windows.validate()?;
        self.sim.validate()?;
        self.network.shapes()?;
        self.stdp.validate()?;
        self.synthetic.validate()?;
        if self.pent.cap_fraction <= 0.0 || self.pent.exponent < 0.0 {
            return Err(Error::Config("pent needs cap_fraction > 0 and exponent >= 0".into()));
        }
        Ok(self)
    }

    /// Short SHA-256 digest of the canonical TOML form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        hex::encode(&digest[..8])
    }
}
