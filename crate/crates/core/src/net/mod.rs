//! The spiking convolutional network.
//!
//! Layers are numbered from 1 in network order (layer 0 is the input
//! frame): with the default architecture Conv1 = 1, Pool1 = 2, Conv2 = 3,
//! Pool2 = 4 and Conv3 = 5. Every neuron fires at most once per frame and
//! spikes propagate in rank order, where rank is the normalized input time
//! at which the spike was caused.

mod conv;
mod gabor;
mod network;
mod pent;
mod pool;
mod spike;
mod weight_file;
mod weights;

pub use conv::{conv_forward, ConvOutput, Inhibition};
pub use gabor::{gabor_bank, GaborBank, GaborParams, ORIENTATIONS_DEG};
pub use network::{ForwardTrace, Layer, LayerConfig, LayerKind, Network, NetworkConfig};
pub use pent::{pent_threshold, PentConfig, PentState};
pub use pool::pool_forward;
pub use spike::{SpikeMap, SpikeRecord};
pub use weight_file::{parse_weight_file, write_weight_file};
pub use weights::{init_weights, WeightTensor, INIT_MEAN, INIT_STD};
