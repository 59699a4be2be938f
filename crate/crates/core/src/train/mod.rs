//! Layer-wise unsupervised training: winner-takes-all selection with
//! intra- and inter-map lateral inhibition, multiplicative STDP and the
//! convergence monitor.

mod stdp;
mod trainer;
mod wta;

pub use stdp::{afferent_mask, convergence_metric, stdp_update, StdpParams};
pub use trainer::{train_layer, train_network, Checkpoint, FrameOrder, TrainLogEntry, TrainReport, TrainSchedule};
pub use wta::{wta_select, WtaOutcome};
