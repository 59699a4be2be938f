use super::stdp::afferent_mask_from_grid;
use super::{convergence_metric, stdp_update, wta_select, StdpParams};
use crate::event::TimestampFrame;
use crate::net::{conv_forward, Inhibition, Layer, Network, PentConfig, SpikeMap};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Presentation budgets per convolution layer, in network order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainSchedule {
    /// Used only when the first layer is learned.
    pub frames_layer1: usize,
    pub frames_layer2: usize,
    pub frames_layer3: usize,
}

impl Default for TrainSchedule {
    fn default() -> Self {
        TrainSchedule {
            frames_layer1: 3000,
            frames_layer2: 20_000,
            frames_layer3: 20_000,
        }
    }
}

impl TrainSchedule {
    pub fn zero() -> Self {
        TrainSchedule {
            frames_layer1: 0,
            frames_layer2: 0,
            frames_layer3: 0,
        }
    }

    /// Budget of the `ordinal`-th convolution layer (1-based); deeper layers
    /// reuse the third budget.
    pub fn budget(&self, ordinal: usize) -> usize {
        match ordinal {
            1 => self.frames_layer1,
            2 => self.frames_layer2,
            _ => self.frames_layer3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum FrameOrder {
    /// Cycle through the corpus in order.
    #[default]
    Corpus,
    /// Reshuffle the corpus with a seeded RNG at the start of each pass.
    Shuffled { seed: u64 },
}

/// One `frame_idx,layer,winners,convergence_C` log line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainLogEntry {
    pub frame_idx: usize,
    pub layer: usize,
    pub winners: usize,
    pub convergence: f64,
}

impl std::fmt::Display for TrainLogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{},{}", self.frame_idx, self.layer, self.winners, self.convergence)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub layer: usize,
    pub log: Vec<TrainLogEntry>,
    pub presentations: usize,
    pub updates: usize,
    pub final_convergence: f64,
    pub converged: bool,
}

fn check_trainable(network: &Network, layer: usize) -> Result<()> {
    network.conv_weights(layer)?;
    for below in 1..layer {
        if !network.is_trained(below) {
            return Err(Error::State(format!(
                "cannot train layer {layer}: layer {below} is untrained"
            )));
        }
    }
    Ok(())
}

/// Trains one convolution layer with STDP.
///
/// For every presented frame the network runs up to `layer`; the layer's
/// threshold crossings go through [`wta_select`] and every winner's weights
/// are updated from the afferents that fired at or before it. Training
/// stops after `budget` frames or once the convergence metric drops below
/// `params.convergence_eps`. The layer is marked trained afterwards.
///
/// A frame source that yields no updates is not an error; callers can
/// inspect [`TrainReport::updates`].
pub fn train_layer<'a>(
    network: &mut Network,
    layer: usize,
    frames: impl IntoIterator<Item = &'a TimestampFrame>,
    budget: usize,
    params: &StdpParams,
    pent: Option<&PentConfig>,
) -> Result<TrainReport> {
    check_trainable(network, layer)?;
    let mut inputs = Vec::new();
    for frame in frames.into_iter().take(budget) {
        inputs.push(lower_output(network, frame, layer, pent)?);
    }
    train_on_inputs(network, layer, inputs.iter(), params, pent, &mut |_, _| Ok(()))
}

/// Output of the layers below `layer` for this frame.
fn lower_output(network: &Network, frame: &TimestampFrame, layer: usize, pent: Option<&PentConfig>) -> Result<SpikeMap> {
    if layer == 1 {
        if frame.geometry != network.config().geometry {
            return Err(Error::Validation(format!(
                "frame geometry {} does not match network geometry {}",
                frame.geometry,
                network.config().geometry
            )));
        }
        return Ok(SpikeMap::from_frame(frame));
    }
    let trace = network.forward_to(frame, layer - 1, pent)?;
    Ok(trace.layers.into_iter().last().expect("at least one layer ran"))
}

fn train_on_inputs<'a>(
    network: &mut Network,
    layer: usize,
    inputs: impl Iterator<Item = &'a SpikeMap>,
    params: &StdpParams,
    pent: Option<&PentConfig>,
    checkpoint: &mut dyn FnMut(&Network, usize) -> Result<()>,
) -> Result<TrainReport> {
    params.validate()?;
    let radius = network.inhibition_radius(layer)?;
    let config = *network.layers()[layer - 1].config();
    let mut log = Vec::new();
    let mut updates = 0;
    let mut convergence = convergence_metric(network.conv_weights(layer)?);
    let mut converged = convergence < params.convergence_eps;
    let mut presentations = 0;

    for (frame_idx, input) in inputs.enumerate() {
        if converged {
            break;
        }
        presentations += 1;
        let threshold = if layer == 1 {
            network.first_layer_threshold(input.len(), pent)?
        } else {
            config.threshold
        };
        let weights = network.conv_weights(layer)?;
        let candidates = conv_forward(input, weights, config.stride, threshold, Inhibition::Off, layer)?;
        let outcome = wta_select(&candidates.spikes.spikes, radius, config.num_maps);
        if !outcome.winners.is_empty() {
            let grid = input.rank_grid();
            let weights = network.conv_weights_mut(layer)?;
            for winner in &outcome.winners {
                let mask = afferent_mask_from_grid(&grid, input, winner, config.filter_size, config.stride);
                stdp_update(weights, winner.map, &mask, params);
            }
            updates += outcome.winners.len();
            convergence = convergence_metric(weights);
        }
        converged = convergence < params.convergence_eps;
        log.push(TrainLogEntry {
            frame_idx,
            layer,
            winners: outcome.winners.len(),
            convergence,
        });
        checkpoint(network, frame_idx)?;
    }
    network.set_trained(layer, true)?;
    Ok(TrainReport {
        layer,
        log,
        presentations,
        updates,
        final_convergence: convergence,
        converged,
    })
}

/// Periodic weight snapshots during [`train_network`].
pub struct Checkpoint<'a> {
    pub every: usize,
    pub sink: &'a mut dyn FnMut(&Network, usize, usize) -> Result<()>,
}

/// Layer-wise training of every learnable convolution layer, bottom-up.
///
/// Each layer gets its budget of presentations drawn by cycling through
/// `corpus` in the requested order. Lower layers are frozen, so their
/// outputs are computed once per corpus frame.
pub fn train_network(
    network: &mut Network,
    corpus: &[TimestampFrame],
    params: &StdpParams,
    schedule: &TrainSchedule,
    order: FrameOrder,
    pent: Option<&PentConfig>,
    mut checkpoint: Option<Checkpoint<'_>>,
) -> Result<Vec<TrainReport>> {
    params.validate()?;
    let conv_layers: Vec<usize> = network
        .layers()
        .iter()
        .enumerate()
        .filter(|(_, l)| matches!(l, Layer::Conv { .. }))
        .map(|(i, _)| i + 1)
        .collect();
    let mut reports = Vec::new();
    for (ordinal, &layer) in conv_layers.iter().enumerate() {
        if layer == 1 && !network.config().learn_first_layer {
            continue;
        }
        let budget = schedule.budget(ordinal + 1);
        let cached: Vec<SpikeMap> = corpus
            .iter()
            .map(|f| lower_output(network, f, layer, pent))
            .collect::<Result<_>>()?;
        let sequence = presentation_order(cached.len(), budget, order, layer);
        let mut sink = |net: &Network, frame_idx: usize| -> Result<()> {
            match checkpoint.as_mut() {
                Some(c) if c.every > 0 && (frame_idx + 1) % c.every == 0 => (c.sink)(net, layer, frame_idx),
                _ => Ok(()),
            }
        };
        let report = train_on_inputs(network, layer, sequence.iter().map(|&i| &cached[i]), params, pent, &mut sink)?;
        reports.push(report);
    }
    Ok(reports)
}

/// Corpus indices for `budget` presentations.
fn presentation_order(len: usize, budget: usize, order: FrameOrder, layer: usize) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(budget);
    let mut pass: Vec<usize> = (0..len).collect();
    let mut rng = match order {
        FrameOrder::Shuffled { seed } => Some(ChaCha8Rng::seed_from_u64(seed ^ layer as u64)),
        FrameOrder::Corpus => None,
    };
    while out.len() < budget {
        if let Some(rng) = rng.as_mut() {
            pass.shuffle(rng);
        }
        let take = (budget - out.len()).min(len);
        out.extend_from_slice(&pass[..take]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::SensorGeometry;
    use crate::net::NetworkConfig;

    #[test]
    fn presentation_cycles_corpus() {
        assert_eq!(presentation_order(3, 7, FrameOrder::Corpus, 3), vec![0, 1, 2, 0, 1, 2, 0]);
        assert!(presentation_order(0, 7, FrameOrder::Corpus, 3).is_empty());
        let a = presentation_order(5, 12, FrameOrder::Shuffled { seed: 9 }, 3);
        assert_eq!(a, presentation_order(5, 12, FrameOrder::Shuffled { seed: 9 }, 3));
        let mut first: Vec<usize> = a[..5].to_vec();
        first.sort();
        assert_eq!(first, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn zero_budget_leaves_weights() {
        let mut net = Network::new(NetworkConfig::default(), 5).unwrap();
        let before = net.clone();
        let frames = vec![TimestampFrame::empty(SensorGeometry::default(), 0, 100)];
        let reports = train_network(
            &mut net,
            &frames,
            &StdpParams::default(),
            &TrainSchedule::zero(),
            FrameOrder::Corpus,
            None,
            None,
        )
        .unwrap();
        assert_eq!(reports.len(), 2);
        assert!(reports.iter().all(|r| r.updates == 0 && r.log.is_empty()));
        for l in [1, 3, 5] {
            assert_eq!(net.conv_weights(l).unwrap(), before.conv_weights(l).unwrap());
        }
        assert!(net.is_trained(5));
    }

    #[test]
    fn training_order_enforced() {
        let mut net = Network::new(NetworkConfig::default(), 5).unwrap();
        let frames = vec![TimestampFrame::empty(SensorGeometry::default(), 0, 100)];
        let err = train_layer(&mut net, 5, &frames, 1, &StdpParams::default(), None).unwrap_err();
        assert!(matches!(err, Error::State(_)));
        assert!(train_layer(&mut net, 2, &frames, 1, &StdpParams::default(), None).is_err());
        let r = train_layer(&mut net, 3, &frames, 1, &StdpParams::default(), None).unwrap();
        assert_eq!((r.presentations, r.updates), (1, 0));
    }
}
