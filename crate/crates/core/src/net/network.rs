use super::conv::output_extent;
use super::{
    conv_forward, gabor_bank, init_weights, pent_threshold, pool_forward, GaborParams, Inhibition,
    PentConfig, PentState, SpikeMap, WeightTensor,
};
use crate::event::{SensorGeometry, TimestampFrame};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Conv,
    Pool,
}

impl LayerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::Conv => "conv",
            LayerKind::Pool => "pool",
        }
    }
}

/// One layer of the architecture. For convolution layers `threshold` is
/// the membrane threshold; for pooling layers it is the minimum number of
/// input spikes a window needs before it emits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerConfig {
    pub kind: LayerKind,
    pub filter_size: usize,
    pub num_maps: usize,
    pub stride: usize,
    pub threshold: f64,
}

impl LayerConfig {
    pub const fn conv(filter_size: usize, num_maps: usize, threshold: f64) -> Self {
        LayerConfig {
            kind: LayerKind::Conv,
            filter_size,
            num_maps,
            stride: 1,
            threshold,
        }
    }

    pub const fn pool(filter_size: usize, num_maps: usize, threshold: f64) -> Self {
        LayerConfig {
            kind: LayerKind::Pool,
            filter_size,
            num_maps,
            stride: filter_size,
            threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkConfig {
    pub geometry: SensorGeometry,
    pub layers: Vec<LayerConfig>,
    pub gabor: GaborParams,
    /// Initialise the first layer randomly and train it with STDP instead
    /// of using the fixed Gabor bank.
    pub learn_first_layer: bool,
    /// Chebyshev radius of inter-map inhibition while training; `None`
    /// uses the trained layer's filter size.
    pub inhibition_radius: Option<usize>,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            geometry: SensorGeometry::default(),
            layers: vec![
                LayerConfig::conv(5, 4, 1.0),
                LayerConfig::pool(5, 4, 1.0),
                LayerConfig::conv(10, 20, 45.0),
                LayerConfig::pool(5, 20, 1.0),
                LayerConfig::conv(5, 10, 3.0),
            ],
            gabor: GaborParams::default(),
            learn_first_layer: false,
            inhibition_radius: None,
        }
    }
}

impl NetworkConfig {
    /// `(maps, height, width)` of the input and of every layer's output.
    pub fn shapes(&self) -> Result<Vec<(usize, usize, usize)>> {
        if self.layers.is_empty() {
            return Err(Error::Config("network needs at least one layer".into()));
        }
        if self.layers[0].kind != LayerKind::Conv {
            return Err(Error::Config("first layer must be a convolution".into()));
        }
        let mut shape = (1, self.geometry.height as usize, self.geometry.width as usize);
        let mut out = vec![shape];
        for (i, l) in self.layers.iter().enumerate() {
            let n = i + 1;
            if l.filter_size == 0 || l.stride == 0 || l.num_maps == 0 {
                return Err(Error::Config(format!("layer {n}: zero filter size, stride or map count")));
            }
            if !(l.threshold >= 0.0) {
                return Err(Error::Config(format!("layer {n}: negative threshold {}", l.threshold)));
            }
            if l.kind == LayerKind::Pool && l.num_maps != shape.0 {
                return Err(Error::Config(format!(
                    "layer {n}: pooling over {} maps but input has {}",
                    l.num_maps, shape.0
                )));
            }
            shape = (
                l.num_maps,
                output_extent(shape.1, l.filter_size, l.stride),
                output_extent(shape.2, l.filter_size, l.stride),
            );
            if shape.1 == 0 || shape.2 == 0 {
                return Err(Error::Config(format!("layer {n}: input too small for its filter")));
            }
            out.push(shape);
        }
        if !self.learn_first_layer && (self.layers[0].num_maps != 4 || self.layers[0].filter_size != self.gabor.size) {
            return Err(Error::Config(format!(
                "fixed Gabor first layer needs 4 maps of size {}",
                self.gabor.size
            )));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Conv {
        config: LayerConfig,
        weights: WeightTensor,
        trained: bool,
    },
    Pool {
        config: LayerConfig,
    },
}

impl Layer {
    pub fn config(&self) -> &LayerConfig {
        match self {
            Layer::Conv { config, .. } | Layer::Pool { config } => config,
        }
    }
}

/// Spike output of a forward pass, one [`SpikeMap`] per layer run.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub input: SpikeMap,
    pub layers: Vec<SpikeMap>,
    /// Threshold the first layer ran with (after PENT, if enabled).
    pub first_layer_threshold: f64,
}

impl ForwardTrace {
    /// Output of layer `layer` (1-based).
    pub fn layer(&self, layer: usize) -> &SpikeMap {
        &self.layers[layer - 1]
    }

    /// Input into layer `layer` (1-based).
    pub fn input_of(&self, layer: usize) -> &SpikeMap {
        if layer == 1 {
            &self.input
        } else {
            &self.layers[layer - 2]
        }
    }

    pub fn last(&self) -> &SpikeMap {
        self.layers.last().unwrap_or(&self.input)
    }

    pub fn spike_counts(&self) -> Vec<usize> {
        self.layers.iter().map(SpikeMap::len).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    config: NetworkConfig,
    layers: Vec<Layer>,
}

/// Per-layer weight seed derived from the network seed.
fn layer_seed(seed: u64, layer: usize) -> u64 {
    seed ^ (layer as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

impl Network {
    /// Builds a network with a fixed Gabor first layer (unless
    /// `learn_first_layer`) and seeded random weights elsewhere.
    pub fn new(config: NetworkConfig, seed: u64) -> Result<Self> {
        let shapes = config.shapes()?;
        let mut layers = Vec::with_capacity(config.layers.len());
        for (i, &lc) in config.layers.iter().enumerate() {
            let n = i + 1;
            layers.push(match lc.kind {
                LayerKind::Pool => Layer::Pool { config: lc },
                LayerKind::Conv if n == 1 && !config.learn_first_layer => {
                    let bank = gabor_bank(&config.gabor)?;
                    let weights = WeightTensor::from_values(4, 1, bank.size, bank.flattened())
                        .expect("Gabor bank is normalized to [0, 1]");
                    Layer::Conv {
                        config: lc,
                        weights,
                        trained: true,
                    }
                }
                LayerKind::Conv => Layer::Conv {
                    config: lc,
                    weights: init_weights(lc.num_maps, shapes[i].0, lc.filter_size, layer_seed(seed, n)),
                    trained: false,
                },
            });
        }
        Ok(Network { config, layers })
    }

    /// Assembles a network from explicit layers, checking shapes.
    pub fn from_layers(config: NetworkConfig, layers: Vec<Layer>) -> Result<Self> {
        let shapes = config.shapes()?;
        if layers.len() != config.layers.len() {
            return Err(Error::Validation(format!(
                "{} layers given for a {}-layer configuration",
                layers.len(),
                config.layers.len()
            )));
        }
        for (i, layer) in layers.iter().enumerate() {
            if layer.config() != &config.layers[i] {
                return Err(Error::Validation(format!("layer {} does not match configuration", i + 1)));
            }
            if let Layer::Conv { weights, config: lc, .. } = layer {
                if weights.out_maps != lc.num_maps || weights.in_maps != shapes[i].0 || weights.k != lc.filter_size {
                    return Err(Error::Validation(format!(
                        "layer {}: weights are {}x{}x{k}x{k}, expected {}x{}x{f}x{f}",
                        i + 1,
                        weights.out_maps,
                        weights.in_maps,
                        lc.num_maps,
                        shapes[i].0,
                        k = weights.k,
                        f = lc.filter_size
                    )));
                }
            }
        }
        Ok(Network { config, layers })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    fn layer_at(&self, layer: usize) -> Result<&Layer> {
        layer
            .checked_sub(1)
            .and_then(|i| self.layers.get(i))
            .ok_or_else(|| Error::Validation(format!("no layer {layer} in a {}-layer network", self.depth())))
    }

    pub fn conv_weights(&self, layer: usize) -> Result<&WeightTensor> {
        match self.layer_at(layer)? {
            Layer::Conv { weights, .. } => Ok(weights),
            Layer::Pool { .. } => Err(Error::Validation(format!("layer {layer} is a pooling layer"))),
        }
    }

    pub fn conv_weights_mut(&mut self, layer: usize) -> Result<&mut WeightTensor> {
        self.layer_at(layer)?;
        match &mut self.layers[layer - 1] {
            Layer::Conv { weights, .. } => Ok(weights),
            Layer::Pool { .. } => Err(Error::Validation(format!("layer {layer} is a pooling layer"))),
        }
    }

    pub fn is_trained(&self, layer: usize) -> bool {
        matches!(self.layer_at(layer), Ok(Layer::Conv { trained: true, .. }) | Ok(Layer::Pool { .. }))
    }

    pub fn set_trained(&mut self, layer: usize, value: bool) -> Result<()> {
        self.layer_at(layer)?;
        if let Layer::Conv { trained, .. } = &mut self.layers[layer - 1] {
            *trained = value;
        }
        Ok(())
    }

    /// Inhibition radius used when training `layer`.
    pub fn inhibition_radius(&self, layer: usize) -> Result<usize> {
        Ok(self
            .config
            .inhibition_radius
            .unwrap_or(self.layer_at(layer)?.config().filter_size))
    }

    /// Threshold the first layer uses for a frame with `input_count` events.
    pub fn first_layer_threshold(&self, input_count: usize, pent: Option<&PentConfig>) -> Result<f64> {
        let base = self.config.layers[0].threshold;
        match pent {
            None => Ok(base),
            Some(cfg) => {
                let state = PentState::from_fraction(base, self.config.geometry.pixel_count(), cfg)?;
                pent_threshold(input_count, &state)
            }
        }
    }

    /// Inference pass through every layer. Fails if any convolution layer
    /// has not been trained.
    pub fn forward(&self, frame: &TimestampFrame, pent: Option<&PentConfig>) -> Result<ForwardTrace> {
        for (i, layer) in self.layers.iter().enumerate() {
            if let Layer::Conv { trained: false, .. } = layer {
                return Err(Error::State(format!("layer {} has not been trained", i + 1)));
            }
        }
        self.forward_to(frame, self.depth(), pent)
    }

    /// Runs layers `1..=last` regardless of training state, without
    /// lateral inhibition.
    pub fn forward_to(&self, frame: &TimestampFrame, last: usize, pent: Option<&PentConfig>) -> Result<ForwardTrace> {
        if frame.geometry != self.config.geometry {
            return Err(Error::Validation(format!(
                "frame geometry {} does not match network geometry {}",
                frame.geometry, self.config.geometry
            )));
        }
        self.layer_at(last)?;
        let input = SpikeMap::from_frame(frame);
        let first_threshold = self.first_layer_threshold(frame.populated_count(), pent)?;
        let mut layers: Vec<SpikeMap> = Vec::with_capacity(last);
        for (i, layer) in self.layers[..last].iter().enumerate() {
            let n = i + 1;
            let prev = layers.last().unwrap_or(&input);
            let out = match layer {
                Layer::Conv { config, weights, .. } => {
                    let threshold = if n == 1 { first_threshold } else { config.threshold };
                    conv_forward(prev, weights, config.stride, threshold, Inhibition::Off, n)?.spikes
                }
                Layer::Pool { config } => {
                    pool_forward(prev, config.filter_size, config.stride, config.threshold, n)
                }
            };
            layers.push(out);
        }
        Ok(ForwardTrace {
            input,
            layers,
            first_layer_threshold: first_threshold,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_shapes() {
        let shapes = NetworkConfig::default().shapes().unwrap();
        assert_eq!(
            shapes,
            vec![(1, 180, 240), (4, 176, 236), (4, 35, 47), (20, 26, 38), (20, 5, 7), (10, 1, 3)]
        );
    }

    #[test]
    fn untrained_inference_is_state_error() {
        let net = Network::new(NetworkConfig::default(), 1).unwrap();
        let frame = TimestampFrame::empty(SensorGeometry::default(), 0, 1000);
        assert!(matches!(net.forward(&frame, None), Err(Error::State(_))));
        assert!(net.forward_to(&frame, 5, None).is_ok());
    }

    #[test]
    fn empty_frame_is_silent() {
        let mut net = Network::new(NetworkConfig::default(), 1).unwrap();
        for l in [3, 5] {
            net.set_trained(l, true).unwrap();
        }
        let frame = TimestampFrame::empty(SensorGeometry::default(), 0, 1000);
        let trace = net.forward(&frame, Some(&PentConfig::default())).unwrap();
        assert_eq!(trace.spike_counts(), vec![0; 5]);
    }

    #[test]
    fn geometry_mismatch_rejected() {
        let net = Network::new(NetworkConfig::default(), 1).unwrap();
        let frame = TimestampFrame::empty(SensorGeometry::new(100, 100).unwrap(), 0, 1000);
        assert!(matches!(net.forward_to(&frame, 1, None), Err(Error::Validation(_))));
    }

    #[test]
    fn bad_configs_rejected() {
        let mut cfg = NetworkConfig::default();
        cfg.layers[1].num_maps = 5;
        assert!(Network::new(cfg, 0).is_err());
        let mut cfg = NetworkConfig::default();
        cfg.layers.insert(0, LayerConfig::pool(2, 1, 1.0));
        assert!(Network::new(cfg, 0).is_err());
        let cfg = NetworkConfig {
            geometry: SensorGeometry::new(20, 20).unwrap(),
            ..NetworkConfig::default()
        };
        assert!(Network::new(cfg, 0).is_err());
    }

    #[test]
    fn seeded_weights_differ_per_layer() {
        let net = Network::new(NetworkConfig::default(), 3).unwrap();
        assert_eq!(net, Network::new(NetworkConfig::default(), 3).unwrap());
        assert!(net.is_trained(1) && !net.is_trained(3));
        assert_eq!(net.conv_weights(3).unwrap().len(), 20 * 4 * 10 * 10);
        assert!(net.conv_weights(2).is_err());
    }
}
