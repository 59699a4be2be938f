use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const INIT_MEAN: f64 = 0.8;
pub const INIT_STD: f64 = 0.08;

/// Synaptic weights of one convolution layer, shape
/// `(out_maps, in_maps, k, k)` row-major. Values stay in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTensor {
    pub out_maps: usize,
    pub in_maps: usize,
    pub k: usize,
    values: Vec<f64>,
}

impl WeightTensor {
    pub fn from_values(out_maps: usize, in_maps: usize, k: usize, values: Vec<f64>) -> Option<Self> {
        let ok = values.len() == out_maps * in_maps * k * k
            && values.iter().all(|v| (0.0..=1.0).contains(v));
        ok.then_some(WeightTensor {
            out_maps,
            in_maps,
            k,
            values,
        })
    }

    pub fn filled(out_maps: usize, in_maps: usize, k: usize, value: f64) -> Self {
        WeightTensor {
            out_maps,
            in_maps,
            k,
            values: vec![value.clamp(0.0, 1.0); out_maps * in_maps * k * k],
        }
    }

    /// Weights feeding one output map, laid out `(in_map, dy, dx)`.
    pub fn map_slice(&self, out_map: usize) -> &[f64] {
        let n = self.in_maps * self.k * self.k;
        &self.values[out_map * n..(out_map + 1) * n]
    }

    pub fn map_slice_mut(&mut self, out_map: usize) -> &mut [f64] {
        let n = self.in_maps * self.k * self.k;
        &mut self.values[out_map * n..(out_map + 1) * n]
    }

    pub fn get(&self, out_map: usize, in_map: usize, dy: usize, dx: usize) -> f64 {
        self.values[((out_map * self.in_maps + in_map) * self.k + dy) * self.k + dx]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Draws `Normal(0.8, 0.08)` weights clamped to `[0, 1]`.
pub fn init_weights(out_maps: usize, in_maps: usize, k: usize, seed: u64) -> WeightTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(INIT_MEAN, INIT_STD).expect("valid normal parameters");
    let values = (0..out_maps * in_maps * k * k)
        .map(|_| normal.sample(&mut rng).clamp(0.0, 1.0))
        .collect();
    WeightTensor {
        out_maps,
        in_maps,
        k,
        values,
    }
}
