mod common;

use dvs_snn::event::SensorGeometry;
use dvs_snn::net::{conv_forward, Inhibition, LayerConfig, Network, NetworkConfig};
use dvs_snn::train::{afferent_mask, train_layer, wta_select, StdpParams};

fn tiny(threshold: f64) -> NetworkConfig {
    NetworkConfig {
        geometry: SensorGeometry::new(29, 29).unwrap(),
        layers: vec![
            LayerConfig::conv(5, 4, 1.0),
            LayerConfig::pool(5, 4, 1.0),
            LayerConfig::conv(5, 1, threshold),
        ],
        ..NetworkConfig::default()
    }
}

#[test]
fn repeated_pattern_is_learned_as_its_mask() {
    let geometry = SensorGeometry::new(29, 29).unwrap();
    let frame = common::cross_blob(geometry, 14, 14, 20);
    let probe = Network::new(tiny(1.0), 1).unwrap();
    let pooled = probe.forward_to(&frame, 2, None).unwrap().layer(2).len();
    assert!(pooled >= 8, "pattern too sparse: {pooled}");

    let mut net = Network::new(tiny(0.4 * pooled as f64), 1).unwrap();
    let frames = vec![frame.clone(); 20_000];
    let report = train_layer(&mut net, 3, &frames, frames.len(), &StdpParams::default(), None).unwrap();
    assert!(report.converged, "C = {}", report.final_convergence);
    assert!(report.final_convergence < 0.01);
    assert!(report.presentations < frames.len());

    let input = net.forward_to(&frame, 2, None).unwrap().layers.pop().unwrap();
    let weights = net.conv_weights(3).unwrap();
    let out = conv_forward(&input, weights, 1, 0.4 * pooled as f64, Inhibition::Off, 3).unwrap();
    let winners = wta_select(&out.spikes.spikes, 5, 1).winners;
    assert_eq!(winners.len(), 1);
    let mask = afferent_mask(&input, &winners[0], 5, 1);
    let learned: Vec<bool> = weights.values().iter().map(|w| *w > 0.5).collect();
    assert_eq!(learned, mask);
    for (w, m) in weights.values().iter().zip(&mask) {
        if *m {
            assert!(*w > 0.9);
        } else {
            assert!(*w < 0.1);
        }
    }
}
