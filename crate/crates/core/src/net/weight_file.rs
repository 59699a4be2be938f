//! Text weight files.
//!
//! ```text
//! snnw,1
//! # geometry=240x180
//! layer,<index>,<kind>,<out_maps>,<in_maps>,<k>,<stride>,<threshold>
//! <out_maps*in_maps*k*k weights, row-major, one per line>
//! ...
//! ```
//!
//! Pooling layers carry no weights and are written with `in_maps = 0`.
//! Lines starting with `#` are metadata; `geometry` is read back, any other
//! `key=value` pairs are preserved by the caller.

use super::{Layer, LayerConfig, LayerKind, Network, NetworkConfig, WeightTensor};
use crate::event::SensorGeometry;
use crate::{Error, Result};
use std::fmt::Write as _;

pub fn write_weight_file(network: &Network, metadata: &[(&str, String)]) -> String {
    let mut out = String::from("snnw,1\n");
    let _ = writeln!(out, "# geometry={}", network.config().geometry);
    for (k, v) in metadata {
        let _ = writeln!(out, "# {k}={v}");
    }
    for (i, layer) in network.layers().iter().enumerate() {
        let c = layer.config();
        let in_maps = match layer {
            Layer::Conv { weights, .. } => weights.in_maps,
            Layer::Pool { .. } => 0,
        };
        let _ = writeln!(
            out,
            "layer,{},{},{},{},{},{},{}",
            i + 1,
            c.kind.as_str(),
            c.num_maps,
            in_maps,
            c.filter_size,
            c.stride,
            c.threshold
        );
        if let Layer::Conv { weights, .. } = layer {
            for w in weights.values() {
                let _ = writeln!(out, "{w}");
            }
        }
    }
    out
}

/// Parsed weight file: the network (all layers marked trained) and its
/// metadata pairs.
pub fn parse_weight_file(text: &str, base: &NetworkConfig) -> Result<(Network, Vec<(String, String)>)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    match lines.next() {
        Some((_, "snnw,1")) => {}
        _ => return Err(Error::parse_at_line(1, "expected header 'snnw,1'")),
    }

    let mut metadata = Vec::new();
    let mut geometry = base.geometry;
    let mut configs = Vec::new();
    let mut layers = Vec::new();
    let mut pending: Option<(usize, LayerConfig, usize, Vec<f64>)> = None;

    let finish = |p: (usize, LayerConfig, usize, Vec<f64>), line: usize| -> Result<Layer> {
        let (_, cfg, in_maps, values) = p;
        match cfg.kind {
            LayerKind::Pool => Ok(Layer::Pool { config: cfg }),
            LayerKind::Conv => {
                let expected = cfg.num_maps * in_maps * cfg.filter_size * cfg.filter_size;
                if values.len() != expected {
                    return Err(Error::parse_at_line(
                        line,
                        format!("layer has {} weights, expected {expected}", values.len()),
                    ));
                }
                let weights = WeightTensor::from_values(cfg.num_maps, in_maps, cfg.filter_size, values)
                    .ok_or_else(|| Error::parse_at_line(line, "weight outside [0, 1]"))?;
                Ok(Layer::Conv {
                    config: cfg,
                    weights,
                    trained: true,
                })
            }
        }
    };

    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.trim().split_once('=') {
                if k == "geometry" {
                    geometry = parse_geometry(v).ok_or_else(|| Error::parse_at_line(lineno, format!("bad geometry '{v}'")))?;
                } else {
                    metadata.push((k.to_string(), v.to_string()));
                }
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("layer,") {
            if let Some(p) = pending.take() {
                layers.push(finish(p, lineno)?);
            }
            let (index, cfg, in_maps) = parse_layer_line(rest, lineno)?;
            if index != configs.len() + 1 {
                return Err(Error::parse_at_line(lineno, format!("layer index {index} out of sequence")));
            }
            configs.push(cfg);
            pending = Some((index, cfg, in_maps, Vec::new()));
            continue;
        }
        let Some(p) = pending.as_mut() else {
            return Err(Error::parse_at_line(lineno, "weight before any layer line"));
        };
        let w = line
            .parse::<f64>()
            .map_err(|_| Error::parse_at_line(lineno, format!("bad weight '{line}'")))?;
        p.3.push(w);
    }
    let last_line = text.lines().count();
    if let Some(p) = pending.take() {
        layers.push(finish(p, last_line)?);
    }

    let config = NetworkConfig {
        geometry,
        layers: configs,
        ..base.clone()
    };
    let network = Network::from_layers(config, layers)?;
    Ok((network, metadata))
}

fn parse_geometry(s: &str) -> Option<SensorGeometry> {
    let (w, h) = s.split_once('x')?;
    SensorGeometry::new(w.parse().ok()?, h.parse().ok()?).ok()
}

fn parse_layer_line(rest: &str, lineno: usize) -> Result<(usize, LayerConfig, usize)> {
    let f: Vec<&str> = rest.split(',').collect();
    if f.len() != 7 {
        return Err(Error::parse_at_line(lineno, "layer line needs 8 fields"));
    }
    let int = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::parse_at_line(lineno, format!("bad integer '{s}'")))
    };
    let kind = match f[1] {
        "conv" => LayerKind::Conv,
        "pool" => LayerKind::Pool,
        other => return Err(Error::parse_at_line(lineno, format!("unknown layer kind '{other}'"))),
    };
    let threshold = f[6]
        .parse::<f64>()
        .map_err(|_| Error::parse_at_line(lineno, format!("bad threshold '{}'", f[6])))?;
    let cfg = LayerConfig {
        kind,
        num_maps: int(f[2])?,
        filter_size: int(f[4])?,
        stride: int(f[5])?,
        threshold,
    };
    Ok((int(f[0])?, cfg, int(f[3])?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let net = Network::new(NetworkConfig::default(), 42).unwrap();
        let text = write_weight_file(&net, &[("config_hash", "abc".into())]);
        assert!(text.starts_with("snnw,1\n# geometry=240x180\n# config_hash=abc\nlayer,1,conv,4,1,5,1,1\n"));
        assert!(text.contains("\nlayer,2,pool,4,0,5,5,1\n"));
        assert!(text.contains("\nlayer,3,conv,20,4,10,1,45\n"));
        let (back, meta) = parse_weight_file(&text, &NetworkConfig::default()).unwrap();
        assert_eq!(meta, vec![("config_hash".to_string(), "abc".to_string())]);
        for l in [1, 3, 5] {
            assert_eq!(back.conv_weights(l).unwrap(), net.conv_weights(l).unwrap());
        }
        assert_eq!(write_weight_file(&back, &[("config_hash", "abc".into())]), text);
        assert!(back.is_trained(3));
    }

    #[test]
    fn malformed_files_rejected() {
        let base = NetworkConfig::default();
        assert!(parse_weight_file("snnw,2\n", &base).is_err());
        assert!(parse_weight_file("snnw,1\n0.5\n", &base).is_err());
        let net = Network::new(base.clone(), 1).unwrap();
        let text = write_weight_file(&net, &[]);
        let truncated: String = text.lines().take(50).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_weight_file(&truncated, &base), Err(Error::Parse { .. })));
        let bad = text.replacen("layer,3,conv,20,4,10", "layer,3,conv,20,3,10", 1);
        assert!(parse_weight_file(&bad, &base).is_err());
        let wrong_geom = text.replacen("geometry=240x180", "geometry=200x176", 1);
        let (n, _) = parse_weight_file(&wrong_geom, &base).unwrap();
        assert_eq!(n.config().geometry, SensorGeometry::new(200, 176).unwrap());
    }
}
