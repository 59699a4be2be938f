use super::IntensityFrame;
use crate::{Error, Result};
use std::path::{Path, PathBuf};

/// One `<filename> <t_us>` line of a `frames.txt` manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file: PathBuf,
    pub t: u64,
}

pub fn read_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(file), Some(t), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse_at_line(i + 1, format!("expected '<filename> <t_us>', got '{line}'")));
        };
        let t = t
            .parse::<u64>()
            .map_err(|_| Error::parse_at_line(i + 1, format!("bad timestamp '{t}'")))?;
        out.push(ManifestEntry {
            file: PathBuf::from(file),
            t,
        });
    }
    Ok(out)
}

/// Loads the frames listed in `<dir>/frames.txt`. Colour images are
/// converted with BT.601 luma weights.
pub fn load_frame_dir(dir: &Path) -> Result<Vec<IntensityFrame>> {
    let manifest_path = dir.join("frames.txt");
    let text = std::fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    read_manifest(&text)?
        .into_iter()
        .map(|entry| load_frame(&dir.join(&entry.file), entry.t))
        .collect()
}

fn load_frame(path: &Path, t: u64) -> Result<IntensityFrame> {
    let img = image::open(path).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::Validation(format!("{}: {other}", path.display())),
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let values = if img.color().has_color() {
        img.to_rgb8()
            .pixels()
            .map(|p| (0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64) / 255.0)
            .collect()
    } else {
        img.to_luma16().pixels().map(|p| p[0] as f64 / 65535.0).collect()
    };
    IntensityFrame::new(w, h, values, t)
}
