//! On-disk frame corpus.
//!
//! A corpus directory holds `index.csv` (metadata comments, then one
//! `frame_id,window_start,window_len,cells` row per frame), `frames.bin`
//! with the sparse cells, and optionally `labels.txt` and `config.toml`.
//!
//! `frames.bin` layout, little-endian: `SNNF`, u8 version 1, u16 width,
//! u16 height, u32 frame count, then per frame a u32 cell count followed by
//! `(u32 cell_index, f64 value)` pairs.

use crate::eval::Label;
use crate::event::{SensorGeometry, TimestampFrame};
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

pub const INDEX_FILE: &str = "index.csv";
pub const FRAMES_FILE: &str = "frames.bin";
pub const LABELS_FILE: &str = "labels.txt";
pub const CONFIG_FILE: &str = "config.toml";

const MAGIC: &[u8; 4] = b"SNNF";
const INDEX_HEADER: &str = "frame_id,window_start,window_len,cells";

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub geometry: SensorGeometry,
    pub frames: Vec<TimestampFrame>,
    pub labels: Option<Vec<Label>>,
    pub metadata: Vec<(String, String)>,
}

impl Corpus {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn encode_frames(geometry: SensorGeometry, frames: &[TimestampFrame]) -> Vec<u8> {
    let cells: usize = frames.iter().map(|f| f.populated_count()).sum();
    let mut out = Vec::with_capacity(13 + 4 * frames.len() + 12 * cells);
    out.extend_from_slice(MAGIC);
    out.push(1);
    out.extend_from_slice(&geometry.width.to_le_bytes());
    out.extend_from_slice(&geometry.height.to_le_bytes());
    out.extend_from_slice(&(frames.len() as u32).to_le_bytes());
    for f in frames {
        out.extend_from_slice(&(f.cells().len() as u32).to_le_bytes());
        for &(i, v) in f.cells() {
            out.extend_from_slice(&i.to_le_bytes());
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::parse_at_offset(self.pos, "frames file truncated"))?;
        self.pos = end;
        Ok(chunk.try_into().expect("slice has N bytes"))
    }

    fn u32(&mut self) -> Result<u32> {
        self.take::<4>().map(u32::from_le_bytes)
    }
}

/// Decodes `frames.bin` into `(geometry, sparse cells per frame)`.
pub fn decode_frames(bytes: &[u8]) -> Result<(SensorGeometry, Vec<Vec<(u32, f64)>>)> {
    let mut r = Reader { bytes, pos: 0 };
    if &r.take::<4>()? != MAGIC {
        return Err(Error::parse_at_offset(0, "not a frames file (bad magic)"));
    }
    let version = r.take::<1>()?[0];
    if version != 1 {
        return Err(Error::parse_at_offset(4, format!("unsupported frames version {version}")));
    }
    let width = u16::from_le_bytes(r.take::<2>()?);
    let height = u16::from_le_bytes(r.take::<2>()?);
    let geometry = SensorGeometry::new(width, height)?;
    let count = r.u32()? as usize;
    let mut frames = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let n = r.u32()? as usize;
        let mut cells = Vec::with_capacity(n.min(geometry.pixel_count()));
        for _ in 0..n {
            let i = r.u32()?;
            let v = f64::from_le_bytes(r.take::<8>()?);
            cells.push((i, v));
        }
        frames.push(cells);
    }
    if r.pos != bytes.len() {
        return Err(Error::parse_at_offset(r.pos, "trailing bytes after last frame"));
    }
    Ok((geometry, frames))
}

pub fn write_labels(labels: &[Label]) -> String {
    let mut out = String::new();
    for (i, l) in labels.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", l.bit());
    }
    out
}

/// Parses `<frame_id>,<0|1>` lines; every id in `0..frame_count` must
/// appear exactly once.
pub fn parse_labels(text: &str, frame_count: usize) -> Result<Vec<Label>> {
    let mut labels = vec![None; frame_count];
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::parse_at_line(n + 1, format!("expected '<frame_id>,<0|1>', got '{line}'"));
        let (id, bit) = line.split_once(',').ok_or_else(bad)?;
        let id: usize = id.trim().parse().map_err(|_| bad())?;
        let label = bit.trim().parse::<u8>().ok().and_then(Label::from_bit).ok_or_else(bad)?;
        let slot = labels
            .get_mut(id)
            .ok_or_else(|| Error::parse_at_line(n + 1, format!("frame id {id} not in corpus of {frame_count}")))?;
        if slot.replace(label).is_some() {
            return Err(Error::parse_at_line(n + 1, format!("frame id {id} labelled twice")));
        }
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::Validation(format!("frame {i} has no label"))))
        .collect()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_corpus(
    dir: &Path,
    geometry: SensorGeometry,
    frames: &[TimestampFrame],
    labels: Option<&[Label]>,
    metadata: &[(&str, String)],
    config_toml: Option<&str>,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut index = String::from("# dvs-snn corpus\n");
    let _ = writeln!(index, "# geometry={geometry}");
    for (k, v) in metadata {
        let _ = writeln!(index, "# {k}={v}");
    }
    index.push_str(INDEX_HEADER);
    index.push('\n');
    for (i, f) in frames.iter().enumerate() {
        let _ = writeln!(index, "{i},{},{},{}", f.window_start, f.window_len, f.populated_count());
    }
    write_file(&dir.join(INDEX_FILE), index.as_bytes())?;
    write_file(&dir.join(FRAMES_FILE), &encode_frames(geometry, frames))?;
    if let Some(labels) = labels {
        write_file(&dir.join(LABELS_FILE), write_labels(labels).as_bytes())?;
    }
    if let Some(cfg) = config_toml {
        write_file(&dir.join(CONFIG_FILE), cfg.as_bytes())?;
    }
    Ok(())
}

pub fn read_corpus(dir: &Path) -> Result<Corpus> {
    let index_path = dir.join(INDEX_FILE);
    let index = std::fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;
    let frames_path = dir.join(FRAMES_FILE);
    let bytes = std::fs::read(&frames_path).map_err(|e| Error::io(&frames_path, e))?;
    let (geometry, cells) = decode_frames(&bytes)?;

    let mut metadata = Vec::new();
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (n, line) in index.lines().enumerate() {
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.trim().split_once('=') {
                metadata.push((k.to_string(), v.to_string()));
            }
            continue;
        }
        if !seen_header {
            if line != INDEX_HEADER {
                return Err(Error::parse_at_line(n + 1, format!("expected index header '{INDEX_HEADER}'")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parsed: Option<Vec<u64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[id, start, len, count]) if id as usize == rows.len() => rows.push((start, len, count as usize)),
            _ => return Err(Error::parse_at_line(n + 1, format!("bad index row '{line}'"))),
        }
    }
    if !seen_header {
        return Err(Error::parse_at_line(1, "index has no header row"));
    }
    if rows.len() != cells.len() {
        return Err(Error::Validation(format!(
            "index lists {} frames but the frames file holds {}",
            rows.len(),
            cells.len()
        )));
    }
    let geometry_meta = metadata.iter().find(|(k, _)| k == "geometry").map(|(_, v)| v.clone());
    if geometry_meta.is_some_and(|g| g != geometry.to_string()) {
        return Err(Error::Validation("index and frames file disagree on geometry".into()));
    }
    metadata.retain(|(k, _)| k != "geometry");

    let mut frames = Vec::with_capacity(rows.len());
    for (i, ((start, len, count), cells)) in rows.into_iter().zip(cells).enumerate() {
        if cells.len() != count {
            return Err(Error::Validation(format!("frame {i}: index says {count} cells, file has {}", cells.len())));
        }
        frames.push(TimestampFrame::from_cells(geometry, start, len, cells)?);
    }
    let labels_path = dir.join(LABELS_FILE);
    let labels = match std::fs::read_to_string(&labels_path) {
        Ok(text) => Some(parse_labels(&text, frames.len())?),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(Error::io(&labels_path, e)),
    };
    Ok(Corpus {
        geometry,
        frames,
        labels,
        metadata,
    })
}
