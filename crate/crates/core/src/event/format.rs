use super::{validate_events, Event, Polarity, SensorGeometry};
use crate::{Error, Result};
use std::fmt::Write as _;

const BIN_MAGIC: &[u8; 4] = b"EVTB";
const BIN_VERSION: u8 = 0x01;
const BIN_HEADER_LEN: usize = 9;
const BIN_RECORD_LEN: usize = 13;

/// On-disk event stream encodings.
///
/// `Csv` is the text form: a header `evtcsv,1,<width>,<height>` followed by
/// one `x,y,t_us,p` record per LF-terminated line. `Bin` is a 9-byte header
/// (`EVTB`, version 0x01, u16 LE width, u16 LE height) and packed 13-byte
/// little-endian records `u16 x, u16 y, u64 t_us, u8 p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventFormat {
    Csv,
    Bin,
}

impl EventFormat {
    /// Picks the format from the leading bytes of a file.
    pub fn sniff(bytes: &[u8]) -> Self {
        if bytes.starts_with(BIN_MAGIC) {
            EventFormat::Bin
        } else {
            EventFormat::Csv
        }
    }
}

impl std::str::FromStr for EventFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(EventFormat::Csv),
            "bin" => Ok(EventFormat::Bin),
            other => Err(Error::Config(format!("unknown event format '{other}'"))),
        }
    }
}

/// A decoded event file: the declared sensor geometry plus its events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    pub geometry: SensorGeometry,
    pub events: Vec<Event>,
}

pub fn parse_event_stream(source: &[u8], fmt: EventFormat) -> Result<EventStream> {
    let stream = match fmt {
        EventFormat::Csv => parse_csv(source)?,
        EventFormat::Bin => parse_bin(source)?,
    };
    validate_events(&stream.events, stream.geometry)?;
    Ok(stream)
}

pub fn serialize_event_stream(
    events: &[Event],
    geometry: SensorGeometry,
    fmt: EventFormat,
) -> Result<Vec<u8>> {
    validate_events(events, geometry)?;
    Ok(match fmt {
        EventFormat::Csv => write_csv(events, geometry),
        EventFormat::Bin => write_bin(events, geometry),
    })
}

fn parse_csv(source: &[u8]) -> Result<EventStream> {
    let text = std::str::from_utf8(source)
        .map_err(|e| Error::parse_at_offset(e.valid_up_to(), "input is not ASCII text"))?;
    let mut lines = text.split('\n').enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse_at_line(1, "missing header"))?;
    let geometry = parse_csv_header(header)?;

    let mut events = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        events.push(parse_csv_record(line, lineno)?);
    }
    Ok(EventStream { geometry, events })
}

fn parse_csv_header(header: &str) -> Result<SensorGeometry> {
    let fields: Vec<&str> = header.split(',').collect();
    if fields.len() != 4 || fields[0] != "evtcsv" {
        return Err(Error::parse_at_line(
            1,
            format!("expected 'evtcsv,1,<width>,<height>', got '{header}'"),
        ));
    }
    if fields[1] != "1" {
        return Err(Error::parse_at_line(
            1,
            format!("unsupported version '{}'", fields[1]),
        ));
    }
    let dim = |s: &str| {
        s.parse::<u16>()
            .map_err(|_| Error::parse_at_line(1, format!("bad dimension '{s}'")))
    };
    let (w, h) = (dim(fields[2])?, dim(fields[3])?);
    SensorGeometry::new(w, h).map_err(|e| Error::parse_at_line(1, e.to_string()))
}

fn parse_csv_record(line: &str, lineno: usize) -> Result<Event> {
    let mut fields = line.split(',');
    let mut next = |name: &str| {
        fields
            .next()
            .ok_or_else(|| Error::parse_at_line(lineno, format!("missing field '{name}'")))
    };
    let (xs, ys, ts, ps) = (next("x")?, next("y")?, next("t_us")?, next("p")?);
    if fields.next().is_some() {
        return Err(Error::parse_at_line(lineno, "too many fields"));
    }
    let bad = |name: &str, v: &str| Error::parse_at_line(lineno, format!("bad {name} '{v}'"));
    let x = xs.parse::<u16>().map_err(|_| bad("x", xs))?;
    let y = ys.parse::<u16>().map_err(|_| bad("y", ys))?;
    let t = ts.parse::<u64>().map_err(|_| bad("t_us", ts))?;
    let p = ps
        .parse::<u8>()
        .ok()
        .and_then(Polarity::from_bit)
        .ok_or_else(|| bad("polarity", ps))?;
    Ok(Event { x, y, t, p })
}

fn write_csv(events: &[Event], geometry: SensorGeometry) -> Vec<u8> {
    let mut out = String::with_capacity(24 + events.len() * 20);
    let _ = writeln!(out, "evtcsv,1,{},{}", geometry.width, geometry.height);
    for ev in events {
        let _ = writeln!(out, "{},{},{},{}", ev.x, ev.y, ev.t, ev.p.bit());
    }
    out.into_bytes()
}

fn parse_bin(source: &[u8]) -> Result<EventStream> {
    if source.len() < BIN_HEADER_LEN {
        return Err(Error::parse_at_offset(0, "truncated header"));
    }
    if &source[..4] != BIN_MAGIC {
        return Err(Error::parse_at_offset(0, "bad magic, expected 'EVTB'"));
    }
    if source[4] != BIN_VERSION {
        return Err(Error::parse_at_offset(
            4,
            format!("unsupported version {:#04x}", source[4]),
        ));
    }
    let width = u16::from_le_bytes([source[5], source[6]]);
    let height = u16::from_le_bytes([source[7], source[8]]);
    let geometry =
        SensorGeometry::new(width, height).map_err(|e| Error::parse_at_offset(5, e.to_string()))?;

    let body = &source[BIN_HEADER_LEN..];
    if body.len() % BIN_RECORD_LEN != 0 {
        let offset = BIN_HEADER_LEN + body.len() / BIN_RECORD_LEN * BIN_RECORD_LEN;
        return Err(Error::parse_at_offset(offset, "truncated record"));
    }
    let mut events = Vec::with_capacity(body.len() / BIN_RECORD_LEN);
    for (i, rec) in body.chunks_exact(BIN_RECORD_LEN).enumerate() {
        let offset = BIN_HEADER_LEN + i * BIN_RECORD_LEN;
        let x = u16::from_le_bytes([rec[0], rec[1]]);
        let y = u16::from_le_bytes([rec[2], rec[3]]);
        let t = u64::from_le_bytes(rec[4..12].try_into().expect("8-byte slice"));
        let p = Polarity::from_bit(rec[12]).ok_or_else(|| {
            Error::parse_at_offset(offset + 12, format!("bad polarity byte {}", rec[12]))
        })?;
        events.push(Event { x, y, t, p });
    }
    Ok(EventStream { geometry, events })
}

fn write_bin(events: &[Event], geometry: SensorGeometry) -> Vec<u8> {
    let mut out = Vec::with_capacity(BIN_HEADER_LEN + events.len() * BIN_RECORD_LEN);
    out.extend_from_slice(BIN_MAGIC);
    out.push(BIN_VERSION);
    out.extend_from_slice(&geometry.width.to_le_bytes());
    out.extend_from_slice(&geometry.height.to_le_bytes());
    for ev in events {
        out.extend_from_slice(&ev.x.to_le_bytes());
        out.extend_from_slice(&ev.y.to_le_bytes());
        out.extend_from_slice(&ev.t.to_le_bytes());
        out.push(ev.p.bit());
    }
    out
}
