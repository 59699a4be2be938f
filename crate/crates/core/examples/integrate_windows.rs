//! Integration windows over an event stream.
//!
//! Builds a 200 ms stream of a drifting line, enumerates two window
//! families and integrates each window into a timestamp frame. The first
//! frame is dumped as a PGM image when a path is given.
//!
//! cargo run --example integrate_windows -- [frame.pgm]

use dvs_snn::event::{
    active_pixel_fraction, enumerate_windows, integrate_frame, parse_event_stream, serialize_event_stream, Event,
    EventFormat, Polarity, SensorGeometry, WindowSchedule,
};

fn main() -> dvs_snn::Result<()> {
    let geometry = SensorGeometry::default();
    let mut events = Vec::new();
    for t in (0..200_000u64).step_by(500) {
        let x = 20 + (t / 2_000) as u16;
        let y = 40 + (t % 50_000 / 500) as u16;
        events.push(Event::new(x, y, t, if t % 1000 == 0 { Polarity::On } else { Polarity::Off }));
    }

    // round trip through the binary format
    let bytes = serialize_event_stream(&events, geometry, EventFormat::Bin)?;
    let stream = parse_event_stream(&bytes, EventFormat::sniff(&bytes))?;
    println!("{} events, {} bytes as EVT-BIN", stream.events.len(), bytes.len());

    let schedule = WindowSchedule::new(vec![10_000, 50_000], vec![0.0, 0.5])?;
    let t_last = stream.events.last().unwrap().t;
    let windows = enumerate_windows(0, t_last + 1, &schedule)?;
    println!("strides {:?} us, {} windows", schedule.strides()?, windows.len());

    for w in windows.iter().filter(|w| w.len == 50_000) {
        let frame = integrate_frame(&stream.events, geometry, w.start, w.len)?;
        println!(
            "  [{:>6}, {:>6}) cells {:>3}  active {:.5}",
            w.start,
            w.end(),
            frame.populated_count(),
            active_pixel_fraction(&frame)
        );
    }

    if let Some(path) = std::env::args().nth(1) {
        let frame = integrate_frame(&stream.events, geometry, 0, 50_000)?;
        let mut out = Vec::new();
        frame.write_pgm(&mut out).expect("in-memory write");
        std::fs::write(&path, out).map_err(|e| dvs_snn::Error::Io { path: path.clone().into(), source: e })?;
        println!("wrote {path}");
    }
    Ok(())
}
