use super::config::RunConfig;
use super::corpus::{self, Corpus};
use crate::eval::{evaluate, generate_corpus, noise_sweep, Label, LabeledFrame, SnnDetector, SweepRow};
use crate::event::{
    enumerate_windows, integrate_frame, parse_event_stream, serialize_event_stream, EventFormat, SensorGeometry,
    TimestampFrame,
};
use crate::net::{parse_weight_file, write_weight_file, Network, PentConfig};
use crate::sim::{load_frame_dir, simulate_video};
use crate::train::{train_network, Checkpoint, TrainReport};
use crate::{Error, Result};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Shared state of one CLI invocation.
pub struct Context<'a> {
    pub config: RunConfig,
    pub jobs: usize,
    pub format: Option<EventFormat>,
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

fn emit(w: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<()> {
    w.write_fmt(text)
        .and_then(|_| w.write_all(b"\n"))
        .map_err(|e| Error::io("<output>", e))
}

macro_rules! say {
    ($w:expr, $($arg:tt)*) => { emit($w, format_args!($($arg)*)) };
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

impl Context<'_> {
    fn hash(&self) -> String {
        self.config.hash()
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        if self.jobs == 0 {
            return Err(Error::Validation("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Error::State(format!("cannot start worker pool: {e}")))
    }

    fn output_format(&self, path: &Path) -> EventFormat {
        self.format.unwrap_or(match path.extension().and_then(|e| e.to_str()) {
            Some("bin") | Some("evtb") => EventFormat::Bin,
            _ => EventFormat::Csv,
        })
    }

    fn check_geometry(&self, what: &str, geometry: SensorGeometry) -> Result<()> {
        if geometry != self.config.geometry {
            return Err(Error::Validation(format!(
                "{what} geometry {geometry} does not match configured geometry {}",
                self.config.geometry
            )));
        }
        Ok(())
    }

    fn load_weights(&self, path: &Path) -> Result<Network> {
        let text = String::from_utf8(read_file(path)?)
            .map_err(|_| Error::parse_at_offset(0, "weight file is not UTF-8"))?;
        let (net, _) = parse_weight_file(&text, &self.config.network)?;
        Ok(net)
    }

    fn pent(&self, on: bool) -> Option<PentConfig> {
        on.then_some(self.config.pent)
    }
}

/// Frames dir → event file.
pub fn cmd_simulate(ctx: &mut Context<'_>, frames_dir: &Path, out_path: &Path) -> Result<()> {
    let frames = load_frame_dir(frames_dir)?;
    let events = simulate_video(&frames, &ctx.config.sim)?;
    let fmt = ctx.output_format(out_path);
    let bytes = serialize_event_stream(&events, ctx.config.geometry, fmt)?;
    write_file(out_path, &bytes)?;
    let duration = match (events.first(), events.last()) {
        (Some(a), Some(b)) => b.t - a.t,
        _ => 0,
    };
    say!(ctx.out, "events={} duration_us={duration} frames={}", events.len(), frames.len())
}

fn load_events(path: &Path) -> Result<crate::event::EventStream> {
    let bytes = read_file(path)?;
    parse_event_stream(&bytes, EventFormat::sniff(&bytes))
}

/// Integrates every scheduled window of an event stream into frames.
pub fn integrate_stream(stream: &crate::event::EventStream, cfg: &RunConfig) -> Result<Vec<TimestampFrame>> {
    let (Some(first), Some(last)) = (stream.events.first(), stream.events.last()) else {
        return Ok(Vec::new());
    };
    enumerate_windows(first.t, last.t + 1, &cfg.windows)?
        .into_iter()
        .map(|w| integrate_frame(&stream.events, stream.geometry, w.start, w.len))
        .collect()
}

/// Event file → frame corpus.
pub fn cmd_integrate(ctx: &mut Context<'_>, events_path: &Path, out_dir: &Path) -> Result<()> {
    let stream = load_events(events_path)?;
    let frames = integrate_stream(&stream, &ctx.config)?;
    let meta = [("config_hash", ctx.hash())];
    corpus::write_corpus(out_dir, stream.geometry, &frames, None, &meta, Some(&ctx.config.to_toml()))?;
    say!(ctx.out, "frames={} events={}", frames.len(), stream.events.len())
}

/// Seeded synthetic labelled corpus.
pub fn cmd_gen_synthetic(ctx: &mut Context<'_>, out_dir: &Path) -> Result<()> {
    let cfg = &ctx.config;
    let generated = generate_corpus(&cfg.synthetic, cfg.seed)?;
    let frames: Vec<TimestampFrame> = generated.iter().map(|f| f.labeled.frame.clone()).collect();
    let labels: Vec<Label> = generated.iter().map(|f| f.labeled.label).collect();
    let meta = [("config_hash", ctx.hash()), ("seed", cfg.seed.to_string())];
    corpus::write_corpus(out_dir, cfg.geometry, &frames, Some(&labels), &meta, Some(&cfg.to_toml()))?;
    let uav = labels.iter().filter(|l| **l == Label::Present).count();
    say!(ctx.out, "frames={} uav={uav} distractor={}", frames.len(), frames.len() - uav)
}

fn checkpoint_dir(ctx: &Context<'_>, out_weights: &Path) -> PathBuf {
    ctx.config.paths.checkpoint_dir.clone().unwrap_or_else(|| {
        let mut p = out_weights.as_os_str().to_owned();
        p.push(".ckpt");
        PathBuf::from(p)
    })
}

fn train_log(reports: &[TrainReport], hash: &str) -> String {
    let mut log = format!("# config_hash={hash}\nframe_idx,layer,winners,convergence_C\n");
    for r in reports {
        for e in &r.log {
            log.push_str(&e.to_string());
            log.push('\n');
        }
    }
    log
}

/// Corpus → trained weight file + training log.
pub fn cmd_train(ctx: &mut Context<'_>, corpus_dir: &Path, out_weights: &Path) -> Result<()> {
    let corpus = corpus::read_corpus(corpus_dir)?;
    if corpus.frames.is_empty() {
        return Err(Error::Validation(format!("corpus {} has no frames", corpus_dir.display())));
    }
    ctx.check_geometry("corpus", corpus.geometry)?;
    let cfg = ctx.config.clone();
    let hash = ctx.hash();
    let metadata = |extra: Vec<(&'static str, String)>| {
        let mut m = vec![("config_hash", hash.clone()), ("seed", cfg.seed.to_string())];
        m.extend(extra);
        m
    };
    let mut net = Network::new(cfg.network.clone(), cfg.seed)?;
    let pent = cfg.pent;
    let ckpt_dir = checkpoint_dir(ctx, out_weights);
    let mut sink = |net: &Network, layer: usize, frame_idx: usize| -> Result<()> {
        let text = write_weight_file(net, &metadata(vec![("checkpoint", format!("layer{layer}_frame{frame_idx}"))]));
        write_file(&ckpt_dir.join(format!("layer{layer}_frame{frame_idx}.snnw")), text.as_bytes())
    };
    let checkpoint = (cfg.checkpoint_every > 0).then(|| Checkpoint {
        every: cfg.checkpoint_every,
        sink: &mut sink,
    });
    // training stays on the calling thread whatever --jobs says
    let reports = train_network(&mut net, &corpus.frames, &cfg.stdp, &cfg.schedule, cfg.frame_order, Some(&pent), checkpoint)?;

    let summary: Vec<_> = reports
        .iter()
        .map(|r| (r.layer, r.presentations, r.updates, r.final_convergence, r.converged))
        .collect();
    let text = write_weight_file(&net, &metadata(Vec::new()));
    write_file(out_weights, text.as_bytes())?;
    let log_path = cfg.paths.train_log.clone().unwrap_or_else(|| out_weights.with_extension("log"));
    write_file(&log_path, train_log(&reports, &hash).as_bytes())?;
    for (layer, presentations, updates, c, converged) in summary {
        if updates == 0 {
            say!(ctx.err, "warning: layer {layer} received no STDP updates from {presentations} frames")?;
        }
        say!(
            ctx.out,
            "layer={layer} presentations={presentations} updates={updates} convergence_C={c:.6} converged={converged}"
        )?;
    }
    Ok(())
}

fn load_frames(ctx: &Context<'_>, input: &Path) -> Result<(Vec<TimestampFrame>, Option<Vec<Label>>)> {
    if input.is_dir() {
        let Corpus { frames, labels, .. } = corpus::read_corpus(input)?;
        Ok((frames, labels))
    } else {
        let stream = load_events(input)?;
        Ok((integrate_stream(&stream, &ctx.config)?, None))
    }
}

fn labelled(frames: Vec<TimestampFrame>, labels: Vec<Label>) -> Vec<LabeledFrame> {
    frames
        .into_iter()
        .zip(labels)
        .map(|(frame, label)| LabeledFrame {
            frame,
            label,
            region: None,
        })
        .collect()
}

fn resolve_labels(frames: &[TimestampFrame], from_input: Option<Vec<Label>>, path: Option<&Path>) -> Result<Option<Vec<Label>>> {
    match path {
        Some(p) => {
            let text = String::from_utf8(read_file(p)?).map_err(|_| Error::parse_at_offset(0, "labels file is not UTF-8"))?;
            corpus::parse_labels(&text, frames.len()).map(Some)
        }
        None => Ok(from_input),
    }
}

pub struct DetectArgs<'p> {
    pub input: &'p Path,
    pub weights: &'p Path,
    pub pent: bool,
    /// Score against labels; `Some(None)` uses the corpus' own labels file.
    pub labels: Option<Option<&'p Path>>,
}

/// Per-frame detections, or a confusion matrix when labels are requested.
pub fn cmd_detect(ctx: &mut Context<'_>, args: DetectArgs<'_>) -> Result<()> {
    let net = ctx.load_weights(args.weights)?;
    ctx.check_geometry("weights", net.config().geometry)?;
    let (frames, own_labels) = load_frames(ctx, args.input)?;
    if frames.is_empty() {
        return Err(Error::Validation(format!("{} contains no frames", args.input.display())));
    }
    ctx.check_geometry("input", frames[0].geometry)?;
    let pent = ctx.pent(args.pent);
    let detector = SnnDetector {
        network: &net,
        pent: pent.as_ref(),
    };
    let pool = ctx.pool()?;
    match args.labels {
        None => {
            let n = frames.len();
            // labels are ignored; evaluate is only used for its detections
            let unlabeled = labelled(frames, vec![Label::Absent; n]);
            let (_, dets) = pool.install(|| evaluate(&detector, &unlabeled))?;
            let hash = ctx.hash();
            say!(ctx.out, "# config_hash={hash}")?;
            say!(ctx.out, "frame_id,present,spike_count")?;
            for (i, d) in dets.iter().enumerate() {
                say!(ctx.out, "{i},{},{}", d.present as u8, d.spike_count)?;
            }
        }
        Some(path) => {
            let labels = resolve_labels(&frames, own_labels, path)?
                .ok_or_else(|| Error::Validation("no labels: pass --labels <file> or use a labelled corpus".into()))?;
            let data = labelled(frames, labels);
            let (m, _) = pool.install(|| evaluate(&detector, &data))?;
            let hash = ctx.hash();
            say!(ctx.out, "# config_hash={hash}")?;
            say!(ctx.out, "tp,fn,fp,tn,accuracy")?;
            say!(ctx.out, "{},{},{},{},{:.4}", m.true_pos, m.false_neg, m.false_pos, m.true_neg, m.accuracy())?;
            say!(ctx.err, "accuracy {:.4} over {} frames ({m})", m.accuracy(), m.total())?;
        }
    }
    Ok(())
}

pub struct SweepArgs<'p> {
    pub corpus: &'p Path,
    pub weights: &'p Path,
    pub pent: bool,
    pub labels: Option<&'p Path>,
    pub fractions: Option<Vec<f64>>,
}

/// Accuracy table over additive noise levels.
pub fn cmd_noise_sweep(ctx: &mut Context<'_>, args: SweepArgs<'_>) -> Result<()> {
    let fractions = args.fractions.unwrap_or_else(|| ctx.config.noise_fractions.clone());
    for &f in &fractions {
        crate::eval::NoiseSpec::new(f, 0)?;
    }
    let net = ctx.load_weights(args.weights)?;
    ctx.check_geometry("weights", net.config().geometry)?;
    let (frames, own_labels) = load_frames(ctx, args.corpus)?;
    if frames.is_empty() {
        return Err(Error::Validation(format!("{} contains no frames", args.corpus.display())));
    }
    ctx.check_geometry("corpus", frames[0].geometry)?;
    let labels = resolve_labels(&frames, own_labels, args.labels)?
        .ok_or_else(|| Error::Validation("noise sweep needs a labelled corpus".into()))?;
    let data = labelled(frames, labels);
    let pent = ctx.pent(args.pent);
    let detector = SnnDetector {
        network: &net,
        pent: pent.as_ref(),
    };
    let seed = ctx.config.seed;
    let rows = ctx.pool()?.install(|| noise_sweep(&detector, &data, &fractions, seed))?;
    let hash = ctx.hash();
    say!(ctx.out, "# config_hash={hash}")?;
    say!(ctx.out, "{}", SweepRow::CSV_HEADER)?;
    for r in &rows {
        say!(ctx.out, "{}", r.csv())?;
    }
    Ok(())
}
