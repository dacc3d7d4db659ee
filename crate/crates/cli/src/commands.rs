//! Subcommands. Each one computes everything first, then writes its files
//! and a manifest into the output directory.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use hsps_core::curve::{fmt_f64, symmetric_grid};
use hsps_core::tag_stream_sim::expected_singles_rate;
use hsps_core::tagfile::{self, TagReader, TagWriter, MAGIC};
use hsps_core::time_averaging::{g_c2_zero_vs_window, Method};
use hsps_core::{
    compare as compare_curves, Averager, CoherenceCurve, CoincidenceAccumulator, Coincidences, CurveKind,
    EstimatorConfig, ResponseModel, Simulator,
};
use log::info;
use serde::Serialize;
use serde_json::json;

use crate::config::{Model, RunConfig, TagFormat};
use crate::{CliError, RunArgs};

/// Lag span used when `grid.span` is not set.
const DEFAULT_SPAN: f64 = 5e-9;
const CHUNK_TAGS: usize = 1 << 16;

type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn with_path(path: &Path) -> impl Fn(hsps_core::Error) -> CliError + '_ {
    move |e| match CliError::from(e) {
        CliError::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
        CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn resolve(run: &RunArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(run.config.as_deref())?;
    cfg.apply(&run.overrides())?;
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

/// Output directory plus the list of files written to it.
struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Outputs { dir: dir.to_path_buf(), files: vec![] })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    fn curve(&mut self, name: &str, c: &CoherenceCurve) -> Result<()> {
        let p = self.path(name);
        let mut w = create(&p)?;
        c.write_csv(&mut w).map_err(with_path(&p))?;
        w.flush().map_err(io_err(&p))
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let p = self.path(name);
        fs::write(&p, body).map_err(io_err(&p))
    }

    /// `<command>.manifest.json` and `<command>.config.toml`.
    fn manifest(
        mut self,
        command: &str,
        argv: &[String],
        cfg: Option<&RunConfig>,
        summary: serde_json::Value,
    ) -> Result<()> {
        if let Some(cfg) = cfg {
            let toml = toml::to_string(cfg).map_err(|e| CliError::Validation(e.to_string()))?;
            self.text(&format!("{command}.config.toml"), &toml)?;
        }
        let m = Manifest {
            tool: "hsps",
            version: env!("CARGO_PKG_VERSION"),
            command,
            args: argv,
            seed: cfg.map(|c| c.simulate.seed),
            config: cfg,
            outputs: &self.files,
            summary,
        };
        let body = serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n";
        let p = self.dir.join(format!("{command}.manifest.json"));
        fs::write(&p, body).map_err(io_err(&p))
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    args: &'a [String],
    seed: Option<u64>,
    config: Option<&'a RunConfig>,
    outputs: &'a [String],
    summary: serde_json::Value,
}

pub fn theory(run: &RunArgs, argv: &[String]) -> Result<()> {
    let cfg = resolve(run)?;
    let spdc = cfg.spdc()?;
    let dets = cfg.detectors()?;
    let window = cfg.window()?;
    let model = match cfg.theory.model {
        Model::Continuous => ResponseModel::continuous(&dets, &window),
        Model::Tagged => ResponseModel::tagged(&dets, &window)?,
    };
    let a = Averager::new(spdc, model, Method::Auto)?;
    let taus = match cfg.grid.step {
        Some(_) => cfg.lag_grid(DEFAULT_SPAN, dets.i.clock_quantum)?.taus(dets.i.clock_quantum),
        None => {
            let jitter = dets.iter().map(|(_, d)| d.jitter_half_width).fold(0.0, f64::max);
            let span = cfg.span()?.unwrap_or(4.0 * (window.half_width + jitter));
            symmetric_grid(span, cfg.grid.points)
        }
    };
    let gsi = a.g_si2_curve(&taus, Some(dets))?;
    let gc = a.g_c2_curve(&taus, Some(dets))?;
    let sweep = g_c2_zero_vs_window(&spdc, &dets, &cfg.theory_windows()?)?;
    info!("theory: {} taus, {} windows", taus.len(), sweep.full_widths.len());

    let mut out = Outputs::new(&run.out)?;
    out.curve("g_si2.csv", &gsi)?;
    out.curve("g_c2.csv", &gc)?;
    let mut body = String::from("window_s,value,ideal_value\n");
    for ((w, v), i) in sweep.full_widths.iter().zip(&sweep.values).zip(&sweep.ideal_values) {
        body += &format!("{},{},{}\n", fmt_f64(*w), fmt_f64(*v), fmt_f64(*i));
    }
    out.text("g_c2_vs_window.csv", &body)?;
    let summary = json!({
        "g_si2_0": a.g_si2(0.0),
        "g_c2_0": a.g_c2(0.0),
        "impulse_approximation": a.uses_impulse(),
    });
    out.manifest("theory", argv, Some(&cfg), summary)
}

pub fn simulate(run: &RunArgs, argv: &[String]) -> Result<()> {
    let cfg = resolve(run)?;
    let sim_cfg = cfg.sim_config()?;
    let sim = Simulator::new(sim_cfg)?;
    let header = sim.header();
    let mut out = Outputs::new(&run.out)?;
    let counts = match cfg.simulate.format {
        TagFormat::Binary => {
            let p = out.path("tags.htag");
            let mut w = TagWriter::new(create(&p)?, header).map_err(with_path(&p))?;
            let mut counts = [0u64; 3];
            for chunk in sim {
                for (c, v) in chunk.tags.iter() {
                    counts[c.index()] += v.len() as u64;
                }
                w.write_chunk(&chunk.tags).map_err(with_path(&p))?;
            }
            w.finish().map_err(with_path(&p))?.flush().map_err(io_err(&p))?;
            counts
        }
        TagFormat::Csv => {
            let stream = hsps_core::simulate(&sim_cfg)?;
            let p = out.path("tags.csv");
            let mut w = create(&p)?;
            tagfile::write_csv(&mut w, &stream).map_err(with_path(&p))?;
            w.flush().map_err(io_err(&p))?;
            let c = stream.counts();
            [c.i, c.s1, c.s2]
        }
    };
    info!("simulate: counts {counts:?}");
    let expected = expected_singles_rate(&sim_cfg);
    let summary = json!({
        "counts": { "i": counts[0], "s1": counts[1], "s2": counts[2] },
        "expected_rates": expected,
        "clock_quantum": header.clock_quantum,
        "duration_ticks": header.duration_ticks,
        "config_hash": header.config_hash.map(|h| format!("{h:016x}")),
    });
    out.manifest("simulate", argv, Some(&cfg), summary)
}

pub fn analyze(tagfile: &Path, run: &RunArgs, argv: &[String]) -> Result<()> {
    let cfg = resolve(run)?;
    let window = cfg.window()?;
    let mut input = BufReader::new(File::open(tagfile).map_err(io_err(tagfile))?);
    let binary = input.fill_buf().map_err(io_err(tagfile))?.starts_with(MAGIC);
    let co = if binary {
        let mut r = TagReader::new(input).map_err(with_path(tagfile))?;
        let header = r.header();
        let mut est = EstimatorConfig::new(window, cfg.lag_grid(DEFAULT_SPAN, header.clock_quantum)?);
        est.herald = cfg.analyze.herald;
        let mut acc = CoincidenceAccumulator::new(est, header)?;
        while let Some(chunk) = r.next_chunk(CHUNK_TAGS).map_err(with_path(tagfile))? {
            acc.push(&chunk.tags, chunk.horizon).map_err(with_path(tagfile))?;
        }
        acc.finish()
    } else {
        // CSV carries no tick size; the configured one applies
        let q = cfg.clock_quantum()?;
        let stream = tagfile::read_csv(input, q, None).map_err(with_path(tagfile))?;
        let mut est = EstimatorConfig::new(window, cfg.lag_grid(DEFAULT_SPAN, q)?);
        est.herald = cfg.analyze.herald;
        Coincidences::from_stream(&stream, &est)?
    };
    let gsi = co.g_si2()?;
    let gc = co.g_c2()?;
    info!("analyze: singles {:?}", co.singles());

    let mut out = Outputs::new(&run.out)?;
    out.curve("g_si2_est.csv", &gsi)?;
    out.curve("g_c2_est.csv", &gc)?;
    let summary = json!({
        "input": tagfile.display().to_string(),
        "format": if binary { "binary" } else { "csv" },
        "singles": co.singles(),
        "rates": co.rates(),
        "exposure_s": co.exposure(),
        "window_width_s": co.window_width(),
        "triples": co.triple_histogram().total(),
    });
    out.manifest("analyze", argv, Some(&cfg), summary)
}

pub fn compare(analytic: &Path, estimated: &Path, threshold: f64, dir: &Path, argv: &[String]) -> Result<()> {
    if !(threshold > 0.0) {
        return Err(CliError::Validation(format!("--threshold must be > 0, got {threshold}")));
    }
    let read = |p: &Path, kind| -> Result<CoherenceCurve> {
        let f = File::open(p).map_err(io_err(p))?;
        CoherenceCurve::read_csv(BufReader::new(f), kind).map_err(with_path(p))
    };
    let a = read(analytic, CurveKind::Analytic)?;
    let e = read(estimated, CurveKind::Simulated)?;
    let report = compare_curves(&a, &e, threshold)?;
    print!("{}", report.to_text());

    let mut out = Outputs::new(dir)?;
    let body = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    out.text("compare.json", &body)?;
    let summary = json!({
        "analytic": analytic.display().to_string(),
        "estimated": estimated.display().to_string(),
        "max_abs_z": report.max_abs_z,
        "mean_z": report.mean_z,
        "pass": report.pass,
    });
    out.manifest("compare", argv, None, summary)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::CompareFailed)
    }
}
