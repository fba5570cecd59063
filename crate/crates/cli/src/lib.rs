//! The `qmut` command line.
//!
//! Exit codes: 0 success (or bounded verdict), 1 I/O failure, 2 usage or
//! invalid input, 3 unbounded verdict, 4 witness requested for a bounded
//! class. Standard output only ever carries JSON, CSV or SVG; diagnostics go
//! to standard error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qmut_core::geometry::{
    exchange_candidates, geom_mutate_lines, geom_mutate_points, point_weights, points_to_quiver,
    Form, GeometryConfig,
};
use qmut_core::orbit::{CsvSink, OrbitDocument, SummaryAccumulator};
use qmut_core::plot::render_svg;
use qmut_core::{
    classify, divergence_witness, mutate, random_alternating_sequence, run_orbit, Error,
    ExchangeTriple, MutationSequence, OrbitRecord, Vertex,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNBOUNDED: i32 = 3;
pub const EXIT_BOUNDED_WITNESS: i32 = 4;

pub const MAX_LENGTH: usize = 1_000_000;
pub const MAX_TARGET: f64 = 1e12;

#[derive(Debug, Parser)]
#[command(
    name = "qmut",
    version,
    about = "Rank-3 quiver mutation with real weights"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether the mutation class is bounded (exit 3 if not).
    Classify(QuiverArg),
    /// Print the trajectory of a mutation sequence as CSV.
    Mutate {
        #[command(flatten)]
        quiver: QuiverArg,
        /// Comma-separated vertices, applied left to right.
        #[arg(short, long, allow_hyphen_values = true)]
        sequence: String,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Emit a divergence certificate for an unbounded class.
    Witness {
        #[command(flatten)]
        quiver: QuiverArg,
        #[arg(long, default_value_t = 1e6, value_parser = parse_target)]
        target: f64,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Run a seeded random orbit and export it.
    Orbit {
        #[command(flatten)]
        quiver: QuiverArg,
        #[arg(short = 'n', long, default_value_t = 100, value_parser = parse_length)]
        length: usize,
        #[arg(long, env = "QMUT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Replay mutations in a geometric realization and compare with algebra.
    Geom {
        kind: GeomKind,
        /// JSON file `{"form": ..., "vectors": [[..], [..], [..]]}`.
        #[arg(short, long)]
        config: PathBuf,
        /// Explicit sequence; otherwise a random one of `--length`.
        #[arg(short, long, allow_hyphen_values = true)]
        sequence: Option<String>,
        #[arg(short = 'n', long, default_value_t = 100, value_parser = parse_length)]
        length: usize,
        #[arg(long, env = "QMUT_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct QuiverArg {
    /// Signed weights "b12,b23,b13".
    #[arg(short, long, allow_hyphen_values = true, value_parser = parse_quiver)]
    quiver: ExchangeTriple,
}

#[derive(Debug, Args)]
struct OutputArg {
    /// Write to this file instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GeomKind {
    Points,
    Lines,
}

fn parse_quiver(s: &str) -> Result<ExchangeTriple, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_target(s: &str) -> Result<f64, String> {
    let t: f64 = s
        .parse()
        .map_err(|_| format!("cannot parse target {s:?}"))?;
    if !t.is_finite() || t > MAX_TARGET {
        return Err(format!("target must be finite and at most {MAX_TARGET:e}"));
    }
    Ok(t)
}

fn parse_length(s: &str) -> Result<usize, String> {
    let n: usize = s
        .parse()
        .map_err(|_| format!("cannot parse length {s:?}"))?;
    if n > MAX_LENGTH {
        return Err(format!("length must be at most {MAX_LENGTH}"));
    }
    Ok(n)
}

fn parse_sequence(s: &str) -> Result<MutationSequence, Failure> {
    s.parse().map_err(Failure::from)
}

/// A failed command: exit code plus message for standard error.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e.root() {
            Error::Io { .. } => EXIT_IO,
            Error::Csv(c) if c.is_io_error() => EXIT_IO,
            Error::Json(j) if j.is_io() => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::new(EXIT_IO, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Failure {
        if e.is_io() {
            Failure::new(EXIT_IO, e.to_string())
        } else {
            Failure::new(EXIT_USAGE, e.to_string())
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Runs `qmut` with the given arguments (including the program name).
pub fn run_with_io<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Classify(q) => cmd_classify(&q.quiver, out),
        Command::Mutate {
            quiver,
            sequence,
            output,
        } => cmd_mutate(&quiver.quiver, &sequence, output.output.as_deref(), out),
        Command::Witness {
            quiver,
            target,
            output,
        } => cmd_witness(&quiver.quiver, target, output.output.as_deref(), out),
        Command::Orbit {
            quiver,
            length,
            seed,
            format,
            output,
        } => cmd_orbit(
            &quiver.quiver,
            length,
            seed,
            format,
            output.output.as_deref(),
            out,
            err,
        ),
        Command::Geom {
            kind,
            config,
            sequence,
            length,
            seed,
        } => cmd_geom(kind, &config, sequence.as_deref(), length, seed, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "qmut: {}", f.message);
            f.code
        }
    }
}

fn open_output(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

/// Calls `f` with either the file at `path` or `out`.
fn with_output(
    path: Option<&Path>,
    out: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<(), Failure>,
) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let mut file = open_output(p)?;
            f(&mut file)?;
            file.flush()
                .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", p.display())))
        }
        None => {
            f(out)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn write_json_line<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn cmd_classify(b: &ExchangeTriple, out: &mut dyn Write) -> Outcome {
    let cls = classify(b);
    write_json_line(out, &cls)?;
    out.flush()?;
    Ok(if cls.bounded { EXIT_OK } else { EXIT_UNBOUNDED })
}

fn cmd_mutate(
    b: &ExchangeTriple,
    sequence: &str,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let seq = parse_sequence(sequence)?;
    let records: Vec<OrbitRecord> = run_orbit(b, &seq).collect::<Result<_, _>>()?;
    with_output(path, out, |w| {
        let mut sink = CsvSink::new(w)?;
        for r in &records {
            sink.write(r)?;
        }
        sink.finish()?;
        Ok(())
    })?;
    Ok(EXIT_OK)
}

fn cmd_witness(
    b: &ExchangeTriple,
    target: f64,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let cls = classify(b);
    if cls.bounded {
        return Err(Failure::new(
            EXIT_BOUNDED_WITNESS,
            format!(
                "{b} has a bounded mutation class ({:?}, C = {}); every quiver in it has norm at most {}",
                cls.reason,
                cls.markov_c,
                cls.norm_bound.unwrap_or(f64::NAN)
            ),
        ));
    }
    let cert = divergence_witness(b, target)?;
    with_output(path, out, |w| write_json_line(w, &cert))?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_orbit(
    b: &ExchangeTriple,
    length: usize,
    seed: u64,
    format: Format,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let seq = random_alternating_sequence(length, seed);
    let mut summary = SummaryAccumulator::default();
    match format {
        Format::Csv => with_output(path, out, |w| {
            let mut sink = CsvSink::new(w)?;
            for record in run_orbit(b, &seq) {
                let record = record?;
                summary.push(&record);
                sink.write(&record)?;
            }
            sink.finish()?;
            Ok(())
        })?,
        Format::Json | Format::Svg => {
            let records: Vec<OrbitRecord> = run_orbit(b, &seq).collect::<Result<_, _>>()?;
            for r in &records {
                summary.push(r);
            }
            if format == Format::Json {
                let doc = OrbitDocument::new(*b, seed, seq.clone(), records);
                with_output(path, out, |w| write_json_line(w, &doc))?;
            } else {
                let svg = render_svg(&records)?;
                with_output(path, out, |w| Ok(w.write_all(svg.as_bytes())?))?;
            }
        }
    }
    let summary = summary.finish(seed)?;
    let _ = writeln!(err, "{}", serde_json::to_string(&summary)?);
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct GeomStep {
    i: usize,
    vertex: u8,
    weights: [f64; 3],
    /// Magnitudes after the same algebraic mutations; absent once they overflow.
    algebraic: Option<[f64; 3]>,
    exchange_ok: bool,
}

#[derive(Debug, Serialize)]
struct GeomReport {
    kind: &'static str,
    form: Form,
    steps: Vec<GeomStep>,
    max_weight: f64,
    min_weight: f64,
    max_relative_error: f64,
    /// Every step matches algebraic mutation within `1e-9` (magnitudes).
    agrees: bool,
    /// Every changed weight exceeds the previous changed weight.
    changed_weights_increasing: bool,
}

const AGREEMENT: f64 = 1e-9;

fn relative_gap(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

fn changed_slot(k: Vertex) -> usize {
    match k.get() {
        1 => 1,
        2 => 2,
        _ => 0,
    }
}

fn cmd_geom(
    kind: GeomKind,
    config: &Path,
    sequence: Option<&str>,
    length: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Outcome {
    let text = std::fs::read_to_string(config)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", config.display())))?;
    let cfg: GeometryConfig = serde_json::from_str(&text)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", config.display())))?;
    let form = cfg.form;
    let seq = match sequence {
        Some(s) => parse_sequence(s)?,
        None => random_alternating_sequence(length, seed),
    };

    // Each model supplies its weights, the matching quiver and a mutation step.
    type Step = Box<dyn FnMut(Vertex) -> [f64; 3]>;
    let (kind_name, mut weights, algebraic, mut step): (&str, [f64; 3], ExchangeTriple, Step) =
        match kind {
            GeomKind::Points => {
                let mut points = cfg.into_points()?;
                let w = point_weights(&points);
                let b = points_to_quiver(&points);
                (
                    "points",
                    w,
                    b,
                    Box::new(move |k| {
                        points = geom_mutate_points(&points, k);
                        point_weights(&points)
                    }),
                )
            }
            GeomKind::Lines => {
                let mut lines = cfg.into_lines()?;
                let w = lines.weights();
                let b = ExchangeTriple::acyclic(w[0], w[1], w[2])?;
                (
                    "lines",
                    w,
                    b,
                    Box::new(move |k| {
                        lines = geom_mutate_lines(&lines, k);
                        lines.weights()
                    }),
                )
            }
        };

    let mut algebraic = Some(algebraic);
    let mut steps = vec![GeomStep {
        i: 0,
        vertex: 0,
        weights,
        algebraic: algebraic.map(|b| b.magnitudes()),
        exchange_ok: true,
    }];
    let mut max_err = 0.0f64;
    let mut increasing = true;
    let mut last_changed: Option<f64> = None;
    for (n, &k) in seq.iter().enumerate() {
        let candidates = exchange_candidates(weights, k);
        let next = step(k);
        if next.iter().any(|w| !w.is_finite()) {
            return Err(Failure::new(
                EXIT_USAGE,
                format!("geometric weights overflowed at step {}", n + 1),
            ));
        }
        algebraic = algebraic.and_then(|b| mutate(&b, k).ok());
        let changed = next[changed_slot(k)];
        let exchange_ok = candidates
            .iter()
            .any(|c| (c - changed).abs() <= AGREEMENT * c.abs().max(changed.abs()).max(1.0));
        max_err = match algebraic {
            Some(b) => max_err.max(relative_gap(&next, &b.magnitudes())),
            None => f64::INFINITY,
        };
        if let Some(prev) = last_changed {
            increasing &= changed > prev;
        }
        last_changed = Some(changed);
        weights = next;
        steps.push(GeomStep {
            i: n + 1,
            vertex: k.get(),
            weights,
            algebraic: algebraic.map(|b| b.magnitudes()),
            exchange_ok,
        });
    }
    let all = steps.iter().flat_map(|s| s.weights);
    let (min_weight, max_weight) = all.fold((f64::INFINITY, 0.0f64), |(lo, hi), w| {
        (lo.min(w), hi.max(w))
    });
    let report = GeomReport {
        kind: kind_name,
        form,
        steps,
        max_weight,
        min_weight,
        max_relative_error: max_err,
        agrees: max_err <= AGREEMENT,
        changed_weights_increasing: increasing,
    };
    write_json_line(out, &report)?;
    out.flush()?;
    Ok(EXIT_OK)
}
