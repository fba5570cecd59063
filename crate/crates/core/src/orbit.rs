//! Random mutation orbits: sequence generation, lazy trajectories, summary
//! statistics and CSV/JSON export.
//!
//! Sequences come from SplitMix64 seeded directly with the user seed. The
//! first vertex is `1 + (x % 3)`; every later vertex picks between the two
//! vertices other than its predecessor (in increasing order) using the top
//! bit of the next output. This makes a `(seed, length)` pair reproducible
//! in any language.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, Classification};
use crate::error::{Error, Result};
use crate::quiver::{
    markov_constant, markov_scale, mutate, norm, ExchangeTriple, MutationSequence, Vertex,
};

pub const CSV_HEADER: [&str; 6] = ["step", "vertex", "b12", "b23", "b13", "norm"];

pub fn random_alternating_sequence(length: usize, seed: u64) -> MutationSequence {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut out = Vec::with_capacity(length);
    if length == 0 {
        return out.into();
    }
    let mut prev = Vertex::ALL[(rng.next_u64() % 3) as usize];
    out.push(prev);
    for _ in 1..length {
        let (lo, hi) = prev.others();
        prev = if rng.next_u64() >> 63 == 0 { lo } else { hi };
        out.push(prev);
    }
    out.into()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub step: usize,
    /// 0 for the initial quiver.
    pub vertex: u8,
    pub triple: ExchangeTriple,
    pub norm: f64,
    pub markov_c: f64,
}

impl OrbitRecord {
    pub fn new(step: usize, vertex: Option<Vertex>, triple: ExchangeTriple) -> OrbitRecord {
        OrbitRecord {
            step,
            vertex: vertex.map_or(0, Vertex::get),
            triple,
            norm: norm(&triple),
            markov_c: markov_constant(&triple),
        }
    }
}

/// Lazy trajectory of `b` under `seq`; yields `seq.len() + 1` records, or
/// stops after the first error.
pub struct Orbit<'a> {
    current: ExchangeTriple,
    seq: &'a [Vertex],
    step: usize,
    done: bool,
}

pub fn run_orbit<'a>(b: &ExchangeTriple, seq: &'a [Vertex]) -> Orbit<'a> {
    Orbit {
        current: *b,
        seq,
        step: 0,
        done: false,
    }
}

impl Iterator for Orbit<'_> {
    type Item = Result<OrbitRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.step == 0 {
            self.step = 1;
            if self.seq.is_empty() {
                self.done = true;
            }
            return Some(Ok(OrbitRecord::new(0, None, self.current)));
        }
        let k = self.seq[self.step - 1];
        match mutate(&self.current, k) {
            Ok(next) => {
                self.current = next;
                let record = OrbitRecord::new(self.step, Some(k), next);
                self.step += 1;
                if self.step > self.seq.len() {
                    self.done = true;
                }
                Some(Ok(record))
            }
            Err(e) => {
                self.done = true;
                Some(Err(Error::at_step(self.step, e)))
            }
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        if self.done {
            return (0, Some(0));
        }
        let left = self.seq.len() + 1 - self.step;
        (0, Some(left))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub max_norm: f64,
    pub argmax_step: usize,
    pub final_triple: ExchangeTriple,
    /// Largest `|C_i - C_0| / max(S_0, S_i)` where `S` is the sum of the
    /// absolute terms of the Markov constant.
    pub markov_drift: f64,
    /// Number of mutations.
    pub length: usize,
    pub seed: u64,
}

/// Running summary, for orbits too long to keep in memory.
#[derive(Clone, Debug, Default)]
pub struct SummaryAccumulator {
    first: Option<(f64, f64)>,
    max_norm: f64,
    argmax_step: usize,
    last: Option<OrbitRecord>,
    markov_drift: f64,
}

impl SummaryAccumulator {
    pub fn push(&mut self, record: &OrbitRecord) {
        let scale = markov_scale(&record.triple);
        match self.first {
            None => {
                self.first = Some((record.markov_c, scale));
                self.max_norm = record.norm;
                self.argmax_step = record.step;
            }
            Some((c0, s0)) => {
                let denom = s0.max(scale);
                if denom > 0.0 {
                    self.markov_drift = self.markov_drift.max((record.markov_c - c0).abs() / denom);
                }
                if record.norm > self.max_norm {
                    self.max_norm = record.norm;
                    self.argmax_step = record.step;
                }
            }
        }
        self.last = Some(*record);
    }

    pub fn finish(&self, seed: u64) -> Result<OrbitSummary> {
        let last = self.last.ok_or_else(|| {
            Error::InvalidArgument("orbit summary of an empty record list".into())
        })?;
        Ok(OrbitSummary {
            max_norm: self.max_norm,
            argmax_step: self.argmax_step,
            final_triple: last.triple,
            markov_drift: self.markov_drift,
            length: last.step,
            seed,
        })
    }
}

pub fn orbit_summary(records: &[OrbitRecord], seed: u64) -> Result<OrbitSummary> {
    let mut acc = SummaryAccumulator::default();
    for r in records {
        acc.push(r);
    }
    acc.finish(seed)
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Streams records as CSV; values carry 17 significant digits.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(inner: W) -> Result<CsvSink<W>> {
        let mut writer = csv::Writer::from_writer(inner);
        writer.write_record(CSV_HEADER)?;
        Ok(CsvSink { writer })
    }

    pub fn write(&mut self, r: &OrbitRecord) -> Result<()> {
        self.writer.write_record([
            r.step.to_string(),
            r.vertex.to_string(),
            sci(r.triple.b12()),
            sci(r.triple.b23()),
            sci(r.triple.b13()),
            sci(r.norm),
        ])?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.writer.flush().map_err(|e| Error::io("<csv>", e))?;
        self.writer
            .into_inner()
            .map_err(|e| Error::io("<csv>", io::Error::other(e.to_string())))
    }
}

pub fn write_csv<W: Write>(records: &[OrbitRecord], out: W) -> Result<W> {
    let mut sink = CsvSink::new(out)?;
    for r in records {
        sink.write(r)?;
    }
    sink.finish()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        Error::Csv(c) => match c.into_kind() {
            csv::ErrorKind::Io(source) => Error::io(path, source),
            other => Error::InvalidArgument(format!("{}: {other:?}", path.display())),
        },
        other => other,
    })
}

pub fn export_csv(records: &[OrbitRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let out = create(path)?;
    let mut out = with_path(path, write_csv(records, out))?;
    out.flush().map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub step: usize,
    pub vertex: u8,
    pub b12: f64,
    pub b23: f64,
    pub b13: f64,
    pub norm: f64,
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidArgument(format!(
            "unexpected CSV header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    Ok(reader.deserialize().collect::<Result<_, _>>()?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitDocument {
    pub initial: ExchangeTriple,
    pub seed: u64,
    pub sequence: MutationSequence,
    pub classification: Classification,
    pub records: Vec<OrbitRecord>,
}

impl OrbitDocument {
    pub fn new(
        initial: ExchangeTriple,
        seed: u64,
        sequence: MutationSequence,
        records: Vec<OrbitRecord>,
    ) -> Self {
        OrbitDocument {
            initial,
            seed,
            sequence,
            classification: classify(&initial),
            records,
        }
    }
}

pub fn write_json<W: Write>(doc: &OrbitDocument, mut out: W) -> Result<W> {
    serde_json::to_writer_pretty(&mut out, doc)?;
    out.write_all(b"\n").map_err(|e| Error::io("<json>", e))?;
    Ok(out)
}

pub fn export_json(doc: &OrbitDocument, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let out = create(path)?;
    let mut out = with_path(path, write_json(doc, out))?;
    out.flush().map_err(|e| Error::io(path, e))
}
