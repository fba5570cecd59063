//! Rank-3 quivers with real weights, stored as the upper triangle of their
//! skew-symmetric exchange matrix.
//!
//! A triple `(b12, b23, b13)` stands for the matrix
//!
//! ```text
//!     [   0   b12  b13 ]
//! B = [ -b12   0   b23 ]
//!     [ -b13 -b23   0  ]
//! ```
//!
//! A positive `b12` is an arrow `1 -> 2` of weight `b12`, a negative one the
//! reversed arrow. Everything else (sorted weights, orientation, the Markov
//! constant) is derived from this signed form.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex label in `{1, 2, 3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Vertex(u8);

impl Vertex {
    pub const ONE: Vertex = Vertex(1);
    pub const TWO: Vertex = Vertex(2);
    pub const THREE: Vertex = Vertex(3);
    pub const ALL: [Vertex; 3] = [Vertex::ONE, Vertex::TWO, Vertex::THREE];

    pub fn new(index: i64) -> Result<Vertex> {
        match index {
            1..=3 => Ok(Vertex(index as u8)),
            _ => Err(Error::InvalidVertex(index)),
        }
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }

    /// The two vertices other than `self`, in increasing order.
    pub fn others(self) -> (Vertex, Vertex) {
        match self.0 {
            1 => (Vertex::TWO, Vertex::THREE),
            2 => (Vertex::ONE, Vertex::THREE),
            _ => (Vertex::ONE, Vertex::TWO),
        }
    }
}

impl TryFrom<i64> for Vertex {
    type Error = Error;

    fn try_from(value: i64) -> Result<Vertex> {
        Vertex::new(value)
    }
}

impl From<Vertex> for u8 {
    fn from(v: Vertex) -> u8 {
        v.0
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One of the three vertex pairs of a rank-3 quiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Edge {
    E12,
    E23,
    E13,
}

impl Edge {
    pub const ALL: [Edge; 3] = [Edge::E12, Edge::E23, Edge::E13];

    /// Endpoints in increasing order.
    pub fn endpoints(self) -> (Vertex, Vertex) {
        match self {
            Edge::E12 => (Vertex::ONE, Vertex::TWO),
            Edge::E23 => (Vertex::TWO, Vertex::THREE),
            Edge::E13 => (Vertex::ONE, Vertex::THREE),
        }
    }

    /// The edge not incident to `k`; mutation at `k` changes exactly this edge.
    pub fn opposite(k: Vertex) -> Edge {
        match k.0 {
            1 => Edge::E23,
            2 => Edge::E13,
            _ => Edge::E12,
        }
    }

    /// The vertex not incident to this edge.
    pub fn opposite_vertex(self) -> Vertex {
        match self {
            Edge::E12 => Vertex::THREE,
            Edge::E23 => Vertex::ONE,
            Edge::E13 => Vertex::TWO,
        }
    }

    pub fn between(i: Vertex, j: Vertex) -> Edge {
        debug_assert_ne!(i, j);
        match (i.0.min(j.0), i.0.max(j.0)) {
            (1, 2) => Edge::E12,
            (2, 3) => Edge::E23,
            _ => Edge::E13,
        }
    }

    pub fn contains(self, v: Vertex) -> bool {
        let (a, b) = self.endpoints();
        a == v || b == v
    }

    #[inline]
    fn slot(self) -> usize {
        match self {
            Edge::E12 => 0,
            Edge::E23 => 1,
            Edge::E13 => 2,
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.endpoints();
        write!(f, "{{{a},{b}}}")
    }
}

/// Signed exchange-matrix entries `(b12, b23, b13)`; always finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTriple")]
pub struct ExchangeTriple {
    b12: f64,
    b23: f64,
    b13: f64,
}

#[derive(Deserialize)]
struct RawTriple {
    b12: f64,
    b23: f64,
    b13: f64,
}

impl TryFrom<RawTriple> for ExchangeTriple {
    type Error = Error;

    fn try_from(raw: RawTriple) -> Result<Self> {
        ExchangeTriple::new(raw.b12, raw.b23, raw.b13)
    }
}

impl ExchangeTriple {
    pub fn new(b12: f64, b23: f64, b13: f64) -> Result<ExchangeTriple> {
        ExchangeTriple::from_weights([b12, b23, b13])
    }

    /// Weights indexed as `[b12, b23, b13]`.
    pub fn from_weights(w: [f64; 3]) -> Result<ExchangeTriple> {
        for edge in Edge::ALL {
            let value = w[edge.slot()];
            if !value.is_finite() {
                return Err(Error::NonFinite { edge, value });
            }
        }
        Ok(ExchangeTriple {
            b12: w[0],
            b23: w[1],
            b13: w[2],
        })
    }

    /// The cyclic quiver `1 -> 2 -> 3 -> 1` with weights `p`, `q`, `r` on
    /// edges `{1,2}`, `{2,3}`, `{1,3}`.
    pub fn cyclic(p: f64, q: f64, r: f64) -> Result<ExchangeTriple> {
        ExchangeTriple::new(p, q, -r)
    }

    /// The acyclic quiver with arrows `1 -> 2`, `2 -> 3`, `1 -> 3`.
    pub fn acyclic(p: f64, q: f64, r: f64) -> Result<ExchangeTriple> {
        ExchangeTriple::new(p, q, r)
    }

    pub const ZERO: ExchangeTriple = ExchangeTriple {
        b12: 0.0,
        b23: 0.0,
        b13: 0.0,
    };

    #[inline]
    pub fn b12(&self) -> f64 {
        self.b12
    }

    #[inline]
    pub fn b23(&self) -> f64 {
        self.b23
    }

    #[inline]
    pub fn b13(&self) -> f64 {
        self.b13
    }

    #[inline]
    pub fn weights(&self) -> [f64; 3] {
        [self.b12, self.b23, self.b13]
    }

    #[inline]
    pub fn magnitudes(&self) -> [f64; 3] {
        [self.b12.abs(), self.b23.abs(), self.b13.abs()]
    }

    /// Signed weight of an edge, oriented from its lower to its higher endpoint.
    #[inline]
    pub fn weight(&self, edge: Edge) -> f64 {
        self.weights()[edge.slot()]
    }

    /// Matrix entry `B[i][j]` with the skew-symmetric completion.
    pub fn entry(&self, i: Vertex, j: Vertex) -> f64 {
        if i == j {
            return 0.0;
        }
        let w = self.weight(Edge::between(i, j));
        if i < j {
            w
        } else {
            -w
        }
    }

    /// Number of edges with a nonzero weight.
    pub fn nonzero_count(&self) -> usize {
        self.weights().iter().filter(|w| **w != 0.0).count()
    }

    /// At least two arrows, i.e. the underlying graph is connected.
    pub fn is_connected(&self) -> bool {
        self.nonzero_count() >= 2
    }

    /// The edge of largest magnitude; ties go to the first of `{1,2}`,
    /// `{2,3}`, `{1,3}`.
    pub fn max_edge(&self) -> Edge {
        let m = self.magnitudes();
        let mut best = Edge::E12;
        for edge in [Edge::E23, Edge::E13] {
            if m[edge.slot()] > m[best.slot()] {
                best = edge;
            }
        }
        best
    }
}

impl fmt::Display for ExchangeTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.b12, self.b23, self.b13)
    }
}

impl FromStr for ExchangeTriple {
    type Err = Error;

    /// Parses `"b12,b23,b13"`.
    fn from_str(s: &str) -> Result<ExchangeTriple> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "expected three comma-separated weights, got {s:?}"
            )));
        }
        let mut w = [0.0; 3];
        for (slot, part) in w.iter_mut().zip(&parts) {
            *slot = part
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse weight {part:?}")))?;
        }
        ExchangeTriple::from_weights(w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Cyclic,
    Acyclic,
}

/// Unsigned weights sorted `p >= q >= r >= 0` plus orientation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub orientation: Orientation,
}

/// A list of mutation vertices, applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MutationSequence(Vec<Vertex>);

impl MutationSequence {
    pub fn new(vertices: Vec<Vertex>) -> MutationSequence {
        MutationSequence(vertices)
    }

    pub fn push(&mut self, v: Vertex) {
        self.0.push(v);
    }

    pub fn into_inner(self) -> Vec<Vertex> {
        self.0
    }
}

impl Deref for MutationSequence {
    type Target = [Vertex];

    fn deref(&self) -> &[Vertex] {
        &self.0
    }
}

impl From<Vec<Vertex>> for MutationSequence {
    fn from(v: Vec<Vertex>) -> Self {
        MutationSequence(v)
    }
}

impl FromIterator<Vertex> for MutationSequence {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        MutationSequence(iter.into_iter().collect())
    }
}

impl FromStr for MutationSequence {
    type Err = Error;

    /// Parses `"2,3,1"`; the empty string is the empty sequence.
    fn from_str(s: &str) -> Result<MutationSequence> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(MutationSequence::default());
        }
        s.split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<i64>()
                    .map_err(|_| Error::InvalidArgument(format!("cannot parse vertex {tok:?}")))
                    .and_then(Vertex::new)
            })
            .collect()
    }
}

impl fmt::Display for MutationSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, v) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[inline]
fn negate(w: f64) -> f64 {
    // keep exact zeros as +0.0
    if w == 0.0 {
        0.0
    } else {
        -w
    }
}

/// Mutation at vertex `k`.
///
/// Edges at `k` are reversed; the opposite edge `{i,j}` becomes
/// `b_ij + (|b_ik| b_kj + b_ik |b_kj|) / 2`.
pub fn mutate(b: &ExchangeTriple, k: Vertex) -> Result<ExchangeTriple> {
    let changed = Edge::opposite(k);
    let (i, j) = changed.endpoints();
    let bik = b.entry(i, k);
    let bkj = b.entry(k, j);
    let value = b.weight(changed) + (bik.abs() * bkj + bik * bkj.abs()) / 2.0;
    if !value.is_finite() {
        return Err(Error::NonFinite {
            edge: changed,
            value,
        });
    }
    let mut w = b.weights();
    for edge in Edge::ALL {
        w[edge.slot()] = if edge == changed {
            value
        } else {
            negate(w[edge.slot()])
        };
    }
    Ok(ExchangeTriple {
        b12: w[0],
        b23: w[1],
        b13: w[2],
    })
}

/// True iff the arrows form a directed 3-cycle (all weights nonzero).
pub fn is_cyclic(b: &ExchangeTriple) -> bool {
    let (x, y, z) = (b.b12, b.b23, -b.b13);
    if x == 0.0 || y == 0.0 || z == 0.0 {
        return false;
    }
    (x > 0.0) == (y > 0.0) && (y > 0.0) == (z > 0.0)
}

pub fn orientation(b: &ExchangeTriple) -> Orientation {
    if is_cyclic(b) {
        Orientation::Cyclic
    } else {
        Orientation::Acyclic
    }
}

pub fn canonicalize(b: &ExchangeTriple) -> CanonicalForm {
    let mut m = b.magnitudes();
    m.sort_by(|x, y| y.total_cmp(x));
    CanonicalForm {
        p: m[0],
        q: m[1],
        r: m[2],
        orientation: orientation(b),
    }
}

/// `C(Q) = p^2 + q^2 + r^2 -/+ pqr`, minus for cyclic quivers.
pub fn markov_constant(b: &ExchangeTriple) -> f64 {
    let CanonicalForm {
        p,
        q,
        r,
        orientation,
    } = canonicalize(b);
    let squares = p * p + q * q + r * r;
    match orientation {
        Orientation::Cyclic => squares - p * q * r,
        Orientation::Acyclic => squares + p * q * r,
    }
}

/// `p^2 + q^2 + r^2 + pqr`: the size of the terms entering
/// [`markov_constant`], used as the scale for relative drift.
pub fn markov_scale(b: &ExchangeTriple) -> f64 {
    let [p, q, r] = b.magnitudes();
    p * p + q * q + r * r + p * q * r
}

/// `max(|b12|, |b23|, |b13|)`.
pub fn norm(b: &ExchangeTriple) -> f64 {
    let [x, y, z] = b.magnitudes();
    x.max(y).max(z)
}

/// The trajectory `[B, mu_{i1}(B), mu_{i2} mu_{i1}(B), ...]`.
pub fn mutate_sequence(b: &ExchangeTriple, seq: &[Vertex]) -> Result<Vec<ExchangeTriple>> {
    let mut out = Vec::with_capacity(seq.len() + 1);
    out.push(*b);
    let mut current = *b;
    for (n, &k) in seq.iter().enumerate() {
        current = mutate(&current, k).map_err(|e| Error::at_step(n + 1, e))?;
        out.push(current);
    }
    Ok(out)
}
