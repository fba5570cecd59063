//! Explicit divergence witnesses for unbounded mutation classes.
//!
//! Two growth mechanisms are used. If a cyclic representative has a weight
//! `p0 > 2`, alternating mutations at the two ends of that edge make the
//! other two weights grow at least like `P^i q0` with `P = p0^2 - p0 - 1`.
//! Otherwise `C > 4` and repeatedly mutating at the vertex opposite the
//! smallest weight (the mu-star iteration) keeps `p q - r` above
//! `(C/4)^floor((i+2)/2) q0`.
//!
//! Every step of a certificate carries the monitored quantity and, where the
//! theory provides one, the lower bound it was checked against.

use std::cmp::Ordering;
use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::classify::classify;
use crate::error::{Error, Result};
use crate::quiver::{
    canonicalize, is_cyclic, markov_constant, mutate, mutate_sequence, norm, Edge, ExchangeTriple,
    MutationSequence, Vertex,
};

/// Weights above this abort an iteration.
pub const WEIGHT_LIMIT: f64 = 1e300;
/// Largest accepted target norm.
pub const MAX_TARGET: f64 = 1e12;
pub const DEFAULT_STEP_BUDGET: usize = 10_000;
/// Alternating mutations allowed while looking for an acyclic representative.
pub const PROBE_SEARCH_CAP: usize = 10_000;

const REPLAY_TOLERANCE: f64 = 1e-9;
const GROWTH_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    AcyclicPrefixThenAlternating,
    Alternating,
    MuStar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateStep {
    pub i: usize,
    /// 0 for the starting quiver.
    pub vertex: u8,
    pub b12: f64,
    pub b23: f64,
    pub b13: f64,
    pub norm: f64,
    /// The quantity the bound applies to; `None` on prefix steps.
    pub monitored: Option<f64>,
    pub bound: Option<f64>,
}

impl CertificateStep {
    fn new(i: usize, vertex: Option<Vertex>, b: &ExchangeTriple) -> CertificateStep {
        CertificateStep {
            i,
            vertex: vertex.map_or(0, Vertex::get),
            b12: b.b12(),
            b23: b.b23(),
            b13: b.b13(),
            norm: norm(b),
            monitored: None,
            bound: None,
        }
    }

    pub fn triple(&self) -> Result<ExchangeTriple> {
        ExchangeTriple::new(self.b12, self.b23, self.b13)
    }

    fn norm_on(&self, edge: Edge) -> f64 {
        match edge {
            Edge::E12 => self.b12.abs(),
            Edge::E23 => self.b23.abs(),
            Edge::E13 => self.b13.abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceCertificate {
    pub strategy: Strategy,
    pub sequence: MutationSequence,
    pub target: f64,
    pub achieved_norm: f64,
    /// Mutations spent reaching a cyclic representative before the growth phase.
    pub prefix_len: usize,
    /// False when the mu-star bounds are recorded outside the regime where
    /// they are proven (some starting weight above 2).
    pub guaranteed: bool,
    /// `q0` of the cyclic representative.
    pub base: f64,
    /// Growth factor: `P` for alternating, `C/4` for mu-star.
    pub ratio: f64,
    pub steps: Vec<CertificateStep>,
}

impl DivergenceCertificate {
    /// Replays the sequence from `original` and rechecks every recorded
    /// triple, norm and bound.
    pub fn verify(&self, original: &ExchangeTriple) -> Result<()> {
        let path = mutate_sequence(original, &self.sequence)?;
        if path.len() != self.steps.len() {
            return Err(Error::CertificateViolation {
                step: 0,
                detail: format!(
                    "{} steps recorded for a sequence of length {}",
                    self.steps.len(),
                    self.sequence.len()
                ),
            });
        }
        for (step, b) in self.steps.iter().zip(&path) {
            let recorded = step.triple()?;
            for edge in Edge::ALL {
                let (x, y) = (recorded.weight(edge), b.weight(edge));
                if (x - y).abs() > REPLAY_TOLERANCE * x.abs().max(y.abs()) {
                    return Err(Error::CertificateViolation {
                        step: step.i,
                        detail: format!("replayed {b} differs from recorded {recorded}"),
                    });
                }
            }
            if let (Some(m), Some(bound)) = (step.monitored, step.bound) {
                let ok = match self.strategy {
                    Strategy::MuStar => !self.guaranteed || m > bound,
                    _ => m >= bound * (1.0 - GROWTH_SLACK),
                };
                if !ok {
                    return Err(Error::CertificateViolation {
                        step: step.i,
                        detail: format!("monitored value {m} below bound {bound}"),
                    });
                }
            }
        }
        let last = norm(path.last().expect("trajectory is never empty"));
        if (last - self.achieved_norm).abs() > REPLAY_TOLERANCE * last.max(self.achieved_norm) {
            return Err(Error::CertificateViolation {
                step: self.sequence.len(),
                detail: format!(
                    "replay reaches norm {last}, certificate claims {}",
                    self.achieved_norm
                ),
            });
        }
        if self.achieved_norm < self.target {
            return Err(Error::CertificateViolation {
                step: self.sequence.len(),
                detail: format!(
                    "norm {} short of target {}",
                    self.achieved_norm, self.target
                ),
            });
        }
        Ok(())
    }

    pub fn final_triple(&self) -> Result<ExchangeTriple> {
        self.steps
            .last()
            .expect("certificate has a starting step")
            .triple()
    }
}

fn check_target(target: f64) -> Result<()> {
    if !target.is_finite() || target > MAX_TARGET {
        return Err(Error::InvalidArgument(format!(
            "target must be finite and at most {MAX_TARGET:e}, got {target}"
        )));
    }
    Ok(())
}

fn guarded_mutate(b: &ExchangeTriple, k: Vertex, step: usize) -> Result<ExchangeTriple> {
    let out = mutate(b, k).map_err(|e| Error::at_step(step, e))?;
    for edge in Edge::ALL {
        let value = out.weight(edge);
        if value.abs() > WEIGHT_LIMIT {
            return Err(Error::at_step(
                step,
                Error::OutOfRange {
                    edge,
                    value,
                    limit: WEIGHT_LIMIT,
                },
            ));
        }
    }
    Ok(out)
}

/// Mutations leading from a connected quiver to a cyclic one without
/// lowering the norm; at most three are needed.
pub fn acyclic_to_cyclic(b: &ExchangeTriple) -> Result<(MutationSequence, ExchangeTriple)> {
    if !b.is_connected() {
        return Err(Error::ContractViolation(format!(
            "a cyclic representative requires a connected quiver, got {b}"
        )));
    }
    if is_cyclic(b) {
        return Ok((MutationSequence::default(), *b));
    }
    let floor = norm(b);
    let mut queue = VecDeque::from([(Vec::<Vertex>::new(), *b)]);
    while let Some((seq, current)) = queue.pop_front() {
        for k in Vertex::ALL {
            if seq.last() == Some(&k) {
                continue;
            }
            let Ok(next) = mutate(&current, k) else {
                continue;
            };
            let mut path = seq.clone();
            path.push(k);
            if is_cyclic(&next) && norm(&next) >= floor {
                return Ok((path.into(), next));
            }
            if path.len() < 3 {
                queue.push_back((path, next));
            }
        }
    }
    Err(Error::ContractViolation(format!(
        "no cyclic quiver within three mutations of {b}"
    )))
}

struct Builder {
    sequence: MutationSequence,
    steps: Vec<CertificateStep>,
    current: ExchangeTriple,
    budget: usize,
}

impl Builder {
    fn start(b: &ExchangeTriple, budget: usize) -> Builder {
        Builder {
            sequence: MutationSequence::default(),
            steps: vec![CertificateStep::new(0, None, b)],
            current: *b,
            budget,
        }
    }

    fn push(&mut self, k: Vertex) -> Result<&mut CertificateStep> {
        if self.sequence.len() >= self.budget {
            return Err(Error::StepBudgetExhausted(self.budget));
        }
        let i = self.sequence.len() + 1;
        self.current = guarded_mutate(&self.current, k, i)?;
        self.sequence.push(k);
        self.steps
            .push(CertificateStep::new(i, Some(k), &self.current));
        Ok(self.steps.last_mut().expect("just pushed"))
    }

    fn norm(&self) -> f64 {
        norm(&self.current)
    }

    fn finish(
        self,
        strategy: Strategy,
        target: f64,
        prefix_len: usize,
        guaranteed: bool,
        base: f64,
        ratio: f64,
    ) -> DivergenceCertificate {
        DivergenceCertificate {
            strategy,
            achieved_norm: norm(&self.current),
            sequence: self.sequence,
            target,
            prefix_len,
            guaranteed,
            base,
            ratio,
            steps: self.steps,
        }
    }
}

struct AlternatingPlan {
    first: Vertex,
    second: Vertex,
    p0: f64,
    q0: f64,
}

fn alternating_plan(b: &ExchangeTriple) -> Result<AlternatingPlan> {
    if !is_cyclic(b) {
        return Err(Error::ContractViolation(format!(
            "alternating blow-up requires a cyclic quiver, got {b}"
        )));
    }
    let max_edge = b.max_edge();
    let p0 = b.weight(max_edge).abs();
    if p0 <= 2.0 {
        return Err(Error::ContractViolation(format!(
            "alternating blow-up requires a weight above 2, largest is {p0}"
        )));
    }
    let (x, y) = max_edge.endpoints();
    let c = max_edge.opposite_vertex();
    let wx = b.weight(Edge::between(x, c)).abs();
    let wy = b.weight(Edge::between(y, c)).abs();
    // start at the end of the max edge shared with the second largest weight
    let (first, second, q0) = if wx >= wy { (x, y, wx) } else { (y, x, wy) };
    Ok(AlternatingPlan {
        first,
        second,
        p0,
        q0,
    })
}

fn run_alternating(
    mut builder: Builder,
    plan: &AlternatingPlan,
    target: f64,
    prefix_len: usize,
) -> Result<DivergenceCertificate> {
    let ratio = plan.p0 * plan.p0 - plan.p0 - 1.0;
    let q0 = plan.q0;
    {
        let head = builder.steps.last_mut().expect("starting step");
        head.monitored = Some(q0);
        head.bound = Some(q0);
    }
    let mut previous = q0;
    let mut j = 0usize;
    while builder.norm() < target {
        j += 1;
        let k = if j % 2 == 1 { plan.first } else { plan.second };
        let step = builder.push(k)?;
        let value = step.norm_on(Edge::opposite(k));
        // odd steps produce r_i, even steps q_i
        let i = j.div_ceil(2) as i32;
        let bound = if j % 2 == 1 {
            ratio.powi(i - 1) * q0
        } else {
            ratio.powi(i) * q0
        };
        step.monitored = Some(value);
        step.bound = Some(bound);
        if !(previous > 0.0 && value > previous) {
            return Err(Error::CertificateViolation {
                step: step.i,
                detail: format!("chain not increasing: {value} after {previous}"),
            });
        }
        if value < bound * (1.0 - GROWTH_SLACK) {
            return Err(Error::CertificateViolation {
                step: step.i,
                detail: format!("weight {value} below growth bound {bound}"),
            });
        }
        previous = value;
    }
    let strategy = if prefix_len > 0 {
        Strategy::AcyclicPrefixThenAlternating
    } else {
        Strategy::Alternating
    };
    Ok(builder.finish(strategy, target, prefix_len, true, q0, ratio))
}

/// Alternates mutations at the two ends of the largest edge of a cyclic
/// quiver whose largest weight exceeds 2.
pub fn alternating_blowup(b: &ExchangeTriple, target: f64) -> Result<DivergenceCertificate> {
    alternating_blowup_with_budget(b, target, DEFAULT_STEP_BUDGET)
}

pub fn alternating_blowup_with_budget(
    b: &ExchangeTriple,
    target: f64,
    max_steps: usize,
) -> Result<DivergenceCertificate> {
    check_target(target)?;
    let plan = alternating_plan(b)?;
    run_alternating(Builder::start(b, max_steps), &plan, target, 0)
}

/// One mu-star move: mutate at the vertex opposite the edge of smallest
/// magnitude, ties going to the smallest vertex.
pub fn mu_star_step(b: &ExchangeTriple) -> Result<(Vertex, ExchangeTriple)> {
    if !is_cyclic(b) {
        return Err(Error::ContractViolation(format!(
            "mu-star step requires a cyclic quiver, got {b}"
        )));
    }
    let k = mu_star_vertex(b);
    Ok((k, mutate(b, k)?))
}

fn mu_star_vertex(b: &ExchangeTriple) -> Vertex {
    let mut best = Vertex::ONE;
    for k in [Vertex::TWO, Vertex::THREE] {
        if b.weight(Edge::opposite(k)).abs() < b.weight(Edge::opposite(best)).abs() {
            best = k;
        }
    }
    best
}

fn mu_star_monitored(b: &ExchangeTriple) -> f64 {
    let c = canonicalize(b);
    c.p * c.q - c.r
}

fn run_mu_star(
    mut builder: Builder,
    target: f64,
    prefix_len: usize,
) -> Result<DivergenceCertificate> {
    let start = builder.current;
    if !is_cyclic(&start) {
        return Err(Error::ContractViolation(format!(
            "mu-star blow-up requires a cyclic quiver, got {start}"
        )));
    }
    let c = markov_constant(&start);
    if c <= 4.0 {
        return Err(Error::ContractViolation(format!(
            "mu-star blow-up requires C > 4, got {c}"
        )));
    }
    let canon = canonicalize(&start);
    let guaranteed = canon.p <= 2.0;
    let (q0, ratio) = (canon.q, c / 4.0);
    let bound_at = |i: usize| ratio.powi(((i + 2) / 2) as i32) * q0;

    let check = |step: &mut CertificateStep, value: f64, bound: f64| -> Result<()> {
        step.monitored = Some(value);
        step.bound = Some(bound);
        if guaranteed && value.partial_cmp(&bound) != Some(Ordering::Greater) {
            return Err(Error::CertificateViolation {
                step: step.i,
                detail: format!("p q - r = {value} does not exceed {bound}"),
            });
        }
        Ok(())
    };

    let head = builder.steps.last_mut().expect("starting step");
    check(head, mu_star_monitored(&start), bound_at(0))?;
    let mut i = 0usize;
    while builder.norm() < target {
        let before = builder.norm();
        let current = builder.current;
        if !is_cyclic(&current) {
            return Err(Error::at_step(
                builder.sequence.len(),
                Error::ContractViolation(format!("mu-star left the cyclic regime at {current}")),
            ));
        }
        let k = mu_star_vertex(&current);
        i += 1;
        let step = builder.push(k)?;
        let now = step.norm;
        let value = mu_star_monitored(&step.triple()?);
        check(step, value, bound_at(i))?;
        if guaranteed && now < before {
            return Err(Error::CertificateViolation {
                step: builder.sequence.len(),
                detail: format!("norm decreased from {before} to {now}"),
            });
        }
    }
    Ok(builder.finish(Strategy::MuStar, target, prefix_len, guaranteed, q0, ratio))
}

/// Iterates [`mu_star_step`] from a cyclic quiver with `C > 4` until the
/// norm reaches `target`.
pub fn mu_star_blowup(b: &ExchangeTriple, target: f64) -> Result<DivergenceCertificate> {
    mu_star_blowup_with_budget(b, target, DEFAULT_STEP_BUDGET)
}

pub fn mu_star_blowup_with_budget(
    b: &ExchangeTriple,
    target: f64,
    max_steps: usize,
) -> Result<DivergenceCertificate> {
    check_target(target)?;
    run_mu_star(Builder::start(b, max_steps), target, 0)
}

/// A certified sequence from `b` to a quiver of norm at least `target`.
/// Fails with a contract violation on bounded classes.
pub fn divergence_witness(b: &ExchangeTriple, target: f64) -> Result<DivergenceCertificate> {
    divergence_witness_with_budget(b, target, DEFAULT_STEP_BUDGET)
}

pub fn divergence_witness_with_budget(
    b: &ExchangeTriple,
    target: f64,
    max_steps: usize,
) -> Result<DivergenceCertificate> {
    check_target(target)?;
    let cls = classify(b);
    if cls.bounded {
        return Err(Error::ContractViolation(format!(
            "{b} has a bounded mutation class ({:?}); no witness exists",
            cls.reason
        )));
    }
    let (prefix, _) = acyclic_to_cyclic(b)?;
    let mut builder = Builder::start(b, max_steps);
    for &k in prefix.iter() {
        builder.push(k)?;
    }
    let prefix_len = prefix.len();
    if canonicalize(&builder.current).p > 2.0 {
        let plan = alternating_plan(&builder.current)?;
        run_alternating(builder, &plan, target, prefix_len)
    } else {
        run_mu_star(builder, target, prefix_len)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeOutcome {
    /// Ran the requested number of rounds.
    Completed,
    /// The last round grew the weight by less than `1e-12`.
    Stalled,
    /// Alternating at the ends of the largest edge never reached an acyclic
    /// quiver within the search cap.
    NoAcyclicRepresentative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRound {
    pub triple: ExchangeTriple,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    /// `rounds[0]` is the input.
    pub rounds: Vec<ProbeRound>,
    pub outcome: ProbeOutcome,
}

impl ProbeReport {
    pub fn max_weight(&self) -> f64 {
        self.rounds.iter().map(|r| r.norm).fold(0.0, f64::max)
    }
}

/// A vertex is in the middle of an acyclic triangle when one of its arrows
/// comes in and the other goes out.
fn is_middle(b: &ExchangeTriple, v: Vertex) -> bool {
    let (x, y) = v.others();
    b.entry(x, v) * b.entry(v, y) > 0.0
}

/// Experimental search for the supremum of a bounded class: bring the
/// largest edge `{a,b}` into an acyclic quiver by alternating at `a` and `b`,
/// then mutate at the third vertex so that the edge grows to `p + q r`.
pub fn sharpness_probe(b: &ExchangeTriple, iterations: usize) -> Result<ProbeReport> {
    let cls = classify(b);
    if !cls.bounded {
        return Err(Error::ContractViolation(format!(
            "sharpness probe requires a bounded class, {b} is unbounded"
        )));
    }
    if !b.is_connected() {
        return Err(Error::ContractViolation(format!(
            "sharpness probe requires a connected quiver, got {b}"
        )));
    }
    if cls.markov_c <= 0.0 {
        return Err(Error::ContractViolation(format!(
            "sharpness probe requires C > 0, got {}",
            cls.markov_c
        )));
    }

    let edge = b.max_edge();
    let (a, bb) = edge.endpoints();
    let c = edge.opposite_vertex();
    let mut current = *b;
    let mut rounds = vec![ProbeRound {
        triple: current,
        norm: norm(&current),
    }];
    let mut previous_qr: Option<f64> = None;

    for round in 1..=iterations {
        let mut turn = a;
        let mut spent = 0;
        while is_cyclic(&current) {
            if spent == PROBE_SEARCH_CAP {
                return Ok(ProbeReport {
                    rounds,
                    outcome: ProbeOutcome::NoAcyclicRepresentative,
                });
            }
            current = mutate(&current, turn)?;
            turn = if turn == a { bb } else { a };
            spent += 1;
        }

        let p = current.weight(edge).abs();
        let q = current.weight(Edge::between(a, c)).abs();
        let r = current.weight(Edge::between(bb, c)).abs();
        let qr = q * q + r * r;
        if let Some(prev) = previous_qr {
            if qr.partial_cmp(&prev) != Some(Ordering::Less) {
                return Err(Error::CertificateViolation {
                    step: round,
                    detail: format!("q^2 + r^2 = {qr} did not shrink below {prev}"),
                });
            }
        }
        previous_qr = Some(qr);

        if !is_middle(&current, c) {
            let extremal = if is_middle(&current, a) { bb } else { a };
            current = mutate(&current, extremal)?;
        }
        current = mutate(&current, c)?;

        let grown = current.weight(edge).abs();
        rounds.push(ProbeRound {
            triple: current,
            norm: norm(&current),
        });
        if grown - p < 1e-12 {
            return Ok(ProbeReport {
                rounds,
                outcome: ProbeOutcome::Stalled,
            });
        }
    }
    Ok(ProbeReport {
        rounds,
        outcome: ProbeOutcome::Completed,
    })
}
