//! Boundedness of a mutation class, decided from a single representative.
//!
//! `[Q]` is bounded exactly when the largest weight `p` is at most 2 and the
//! Markov constant is at most 4. Bounded connected classes never leave the
//! ball of radius `sqrt(C)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quiver::{canonicalize, markov_constant, norm, ExchangeTriple, Orientation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reason {
    Bounded,
    MaxWeightExceedsTwo,
    MarkovConstantExceedsFour,
    BothExceeded,
    DisconnectedTriviallyBounded,
}

impl Reason {
    pub fn is_bounded(self) -> bool {
        matches!(self, Reason::Bounded | Reason::DisconnectedTriviallyBounded)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub bounded: bool,
    pub markov_c: f64,
    pub max_weight: f64,
    pub norm_bound: Option<f64>,
    pub reason: Reason,
    /// `(p - 2, C - 4)`; both nonpositive iff bounded (for connected input).
    pub boundary_margin: (f64, f64),
}

pub fn classify(b: &ExchangeTriple) -> Classification {
    let canon = canonicalize(b);
    let c = markov_constant(b);
    let margin = (canon.p - 2.0, c - 4.0);

    if !b.is_connected() {
        return Classification {
            bounded: true,
            markov_c: c,
            max_weight: canon.p,
            norm_bound: Some(norm(b)),
            reason: Reason::DisconnectedTriviallyBounded,
            boundary_margin: margin,
        };
    }

    let reason = match (canon.p <= 2.0, c <= 4.0) {
        (true, true) => Reason::Bounded,
        (false, true) => Reason::MaxWeightExceedsTwo,
        (true, false) => Reason::MarkovConstantExceedsFour,
        (false, false) => Reason::BothExceeded,
    };
    let bounded = reason.is_bounded();
    Classification {
        bounded,
        markov_c: c,
        max_weight: canon.p,
        norm_bound: bounded.then(|| c.sqrt()),
        reason,
        boundary_margin: margin,
    }
}

/// The cyclic quiver with all weights exactly 2.
pub fn is_markov_quiver(b: &ExchangeTriple) -> bool {
    let c = canonicalize(b);
    c.orientation == Orientation::Cyclic && c.p == 2.0 && c.q == 2.0 && c.r == 2.0
}

/// `sqrt(C(Q))`, an upper bound for the norm over a bounded connected class.
pub fn norm_bound(b: &ExchangeTriple) -> Result<f64> {
    if !b.is_connected() {
        return Err(Error::ContractViolation(format!(
            "norm bound requires a connected quiver, got {b}"
        )));
    }
    let cls = classify(b);
    if !cls.bounded {
        return Err(Error::ContractViolation(format!(
            "norm bound requires a bounded class, {b} is unbounded ({:?})",
            cls.reason
        )));
    }
    Ok(cls.markov_c.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{mutate, Vertex};
    use proptest::prelude::*;

    fn cyc(p: f64, q: f64, r: f64) -> ExchangeTriple {
        ExchangeTriple::cyclic(p, q, r).unwrap()
    }

    #[test]
    fn markov_quiver_is_bounded_at_the_boundary() {
        let c = classify(&cyc(2.0, 2.0, 2.0));
        assert!(c.bounded);
        assert_eq!(c.reason, Reason::Bounded);
        assert_eq!(c.markov_c, 4.0);
        assert_eq!(c.norm_bound, Some(2.0));
        assert_eq!(c.boundary_margin, (0.0, 0.0));
    }

    #[test]
    fn three_three_three_is_unbounded_despite_small_constant() {
        let c = classify(&cyc(3.0, 3.0, 3.0));
        assert!(!c.bounded);
        assert_eq!(c.reason, Reason::MaxWeightExceedsTwo);
        assert_eq!(c.markov_c, 0.0);
        assert_eq!(c.norm_bound, None);
    }

    #[test]
    fn figure_two_quiver() {
        let c = classify(&ExchangeTriple::new(-0.6, -0.43, 0.567).unwrap());
        assert!(c.bounded);
        assert!((c.markov_c - 0.720103).abs() < 1e-6);
        assert!((c.norm_bound.unwrap() - 0.848589).abs() < 1e-6);
    }

    #[test]
    fn large_constant_with_small_weights() {
        let c = classify(&cyc(2.0, 2.0, 0.5));
        assert!(!c.bounded);
        assert_eq!(c.reason, Reason::MarkovConstantExceedsFour);
        assert_eq!(c.markov_c, 6.25);
    }

    #[test]
    fn both_exceeded() {
        let c = classify(&ExchangeTriple::acyclic(3.0, 1.0, 1.0).unwrap());
        assert_eq!(c.reason, Reason::BothExceeded);
        assert!(c.boundary_margin.0 > 0.0 && c.boundary_margin.1 > 0.0);
    }

    #[test]
    fn disconnected_is_trivially_bounded() {
        let c = classify(&ExchangeTriple::new(0.0, 7.0, 0.0).unwrap());
        assert!(c.bounded);
        assert_eq!(c.reason, Reason::DisconnectedTriviallyBounded);
        assert_eq!(c.norm_bound, Some(7.0));
        let z = classify(&ExchangeTriple::ZERO);
        assert_eq!(z.reason, Reason::DisconnectedTriviallyBounded);
        assert_eq!(z.norm_bound, Some(0.0));
    }

    #[test]
    fn markov_detection_is_exact() {
        assert!(is_markov_quiver(
            &ExchangeTriple::new(2.0, 2.0, -2.0).unwrap()
        ));
        assert!(is_markov_quiver(
            &ExchangeTriple::new(-2.0, -2.0, 2.0).unwrap()
        ));
        assert!(!is_markov_quiver(
            &ExchangeTriple::new(2.0, 2.0, 2.0).unwrap()
        ));
        assert!(!is_markov_quiver(
            &ExchangeTriple::new(2.0, 2.0, -1.999).unwrap()
        ));
    }

    #[test]
    fn norm_bounds() {
        assert_eq!(norm_bound(&cyc(2.0, 2.0, 2.0)).unwrap(), 2.0);
        assert!((norm_bound(&cyc(0.6, 0.567, 0.43)).unwrap() - 0.848589).abs() < 1e-6);
        let b = ExchangeTriple::new(1.0, 1.0, 0.0).unwrap();
        assert!((norm_bound(&b).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            norm_bound(&cyc(3.0, 3.0, 3.0)),
            Err(Error::ContractViolation(_))
        ));
        assert!(matches!(
            norm_bound(&ExchangeTriple::new(1.0, 0.0, 0.0).unwrap()),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let c = classify(&cyc(2.0, 2.0, 0.5));
        let back: Classification =
            serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    proptest! {
        #[test]
        fn verdict_is_a_class_property(
            b12 in -4.0..4.0f64, b23 in -4.0..4.0f64, b13 in -4.0..4.0f64, k in 1i64..=3
        ) {
            let b = ExchangeTriple::new(b12, b23, b13).unwrap();
            let out = mutate(&b, Vertex::new(k).unwrap()).unwrap();
            let (before, after) = (classify(&b), classify(&out));
            // away from the boundary the verdict cannot flip
            let clear = before.boundary_margin.1.abs() >= 1e-6
                && after.boundary_margin.1.abs() >= 1e-6
                && b.is_connected();
            if clear {
                prop_assert_eq!(before.bounded, after.bounded);
            }
        }

        #[test]
        fn reason_matches_margins(b12 in -3.0..3.0f64, b23 in -3.0..3.0f64, b13 in -3.0..3.0f64) {
            let c = classify(&ExchangeTriple::new(b12, b23, b13).unwrap());
            prop_assert_eq!(c.bounded, c.reason.is_bounded());
            if c.reason == Reason::Bounded {
                prop_assert!(c.boundary_margin.0 <= 0.0 && c.boundary_margin.1 <= 0.0);
                prop_assert_eq!(c.norm_bound, Some(c.markov_c.sqrt()));
            }
        }
    }
}
