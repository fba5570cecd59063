use proptest::prelude::*;

use qmut_core::quiver::markov_scale;
use qmut_core::{
    canonicalize, classify, divergence_witness, is_cyclic, is_markov_quiver, markov_constant,
    mutate, mutate_sequence, norm, norm_bound, random_alternating_sequence, run_orbit,
    sharpness_probe, Edge, ExchangeTriple, ProbeOutcome, Strategy as Growth, Vertex,
};

fn weight(max: f64) -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(0.0),
        8 => -max..max,
    ]
}

fn triple(max: f64) -> impl Strategy<Value = ExchangeTriple> {
    (weight(max), weight(max), weight(max))
        .prop_map(|(a, b, c)| ExchangeTriple::new(a, b, c).unwrap())
}

fn vertex() -> impl Strategy<Value = Vertex> {
    prop::sample::select(Vertex::ALL.to_vec())
}

fn magnitudes() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.01f64..5.0, 0.01f64..5.0, 0.01f64..5.0)
}

proptest! {
    #[test]
    fn exchange_value_law((p, q, r) in magnitudes(), cyclic in any::<bool>()) {
        // p on {1,2}, q on {2,3}: vertex 2 lies between them, r sits on {1,3}
        let b = if cyclic {
            ExchangeTriple::cyclic(p, q, r).unwrap()
        } else {
            ExchangeTriple::acyclic(p, q, r).unwrap()
        };
        let m = mutate(&b, Vertex::TWO).unwrap();
        let expected = if cyclic { (p * q - r).abs() } else { p * q + r };
        let got = m.weight(Edge::E13).abs();
        prop_assert!((got - expected).abs() <= 1e-12 * expected.max(p * q).max(1.0));
        prop_assert_eq!(m.weight(Edge::E12).abs(), p);
        prop_assert_eq!(m.weight(Edge::E23).abs(), q);
    }

    #[test]
    fn markov_constant_per_step(b in triple(50.0), k in vertex()) {
        let m = mutate(&b, k).unwrap();
        let drift = (markov_constant(&m) - markov_constant(&b)).abs();
        prop_assert!(drift <= 1e-9 * markov_scale(&b).max(markov_scale(&m)).max(1.0));
    }

    #[test]
    fn verdict_is_a_class_property(b in triple(4.0), seq in prop::collection::vec(vertex(), 0..8)) {
        let path = mutate_sequence(&b, &seq).unwrap();
        let c0 = classify(&b);
        for q in &path {
            let c = classify(q);
            let clear = |m: (f64, f64)| m.1.abs() >= 1e-6;
            if clear(c0.boundary_margin) && clear(c.boundary_margin) && b.is_connected() {
                prop_assert_eq!(c.bounded, c0.bounded, "{} vs {}", b, q);
            }
        }
    }

    #[test]
    fn stream_matches_batch(b in triple(3.0), len in 0usize..200, seed in any::<u64>()) {
        let seq = random_alternating_sequence(len, seed);
        prop_assert!(seq.windows(2).all(|w| w[0] != w[1]));
        let batch = mutate_sequence(&b, &seq);
        let streamed: Result<Vec<_>, _> = run_orbit(&b, &seq).collect();
        match (batch, streamed) {
            (Ok(batch), Ok(records)) => {
                prop_assert_eq!(batch.len(), records.len());
                for (x, r) in batch.iter().zip(&records) {
                    prop_assert_eq!(*x, r.triple);
                }
            }
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "batch {:?} vs stream {:?}", x.is_ok(), y.is_ok()),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        max_global_rejects: 100_000,
        ..ProptestConfig::default()
    })]

    #[test]
    fn bounded_orbits_stay_below_root_c(b in triple(2.0), seed in any::<u64>()) {
        let cls = classify(&b);
        prop_assume!(cls.bounded && b.is_connected());
        let limit = norm_bound(&b).unwrap() + 1e-6;
        prop_assert!((limit - 1e-6 - cls.markov_c.sqrt()).abs() < 1e-12);
        for r in run_orbit(&b, &random_alternating_sequence(10_000, seed)) {
            let r = r.unwrap();
            prop_assert!(r.norm <= limit, "{} reaches {} at step {}", b, r.norm, r.step);
        }
    }

    #[test]
    fn witnesses_replay(b in triple(6.0)) {
        prop_assume!(!classify(&b).bounded && b.is_connected());
        let cert = divergence_witness(&b, 1e6).unwrap();
        cert.verify(&b).unwrap();
        let path = mutate_sequence(&b, &cert.sequence).unwrap();
        prop_assert_eq!(path.len(), cert.steps.len());
        for (q, s) in path.iter().zip(&cert.steps) {
            let rec = s.triple().unwrap();
            for e in Edge::ALL {
                let (x, y) = (q.weight(e), rec.weight(e));
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(y.abs()));
            }
        }
        let last = norm(path.last().unwrap());
        prop_assert!((last - cert.achieved_norm).abs() <= 1e-9 * last);

        let grow = &cert.steps[cert.prefix_len..];
        prop_assert!(is_cyclic(&grow[0].triple().unwrap()));
        match cert.strategy {
            Growth::MuStar => {
                let c = markov_constant(&grow[0].triple().unwrap());
                prop_assert!(c > 4.0);
                for (i, s) in grow.iter().enumerate() {
                    let f = canonicalize(&s.triple().unwrap());
                    let bound = (c / 4.0).powi(((i + 2) / 2) as i32) * cert.base;
                    prop_assert!(f.p * f.q - f.r > bound);
                }
                prop_assert!(grow.windows(2).all(|w| w[1].norm >= w[0].norm));
            }
            _ => {
                let chain: Vec<f64> = grow.iter().map(|s| s.monitored.unwrap()).collect();
                prop_assert!(chain[0] > 0.0);
                prop_assert!(chain.windows(2).all(|w| w[1] > w[0]));
                for (j, &v) in chain.iter().enumerate().skip(2).step_by(2) {
                    let bound = cert.ratio.powi((j / 2) as i32) * cert.base;
                    prop_assert!(v >= bound * (1.0 - 1e-12));
                }
            }
        }
    }

    #[test]
    fn probe_stays_below_root_c(b in triple(2.0)) {
        let cls = classify(&b);
        prop_assume!(cls.bounded && b.is_connected() && cls.markov_c > 0.0);
        let report = sharpness_probe(&b, 50).unwrap();
        let limit = cls.markov_c.sqrt() + 1e-6;
        let mut running = 0.0f64;
        for r in &report.rounds {
            prop_assert!(r.norm <= limit);
            prop_assert!(running.max(r.norm) >= running);
            running = running.max(r.norm);
        }
        prop_assert!(report.max_weight() <= limit);
    }
}

#[test]
fn markov_quivers_are_bounded() {
    for s in [1.0, -1.0] {
        let b = ExchangeTriple::new(2.0 * s, 2.0 * s, -2.0 * s).unwrap();
        assert!(is_markov_quiver(&b));
        assert!(is_cyclic(&b));
        let c = classify(&b);
        assert!(c.bounded);
        assert_eq!(c.markov_c, 4.0);
    }
    assert!(!is_markov_quiver(
        &ExchangeTriple::new(2.0, 2.0, 2.0).unwrap()
    ));
}

#[test]
fn markov_quiver_orbit_keeps_weights() {
    let b = ExchangeTriple::cyclic(2.0, 2.0, 2.0).unwrap();
    for r in run_orbit(&b, &random_alternating_sequence(1000, 5)) {
        assert_eq!(r.unwrap().triple.magnitudes(), [2.0; 3]);
    }
}

#[test]
fn probe_reaches_root_c_on_a_figure_quiver() {
    let b = ExchangeTriple::new(-0.6, -0.43, 0.567).unwrap();
    let report = sharpness_probe(&b, 200).unwrap();
    let root_c = markov_constant(&b).sqrt();
    assert!(report.max_weight() <= root_c + 1e-6);
    assert!(report.max_weight() > norm(&b));
    assert_ne!(report.outcome, ProbeOutcome::NoAcyclicRepresentative);
}
