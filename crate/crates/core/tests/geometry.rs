use proptest::prelude::*;

use qmut_core::geometry::{
    exchange_candidates, geom_mutate_lines, geom_mutate_points, line_relation, point_distance,
    point_weights, points_to_quiver, realize_points_from_distances, reflect_line, rotate_point_pi,
    Form, GeometryConfig, HVector, LineConfig, LineRelation, PointConfig,
};
use qmut_core::{mutate, norm, random_alternating_sequence, Edge, ExchangeTriple, Vertex};

fn slot(e: Edge) -> usize {
    Edge::ALL.iter().position(|&x| x == e).unwrap()
}

fn point_at(d: f64, angle: f64) -> HVector {
    HVector::hyperbolic([d.sinh() * angle.cos(), d.sinh() * angle.sin(), d.cosh()]).unwrap()
}

fn hyperbolic_normal(d: f64, angle: f64) -> HVector {
    HVector::hyperbolic([d.cosh() * angle.cos(), d.cosh() * angle.sin(), d.sinh()]).unwrap()
}

/// Realizable triangles, either with a coincident pair or with every side
/// at least `0.005`; nearly coincident points start next to the Markov
/// quiver, where mutation amplifies rounding far beyond the tolerance.
fn distances() -> impl Strategy<Value = (f64, f64, f64)> {
    prop_oneof![
        1 => (0.05f64..1.5).prop_map(|a| (a, 0.0, a)),
        9 => (0.05f64..1.5, 0.05f64..1.5, 0.05f64..=1.0).prop_map(|(a, b, t)| {
            let lo = (a - b).abs();
            (a, b, lo + t * (a + b - lo))
        }),
    ]
}

const WALK_CAP: f64 = 100.0;

/// Non-backtracking choice that keeps weights below the cap when possible;
/// uncapped walks overflow within a few dozen steps.
fn capped_choice(coin: bool, prev: Option<Vertex>, b: &ExchangeTriple) -> Vertex {
    let (x, y) = prev.map_or((Vertex::ONE, Vertex::TWO), Vertex::others);
    let (pick, other) = if coin { (x, y) } else { (y, x) };
    let grown = |k: Vertex| norm(&mutate(b, k).unwrap());
    if grown(pick) <= WALK_CAP || grown(pick) <= grown(other) {
        pick
    } else {
        other
    }
}

proptest! {
    #[test]
    fn isometries_preserve_the_form(
        (d1, t1) in (0.0f64..2.0, 0.0f64..6.3),
        (d2, t2) in (0.0f64..2.0, 0.0f64..6.3),
        (d3, t3) in (0.0f64..2.0, 0.0f64..6.3),
        (dm, tm) in (0.0f64..2.0, 0.0f64..6.3),
    ) {
        let (a, b, c) = (point_at(d1, t1), point_at(d2, t2), point_at(d3, t3));
        let before = a.dot(&b);
        let (ra, rb) = (rotate_point_pi(&a, &c), rotate_point_pi(&b, &c));
        prop_assert!((ra.dot(&rb) - before).abs() <= 1e-12 * before.abs().max(1.0) * 10.0);

        let m = hyperbolic_normal(dm, tm);
        let (fa, fb) = (reflect_line(&a, &m), reflect_line(&b, &m));
        let scale = before.abs().max(m.x.iter().map(|v| v * v).sum::<f64>());
        prop_assert!((fa.dot(&fb) - before).abs() <= 1e-12 * scale * 10.0);
    }

    #[test]
    fn point_model_agrees_with_algebra(
        (d12, d23, d13) in distances(),
        coins in prop::collection::vec(any::<bool>(), 50),
    ) {
        let mut cfg = realize_points_from_distances(d12, d23, d13).unwrap();
        let mut b = points_to_quiver(&cfg);
        let mut prev = None;
        for coin in coins {
            let k = capped_choice(coin, prev, &b);
            prev = Some(k);
            let before = point_weights(&cfg);
            cfg = geom_mutate_points(&cfg, k);
            b = mutate(&b, k).unwrap();
            let after = point_weights(&cfg);
            for e in Edge::ALL {
                let (g, a) = (after[slot(e)], b.weight(e).abs());
                prop_assert!(g >= 2.0);
                prop_assert!((g - a).abs() <= 1e-9 * g.max(a), "{g} vs {a}");
            }
            let changed = Edge::opposite(k);
            let (i, j) = changed.endpoints();
            let product = before[slot(Edge::between(i, k))] * before[slot(Edge::between(k, j))];
            let err = (after[slot(changed)] + before[slot(changed)] - product).abs();
            prop_assert!(err <= 1e-12 * product, "relative {:e}, before {:?}, after {:?}, k {:?}", err / product, before, after, k);
        }
    }

    #[test]
    fn line_exchange_membership(
        (d1, t1) in (0.0f64..1.0, 0.0f64..6.3),
        (d2, t2) in (0.0f64..1.0, 0.0f64..6.3),
        (d3, t3) in (0.0f64..1.0, 0.0f64..6.3),
        seed in any::<u64>(),
    ) {
        let mut cfg = LineConfig::new([
            hyperbolic_normal(d1, t1),
            hyperbolic_normal(d2, t2),
            hyperbolic_normal(d3, t3),
        ]).unwrap();
        for &k in random_alternating_sequence(8, seed).iter() {
            let before = cfg.weights();
            cfg = geom_mutate_lines(&cfg, k);
            let after = cfg.weights();
            if after.iter().any(|w| *w >= 1e6) {
                break;
            }
            let changed = after[slot(Edge::opposite(k))];
            let hit = exchange_candidates(before, k)
                .iter()
                .any(|c| (c - changed).abs() <= 1e-9 * c.abs().max(changed).max(1.0));
            prop_assert!(hit, "{changed} not in {:?}", exchange_candidates(before, k));
            for e in Edge::ALL {
                if e != Edge::opposite(k) {
                    prop_assert!((after[slot(e)] - before[slot(e)]).abs() <= 1e-9 * before[slot(e)].max(1.0), "{:?} -> {:?} at {:?}", before, after, k);
                }
            }
        }
    }
}

#[test]
fn spherical_lines_stay_below_two() {
    let s = 0.5f64.sqrt();
    let mut cfg = LineConfig::new([
        HVector::spherical([1.0, 0.0, 0.0]).unwrap(),
        HVector::spherical([s, s, 0.0]).unwrap(),
        HVector::spherical([0.0, 0.6, 0.8]).unwrap(),
    ])
    .unwrap();
    for &k in random_alternating_sequence(5_000, 9).iter() {
        cfg = geom_mutate_lines(&cfg, k);
        assert!(
            cfg.weights().iter().all(|&w| w <= 2.0),
            "{:?}",
            cfg.weights()
        );
    }
}

#[test]
fn disjoint_lines_diverge() {
    let third = 2.0 * std::f64::consts::PI / 3.0;
    let mut cfg =
        LineConfig::new([0.0, third, 2.0 * third].map(|t| hyperbolic_normal(0.8, t))).unwrap();
    for e in Edge::ALL {
        let (i, j) = e.endpoints();
        assert!(matches!(
            line_relation(cfg.normal(i), cfg.normal(j)).unwrap(),
            LineRelation::Disjoint { .. }
        ));
    }
    let mut previous = 0.0f64;
    let mut n = 0;
    loop {
        let k = if n % 2 == 0 { Vertex::ONE } else { Vertex::TWO };
        let next = geom_mutate_lines(&cfg, k);
        let w = next.weights()[slot(Edge::opposite(k))];
        if !w.is_finite() || w > 1e300 {
            break;
        }
        assert!(w > previous, "step {n}: {w} after {previous}");
        previous = w;
        cfg = next;
        n += 1;
    }
    assert!(previous > 1e6);
}

#[test]
fn rotating_pair_pushes_third_point_away() {
    // a1 and a2 at distance t; alternating rotations translate by 2t per round
    let t = 0.7;
    let mut cfg = realize_points_from_distances(t, 1.0, 1.2).unwrap();
    let mut d_prev = f64::NEG_INFINITY;
    let mut rounds = Vec::new();
    for n in 0..2000 {
        let k = if n % 2 == 0 { Vertex::ONE } else { Vertex::TWO };
        let next = geom_mutate_points(&cfg, k);
        let w = point_weights(&next)[slot(Edge::opposite(k))];
        if !w.is_finite() || w > 1e300 {
            break;
        }
        let d = (w / 2.0).acosh();
        assert!(d > d_prev, "distance {d} after {d_prev}");
        if n % 2 == 1 {
            rounds.push(d);
        }
        d_prev = d;
        cfg = next;
    }
    assert!(d_prev > 600.0);
    for w in rounds.windows(2).skip(5) {
        assert!(
            w[1] - w[0] >= 2.0 * t - 1e-6,
            "round growth {}",
            w[1] - w[0]
        );
    }
}

#[test]
fn coincident_points_fix_the_markov_quiver() {
    let origin = HVector::ORIGIN;
    let mut cfg = PointConfig::new([origin; 3]).unwrap();
    assert_eq!(
        points_to_quiver(&cfg),
        ExchangeTriple::cyclic(2.0, 2.0, 2.0).unwrap()
    );
    for &k in random_alternating_sequence(100, 2).iter() {
        cfg = geom_mutate_points(&cfg, k);
        assert_eq!(point_weights(&cfg), [2.0; 3]);
    }
}

#[test]
fn realized_points_have_the_requested_distances() {
    let cfg = realize_points_from_distances(0.4, 0.9, 1.1).unwrap();
    let p = cfg.points();
    for (i, j, d) in [(0, 1, 0.4), (1, 2, 0.9), (0, 2, 1.1)] {
        assert!((point_distance(&p[i], &p[j]).unwrap() - d).abs() < 1e-12);
    }
    let b = points_to_quiver(&cfg);
    assert!((norm(&b) - 2.0 * 1.1f64.cosh()).abs() < 1e-12);
}

#[test]
fn config_files_round_trip() {
    let cfg = realize_points_from_distances(0.3, 0.5, 0.6).unwrap();
    let json = serde_json::to_string(&GeometryConfig::from(cfg)).unwrap();
    let back: GeometryConfig = serde_json::from_str(&json).unwrap();
    assert_eq!(back.form, Form::Hyperbolic);
    assert_eq!(back.into_points().unwrap(), cfg);
}
