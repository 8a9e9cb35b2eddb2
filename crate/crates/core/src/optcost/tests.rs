use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::monoid::{TimedPvMonoid, TimedValuationMonoid, Weight};
use crate::rational::{int, q, Q};
use crate::rdl::Assignment;
use crate::timed::{ClockConstraint, Edge, TimedAutomaton, TimedWord};
use crate::wrdl::{parse_wrdl, wrdl_eval};
use crate::wta::{behavior, WeightedTimedAutomaton};

type E<'a> = (&'a str, &'a str, &'a str, &'a str, &'a [&'a str], &'a str, i64);

/// Priced automaton over `a` with edges `(id, src, label, guard, resets, dst, weight)`.
fn priced(clocks: &[&str], rates: &[(&str, Q)], init: &[&str], fin: &[&str], edges: &[E], m: TimedValuationMonoid) -> WeightedTimedAutomaton {
    let ta = TimedAutomaton::new(
        edges.iter().map(|e| e.2.to_string()).collect::<Vec<_>>(),
        rates.iter().map(|r| r.0.to_string()).collect::<Vec<_>>(),
        clocks.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        init.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        fin.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        edges
            .iter()
            .map(|(id, s, a, g, r, t, _)| Edge::new(*id, *s, *a, ClockConstraint::parse(g).unwrap(), r.iter().map(|c| c.to_string()), *t))
            .collect(),
    )
    .unwrap();
    let lw: BTreeMap<String, Weight> = rates.iter().map(|(l, r)| (l.to_string(), Weight::Rat(r.clone()))).collect();
    let ew: BTreeMap<String, Weight> = edges.iter().map(|e| (e.0.to_string(), Weight::rat(e.6))).collect();
    WeightedTimedAutomaton::new(ta, m, lw, ew).unwrap()
}

fn rate_three() -> WeightedTimedAutomaton {
    priced(&["x"], &[("p", int(3)), ("f", int(0))], &["p"], &["f"], &[("e", "p", "a", "x>=2", &[], "f", 1)], TimedValuationMonoid::sum())
}

fn rate_minus_one() -> WeightedTimedAutomaton {
    priced(&["x"], &[("p", int(-1)), ("f", int(0))], &["p"], &["f"], &[("e", "p", "a", "x<1", &[], "f", 0)], TimedValuationMonoid::sum())
}

fn bounded_average() -> WeightedTimedAutomaton {
    priced(&["x"], &[("p", int(3)), ("f", int(0))], &["p"], &["f"], &[("e", "p", "a", "x<=1", &[], "f", 0)], TimedValuationMonoid::avg())
}

fn word(pairs: &[(&str, Q)]) -> TimedWord {
    TimedWord::new(pairs.iter().map(|(a, t)| (a.to_string(), t.clone())).collect()).unwrap()
}

fn grid(letters: &[&str], max_len: usize, step: &Q, horizon: i64) -> Vec<TimedWord> {
    let mut delays = vec![Q::zero()];
    while delays.last().unwrap() < &int(horizon) {
        let next = delays.last().unwrap() + step;
        delays.push(next);
    }
    let mut words: Vec<Vec<(&str, Q)>> = vec![vec![]];
    let mut out = Vec::new();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &words {
            for a in letters {
                for d in &delays {
                    let mut v = w.clone();
                    v.push((*a, d.clone()));
                    out.push(word(&v));
                    next.push(v);
                }
            }
        }
        words = next;
    }
    out
}

fn grid_min(a: &WeightedTimedAutomaton, words: &[TimedWord]) -> Weight {
    words.iter().map(|w| behavior(a, w)).fold(Weight::Inf, |acc, v| acc.min(&v))
}

#[test]
fn infimum_examples() {
    assert_eq!(inf_cost(&rate_three()).unwrap(), CostBound::Finite(int(7)));
    assert_eq!(inf_cost(&rate_minus_one()).unwrap(), CostBound::Finite(int(-1)));
    let dead = priced(&["x"], &[("p", int(1)), ("f", int(0))], &["p"], &["f"], &[("e", "p", "a", "x>=2 & x<1", &[], "f", 0)], TimedValuationMonoid::sum());
    assert_eq!(inf_cost(&dead).unwrap(), CostBound::PosInf);
    let cycle = priced(
        &[],
        &[("p", int(0)), ("q", int(0))],
        &["p"],
        &["p"],
        &[("go", "p", "a", "true", &[], "q", 1), ("back", "q", "a", "true", &[], "p", -3)],
        TimedValuationMonoid::sum(),
    );
    assert_eq!(inf_cost(&cycle).unwrap(), CostBound::NegInf);
}

#[test]
fn guard_needs_two_unit_delays() {
    let a = rate_three();
    let g = build_corner_points(&a).unwrap();
    let opt = g.optimum();
    let unit = opt.path.iter().filter(|&&k| g.arcs[k].kind == ArcKind::Delay(1)).count();
    assert_eq!(unit, 2);
    let w = realize(&a, &g, &opt.path, &q(15, 2)).unwrap();
    assert_eq!(w.to_pairs(), vec![("a".to_string(), "2".to_string())]);
}

#[test]
fn clockless_automaton_has_one_region() {
    let a = priced(&[], &[("p", int(2)), ("f", int(0))], &["p"], &["f"], &[("e", "p", "a", "true", &[], "f", 5)], TimedValuationMonoid::sum());
    let g = build_corner_points(&a).unwrap();
    let regions: std::collections::BTreeSet<_> = g.nodes.iter().map(|n| n.region.clone()).collect();
    assert_eq!(regions.len(), 1);
    assert!(g.arcs.iter().any(|k| k.kind == ArcKind::Delay(1) && k.from == k.to && k.cost == int(2)));
    assert_eq!(inf_cost(&a).unwrap(), CostBound::Finite(int(5)));
}

#[test]
fn strict_guard_witness_stays_inside() {
    let a = rate_minus_one();
    let g = build_corner_points(&a).unwrap();
    let opt = g.optimum();
    let target = q(-9, 10);
    let w = realize(&a, &g, &g.path_below(&opt, &target).unwrap(), &target).unwrap();
    assert!(w.delay(0) < &int(1));
    assert!(behavior(&a, &w) < Weight::Rat(target));
}

#[test]
fn grid_search_approaches_infimum() {
    let step = q(1, 8);
    for a in [rate_three(), rate_minus_one()] {
        let CostBound::Finite(inf) = inf_cost(&a).unwrap() else { panic!() };
        let words = grid(&["a"], 2, &step, 4);
        let Weight::Rat(best) = grid_min(&a, &words) else { panic!() };
        assert!(best >= inf);
        assert!(&best - &inf <= q(1, 4), "{best} vs {inf}");
    }
}

fn random_priced(rng: &mut ChaCha8Rng) -> WeightedTimedAutomaton {
    let locs = ["p", "q", "r"];
    let rels = [">=", ">", "<", "<=", "=="];
    let mut edges: Vec<(String, String, String, String, Vec<&str>, String, i64)> = Vec::new();
    for k in 0..rng.gen_range(2..6) {
        let guard = if rng.gen_bool(0.3) {
            "true".to_string()
        } else {
            let rel = rels[rng.gen_range(0..rels.len())].replace("==", "=");
            format!("{}{}{}", ["x", "y"][rng.gen_range(0..2)], rel, rng.gen_range(0..3))
        };
        let resets: Vec<&str> = ["x", "y"].into_iter().filter(|_| rng.gen_bool(0.3)).collect();
        edges.push((
            format!("e{k}"),
            locs[rng.gen_range(0..3)].to_string(),
            ["a", "b"][rng.gen_range(0..2)].to_string(),
            guard,
            resets,
            locs[rng.gen_range(0..3)].to_string(),
            rng.gen_range(-2..4),
        ));
    }
    let rates: Vec<(&str, Q)> = locs.iter().map(|l| (*l, int(rng.gen_range(-1..4)))).collect();
    let refs: Vec<E> = edges.iter().map(|e| (e.0.as_str(), e.1.as_str(), e.2.as_str(), e.3.as_str(), e.4.as_slice(), e.5.as_str(), e.6)).collect();
    priced(&["x", "y"], &rates, &["p"], &["q", "r"], &refs, TimedValuationMonoid::sum())
}

#[test]
fn infimum_is_a_lower_bound_and_witnesses_are_real() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let words = grid(&["a", "b"], 2, &q(1, 2), 3);
    for _ in 0..40 {
        let a = random_priced(&mut rng);
        let g = build_corner_points(&a).unwrap();
        let opt = g.optimum();
        let best = grid_min(&a, &words);
        match &opt.bound {
            CostBound::Finite(v) => assert!(best >= Weight::Rat(v.clone())),
            CostBound::PosInf => assert!(best.is_inf()),
            CostBound::NegInf => {}
        }
        if let Weight::Rat(b) = &best {
            // anything the grid achieves, a realized witness beats too
            let target = b + int(1);
            let path = g.path_below(&opt, &target).expect("grid word beats the target");
            let w = realize(&a, &g, &path, &target).unwrap();
            assert!(behavior(&a, &w) < Weight::Rat(target));
        }
    }
}

#[test]
fn average_reduction_identity() {
    let a = bounded_average();
    let theta = int(4);
    let shifted = shift_for_average(&a, &theta).unwrap();
    for t in [q(1, 3), q(1, 2), int(1), q(3, 2)] {
        let w = word(&[("a", t)]);
        let avg_below = behavior(&a, &w) < Weight::Rat(theta.clone());
        let sum_below = behavior(&shifted, &w) < Weight::rat(0);
        assert_eq!(avg_below, sum_below);
    }
    let d = avg_threshold_automaton(&a, &theta).unwrap();
    assert!(d.exists);
    assert_eq!(d.infimum, CostBound::Finite(int(-1)));
    assert!(behavior(&a, d.witness.as_ref().unwrap()) < Weight::Rat(theta));
    assert!(!avg_threshold_automaton(&a, &int(3)).unwrap().exists);
}

const SUM_FIXTURE: &str = "EX X. all x.(B(dpast[>=2](X,x)) & 3, B(dpast[>=2](X,x)) & 1)";

fn sigma_a() -> Vec<String> {
    vec!["a".into()]
}

#[test]
fn sum_threshold_fixture() {
    let m = TimedPvMonoid::sum0();
    let phi = parse_wrdl(SUM_FIXTURE, &m).unwrap();
    let no = decide_sum_threshold(&phi, &sigma_a(), &int(7)).unwrap();
    assert!(!no.exists && no.witness.is_none());
    assert_eq!(no.infimum, CostBound::Finite(int(7)));
    let yes = decide_sum_threshold(&phi, &sigma_a(), &q(15, 2)).unwrap();
    assert!(yes.exists);
    let w = yes.witness.unwrap();
    assert_eq!(w.to_pairs(), vec![("a".to_string(), "2".to_string())]);
    assert!(wrdl_eval(&phi, &w, &Assignment::new(), &m).unwrap() < Weight::Rat(q(15, 2)));
}

#[test]
fn sum_threshold_is_monotone() {
    let phi = parse_wrdl(SUM_FIXTURE, &TimedPvMonoid::sum0()).unwrap();
    for (n, d) in [(6, 1), (27, 4), (7, 1), (71, 10), (8, 1), (20, 1)] {
        let theta = q(n, d);
        assert_eq!(decide_sum_threshold(&phi, &sigma_a(), &theta).unwrap().exists, theta > int(7));
    }
}

#[test]
fn constant_infinity_never_beats_threshold() {
    for s in ["B(false)", "all x.(inf, inf)"] {
        let phi = parse_wrdl(s, &TimedPvMonoid::sum0()).unwrap();
        assert!(!decide_sum_threshold(&phi, &sigma_a(), &int(1000)).unwrap().exists, "{s}");
        let phi = parse_wrdl(s, &TimedPvMonoid::avg0()).unwrap();
        assert!(!decide_avg_threshold(&phi, &sigma_a(), &int(1000)).unwrap().exists, "{s}");
    }
}

#[test]
fn average_sentence_pipeline_agrees_with_composed_automaton() {
    let m = TimedPvMonoid::sum0();
    let sigma = vec!["a".to_string(), "b".to_string()];
    let s = "all x.(B(P[a](x)) & 1 | B(P[b](x)) & 2, B(P[a](x)) & 0 | B(P[b](x)) & 1)";
    let phi = parse_wrdl(s, &m).unwrap();
    let a = compose_sentence(&phi, &sigma, &m).unwrap().unwrap();
    let CostBound::Finite(inf) = inf_cost(&a).unwrap() else { panic!() };
    assert_eq!(inf, int(0));
    assert!(!decide_sum_threshold(&phi, &sigma, &inf).unwrap().exists);
    let d = decide_sum_threshold(&phi, &sigma, &q(1, 2)).unwrap();
    assert!(d.exists);
    assert!(wrdl_eval(&phi, &d.witness.unwrap(), &Assignment::new(), &m).unwrap() < Weight::Rat(q(1, 2)));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let n = rng.gen_range(1..4);
        let w = TimedWord::new((0..n).map(|_| (sigma[rng.gen_range(0..2)].clone(), q(rng.gen_range(0..6), 2))).collect()).unwrap();
        assert_eq!(behavior(&a, &w), wrdl_eval(&phi, &w, &Assignment::new(), &m).unwrap(), "{w}");
    }
}

#[test]
fn average_threshold_fixture() {
    let m = TimedPvMonoid::avg0();
    let phi = parse_wrdl(SUM_FIXTURE, &m).unwrap();
    let no = decide_avg_threshold(&phi, &sigma_a(), &int(3)).unwrap();
    assert!(!no.exists);
    assert_eq!(no.infimum, CostBound::Finite(int(1)));
    let yes = decide_avg_threshold(&phi, &sigma_a(), &q(31, 10)).unwrap();
    assert!(yes.exists);
    assert_eq!(yes.infimum, CostBound::NegInf);
    let w = yes.witness.unwrap();
    assert!(wrdl_eval(&phi, &w, &Assignment::new(), &m).unwrap() < Weight::Rat(q(31, 10)));
}

#[test]
fn composed_sentence_with_sets_matches_logic() {
    let m = TimedPvMonoid::sum0();
    let sigma = vec!["a".to_string(), "b".to_string()];
    for s in [
        SUM_FIXTURE,
        "EX X. all x.(B(dpast[<1](X,x)) & 2 | B(P[b](x)) & 1, B(X(x)) & 1 | 0)",
        "B(ex x. P[b](x)) & all y.(B(P[a](y)) & 1 | B(P[b](y)) & 3, 2)",
    ] {
        let phi = parse_wrdl(s, &m).unwrap();
        let a = compose_sentence(&phi, &sigma, &m).unwrap().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..15 {
            let n = rng.gen_range(1..3);
            let w = TimedWord::new((0..n).map(|_| (sigma[rng.gen_range(0..2)].clone(), q(rng.gen_range(0..7), 2))).collect()).unwrap();
            assert_eq!(behavior(&a, &w), wrdl_eval(&phi, &w, &Assignment::new(), &m).unwrap(), "{s} on {w}");
        }
    }
}

#[test]
fn positions_compared_with_the_universal_variable_are_unsupported() {
    let m = TimedPvMonoid::sum0();
    let phi = parse_wrdl("ex z. all y.(B(z <= y) & 1 | B(P[a](z)), 0)", &m).unwrap();
    let err = compose_sentence(&phi, &["a".to_string()], &m).unwrap_err();
    assert!(matches!(err, crate::error::Error::Unsupported(_)), "{err}");
}

#[test]
fn non_strict_verdict_needs_an_attained_infimum() {
    let m = TimedPvMonoid::sum0();
    let phi = parse_wrdl(SUM_FIXTURE, &m).unwrap();
    let d = decide_sum_threshold(&phi, &["a".to_string()], &int(7)).unwrap();
    assert!(!d.exists && d.exists_at_most());
    let w = d.witness_at_most().unwrap();
    assert_eq!(wrdl_eval(&phi, w, &Assignment::new(), &m).unwrap(), Weight::rat(7));

    // −t over t < 1: the infimum −1 sits on a strict guard
    let d = sum_threshold_automaton(&rate_minus_one(), &int(-1)).unwrap();
    assert_eq!(d.infimum, CostBound::Finite(int(-1)));
    assert!(!d.exists && !d.exists_at_most() && d.attained.is_none());

    let d = sum_threshold_automaton(&rate_three(), &int(7)).unwrap();
    assert!(d.exists_at_most());
    assert_eq!(behavior(&rate_three(), d.attained.as_ref().unwrap()), Weight::rat(7));
}
