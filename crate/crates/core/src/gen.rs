//! Seeded random instances for differential testing: automata, words and
//! syntactically restricted sentences.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::monoid::{TimedPvMonoid, TimedValuationMonoid, ValKind, Weight};
use crate::rational::q;
use crate::timed::{Atom, ClockConstraint, Edge, Relation, TimedAutomaton, TimedWord};
use crate::wrdl::{parse_wrdl, wrdl_classify, WrdlFormula};
use crate::wta::WeightedTimedAutomaton;

#[derive(Debug, Clone)]
pub struct WtaShape {
    pub alphabet: Vec<String>,
    pub max_locations: usize,
    pub max_edges: usize,
    pub max_clocks: usize,
    pub max_constant: u32,
}

impl Default for WtaShape {
    fn default() -> Self {
        WtaShape { alphabet: vec!["a".into(), "b".into()], max_locations: 4, max_edges: 6, max_clocks: 2, max_constant: 3 }
    }
}

fn random_weight<R: Rng>(rng: &mut R, m: &TimedValuationMonoid) -> Weight {
    match m.val {
        ValKind::Prod => Weight::rat(rng.gen_range(0..4)),
        _ if rng.gen_bool(0.2) => Weight::Rat(q(rng.gen_range(-3..8), 2)),
        _ => Weight::rat(rng.gen_range(-2..5)),
    }
}

fn random_guard<R: Rng>(rng: &mut R, clocks: &[String], max_constant: u32) -> ClockConstraint {
    if clocks.is_empty() || rng.gen_bool(0.35) {
        return ClockConstraint::tt();
    }
    let atoms = (0..rng.gen_range(1..=2))
        .map(|_| {
            let c = clocks.choose(rng).expect("non-empty").clone();
            Atom::new(c, *Relation::ALL.choose(rng).expect("non-empty"), rng.gen_range(0..=max_constant))
        })
        .collect();
    ClockConstraint::of(atoms)
}

/// A random WTA over `m` whose weights lie in the monoid's domain.
pub fn random_wta<R: Rng>(rng: &mut R, m: &TimedValuationMonoid, shape: &WtaShape) -> WeightedTimedAutomaton {
    let locations: Vec<String> = (0..rng.gen_range(1..=shape.max_locations)).map(|i| format!("l{i}")).collect();
    let clocks: Vec<String> = ["x", "y", "z"].iter().take(rng.gen_range(0..=shape.max_clocks)).map(|c| c.to_string()).collect();
    let edges: Vec<Edge> = (0..rng.gen_range(1..=shape.max_edges))
        .map(|k| {
            let resets: Vec<String> = clocks.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
            Edge::new(
                format!("e{k}"),
                locations.choose(rng).expect("non-empty").clone(),
                shape.alphabet.choose(rng).expect("non-empty").clone(),
                random_guard(rng, &clocks, shape.max_constant),
                resets,
                locations.choose(rng).expect("non-empty").clone(),
            )
        })
        .collect();
    let initial = vec![locations[0].clone()];
    let mut finals: Vec<String> = locations.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    if finals.is_empty() {
        finals.push(locations.last().expect("non-empty").clone());
    }
    let lw: BTreeMap<String, Weight> = locations.iter().map(|l| (l.clone(), random_weight(rng, m))).collect();
    let ew: BTreeMap<String, Weight> = edges.iter().map(|e| (e.id.clone(), random_weight(rng, m))).collect();
    let ta = TimedAutomaton::new(shape.alphabet.iter().cloned(), locations, clocks, initial, finals, edges)
        .expect("generated automata are well formed");
    WeightedTimedAutomaton::new(ta, m.clone(), lw, ew).expect("generated weights are in the domain")
}

/// Non-empty word of length at most `max_len`; delays are multiples of ½ up to 4.
pub fn random_word<R: Rng>(rng: &mut R, alphabet: &[String], max_len: usize) -> TimedWord {
    let n = rng.gen_range(1..=max_len.max(1));
    TimedWord::new(
        (0..n).map(|_| (alphabet.choose(rng).expect("non-empty").clone(), q(rng.gen_range(0..=8), 2))).collect(),
    )
    .expect("non-empty word")
}

fn constant<R: Rng>(rng: &mut R) -> &'static str {
    ["0", "1", "0", "1", "2", "1/2"].choose(rng).expect("non-empty")
}

fn atom<R: Rng>(rng: &mut R, sets: &[&str]) -> String {
    let rel = *["<", "<=", ">=", ">"].choose(rng).expect("non-empty");
    match (rng.gen_range(0..4), sets.choose(rng)) {
        (0, _) | (_, None) => format!("P[{}](y)", ["a", "b"].choose(rng).expect("non-empty")),
        (1, Some(s)) => format!("{s}(y)"),
        (_, Some(s)) => format!("dpast[{rel}{}]({s},y)", rng.gen_range(0..3)),
    }
}

fn local<R: Rng>(rng: &mut R, sets: &[&str]) -> String {
    let lit = |rng: &mut R| {
        let a = atom(rng, sets);
        if rng.gen_bool(0.3) {
            format!("!{a}")
        } else {
            a
        }
    };
    if rng.gen_bool(0.3) {
        format!("{} & {}", lit(rng), lit(rng))
    } else {
        lit(rng)
    }
}

fn step<R: Rng>(rng: &mut R, sets: &[&str]) -> String {
    let branches: Vec<String> = (0..rng.gen_range(1..=2))
        .map(|_| {
            if rng.gen_bool(0.2) {
                constant(rng).to_string()
            } else {
                format!("B({}) & {}", local(rng, sets), constant(rng))
            }
        })
        .collect();
    branches.join(" | ")
}

/// Text of a shallow syntactically restricted sentence over `{a, b}`.
pub fn random_sentence_text<R: Rng>(rng: &mut R) -> String {
    let sets: Vec<&str> = ["X", "Y"].into_iter().take(rng.gen_range(0..=2)).collect();
    let body = format!("all y.({}, {})", step(rng, &sets), step(rng, &sets));
    sets.iter().rev().fold(body, |acc, s| format!("EX {s}. {acc}"))
}

/// Draws until the sampler yields a syntactically restricted sentence.
pub fn random_sentence<R: Rng>(rng: &mut R, m: &TimedPvMonoid) -> (String, WrdlFormula) {
    loop {
        let text = random_sentence_text(rng);
        if let Ok(phi) = parse_wrdl(&text, m) {
            let c = wrdl_classify(&phi);
            if c.sentence && c.syntactically_restricted {
                return (text, phi);
            }
        }
    }
}
