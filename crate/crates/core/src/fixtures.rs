//! Small automata used in tests, examples and the CLI demo files.

use std::collections::BTreeMap;

use crate::monoid::{TimedValuationMonoid, Weight};
use crate::timed::{ClockConstraint, Edge, TimedAutomaton};
use crate::wta::WeightedTimedAutomaton;

fn weights(pairs: &[(&str, i64)]) -> BTreeMap<String, Weight> {
    pairs.iter().map(|(k, v)| (k.to_string(), Weight::rat(*v))).collect()
}

/// Charges the first delay once if the word starts with `a`, twice otherwise
/// (sum monoid). Needs two initial locations, so it is not sequential.
pub fn first_delay_scaled() -> WeightedTimedAutomaton {
    let tt = ClockConstraint::tt;
    let ta = TimedAutomaton::new(
        ["a".to_string(), "b".to_string()],
        vec!["p".into(), "r".into(), "s".into()],
        vec![],
        ["p".to_string(), "r".to_string()],
        ["s".to_string()],
        vec![
            Edge::new("ea", "p", "a", tt(), [], "s"),
            Edge::new("eb", "r", "b", tt(), [], "s"),
            Edge::new("la", "s", "a", tt(), [], "s"),
            Edge::new("lb", "s", "b", tt(), [], "s"),
        ],
    )
    .expect("fixture is well formed");
    WeightedTimedAutomaton::new(
        ta,
        TimedValuationMonoid::sum(),
        weights(&[("p", 1), ("r", 2), ("s", 0)]),
        weights(&[("ea", 0), ("eb", 0), ("la", 0), ("lb", 0)]),
    )
    .expect("fixture is well formed")
}

/// One location with rate `rate` and a TRUE self-loop of weight `disc` per letter.
pub fn uniform(alphabet: &[&str], monoid: TimedValuationMonoid, rate: i64, disc: i64) -> WeightedTimedAutomaton {
    let edges: Vec<Edge> = alphabet
        .iter()
        .map(|a| Edge::new(format!("loop_{a}"), "l", *a, ClockConstraint::tt(), [], "l"))
        .collect();
    let ew = edges.iter().map(|e| (e.id.clone(), Weight::rat(disc))).collect();
    let ta = TimedAutomaton::new(
        alphabet.iter().map(|a| a.to_string()),
        vec!["l".into()],
        vec![],
        ["l".to_string()],
        ["l".to_string()],
        edges,
    )
    .expect("fixture is well formed");
    WeightedTimedAutomaton::new(ta, monoid, weights(&[("l", rate)]), ew).expect("fixture is well formed")
}

/// Accepts the words whose first delay is at most 1.
pub fn first_delay_at_most_one() -> TimedAutomaton {
    TimedAutomaton::new(
        ["a".to_string()],
        vec!["q0".into(), "q1".into()],
        vec!["x".into()],
        ["q0".to_string()],
        ["q1".to_string()],
        vec![
            Edge::new("first", "q0", "a", ClockConstraint::parse("x<=1").unwrap(), [], "q1"),
            Edge::new("rest", "q1", "a", ClockConstraint::tt(), [], "q1"),
        ],
    )
    .expect("fixture is well formed")
}

/// Accepts everything over `{a}` along two identical runs.
pub fn doubled_universal() -> TimedAutomaton {
    let tt = ClockConstraint::tt;
    TimedAutomaton::new(
        ["a".to_string()],
        vec!["q".into()],
        vec![],
        ["q".to_string()],
        ["q".to_string()],
        vec![Edge::new("u1", "q", "a", tt(), [], "q"), Edge::new("u2", "q", "a", tt(), [], "q")],
    )
    .expect("fixture is well formed")
}
