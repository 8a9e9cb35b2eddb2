//! Weighted timed automata and per-word behavior.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::monoid::{TimedValuationMonoid, Weight, WeightPairWord};
use crate::timed::{enumerate_runs, Run, TimedAutomaton, TimedWord};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTimedAutomaton {
    pub automaton: TimedAutomaton,
    pub monoid: TimedValuationMonoid,
    pub location_weights: BTreeMap<String, Weight>,
    pub edge_weights: BTreeMap<String, Weight>,
}

impl WeightedTimedAutomaton {
    pub fn new(
        automaton: TimedAutomaton,
        monoid: TimedValuationMonoid,
        location_weights: BTreeMap<String, Weight>,
        edge_weights: BTreeMap<String, Weight>,
    ) -> Result<Self> {
        let a = WeightedTimedAutomaton {
            automaton,
            monoid,
            location_weights,
            edge_weights,
        };
        a.validate()?;
        Ok(a)
    }

    /// Every location and edge gets `default`.
    pub fn from_unweighted(
        automaton: TimedAutomaton,
        monoid: TimedValuationMonoid,
        default: Weight,
    ) -> Self {
        let location_weights = automaton
            .locations
            .iter()
            .map(|l| (l.clone(), default.clone()))
            .collect();
        let edge_weights = automaton
            .edges
            .iter()
            .map(|e| (e.id.clone(), default.clone()))
            .collect();
        WeightedTimedAutomaton {
            automaton,
            monoid,
            location_weights,
            edge_weights,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = match self.automaton.validate() {
            Ok(()) => Vec::new(),
            Err(Error::Validation(v)) => v,
            Err(e) => return Err(e),
        };
        let mut check = |kind: &str, name: &str, w: Option<&Weight>| match w {
            None => errs.push(format!("missing weight for {kind} `{name}`")),
            Some(w) if !self.monoid.in_domain(w) => errs.push(format!(
                "weight {w} of {kind} `{name}` is outside the domain of {}",
                self.monoid
            )),
            _ => {}
        };
        for l in &self.automaton.locations {
            check("location", l, self.location_weights.get(l));
        }
        for e in &self.automaton.edges {
            check("edge", &e.id, self.edge_weights.get(&e.id));
        }
        for k in self.location_weights.keys() {
            if !self.automaton.locations.contains(k) {
                errs.push(format!("weight given for unknown location `{k}`"));
            }
        }
        for k in self.edge_weights.keys() {
            if self.automaton.edge_index(k).is_none() {
                errs.push(format!("weight given for unknown edge `{k}`"));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn location_weight(&self, l: &str) -> &Weight {
        &self.location_weights[l]
    }

    pub fn edge_weight(&self, id: &str) -> &Weight {
        &self.edge_weights[id]
    }
}

/// `((wt(ℓ₀),wt(e₁)),t₁) … ((wt(ℓₙ₋₁),wt(eₙ)),tₙ)`.
pub fn wt_sharp(a: &WeightedTimedAutomaton, run: &Run) -> Result<WeightPairWord> {
    if run.locations.len() != run.edges.len() + 1 || run.delays.len() != run.edges.len() {
        return Err(Error::Validation(vec!["malformed run".into()]));
    }
    let mut steps = Vec::with_capacity(run.edges.len());
    for (i, &k) in run.edges.iter().enumerate() {
        let e = a
            .automaton
            .edges
            .get(k)
            .filter(|e| e.source == run.locations[i] && e.target == run.locations[i + 1])
            .ok_or_else(|| Error::Validation(vec![format!("run step {} is not an edge of the automaton", i + 1)]))?;
        let rate = a
            .location_weights
            .get(&e.source)
            .ok_or_else(|| Error::Validation(vec![format!("no weight for location `{}`", e.source)]))?;
        let disc = a
            .edge_weights
            .get(&e.id)
            .ok_or_else(|| Error::Validation(vec![format!("no weight for edge `{}`", e.id)]))?;
        steps.push((rate.clone(), disc.clone(), run.delays[i].clone()));
    }
    WeightPairWord::new(steps)
}

pub fn run_weight(a: &WeightedTimedAutomaton, run: &Run) -> Result<Weight> {
    Ok(a.monoid.valuate(&wt_sharp(a, run)?))
}

/// `‖A‖(w)`: the monoid sum of run weights over all runs on `w`.
pub fn behavior(a: &WeightedTimedAutomaton, w: &TimedWord) -> Weight {
    let weights: Vec<Weight> = enumerate_runs(&a.automaton, w)
        .iter()
        .map(|r| run_weight(a, r).expect("enumerated runs belong to the automaton"))
        .collect();
    a.monoid.sum_over(&weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};
    use crate::timed::{ClockConstraint, Edge};

    fn tt() -> ClockConstraint {
        ClockConstraint::tt()
    }

    fn w(n: i64) -> Weight {
        Weight::rat(n)
    }

    fn word(p: &[(&str, i64)]) -> TimedWord {
        TimedWord::new(p.iter().map(|(a, t)| (a.to_string(), int(*t))).collect()).unwrap()
    }

    #[test]
    fn wt_sharp_examples() {
        let ta = TimedAutomaton::new(
            ["a".to_string()],
            vec!["l".into()],
            vec![],
            ["l".to_string()],
            ["l".to_string()],
            vec![Edge::new("e", "l", "a", tt(), [], "l")],
        )
        .unwrap();
        let a = WeightedTimedAutomaton::new(
            ta,
            TimedValuationMonoid::sum(),
            [("l".to_string(), w(2))].into(),
            [("e".to_string(), w(1))].into(),
        )
        .unwrap();
        let runs = enumerate_runs(&a.automaton, &word(&[("a", 3)]));
        let v = wt_sharp(&a, &runs[0]).unwrap();
        assert_eq!(v, WeightPairWord::new(vec![(w(2), w(1), int(3))]).unwrap());

        let ta = TimedAutomaton::new(
            ["a".to_string()],
            vec!["l0".into(), "l1".into(), "l2".into()],
            vec![],
            ["l0".to_string()],
            ["l2".to_string()],
            vec![
                Edge::new("e1", "l0", "a", tt(), [], "l1"),
                Edge::new("e2", "l1", "a", tt(), [], "l2"),
            ],
        )
        .unwrap();
        let a = WeightedTimedAutomaton::new(
            ta,
            TimedValuationMonoid::sum(),
            [("l0", 1), ("l1", 5), ("l2", 0)].iter().map(|(l, v)| (l.to_string(), w(*v))).collect(),
            [("e1", 0), ("e2", 7)].iter().map(|(l, v)| (l.to_string(), w(*v))).collect(),
        )
        .unwrap();
        let run = &enumerate_runs(&a.automaton, &word(&[("a", 1), ("a", 2)]))[0];
        let v = wt_sharp(&a, run).unwrap();
        assert_eq!(v, WeightPairWord::new(vec![(w(1), w(0), int(1)), (w(5), w(7), int(2))]).unwrap());
        assert_eq!(run_weight(&a, run).unwrap(), w(18));
    }

    #[test]
    fn behavior_examples() {
        let a = crate::fixtures::first_delay_scaled();
        assert_eq!(behavior(&a, &word(&[("b", 3), ("a", 1)])), w(6));
        assert_eq!(behavior(&a, &word(&[("a", 3), ("b", 1)])), w(3));
        assert!(behavior(&a, &word(&[("c", 1)])).is_inf());

        let ta = TimedAutomaton::new(
            ["a".to_string()],
            vec!["l".into()],
            vec![],
            ["l".to_string()],
            ["l".to_string()],
            vec![
                Edge::new("e1", "l", "a", tt(), [], "l"),
                Edge::new("e2", "l", "a", tt(), [], "l"),
            ],
        )
        .unwrap();
        let a = WeightedTimedAutomaton::new(
            ta,
            TimedValuationMonoid::sum(),
            [("l".to_string(), w(0))].into(),
            [("e1".to_string(), w(1)), ("e2".to_string(), w(2))].into(),
        )
        .unwrap();
        assert_eq!(behavior(&a, &word(&[("a", 1)])), w(1));
    }

    #[test]
    fn validation_reports_missing_and_out_of_domain() {
        let mut a = crate::fixtures::first_delay_scaled();
        a.edge_weights.remove("la");
        a.monoid = TimedValuationMonoid::prod();
        a.location_weights.insert("p".into(), Weight::Rat(q(1, 2)));
        match a.validate() {
            Err(Error::Validation(m)) => {
                assert!(m.iter().any(|s| s.contains("`la`")));
                assert!(m.iter().any(|s| s.contains("`p`")));
            }
            other => panic!("{other:?}"),
        }
    }
}
