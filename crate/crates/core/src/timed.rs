//! Timed words, clock constraints and timed automata.
//!
//! Everything here works over exact rationals: delays, clock valuations and
//! the replay of guards along a run are bit-exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, fmt_q, Q};

pub type Letter = String;
pub type Clock = String;
pub type Location = String;

/// A non-empty finite timed word. Entries hold the delay elapsed before each
/// event, not absolute timestamps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimedWord {
    entries: Vec<(Letter, Q)>,
}

impl TimedWord {
    pub fn new(entries: Vec<(Letter, Q)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyWord);
        }
        if let Some((_, t)) = entries.iter().find(|(_, t)| t.is_negative()) {
            return Err(Error::NegativeDelay(fmt_q(t)));
        }
        Ok(TimedWord { entries })
    }

    /// Builds a word from absolute, non-decreasing timestamps.
    pub fn from_timestamps(stamps: Vec<(Letter, Q)>) -> Result<Self> {
        let mut last = Q::zero();
        let mut entries = Vec::with_capacity(stamps.len());
        for (a, at) in stamps {
            let d = &at - &last;
            if d.is_negative() {
                return Err(Error::NegativeDelay(fmt_q(&d)));
            }
            entries.push((a, d));
            last = at;
        }
        TimedWord::new(entries)
    }

    pub fn parse_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let entries = pairs
            .iter()
            .map(|(a, t)| Ok((a.clone(), rational::parse_q(t)?)))
            .collect::<Result<Vec<_>>>()?;
        TimedWord::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[(Letter, Q)] {
        &self.entries
    }

    pub fn letter(&self, i: usize) -> &str {
        &self.entries[i].0
    }

    pub fn delay(&self, i: usize) -> &Q {
        &self.entries[i].1
    }

    pub fn letters(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(a, _)| a.as_str())
    }

    pub fn delays(&self) -> impl Iterator<Item = &Q> {
        self.entries.iter().map(|(_, t)| t)
    }

    /// Total duration t₁ + … + tₙ.
    pub fn duration(&self) -> Q {
        self.delays().fold(Q::zero(), |acc, t| acc + t)
    }

    /// Prefix sums; index `i` holds t₁ + … + t_{i+1}.
    pub fn prefix_sums(&self) -> Vec<Q> {
        let mut acc = Q::zero();
        self.delays()
            .map(|t| {
                acc += t;
                acc.clone()
            })
            .collect()
    }

    /// Same delays, letters replaced position-wise.
    pub fn with_letters(&self, letters: &[Letter]) -> TimedWord {
        assert_eq!(letters.len(), self.len());
        TimedWord {
            entries: letters
                .iter()
                .cloned()
                .zip(self.delays().cloned())
                .collect(),
        }
    }

    pub fn to_pairs(&self) -> Vec<(String, String)> {
        self.entries
            .iter()
            .map(|(a, t)| (a.clone(), fmt_q(t)))
            .collect()
    }
}

impl fmt::Display for TimedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, t) in &self.entries {
            write!(f, "({},{})", a, fmt_q(t))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub const ALL: [Relation; 5] = [
        Relation::Lt,
        Relation::Le,
        Relation::Eq,
        Relation::Ge,
        Relation::Gt,
    ];

    pub fn holds<T: PartialOrd>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Relation> {
        Some(match s {
            "<" => Relation::Lt,
            "<=" => Relation::Le,
            "=" | "==" => Relation::Eq,
            ">=" => Relation::Ge,
            ">" => Relation::Gt,
            _ => return None,
        })
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `clock ⋈ bound` with a natural bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub clock: Clock,
    pub rel: Relation,
    pub bound: u32,
}

impl Atom {
    pub fn new(clock: impl Into<Clock>, rel: Relation, bound: u32) -> Self {
        Atom {
            clock: clock.into(),
            rel,
            bound,
        }
    }

    pub fn holds(&self, value: &Q) -> bool {
        self.rel.holds(value, &rational::int(self.bound as i64))
    }
}

/// A conjunction of atoms; the empty conjunction is TRUE.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ClockConstraint {
    pub atoms: Vec<Atom>,
}

impl ClockConstraint {
    pub fn tt() -> Self {
        ClockConstraint { atoms: Vec::new() }
    }

    pub fn of(atoms: Vec<Atom>) -> Self {
        ClockConstraint { atoms }
    }

    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn and(&self, other: &ClockConstraint) -> ClockConstraint {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        ClockConstraint { atoms }
    }

    pub fn clocks(&self) -> BTreeSet<&str> {
        self.atoms.iter().map(|a| a.clock.as_str()).collect()
    }

    pub fn rename_clocks(&self, f: impl Fn(&str) -> String) -> ClockConstraint {
        ClockConstraint {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom::new(f(&a.clock), a.rel, a.bound))
                .collect(),
        }
    }

    /// Missing clocks are read as 0.
    pub fn is_satisfied(&self, nu: &ClockValuation) -> bool {
        let zero = Q::zero();
        self.atoms
            .iter()
            .all(|a| a.holds(nu.values.get(&a.clock).unwrap_or(&zero)))
    }

    pub fn max_constant(&self, clock: &str) -> Option<u32> {
        self.atoms
            .iter()
            .filter(|a| a.clock == clock)
            .map(|a| a.bound)
            .max()
    }

    /// Parses `true` or `x>=1 & y<2`. Bounds must be naturals.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        if s.eq_ignore_ascii_case("true") || s.is_empty() {
            return Ok(ClockConstraint::tt());
        }
        let mut atoms = Vec::new();
        for part in s.split('&') {
            let part = part.trim();
            let pos = part
                .find(['<', '>', '='])
                .ok_or_else(|| Error::Parse(format!("guard atom `{part}` has no relation")))?;
            let clock = part[..pos].trim();
            let rest = &part[pos..];
            let rel_len = rest
                .find(|c: char| !matches!(c, '<' | '>' | '='))
                .unwrap_or(rest.len());
            let rel = Relation::from_symbol(&rest[..rel_len])
                .ok_or_else(|| Error::Parse(format!("bad relation in guard atom `{part}`")))?;
            let bound_text = rest[rel_len..].trim();
            if clock.is_empty() || !clock.chars().all(|c| c.is_alphanumeric() || "_.'".contains(c))
            {
                return Err(Error::Parse(format!("bad clock name in guard atom `{part}`")));
            }
            let value = rational::parse_q(bound_text).map_err(|_| {
                Error::Parse(format!("bad bound `{bound_text}` in guard atom `{part}`"))
            })?;
            let bound = rational::as_u32(&value).ok_or_else(|| {
                Error::Validation(vec![format!(
                    "guard bounds must be natural: `{part}`"
                )])
            })?;
            atoms.push(Atom::new(clock, rel, bound));
        }
        Ok(ClockConstraint { atoms })
    }
}

impl fmt::Display for ClockConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("true");
        }
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(|a| format!("{}{}{}", a.clock, a.rel, a.bound))
            .collect();
        f.write_str(&parts.join(" & "))
    }
}

/// One clock's feasible set as an interval of the non-negative rationals.
#[derive(Debug, Clone)]
struct Interval {
    lower: Q,
    lower_closed: bool,
    upper: Option<(Q, bool)>,
}

impl Interval {
    fn full() -> Self {
        Interval {
            lower: Q::zero(),
            lower_closed: true,
            upper: None,
        }
    }

    fn meet(&mut self, atom: &Atom) {
        let c = rational::int(atom.bound as i64);
        let raise = |iv: &mut Interval, v: Q, closed: bool| {
            if v > iv.lower || (v == iv.lower && !closed) {
                iv.lower = v;
                iv.lower_closed = closed;
            }
        };
        let cap = |iv: &mut Interval, v: Q, closed: bool| match &iv.upper {
            Some((u, uc)) if *u < v || (*u == v && !*uc) => {}
            _ => iv.upper = Some((v, closed)),
        };
        match atom.rel {
            Relation::Lt => cap(self, c, false),
            Relation::Le => cap(self, c, true),
            Relation::Eq => {
                raise(self, c.clone(), true);
                cap(self, c, true);
            }
            Relation::Ge => raise(self, c, true),
            Relation::Gt => raise(self, c, false),
        }
    }

    fn witness(&self) -> Option<Q> {
        match &self.upper {
            None => Some(if self.lower_closed {
                self.lower.clone()
            } else {
                &self.lower + rational::one()
            }),
            Some((u, uc)) => {
                if *u < self.lower {
                    None
                } else if *u == self.lower {
                    (self.lower_closed && *uc).then(|| u.clone())
                } else if self.lower_closed {
                    Some(self.lower.clone())
                } else {
                    Some((&self.lower + u) / rational::int(2))
                }
            }
        }
    }
}

/// A valuation satisfying `phi ∧ psi`, if any. Constraints are conjunctions of
/// single-clock atoms, so per-clock interval intersection decides this.
pub fn satisfying_valuation(phi: &ClockConstraint, psi: &ClockConstraint) -> Option<ClockValuation> {
    let mut intervals: BTreeMap<&str, Interval> = BTreeMap::new();
    for atom in phi.atoms.iter().chain(psi.atoms.iter()) {
        intervals
            .entry(atom.clock.as_str())
            .or_insert_with(Interval::full)
            .meet(atom);
    }
    let mut values = BTreeMap::new();
    for (clock, iv) in intervals {
        values.insert(clock.to_string(), iv.witness()?);
    }
    Some(ClockValuation { values })
}

pub fn constraint_satisfiable(phi: &ClockConstraint, psi: &ClockConstraint) -> bool {
    satisfying_valuation(phi, psi).is_some()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ClockValuation {
    pub values: BTreeMap<Clock, Q>,
}

impl ClockValuation {
    pub fn zero<'a>(clocks: impl IntoIterator<Item = &'a Clock>) -> Self {
        ClockValuation {
            values: clocks.into_iter().map(|c| (c.clone(), Q::zero())).collect(),
        }
    }

    pub fn get(&self, clock: &str) -> Option<&Q> {
        self.values.get(clock)
    }
}

/// Returns `(nu + t)[resets := 0]`.
pub fn clock_step(nu: &ClockValuation, t: &Q, resets: &BTreeSet<Clock>) -> Result<ClockValuation> {
    if t.is_negative() {
        return Err(Error::NegativeDelay(fmt_q(t)));
    }
    let values = nu
        .values
        .iter()
        .map(|(c, v)| {
            let nv = if resets.contains(c) { Q::zero() } else { v + t };
            (c.clone(), nv)
        })
        .collect();
    Ok(ClockValuation { values })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub source: Location,
    pub label: Letter,
    pub guard: ClockConstraint,
    pub resets: BTreeSet<Clock>,
    pub target: Location,
}

impl Edge {
    pub fn new(
        id: impl Into<String>,
        source: impl Into<Location>,
        label: impl Into<Letter>,
        guard: ClockConstraint,
        resets: impl IntoIterator<Item = Clock>,
        target: impl Into<Location>,
    ) -> Self {
        Edge {
            id: id.into(),
            source: source.into(),
            label: label.into(),
            guard,
            resets: resets.into_iter().collect(),
            target: target.into(),
        }
    }
}

/// A timed automaton `(L, C, I, E, F)` with identified edges.
///
/// `unambiguous` is a trusted flag set by constructions that guarantee at
/// most one run per word; it is never inferred.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedAutomaton {
    pub alphabet: BTreeSet<Letter>,
    pub locations: Vec<Location>,
    pub clocks: Vec<Clock>,
    pub initial: BTreeSet<Location>,
    pub finals: BTreeSet<Location>,
    pub edges: Vec<Edge>,
    pub unambiguous: bool,
}

impl TimedAutomaton {
    pub fn new(
        alphabet: impl IntoIterator<Item = Letter>,
        locations: Vec<Location>,
        clocks: Vec<Clock>,
        initial: impl IntoIterator<Item = Location>,
        finals: impl IntoIterator<Item = Location>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        let a = TimedAutomaton {
            alphabet: alphabet.into_iter().collect(),
            locations,
            clocks,
            initial: initial.into_iter().collect(),
            finals: finals.into_iter().collect(),
            edges,
            unambiguous: false,
        };
        a.validate()?;
        Ok(a)
    }

    /// Reports every structural problem at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let locs: BTreeSet<&str> = self.locations.iter().map(String::as_str).collect();
        let clocks: BTreeSet<&str> = self.clocks.iter().map(String::as_str).collect();
        if locs.len() != self.locations.len() {
            errs.push("duplicate location names".to_string());
        }
        if clocks.len() != self.clocks.len() {
            errs.push("duplicate clock names".to_string());
        }
        for l in self.initial.iter().chain(self.finals.iter()) {
            if !locs.contains(l.as_str()) {
                errs.push(format!("undeclared location `{l}` in initial/final set"));
            }
        }
        let mut ids = BTreeSet::new();
        for e in &self.edges {
            if !ids.insert(e.id.as_str()) {
                errs.push(format!("duplicate edge id `{}`", e.id));
            }
            for l in [&e.source, &e.target] {
                if !locs.contains(l.as_str()) {
                    errs.push(format!("edge `{}` references undeclared location `{l}`", e.id));
                }
            }
            if !self.alphabet.contains(&e.label) {
                errs.push(format!("edge `{}` label `{}` not in alphabet", e.id, e.label));
            }
            for c in e.guard.clocks().into_iter().chain(e.resets.iter().map(String::as_str)) {
                if !clocks.contains(c) {
                    errs.push(format!("edge `{}` references undeclared clock `{c}`", e.id));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn edges_from<'a>(&'a self, loc: &'a str) -> impl Iterator<Item = (usize, &'a Edge)> + 'a {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.source == loc)
    }

    pub fn max_constants(&self) -> BTreeMap<Clock, u32> {
        self.clocks
            .iter()
            .map(|c| {
                let k = self
                    .edges
                    .iter()
                    .filter_map(|e| e.guard.max_constant(c))
                    .max()
                    .unwrap_or(0);
                (c.clone(), k)
            })
            .collect()
    }

    pub fn accepts(&self, w: &TimedWord) -> bool {
        !enumerate_runs(self, w).is_empty()
    }

    /// Number of runs on each sampled word; a value above 1 witnesses ambiguity.
    pub fn ambiguity_probe<'a>(&self, words: impl IntoIterator<Item = &'a TimedWord>) -> Vec<usize> {
        words
            .into_iter()
            .map(|w| enumerate_runs(self, w).len())
            .collect()
    }
}

/// A run over a concrete word: the edges taken, the visited locations
/// `ℓ₀ … ℓₙ` and valuations `ν₀ … νₙ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub edges: Vec<usize>,
    pub edge_ids: Vec<String>,
    pub locations: Vec<Location>,
    pub valuations: Vec<ClockValuation>,
    pub delays: Vec<Q>,
}

impl Run {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// All runs of `a` whose label is `w`, ordered lexicographically by edge-id
/// sequence. Edges are explored in declaration order.
pub fn enumerate_runs(a: &TimedAutomaton, w: &TimedWord) -> Vec<Run> {
    let mut out = Vec::new();
    let nu0 = ClockValuation::zero(&a.clocks);
    for l0 in a.locations.iter().filter(|l| a.initial.contains(*l)) {
        let mut stack_edges = Vec::new();
        let mut locs = vec![l0.clone()];
        let mut vals = vec![nu0.clone()];
        dfs(a, w, 0, &mut stack_edges, &mut locs, &mut vals, &mut out);
    }
    out.sort_by(|x, y| x.edge_ids.cmp(&y.edge_ids));
    out
}

fn dfs(
    a: &TimedAutomaton,
    w: &TimedWord,
    i: usize,
    edges: &mut Vec<usize>,
    locs: &mut Vec<Location>,
    vals: &mut Vec<ClockValuation>,
    out: &mut Vec<Run>,
) {
    if i == w.len() {
        if a.finals.contains(locs.last().unwrap()) {
            out.push(Run {
                edges: edges.clone(),
                edge_ids: edges.iter().map(|&k| a.edges[k].id.clone()).collect(),
                locations: locs.clone(),
                valuations: vals.clone(),
                delays: w.delays().cloned().collect(),
            });
        }
        return;
    }
    let here = locs.last().unwrap().clone();
    let t = w.delay(i);
    let advanced = clock_step(vals.last().unwrap(), t, &BTreeSet::new()).expect("delays are non-negative");
    for (k, e) in a.edges_from(&here) {
        if e.label != w.letter(i) || !e.guard.is_satisfied(&advanced) {
            continue;
        }
        let next = clock_step(&advanced, &Q::zero(), &e.resets).unwrap();
        edges.push(k);
        locs.push(e.target.clone());
        vals.push(next);
        dfs(a, w, i + 1, edges, locs, vals, out);
        edges.pop();
        locs.pop();
        vals.pop();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub sequential: bool,
    pub deterministic: bool,
}

/// Syntactic sequential/deterministic classification. Unambiguity is not
/// decided here.
pub fn classify_automaton(a: &TimedAutomaton) -> Classification {
    let single_initial = a.initial.len() == 1;
    let mut sequential = single_initial;
    let mut deterministic = single_initial;
    for (i, e1) in a.edges.iter().enumerate() {
        for e2 in &a.edges[i + 1..] {
            if e1.source == e2.source && e1.label == e2.label {
                sequential = false;
                if constraint_satisfiable(&e1.guard, &e2.guard) {
                    deterministic = false;
                }
            }
        }
    }
    Classification {
        sequential,
        deterministic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    fn g(s: &str) -> ClockConstraint {
        ClockConstraint::parse(s).unwrap()
    }

    fn word(pairs: &[(&str, Q)]) -> TimedWord {
        TimedWord::new(pairs.iter().map(|(a, t)| (a.to_string(), t.clone())).collect()).unwrap()
    }

    #[test]
    fn satisfiability_examples() {
        assert!(!constraint_satisfiable(&g("x<1"), &g("x>=1")));
        assert!(constraint_satisfiable(&g("true"), &g("true")));
        let nu = satisfying_valuation(&g("x>=1 & x<=2 & y>3"), &g("x=2")).unwrap();
        assert_eq!(nu.get("x"), Some(&int(2)));
        assert_eq!(nu.get("y"), Some(&int(4)));
        assert!(!constraint_satisfiable(&g("x<2 & x>1"), &g("x=1")));
        assert!(constraint_satisfiable(&g("x<2 & x>1"), &g("x<=2")));
        assert!(!constraint_satisfiable(&g("x<0"), &g("true")));
    }

    #[test]
    fn guard_parse_rejects_fractional_bound() {
        assert!(matches!(ClockConstraint::parse("x>=1/2"), Err(Error::Validation(_))));
        assert_eq!(g("x >= 1 & y<2").to_string(), "x>=1 & y<2");
    }

    #[test]
    fn clock_step_examples() {
        let nu = ClockValuation::zero(&["x".to_string()]);
        let r = clock_step(&nu, &q(3, 2), &BTreeSet::new()).unwrap();
        assert_eq!(r.get("x"), Some(&q(3, 2)));

        let mut nu = ClockValuation::default();
        nu.values.insert("x".into(), int(2));
        nu.values.insert("y".into(), int(1));
        let r = clock_step(&nu, &int(1), &["x".to_string()].into()).unwrap();
        assert_eq!(r.get("x"), Some(&int(0)));
        assert_eq!(r.get("y"), Some(&int(2)));

        let mut nu = ClockValuation::default();
        nu.values.insert("x".into(), int(5));
        assert_eq!(clock_step(&nu, &int(0), &BTreeSet::new()).unwrap(), nu);
        assert!(clock_step(&nu, &int(-1), &BTreeSet::new()).is_err());
    }

    #[test]
    fn words_reject_empty_and_negative() {
        assert_eq!(TimedWord::new(vec![]), Err(Error::EmptyWord));
        assert!(TimedWord::new(vec![("a".into(), int(-1))]).is_err());
        let w = TimedWord::from_timestamps(vec![("a".into(), int(1)), ("b".into(), q(5, 2))]).unwrap();
        assert_eq!(w.delay(1), &q(3, 2));
        assert!(TimedWord::from_timestamps(vec![("a".into(), int(2)), ("b".into(), int(1))]).is_err());
    }

    #[test]
    fn single_loop_has_one_run() {
        let a = TimedAutomaton::new(
            ["a".to_string()],
            vec!["l".into()],
            vec![],
            ["l".to_string()],
            ["l".to_string()],
            vec![Edge::new("e", "l", "a", g("true"), [], "l")],
        )
        .unwrap();
        let runs = enumerate_runs(&a, &word(&[("a", int(1)), ("a", int(2))]));
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].edge_ids, vec!["e", "e"]);
        assert_eq!(classify_automaton(&a), Classification { sequential: true, deterministic: true });
    }

    #[test]
    fn violated_guard_blocks_run() {
        let a = TimedAutomaton::new(
            ["a".to_string()],
            vec!["l0".into(), "lf".into()],
            vec!["x".into()],
            ["l0".to_string()],
            ["lf".to_string()],
            vec![Edge::new("e", "l0", "a", g("x<=1"), ["x".to_string()], "lf")],
        )
        .unwrap();
        assert!(enumerate_runs(&a, &word(&[("a", int(2))])).is_empty());
    }

    #[test]
    fn disjoint_guards_pick_one_edge() {
        let a = TimedAutomaton::new(
            ["a".to_string()],
            vec!["l0".into(), "lf".into()],
            vec!["x".into()],
            ["l0".to_string()],
            ["lf".to_string()],
            vec![
                Edge::new("lo", "l0", "a", g("x<1"), [], "lf"),
                Edge::new("hi", "l0", "a", g("x>=1"), [], "lf"),
            ],
        )
        .unwrap();
        let runs = enumerate_runs(&a, &word(&[("a", int(1))]));
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].edge_ids, vec!["hi"]);
        assert_eq!(classify_automaton(&a), Classification { sequential: false, deterministic: true });

        let mut b = a.clone();
        b.edges[0].guard = g("true");
        b.edges[1].guard = g("true");
        assert_eq!(classify_automaton(&b), Classification { sequential: false, deterministic: false });
    }

    #[test]
    fn validation_names_offending_edge() {
        let err = TimedAutomaton::new(
            ["a".to_string()],
            vec!["l".into()],
            vec![],
            ["l".to_string()],
            ["l".to_string()],
            vec![Edge::new("e7", "l", "a", g("z<1"), [], "l")],
        )
        .unwrap_err();
        match err {
            Error::Validation(msgs) => assert!(msgs.iter().any(|m| m.contains("e7") && m.contains("z"))),
            other => panic!("unexpected {other:?}"),
        }
    }
}
