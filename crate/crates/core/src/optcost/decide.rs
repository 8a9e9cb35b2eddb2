use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::monoid::{TimedPvMonoid, TimedValuationMonoid, ValKind, Weight};
use crate::rational::Q;
use crate::timed::{Atom, Edge, Relation, TimedAutomaton, TimedWord};
use crate::transform::{nivat_compose, Language, LanguageClass, NivatTriple};
use crate::wrdl::{canonicalize, sentence_to_nivat, wrdl_classify, WrdlFormula};
use crate::wta::WeightedTimedAutomaton;

use super::{build_corner_points, compile_language, corner_word, realize, CostBound};

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub exists: bool,
    pub infimum: CostBound,
    /// A word beating the threshold, when one exists.
    pub witness: Option<TimedWord>,
    /// What `infimum` is compared against: θ for sums, 0 after the average
    /// reduction.
    pub threshold: Q,
    /// A word whose value is exactly the infimum, found when the optimal
    /// corner path is itself a valid timing. `None` does not prove that the
    /// infimum is unattained.
    pub attained: Option<TimedWord>,
}

impl Decision {
    fn none(threshold: Q) -> Self {
        Decision { exists: false, infimum: CostBound::PosInf, witness: None, threshold, attained: None }
    }

    /// The `≤` variant: true when some word reaches the threshold exactly.
    pub fn exists_at_most(&self) -> bool {
        self.exists || (self.infimum == CostBound::Finite(self.threshold.clone()) && self.attained.is_some())
    }

    /// A word with value `< θ`, or `= θ` for the `≤` variant.
    pub fn witness_at_most(&self) -> Option<&TimedWord> {
        self.witness.as_ref().or(if self.exists_at_most() { self.attained.as_ref() } else { None })
    }
}

/// canonicalize → sentence_to_nivat → letter-consistency automaton →
/// composition. `None` when no branch carries a finite value.
pub fn compose_sentence(phi: &WrdlFormula, sigma: &[String], m: &TimedPvMonoid) -> Result<Option<WeightedTimedAutomaton>> {
    if !wrdl_classify(phi).syntactically_restricted {
        return Err(Error::Fragment(format!("not syntactically restricted: {phi}")));
    }
    let t = sentence_to_nivat(&canonicalize(phi, m)?, sigma, m)?;
    if t.gamma.is_empty() {
        return Ok(None);
    }
    let Language::Sentence(beta) = &t.language else { unreachable!("sentence_to_nivat yields sentences") };
    let ta = compile_language(beta, &t.gamma)?;
    let t = NivatTriple { language: Language::Automaton(ta), class: LanguageClass::Recognizable, ..t };
    nivat_compose(&t, &m.base).map(Some)
}

/// Is there a word the sum automaton `a` maps below `θ`?
pub fn sum_threshold_automaton(a: &WeightedTimedAutomaton, theta: &Q) -> Result<Decision> {
    let g = build_corner_points(a)?;
    let opt = g.optimum();
    let witness = match g.path_below(&opt, theta) {
        Some(path) => Some(realize(a, &g, &path, theta)?),
        None => None,
    };
    let attained = match &opt.bound {
        CostBound::Finite(_) => corner_word(a, &g, &opt.path)?,
        _ => None,
    };
    Ok(Decision { exists: opt.bound.below(theta), infimum: opt.bound, witness, threshold: theta.clone(), attained })
}

/// Is there a word with `[[φ]](w) < θ` over the sum pv-monoid?
pub fn decide_sum_threshold(phi: &WrdlFormula, sigma: &[String], theta: &Q) -> Result<Decision> {
    match compose_sentence(phi, sigma, &TimedPvMonoid::sum0())? {
        None => Ok(Decision::none(theta.clone())),
        Some(a) => sum_threshold_automaton(&a, theta),
    }
}

/// Sum-monoid automaton whose run costs are `cost − θ·duration`, accepting
/// only after positive total time.
pub fn shift_for_average(a: &WeightedTimedAutomaton, theta: &Q) -> Result<WeightedTimedAutomaton> {
    if a.monoid.val != ValKind::Avg {
        return Err(Error::Unsupported(format!("average reduction needs the avg monoid, got {}", a.monoid.id)));
    }
    let ta = &a.automaton;
    let mut z = "z".to_string();
    while ta.clocks.contains(&z) {
        z.push('\'');
    }
    let pos = |l: &str| format!("{l}@pos");
    let mut locations = ta.locations.clone();
    let mut lw: BTreeMap<String, Weight> = ta
        .locations
        .iter()
        .map(|l| {
            let w = match a.location_weight(l) {
                Weight::Rat(r) => Weight::Rat(r - theta),
                other => other.clone(),
            };
            (l.clone(), w)
        })
        .collect();
    let mut ew = a.edge_weights.clone();
    let mut edges = ta.edges.clone();
    let mut finals = Vec::new();
    for f in &ta.finals {
        locations.push(pos(f));
        lw.insert(pos(f), Weight::zero_q());
        finals.push(pos(f));
    }
    for e in &ta.edges {
        if ta.finals.contains(&e.target) {
            let id = format!("{}@pos", e.id);
            ew.insert(id.clone(), a.edge_weight(&e.id).clone());
            let guard = e.guard.and(&crate::timed::ClockConstraint::of(vec![Atom::new(z.clone(), Relation::Gt, 0)]));
            edges.push(Edge::new(id, e.source.clone(), e.label.clone(), guard, e.resets.iter().cloned(), pos(&e.target)));
        }
    }
    let mut clocks = ta.clocks.clone();
    clocks.push(z);
    let shifted = TimedAutomaton::new(ta.alphabet.iter().cloned(), locations, clocks, ta.initial.iter().cloned(), finals, edges)?;
    WeightedTimedAutomaton::new(shifted, TimedValuationMonoid::sum(), lw, ew)
}

/// Is there a word with positive duration and average value below `θ`?
pub fn avg_threshold_automaton(a: &WeightedTimedAutomaton, theta: &Q) -> Result<Decision> {
    sum_threshold_automaton(&shift_for_average(a, theta)?, &Q::from_integer(0.into()))
}

pub fn decide_avg_threshold(phi: &WrdlFormula, sigma: &[String], theta: &Q) -> Result<Decision> {
    match compose_sentence(phi, sigma, &TimedPvMonoid::avg0())? {
        None => Ok(Decision::none(Q::from_integer(0.into()))),
        Some(a) => avg_threshold_automaton(&a, theta),
    }
}
