//! Closure constructions and the Nivat decomposition of weighted timed
//! automata into a relabeling, a weight assignment and a timed language.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monoid::{TimedValuationMonoid, Weight, WeightPairWord};
use crate::rdl::{rdl_model_check, Assignment, RdlFormula};
use crate::timed::{classify_automaton, enumerate_runs, ClockConstraint, Edge, TimedAutomaton, TimedWord};
use crate::wta::WeightedTimedAutomaton;

pub const DEFAULT_PREIMAGE_CAP: u128 = 1_000_000;

/// Replaces every edge label `γ` by `h(γ)`.
pub fn relabel(a: &WeightedTimedAutomaton, h: &BTreeMap<String, String>) -> Result<WeightedTimedAutomaton> {
    let missing: Vec<String> = a
        .automaton
        .alphabet
        .iter()
        .filter(|g| !h.contains_key(*g))
        .map(|g| format!("relabeling undefined on `{g}`"))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Validation(missing));
    }
    let mut out = a.clone();
    out.automaton.alphabet = a.automaton.alphabet.iter().map(|g| h[g].clone()).collect();
    for e in &mut out.automaton.edges {
        e.label = h[&e.label].clone();
    }
    out.automaton.unambiguous = false;
    Ok(out)
}

/// A WTA recognizing `val ∘ g`.
///
/// Location-independent monoids get a single location. Otherwise each
/// location `ℓ_a` guesses the next letter `a` so that it can carry `g₁(a)`,
/// and a final sink `⊥` ends the run.
pub fn comp_automaton(
    alphabet: &[String],
    g: &BTreeMap<String, (Weight, Weight)>,
    m: &TimedValuationMonoid,
) -> Result<WeightedTimedAutomaton> {
    let missing: Vec<String> = alphabet
        .iter()
        .filter(|a| !g.contains_key(*a))
        .map(|a| format!("weight assignment undefined on `{a}`"))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Validation(missing));
    }
    let tt = ClockConstraint::tt;
    let neutral = Weight::zero_q();
    let mut lw = BTreeMap::new();
    let mut ew = BTreeMap::new();
    let mut edges = Vec::new();
    let (locations, initial, finals);
    if m.location_independent {
        locations = vec!["l".to_string()];
        initial = locations.clone();
        finals = locations.clone();
        lw.insert("l".to_string(), neutral);
        for a in alphabet {
            let id = format!("l-{a}");
            ew.insert(id.clone(), g[a].1.clone());
            edges.push(Edge::new(id, "l", a.clone(), tt(), [], "l"));
        }
    } else {
        let loc = |a: &str| format!("l[{a}]");
        let sink = "bot".to_string();
        let mut locs: Vec<String> = alphabet.iter().map(|a| loc(a)).collect();
        initial = locs.clone();
        locs.push(sink.clone());
        locations = locs;
        finals = vec![sink.clone()];
        lw.insert(sink.clone(), neutral);
        for a in alphabet {
            lw.insert(loc(a), g[a].0.clone());
            for target in alphabet.iter().map(|b| loc(b)).chain([sink.clone()]) {
                let id = format!("{}>{}", loc(a), target);
                ew.insert(id.clone(), g[a].1.clone());
                edges.push(Edge::new(id, loc(a), a.clone(), tt(), [], target));
            }
        }
    }
    let mut ta = TimedAutomaton::new(alphabet.iter().cloned(), locations, vec![], initial, finals, edges)?;
    ta.unambiguous = true;
    WeightedTimedAutomaton::new(ta, m.clone(), lw, ew)
}

/// Weighted intersection `r ∩ L`. Sound only if the monoid is idempotent or
/// `b` has at most one run per word; anything else is refused.
pub fn product_intersect(a: &WeightedTimedAutomaton, b: &TimedAutomaton) -> Result<WeightedTimedAutomaton> {
    if !a.monoid.idempotent && !b.unambiguous && !classify_automaton(b).deterministic {
        return Err(Error::UnsoundComposition(format!(
            "monoid {} is not idempotent and the language automaton is not known to be unambiguous; \
             runs of the language automaton would be counted with multiplicity",
            a.monoid
        )));
    }
    let pair = |x: &str, y: &str| format!("({x},{y})");
    let left = |c: &str| format!("l.{c}");
    let right = |c: &str| format!("r.{c}");
    let ta = &a.automaton;
    let mut locations = Vec::new();
    let mut lw = BTreeMap::new();
    for la in &ta.locations {
        for lb in &b.locations {
            locations.push(pair(la, lb));
            lw.insert(pair(la, lb), a.location_weights[la].clone());
        }
    }
    let mut edges = Vec::new();
    let mut ew = BTreeMap::new();
    for ea in &ta.edges {
        for eb in b.edges.iter().filter(|eb| eb.label == ea.label) {
            let id = pair(&ea.id, &eb.id);
            let guard = ea.guard.rename_clocks(left).and(&eb.guard.rename_clocks(right));
            let resets = ea.resets.iter().map(|c| left(c)).chain(eb.resets.iter().map(|c| right(c)));
            edges.push(Edge::new(id.clone(), pair(&ea.source, &eb.source), ea.label.clone(), guard, resets, pair(&ea.target, &eb.target)));
            ew.insert(id, a.edge_weights[&ea.id].clone());
        }
    }
    let cross = |x: &BTreeSet<String>, y: &BTreeSet<String>| -> Vec<String> {
        x.iter().flat_map(|p| y.iter().map(move |q| pair(p, q))).collect()
    };
    let clocks = ta.clocks.iter().map(|c| left(c)).chain(b.clocks.iter().map(|c| right(c))).collect();
    let alphabet = ta.alphabet.union(&b.alphabet).cloned();
    let mut prod = TimedAutomaton::new(alphabet, locations, clocks, cross(&ta.initial, &b.initial), cross(&ta.finals, &b.finals), edges)?;
    prod.unambiguous = ta.unambiguous && b.unambiguous;
    WeightedTimedAutomaton::new(prod, a.monoid.clone(), lw, ew)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LanguageClass {
    Sequential,
    Deterministic,
    Unambiguous,
    Recognizable,
    Sentence,
}

impl LanguageClass {
    /// Classes that guarantee at most one run per word.
    pub fn is_unambiguous(self) -> bool {
        matches!(self, LanguageClass::Sequential | LanguageClass::Deterministic | LanguageClass::Unambiguous)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Language {
    Automaton(TimedAutomaton),
    Sentence(RdlFormula),
}

/// `(Γ, h, g, L)` with `‖·‖ = h((val ∘ g) ∩ L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NivatTriple {
    pub gamma: Vec<String>,
    pub h: BTreeMap<String, String>,
    pub g: BTreeMap<String, (Weight, Weight)>,
    pub language: Language,
    pub class: LanguageClass,
}

impl NivatTriple {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let gamma: BTreeSet<&String> = self.gamma.iter().collect();
        if gamma.len() != self.gamma.len() {
            errs.push("duplicate letters in the auxiliary alphabet".to_string());
        }
        for gm in &self.gamma {
            if !self.h.contains_key(gm) {
                errs.push(format!("h undefined on `{gm}`"));
            }
            if !self.g.contains_key(gm) {
                errs.push(format!("g undefined on `{gm}`"));
            }
        }
        match (&self.language, self.class) {
            (Language::Automaton(a), class) => {
                if let Err(Error::Validation(v)) = a.validate() {
                    errs.extend(v);
                }
                for l in &a.alphabet {
                    if !gamma.contains(l) {
                        errs.push(format!("language letter `{l}` not in the auxiliary alphabet"));
                    }
                }
                let c = classify_automaton(a);
                match class {
                    LanguageClass::Sentence => errs.push("class `sentence` needs a sentence language".into()),
                    LanguageClass::Sequential if !c.sequential => errs.push("language automaton is not sequential".into()),
                    LanguageClass::Deterministic if !c.deterministic => errs.push("language automaton is not deterministic".into()),
                    _ => {}
                }
            }
            (Language::Sentence(phi), class) => {
                if class != LanguageClass::Sentence {
                    errs.push("a sentence language must have class `sentence`".into());
                }
                if !phi.is_sentence() {
                    errs.push("language formula has free variables".into());
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn contains(&self, v: &TimedWord) -> Result<bool> {
        match &self.language {
            Language::Automaton(a) => Ok(!enumerate_runs(a, v).is_empty()),
            Language::Sentence(phi) => rdl_model_check(phi, v, &Assignment::new()),
        }
    }
}

fn fresh_location(a: &TimedAutomaton, base: &str) -> String {
    let mut name = base.to_string();
    while a.locations.contains(&name) {
        name.push('\'');
    }
    name
}

/// `Γ = E`, `h(e) = label(e)`, `g(e) = (wt(source e), wt(e))`; the language
/// relabels every edge by its own id. A fresh initial location keeps the
/// result sequential when there is not exactly one initial location.
pub fn nivat_decompose(a: &WeightedTimedAutomaton) -> NivatTriple {
    let ta = &a.automaton;
    let gamma: Vec<String> = ta.edges.iter().map(|e| e.id.clone()).collect();
    let h = ta.edges.iter().map(|e| (e.id.clone(), e.label.clone())).collect();
    let g = ta
        .edges
        .iter()
        .map(|e| (e.id.clone(), (a.location_weights[&e.source].clone(), a.edge_weights[&e.id].clone())))
        .collect();
    let mut lang = ta.clone();
    lang.alphabet = gamma.iter().cloned().collect();
    for e in &mut lang.edges {
        e.label = e.id.clone();
    }
    if ta.initial.len() != 1 {
        let iota = fresh_location(ta, "init");
        let copies: Vec<Edge> = ta
            .edges
            .iter()
            .filter(|e| ta.initial.contains(&e.source))
            .map(|e| Edge {
                id: format!("{}@{}", e.id, iota),
                source: iota.clone(),
                label: e.id.clone(),
                ..e.clone()
            })
            .collect();
        lang.locations.push(iota.clone());
        lang.edges.extend(copies);
        lang.initial = [iota].into();
    }
    lang.unambiguous = true;
    NivatTriple { gamma, h, g, language: Language::Automaton(lang), class: LanguageClass::Sequential }
}

/// Evaluates `h((val ∘ g) ∩ L)(w)` directly, enumerating the preimages of `w`.
pub fn nivat_eval(t: &NivatTriple, w: &TimedWord, m: &TimedValuationMonoid, cap: u128) -> Result<Weight> {
    let choices: Vec<Vec<&String>> = w
        .letters()
        .map(|a| t.gamma.iter().filter(|g| t.h.get(*g).map(String::as_str) == Some(a)).collect())
        .collect();
    let count = choices.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    if count > cap {
        return Err(Error::PreimageCap { count, cap });
    }
    let mut acc = m.zero.clone();
    if count == 0 {
        return Ok(acc);
    }
    let mut idx = vec![0usize; w.len()];
    loop {
        let letters: Vec<String> = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
        let v = w.with_letters(&letters);
        if t.contains(&v)? {
            let steps = letters
                .iter()
                .zip(w.delays())
                .map(|(g, d)| (t.g[g].0.clone(), t.g[g].1.clone(), d.clone()))
                .collect();
            acc = m.add(&acc, &m.valuate(&WeightPairWord::new(steps)?));
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(acc);
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `relabel(comp(Γ, g) ∩ L, h)`.
pub fn nivat_compose(t: &NivatTriple, m: &TimedValuationMonoid) -> Result<WeightedTimedAutomaton> {
    let lang = match &t.language {
        Language::Automaton(a) => a,
        Language::Sentence(_) => {
            return Err(Error::Unsupported(
                "composition needs the language as an automaton; evaluate sentence triples pointwise".into(),
            ))
        }
    };
    if !m.idempotent && !t.class.is_unambiguous() {
        return Err(Error::UnsoundComposition(format!(
            "monoid {m} is not idempotent and the language is only known to be {:?}",
            t.class
        )));
    }
    let mut lang = lang.clone();
    lang.unambiguous |= t.class.is_unambiguous();
    let comp = comp_automaton(&t.gamma, &t.g, m)?;
    relabel(&product_intersect(&comp, &lang)?, &t.h)
}
