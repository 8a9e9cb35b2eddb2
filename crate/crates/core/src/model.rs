//! JSON interchange for automata, weighted automata, words, assignments and
//! Nivat triples. Rationals travel as strings.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monoid::{TimedValuationMonoid, Weight};
use crate::rdl::{parse_rdl, Assignment};
use crate::timed::{ClockConstraint, Edge, TimedAutomaton, TimedWord};
use crate::transform::{Language, LanguageClass, NivatTriple};
use crate::wta::WeightedTimedAutomaton;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeFile {
    pub id: String,
    pub source: String,
    pub label: String,
    #[serde(default = "tt")]
    pub guard: String,
    #[serde(default)]
    pub resets: Vec<String>,
    pub target: String,
}

fn tt() -> String {
    "true".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutomatonFile {
    pub alphabet: Vec<String>,
    pub locations: Vec<String>,
    #[serde(default)]
    pub clocks: Vec<String>,
    pub initial: Vec<String>,
    #[serde(rename = "final")]
    pub finals: Vec<String>,
    pub edges: Vec<EdgeFile>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unambiguous: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct WeightsFile {
    #[serde(default)]
    pub locations: BTreeMap<String, String>,
    #[serde(default)]
    pub edges: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WtaFile {
    #[serde(flatten)]
    pub automaton: AutomatonFile,
    pub monoid: String,
    pub weights: WeightsFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LanguageFile {
    Sentence(String),
    Automaton(AutomatonFile),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripleFile {
    pub gamma: Vec<String>,
    pub h: BTreeMap<String, String>,
    pub g: BTreeMap<String, (String, String)>,
    pub language: LanguageFile,
    pub class: LanguageClass,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AssignmentFile {
    #[serde(default)]
    pub fo: BTreeMap<String, usize>,
    #[serde(default)]
    pub so: BTreeMap<String, Vec<usize>>,
}

impl AutomatonFile {
    pub fn build(&self) -> Result<TimedAutomaton> {
        let mut errs = Vec::new();
        let mut edges = Vec::new();
        for e in &self.edges {
            match ClockConstraint::parse(&e.guard) {
                Ok(g) => edges.push(Edge::new(&e.id, &e.source, &e.label, g, e.resets.iter().cloned(), &e.target)),
                Err(err) => errs.push(format!("edge `{}`: {}", e.id, guard_message(&err))),
            }
        }
        let a = TimedAutomaton {
            alphabet: self.alphabet.iter().cloned().collect(),
            locations: self.locations.clone(),
            clocks: self.clocks.clone(),
            initial: self.initial.iter().cloned().collect(),
            finals: self.finals.iter().cloned().collect(),
            edges,
            unambiguous: self.unambiguous,
        };
        if let Err(Error::Validation(more)) = a.validate() {
            errs.extend(more);
        }
        if errs.is_empty() {
            Ok(a)
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn from_automaton(a: &TimedAutomaton) -> Self {
        AutomatonFile {
            alphabet: a.alphabet.iter().cloned().collect(),
            locations: a.locations.clone(),
            clocks: a.clocks.clone(),
            initial: a.initial.iter().cloned().collect(),
            finals: a.finals.iter().cloned().collect(),
            edges: a
                .edges
                .iter()
                .map(|e| EdgeFile {
                    id: e.id.clone(),
                    source: e.source.clone(),
                    label: e.label.clone(),
                    guard: e.guard.to_string(),
                    resets: e.resets.iter().cloned().collect(),
                    target: e.target.clone(),
                })
                .collect(),
            unambiguous: a.unambiguous,
        }
    }
}

fn guard_message(e: &Error) -> String {
    match e {
        Error::Validation(v) => v.join("; "),
        other => other.to_string(),
    }
}

impl WtaFile {
    pub fn build(&self) -> Result<WeightedTimedAutomaton> {
        let m = TimedValuationMonoid::parse(&self.monoid)?;
        let ta = self.automaton.build()?;
        let mut errs = Vec::new();
        let mut parse = |map: &BTreeMap<String, String>| {
            map.iter()
                .filter_map(|(k, v)| match Weight::parse(v) {
                    Ok(w) => Some((k.clone(), w)),
                    Err(_) => {
                        errs.push(format!("weight of `{k}`: cannot parse `{v}`"));
                        None
                    }
                })
                .collect::<BTreeMap<_, _>>()
        };
        let lw = parse(&self.weights.locations);
        let ew = parse(&self.weights.edges);
        if !errs.is_empty() {
            return Err(Error::Validation(errs));
        }
        WeightedTimedAutomaton::new(ta, m, lw, ew)
    }

    pub fn from_wta(a: &WeightedTimedAutomaton) -> Self {
        WtaFile {
            automaton: AutomatonFile::from_automaton(&a.automaton),
            monoid: a.monoid.id.clone(),
            weights: WeightsFile {
                locations: a.location_weights.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
                edges: a.edge_weights.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            },
        }
    }
}

impl TripleFile {
    pub fn build(&self) -> Result<NivatTriple> {
        let mut g = BTreeMap::new();
        for (k, (a, b)) in &self.g {
            g.insert(k.clone(), (Weight::parse(a)?, Weight::parse(b)?));
        }
        let language = match &self.language {
            LanguageFile::Sentence(s) => Language::Sentence(parse_rdl(s)?),
            LanguageFile::Automaton(a) => Language::Automaton(a.build()?),
        };
        let t = NivatTriple { gamma: self.gamma.clone(), h: self.h.clone(), g, language, class: self.class };
        t.validate()?;
        Ok(t)
    }

    pub fn from_triple(t: &NivatTriple) -> Self {
        TripleFile {
            gamma: t.gamma.clone(),
            h: t.h.clone(),
            g: t.g.iter().map(|(k, (a, b))| (k.clone(), (a.to_string(), b.to_string()))).collect(),
            language: match &t.language {
                Language::Sentence(s) => LanguageFile::Sentence(s.to_string()),
                Language::Automaton(a) => LanguageFile::Automaton(AutomatonFile::from_automaton(a)),
            },
            class: t.class,
        }
    }
}

impl AssignmentFile {
    pub fn build(&self) -> Assignment {
        let mut s = Assignment::new();
        for (x, i) in &self.fo {
            s = s.with_fo(x, *i);
        }
        for (x, v) in &self.so {
            s = s.with_so(x, v.iter().copied());
        }
        s
    }
}

pub fn parse_word(json: &str) -> Result<TimedWord> {
    let pairs: Vec<(String, String)> = serde_json::from_str(json)?;
    TimedWord::parse_pairs(&pairs)
}

pub fn word_json(w: &TimedWord) -> serde_json::Value {
    serde_json::json!(w.to_pairs())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_automaton(path: &Path) -> Result<TimedAutomaton> {
    serde_json::from_str::<AutomatonFile>(&read(path)?)?.build()
}

pub fn load_wta(path: &Path) -> Result<WeightedTimedAutomaton> {
    serde_json::from_str::<WtaFile>(&read(path)?)?.build()
}

pub fn load_triple(path: &Path) -> Result<NivatTriple> {
    serde_json::from_str::<TripleFile>(&read(path)?)?.build()
}

pub fn load_word(path: &Path) -> Result<TimedWord> {
    parse_word(&read(path)?)
}

pub fn load_assignment(path: &Path) -> Result<Assignment> {
    Ok(serde_json::from_str::<AssignmentFile>(&read(path)?)?.build())
}

pub fn load_text(path: &Path) -> Result<String> {
    read(path).map(|s| s.trim().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;
    use crate::wta::behavior;

    #[test]
    fn wta_round_trips_through_json() {
        let a = fixtures::first_delay_scaled();
        let text = serde_json::to_string_pretty(&WtaFile::from_wta(&a)).unwrap();
        let back: WtaFile = serde_json::from_str(&text).unwrap();
        let b = back.build().unwrap();
        let w = parse_word(r#"[["a","3/2"],["b","1"]]"#).unwrap();
        assert_eq!(behavior(&a, &w), behavior(&b, &w));
        assert_eq!(w.delay(0), &q(3, 2));
    }

    #[test]
    fn validation_names_the_edge() {
        let text = r#"{"alphabet":["a"],"locations":["p"],"clocks":["x"],"initial":["p"],"final":["p"],
            "edges":[{"id":"e1","source":"p","label":"a","guard":"y<2","resets":[],"target":"p"},
                     {"id":"e2","source":"p","label":"a","guard":"x>=1/2","resets":[],"target":"p"}]}"#;
        let err = serde_json::from_str::<AutomatonFile>(text).unwrap().build().unwrap_err();
        let Error::Validation(msgs) = err else { panic!() };
        assert!(msgs.iter().any(|m| m.contains("e1") && m.contains("undeclared clock")), "{msgs:?}");
        assert!(msgs.iter().any(|m| m.contains("e2") && m.contains("natural")), "{msgs:?}");
    }

    #[test]
    fn triple_with_sentence_language() {
        let text = r#"{"gamma":["c"],"h":{"c":"a"},"g":{"c":["1","2"]},"language":"ex x. P[c](x)","class":"sentence"}"#;
        let t = serde_json::from_str::<TripleFile>(text).unwrap().build().unwrap();
        let again = TripleFile::from_triple(&t).build().unwrap();
        assert_eq!(again.gamma, t.gamma);
        assert!(matches!(again.language, Language::Sentence(_)));
    }
}
