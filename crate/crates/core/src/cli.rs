//! Command-line front end. Each command returns a JSON value for stdout and
//! a one-line summary for stderr; `main` only prints them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gen::{random_sentence, random_word, random_wta, WtaShape};
use crate::model::{self, AutomatonFile, TripleFile, WtaFile};
use crate::monoid::{check_axioms, check_pv_axioms, valuate, TimedPvMonoid, TimedValuationMonoid, Weight, WeightPairWord};
use crate::optcost::{decide_avg_threshold, decide_sum_threshold, inf_cost};
use crate::rational::parse_q;
use crate::rdl::{parse_rdl, rdl_model_check, Assignment};
use crate::timed::{classify_automaton, enumerate_runs, TimedAutomaton, TimedWord};
use crate::transform::{comp_automaton, nivat_compose, nivat_decompose, nivat_eval, product_intersect, relabel, DEFAULT_PREIMAGE_CAP};
use crate::wrdl::{canonicalize, nivat_to_sentence, parse_wrdl, sentence_to_nivat, wrdl_classify, wrdl_eval, WrdlFormula};
use crate::wta::{behavior, run_weight, WeightedTimedAutomaton};

const TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "nivat", version, about = "Weighted timed automata, Nivat decompositions and weighted distance logic")]
pub struct Cli {
    /// Seed for every randomized command.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Upper bound on the preimages enumerated by `nivat-eval`.
    #[arg(long, global = true, default_value_t = DEFAULT_PREIMAGE_CAP)]
    pub cap_preimages: u128,
    /// Longest random word drawn by `fuzz`.
    #[arg(long, global = true, default_value_t = 4)]
    pub max_word_len: usize,
    /// Read word files as absolute timestamps instead of delays.
    #[arg(long, global = true)]
    pub timestamps: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Suite {
    /// behavior vs nivat-eval vs the recomposed automaton
    Nivat,
    /// wrdl-eval vs canonical form vs triple vs translated-back sentence
    Wrdl,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Valuate a weight-pair word `[[m, m', t], ...]`.
    Eval {
        #[arg(long)]
        monoid: String,
        #[arg(long)]
        word: PathBuf,
    },
    Behavior {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        word: PathBuf,
    },
    /// List the runs of an automaton (weighted or not) on a word.
    Runs {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        word: PathBuf,
    },
    Classify {
        #[arg(long)]
        model: PathBuf,
    },
    Relabel {
        #[arg(long)]
        model: PathBuf,
        /// JSON object mapping each letter of the model to a target letter.
        #[arg(long)]
        map: PathBuf,
    },
    Comp {
        #[arg(long)]
        monoid: String,
        /// JSON object `{letter: [m, m']}`.
        #[arg(long)]
        g: PathBuf,
    },
    Product {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        language: PathBuf,
    },
    Decompose {
        #[arg(long)]
        model: PathBuf,
    },
    Compose {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long)]
        monoid: String,
    },
    NivatEval {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long)]
        monoid: String,
        #[arg(long)]
        word: PathBuf,
    },
    RdlCheck {
        #[arg(long)]
        word: PathBuf,
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        assign: Option<PathBuf>,
    },
    WrdlEval {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        monoid: String,
        #[arg(long)]
        word: PathBuf,
        #[arg(long)]
        assign: Option<PathBuf>,
    },
    WrdlClassify {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, default_value = "sum0")]
        monoid: String,
    },
    Canonicalize {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        monoid: String,
    },
    ToNivat {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        monoid: String,
        /// Comma-separated alphabet; defaults to the letters of the formula.
        #[arg(long, value_delimiter = ',')]
        alphabet: Vec<String>,
    },
    FromNivat {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long)]
        monoid: String,
    },
    Infcost {
        model: PathBuf,
    },
    Decide {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        monoid: String,
        #[arg(long)]
        theta: String,
        #[arg(long, value_delimiter = ',')]
        alphabet: Vec<String>,
        /// Ask for `≤ θ` instead of `< θ`; reports whether the infimum is
        /// attained by a corner word.
        #[arg(long)]
        non_strict: bool,
    },
    CheckAxioms {
        #[arg(long)]
        monoid: String,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
    Fuzz {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: Value,
    pub summary: String,
}

fn out(json: Value, summary: impl Into<String>) -> Result<Output> {
    Ok(Output { json, summary: summary.into() })
}

fn weight_json(w: &Weight) -> Value {
    json!({ "value": w.to_string() })
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("model types serialize")
}

fn load_word(path: &Path, timestamps: bool) -> Result<TimedWord> {
    if !timestamps {
        return model::load_word(path);
    }
    let pairs: Vec<(String, String)> = serde_json::from_str(&model::load_text(path)?)?;
    let stamps = pairs.iter().map(|(a, t)| Ok((a.clone(), parse_q(t)?))).collect::<Result<Vec<_>>>()?;
    TimedWord::from_timestamps(stamps)
}

fn load_formula(path: &Path, m: &TimedPvMonoid) -> Result<WrdlFormula> {
    parse_wrdl(&model::load_text(path)?, m)
}

/// Either file kind; a `monoid` field marks a weighted automaton.
fn load_any_automaton(path: &Path) -> Result<TimedAutomaton> {
    let v: Value = serde_json::from_str(&model::load_text(path)?)?;
    if v.get("monoid").is_some() {
        Ok(serde_json::from_value::<WtaFile>(v)?.build()?.automaton)
    } else {
        serde_json::from_value::<AutomatonFile>(v)?.build()
    }
}

fn formula_letters(phi: &WrdlFormula) -> Vec<String> {
    let mut letters = std::collections::BTreeSet::new();
    for b in phi.bool_payloads() {
        letters.extend(b.letters());
    }
    letters.into_iter().collect()
}

fn alphabet_or_letters(given: &[String], phi: &WrdlFormula) -> Vec<String> {
    if !given.is_empty() {
        return given.to_vec();
    }
    let letters = formula_letters(phi);
    if letters.is_empty() {
        vec!["a".into()]
    } else {
        letters
    }
}

fn wta_out(a: &WeightedTimedAutomaton) -> Result<Output> {
    let s = format!("{} locations, {} edges", a.automaton.locations.len(), a.automaton.edges.len());
    out(to_value(&WtaFile::from_wta(a)), s)
}

pub fn run(cli: &Cli) -> Result<Output> {
    let ts = cli.timestamps;
    match &cli.command {
        Command::Eval { monoid, word } => {
            let m = TimedValuationMonoid::parse(monoid)?;
            let triples: Vec<(String, String, String)> = serde_json::from_str(&model::load_text(word)?)?;
            let steps = triples
                .iter()
                .map(|(a, b, t)| Ok((Weight::parse(a)?, Weight::parse(b)?, parse_q(t)?)))
                .collect::<Result<Vec<_>>>()?;
            let v = valuate(&m, &WeightPairWord::new(steps)?);
            out(weight_json(&v), format!("{}-valuation {v}", m.id))
        }
        Command::Behavior { model: p, word } => {
            let a = model::load_wta(p)?;
            let v = behavior(&a, &load_word(word, ts)?);
            out(weight_json(&v), format!("behavior {v}"))
        }
        Command::Runs { model: p, word } => {
            let text = model::load_text(p)?;
            let w = load_word(word, ts)?;
            let weighted = serde_json::from_str::<Value>(&text)?.get("monoid").is_some();
            let (ta, wta) = if weighted {
                let a = model::load_wta(p)?;
                (a.automaton.clone(), Some(a))
            } else {
                (load_any_automaton(p)?, None)
            };
            let runs: Vec<Value> = enumerate_runs(&ta, &w)
                .iter()
                .map(|r| {
                    let mut v = json!({ "locations": r.locations, "edges": r.edge_ids });
                    if let Some(a) = &wta {
                        v["weight"] = json!(run_weight(a, r).map(|x| x.to_string()).unwrap_or_else(|e| e.to_string()));
                    }
                    v
                })
                .collect();
            let n = runs.len();
            out(json!({ "runs": runs }), format!("{n} run(s)"))
        }
        Command::Classify { model: p } => {
            let c = classify_automaton(&load_any_automaton(p)?);
            out(to_value(&c), format!("sequential={} deterministic={}", c.sequential, c.deterministic))
        }
        Command::Relabel { model: p, map } => {
            let h: BTreeMap<String, String> = serde_json::from_str(&model::load_text(map)?)?;
            wta_out(&relabel(&model::load_wta(p)?, &h)?)
        }
        Command::Comp { monoid, g } => {
            let m = TimedValuationMonoid::parse(monoid)?;
            let raw: BTreeMap<String, (String, String)> = serde_json::from_str(&model::load_text(g)?)?;
            let mut gm = BTreeMap::new();
            for (k, (a, b)) in raw {
                gm.insert(k, (Weight::parse(&a)?, Weight::parse(&b)?));
            }
            let sigma: Vec<String> = gm.keys().cloned().collect();
            wta_out(&comp_automaton(&sigma, &gm, &m)?)
        }
        Command::Product { model: p, language } => {
            wta_out(&product_intersect(&model::load_wta(p)?, &load_any_automaton(language)?)?)
        }
        Command::Decompose { model: p } => {
            let t = nivat_decompose(&model::load_wta(p)?);
            let s = format!("|Γ| = {}, class {:?}", t.gamma.len(), t.class);
            out(to_value(&TripleFile::from_triple(&t)), s)
        }
        Command::Compose { triple, monoid } => {
            let m = TimedValuationMonoid::parse(monoid)?;
            wta_out(&nivat_compose(&model::load_triple(triple)?, &m)?)
        }
        Command::NivatEval { triple, monoid, word } => {
            let m = TimedValuationMonoid::parse(monoid)?;
            let v = nivat_eval(&model::load_triple(triple)?, &load_word(word, ts)?, &m, cli.cap_preimages)?;
            out(weight_json(&v), format!("nivat value {v}"))
        }
        Command::RdlCheck { word, formula, assign } => {
            let beta = parse_rdl(&model::load_text(formula)?)?;
            let sigma = match assign {
                Some(p) => model::load_assignment(p)?,
                None => Assignment::new(),
            };
            let holds = rdl_model_check(&beta, &load_word(word, ts)?, &sigma)?;
            out(json!({ "holds": holds }), if holds { "holds" } else { "does not hold" })
        }
        Command::WrdlEval { formula, monoid, word, assign } => {
            let m = TimedPvMonoid::parse(monoid)?;
            let sigma = match assign {
                Some(p) => model::load_assignment(p)?,
                None => Assignment::new(),
            };
            let v = wrdl_eval(&load_formula(formula, &m)?, &load_word(word, ts)?, &sigma, &m)?;
            out(weight_json(&v), format!("value {v}"))
        }
        Command::WrdlClassify { formula, monoid } => {
            let m = TimedPvMonoid::parse(monoid)?;
            let c = wrdl_classify(&load_formula(formula, &m)?);
            let s = format!(
                "sentence={} almost_boolean={} syntactically_restricted={}",
                c.sentence, c.almost_boolean, c.syntactically_restricted
            );
            out(to_value(&c), s)
        }
        Command::Canonicalize { formula, monoid } => {
            let m = TimedPvMonoid::parse(monoid)?;
            let c = canonicalize(&load_formula(formula, &m)?, &m)?;
            let s = format!("{} set variable(s), {} branch pair(s)", c.vars.len(), c.branches.len());
            out(json!({ "formula": c.to_formula().to_string() }), s)
        }
        Command::ToNivat { formula, monoid, alphabet } => {
            let m = TimedPvMonoid::parse(monoid)?;
            let phi = load_formula(formula, &m)?;
            let t = sentence_to_nivat(&canonicalize(&phi, &m)?, &alphabet_or_letters(alphabet, &phi), &m)?;
            let s = format!("|Γ| = {}", t.gamma.len());
            out(to_value(&TripleFile::from_triple(&t)), s)
        }
        Command::FromNivat { triple, monoid } => {
            let m = TimedPvMonoid::parse(monoid)?;
            let phi = nivat_to_sentence(&model::load_triple(triple)?, &m)?;
            out(json!({ "formula": phi.to_string() }), "sentence built")
        }
        Command::Infcost { model: p } => {
            let v = inf_cost(&model::load_wta(p)?)?;
            out(json!({ "infimum": v }), format!("infimum {v}"))
        }
        Command::Decide { formula, monoid, theta, alphabet, non_strict } => {
            let m = TimedPvMonoid::parse(monoid)?;
            let phi = load_formula(formula, &m)?;
            let sigma = alphabet_or_letters(alphabet, &phi);
            let theta = parse_q(theta)?;
            let d = match m.id() {
                "sum0" => decide_sum_threshold(&phi, &sigma, &theta)?,
                "avg0" => decide_avg_threshold(&phi, &sigma, &theta)?,
                other => return Err(Error::Unsupported(format!("threshold problems over {other}"))),
            };
            let summary = format!("infimum {} against {}", d.infimum, crate::rational::fmt_q(&d.threshold));
            if *non_strict {
                let witness = d.witness_at_most().map(model::word_json).unwrap_or(Value::Null);
                let v = json!({ "exists": d.exists_at_most(), "witness": witness, "attained": d.attained.is_some() });
                return out(v, summary);
            }
            let witness = d.witness.as_ref().map(model::word_json).unwrap_or(Value::Null);
            out(json!({ "exists": d.exists, "witness": witness }), summary)
        }
        Command::CheckAxioms { monoid, count } => {
            let report = match TimedPvMonoid::parse(monoid) {
                Ok(m) => check_pv_axioms(&m, cli.seed, *count),
                Err(_) => check_axioms(&TimedValuationMonoid::parse(monoid)?, cli.seed, *count),
            };
            let s = format!("{}: {} violation(s) in {} samples", report.monoid, report.violations.len(), report.samples);
            let mut v = to_value(&report);
            v["pass"] = json!(report.pass());
            out(v, s)
        }
        Command::Fuzz { suite, count } => {
            let (pass, failures) = fuzz(*suite, cli.seed, *count, cli.max_word_len, cli.cap_preimages);
            let fail = failures.len();
            let mut v = json!({ "pass": pass, "fail": fail });
            let mut s = format!("{pass} passed, {fail} failed");
            if fail > 0 {
                v["failures"] = json!(failures);
                s.push_str(&format!("; first: {}", failures[0]));
            }
            out(v, s)
        }
    }
}

fn same(a: &Weight, b: &Weight) -> bool {
    a.approx_eq(b, TOL)
}

fn nivat_case(rng: &mut ChaCha8Rng, k: usize, max_len: usize, cap: u128) -> std::result::Result<(), String> {
    let monoids = [
        TimedValuationMonoid::sum(),
        TimedValuationMonoid::avg(),
        TimedValuationMonoid::disc(0.5).expect("valid factor"),
        TimedValuationMonoid::prod(),
    ];
    let m = &monoids[k % monoids.len()];
    let shape = WtaShape::default();
    let a = random_wta(rng, m, &shape);
    let w = random_word(rng, &shape.alphabet, max_len);
    let t = nivat_decompose(&a);
    let direct = behavior(&a, &w);
    let via = nivat_eval(&t, &w, m, cap).map_err(|e| e.to_string())?;
    let back = nivat_compose(&t, m).map_err(|e| e.to_string())?;
    let again = behavior(&back, &w);
    if same(&direct, &via) && same(&direct, &again) {
        Ok(())
    } else {
        Err(format!("{} on {w}: behavior {direct}, nivat {via}, recomposed {again}", m.id))
    }
}

fn wrdl_case(rng: &mut ChaCha8Rng, k: usize, max_len: usize, cap: u128) -> std::result::Result<(), String> {
    let monoids = [TimedPvMonoid::sum0(), TimedPvMonoid::avg0(), TimedPvMonoid::disc0(0.5).expect("valid factor")];
    let m = &monoids[k % monoids.len()];
    let sigma = vec!["a".to_string(), "b".to_string()];
    let (text, phi) = random_sentence(rng, m);
    let err = |e: Error| format!("{text}: {e}");
    let canon = canonicalize(&phi, m).map_err(err)?;
    let t = sentence_to_nivat(&canon, &sigma, m).map_err(err)?;
    let back = nivat_to_sentence(&t, m).map_err(err)?;
    let canon = canon.to_formula();
    let none = Assignment::new();
    for _ in 0..3 {
        let w = random_word(rng, &sigma, max_len);
        let vals = [
            wrdl_eval(&phi, &w, &none, m),
            wrdl_eval(&canon, &w, &none, m),
            nivat_eval(&t, &w, &m.base, cap),
            wrdl_eval(&back, &w, &none, m),
        ]
        .into_iter()
        .collect::<Result<Vec<_>>>()
        .map_err(err)?;
        if !vals.iter().all(|v| same(v, &vals[0])) {
            let shown: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
            return Err(format!("{text} over {} on {w}: {}", m.id(), shown.join(" / ")));
        }
    }
    Ok(())
}

/// Runs `count` seeded cases; case `k` draws from its own stream so results
/// do not depend on evaluation order.
pub fn fuzz(suite: Suite, seed: u64, count: usize, max_len: usize, cap: u128) -> (usize, Vec<String>) {
    let mut pass = 0;
    let mut failures = Vec::new();
    for k in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let r = match suite {
            Suite::Nivat => nivat_case(&mut rng, k, max_len, cap),
            Suite::Wrdl => wrdl_case(&mut rng, k, max_len, cap),
        };
        match r {
            Ok(()) => pass += 1,
            Err(e) => failures.push(format!("case {k}: {e}")),
        }
    }
    (pass, failures)
}
