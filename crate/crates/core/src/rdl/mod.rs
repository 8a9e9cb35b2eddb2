//! Relative distance logic over finite timed words, restricted to past
//! distance predicates.

mod check;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::timed::Relation;

pub use check::{rdl_model_check, Assignment};
pub(crate) use check::{Compiler, Eval, Node};
pub use parse::parse_rdl;
pub(crate) use parse::{parse_or, Cursor};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RdlFormula {
    True,
    Letter { letter: String, var: String },
    Leq(String, String),
    InSet { set: String, var: String },
    /// `d←^{⋈c}(X, x)`.
    Dist { rel: Relation, bound: u32, set: String, var: String },
    Not(Box<RdlFormula>),
    Or(Box<RdlFormula>, Box<RdlFormula>),
    ExistsFO(String, Box<RdlFormula>),
    ExistsSO(String, Box<RdlFormula>),
}

use RdlFormula as F;

impl RdlFormula {
    pub fn ff() -> Self {
        F::True.not()
    }

    pub fn letter(letter: impl Into<String>, var: impl Into<String>) -> Self {
        F::Letter { letter: letter.into(), var: var.into() }
    }

    pub fn in_set(set: impl Into<String>, var: impl Into<String>) -> Self {
        F::InSet { set: set.into(), var: var.into() }
    }

    pub fn leq(x: impl Into<String>, y: impl Into<String>) -> Self {
        F::Leq(x.into(), y.into())
    }

    pub fn dist(rel: Relation, bound: u32, set: impl Into<String>, var: impl Into<String>) -> Self {
        F::Dist { rel, bound, set: set.into(), var: var.into() }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        F::Not(Box::new(self))
    }

    pub fn or(self, other: Self) -> Self {
        F::Or(Box::new(self), Box::new(other))
    }

    /// `¬(¬φ ∨ ¬ψ)`.
    pub fn and(self, other: Self) -> Self {
        self.not().or(other.not()).not()
    }

    pub fn exists(x: impl Into<String>, body: Self) -> Self {
        F::ExistsFO(x.into(), Box::new(body))
    }

    pub fn exists_set(x: impl Into<String>, body: Self) -> Self {
        F::ExistsSO(x.into(), Box::new(body))
    }

    /// `¬∃x.¬φ`.
    pub fn forall(x: impl Into<String>, body: Self) -> Self {
        F::exists(x, body.not()).not()
    }

    pub fn or_all(items: impl IntoIterator<Item = Self>) -> Self {
        items.into_iter().reduce(F::or).unwrap_or_else(F::ff)
    }

    pub fn and_all(items: impl IntoIterator<Item = Self>) -> Self {
        items.into_iter().reduce(F::and).unwrap_or(F::True)
    }

    /// Strips a double negation, if any.
    pub fn negate(self) -> Self {
        match self {
            F::Not(inner) => *inner,
            other => other.not(),
        }
    }

    pub fn free_fo(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut out, &mut BTreeSet::new());
        out
    }

    pub fn free_so(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut BTreeSet::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_fo().is_empty() && self.free_so().is_empty()
    }

    fn collect_free(
        &self,
        fo: &mut Vec<String>,
        so: &mut Vec<String>,
        out_fo: &mut BTreeSet<String>,
        out_so: &mut BTreeSet<String>,
    ) {
        let mut see_fo = |v: &String, fo: &Vec<String>| {
            if !fo.contains(v) {
                out_fo.insert(v.clone());
            }
        };
        match self {
            F::True => {}
            F::Letter { var, .. } => see_fo(var, fo),
            F::Leq(x, y) => {
                see_fo(x, fo);
                see_fo(y, fo);
            }
            F::InSet { set, var } | F::Dist { set, var, .. } => {
                see_fo(var, fo);
                if !so.contains(set) {
                    out_so.insert(set.clone());
                }
            }
            F::Not(a) => a.collect_free(fo, so, out_fo, out_so),
            F::Or(a, b) => {
                a.collect_free(fo, so, out_fo, out_so);
                b.collect_free(fo, so, out_fo, out_so);
            }
            F::ExistsFO(x, a) => {
                fo.push(x.clone());
                a.collect_free(fo, so, out_fo, out_so);
                fo.pop();
            }
            F::ExistsSO(x, a) => {
                so.push(x.clone());
                a.collect_free(fo, so, out_fo, out_so);
                so.pop();
            }
        }
    }

    /// Second-order variables occurring in a distance predicate.
    pub fn distance_sets(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let F::Dist { set, .. } = f {
                out.insert(set.clone());
            }
        });
        out
    }

    pub fn letters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let F::Letter { letter, .. } = f {
                out.insert(letter.clone());
            }
        });
        out
    }

    pub fn walk(&self, f: &mut impl FnMut(&RdlFormula)) {
        f(self);
        match self {
            F::Not(a) | F::ExistsFO(_, a) | F::ExistsSO(_, a) => a.walk(f),
            F::Or(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            _ => {}
        }
    }

    /// Replaces free occurrences of the first-order variable `from` by `to`.
    /// `to` must not be captured; callers pass fresh names.
    pub fn rename_fo(&self, from: &str, to: &str) -> Self {
        let r = |v: &String| if v == from { to.to_string() } else { v.clone() };
        match self {
            F::True => F::True,
            F::Letter { letter, var } => F::Letter { letter: letter.clone(), var: r(var) },
            F::Leq(x, y) => F::Leq(r(x), r(y)),
            F::InSet { set, var } => F::InSet { set: set.clone(), var: r(var) },
            F::Dist { rel, bound, set, var } => F::Dist { rel: *rel, bound: *bound, set: set.clone(), var: r(var) },
            F::Not(a) => a.rename_fo(from, to).not(),
            F::Or(a, b) => a.rename_fo(from, to).or(b.rename_fo(from, to)),
            F::ExistsFO(x, a) if x == from => self.clone(),
            F::ExistsFO(x, a) => F::exists(x.clone(), a.rename_fo(from, to)),
            F::ExistsSO(x, a) => F::exists_set(x.clone(), a.rename_fo(from, to)),
        }
    }

    /// Replaces free occurrences of the second-order variable `from` by `to`.
    pub fn rename_so(&self, from: &str, to: &str) -> Self {
        let r = |v: &String| if v == from { to.to_string() } else { v.clone() };
        match self {
            F::InSet { set, var } => F::InSet { set: r(set), var: var.clone() },
            F::Dist { rel, bound, set, var } => F::Dist { rel: *rel, bound: *bound, set: r(set), var: var.clone() },
            F::Not(a) => a.rename_so(from, to).not(),
            F::Or(a, b) => a.rename_so(from, to).or(b.rename_so(from, to)),
            F::ExistsFO(x, a) => F::exists(x.clone(), a.rename_so(from, to)),
            F::ExistsSO(x, a) if x == from => self.clone(),
            F::ExistsSO(x, a) => F::exists_set(x.clone(), a.rename_so(from, to)),
            other => other.clone(),
        }
    }

    /// Rewrites letter predicates.
    pub fn map_letters(&self, f: &impl Fn(&str, &str) -> RdlFormula) -> Self {
        match self {
            F::Letter { letter, var } => f(letter, var),
            F::Not(a) => a.map_letters(f).not(),
            F::Or(a, b) => a.map_letters(f).or(b.map_letters(f)),
            F::ExistsFO(x, a) => F::exists(x.clone(), a.map_letters(f)),
            F::ExistsSO(x, a) => F::exists_set(x.clone(), a.map_letters(f)),
            other => other.clone(),
        }
    }
}

impl fmt::Display for RdlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            F::True => f.write_str("true"),
            F::Letter { letter, var } => write!(f, "P[{letter}]({var})"),
            F::Leq(x, y) => write!(f, "{x} <= {y}"),
            F::InSet { set, var } => write!(f, "{set}({var})"),
            F::Dist { rel, bound, set, var } => write!(f, "dpast[{rel}{bound}]({set},{var})"),
            F::Not(a) => match **a {
                F::True | F::Letter { .. } | F::InSet { .. } | F::Dist { .. } | F::Not(_) => write!(f, "!{a}"),
                _ => write!(f, "!({a})"),
            },
            F::Or(a, b) => write!(f, "({a} | {b})"),
            F::ExistsFO(x, a) => write!(f, "(ex {x}. {a})"),
            F::ExistsSO(x, a) => write!(f, "(EX {x}. {a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RdlClassification {
    pub distance_sets: BTreeSet<String>,
    pub in_rdl_past: bool,
    pub exists_rdl_past_sentence: bool,
}

/// No set quantifier may bind a distance variable of the whole formula.
pub fn in_rdl_past(beta: &RdlFormula) -> bool {
    let d = beta.distance_sets();
    let mut ok = true;
    beta.walk(&mut |f| {
        if let F::ExistsSO(x, _) = f {
            ok &= !d.contains(x);
        }
    });
    ok
}

pub fn rdl_classify(beta: &RdlFormula) -> RdlClassification {
    let in_past = in_rdl_past(beta);
    let mut exists_sentence = false;
    if beta.is_sentence() {
        let mut prefix: Vec<&String> = Vec::new();
        let mut body = beta;
        loop {
            let vars: BTreeSet<String> = prefix.iter().map(|s| s.to_string()).collect();
            if vars.len() == prefix.len() && vars == body.distance_sets() && in_rdl_past(body) {
                exists_sentence = true;
                break;
            }
            match body {
                F::ExistsSO(x, inner) => {
                    prefix.push(x);
                    body = inner;
                }
                _ => break,
            }
        }
    }
    RdlClassification {
        distance_sets: beta.distance_sets(),
        in_rdl_past: in_past,
        exists_rdl_past_sentence: exists_sentence,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> RdlFormula {
        parse_rdl(s).unwrap()
    }

    #[test]
    fn classify_examples() {
        let c = rdl_classify(&p("ex x. dpast[<=2](X,x)"));
        assert_eq!(c.distance_sets, ["X".to_string()].into());
        assert!(c.in_rdl_past);
        assert!(!c.exists_rdl_past_sentence);

        let c = rdl_classify(&p("EX X. ex x. dpast[<=2](X,x)"));
        assert!(!c.in_rdl_past);
        assert!(c.exists_rdl_past_sentence);

        let c = rdl_classify(&p("EX X. EX Y. ex x. dpast[<=2](X,x) & Y(x)"));
        assert!(c.exists_rdl_past_sentence);
        let c = rdl_classify(&p("EX Y. EX X. ex x. dpast[<=2](X,x) & Y(x)"));
        assert!(!c.exists_rdl_past_sentence);
    }

    #[test]
    fn free_variables_respect_binders() {
        let f = p("ex x. X(x) & x <= y");
        assert_eq!(f.free_fo(), ["y".to_string()].into());
        assert_eq!(f.free_so(), ["X".to_string()].into());
        assert!(p("EX X. ex x. X(x)").is_sentence());
        let g = p("P[a](x) | ex x. P[b](x)").rename_fo("x", "z");
        assert_eq!(g, p("P[a](z) | ex x. P[b](x)"));
    }
}
