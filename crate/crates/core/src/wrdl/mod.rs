//! Weighted relative distance logic over timed pv-monoids.

mod canon;
mod eval;
mod parse;
mod translate;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::monoid::Weight;
use crate::rdl::RdlFormula;

pub(crate) use canon::at_least_two;
pub use canon::{canonicalize, to_step_function, Branch, CanonicalSentence, Guard, Literal, StepFunction};
pub use eval::wrdl_eval;
pub use parse::parse_wrdl;
pub use translate::{nivat_to_sentence, sentence_to_nivat};

#[derive(Debug, Clone, PartialEq)]
pub enum WrdlFormula {
    Bool(RdlFormula),
    Const(Weight),
    Or(Box<WrdlFormula>, Box<WrdlFormula>),
    And(Box<WrdlFormula>, Box<WrdlFormula>),
    ExistsFO(String, Box<WrdlFormula>),
    ForallFO(String, Box<WrdlFormula>, Box<WrdlFormula>),
    ExistsSO(String, Box<WrdlFormula>),
}

use WrdlFormula as W;

impl WrdlFormula {
    pub fn boolean(beta: RdlFormula) -> Self {
        W::Bool(beta)
    }

    pub fn constant(m: Weight) -> Self {
        W::Const(m)
    }

    pub fn or(self, other: Self) -> Self {
        W::Or(Box::new(self), Box::new(other))
    }

    pub fn and(self, other: Self) -> Self {
        W::And(Box::new(self), Box::new(other))
    }

    pub fn exists(x: impl Into<String>, body: Self) -> Self {
        W::ExistsFO(x.into(), Box::new(body))
    }

    pub fn exists_set(x: impl Into<String>, body: Self) -> Self {
        W::ExistsSO(x.into(), Box::new(body))
    }

    pub fn forall(x: impl Into<String>, first: Self, second: Self) -> Self {
        W::ForallFO(x.into(), Box::new(first), Box::new(second))
    }

    /// Left-nested disjunction; `None` when `items` is empty.
    pub fn or_all(items: impl IntoIterator<Item = Self>) -> Option<Self> {
        items.into_iter().reduce(W::or)
    }

    pub fn free_fo(&self) -> BTreeSet<String> {
        let (mut fo, mut so) = (BTreeSet::new(), BTreeSet::new());
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut fo, &mut so);
        fo
    }

    pub fn free_so(&self) -> BTreeSet<String> {
        let (mut fo, mut so) = (BTreeSet::new(), BTreeSet::new());
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut fo, &mut so);
        so
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
        match self {
            W::Bool(b) => {
                out_fo.extend(b.free_fo().into_iter().filter(|x| !fo.contains(x)));
                out_so.extend(b.free_so().into_iter().filter(|x| !so.contains(x)));
            }
            W::Const(_) => {}
            W::Or(a, b) | W::And(a, b) => {
                a.collect_free(fo, so, out_fo, out_so);
                b.collect_free(fo, so, out_fo, out_so);
            }
            W::ExistsFO(x, a) => {
                fo.push(x.clone());
                a.collect_free(fo, so, out_fo, out_so);
                fo.pop();
            }
            W::ForallFO(x, a, b) => {
                fo.push(x.clone());
                a.collect_free(fo, so, out_fo, out_so);
                b.collect_free(fo, so, out_fo, out_so);
                fo.pop();
            }
            W::ExistsSO(x, a) => {
                so.push(x.clone());
                a.collect_free(fo, so, out_fo, out_so);
                so.pop();
            }
        }
    }

    /// Built from `B(β)` and constants with `|` and `&` only.
    pub fn is_almost_boolean(&self) -> bool {
        match self {
            W::Bool(_) | W::Const(_) => true,
            W::Or(a, b) | W::And(a, b) => a.is_almost_boolean() && b.is_almost_boolean(),
            _ => false,
        }
    }

    pub fn has_constants(&self) -> bool {
        match self {
            W::Const(_) => true,
            W::Bool(_) => false,
            W::Or(a, b) | W::And(a, b) | W::ForallFO(_, a, b) => a.has_constants() || b.has_constants(),
            W::ExistsFO(_, a) | W::ExistsSO(_, a) => a.has_constants(),
        }
    }

    /// The boolean formula of a constant-free almost boolean formula.
    pub fn as_boolean(&self) -> Option<RdlFormula> {
        match self {
            W::Bool(b) => Some(b.clone()),
            W::Or(a, b) => Some(a.as_boolean()?.or(b.as_boolean()?)),
            W::And(a, b) => Some(a.as_boolean()?.and(b.as_boolean()?)),
            _ => None,
        }
    }

    fn restricted(&self, under_forall: bool) -> bool {
        match self {
            W::Bool(_) => true,
            W::Const(_) => under_forall,
            W::Or(a, b) => a.restricted(under_forall) && b.restricted(under_forall),
            W::And(a, b) => {
                let shape = (a.is_almost_boolean() && b.is_almost_boolean())
                    || matches!(**a, W::Bool(_))
                    || matches!(**b, W::Bool(_));
                shape && a.restricted(under_forall) && b.restricted(under_forall)
            }
            W::ExistsFO(_, a) | W::ExistsSO(_, a) => a.restricted(under_forall),
            W::ForallFO(_, a, b) => a.is_almost_boolean() && b.is_almost_boolean(),
        }
    }

    pub fn bool_payloads(&self) -> Vec<&RdlFormula> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let W::Bool(b) = f {
                out.push(b);
            }
        });
        out
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a WrdlFormula)) {
        f(self);
        match self {
            W::Or(a, b) | W::And(a, b) | W::ForallFO(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            W::ExistsFO(_, a) | W::ExistsSO(_, a) => a.walk(f),
            _ => {}
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            W::Bool(b) => out.extend(rdl_names(b)),
            W::ExistsFO(x, _) | W::ExistsSO(x, _) | W::ForallFO(x, _, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }
}

pub(crate) fn rdl_names(b: &RdlFormula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    b.walk(&mut |f| match f {
        RdlFormula::Letter { var, .. } => {
            out.insert(var.clone());
        }
        RdlFormula::Leq(x, y) => {
            out.insert(x.clone());
            out.insert(y.clone());
        }
        RdlFormula::InSet { set, var } | RdlFormula::Dist { set, var, .. } => {
            out.insert(set.clone());
            out.insert(var.clone());
        }
        RdlFormula::ExistsFO(x, _) | RdlFormula::ExistsSO(x, _) => {
            out.insert(x.clone());
        }
        _ => {}
    });
    out
}

impl fmt::Display for WrdlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            W::Bool(b) => write!(f, "B({b})"),
            W::Const(m) => write!(f, "{m}"),
            W::Or(a, b) => write!(f, "({a} | {b})"),
            W::And(a, b) => write!(f, "({a} & {b})"),
            W::ExistsFO(x, a) => write!(f, "(ex {x}. {a})"),
            W::ForallFO(x, a, b) => write!(f, "all {x}.({a}, {b})"),
            W::ExistsSO(x, a) => write!(f, "(EX {x}. {a})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WrdlClassification {
    pub sentence: bool,
    pub almost_boolean: bool,
    pub syntactically_restricted: bool,
}

pub fn wrdl_classify(phi: &WrdlFormula) -> WrdlClassification {
    WrdlClassification {
        sentence: phi.is_sentence(),
        almost_boolean: phi.is_almost_boolean(),
        syntactically_restricted: phi.restricted(false),
    }
}
