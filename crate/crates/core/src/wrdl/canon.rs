use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::monoid::{TimedPvMonoid, Weight};
use crate::rdl::RdlFormula;

use super::{wrdl_classify, WrdlFormula};

/// A possibly negated opaque boolean formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: RdlFormula,
}

impl Literal {
    /// Peels negations off `atom`, flipping the polarity.
    pub fn new(mut positive: bool, mut atom: RdlFormula) -> Self {
        while let RdlFormula::Not(inner) = atom {
            positive = !positive;
            atom = *inner;
        }
        Literal { positive, atom }
    }

    pub fn to_formula(&self) -> RdlFormula {
        if self.positive {
            self.atom.clone()
        } else {
            self.atom.clone().not()
        }
    }

    fn clashes(&self, other: &Literal) -> bool {
        if self.atom == other.atom {
            return self.positive != other.positive;
        }
        match (&self.atom, &other.atom) {
            (RdlFormula::Letter { letter: a, var: x }, RdlFormula::Letter { letter: b, var: y }) => {
                self.positive && other.positive && x == y && a != b
            }
            _ => false,
        }
    }
}

/// Conjunction of literals; empty means TRUE.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Guard {
    pub literals: Vec<Literal>,
}

impl Guard {
    pub fn tt() -> Self {
        Guard::default()
    }

    pub fn of(lit: Literal) -> Self {
        Guard { literals: vec![lit] }
    }

    /// `None` when the conjunction is trivially contradictory.
    pub fn and(&self, other: &Guard) -> Option<Guard> {
        let mut out = self.clone();
        for l in &other.literals {
            if out.literals.iter().any(|k| k.clashes(l)) {
                return None;
            }
            if !out.literals.contains(l) {
                out.literals.push(l.clone());
            }
        }
        Some(out)
    }

    pub fn to_formula(&self) -> RdlFormula {
        RdlFormula::and_all(self.literals.iter().map(Literal::to_formula))
    }

    pub fn map_atoms(&self, f: &impl Fn(&RdlFormula) -> RdlFormula) -> Guard {
        Guard { literals: self.literals.iter().map(|l| Literal::new(l.positive, f(&l.atom))).collect() }
    }
}

/// Branches `(guard, value)` with exactly one guard holding everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    pub branches: Vec<(Guard, Weight)>,
}

impl StepFunction {
    fn product(&self, other: &StepFunction, op: impl Fn(&Weight, &Weight) -> Weight) -> StepFunction {
        let mut branches = Vec::new();
        for (g, v) in &self.branches {
            for (h, u) in &other.branches {
                if let Some(gh) = g.and(h) {
                    branches.push((gh, op(v, u)));
                }
            }
        }
        StepFunction { branches }
    }
}

/// Normal form of an almost boolean formula.
pub fn to_step_function(phi: &WrdlFormula, m: &TimedPvMonoid) -> Result<StepFunction> {
    Ok(match phi {
        WrdlFormula::Const(w) => StepFunction { branches: vec![(Guard::tt(), w.clone())] },
        WrdlFormula::Bool(b) => StepFunction {
            branches: vec![
                (Guard::of(Literal::new(true, b.clone())), m.one.clone()),
                (Guard::of(Literal::new(false, b.clone())), m.zero().clone()),
            ],
        },
        WrdlFormula::Or(a, b) => to_step_function(a, m)?.product(&to_step_function(b, m)?, |x, y| m.base.add(x, y)),
        WrdlFormula::And(a, b) => to_step_function(a, m)?.product(&to_step_function(b, m)?, |x, y| m.diamond(x, y)),
        _ => return Err(Error::Fragment(format!("not almost boolean: {phi}"))),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub guard: Guard,
    pub first: Weight,
    pub second: Weight,
}

/// `∃V. ∀y.(⋁ B(βᵢ) ∧ mᵢ, ⋁ B(βᵢ) ∧ m′ᵢ)` with exclusive, exhaustive guards.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSentence {
    pub vars: Vec<String>,
    pub y: String,
    pub branches: Vec<Branch>,
}

impl CanonicalSentence {
    pub fn to_formula(&self) -> WrdlFormula {
        let side = |pick: &dyn Fn(&Branch) -> Weight| {
            WrdlFormula::or_all(
                self.branches
                    .iter()
                    .map(|b| WrdlFormula::Bool(b.guard.to_formula()).and(WrdlFormula::Const(pick(b)))),
            )
            .expect("canonical sentences have at least one branch")
        };
        let body = WrdlFormula::forall(self.y.clone(), side(&|b| b.first.clone()), side(&|b| b.second.clone()));
        self.vars.iter().rev().fold(body, |acc, x| WrdlFormula::exists_set(x.clone(), acc))
    }

    pub fn guards(&self) -> Vec<RdlFormula> {
        self.branches.iter().map(|b| b.guard.to_formula()).collect()
    }
}

struct Fresh {
    used: BTreeSet<String>,
}

impl Fresh {
    fn next(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        let mut k = 1;
        while self.used.contains(&name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        self.used.insert(name.clone());
        name
    }
}

struct Canon<'a> {
    m: &'a TimedPvMonoid,
    fresh: Fresh,
    y: String,
}

struct Partial {
    vars: Vec<String>,
    branches: Vec<Branch>,
}

fn rename_so(phi: &WrdlFormula, from: &str, to: &str) -> WrdlFormula {
    match phi {
        WrdlFormula::Bool(b) => WrdlFormula::Bool(b.rename_so(from, to)),
        WrdlFormula::Const(_) => phi.clone(),
        WrdlFormula::Or(a, b) => rename_so(a, from, to).or(rename_so(b, from, to)),
        WrdlFormula::And(a, b) => rename_so(a, from, to).and(rename_so(b, from, to)),
        WrdlFormula::ExistsFO(x, a) => WrdlFormula::exists(x.clone(), rename_so(a, from, to)),
        WrdlFormula::ForallFO(x, a, b) => WrdlFormula::forall(x.clone(), rename_so(a, from, to), rename_so(b, from, to)),
        WrdlFormula::ExistsSO(x, _) if x == from => phi.clone(),
        WrdlFormula::ExistsSO(x, a) => WrdlFormula::exists_set(x.clone(), rename_so(a, from, to)),
    }
}

/// `∃u∃v. X(u) ∧ X(v) ∧ ¬(u ≤ v ∧ v ≤ u)`.
pub(crate) fn at_least_two(set: &str, u: &str, v: &str) -> RdlFormula {
    let distinct = RdlFormula::leq(u, v).and(RdlFormula::leq(v, u)).not();
    RdlFormula::exists(u, RdlFormula::exists(v, RdlFormula::in_set(set, u).and(RdlFormula::in_set(set, v)).and(distinct)))
}

impl Canon<'_> {
    fn killed(&self, guard: Guard) -> Branch {
        Branch { guard, first: self.m.one.clone(), second: self.m.zero().clone() }
    }

    fn run(&mut self, phi: &WrdlFormula) -> Result<Partial> {
        if let Some(beta) = phi.as_boolean() {
            let kept = Branch { guard: Guard::of(Literal::new(true, beta.clone())), first: self.m.one.clone(), second: self.m.one.clone() };
            let killed = self.killed(Guard::of(Literal::new(false, beta)));
            return Ok(Partial { vars: vec![], branches: vec![kept, killed] });
        }
        match phi {
            WrdlFormula::ForallFO(x, a, b) => {
                let sa = to_step_function(a, self.m)?;
                let sb = to_step_function(b, self.m)?;
                let y = self.y.clone();
                let mut branches = Vec::new();
                for (ga, va) in &sa.branches {
                    for (gb, vb) in &sb.branches {
                        if let Some(g) = ga.and(gb) {
                            let guard = g.map_atoms(&|f| f.rename_fo(x, &y));
                            branches.push(Branch { guard, first: va.clone(), second: vb.clone() });
                        }
                    }
                }
                Ok(Partial { vars: vec![], branches })
            }
            WrdlFormula::Or(a, b) => {
                let pa = self.run(a)?;
                let pb = self.run(b)?;
                let set = self.fresh.next("Z");
                let z = self.fresh.next("z");
                let selector = RdlFormula::exists(z.clone(), RdlFormula::in_set(set.clone(), z));
                let mut branches = Vec::new();
                for (p, positive) in [(&pa, false), (&pb, true)] {
                    for br in &p.branches {
                        let guard = Guard::of(Literal::new(positive, selector.clone())).and(&br.guard);
                        if let Some(guard) = guard {
                            branches.push(Branch { guard, ..br.clone() });
                        }
                    }
                }
                let mut vars = vec![set];
                vars.extend(pa.vars);
                vars.extend(pb.vars);
                Ok(Partial { vars, branches })
            }
            WrdlFormula::And(a, b) => {
                let (beta, other) = match (a.as_boolean(), b.as_boolean()) {
                    (Some(beta), _) => (beta, b),
                    (None, Some(beta)) => (beta, a),
                    _ => return Err(Error::Fragment(format!("conjunction without a boolean side: {phi}"))),
                };
                let p = self.run(other)?;
                let pos = Guard::of(Literal::new(true, beta.clone()));
                let mut branches: Vec<Branch> = p
                    .branches
                    .iter()
                    .filter_map(|br| pos.and(&br.guard).map(|guard| Branch { guard, ..br.clone() }))
                    .collect();
                branches.push(self.killed(Guard::of(Literal::new(false, beta))));
                Ok(Partial { vars: p.vars, branches })
            }
            WrdlFormula::ExistsSO(x, a) => {
                let fresh = self.fresh.next(x);
                let p = self.run(&rename_so(a, x, &fresh))?;
                let mut vars = vec![fresh];
                vars.extend(p.vars);
                Ok(Partial { vars, branches: p.branches })
            }
            WrdlFormula::ExistsFO(x, a) => {
                let p = self.run(a)?;
                let set = self.fresh.next("S");
                let xs = self.fresh.next(&format!("{x}s"));
                let u = self.fresh.next("u");
                let v = self.fresh.next("v");
                let pin = |f: &RdlFormula| {
                    if f.free_fo().contains(x) {
                        RdlFormula::exists(xs.clone(), RdlFormula::in_set(set.clone(), xs.clone()).and(f.rename_fo(x, &xs)))
                    } else {
                        f.clone()
                    }
                };
                let nonempty = RdlFormula::exists(u.clone(), RdlFormula::in_set(set.clone(), u.clone()));
                let two = at_least_two(&set, &u, &v);
                let single = Guard {
                    literals: vec![Literal::new(true, nonempty.clone()), Literal::new(false, two.clone())],
                };
                let mut branches: Vec<Branch> = p
                    .branches
                    .iter()
                    .filter_map(|br| single.and(&br.guard.map_atoms(&pin)).map(|guard| Branch { guard, ..br.clone() }))
                    .collect();
                branches.push(self.killed(Guard::of(Literal::new(false, nonempty.clone()))));
                branches.push(self.killed(Guard {
                    literals: vec![Literal::new(true, nonempty), Literal::new(true, two)],
                }));
                let mut vars = vec![set];
                vars.extend(p.vars);
                Ok(Partial { vars, branches })
            }
            WrdlFormula::Const(_) => Err(Error::Fragment(format!("constant outside a universal quantifier: {phi}"))),
            other => Err(Error::Fragment(format!("not syntactically restricted: {other}"))),
        }
    }
}

/// Rewrites a syntactically restricted sentence over an idempotent pv-monoid
/// into canonical form.
pub fn canonicalize(phi: &WrdlFormula, m: &TimedPvMonoid) -> Result<CanonicalSentence> {
    if !m.base.idempotent {
        return Err(Error::Fragment(format!("canonical forms need an idempotent monoid, {} is not", m.id())));
    }
    let c = wrdl_classify(phi);
    if !c.sentence {
        return Err(Error::Fragment("formula has free variables".into()));
    }
    if !c.syntactically_restricted {
        return Err(Error::Fragment(format!("not syntactically restricted: {phi}")));
    }
    let mut fresh = Fresh { used: phi.names() };
    let y = fresh.next("y");
    let mut canon = Canon { m, fresh, y };
    let p = canon.run(phi)?;
    Ok(CanonicalSentence { vars: p.vars, y: canon.y, branches: p.branches })
}
