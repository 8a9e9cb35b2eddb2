use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::timed::{Relation, TimedWord};

use super::RdlFormula;

/// Positions are 1-based.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub fo: BTreeMap<String, usize>,
    pub so: BTreeMap<String, BTreeSet<usize>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_fo(mut self, x: &str, i: usize) -> Self {
        self.fo.insert(x.to_string(), i);
        self
    }

    pub fn with_so(mut self, x: &str, set: impl IntoIterator<Item = usize>) -> Self {
        self.so.insert(x.to_string(), set.into_iter().collect());
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut errs = Vec::new();
        for (x, &i) in &self.fo {
            if i == 0 || i > n {
                errs.push(format!("position {i} of `{x}` outside 1..{n}"));
            }
        }
        for (x, s) in &self.so {
            if let Some(i) = s.iter().find(|&&i| i == 0 || i > n) {
                errs.push(format!("position {i} in `{x}` outside 1..{n}"));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

/// Formula with variables resolved to slots.
pub(crate) enum Node {
    True,
    Letter(usize, usize),
    Leq(usize, usize),
    InSet(usize, usize),
    Dist(Relation, Q, usize, usize),
    Not(Box<Node>),
    Or(Box<Node>, Box<Node>),
    ExFo(usize, Box<Node>),
    ExSo(usize, Box<Node>),
}

pub(crate) struct Compiler<'a> {
    word: &'a TimedWord,
    sigma: &'a Assignment,
    fo_scope: Vec<(String, usize)>,
    so_scope: Vec<(String, usize)>,
    fo_init: Vec<usize>,
    so_init: Vec<u64>,
    letters: Vec<String>,
}

impl<'a> Compiler<'a> {
    pub fn new(word: &'a TimedWord, sigma: &'a Assignment) -> Result<Self> {
        if word.len() > 63 {
            return Err(Error::Unsupported(format!("words longer than 63 letters ({})", word.len())));
        }
        Ok(Compiler {
            word,
            sigma,
            fo_scope: Vec::new(),
            so_scope: Vec::new(),
            fo_init: Vec::new(),
            so_init: Vec::new(),
            letters: Vec::new(),
        })
    }

    pub fn bind_fo(&mut self, x: &str) -> usize {
        self.fo_init.push(0);
        let slot = self.fo_init.len() - 1;
        self.fo_scope.push((x.to_string(), slot));
        slot
    }

    pub fn bind_so(&mut self, x: &str) -> usize {
        self.so_init.push(0);
        let slot = self.so_init.len() - 1;
        self.so_scope.push((x.to_string(), slot));
        slot
    }

    pub fn unbind_fo(&mut self) {
        self.fo_scope.pop();
    }

    pub fn unbind_so(&mut self) {
        self.so_scope.pop();
    }

    pub fn finish(self) -> Eval {
        let letter_at = self.word.letters().map(|a| self.letters.iter().position(|l| l == a)).collect();
        Eval { n: self.word.len(), prefix: self.word.prefix_sums(), letter_at, fo: self.fo_init, so: self.so_init }
    }

    fn fo(&mut self, x: &str) -> Result<usize> {
        if let Some((_, s)) = self.fo_scope.iter().rev().find(|(n, _)| n == x) {
            return Ok(*s);
        }
        let pos = *self.sigma.fo.get(x).ok_or_else(|| Error::UnboundVariable(x.to_string()))?;
        if pos == 0 || pos > self.word.len() {
            return Err(Error::Validation(vec![format!("position {pos} of `{x}` outside 1..{}", self.word.len())]));
        }
        self.fo_init.push(pos - 1);
        let slot = self.fo_init.len() - 1;
        self.fo_scope.insert(0, (x.to_string(), slot));
        Ok(slot)
    }

    fn so(&mut self, x: &str) -> Result<usize> {
        if let Some((_, s)) = self.so_scope.iter().rev().find(|(n, _)| n == x) {
            return Ok(*s);
        }
        let set = self.sigma.so.get(x).ok_or_else(|| Error::UnboundVariable(x.to_string()))?;
        let mut mask = 0u64;
        for &i in set {
            if i == 0 || i > self.word.len() {
                return Err(Error::Validation(vec![format!("position {i} in `{x}` outside 1..{}", self.word.len())]));
            }
            mask |= 1 << (i - 1);
        }
        self.so_init.push(mask);
        let slot = self.so_init.len() - 1;
        self.so_scope.insert(0, (x.to_string(), slot));
        Ok(slot)
    }

    fn letter(&mut self, a: &str) -> usize {
        match self.letters.iter().position(|l| l == a) {
            Some(i) => i,
            None => {
                self.letters.push(a.to_string());
                self.letters.len() - 1
            }
        }
    }

    pub fn compile(&mut self, f: &RdlFormula) -> Result<Node> {
        Ok(match f {
            RdlFormula::True => Node::True,
            RdlFormula::Letter { letter, var } => Node::Letter(self.letter(letter), self.fo(var)?),
            RdlFormula::Leq(x, y) => Node::Leq(self.fo(x)?, self.fo(y)?),
            RdlFormula::InSet { set, var } => Node::InSet(self.so(set)?, self.fo(var)?),
            RdlFormula::Dist { rel, bound, set, var } => {
                Node::Dist(*rel, rational::int(*bound as i64), self.so(set)?, self.fo(var)?)
            }
            RdlFormula::Not(a) => Node::Not(Box::new(self.compile(a)?)),
            RdlFormula::Or(a, b) => Node::Or(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            RdlFormula::ExistsFO(x, a) => {
                let slot = self.bind_fo(x);
                let body = self.compile(a);
                self.unbind_fo();
                Node::ExFo(slot, Box::new(body?))
            }
            RdlFormula::ExistsSO(x, a) => {
                let slot = self.bind_so(x);
                let body = self.compile(a);
                self.unbind_so();
                Node::ExSo(slot, Box::new(body?))
            }
        })
    }
}

pub(crate) struct Eval {
    pub n: usize,
    pub prefix: Vec<Q>,
    letter_at: Vec<Option<usize>>,
    pub fo: Vec<usize>,
    pub so: Vec<u64>,
}

impl Eval {
    /// Kleene evaluation where the sets in `unknown` are not yet chosen;
    /// `None` means the value depends on them.
    pub fn eval3(&mut self, node: &Node, unknown: &[bool]) -> Option<bool> {
        match node {
            Node::InSet(s, _) | Node::Dist(_, _, s, _) if unknown[*s] => None,
            Node::Not(a) => self.eval3(a, unknown).map(|v| !v),
            Node::Or(a, b) => match self.eval3(a, unknown) {
                Some(true) => Some(true),
                l => match (l, self.eval3(b, unknown)) {
                    (_, Some(true)) => Some(true),
                    (Some(false), Some(false)) => Some(false),
                    _ => None,
                },
            },
            Node::ExFo(slot, a) => {
                let saved = self.fo[*slot];
                let mut out = Some(false);
                for i in 0..self.n {
                    self.fo[*slot] = i;
                    match self.eval3(a, unknown) {
                        Some(true) => {
                            out = Some(true);
                            break;
                        }
                        None => out = None,
                        Some(false) => {}
                    }
                }
                self.fo[*slot] = saved;
                out
            }
            Node::ExSo(slot, a) => {
                let saved = self.so[*slot];
                let mut out = Some(false);
                for mask in 0..(1u64 << self.n) {
                    self.so[*slot] = mask;
                    match self.eval3(a, unknown) {
                        Some(true) => {
                            out = Some(true);
                            break;
                        }
                        None => out = None,
                        Some(false) => {}
                    }
                }
                self.so[*slot] = saved;
                out
            }
            atom => Some(self.eval(atom)),
        }
    }

    pub fn eval(&mut self, node: &Node) -> bool {
        match node {
            Node::True => true,
            Node::Letter(a, x) => self.letter_at[self.fo[*x]] == Some(*a),
            Node::Leq(x, y) => self.fo[*x] <= self.fo[*y],
            Node::InSet(s, x) => self.so[*s] >> self.fo[*x] & 1 == 1,
            Node::Dist(rel, c, s, x) => {
                let y = self.fo[*x];
                let before = self.so[*s] & ((1u64 << y) - 1);
                let d = if before == 0 {
                    self.prefix[y].clone()
                } else {
                    let z = 63 - before.leading_zeros() as usize;
                    &self.prefix[y] - &self.prefix[z]
                };
                rel.holds(&d, c)
            }
            Node::Not(a) => !self.eval(a),
            Node::Or(a, b) => self.eval(a) || self.eval(b),
            Node::ExFo(slot, a) => {
                let saved = self.fo[*slot];
                let mut found = false;
                for i in 0..self.n {
                    self.fo[*slot] = i;
                    if self.eval(a) {
                        found = true;
                        break;
                    }
                }
                self.fo[*slot] = saved;
                found
            }
            Node::ExSo(slot, a) => {
                let saved = self.so[*slot];
                let mut found = false;
                for mask in 0..(1u64 << self.n) {
                    self.so[*slot] = mask;
                    if self.eval(a) {
                        found = true;
                        break;
                    }
                }
                self.so[*slot] = saved;
                found
            }
        }
    }
}

/// `(w, σ) ⊨ β`. Set quantifiers enumerate all subsets of positions, so words
/// are limited to 63 letters.
pub fn rdl_model_check(beta: &RdlFormula, w: &TimedWord, sigma: &Assignment) -> Result<bool> {
    let mut c = Compiler::new(w, sigma)?;
    let node = c.compile(beta)?;
    Ok(c.finish().eval(&node))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::rdl::parse_rdl;
    use proptest::prelude::*;

    fn w() -> TimedWord {
        TimedWord::new(vec![("a".into(), int(1)), ("b".into(), int(2)), ("a".into(), int(1))]).unwrap()
    }

    fn check(f: &str, s: &Assignment) -> bool {
        rdl_model_check(&parse_rdl(f).unwrap(), &w(), s).unwrap()
    }

    #[test]
    fn model_check_examples() {
        assert!(!check("dpast[<=2](X,x)", &Assignment::new().with_so("X", [1]).with_fo("x", 3)));
        assert!(check("dpast[>=3](X,x)", &Assignment::new().with_so("X", []).with_fo("x", 2)));
        assert!(check("P[a](x)", &Assignment::new().with_fo("x", 1)));
        assert!(check("ex x. P[b](x)", &Assignment::new()));
        assert!(!check("ex x. P[c](x)", &Assignment::new()));
        assert!(check("EX X. all x. (X(x) | !X(x))", &Assignment::new()));
    }

    #[test]
    fn unbound_variable_is_named() {
        let err = rdl_model_check(&parse_rdl("P[a](q)").unwrap(), &w(), &Assignment::new()).unwrap_err();
        assert_eq!(err, Error::UnboundVariable("q".into()));
    }

    fn arb_word() -> impl Strategy<Value = TimedWord> {
        prop::collection::vec((prop::sample::select(vec!["a", "b"]), 0i64..8, 1i64..3), 1..6).prop_map(|v| {
            TimedWord::new(v.into_iter().map(|(a, n, d)| (a.to_string(), rational::q(n, d))).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn dist_matches_scan(word in arb_word(), mask in 0u32..64, y in 0usize..6, c in 0u32..6, r in 0usize..5) {
            let n = word.len();
            let y = y % n + 1;
            let set: BTreeSet<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
            let rel = Relation::ALL[r];
            let f = RdlFormula::dist(rel, c, "X", "x");
            let s = Assignment::new().with_so("X", set.clone()).with_fo("x", y);
            let ps = word.prefix_sums();
            let z = set.iter().filter(|&&z| z < y).max();
            let d = match z { Some(&z) => &ps[y - 1] - &ps[z - 1], None => ps[y - 1].clone() };
            prop_assert_eq!(rdl_model_check(&f, &word, &s).unwrap(), rel.holds(&d, &int(c as i64)));
        }

        #[test]
        fn sentences_ignore_assignment(word in arb_word(), i in 1usize..6, j in 1usize..6) {
            let f = parse_rdl("ex x. P[a](x) & EX X. all z. (X(z) | dpast[<=2](X,z))").unwrap();
            let n = word.len();
            let s1 = Assignment::new().with_fo("x", (i - 1) % n + 1).with_so("X", [1]);
            let s2 = Assignment::new().with_fo("x", (j - 1) % n + 1);
            prop_assert_eq!(rdl_model_check(&f, &word, &s1).unwrap(), rdl_model_check(&f, &word, &s2).unwrap());
        }

        #[test]
        fn forall_is_not_exists_not(word in arb_word()) {
            let a = parse_rdl("all x. (P[a](x) | dpast[>=1](X,x))").unwrap();
            let b = parse_rdl("!(ex x. !(P[a](x) | dpast[>=1](X,x)))").unwrap();
            let s = Assignment::new().with_so("X", [1]);
            prop_assert_eq!(rdl_model_check(&a, &word, &s).unwrap(), rdl_model_check(&b, &word, &s).unwrap());
        }
    }
}
