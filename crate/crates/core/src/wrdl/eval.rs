use crate::error::Result;
use crate::monoid::{TimedPvMonoid, Weight, WeightPairWord};
use crate::rdl::{Assignment, Compiler, Eval, Node};
use crate::timed::TimedWord;

use super::WrdlFormula;

enum WNode {
    Bool(Node),
    Const(Weight),
    Or(Box<WNode>, Box<WNode>),
    And(Box<WNode>, Box<WNode>),
    ExFo(usize, Box<WNode>),
    /// A block of set quantifiers; `guard` is a Boolean conjunct of the body
    /// used to skip partial choices that already make the body 0̄.
    ExSoChain { slots: Vec<usize>, guard: Option<Node>, body: Box<WNode> },
    Forall(usize, Box<WNode>, Box<WNode>),
}

fn compile(c: &mut Compiler, f: &WrdlFormula) -> Result<WNode> {
    Ok(match f {
        WrdlFormula::Bool(b) => WNode::Bool(c.compile(b)?),
        WrdlFormula::Const(m) => WNode::Const(m.clone()),
        WrdlFormula::Or(a, b) => WNode::Or(Box::new(compile(c, a)?), Box::new(compile(c, b)?)),
        WrdlFormula::And(a, b) => WNode::And(Box::new(compile(c, a)?), Box::new(compile(c, b)?)),
        WrdlFormula::ExistsFO(x, a) => {
            let slot = c.bind_fo(x);
            let body = compile(c, a);
            c.unbind_fo();
            WNode::ExFo(slot, Box::new(body?))
        }
        WrdlFormula::ExistsSO(..) => {
            let mut slots = Vec::new();
            let mut inner = f;
            while let WrdlFormula::ExistsSO(x, a) = inner {
                slots.push(c.bind_so(x));
                inner = a;
            }
            let guard = match inner {
                WrdlFormula::And(g, _) => match g.as_ref() {
                    WrdlFormula::Bool(b) => Some(c.compile(b)),
                    _ => None,
                },
                _ => None,
            };
            let body = compile(c, inner);
            for _ in &slots {
                c.unbind_so();
            }
            let guard = guard.transpose()?;
            WNode::ExSoChain { slots, guard, body: Box::new(body?) }
        }
        WrdlFormula::ForallFO(x, a, b) => {
            let slot = c.bind_fo(x);
            let first = compile(c, a);
            let second = compile(c, b);
            c.unbind_fo();
            WNode::Forall(slot, Box::new(first?), Box::new(second?))
        }
    })
}

struct Ctx<'a> {
    env: Eval,
    m: &'a TimedPvMonoid,
    delays: Vec<crate::rational::Q>,
}

impl Ctx<'_> {
    // 0̄ is neutral for + and absorbs ⋄, so a choice whose guard is already
    // false contributes nothing and is skipped.
    fn chain(&mut self, slots: &[usize], guard: Option<&Node>, body: &WNode, unknown: &mut [bool]) -> Weight {
        let Some((&slot, rest)) = slots.split_first() else { return self.eval(body) };
        unknown[slot] = false;
        let mut acc = self.m.zero().clone();
        for mask in 0..(1u64 << self.env.n) {
            self.env.so[slot] = mask;
            if let Some(g) = guard {
                if !rest.is_empty() && self.env.eval3(g, unknown) == Some(false) {
                    continue;
                }
            }
            let v = self.chain(rest, guard, body, unknown);
            acc = self.m.base.add(&acc, &v);
        }
        unknown[slot] = true;
        acc
    }

    fn eval(&mut self, node: &WNode) -> Weight {
        let m = self.m;
        match node {
            WNode::Bool(b) => {
                if self.env.eval(b) {
                    m.one.clone()
                } else {
                    m.zero().clone()
                }
            }
            WNode::Const(w) => w.clone(),
            WNode::Or(a, b) => {
                let x = self.eval(a);
                m.base.add(&x, &self.eval(b))
            }
            WNode::And(a, b) => {
                let x = self.eval(a);
                // 0̄ absorbs ⋄, so the right operand can be skipped.
                if &x == m.zero() {
                    return x;
                }
                m.diamond(&x, &self.eval(b))
            }
            WNode::ExFo(slot, a) => {
                let saved = self.env.fo[*slot];
                let mut acc = m.zero().clone();
                for i in 0..self.env.n {
                    self.env.fo[*slot] = i;
                    let v = self.eval(a);
                    acc = m.base.add(&acc, &v);
                }
                self.env.fo[*slot] = saved;
                acc
            }
            WNode::ExSoChain { slots, guard, body } => {
                let saved: Vec<u64> = slots.iter().map(|s| self.env.so[*s]).collect();
                let mut unknown = vec![false; self.env.so.len()];
                for s in slots {
                    unknown[*s] = true;
                }
                let acc = self.chain(slots, guard.as_ref(), body, &mut unknown);
                for (s, v) in slots.iter().zip(saved) {
                    self.env.so[*s] = v;
                }
                acc
            }
            WNode::Forall(slot, a, b) => {
                let saved = self.env.fo[*slot];
                let mut steps = Vec::with_capacity(self.env.n);
                for i in 0..self.env.n {
                    self.env.fo[*slot] = i;
                    let first = self.eval(a);
                    let second = self.eval(b);
                    steps.push((first, second, self.delays[i].clone()));
                }
                self.env.fo[*slot] = saved;
                let v = WeightPairWord::new(steps).expect("timed words are non-empty");
                m.base.valuate(&v)
            }
        }
    }
}

/// `[[φ]](w, σ)` by structural recursion; quantifiers range over all
/// positions or all subsets of positions.
pub fn wrdl_eval(phi: &WrdlFormula, w: &TimedWord, sigma: &Assignment, m: &TimedPvMonoid) -> Result<Weight> {
    let mut c = Compiler::new(w, sigma)?;
    let node = compile(&mut c, phi)?;
    let mut ctx = Ctx { env: c.finish(), m, delays: w.delays().cloned().collect() };
    Ok(ctx.eval(&node))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::rational::{int, q};
    use crate::wrdl::parse_wrdl;
    use proptest::prelude::*;

    fn word(p: &[(&str, i64)]) -> TimedWord {
        TimedWord::new(p.iter().map(|(a, t)| (a.to_string(), int(*t))).collect()).unwrap()
    }

    fn ev(s: &str, w: &TimedWord, m: &TimedPvMonoid) -> Weight {
        wrdl_eval(&parse_wrdl(s, m).unwrap(), w, &Assignment::new(), m).unwrap()
    }

    #[test]
    fn square_of_length() {
        let m = TimedPvMonoid::sum0();
        for n in 1..=10 {
            let w = word(&vec![("a", 1); n]);
            assert_eq!(ev("all x.(0, all y.(0, 1))", &w, &m), Weight::rat((n * n) as i64));
        }
    }

    #[test]
    fn average_cost_sentence() {
        let m = TimedPvMonoid::avg0();
        let s = "all x.(B(P[a](x)) & 1 | B(P[b](x)) & 2, B(P[a](x)) & 0 | B(P[b](x)) & 1)";
        assert_eq!(ev(s, &word(&[("a", 1), ("b", 1)]), &m), Weight::rat(2));
        assert_eq!(ev(s, &word(&[("a", 3), ("b", 1), ("b", 0)]), &m), Weight::Rat(q(7, 4)));
    }

    #[test]
    fn table_rows() {
        let m = TimedPvMonoid::sum0();
        let w = word(&[("a", 1), ("b", 2)]);
        assert_eq!(ev("B(ex x. P[a](x))", &w, &m), Weight::rat(0));
        assert!(ev("B(ex x. P[c](x))", &w, &m).is_inf());
        assert_eq!(ev("7/3", &w, &m), Weight::Rat(q(7, 3)));
        assert_eq!(ev("2 | 3", &w, &m), Weight::rat(2));
        assert_eq!(ev("2 & 3", &w, &m), Weight::rat(5));
        assert_eq!(ev("ex x. (B(P[b](x)) & 4 | B(P[a](x)) & 6)", &w, &m), Weight::rat(4));
        assert_eq!(ev("EX X. all x.(B(X(x)) & 1 | B(!X(x)) & 2, 0)", &w, &m), Weight::rat(3));
        let err = wrdl_eval(&parse_wrdl("B(P[a](z))", &m).unwrap(), &w, &Assignment::new(), &m).unwrap_err();
        assert_eq!(err, Error::UnboundVariable("z".into()));
    }

    proptest! {
        #[test]
        fn sentence_value_ignores_assignment(
            letters in prop::collection::vec((prop::sample::select(vec!["a", "b"]), 0i64..5), 1..4),
            i in 1usize..4,
        ) {
            let m = TimedPvMonoid::sum0();
            let w = word(&letters);
            let f = parse_wrdl("EX X. all x.(B(dpast[>=2](X,x)) & 3 | B(P[a](x)), B(X(x)) & 1)", &m).unwrap();
            let s = Assignment::new().with_fo("x", (i - 1) % w.len() + 1).with_so("X", [1]);
            prop_assert_eq!(
                wrdl_eval(&f, &w, &s, &m).unwrap(),
                wrdl_eval(&f, &w, &Assignment::new(), &m).unwrap()
            );
        }
    }
}
