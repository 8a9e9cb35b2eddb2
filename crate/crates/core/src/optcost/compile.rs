//! Timed automata for the language sentences `∃V.∀y.β′` produced from
//! canonical sentences. The automaton guesses the sets of `V` letter by
//! letter, keeps one clock per distance set, and guesses the truth of each
//! position-independent subformula up front, checking the guess at the end.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::rdl::RdlFormula;
use crate::timed::{constraint_satisfiable, Atom, ClockConstraint, Edge, Relation, TimedAutomaton};
use crate::wrdl::at_least_two;

#[derive(Debug, Clone, PartialEq)]
enum Local {
    True,
    Letter(String),
    In(usize),
    /// Index into the shared list of distance atoms.
    Dist(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Prop {
    Atom(Local),
    Global(usize),
    Not(Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
}

#[derive(Debug, Clone, PartialEq)]
enum Global {
    Exists(Prop),
    AtLeastTwo(usize),
}

struct Analysis<'a> {
    sets: &'a [String],
    dists: Vec<(Relation, u32, usize)>,
    globals: Vec<Global>,
}

fn unsupported(f: &RdlFormula) -> Error {
    Error::Unsupported(format!("no letter-consistency automaton for subformula {f}"))
}

impl Analysis<'_> {
    fn set(&self, name: &str, f: &RdlFormula) -> Result<usize> {
        self.sets.iter().position(|s| s == name).ok_or_else(|| unsupported(f))
    }

    /// `f` as a condition on the position held by `var`.
    fn local(&mut self, f: &RdlFormula, var: &str) -> Result<Prop> {
        Ok(match f {
            RdlFormula::True => Prop::Atom(Local::True),
            RdlFormula::Letter { letter, var: x } if x == var => Prop::Atom(Local::Letter(letter.clone())),
            RdlFormula::InSet { set, var: x } if x == var => Prop::Atom(Local::In(self.set(set, f)?)),
            RdlFormula::Dist { rel, bound, set, var: x } if x == var => {
                let key = (*rel, *bound, self.set(set, f)?);
                let i = match self.dists.iter().position(|d| *d == key) {
                    Some(i) => i,
                    None => {
                        self.dists.push(key);
                        self.dists.len() - 1
                    }
                };
                Prop::Atom(Local::Dist(i))
            }
            RdlFormula::Leq(x, y) if x == var && y == var => Prop::Atom(Local::True),
            RdlFormula::Not(a) => Prop::Not(Box::new(self.local(a, var)?)),
            RdlFormula::Or(a, b) => Prop::Or(Box::new(self.local(a, var)?), Box::new(self.local(b, var)?)),
            f if f.free_fo().is_empty() => self.global(f)?,
            f => return Err(unsupported(f)),
        })
    }

    fn global(&mut self, f: &RdlFormula) -> Result<Prop> {
        let g = match f {
            RdlFormula::Not(a) => return Ok(Prop::Not(Box::new(self.global(a)?))),
            RdlFormula::Or(a, b) => return Ok(Prop::Or(Box::new(self.global(a)?), Box::new(self.global(b)?))),
            RdlFormula::True => return Ok(Prop::Atom(Local::True)),
            RdlFormula::ExistsFO(u, body) => match &**body {
                RdlFormula::ExistsFO(v, inner) => {
                    let mut sets = BTreeSet::new();
                    inner.walk(&mut |g| {
                        if let RdlFormula::InSet { set, .. } = g {
                            sets.insert(set.clone());
                        }
                    });
                    match sets.into_iter().next() {
                        Some(s) if at_least_two(&s, u, v) == *f => Global::AtLeastTwo(self.set(&s, f)?),
                        _ => return Err(unsupported(f)),
                    }
                }
                _ => Global::Exists(self.local(body, u)?),
            },
            f => return Err(unsupported(f)),
        };
        let i = match self.globals.iter().position(|x| *x == g) {
            Some(i) => i,
            None => {
                self.globals.push(g);
                self.globals.len() - 1
            }
        };
        Ok(Prop::Global(i))
    }
}

struct Position<'a> {
    letter: &'a str,
    sets: u64,
    dists: u64,
    guess: u64,
}

fn holds(p: &Prop, at: &Position) -> bool {
    match p {
        Prop::Atom(Local::True) => true,
        Prop::Atom(Local::Letter(a)) => a == at.letter,
        Prop::Atom(Local::In(s)) => at.sets >> s & 1 == 1,
        Prop::Atom(Local::Dist(d)) => at.dists >> d & 1 == 1,
        Prop::Global(g) => at.guess >> g & 1 == 1,
        Prop::Not(a) => !holds(a, at),
        Prop::Or(a, b) => holds(a, at) || holds(b, at),
    }
}

fn negated(rel: Relation) -> Vec<Relation> {
    match rel {
        Relation::Lt => vec![Relation::Ge],
        Relation::Le => vec![Relation::Gt],
        Relation::Gt => vec![Relation::Le],
        Relation::Ge => vec![Relation::Lt],
        Relation::Eq => vec![Relation::Lt, Relation::Gt],
    }
}

/// Strips `∃V.` and `∀y.` (written `¬∃y.¬`) off a language sentence.
fn shape(beta: &RdlFormula) -> Result<(Vec<String>, String, RdlFormula)> {
    let mut vars = Vec::new();
    let mut f = beta;
    while let RdlFormula::ExistsSO(x, inner) = f {
        vars.push(x.clone());
        f = inner;
    }
    if let RdlFormula::Not(a) = f {
        if let RdlFormula::ExistsFO(y, b) = &**a {
            if let RdlFormula::Not(body) = &**b {
                return Ok((vars, y.clone(), (**body).clone()));
            }
        }
    }
    Err(Error::Unsupported(format!("language sentence is not of the form EX V. all y. beta: {beta}")))
}

/// Builds a timed automaton over `gamma` recognizing the models of a
/// sentence `∃V.∀y.β′` whose body uses only letters, memberships and
/// distances at `y`, plus sentences `∃u.(local at u)` and "at least two
/// members".
pub fn compile_language(beta: &RdlFormula, gamma: &[String]) -> Result<TimedAutomaton> {
    let (vars, y, body) = shape(beta)?;
    if vars.len() > 16 {
        return Err(Error::Unsupported(format!("{} set variables is too many to enumerate", vars.len())));
    }
    let mut an = Analysis { sets: &vars, dists: vec![], globals: vec![] };
    let main = an.local(&body, &y)?;
    let (dists, globals) = (an.dists, an.globals);
    if dists.len() > 12 || globals.len() > 16 {
        return Err(Error::Unsupported("too many distance atoms or global subformulas".into()));
    }
    let dist_sets: BTreeSet<usize> = dists.iter().map(|d| d.2).collect();
    let clock = |s: usize| format!("c_{}", vars[s]);
    let clocks: Vec<String> = dist_sets.iter().map(|&s| clock(s)).collect();

    // monitor state: per global, seen flag or member count capped at 2
    type State = (u64, Vec<u8>);
    let done = |(guess, mon): &State| {
        globals.iter().enumerate().all(|(j, g)| {
            let truth = match g {
                Global::Exists(_) => mon[j] == 1,
                Global::AtLeastTwo(_) => mon[j] == 2,
            };
            truth == (guess >> j & 1 == 1)
        })
    };
    let name = |(guess, mon): &State| {
        let m: String = mon.iter().map(|v| v.to_string()).collect();
        format!("q{guess}_{m}")
    };
    let mut index: HashMap<State, usize> = HashMap::new();
    let mut states: Vec<State> = Vec::new();
    let mut queue = VecDeque::new();
    for guess in 0..(1u64 << globals.len()) {
        let s = (guess, vec![0u8; globals.len()]);
        index.insert(s.clone(), states.len());
        states.push(s);
        queue.push_back(states.len() - 1);
    }
    let initial: Vec<String> = states.iter().map(name).collect();
    let mut edges = Vec::new();
    while let Some(si) = queue.pop_front() {
        let (guess, mon) = states[si].clone();
        for g in gamma {
            for sets in 0..(1u64 << vars.len()) {
                for dmask in 0..(1u64 << dists.len()) {
                    let at = Position { letter: g, sets, dists: dmask, guess };
                    if !holds(&main, &at) {
                        continue;
                    }
                    let mut next = mon.clone();
                    let mut dead = false;
                    for (j, gl) in globals.iter().enumerate() {
                        let guessed = guess >> j & 1 == 1;
                        match gl {
                            Global::Exists(p) => next[j] |= holds(p, &at) as u8,
                            Global::AtLeastTwo(s) => next[j] = (next[j] + (sets >> s & 1) as u8).min(2),
                        }
                        let settled = match gl {
                            Global::Exists(_) => next[j] == 1,
                            Global::AtLeastTwo(_) => next[j] == 2,
                        };
                        dead |= settled && !guessed;
                    }
                    if dead {
                        continue;
                    }
                    let target = (guess, next);
                    let ti = *index.entry(target.clone()).or_insert_with(|| {
                        states.push(target.clone());
                        queue.push_back(states.len() - 1);
                        states.len() - 1
                    });
                    let resets: Vec<String> = dist_sets.iter().filter(|&&s| sets >> s & 1 == 1).map(|&s| clock(s)).collect();
                    let mut guards = vec![Vec::<Atom>::new()];
                    for (d, (rel, bound, s)) in dists.iter().enumerate() {
                        let options = if dmask >> d & 1 == 1 { vec![*rel] } else { negated(*rel) };
                        guards = guards
                            .into_iter()
                            .flat_map(|g| options.iter().map(move |r| {
                                let mut g = g.clone();
                                g.push(Atom::new(clock(*s), *r, *bound));
                                g
                            }))
                            .collect();
                    }
                    for atoms in guards {
                        let guard = ClockConstraint::of(atoms);
                        if !constraint_satisfiable(&guard, &ClockConstraint::tt()) {
                            continue;
                        }
                        let id = format!("e{}", edges.len());
                        edges.push(Edge::new(id, name(&states[si]), g.clone(), guard, resets.clone(), name(&states[ti])));
                    }
                }
            }
        }
    }
    let finals: Vec<String> = states.iter().filter(|s| done(s)).map(name).collect();
    let locations: Vec<String> = states.iter().map(name).collect();
    TimedAutomaton::new(gamma.iter().cloned(), locations, clocks, initial, finals, edges)
}
