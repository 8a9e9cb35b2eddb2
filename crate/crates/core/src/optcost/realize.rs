use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Q};
use crate::timed::TimedWord;
use crate::wta::WeightedTimedAutomaton;

use super::graph::{ArcKind, CornerPointGraph};
use super::lp::{maximize, Cmp, Constraint, LpOutcome};
use super::region::Region;

struct Step {
    letter: String,
    delay: Q,
    rate: Q,
    region: Region,
    /// Per clock, the first step whose delay it has accumulated.
    since: Vec<usize>,
}

/// `(coeffs, cmp, rhs, strict)` describing membership of the clock values
/// at each step in that step's region.
fn region_rows(steps: &[Step], max: &[u32]) -> Vec<(Vec<Q>, Cmp, Q, bool)> {
    let k = steps.len();
    let mut rows = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        let value = |x: usize| -> Vec<Q> { (0..k).map(|j| if j >= s.since[x] && j <= i { Q::one() } else { Q::zero() }).collect() };
        let minus = |a: Vec<Q>, b: Vec<Q>| -> Vec<Q> { a.into_iter().zip(b).map(|(x, y)| x - y).collect() };
        let r = &s.region;
        for (x, v) in r.ints.iter().enumerate() {
            if v.is_none() {
                rows.push((value(x), Cmp::Ge, int(max[x] as i64), true));
            }
        }
        for &x in &r.zero {
            rows.push((value(x), Cmp::Eq, int(r.ints[x].unwrap() as i64), false));
        }
        for (gi, g) in r.groups.iter().enumerate() {
            for &x in g {
                let c = int(r.ints[x].unwrap() as i64);
                rows.push((value(x), Cmp::Ge, c.clone(), true));
                rows.push((value(x), Cmp::Le, c + int(1), true));
            }
            // fractional parts: equal inside a group, increasing across groups
            let frac_rhs = |x: usize, y: usize| int(r.ints[y].unwrap() as i64) - int(r.ints[x].unwrap() as i64);
            for w in g.windows(2) {
                rows.push((minus(value(w[1]), value(w[0])), Cmp::Eq, frac_rhs(w[0], w[1]), false));
            }
            if let Some(next) = r.groups.get(gi + 1) {
                let (x, y) = (g[0], next[0]);
                rows.push((minus(value(y), value(x)), Cmp::Ge, frac_rhs(x, y), true));
            }
        }
    }
    rows
}

fn satisfies(rows: &[(Vec<Q>, Cmp, Q, bool)], d: &[Q]) -> bool {
    rows.iter().all(|(a, cmp, b, strict)| {
        let lhs: Q = a.iter().zip(d).map(|(x, y)| x * y).sum();
        match (cmp, strict) {
            (Cmp::Eq, _) => &lhs == b,
            (Cmp::Le, false) => &lhs <= b,
            (Cmp::Le, true) => &lhs < b,
            (Cmp::Ge, false) => &lhs >= b,
            (Cmp::Ge, true) => &lhs > b,
        }
    })
}

fn steps_of(a: &WeightedTimedAutomaton, g: &CornerPointGraph, path: &[usize]) -> Result<(Vec<Step>, Q)> {
    let ta = &a.automaton;
    let nclocks = g.clocks.len();
    let mut steps: Vec<Step> = Vec::new();
    let mut since = vec![0usize; nclocks];
    let mut elapsed = Q::zero();
    let mut fixed = Q::zero();
    for &k in path {
        let arc = &g.arcs[k];
        match arc.kind {
            ArcKind::Delay(d) => elapsed += int(d as i64),
            ArcKind::Discrete(ei) => {
                let e = &ta.edges[ei];
                let from = &g.nodes[arc.from];
                let rate = a.location_weight(&ta.locations[from.location]).as_rat().cloned().expect("finite rate");
                fixed += &arc.cost;
                steps.push(Step {
                    letter: e.label.clone(),
                    delay: std::mem::take(&mut elapsed),
                    rate,
                    region: from.region.clone(),
                    since: since.clone(),
                });
                let i = steps.len();
                for (x, c) in g.clocks.iter().enumerate() {
                    if e.resets.contains(c) {
                        since[x] = i;
                    }
                }
            }
        }
    }
    if steps.is_empty() {
        return Err(Error::Unsupported("path reads no letter".into()));
    }
    Ok((steps, fixed))
}

/// The word read along `path` with the corner delays themselves, when they
/// satisfy every region constraint; its cost is then exactly the path cost.
pub fn corner_word(a: &WeightedTimedAutomaton, g: &CornerPointGraph, path: &[usize]) -> Result<Option<TimedWord>> {
    let (steps, _) = steps_of(a, g, path)?;
    let corner: Vec<Q> = steps.iter().map(|s| s.delay.clone()).collect();
    if !satisfies(&region_rows(&steps, &g.max), &corner) {
        return Ok(None);
    }
    TimedWord::new(steps.iter().zip(corner).map(|(s, d)| (s.letter.clone(), d)).collect()).map(Some)
}

/// A timed word whose run along `path` costs less than `target`, given
/// that the corner path itself does. Corner delays may sit on the boundary
/// of strict guards, so they are pulled towards an interior point found by
/// maximizing the slack of all strict region constraints.
pub fn realize(a: &WeightedTimedAutomaton, g: &CornerPointGraph, path: &[usize], target: &Q) -> Result<TimedWord> {
    let (steps, fixed) = steps_of(a, g, path)?;
    let cost = |d: &[Q]| -> Q { steps.iter().zip(d).map(|(s, t)| &s.rate * t).sum::<Q>() + &fixed };
    let corner: Vec<Q> = steps.iter().map(|s| s.delay.clone()).collect();
    let c_star = cost(&corner);
    if &c_star >= target {
        return Err(Error::Unsupported("corner path does not beat the target".into()));
    }
    let rows = region_rows(&steps, &g.max);
    let chosen = if satisfies(&rows, &corner) {
        corner
    } else {
        let k = steps.len();
        let mut cons: Vec<Constraint> = rows
            .iter()
            .map(|(a, cmp, b, strict)| {
                let mut coeffs = a.clone();
                coeffs.push(match (cmp, strict) {
                    (Cmp::Le, true) => Q::one(),
                    (Cmp::Ge, true) => -Q::one(),
                    _ => Q::zero(),
                });
                Constraint { coeffs, cmp: *cmp, rhs: b.clone() }
            })
            .collect();
        let mut cap = vec![Q::zero(); k + 1];
        cap[k] = Q::one();
        cons.push(Constraint { coeffs: cap.clone(), cmp: Cmp::Le, rhs: Q::one() });
        let interior = match maximize(&cap, &cons) {
            LpOutcome::Optimal { x, value } if value.is_positive() => x[..k].to_vec(),
            other => return Err(Error::Unsupported(format!("region path has no interior point: {other:?}"))),
        };
        let c0 = cost(&interior);
        let eps = if c0 <= c_star { Q::one() } else { ((target - &c_star) / (int(2) * (&c0 - &c_star))).min(Q::one()) };
        corner.iter().zip(&interior).map(|(p, q)| p + &eps * (q - p)).collect()
    };
    TimedWord::new(steps.iter().zip(chosen).map(|(s, d)| (s.letter.clone(), d)).collect())
}
