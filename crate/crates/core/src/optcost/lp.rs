//! Two-phase simplex with Bland's rule over exact rationals.

use num_traits::{Signed, Zero};

use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub cmp: Cmp,
    pub rhs: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Q {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in &mut self.rows[r] {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · x` over the columns allowed to enter.
    fn optimize(&mut self, cost: &[Q], allowed: &[bool]) -> bool {
        loop {
            let entering = (0..self.cols).filter(|&j| allowed[j]).find(|&j| {
                let z: Q = self.rows.iter().zip(&self.basis).map(|(row, &b)| &cost[b] * &row[j]).sum();
                z < cost[j]
            });
            let Some(j) = entering else { return true };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][j].is_positive() {
                    let ratio = self.rhs(i) / &self.rows[i][j];
                    let better = match &best {
                        None => true,
                        Some((k, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*k]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else { return false };
            self.pivot(r, j);
        }
    }
}

/// Maximizes `objective · x` subject to `constraints` and `x ≥ 0`.
pub fn maximize(objective: &[Q], constraints: &[Constraint]) -> LpOutcome {
    let n = objective.len();
    let extra = constraints.iter().filter(|c| c.cmp != Cmp::Eq).count();
    let arts = constraints.len();
    let cols = n + extra + arts;
    let mut rows = Vec::new();
    let mut basis = Vec::new();
    let mut slack = n;
    for (i, c) in constraints.iter().enumerate() {
        let flip = c.rhs.is_negative();
        let sign = |v: &Q| if flip { -v.clone() } else { v.clone() };
        let mut row = vec![Q::zero(); cols + 1];
        for (j, a) in c.coeffs.iter().enumerate() {
            row[j] = sign(a);
        }
        row[cols] = sign(&c.rhs);
        if c.cmp != Cmp::Eq {
            let up = (c.cmp == Cmp::Le) != flip;
            row[slack] = if up { Q::from_integer(1.into()) } else { Q::from_integer((-1).into()) };
            slack += 1;
        }
        row[n + extra + i] = Q::from_integer(1.into());
        rows.push(row);
        basis.push(n + extra + i);
    }
    let mut t = Tableau { rows, basis, cols };
    let phase1: Vec<Q> = (0..cols).map(|j| if j >= n + extra { Q::from_integer((-1).into()) } else { Q::zero() }).collect();
    let all = vec![true; cols];
    t.optimize(&phase1, &all);
    let infeasible = t.basis.iter().enumerate().any(|(i, &b)| b >= n + extra && !t.rhs(i).is_zero());
    if infeasible {
        return LpOutcome::Infeasible;
    }
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n + extra {
            match (0..n + extra).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < n + extra).collect();
    let cost: Vec<Q> = (0..cols).map(|j| if j < n { objective[j].clone() } else { Q::zero() }).collect();
    if !t.optimize(&cost, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs(i).clone();
        }
    }
    let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};
    use proptest::prelude::*;

    fn c(coeffs: &[i64], cmp: Cmp, rhs: i64) -> Constraint {
        Constraint { coeffs: coeffs.iter().map(|&v| int(v)).collect(), cmp, rhs: int(rhs) }
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let out = maximize(&[int(3), int(5)], &[c(&[1, 0], Cmp::Le, 4), c(&[0, 2], Cmp::Le, 12), c(&[3, 2], Cmp::Le, 18)]);
        assert_eq!(out, LpOutcome::Optimal { x: vec![int(2), int(6)], value: int(36) });
    }

    #[test]
    fn equalities_and_lower_bounds() {
        let out = maximize(&[int(-1), int(-1)], &[c(&[1, 1], Cmp::Ge, 3), c(&[1, -1], Cmp::Eq, 1)]);
        assert_eq!(out, LpOutcome::Optimal { x: vec![int(2), int(1)], value: int(-3) });
        assert_eq!(maximize(&[int(1)], &[c(&[1], Cmp::Le, 1), c(&[1], Cmp::Ge, 2)]), LpOutcome::Infeasible);
        assert_eq!(maximize(&[int(1), int(0)], &[c(&[1, -1], Cmp::Le, 1)]), LpOutcome::Unbounded);
        let out = maximize(&[int(1)], &[Constraint { coeffs: vec![int(2)], cmp: Cmp::Le, rhs: q(1, 3) }]);
        assert_eq!(out, LpOutcome::Optimal { x: vec![q(1, 6)], value: q(1, 6) });
    }

    proptest! {
        // Oracle: for two variables the optimum sits on a vertex of the
        // box-constrained polygon; enumerate intersections of constraint
        // lines and keep the best feasible one.
        #[test]
        fn two_variable_vertices(
            obj in prop::collection::vec(-5i64..6, 2),
            cons in prop::collection::vec((prop::collection::vec(-4i64..5, 2), 0i64..10), 1..4),
        ) {
            let mut all: Vec<Constraint> = cons.iter().map(|(a, b)| c(a, Cmp::Le, *b)).collect();
            all.push(c(&[1, 0], Cmp::Le, 10));
            all.push(c(&[0, 1], Cmp::Le, 10));
            let mut lines = all.clone();
            lines.push(c(&[-1, 0], Cmp::Le, 0));
            lines.push(c(&[0, -1], Cmp::Le, 0));
            let feasible = |x: &Q, y: &Q| lines.iter().all(|k| &k.coeffs[0] * x + &k.coeffs[1] * y <= k.rhs);
            let mut best: Option<Q> = None;
            for i in 0..lines.len() {
                for j in i + 1..lines.len() {
                    let (a, b) = (&lines[i], &lines[j]);
                    let det = &a.coeffs[0] * &b.coeffs[1] - &a.coeffs[1] * &b.coeffs[0];
                    if det.is_zero() { continue; }
                    let x = (&a.rhs * &b.coeffs[1] - &a.coeffs[1] * &b.rhs) / &det;
                    let y = (&a.coeffs[0] * &b.rhs - &a.rhs * &b.coeffs[0]) / &det;
                    if feasible(&x, &y) {
                        let v = int(obj[0]) * &x + int(obj[1]) * &y;
                        if best.as_ref().is_none_or(|b| &v > b) { best = Some(v); }
                    }
                }
            }
            let objective = [int(obj[0]), int(obj[1])];
            match maximize(&objective, &all) {
                LpOutcome::Optimal { x, value } => {
                    prop_assert!(feasible(&x[0], &x[1]));
                    prop_assert_eq!(Some(value), best);
                }
                other => prop_assert!(false, "{:?}", other),
            }
        }
    }
}
