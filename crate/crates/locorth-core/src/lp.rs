//! Exact linear programming over rationals: a dense two-phase primal
//! simplex. Entering-variable selection is Dantzig's rule until the
//! objective stalls, after which Bland's rule takes over permanently, which
//! guarantees termination on the (highly degenerate) polytopes that show up
//! here. Every comparison is exact; there are no tolerances anywhere.

use alloc::{vec, vec::Vec};

use num_traits::{One, Signed, Zero};

use crate::Rational;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, PartialEq, Debug)]
pub enum LpOutcome {
    Optimal { value: Rational, solution: Vec<Rational> },
    Infeasible,
    Unbounded,
}

/// Consecutive non-improving pivots tolerated before switching to Bland.
const STALL_LIMIT: u32 = 64;

struct Tableau {
    rows: Vec<Vec<Rational>>, // m rows of n_total coefficients
    rhs: Vec<Rational>,
    cost: Vec<Rational>, // reduced costs (maximization: pivot while some > 0)
    cost_value: Rational,
    basis: Vec<usize>,
    bland: bool,
    stall: u32,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let m = self.rows.len();
        let piv = self.rows[row][col].clone();
        debug_assert!(piv.is_positive());
        if !piv.is_one() {
            for v in self.rows[row].iter_mut() {
                if !v.is_zero() {
                    *v /= &piv;
                }
            }
            self.rhs[row] /= &piv;
        }
        for r in 0..m {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            // pivot_row[col] is one, so the subtraction zeroes rows[r][col]
            let factor = self.rows[r][col].clone();
            let (pivot_row, target_row) = {
                // split borrows
                let (a, b) = if r < row {
                    let (lo, hi) = self.rows.split_at_mut(row);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = self.rows.split_at_mut(r);
                    (&lo[row], &mut hi[0])
                };
                (a, b)
            };
            for (t, p) in target_row.iter_mut().zip(pivot_row) {
                if !p.is_zero() {
                    *t -= &factor * p;
                }
            }
            let delta = &factor * &self.rhs[row];
            self.rhs[r] -= delta;
        }
        if !self.cost[col].is_zero() {
            // row[col] is one after normalization, so this zeroes cost[col]
            let factor = self.cost[col].clone();
            for (t, p) in self.cost.iter_mut().zip(&self.rows[row]) {
                if !p.is_zero() {
                    *t -= &factor * p;
                }
            }
            self.cost_value += &factor * &self.rhs[row];
        }
        self.basis[row] = col;
    }

    fn entering(&self, allowed: usize) -> Option<usize> {
        if self.bland {
            (0..allowed).find(|&j| self.cost[j].is_positive())
        } else {
            let mut best: Option<usize> = None;
            for j in 0..allowed {
                if self.cost[j].is_positive()
                    && best.map_or(true, |b| self.cost[j] > self.cost[b])
                {
                    best = Some(j);
                }
            }
            best
        }
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for r in 0..self.rows.len() {
            let a = &self.rows[r][col];
            if !a.is_positive() {
                continue;
            }
            let ratio = &self.rhs[r] / a;
            match &best {
                None => best = Some((r, ratio)),
                Some((br, bratio)) => {
                    // smallest ratio; ties broken by smallest basis variable
                    if ratio < *bratio
                        || (ratio == *bratio && self.basis[r] < self.basis[*br])
                    {
                        best = Some((r, ratio));
                    }
                }
            }
        }
        best.map(|(r, _)| r)
    }

    /// Run to optimality over columns `0..allowed`. Returns false on
    /// unboundedness.
    fn solve(&mut self, allowed: usize) -> bool {
        loop {
            let Some(col) = self.entering(allowed) else {
                return true;
            };
            let Some(row) = self.leaving(col) else {
                return false;
            };
            let before = self.cost_value.clone();
            self.pivot(row, col);
            if !self.bland {
                if self.cost_value == before {
                    self.stall += 1;
                    if self.stall > STALL_LIMIT {
                        self.bland = true;
                    }
                } else {
                    self.stall = 0;
                }
            }
        }
    }
}

/// Maximize `objective . x` over `x >= 0` subject to the constraints.
pub fn maximize(objective: &[Rational], constraints: &[Constraint]) -> LpOutcome {
    let n = objective.len();
    let m = constraints.len();
    // normalize rows to rhs >= 0
    let mut rows_in: Vec<(Vec<Rational>, Relation, Rational)> = Vec::with_capacity(m);
    for c in constraints {
        assert_eq!(c.coeffs.len(), n, "constraint arity");
        if c.rhs.is_negative() {
            let coeffs: Vec<Rational> = c.coeffs.iter().map(|v| -v).collect();
            let relation = match c.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            rows_in.push((coeffs, relation, -&c.rhs));
        } else {
            rows_in.push((c.coeffs.clone(), c.relation, c.rhs.clone()));
        }
    }
    let n_slack = rows_in
        .iter()
        .filter(|(_, rel, _)| matches!(rel, Relation::Le | Relation::Ge))
        .count();
    let needs_artificial: Vec<bool> = rows_in
        .iter()
        .map(|(_, rel, _)| matches!(rel, Relation::Eq | Relation::Ge))
        .collect();
    let n_art = needs_artificial.iter().filter(|&&b| b).count();
    let total = n + n_slack + n_art;

    let mut rows = vec![vec![Rational::zero(); total]; m];
    let mut rhs = Vec::with_capacity(m);
    let mut basis = vec![0usize; m];
    let mut slack_at = n;
    let mut art_at = n + n_slack;
    for (r, (coeffs, rel, b)) in rows_in.iter().enumerate() {
        for (j, v) in coeffs.iter().enumerate() {
            rows[r][j] = v.clone();
        }
        rhs.push(b.clone());
        match rel {
            Relation::Le => {
                rows[r][slack_at] = Rational::one();
                basis[r] = slack_at;
                slack_at += 1;
            }
            Relation::Ge => {
                rows[r][slack_at] = -Rational::one();
                slack_at += 1;
                rows[r][art_at] = Rational::one();
                basis[r] = art_at;
                art_at += 1;
            }
            Relation::Eq => {
                rows[r][art_at] = Rational::one();
                basis[r] = art_at;
                art_at += 1;
            }
        }
    }

    let mut t = Tableau {
        rows,
        rhs,
        cost: vec![Rational::zero(); total],
        cost_value: Rational::zero(),
        basis,
        bland: false,
        stall: 0,
    };

    if n_art > 0 {
        // Phase I: maximize -(sum of artificials); reduced costs start as the
        // sum of the artificial-basic rows.
        for r in 0..m {
            if t.basis[r] >= n + n_slack {
                let row = t.rows[r].clone();
                for (cj, v) in t.cost.iter_mut().zip(&row) {
                    *cj += v;
                }
                t.cost_value -= &t.rhs[r];
            }
        }
        for j in n + n_slack..total {
            t.cost[j] = Rational::zero();
        }
        if !t.solve(n + n_slack) {
            unreachable!("phase I objective is bounded");
        }
        if t.cost_value.is_negative() {
            return LpOutcome::Infeasible;
        }
        // pivot remaining artificials out of the basis where possible
        for r in 0..m {
            if t.basis[r] >= n + n_slack {
                if let Some(col) = (0..n + n_slack).find(|&j| !t.rows[r][j].is_zero()) {
                    // degenerate row (rhs must be 0 here); make col positive first
                    if t.rows[r][col].is_negative() {
                        for v in t.rows[r].iter_mut() {
                            *v = -core::mem::take(v);
                        }
                        t.rhs[r] = -core::mem::take(&mut t.rhs[r]);
                    }
                    t.pivot(r, col);
                }
                // rows with only artificial support are redundant; leave them,
                // the artificial stays basic at value zero
            }
        }
    }

    // Phase II
    t.cost = objective.to_vec();
    t.cost.resize(total, Rational::zero());
    t.cost_value = Rational::zero();
    // price out the current basis (basic columns are identity columns, so
    // subtracting factor * row zeroes exactly cost[basis[r]])
    for r in 0..m {
        let b = t.basis[r];
        if b < total && !t.cost[b].is_zero() {
            let factor = t.cost[b].clone();
            let row = t.rows[r].clone();
            for (cj, v) in t.cost.iter_mut().zip(&row) {
                if !v.is_zero() {
                    *cj -= &factor * v;
                }
            }
            t.cost_value += &factor * &t.rhs[r];
        }
    }
    // forbid artificials from re-entering
    t.bland = false;
    t.stall = 0;
    if !t.solve(n + n_slack) {
        return LpOutcome::Unbounded;
    }

    let mut solution = vec![Rational::zero(); n];
    for r in 0..m {
        if t.basis[r] < n {
            solution[t.basis[r]] = t.rhs[r].clone();
        }
    }
    LpOutcome::Optimal { value: t.cost_value.clone(), solution }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn r(v: i64) -> Rational {
        ratio(v, 1)
    }

    #[test]
    fn simple_bounded_max() {
        // max x + y st x + 2y <= 4, 3x + y <= 6 -> x=8/5, y=6/5, value 14/5
        let out = maximize(
            &[r(1), r(1)],
            &[
                Constraint { coeffs: vec![r(1), r(2)], relation: Relation::Le, rhs: r(4) },
                Constraint { coeffs: vec![r(3), r(1)], relation: Relation::Le, rhs: r(6) },
            ],
        );
        match out {
            LpOutcome::Optimal { value, solution } => {
                assert_eq!(value, ratio(14, 5));
                assert_eq!(solution, vec![ratio(8, 5), ratio(6, 5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equality_constraints_and_infeasible() {
        // max x st x + y = 1, x - y = 1 -> x=1, y=0
        let out = maximize(
            &[r(1), r(0)],
            &[
                Constraint { coeffs: vec![r(1), r(1)], relation: Relation::Eq, rhs: r(1) },
                Constraint { coeffs: vec![r(1), r(-1)], relation: Relation::Eq, rhs: r(1) },
            ],
        );
        assert_eq!(
            out,
            LpOutcome::Optimal { value: r(1), solution: vec![r(1), r(0)] }
        );

        let out = maximize(
            &[r(1)],
            &[
                Constraint { coeffs: vec![r(1)], relation: Relation::Eq, rhs: r(1) },
                Constraint { coeffs: vec![r(1)], relation: Relation::Eq, rhs: r(2) },
            ],
        );
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded() {
        let out = maximize(
            &[r(1), r(0)],
            &[Constraint { coeffs: vec![r(0), r(1)], relation: Relation::Le, rhs: r(1) }],
        );
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // classic cycling-prone instance (Beale); Bland fallback must finish
        let out = maximize(
            &[ratio(3, 4), r(-150), ratio(1, 50), r(-6)],
            &[
                Constraint {
                    coeffs: vec![ratio(1, 4), r(-60), ratio(-1, 25), r(9)],
                    relation: Relation::Le,
                    rhs: r(0),
                },
                Constraint {
                    coeffs: vec![ratio(1, 2), r(-90), ratio(-1, 50), r(3)],
                    relation: Relation::Le,
                    rhs: r(0),
                },
                Constraint {
                    coeffs: vec![r(0), r(0), r(1), r(0)],
                    relation: Relation::Le,
                    rhs: r(1),
                },
            ],
        );
        match out {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, ratio(1, 20)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ge_constraints() {
        // max -x st x >= 3 -> value -3
        let out = maximize(
            &[r(-1)],
            &[Constraint { coeffs: vec![r(1)], relation: Relation::Ge, rhs: r(3) }],
        );
        assert_eq!(out, LpOutcome::Optimal { value: r(-3), solution: vec![r(3)] });
    }
}
