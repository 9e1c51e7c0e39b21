//! Exact two-phase simplex over the rationals with Bland's rule.
//!
//! Dense tableau; meant for the small programs that arise from weight
//! computations (a few dozen variables and rows).

use num_traits::{One, Signed, Zero};

use crate::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

/// `maximize c.x` subject to linear rows and `x >= 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    nvars: usize,
    objective: Vec<Rat>,
    rows: Vec<(Vec<Rat>, Relation, Rat)>,
}

impl LinearProgram {
    pub fn new(nvars: usize) -> Self {
        LinearProgram { nvars, objective: vec![Rat::zero(); nvars], rows: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn maximize(&mut self, c: Vec<Rat>) -> &mut Self {
        assert_eq!(c.len(), self.nvars);
        self.objective = c;
        self
    }

    pub fn minimize(&mut self, c: Vec<Rat>) -> &mut Self {
        self.maximize(c.into_iter().map(|x| -x).collect())
    }

    pub fn constrain(&mut self, coeffs: Vec<Rat>, rel: Relation, rhs: Rat) -> &mut Self {
        assert_eq!(coeffs.len(), self.nvars);
        self.rows.push((coeffs, rel, rhs));
        self
    }

    /// Sparse form of [`LinearProgram::constrain`].
    pub fn constrain_sparse(&mut self, coeffs: &[(usize, Rat)], rel: Relation, rhs: Rat) -> &mut Self {
        let mut row = vec![Rat::zero(); self.nvars];
        for (i, c) in coeffs {
            row[*i] += c;
        }
        self.constrain(row, rel, rhs)
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).solve(&self.objective)
    }
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    nvars: usize,
    ncols: usize,
    artificial: Vec<bool>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let mut extra = 0;
        let mut norm = Vec::with_capacity(m);
        for (coeffs, rel, rhs) in &lp.rows {
            let (coeffs, rel, rhs) = if rhs.is_negative() {
                let flipped = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (coeffs.iter().map(|c| -c).collect::<Vec<_>>(), flipped, -rhs)
            } else {
                (coeffs.clone(), *rel, rhs.clone())
            };
            extra += match rel {
                Relation::Le => 1,
                Relation::Ge => 2,
                Relation::Eq => 1,
            };
            norm.push((coeffs, rel, rhs));
        }
        let ncols = lp.nvars + extra;
        let mut artificial = vec![false; ncols];
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut next = lp.nvars;
        for (coeffs, rel, rhs) in norm {
            let mut row = coeffs;
            row.resize(ncols + 1, Rat::zero());
            row[ncols] = rhs;
            match rel {
                Relation::Le => {
                    row[next] = Rat::one();
                    basis.push(next);
                    next += 1;
                }
                Relation::Ge => {
                    row[next] = -Rat::one();
                    row[next + 1] = Rat::one();
                    artificial[next + 1] = true;
                    basis.push(next + 1);
                    next += 2;
                }
                Relation::Eq => {
                    row[next] = Rat::one();
                    artificial[next] = true;
                    basis.push(next);
                    next += 1;
                }
            }
            rows.push(row);
        }
        Tableau { rows, basis, nvars: lp.nvars, ncols, artificial }
    }

    fn reduced_costs(&self, cost: &[Rat], allowed: &[bool]) -> Vec<Rat> {
        (0..self.ncols)
            .map(|j| {
                if !allowed[j] {
                    return Rat::zero();
                }
                let mut d = cost[j].clone();
                for (row, &b) in self.rows.iter().zip(&self.basis) {
                    if !cost[b].is_zero() && !row[j].is_zero() {
                        d -= &cost[b] * &row[j];
                    }
                }
                d
            })
            .collect()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rat::one() / &self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let k = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &k * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs the simplex method; `false` means unbounded.
    fn optimize(&mut self, cost: &[Rat], allowed: &[bool]) -> bool {
        loop {
            let d = self.reduced_costs(cost, allowed);
            let Some(enter) = (0..self.ncols).find(|&j| allowed[j] && d[j].is_positive()) else {
                return true;
            };
            let rhs = self.ncols;
            let mut leave: Option<(usize, Rat)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }

    fn solve(mut self, objective: &[Rat]) -> LpOutcome {
        let all = vec![true; self.ncols];
        if self.artificial.iter().any(|&a| a) {
            let cost: Vec<Rat> =
                (0..self.ncols).map(|j| if self.artificial[j] { -Rat::one() } else { Rat::zero() }).collect();
            self.optimize(&cost, &all);
            let infeasibility: Rat = self
                .rows
                .iter()
                .zip(&self.basis)
                .filter(|(_, &b)| self.artificial[b])
                .map(|(row, _)| row[self.ncols].clone())
                .sum();
            if infeasibility.is_positive() {
                return LpOutcome::Infeasible;
            }
            // Drive zero-level artificials out of the basis, dropping
            // redundant rows.
            let mut i = 0;
            while i < self.rows.len() {
                if self.artificial[self.basis[i]] {
                    match (0..self.ncols).find(|&j| !self.artificial[j] && !self.rows[i][j].is_zero()) {
                        Some(j) => self.pivot(i, j),
                        None => {
                            self.rows.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        let allowed: Vec<bool> = self.artificial.iter().map(|a| !a).collect();
        let mut cost = vec![Rat::zero(); self.ncols];
        cost[..self.nvars].clone_from_slice(objective);
        if !self.optimize(&cost, &allowed) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rat::zero(); self.nvars];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.nvars {
                x[b] = row[self.ncols].clone();
            }
        }
        let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn i(n: i64) -> Rat {
        r(n, 1)
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
        let mut lp = LinearProgram::new(2);
        lp.maximize(vec![i(3), i(5)])
            .constrain(vec![i(1), i(0)], Relation::Le, i(4))
            .constrain(vec![i(0), i(2)], Relation::Le, i(12))
            .constrain(vec![i(3), i(2)], Relation::Le, i(18));
        assert_eq!(lp.solve(), LpOutcome::Optimal { x: vec![i(2), i(6)], value: i(36) });
    }

    #[test]
    fn equality_and_lower_bounds() {
        // min x + y, x + y = 3/2, x >= 1/3, y >= 1/4 -> value 3/2.
        let mut lp = LinearProgram::new(2);
        lp.minimize(vec![i(1), i(1)])
            .constrain(vec![i(1), i(1)], Relation::Eq, r(3, 2))
            .constrain_sparse(&[(0, i(1))], Relation::Ge, r(1, 3))
            .constrain_sparse(&[(1, i(1))], Relation::Ge, r(1, 4));
        match lp.solve() {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, r(-3, 2));
                assert_eq!(&x[0] + &x[1], r(3, 2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.constrain(vec![i(1)], Relation::Ge, i(2)).constrain(vec![i(1)], Relation::Le, i(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        let mut lp = LinearProgram::new(2);
        lp.maximize(vec![i(1), i(0)]).constrain(vec![i(1), i(-1)], Relation::Le, i(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.maximize(vec![i(0), i(1)])
            .constrain(vec![i(1), i(1)], Relation::Eq, i(2))
            .constrain(vec![i(2), i(2)], Relation::Eq, i(4));
        assert_eq!(lp.solve(), LpOutcome::Optimal { x: vec![i(0), i(2)], value: i(2) });
    }
}
