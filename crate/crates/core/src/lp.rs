//! Exact two-phase simplex over the rationals.
//!
//! Free variables are split as `x = x⁺ − x⁻`, inequalities get slack
//! variables, and Bland's rule guarantees termination. Problems in this crate
//! are small (tens of rows), so a dense tableau is adequate.

use crate::rational::{Rat, Vector};
use num_traits::{One, Signed, Zero};

/// Relation of a linear constraint row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Ge,
    Le,
    Eq,
}

/// Outcome of an LP solve.
#[derive(Clone, Debug)]
pub enum LpResult {
    Optimal { x: Vector, value: Rat },
    Infeasible,
    Unbounded,
}

/// `maximize objective·x` subject to `row·x (cmp) rhs`, with `x` free.
#[derive(Clone, Debug, Default)]
pub struct Lp {
    pub nvars: usize,
    pub rows: Vec<(Vector, Cmp, Rat)>,
    pub objective: Vector,
}

impl Lp {
    pub fn new(nvars: usize) -> Self {
        Lp { nvars, rows: Vec::new(), objective: vec![Rat::zero(); nvars] }
    }

    pub fn add(&mut self, row: Vector, cmp: Cmp, rhs: Rat) {
        debug_assert_eq!(row.len(), self.nvars);
        self.rows.push((row, cmp, rhs));
    }

    pub fn maximize(mut self, objective: Vector) -> LpResult {
        self.objective = objective;
        self.solve()
    }

    /// Feasibility only.
    pub fn feasible_point(self) -> Option<Vector> {
        let n = self.nvars;
        match self.maximize(vec![Rat::zero(); n]) {
            LpResult::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }

    pub fn solve(&self) -> LpResult {
        let n = self.nvars;
        let m = self.rows.len();
        let n_slack = self.rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        // Columns: x⁺ (n), x⁻ (n), slacks, artificials (m), rhs.
        let n_struct = 2 * n + n_slack;
        let ncols = n_struct + m;
        let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
        let mut slack_idx = 2 * n;
        for (i, (row, cmp, rhs)) in self.rows.iter().enumerate() {
            let mut t = vec![Rat::zero(); ncols + 1];
            for j in 0..n {
                t[j] = row[j].clone();
                t[n + j] = -row[j].clone();
            }
            match cmp {
                Cmp::Ge => {
                    t[slack_idx] = -Rat::one();
                    slack_idx += 1;
                }
                Cmp::Le => {
                    t[slack_idx] = Rat::one();
                    slack_idx += 1;
                }
                Cmp::Eq => {}
            }
            t[ncols] = rhs.clone();
            if rhs.is_negative() {
                for x in t.iter_mut() {
                    *x = -x.clone();
                }
            }
            t[n_struct + i] = Rat::one();
            tab.push(t);
        }
        let mut basis: Vec<usize> = (0..m).map(|i| n_struct + i).collect();

        // Phase 1: maximize −Σ artificials.
        let mut obj = vec![Rat::zero(); ncols + 1];
        for t in &tab {
            for j in 0..n_struct {
                obj[j] += &t[j];
            }
            obj[ncols] += &t[ncols];
        }
        let allowed_all: Vec<bool> = vec![true; ncols];
        run_simplex(&mut tab, &mut obj, &mut basis, &allowed_all);
        // obj[ncols] holds Σ artificials remaining.
        if obj[ncols].is_positive() {
            return LpResult::Infeasible;
        }
        // Drive artificials out of the basis.
        let mut i = 0;
        while i < tab.len() {
            if basis[i] >= n_struct {
                if let Some(j) = (0..n_struct).find(|&j| !tab[i][j].is_zero()) {
                    pivot(&mut tab, &mut obj, &mut basis, i, j);
                    i += 1;
                } else {
                    tab.remove(i);
                    basis.remove(i);
                }
            } else {
                i += 1;
            }
        }

        // Phase 2.
        let mut cost = vec![Rat::zero(); ncols];
        for j in 0..n {
            cost[j] = self.objective[j].clone();
            cost[n + j] = -self.objective[j].clone();
        }
        let mut obj = vec![Rat::zero(); ncols + 1];
        for j in 0..ncols {
            obj[j] = cost[j].clone();
        }
        for (r, &b) in basis.iter().enumerate() {
            if !cost[b].is_zero() {
                let cb = cost[b].clone();
                for j in 0..=ncols {
                    let t = &cb * &tab[r][j];
                    obj[j] -= t;
                }
            }
        }
        let allowed: Vec<bool> = (0..ncols).map(|j| j < n_struct).collect();
        if !run_simplex(&mut tab, &mut obj, &mut basis, &allowed) {
            return LpResult::Unbounded;
        }
        let mut y = vec![Rat::zero(); ncols];
        for (r, &b) in basis.iter().enumerate() {
            y[b] = tab[r][ncols].clone();
        }
        let x: Vector = (0..n).map(|j| &y[j] - &y[n + j]).collect();
        let value = crate::rational::dot(&x, &self.objective);
        LpResult::Optimal { x, value }
    }
}

fn pivot(tab: &mut [Vec<Rat>], obj: &mut [Rat], basis: &mut [usize], r: usize, c: usize) {
    let inv = Rat::one() / &tab[r][c];
    for x in tab[r].iter_mut() {
        *x *= &inv;
    }
    let prow = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
    }
    if !obj[c].is_zero() {
        let f = obj[c].clone();
        for (x, p) in obj.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *x -= &f * p;
            }
        }
    }
    basis[r] = c;
}

/// Maximizing simplex on a tableau whose `obj` row holds reduced costs.
/// Returns `false` if unbounded.
fn run_simplex(tab: &mut [Vec<Rat>], obj: &mut [Rat], basis: &mut [usize], allowed: &[bool]) -> bool {
    let ncols = allowed.len();
    loop {
        let Some(c) = (0..ncols).find(|&j| allowed[j] && obj[j].is_positive()) else { return true };
        let mut best: Option<(usize, Rat)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[c].is_positive() {
                let ratio = &row[ncols] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = best else { return false };
        pivot(tab, obj, basis, r, c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio, vec_i};

    #[test]
    fn small_lp() {
        // max x + y s.t. x + 2y ≤ 4, 3x + y ≤ 6, x,y ≥ 0 → (8/5, 6/5), value 14/5.
        let mut lp = Lp::new(2);
        lp.add(vec_i(&[1, 2]), Cmp::Le, rat(4));
        lp.add(vec_i(&[3, 1]), Cmp::Le, rat(6));
        lp.add(vec_i(&[1, 0]), Cmp::Ge, rat(0));
        lp.add(vec_i(&[0, 1]), Cmp::Ge, rat(0));
        match lp.maximize(vec_i(&[1, 1])) {
            LpResult::Optimal { value, x } => {
                assert_eq!(value, ratio(14, 5));
                assert_eq!(x, vec![ratio(8, 5), ratio(6, 5)]);
            }
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.add(vec_i(&[1]), Cmp::Ge, rat(2));
        lp.add(vec_i(&[1]), Cmp::Le, rat(1));
        assert!(matches!(lp.solve(), LpResult::Infeasible));
        let mut lp = Lp::new(1);
        lp.add(vec_i(&[1]), Cmp::Ge, rat(2));
        assert!(matches!(lp.maximize(vec_i(&[1])), LpResult::Unbounded));
    }

    #[test]
    fn equality_rows() {
        let mut lp = Lp::new(2);
        lp.add(vec_i(&[1, 1]), Cmp::Eq, rat(3));
        lp.add(vec_i(&[1, -1]), Cmp::Eq, rat(1));
        lp.add(vec_i(&[2, 2]), Cmp::Eq, rat(6));
        assert_eq!(lp.feasible_point().unwrap(), vec_i(&[2, 1]));
    }
}
