//! Dense two-phase primal simplex with Bland's rule.
//!
//! Problems are given in standard form `min cᵀx` subject to `Ax = b`, `x ≥ 0`.
//! The solver is generic over [`Scalar`], so the same code runs in `f64` and in
//! exact rational arithmetic.

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// `min cᵀx  s.t.  Ax = b, x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub c: Vec<T>,
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
}

/// An optimal vertex together with its certificate.
#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub value: T,
    pub x: Vec<T>,
    /// Dual multipliers `y` with `Aᵀy ≤ c` and `bᵀy = value`.
    pub duals: Vec<T>,
    /// Basic column per retained row.
    pub basis: Vec<usize>,
    /// Some nonbasic column has zero reduced cost, so the optimum may not be unique.
    pub alternative_optima: bool,
}

#[derive(Debug, Clone)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    Infeasible,
    Unbounded,
}

impl<T> LpOutcome<T> {
    pub fn optimal(self) -> Option<LpSolution<T>> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    active: Vec<bool>,
    reduced: Vec<T>,
    objective: T,
    n_orig: usize,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, r: usize, col: usize) {
        let piv = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        self.rhs[r] = self.rhs[r].clone() / piv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || !self.active[i] {
                continue;
            }
            let f = self.rows[i][col].clone();
            if f == T::zero() {
                continue;
            }
            for (v, p) in self.rows[i].iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * p.clone();
            }
            self.rows[i][col] = T::zero();
            self.rhs[i] = self.rhs[i].clone() - f * prhs.clone();
        }
        let d = self.reduced[col].clone();
        for (v, p) in self.reduced.iter_mut().zip(&prow) {
            *v = v.clone() - d.clone() * p.clone();
        }
        self.reduced[col] = T::zero();
        self.objective = self.objective.clone() + d * prhs;
        self.basis[r] = col;
    }

    fn set_costs(&mut self, cost: &[T]) {
        let width = self.reduced.len();
        let mut reduced = cost.to_vec();
        reduced.resize(width, T::zero());
        let mut objective = T::zero();
        for i in 0..self.rows.len() {
            if !self.active[i] {
                continue;
            }
            let cb = reduced_cost_of(cost, self.basis[i]);
            if cb == T::zero() {
                continue;
            }
            for (d, t) in reduced.iter_mut().zip(&self.rows[i]) {
                *d = d.clone() - cb.clone() * t.clone();
            }
            objective = objective + cb * self.rhs[i].clone();
        }
        for i in 0..self.rows.len() {
            if self.active[i] {
                reduced[self.basis[i]] = T::zero();
            }
        }
        self.reduced = reduced;
        self.objective = objective;
    }

    /// Runs Bland pivots until optimality. `Ok(false)` signals unboundedness.
    fn run(&mut self, allowed: usize) -> Result<bool> {
        let max_iter = 200_000 + 50 * (allowed + self.rows.len());
        for _ in 0..max_iter {
            let Some(col) = (0..allowed).find(|&j| self.reduced[j].is_negative()) else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                if !self.active[i] || !self.rows[i][col].is_positive() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / self.rows[i][col].clone();
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let diff = ratio.clone() - br.clone();
                        if diff.is_negative() || (diff.is_zero() && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, col),
            }
        }
        Err(Error::Numerical("simplex iteration limit reached".into()))
    }
}

fn reduced_cost_of<T: Scalar>(cost: &[T], j: usize) -> T {
    cost.get(j).cloned().unwrap_or_else(T::zero)
}

/// Solves `lp` with the two-phase simplex method and Bland's anti-cycling rule.
///
/// Redundant equality rows are detected after phase one and dropped; their
/// dual multiplier is reported as zero.
pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpOutcome<T>> {
    let m = lp.a.len();
    let n = lp.c.len();
    if lp.b.len() != m {
        return Err(Error::InvalidInput("constraint matrix and right-hand side disagree".into()));
    }
    if lp.a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("ragged constraint matrix".into()));
    }
    let width = n + m;
    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (row, bi)) in lp.a.iter().zip(&lp.b).enumerate() {
        let flip = bi.is_negative();
        signs.push(flip);
        let mut r: Vec<T> = row.iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect();
        r.resize(width, T::zero());
        r[n + i] = T::one();
        rows.push(r);
        rhs.push(if flip { -bi.clone() } else { bi.clone() });
    }
    let mut tab = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
        active: vec![true; m],
        reduced: vec![T::zero(); width],
        objective: T::zero(),
        n_orig: n,
    };

    let mut phase1 = vec![T::zero(); width];
    for c in phase1.iter_mut().skip(n) {
        *c = T::one();
    }
    tab.set_costs(&phase1);
    tab.run(n)?;
    let scale = lp.b.iter().fold(T::zero(), |acc, v| acc + v.abs());
    if tab.objective.clone() - T::feasibility_slack(&scale) > T::zero() {
        return Ok(LpOutcome::Infeasible);
    }

    for i in 0..m {
        if tab.basis[i] < n {
            continue;
        }
        let mut best: Option<(usize, T)> = None;
        for j in 0..n {
            let v = tab.rows[i][j].abs();
            if !v.is_positive() {
                continue;
            }
            if best.as_ref().map_or(true, |(_, bv)| v > *bv) {
                best = Some((j, v));
            }
        }
        match best {
            Some((j, _)) => tab.pivot(i, j),
            None => tab.active[i] = false,
        }
    }

    tab.set_costs(&lp.c);
    if !tab.run(n)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![T::zero(); n];
    for i in 0..m {
        if tab.active[i] && tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs[i].clone();
        }
    }
    let mut duals = vec![T::zero(); m];
    for i in 0..m {
        if !tab.active[i] {
            continue;
        }
        let cb = reduced_cost_of(&lp.c, tab.basis[i]);
        for (k, d) in duals.iter_mut().enumerate() {
            *d = d.clone() + cb.clone() * tab.rows[i][n + k].clone();
        }
    }
    for (d, flip) in duals.iter_mut().zip(&signs) {
        if *flip {
            *d = -d.clone();
        }
    }
    let in_basis: Vec<bool> = {
        let mut v = vec![false; n];
        for i in 0..m {
            if tab.active[i] && tab.basis[i] < tab.n_orig {
                v[tab.basis[i]] = true;
            }
        }
        v
    };
    let alternative_optima = (0..n).any(|j| !in_basis[j] && tab.reduced[j].is_zero());
    let basis = (0..m).filter(|&i| tab.active[i]).map(|i| tab.basis[i]).collect();
    Ok(LpOutcome::Optimal(LpSolution {
        value: tab.objective,
        x,
        duals,
        basis,
        alternative_optima,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::scalar::ratio;
    use num::BigRational;

    fn lp(c: &[f64], a: &[&[f64]], b: &[f64]) -> LinearProgram<f64> {
        LinearProgram { c: c.to_vec(), a: a.iter().map(|r| r.to_vec()).collect(), b: b.to_vec() }
    }

    #[test]
    fn small_optimum_and_duals() {
        // min -x1 - 2x2 with x1 + x2 + s1 = 4, x2 + s2 = 3
        let p = lp(&[-1.0, -2.0, 0.0, 0.0], &[&[1.0, 1.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 1.0]], &[4.0, 3.0]);
        let s = solve(&p).unwrap().optimal().unwrap();
        assert!((s.value + 7.0).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 3.0).abs() < 1e-12);
        let bty: f64 = s.duals.iter().zip(&p.b).map(|(y, b)| y * b).sum();
        assert!((bty - s.value).abs() < 1e-12);
        for j in 0..4 {
            let aty: f64 = (0..2).map(|i| p.a[i][j] * s.duals[i]).sum();
            assert!(aty <= p.c[j] + 1e-12);
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(&[1.0], &[&[1.0], &[1.0]], &[1.0, 2.0]);
        assert!(matches!(solve(&p).unwrap(), LpOutcome::Infeasible));
        let p = lp(&[-1.0, 0.0], &[&[1.0, -1.0]], &[1.0]);
        assert!(matches!(solve(&p).unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn redundant_rows_and_negative_rhs() {
        let p = lp(&[1.0, 2.0], &[&[1.0, 1.0], &[-2.0, -2.0]], &[1.0, -2.0]);
        let s = solve(&p).unwrap().optimal().unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert_eq!(s.basis.len(), 1);
    }

    #[test]
    fn exact_rational_solution() {
        let r = |n, d| ratio(n, d);
        let p: LinearProgram<BigRational> = LinearProgram {
            c: vec![r(1, 3), r(1, 2), r(0, 1)],
            a: vec![vec![r(1, 1), r(1, 1), r(1, 1)], vec![r(1, 1), r(2, 1), r(0, 1)]],
            b: vec![r(1, 1), r(3, 2)],
        };
        let s = solve(&p).unwrap().optimal().unwrap();
        assert_eq!(s.value, r(3, 8));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling instance.
        let p = lp(
            &[-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0],
            &[
                &[0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0],
                &[0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0],
                &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            ],
            &[0.0, 0.0, 1.0],
        );
        let s = solve(&p).unwrap().optimal().unwrap();
        assert!((s.value + 0.05).abs() < 1e-9);
    }
}
