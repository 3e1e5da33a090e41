//! N-marginal costs of atomic measures and their compactified relaxation.
//!
//! A symmetric N-plan on `Σ ∪ {ω}` is described by weights `γ(k)` on occupation
//! vectors `k ∈ ℕ^m` with `|k| ≤ N`, the remaining `N − |k|` particles sitting at
//! the point at infinity. Its cost is `Σ γ(k) w(k) / (N(N−1))` where
//! `w(k) = Σᵢ kᵢ(kᵢ−1)Lᵢᵢ + Σ_{i≠j} kᵢkⱼLᵢⱼ = q(k) − ℓ(0)|k|`.

use nalgebra::DMatrix;
use num::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::convex::envelope::envelope_eval;
use crate::convex::lp::{self, LinearProgram, LpOutcome};
use crate::convex::scalar::Scalar;
use crate::error::{invalid, Error, Result};
use crate::measures::{distance, CostSpec, DiscreteMeasure};

/// Largest lattice the dense simplex is asked to handle.
pub const LATTICE_CAP: u128 = 2_000_000;
/// Eigenvalue threshold for declaring an interaction matrix positive semi-definite.
pub const PSD_TOL: f64 = -1e-10;

/// `N`-point cost `(2/(N(N−1))) Σ_{i<j} ℓ(|xᵢ − xⱼ|)`.
pub fn c_n_eval(cost: &CostSpec, config: &[Vec<f64>]) -> Result<f64> {
    let n = config.len();
    if n < 2 {
        return invalid("c_N needs at least two points");
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..i {
            sum += cost.value(distance(&config[i], &config[j]));
        }
    }
    Ok(2.0 * sum / (n * (n - 1)) as f64)
}

/// Interaction quadratic form `q_Σ(t) = tᵀLt` on a finite support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticFormQ {
    pub points: Vec<Vec<f64>>,
    pub l: Vec<Vec<f64>>,
    /// Some diagonal entry is `+∞`: occupation numbers are restricted to `{0, 1}`.
    pub singular_diagonal: bool,
    /// Smallest eigenvalue when every entry is finite.
    pub min_eigenvalue: Option<f64>,
}

impl QuadraticFormQ {
    pub fn from_matrix(l: Vec<Vec<f64>>) -> Result<Self> {
        let m = l.len();
        if l.iter().any(|r| r.len() != m) {
            return invalid("interaction matrix must be square");
        }
        for i in 0..m {
            for j in 0..m {
                if l[i][j].is_nan() || l[i][j] < 0.0 || l[i][j] != l[j][i] {
                    return invalid("interaction matrix must be symmetric and nonnegative");
                }
            }
        }
        let singular_diagonal = (0..m).any(|i| l[i][i].is_infinite());
        let min_eigenvalue = if l.iter().flatten().all(|v| v.is_finite()) { Some(min_eigenvalue(&l)) } else { None };
        Ok(Self { points: Vec::new(), l, singular_diagonal, min_eigenvalue })
    }

    pub fn m(&self) -> usize {
        self.l.len()
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue.is_some_and(|e| e >= PSD_TOL)
    }

    /// `tᵀLt` with `0·∞ = 0`.
    pub fn q(&self, t: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, ti) in t.iter().enumerate() {
            for (j, tj) in t.iter().enumerate() {
                let w = ti * tj;
                if w != 0.0 {
                    s += w * self.l[i][j];
                }
            }
        }
        s
    }

    /// Pair cost `w(k)` of an occupation vector.
    pub fn pair_cost(&self, k: &[usize]) -> f64 {
        pair_cost(&self.l, k)
    }
}

fn pair_cost<T: Scalar>(l: &[Vec<T>], k: &[usize]) -> T {
    let mut s = T::zero();
    for i in 0..k.len() {
        if k[i] == 0 {
            continue;
        }
        if k[i] > 1 {
            s = s + T::from_i64((k[i] * (k[i] - 1)) as i64) * l[i][i].clone();
        }
        for j in 0..k.len() {
            if j != i && k[j] > 0 {
                s = s + T::from_i64((k[i] * k[j]) as i64) * l[i][j].clone();
            }
        }
    }
    s
}

/// Smallest eigenvalue of a finite symmetric matrix.
pub fn min_eigenvalue(l: &[Vec<f64>]) -> f64 {
    let m = l.len();
    if m == 0 {
        return 0.0;
    }
    let mat = DMatrix::from_fn(m, m, |i, j| l[i][j]);
    mat.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Interaction matrix of `cost` on the support `points`.
pub fn build_qsigma(cost: &CostSpec, points: &[Vec<f64>]) -> QuadraticFormQ {
    let l: Vec<Vec<f64>> = points.iter().map(|x| points.iter().map(|y| cost.value(distance(x, y))).collect()).collect();
    let mut q = QuadraticFormQ::from_matrix(l).expect("costs are nonnegative and symmetric");
    q.points = points.to_vec();
    q
}

/// Binomial coefficient in `u128`, saturating.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = match r.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    r
}

/// Which occupation vectors enter a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeShape {
    pub m: usize,
    pub n: usize,
    /// Only `|k| = N` (probability plans without a point at infinity).
    pub exact_size: bool,
    /// Only `kᵢ ∈ {0, 1}` (singular diagonal).
    pub restricted: bool,
}

impl LatticeShape {
    pub fn count(&self) -> u128 {
        let (m, n) = (self.m as u128, self.n as u128);
        match (self.exact_size, self.restricted) {
            (false, false) => binomial(n + m, m),
            (true, false) => {
                if m == 0 {
                    u128::from(n == 0)
                } else {
                    binomial(n + m - 1, m - 1)
                }
            }
            (false, true) => (0..=n.min(m)).map(|j| binomial(m, j)).fold(0u128, |a, b| a.saturating_add(b)),
            (true, true) => binomial(m, n),
        }
    }

    /// Lexicographic enumeration, refusing beyond [`LATTICE_CAP`].
    pub fn enumerate(&self) -> Result<Vec<Vec<usize>>> {
        let count = self.count();
        if count > LATTICE_CAP {
            return Err(Error::TooLarge { what: "occupation lattice", size: count, cap: LATTICE_CAP });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut k = vec![0usize; self.m];
        self.fill(0, self.n, &mut k, &mut out);
        Ok(out)
    }

    fn fill(&self, i: usize, left: usize, k: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == self.m {
            if !self.exact_size || left == 0 {
                out.push(k.clone());
            }
            return;
        }
        let top = if self.restricted { left.min(1) } else { left };
        for v in 0..=top {
            k[i] = v;
            self.fill(i + 1, left - v, k, out);
        }
        k[i] = 0;
    }
}

/// Weights `γ(k)` of an optimal symmetric plan (zero weights omitted).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricPlanCoeffs<T> {
    pub n: usize,
    pub m: usize,
    pub support: Vec<(Vec<usize>, T)>,
}

/// Decomposition `ρ = Σ_K (K/N) a_K ρ_K` read off an optimal plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stratification {
    /// `a[K−1] = a_K` for `K = 1..=N`.
    pub a: Vec<f64>,
    /// `rho[K−1]` is a probability on the support, empty when `a_K = 0`.
    pub rho: Vec<Vec<f64>>,
    /// Smallest and largest `K` with `a_K > 0`; zero when the measure vanishes.
    pub k_min: usize,
    pub k_max: usize,
}

impl Stratification {
    fn from_plan<T: Scalar>(plan: &SymmetricPlanCoeffs<T>) -> Self {
        let (n, m) = (plan.n, plan.m);
        let mut a = vec![0.0; n];
        let mut mass = vec![vec![0.0; m]; n];
        for (k, g) in &plan.support {
            let big_k: usize = k.iter().sum();
            let g = g.to_f64();
            if big_k == 0 || g <= 0.0 {
                continue;
            }
            a[big_k - 1] += g;
            for i in 0..m {
                mass[big_k - 1][i] += g * k[i] as f64;
            }
        }
        let rho: Vec<Vec<f64>> = (0..n)
            .map(|kk| if a[kk] > 0.0 { mass[kk].iter().map(|v| v / ((kk + 1) as f64 * a[kk])).collect() } else { Vec::new() })
            .collect();
        let active: Vec<usize> = (0..n).filter(|&kk| a[kk] > 1e-12).map(|kk| kk + 1).collect();
        Self { a, rho, k_min: active.first().copied().unwrap_or(0), k_max: active.last().copied().unwrap_or(0) }
    }

    /// `Σ_K (K/N) a_K ρ_K`, which reproduces the decomposed masses.
    pub fn recompose(&self) -> Vec<f64> {
        let n = self.a.len();
        let m = self.rho.iter().map(Vec::len).max().unwrap_or(0);
        let mut s = vec![0.0; m];
        for kk in 0..n {
            for (i, r) in self.rho[kk].iter().enumerate() {
                s[i] += (kk + 1) as f64 / n as f64 * self.a[kk] * r;
            }
        }
        s
    }
}

/// Optimal symmetric plan for a target mass vector.
#[derive(Debug, Clone, Serialize)]
pub struct PlanSolution<T> {
    /// `min Σ γ(k) w(k) / (N(N−1))`; `None` encodes `+∞` (infeasible).
    pub value: Option<T>,
    pub plan: SymmetricPlanCoeffs<T>,
    pub alternative_optima: bool,
}

/// Solves `min Σγ(k) w(k)` over probabilities `γ` on the lattice with `Σγ(k)k = N s`.
pub fn solve_plan<T: Scalar>(l: &[Vec<T>], s: &[T], shape: LatticeShape) -> Result<PlanSolution<T>> {
    let m = shape.m;
    if l.len() != m || s.len() != m {
        return invalid("matrix, masses and lattice disagree in size");
    }
    if shape.n < 2 {
        return invalid("N must be at least 2");
    }
    let lattice = shape.enumerate()?;
    let n_t = T::from_i64(shape.n as i64);
    let norm = T::from_i64((shape.n * (shape.n - 1)) as i64);
    let c: Vec<T> = lattice.iter().map(|k| pair_cost(l, k)).collect();
    let mut a: Vec<Vec<T>> = (0..m).map(|i| lattice.iter().map(|k| T::from_i64(k[i] as i64)).collect()).collect();
    a.push(vec![T::one(); lattice.len()]);
    let mut b: Vec<T> = s.iter().map(|v| n_t.clone() * v.clone()).collect();
    b.push(T::one());
    let empty = SymmetricPlanCoeffs { n: shape.n, m, support: Vec::new() };
    match lp::solve(&LinearProgram { c, a, b })? {
        LpOutcome::Infeasible => Ok(PlanSolution { value: None, plan: empty, alternative_optima: false }),
        LpOutcome::Unbounded => Err(Error::Numerical("plan LP cannot be unbounded".into())),
        LpOutcome::Optimal(sol) => {
            let support = lattice
                .into_iter()
                .zip(sol.x)
                .filter(|(_, g)| g.is_positive())
                .collect();
            Ok(PlanSolution {
                value: Some(sol.value / norm),
                plan: SymmetricPlanCoeffs { n: shape.n, m, support },
                alternative_optima: sol.alternative_optima,
            })
        }
    }
}

/// Value of `f_Σ^(N)(t)` with the plan attaining it and the envelope cross-check.
#[derive(Debug, Clone, Serialize)]
pub struct FSigma {
    /// `+∞` when `|t| > N`.
    pub value: f64,
    pub plan: SymmetricPlanCoeffs<f64>,
    /// Same quantity through the supporting-hyperplane route, when the lattice is small enough.
    pub envelope_value: Option<f64>,
}

/// Lattice size up to which `f_sigma_n` also runs the envelope route.
pub const ENVELOPE_CROSSCHECK_CAP: usize = 5_000;

/// `f_Σ^(N)(t) = min Σγ(k) q_Σ(k)` over probabilities on `I_m^(N)` with `Σγ(k)k = t`.
pub fn f_sigma_n(q: &QuadraticFormQ, n: usize, t: &[f64]) -> Result<FSigma> {
    let m = q.m();
    if t.len() != m || t.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return invalid("target must be a nonnegative vector of the support size");
    }
    let empty = SymmetricPlanCoeffs { n, m, support: Vec::new() };
    if t.iter().sum::<f64>() > n as f64 * (1.0 + 1e-12) {
        return Ok(FSigma { value: f64::INFINITY, plan: empty, envelope_value: Some(f64::INFINITY) });
    }
    let shape = LatticeShape { m, n, exact_size: false, restricted: q.singular_diagonal };
    let lattice = shape.enumerate()?;
    let qk: Vec<f64> = lattice.iter().map(|k| q.q(&k.iter().map(|&v| v as f64).collect::<Vec<_>>())).collect();
    let mut a: Vec<Vec<f64>> = (0..m).map(|i| lattice.iter().map(|k| k[i] as f64).collect()).collect();
    a.push(vec![1.0; lattice.len()]);
    let mut b = t.to_vec();
    b.push(1.0);
    let (value, plan) = match lp::solve(&LinearProgram { c: qk.clone(), a, b })? {
        LpOutcome::Optimal(sol) => {
            let support = lattice.iter().cloned().zip(sol.x).filter(|(_, g)| *g > 0.0).collect();
            (sol.value, SymmetricPlanCoeffs { n, m, support })
        }
        _ => (f64::INFINITY, empty),
    };
    let envelope_value = if lattice.len() <= ENVELOPE_CROSSCHECK_CAP {
        let points: Vec<Vec<f64>> = lattice.iter().map(|k| k.iter().map(|&v| v as f64).collect()).collect();
        let values: Vec<Option<f64>> = qk.iter().map(|&v| v.is_finite().then_some(v)).collect();
        Some(envelope_eval(&points, &values, t)?.value.unwrap_or(f64::INFINITY))
    } else {
        None
    };
    Ok(FSigma { value, plan, envelope_value })
}

/// Relaxed cost together with the stratification of the plan found.
#[derive(Debug, Clone, Serialize)]
pub struct Relaxed {
    pub value: f64,
    /// `f_Σ^(N)(Ns)` when `ℓ(0)` is finite.
    pub f_value: Option<f64>,
    pub plan: SymmetricPlanCoeffs<f64>,
    pub stratification: Stratification,
    pub alternative_optima: bool,
}

fn check_measure(rho: &DiscreteMeasure) -> Result<()> {
    if rho.total_mass() > 1.0 + rho.mass_tol {
        return invalid("total mass exceeds 1");
    }
    Ok(())
}

fn relaxed_from(l: &[Vec<f64>], s: &[f64], n: usize, restricted: bool) -> Result<Relaxed> {
    let shape = LatticeShape { m: s.len(), n, exact_size: false, restricted };
    let sol = solve_plan(l, s, shape)?;
    let stratification = Stratification::from_plan(&sol.plan);
    let value = sol.value.unwrap_or(f64::INFINITY);
    let f_value = (!restricted).then(|| {
        let l0 = if l.is_empty() { 0.0 } else { l[0][0] };
        value * (n * (n - 1)) as f64 + l0 * n as f64 * s.iter().sum::<f64>()
    });
    Ok(Relaxed { value, f_value, plan: sol.plan, stratification, alternative_optima: sol.alternative_optima })
}

/// `C̄_N(ρ) = f_Σ^(N)(Ns)/(N(N−1)) − ℓ(0)|s|/(N−1)` for a finite `ℓ(0)`.
pub fn relaxed_cn(cost: &CostSpec, rho: &DiscreteMeasure, n: usize) -> Result<Relaxed> {
    check_measure(rho)?;
    if !cost.ell_at_zero.is_finite() {
        return Err(Error::Refused("ℓ(0) = +∞: use relaxed_cn_restricted, which forbids collisions".into()));
    }
    let q = build_qsigma(cost, &rho.points);
    relaxed_from(&q.l, &rho.masses, n, false)
}

/// Relaxed cost for singular `ℓ(0) = +∞`, with occupation numbers in `{0, 1}`.
pub fn relaxed_cn_restricted(cost: &CostSpec, rho: &DiscreteMeasure, n: usize) -> Result<Relaxed> {
    check_measure(rho)?;
    let q = build_qsigma(cost, &rho.points);
    relaxed_from(&q.l, &rho.masses, n, true)
}

/// Relaxed cost from an explicit interaction matrix and mass vector, generic over the field.
pub fn relaxed_from_matrix<T: Scalar>(l: &[Vec<T>], s: &[T], n: usize) -> Result<PlanSolution<T>> {
    solve_plan(l, s, LatticeShape { m: s.len(), n, exact_size: false, restricted: false })
}

/// Exact `C_N(ρ)` for a probability `ρ`: plans with all `N` particles on the support.
/// Infeasibility (only possible for singular costs) gives `+∞`.
pub fn exact_cn_probability(cost: &CostSpec, rho: &DiscreteMeasure, n: usize) -> Result<f64> {
    if !rho.is_probability() {
        return invalid(format!("exact C_N needs a probability, got mass {}", rho.total_mass()));
    }
    let q = build_qsigma(cost, &rho.points);
    let shape = LatticeShape { m: rho.len(), n, exact_size: true, restricted: q.singular_diagonal };
    Ok(solve_plan(&q.l, &rho.masses, shape)?.value.unwrap_or(f64::INFINITY))
}

/// Closed form of `C̄_N(sδ_x + tδ_y)` for `ℓ(0) = L0`, `ℓ(|x−y|) = L1`, from the
/// triangulated interpolant `g(k,l) = L0(k²+l²) + 2 min(L0,L1) k l`.
pub fn two_dirac_closed_form<T: Scalar>(l0: &T, l1: &T, s: &T, t: &T, n: usize) -> Result<T> {
    if s.is_negative() || t.is_negative() || (s.clone() + t.clone() - T::one()).is_positive() {
        return invalid("two-Dirac masses must be nonnegative with s + t ≤ 1");
    }
    if n < 2 {
        return invalid("N must be at least 2");
    }
    let cross = if l1 > l0 { l0.clone() } else { l1.clone() };
    let g = |k: &T, l: &T| l0.clone() * (k.clone() * k.clone() + l.clone() * l.clone()) + T::from_i64(2) * cross.clone() * k.clone() * l.clone();
    let nn = T::from_i64(n as i64);
    let u = nn.clone() * s.clone();
    let v = nn.clone() * t.clone();
    let k = u.floor();
    let l = v.floor();
    let fu = u.clone() - k.clone();
    let fv = v.clone() - l.clone();
    let one = T::one();
    let k1 = k.clone() + one.clone();
    let l1p = l.clone() + one.clone();
    let gv = if !(fu.clone() + fv.clone() - one.clone()).is_positive() {
        let base = g(&k, &l);
        base.clone() + fu * (g(&k1, &l) - base.clone()) + fv * (g(&k, &l1p) - base)
    } else {
        let top = g(&k1, &l1p);
        top.clone() + (one.clone() - fu) * (g(&k, &l1p) - top.clone()) + (one - fv) * (g(&k1, &l) - top)
    };
    let norm = T::from_i64((n * (n - 1)) as i64);
    let self_term = l0.clone() * (s.clone() + t.clone()) / T::from_i64((n - 1) as i64);
    Ok(gv / norm - self_term)
}

/// Exact rational evaluation of the closed form.
pub fn two_dirac_closed_form_exact(l0: &BigRational, l1: &BigRational, s: &BigRational, t: &BigRational, n: usize) -> Result<BigRational> {
    two_dirac_closed_form(l0, l1, s, t, n)
}

/// One cell of the gap scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub n: usize,
    pub theta: f64,
    pub kmin_over_n: f64,
    pub kmax_over_n: f64,
    pub value: f64,
    pub alt_optima: bool,
}

/// `K̲/N` and `K̄/N` of an optimal plan for `C̄_N(θρ)` on every `(N, θ)` cell.
pub fn gap_scan(cost: &CostSpec, rho: &DiscreteMeasure, thetas: &[f64], ns: &[usize]) -> Result<Vec<GapRow>> {
    if !cost.ell_at_zero.is_finite() {
        return Err(Error::Refused("gap scan needs a finite ℓ(0)".into()));
    }
    let cells: Vec<(usize, f64)> = ns.iter().flat_map(|&n| thetas.iter().map(move |&t| (n, t))).collect();
    cells
        .par_iter()
        .map(|&(n, theta)| {
            let r = relaxed_cn(cost, &rho.scaled(theta)?, n)?;
            Ok(GapRow {
                n,
                theta,
                kmin_over_n: r.stratification.k_min as f64 / n as f64,
                kmax_over_n: r.stratification.k_max as f64 / n as f64,
                value: r.value,
                alt_optima: r.alternative_optima,
            })
        })
        .collect()
}

/// Sequence `N ↦ C̄_N(ρ)` with the first decrease found, if any.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub values: Vec<(usize, f64)>,
    /// `(N, N', C̄_N, C̄_N')` with `N < N'` and `C̄_N > C̄_N' + slack`.
    pub violation: Option<(usize, usize, f64, f64)>,
}

impl MonotonicityReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks that `C̄_N(ρ)` is nondecreasing in `N` within `1e-9`.
pub fn monotonicity_check(cost: &CostSpec, rho: &DiscreteMeasure, ns: &[usize]) -> Result<MonotonicityReport> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let values: Vec<(usize, f64)> = ns
        .par_iter()
        .map(|&n| Ok((n, relaxed_cn(cost, rho, n)?.value)))
        .collect::<Result<_>>()?;
    let violation = values
        .windows(2)
        .find(|w| w[0].1 > w[1].1 + 1e-9)
        .map(|w| (w[0].0, w[1].0, w[0].1, w[1].1));
    Ok(MonotonicityReport { values, violation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::scalar::ratio;

    fn two_points(l1: f64) -> CostSpec {
        CostSpec::two_level(1.0, l1, 10.0).unwrap()
    }

    fn rho2(s: f64, t: f64) -> DiscreteMeasure {
        DiscreteMeasure::new(1, vec![vec![0.0], vec![1.0]], vec![s, t]).unwrap()
    }

    #[test]
    fn c_n_examples() {
        let c = CostSpec::coulomb();
        assert_eq!(c_n_eval(&c, &[vec![0.0], vec![2.0]]).unwrap(), 0.5);
        let tri = [vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]];
        assert!((c_n_eval(&c, &tri).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(c_n_eval(&c, &[vec![0.0], vec![0.0], vec![1.0]]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn qsigma_examples() {
        let q = build_qsigma(&CostSpec::constant(1.0).unwrap(), &[vec![0.0]]);
        assert_eq!(q.l, vec![vec![1.0]]);
        let q = build_qsigma(&two_points(0.5), &[vec![0.0], vec![1.0]]);
        assert_eq!(q.l, vec![vec![1.0, 0.5], vec![0.5, 1.0]]);
        assert!(q.is_psd());
        assert!(build_qsigma(&CostSpec::coulomb(), &[vec![0.0], vec![1.0]]).singular_diagonal);
    }

    #[test]
    fn lattice_counts_match_enumeration() {
        for m in 1..4 {
            for n in 2..7 {
                for exact_size in [false, true] {
                    for restricted in [false, true] {
                        let shape = LatticeShape { m, n, exact_size, restricted };
                        assert_eq!(shape.enumerate().unwrap().len() as u128, shape.count(), "{shape:?}");
                    }
                }
            }
        }
        let big = LatticeShape { m: 10, n: 40, exact_size: false, restricted: false };
        assert!(matches!(big.enumerate(), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn f_sigma_examples() {
        let q1 = QuadraticFormQ::from_matrix(vec![vec![1.0]]).unwrap();
        assert!((f_sigma_n(&q1, 2, &[1.0]).unwrap().value - 1.0).abs() < 1e-12);
        let f = f_sigma_n(&q1, 2, &[1.5]).unwrap();
        assert!((f.value - 2.5).abs() < 1e-12);
        assert!((f.envelope_value.unwrap() - 2.5).abs() < 1e-12);
        let q2 = QuadraticFormQ::from_matrix(vec![vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let f = f_sigma_n(&q2, 2, &[1.0, 1.0]).unwrap();
        assert!((f.value - 3.0).abs() < 1e-12);
        assert_eq!(f_sigma_n(&q1, 2, &[2.5]).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn relaxed_examples() {
        let c = two_points(0.5);
        for n in 2..6 {
            let rho = DiscreteMeasure::dirac(vec![0.0], 1.0 / n as f64).unwrap();
            assert!(relaxed_cn(&c, &rho, n).unwrap().value.abs() < 1e-12);
        }
        let r = relaxed_cn(&c, &rho2(0.5, 0.5), 2).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        let r = relaxed_cn(&c, &DiscreteMeasure::dirac(vec![0.0], 0.75).unwrap(), 2).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert!(relaxed_cn(&CostSpec::coulomb(), &rho2(0.5, 0.5), 2).is_err());
    }

    #[test]
    fn stratification_recomposes_measure() {
        let c = two_points(0.25);
        let rho = rho2(0.37, 0.41);
        let r = relaxed_cn(&c, &rho, 5).unwrap();
        let back = r.stratification.recompose();
        assert!((back[0] - 0.37).abs() < 1e-9 && (back[1] - 0.41).abs() < 1e-9);
        assert!(r.stratification.a.iter().sum::<f64>() <= 1.0 + 1e-12);
        assert!(r.stratification.k_min <= r.stratification.k_max);
    }

    #[test]
    fn exact_cn_examples() {
        let c = two_points(0.5);
        assert!((exact_cn_probability(&c, &rho2(0.5, 0.5), 2).unwrap() - 0.5).abs() < 1e-12);
        assert!((exact_cn_probability(&c, &DiscreteMeasure::dirac(vec![0.0], 1.0).unwrap(), 2).unwrap() - 1.0).abs() < 1e-12);
        let third = 1.0 / 3.0;
        let line = DiscreteMeasure::new(1, vec![vec![0.0], vec![1.0], vec![2.0]], vec![third; 3]).unwrap();
        let v = exact_cn_probability(&CostSpec::coulomb(), &line, 2).unwrap();
        // The only feasible symmetric plan spreads 1/3 on each pair.
        assert!((v - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(exact_cn_probability(&CostSpec::coulomb(), &rho2(0.5, 0.5), 3).unwrap(), f64::INFINITY);
    }

    #[test]
    fn two_dirac_examples() {
        assert!((two_dirac_closed_form(&1.0, &0.5, &0.5, &0.5, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((two_dirac_closed_form(&1.0, &0.5, &0.3, &0.0, 5).unwrap() - 0.05).abs() < 1e-15);
        let v = two_dirac_closed_form_exact(&ratio(1, 1), &ratio(1, 2), &ratio(3, 10), &ratio(0, 1), 5).unwrap();
        assert_eq!(v, ratio(1, 20));
    }

    #[test]
    fn two_dirac_matches_exact_cost_on_lattice_masses() {
        // s + t = K/N gives K(K−1)/(N(N−1)) C_K of the normalized measure.
        let c = two_points(0.25);
        for n in 3..8 {
            for k in 2..=n {
                for i in 0..=k {
                    let (s, t) = (i as f64 / n as f64, (k - i) as f64 / n as f64);
                    let norm = DiscreteMeasure::new(1, vec![vec![0.0], vec![1.0]], vec![s * n as f64 / k as f64, t * n as f64 / k as f64]).unwrap();
                    let ck = exact_cn_probability(&c, &norm, k).unwrap();
                    let closed = two_dirac_closed_form(&1.0, &0.25, &s, &t, n).unwrap();
                    let scale = (k * (k - 1)) as f64 / (n * (n - 1)) as f64;
                    assert!((closed - scale * ck).abs() < 1e-12, "n={n} k={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn gap_scan_full_mass_and_lattice_thetas() {
        let c = two_points(0.5);
        let rho = rho2(0.5, 0.5);
        let rows = gap_scan(&c, &rho, &[1.0], &[2, 4, 6]).unwrap();
        assert!(rows.iter().all(|r| r.kmin_over_n == 1.0 && r.kmax_over_n == 1.0));
        let rows = gap_scan(&c, &rho, &[0.5], &[4, 8]).unwrap();
        assert!(rows.iter().all(|r| (r.kmax_over_n - r.kmin_over_n) * r.n as f64 <= 1.0 + 1e-12));
    }

    #[test]
    fn monotone_in_n() {
        let c = two_points(0.5);
        let rep = monotonicity_check(&c, &rho2(0.2, 0.05), &(2..=8).collect::<Vec<_>>()).unwrap();
        assert!(rep.ok());
        assert_eq!(rep.values[0].1, 0.0);
        assert!(rep.values.last().unwrap().1 > 0.0);
    }
}
