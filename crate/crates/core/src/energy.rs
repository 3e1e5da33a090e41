//! Mean-field energies: the direct energy `D`, its 2-homogeneous extension
//! `D_2`, the convolution potential `u_ρ`, estimates of `C_∞`, first-order
//! optimality residuals and the ionization-threshold machinery.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::measures::{distance, weighted, CostSpec, DiscreteMeasure, Tristate, POINT_TOL};
use crate::mmot::{min_eigenvalue, relaxed_cn, PSD_TOL};
use crate::qp::{self, QpMethod, KKT_TOL};

/// `u_ρ(x) = Σ_j m_j ℓ(|x − x_j|)`; singular costs give `+∞` on atoms.
pub fn u_rho(cost: &CostSpec, rho: &DiscreteMeasure, x: &[f64]) -> f64 {
    rho.points.iter().zip(&rho.masses).map(|(p, &m)| weighted(m, cost.value(distance(x, p)))).sum()
}

fn d2_matrix(l: &[Vec<f64>], m: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..m.len() {
        for j in 0..m.len() {
            total += weighted(m[i] * m[j], l[i][j]);
        }
    }
    total
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    /// `D(ρ)`, finite only for probabilities.
    pub d: f64,
    pub d2: f64,
    pub mass: f64,
    /// `u_ρ` at the requested sample points.
    pub u_samples: Vec<f64>,
    /// Whether the interaction matrix on the support is positive semi-definite.
    pub psd_on_support: bool,
    /// Positive type of the cost as declared by the cost catalog.
    pub positive_type: Tristate,
}

/// `D(ρ)` and `D_2(ρ) = ⟨u_ρ, ρ⟩ = ‖ρ‖² D(ρ/‖ρ‖)`.
pub fn direct_energy(cost: &CostSpec, rho: &DiscreteMeasure, samples: &[Vec<f64>]) -> Result<EnergyReport> {
    if samples.iter().any(|x| x.len() != rho.dim) {
        return invalid("sample point dimension mismatch");
    }
    let l: Vec<Vec<f64>> = rho.points.iter().map(|x| rho.points.iter().map(|y| cost.value(distance(x, y))).collect()).collect();
    let d2 = d2_matrix(&l, &rho.masses);
    let mass = rho.total_mass();
    let d = if rho.is_probability() { d2 } else { f64::INFINITY };
    let finite = l.iter().flatten().all(|x| x.is_finite());
    let psd_on_support = finite && (l.is_empty() || min_eigenvalue(&l) >= PSD_TOL);
    Ok(EnergyReport {
        d,
        d2,
        mass,
        u_samples: samples.iter().map(|x| u_rho(cost, rho, x)).collect(),
        psd_on_support,
        positive_type: cost.positive_type,
    })
}

/// Relative tolerance for calling an extrapolated `C_∞` equal to `D_2`.
pub const AGREEMENT_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Serialize)]
pub struct CInftyEstimate {
    /// `(N, C̄_N(ρ))` for `N = 2..=N_max`.
    pub sequence: Vec<(usize, f64)>,
    /// Supremum of the computed prefix.
    pub estimate: f64,
    /// Intercept `a` of the least-squares fit `C̄_N ≈ a + b/N` over the upper half of the prefix.
    pub extrapolated: f64,
    pub d2: f64,
    pub monotone: bool,
    /// `Some(..)` when `D_2` is convex on the support, in which case `C_∞ = D_2`.
    pub agrees: Option<bool>,
    /// The prefix is identically zero, so it only bounds `C_∞` from below.
    pub lower_bound_only: bool,
}

fn fit_inverse(points: &[(usize, f64)]) -> f64 {
    if points.len() < 2 {
        return points.last().map_or(0.0, |p| p.1);
    }
    let xs: Vec<f64> = points.iter().map(|p| 1.0 / p.0 as f64).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    my - (sxy / sxx) * mx
}

/// The sequence `C̄_N(ρ)`, `2 ≤ N ≤ N_max`, its supremum and a `1/N` extrapolation.
pub fn c_infty_estimate(cost: &CostSpec, rho: &DiscreteMeasure, n_max: usize) -> Result<CInftyEstimate> {
    if n_max < 2 {
        return invalid("N_max must be at least 2");
    }
    let values: Vec<Result<f64>> = (2..=n_max).into_par_iter().map(|n| relaxed_cn(cost, rho, n).map(|r| r.value)).collect();
    let mut sequence = Vec::with_capacity(values.len());
    for (n, v) in (2..=n_max).zip(values) {
        sequence.push((n, v?));
    }
    let estimate = sequence.iter().map(|p| p.1).fold(0.0, f64::max);
    let monotone = sequence.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-9);
    let upper = &sequence[(sequence.len() - 1) / 2..];
    let extrapolated = fit_inverse(upper).max(estimate);
    let report = direct_energy(cost, rho, &[])?;
    let agrees = report
        .psd_on_support
        .then(|| (extrapolated - report.d2).abs() <= AGREEMENT_TOL * report.d2.abs().max(1.0));
    let lower_bound_only = sequence.iter().all(|p| p.1 == 0.0);
    Ok(CInftyEstimate { sequence, estimate, extrapolated, d2: report.d2, monotone, agrees, lower_bound_only })
}

/// `Σ w_i D_2(Q_i)`, an upper bound for `C_∞(ρ)` whenever `Σ w_i Q_i = ρ`.
pub fn mixture_value(cost: &CostSpec, components: &[(f64, DiscreteMeasure)], target: &DiscreteMeasure, tol: f64) -> Result<f64> {
    if components.iter().any(|(w, _)| !(*w >= 0.0)) {
        return invalid("mixture weights must be nonnegative");
    }
    let total: f64 = components.iter().map(|c| c.0).sum();
    if (total - 1.0).abs() > 1e-12 {
        return invalid(format!("mixture weights sum to {total}, not 1"));
    }
    let mut atoms: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut add = |p: &[f64], m: f64| match atoms.iter_mut().find(|(q, _)| distance(p, q) <= POINT_TOL) {
        Some(a) => a.1 += m,
        None => atoms.push((p.to_vec(), m)),
    };
    for (w, q) in components {
        if q.dim != target.dim {
            return invalid("mixture component dimension mismatch");
        }
        for (p, m) in q.points.iter().zip(&q.masses) {
            add(p, w * m);
        }
    }
    for (p, m) in target.points.iter().zip(&target.masses) {
        add(p, -m);
    }
    if let Some((p, m)) = atoms.iter().find(|a| a.1.abs() > tol) {
        return invalid(format!("barycenter mismatch of {m} at {p:?}"));
    }
    let mut value = 0.0;
    for (w, q) in components {
        value += weighted(*w, direct_energy(cost, q, &[])?.d2);
    }
    Ok(value)
}

/// A test point for the variational inequality off the support: its kernel
/// row against the atoms and the potential there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe {
    pub kernel_row: Vec<f64>,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityReport {
    pub mass: f64,
    /// `c_λ = ⟨u_ρ − (λ/2)v, ρ⟩ / ‖ρ‖`.
    pub c_lambda: f64,
    /// Largest `|u_ρ − (λ/2)v − c_λ|` over atoms carrying mass.
    pub residual: f64,
    /// `c_λ ≤ tol`.
    pub c_nonpositive: bool,
    /// `c_λ (1 − ‖ρ‖) ≥ −tol`.
    pub complementarity: bool,
    /// Largest violation of `u_ρ − (λ/2)v ≥ c_λ` at the probes (0 when none).
    pub probe_violation: f64,
}

impl OptimalityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual <= tol && self.c_nonpositive && self.complementarity && self.probe_violation <= tol
    }
}

/// Residuals of the optimality system for `min D_2(ρ) − λ⟨v, ρ⟩` given the
/// kernel between atoms, their masses and the potential on them.
pub fn optimality_residuals_matrix(kernel: &[Vec<f64>], masses: &[f64], v: &[f64], lambda: f64, probes: &[Probe], tol: f64) -> Result<OptimalityReport> {
    let n = masses.len();
    if kernel.len() != n || v.len() != n || kernel.iter().any(|r| r.len() != n) || probes.iter().any(|p| p.kernel_row.len() != n) {
        return invalid("optimality residuals: inconsistent sizes");
    }
    let mass: f64 = masses.iter().sum();
    if !(mass > 0.0) {
        return invalid("optimality residuals need a nonzero measure");
    }
    let potential = |row: &[f64]| -> f64 { row.iter().zip(masses).map(|(k, &m)| weighted(m, *k)).sum() };
    let gaps: Vec<f64> = (0..n).map(|i| potential(&kernel[i]) - 0.5 * lambda * v[i]).collect();
    let c_lambda = gaps.iter().zip(masses).map(|(g, m)| weighted(*m, *g)).sum::<f64>() / mass;
    if !c_lambda.is_finite() {
        return invalid("D_2(ρ) is infinite");
    }
    let residual = (0..n).filter(|&i| masses[i] > 0.0).map(|i| (gaps[i] - c_lambda).abs()).fold(0.0, f64::max);
    let probe_violation = probes.iter().map(|p| c_lambda - (potential(&p.kernel_row) - 0.5 * lambda * p.v)).fold(0.0, f64::max);
    Ok(OptimalityReport {
        mass,
        c_lambda,
        residual,
        c_nonpositive: c_lambda <= tol,
        complementarity: c_lambda * (1.0 - mass) >= -tol,
        probe_violation,
    })
}

/// [`optimality_residuals_matrix`] for an atomic `ρ` and a cost in space.
pub fn optimality_residuals(cost: &CostSpec, v: &dyn Fn(&[f64]) -> f64, lambda: f64, rho: &DiscreteMeasure, probes: &[Vec<f64>], tol: f64) -> Result<OptimalityReport> {
    let row = |x: &[f64]| -> Vec<f64> { rho.points.iter().map(|p| cost.value(distance(x, p))).collect() };
    let kernel: Vec<Vec<f64>> = rho.points.iter().map(|x| row(x)).collect();
    let vs: Vec<f64> = rho.points.iter().map(|x| v(x)).collect();
    let probes: Vec<Probe> = probes.iter().map(|x| Probe { kernel_row: row(x), v: v(x) }).collect();
    optimality_residuals_matrix(&kernel, &rho.masses, &vs, lambda, &probes, tol)
}

/// Minimizer of `D_2(ρ) − λ⟨v, ρ⟩` over sub-probabilities on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlambdaSolution {
    pub lambda: f64,
    pub rho: Vec<f64>,
    pub mass: f64,
    /// `D_2(ρ_λ) − λ⟨v, ρ_λ⟩ = −M_∞(λv)`.
    pub value: f64,
    pub c_lambda: f64,
    pub residual: f64,
    pub method: QpMethod,
    pub certified: bool,
}

impl SlambdaSolution {
    pub fn m_infty(&self) -> f64 {
        -self.value
    }
}

/// Minimizes `ρᵀLρ − λ vᵀρ`. Only a positive semi-definite `L` can be
/// certified; otherwise the result of the heuristic is flagged uncertified.
pub fn grid_minimize_slambda(l: &[Vec<f64>], v: &[f64], lambda: f64, seed: u64) -> Result<SlambdaSolution> {
    let n = v.len();
    if l.len() != n || l.iter().any(|r| r.len() != n) {
        return invalid("kernel and potential sizes differ");
    }
    if !(lambda >= 0.0) {
        return invalid("λ must be nonnegative");
    }
    if l.iter().flatten().any(|x| !x.is_finite()) {
        return invalid("grid kernel must be finite; truncate singular costs first");
    }
    let lv: Vec<f64> = v.iter().map(|x| lambda * x).collect();
    let psd = n == 0 || min_eigenvalue(l) >= PSD_TOL;
    let sol = qp::maximize(l, &lv, seed);
    let mass: f64 = sol.rho.iter().sum();
    let (c_lambda, residual) = if mass > 0.0 {
        let r = optimality_residuals_matrix(l, &sol.rho, v, lambda, &[], KKT_TOL)?;
        (r.c_lambda, r.residual)
    } else {
        (0.0, 0.0)
    };
    Ok(SlambdaSolution {
        lambda,
        mass,
        value: -sol.value,
        c_lambda,
        residual,
        method: sol.method,
        certified: psd && sol.certified,
        rho: sol.rho,
    })
}

/// Scan of `λ ↦ M_∞(λv)` used to detect the linear regime.
#[derive(Debug, Clone, Serialize)]
pub struct KappaScan {
    pub rows: Vec<SlambdaSolution>,
    /// `𝒦(v)` read as `M_∞(λv)/λ²` at the smallest scanned `λ`.
    pub k_small: f64,
    /// Largest scanned `λ` up to which `M_∞(λv)/λ²` stays within `1e-6·𝒦` of `𝒦`.
    pub kappa: Option<f64>,
    /// `λ/‖ρ_λ‖` at the smallest scanned `λ`.
    pub kappa_from_mass: Option<f64>,
}

pub const KAPPA_REL_TOL: f64 = 1e-6;

/// Solves the grid problem for every `λ` (in parallel, order preserved).
pub fn kappa_scan(l: &[Vec<f64>], v: &[f64], lambdas: &[f64], seed: u64) -> Result<KappaScan> {
    let mut sorted = lambdas.to_vec();
    if sorted.iter().any(|x| !(*x > 0.0)) {
        return invalid("κ scan needs positive λ values");
    }
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let rows: Result<Vec<SlambdaSolution>> = sorted.par_iter().map(|&lam| grid_minimize_slambda(l, v, lam, seed)).collect();
    let rows = rows?;
    let Some(first) = rows.first() else {
        return invalid("κ scan needs at least one λ");
    };
    let k_small = first.m_infty() / (first.lambda * first.lambda);
    let mut kappa = None;
    if k_small > 0.0 {
        for r in &rows {
            if (r.m_infty() / (r.lambda * r.lambda) - k_small).abs() < KAPPA_REL_TOL * k_small {
                kappa = Some(r.lambda);
            } else {
                break;
            }
        }
    }
    let kappa_from_mass = (first.mass > 0.0).then(|| first.lambda / first.mass);
    Ok(KappaScan { rows, k_small, kappa, kappa_from_mass })
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    /// `α_v = sup v(x)/ℓ̲(2|x|)` over the samples.
    pub alpha_v: f64,
    /// Window estimate of `β_v = liminf v(x)/ℓ̄(|x|)`.
    pub beta_v: Option<f64>,
    /// `λ_* ≥ 2/α_v`.
    pub lambda_lower: f64,
    /// `λ^* ≤ 2/β_v`, only under the slow-decay condition.
    pub lambda_upper: Option<f64>,
    pub beta_refused: Option<String>,
    pub kappa: Option<f64>,
    /// `(λ, ‖ρ_λ‖)` from a grid scan.
    pub mass_curve: Vec<(f64, f64)>,
}

impl ThresholdReport {
    /// `λ_lower ≤ κ ≤ λ_upper` up to a relative tolerance, for the finite entries.
    pub fn ordered(&self, rel_tol: f64) -> bool {
        let le = |a: f64, b: f64| a <= b * (1.0 + rel_tol) + rel_tol;
        let kappa_ok = self.kappa.map_or(true, |k| le(self.lambda_lower, k) && self.lambda_upper.map_or(true, |u| le(k, u)));
        kappa_ok && self.lambda_upper.map_or(true, |u| le(self.lambda_lower, u))
    }

    pub fn with_scan(mut self, scan: &KappaScan) -> Self {
        self.kappa = scan.kappa;
        self.mass_curve = scan.rows.iter().map(|r| (r.lambda, r.mass)).collect();
        self
    }
}

/// Bounds on the ionization thresholds of a radial potential `v(|x|)`
/// sampled at `radii`, with `β_v` taken over the tail window `[R0, R1]`.
pub fn threshold_bounds(cost: &CostSpec, v: &dyn Fn(f64) -> f64, radii: &[f64], dim: usize, window: (f64, f64)) -> Result<ThresholdReport> {
    let (r0, r1) = window;
    if !(r0 > 0.0 && r1 > r0) {
        return invalid("tail window must satisfy 0 < R0 < R1");
    }
    let mut alpha: f64 = 0.0;
    for &r in radii {
        if !(r >= 0.0) {
            return invalid("sample radii must be nonnegative");
        }
        let vr = v(r);
        if vr > 0.0 {
            let (lower, _) = cost.monotone_envelopes(2.0 * r)?;
            alpha = alpha.max(if lower > 0.0 { vr / lower } else { f64::INFINITY });
        }
    }
    let lambda_lower = if alpha > 0.0 { 2.0 / alpha } else { f64::INFINITY };
    let in_window: Vec<f64> = radii.iter().copied().filter(|r| (r0..=r1).contains(r)).collect();
    if in_window.len() < 2 {
        return invalid(format!("tail window [{r0}, {r1}] holds fewer than two samples"));
    }
    let mut beta = f64::INFINITY;
    for &r in &in_window {
        let (_, upper) = cost.monotone_envelopes(r)?;
        beta = beta.min(if upper > 0.0 { v(r) / upper } else { f64::INFINITY });
    }
    let (lambda_upper, beta_refused) = if cost.slow_decay_condition(dim) {
        (Some(if beta > 0.0 { 2.0 / beta } else { f64::INFINITY }), None)
    } else {
        (None, Some(format!("slow decay condition fails for this cost in dimension {dim}")))
    };
    Ok(ThresholdReport { alpha_v: alpha, beta_v: Some(beta), lambda_lower, lambda_upper, beta_refused, kappa: None, mass_curve: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::CostKind;

    fn line(points: &[f64], masses: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::new(1, points.iter().map(|&x| vec![x]).collect(), masses.to_vec()).unwrap()
    }

    #[test]
    fn potential_examples() {
        let c = CostSpec::coulomb();
        let delta = line(&[0.0], &[1.0]);
        assert!((u_rho(&c, &delta, &[2.0]) - 0.5).abs() < 1e-15);
        assert_eq!(u_rho(&c, &delta, &[0.0]), f64::INFINITY);
        let table = CostSpec::two_level(1.0, 0.25, 2.0).unwrap();
        let rho = line(&[0.0, 1.0], &[0.5, 0.5]);
        assert!((u_rho(&table, &rho, &[0.0]) - (0.5 + 0.125)).abs() < 1e-15);
    }

    #[test]
    fn direct_energy_examples() {
        let c = CostSpec::two_level(1.0, 0.5, 2.0).unwrap();
        assert_eq!(direct_energy(&c, &line(&[0.0], &[1.0]), &[]).unwrap().d, 1.0);
        let r = direct_energy(&c, &line(&[0.0, 1.0], &[0.5, 0.5]), &[]).unwrap();
        assert!((r.d - 0.75).abs() < 1e-15);
        let half = direct_energy(&c, &line(&[0.0], &[0.5]), &[]).unwrap();
        assert_eq!(half.d, f64::INFINITY);
        assert!((half.d2 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn c_infty_tends_to_d2_for_psd_costs() {
        let c = CostSpec::two_level(1.0, 0.5, 2.0).unwrap();
        let rho = line(&[0.0, 1.0], &[0.4, 0.3]);
        let est = c_infty_estimate(&c, &rho, 24).unwrap();
        assert!(est.monotone);
        assert_eq!(est.agrees, Some(true));
        assert!(est.estimate <= est.d2 + 1e-12);
        let small = line(&[0.0], &[0.05]);
        let est = c_infty_estimate(&c, &small, 10).unwrap();
        assert!(est.lower_bound_only);
    }

    #[test]
    fn mixture_examples() {
        let c = CostSpec::two_level(1.0, 0.5, 2.0).unwrap();
        let rho = line(&[0.0, 1.0], &[0.3, 0.4]);
        assert!((mixture_value(&c, &[(1.0, rho.clone())], &rho, 1e-12).unwrap() - direct_energy(&c, &rho, &[]).unwrap().d2).abs() < 1e-15);
        let half = line(&[0.0], &[0.5]);
        let comps = [(0.5, line(&[0.0], &[1.0])), (0.5, line(&[], &[]))];
        assert!((mixture_value(&c, &comps, &half, 1e-12).unwrap() - 0.5).abs() < 1e-15);
        assert!(mixture_value(&c, &comps, &rho, 1e-12).is_err());
    }

    #[test]
    fn optimality_of_a_single_atom_and_sensitivity() {
        let empty = optimality_residuals_matrix(&[], &[], &[], 0.0, &[], 1e-9);
        assert!(empty.is_err());
        // Two atoms at unit distance, ℓ(0)=1, ℓ(1)=½, v ≡ 1: the optimum is ρ = (⅓, ⅓) for λ = 1.
        let l = vec![vec![1.0, 0.5], vec![0.5, 1.0]];
        let s = grid_minimize_slambda(&l, &[1.0, 1.0], 1.0, 0).unwrap();
        assert!(s.certified && (s.mass - 2.0 / 3.0).abs() < 1e-9);
        let ok = optimality_residuals_matrix(&l, &s.rho, &[1.0, 1.0], 1.0, &[], 1e-9).unwrap();
        assert!(ok.residual < 1e-9 && ok.c_lambda.abs() < 1e-9);
        // Non-interacting atoms: ρ = (0.4, 0.4) at λ = 0.8, and a 1% jitter shows up directly.
        let l = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let s = grid_minimize_slambda(&l, &[1.0, 1.0], 0.8, 0).unwrap();
        assert!((s.rho[0] - 0.4).abs() < 1e-9 && s.residual < 1e-9);
        let mut jittered = s.rho.clone();
        jittered[0] *= 1.01;
        let bad = optimality_residuals_matrix(&l, &jittered, &[1.0, 1.0], 0.8, &[], 1e-9).unwrap();
        assert!(bad.residual > 1e-3);
    }

    #[test]
    fn zero_strength_gives_the_zero_measure() {
        let l = vec![vec![1.0, 0.5], vec![0.5, 1.0]];
        let s = grid_minimize_slambda(&l, &[1.0, 0.3], 0.0, 0).unwrap();
        assert_eq!(s.mass, 0.0);
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn threshold_examples() {
        let c = CostSpec::coulomb();
        let radii: Vec<f64> = (0..400).map(|i| i as f64 * 0.05).collect();
        let compact = |r: f64| (1.0 - r * r).max(0.0);
        let rep = threshold_bounds(&c, &compact, &radii, 3, (5.0, 19.0)).unwrap();
        assert!(rep.alpha_v.is_finite() && rep.lambda_lower > 0.0);
        let tail = |r: f64| 1.0 / r;
        let rep = threshold_bounds(&c, &tail, &radii, 3, (5.0, 19.0)).unwrap();
        assert!((rep.beta_v.unwrap() - 1.0).abs() < 1e-12);
        assert!((rep.lambda_upper.unwrap() - 2.0).abs() < 1e-12);
        let exp = CostSpec::new(CostKind::Exponential { a: 1.0 }).unwrap();
        let rep = threshold_bounds(&exp, &tail, &radii, 3, (5.0, 19.0)).unwrap();
        assert!(rep.lambda_upper.is_none() && rep.beta_refused.is_some());
        assert!(threshold_bounds(&c, &tail, &radii, 3, (5.0, 5.01)).is_err());
    }

    #[test]
    fn kappa_scan_linear_regime() {
        let l = vec![vec![1.0, 0.5], vec![0.5, 1.0]];
        let v = [1.0, 1.0];
        // ρ_λ = (λ/3, λ/3) until the mass reaches 1 at κ = 3/2.
        let scan = kappa_scan(&l, &v, &[0.5, 1.0, 1.4, 2.0, 3.0], 0).unwrap();
        assert_eq!(scan.kappa, Some(1.4));
        assert!((scan.kappa_from_mass.unwrap() - 1.5).abs() < 1e-9);
        for r in &scan.rows {
            assert!((r.mass - (r.lambda / 1.5).min(1.0)).abs() < 1e-9);
        }
    }
}
