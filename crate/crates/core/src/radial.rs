//! Radial minimizers of `C_∞(ρ) − λ⟨v, ρ⟩` for the Coulomb cost in three
//! dimensions and a radial potential `v(x) = V(|x|)`.
//!
//! Under the hypothesis that `g(r) = −r²V′(r−0)` is nondecreasing on `{V > 0}`
//! the minimizer is described by its repartition function
//! `F_λ(r) = ρ_λ(B(0, r)) = min{(λ/2) g(r), ‖ρ_λ‖}` up to the radius `r_λ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{optimality_residuals_matrix, OptimalityReport, Probe};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Values of `V` below this count as zero.
pub const TAIL_TOL: f64 = 1e-12;
const SEARCH_MAX: f64 = 1_073_741_824.0; // 2^30
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialKind {
    /// `(1 − r²)₊`
    V1,
    /// `min(1/r, 1)`
    V2,
    /// `1/(1 + r)`
    V3,
    /// `min(r^{-1/2}, 1)`
    V4,
    /// Piecewise-linear interpolation of samples, zero beyond the last radius.
    Sampled { radii: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPotential {
    pub kind: RadialKind,
}

impl RadialPotential {
    pub fn v1() -> Self {
        Self { kind: RadialKind::V1 }
    }
    pub fn v2() -> Self {
        Self { kind: RadialKind::V2 }
    }
    pub fn v3() -> Self {
        Self { kind: RadialKind::V3 }
    }
    pub fn v4() -> Self {
        Self { kind: RadialKind::V4 }
    }

    /// Built-in potential by name (`v1` … `v4`).
    pub fn catalog(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "v1" => Ok(Self::v1()),
            "v2" => Ok(Self::v2()),
            "v3" => Ok(Self::v3()),
            "v4" => Ok(Self::v4()),
            other => invalid(format!("unknown radial potential `{other}`")),
        }
    }

    /// Samples `(r_i, V_i)` with `r_0 = 0`, strictly increasing radii,
    /// nonnegative values and a vanishing last value.
    pub fn sampled(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() < 2 || radii.len() != values.len() {
            return invalid("a sampled potential needs at least two (r, V) pairs");
        }
        if radii[0] != 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) || radii.iter().any(|r| !r.is_finite()) {
            return invalid("sample radii must start at 0 and increase strictly");
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return invalid("potential samples must be finite and nonnegative");
        }
        if *values.last().expect("nonempty") > TAIL_TOL {
            return invalid("the last sample must vanish so that V(∞) = 0");
        }
        Ok(Self { kind: RadialKind::Sampled { radii, values } })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            RadialKind::V1 => "v1",
            RadialKind::V2 => "v2",
            RadialKind::V3 => "v3",
            RadialKind::V4 => "v4",
            RadialKind::Sampled { .. } => "sampled",
        }
    }

    /// Points where `V′` may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            RadialKind::V1 | RadialKind::V2 | RadialKind::V4 => vec![1.0],
            RadialKind::V3 => Vec::new(),
            RadialKind::Sampled { radii, .. } => radii[1..].to_vec(),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match &self.kind {
            RadialKind::V1 => (1.0 - r * r).max(0.0),
            RadialKind::V2 => (1.0 / r).min(1.0),
            RadialKind::V3 => 1.0 / (1.0 + r),
            RadialKind::V4 => (1.0 / r.sqrt()).min(1.0),
            RadialKind::Sampled { radii, values } => {
                let k = radii.partition_point(|&x| x <= r);
                if k == radii.len() {
                    return 0.0;
                }
                let (r0, r1, v0, v1) = (radii[k - 1], radii[k], values[k - 1], values[k]);
                v0 + (v1 - v0) * (r - r0) / (r1 - r0)
            }
        }
    }

    fn derivative(&self, r: f64, left: bool) -> f64 {
        let inside = |b: f64| if left { r <= b } else { r < b };
        match &self.kind {
            RadialKind::V1 => {
                if inside(1.0) {
                    -2.0 * r
                } else {
                    0.0
                }
            }
            RadialKind::V2 => {
                if inside(1.0) {
                    0.0
                } else {
                    -1.0 / (r * r)
                }
            }
            RadialKind::V3 => -1.0 / ((1.0 + r) * (1.0 + r)),
            RadialKind::V4 => {
                if inside(1.0) {
                    0.0
                } else {
                    -0.5 / (r * r.sqrt())
                }
            }
            RadialKind::Sampled { radii, values } => {
                let k = if left { radii.partition_point(|&x| x < r) } else { radii.partition_point(|&x| x <= r) };
                if k == 0 || k == radii.len() {
                    return 0.0;
                }
                (values[k] - values[k - 1]) / (radii[k] - radii[k - 1])
            }
        }
    }

    /// `V′(r − 0)`.
    pub fn derivative_left(&self, r: f64) -> f64 {
        self.derivative(r, true)
    }

    /// `V′(r + 0)`.
    pub fn derivative_right(&self, r: f64) -> f64 {
        self.derivative(r, false)
    }

    fn g(&self, r: f64, left: bool) -> f64 {
        let inside = if left { r <= 1.0 } else { r < 1.0 };
        match &self.kind {
            RadialKind::V1 => {
                if inside {
                    2.0 * r * r * r
                } else {
                    0.0
                }
            }
            RadialKind::V2 => {
                if inside {
                    0.0
                } else {
                    1.0
                }
            }
            RadialKind::V3 => (r / (1.0 + r)).powi(2),
            RadialKind::V4 => {
                if inside {
                    0.0
                } else {
                    0.5 * r.sqrt()
                }
            }
            RadialKind::Sampled { .. } => -r * r * self.derivative(r, left),
        }
    }

    /// `g(r) = −r² V′(r − 0)`.
    pub fn g_left(&self, r: f64) -> f64 {
        self.g(r, true)
    }

    /// `−r² V′(r + 0)`.
    pub fn g_right(&self, r: f64) -> f64 {
        self.g(r, false)
    }

    /// `sup {V > 0}`, possibly infinite.
    pub fn support_radius(&self) -> f64 {
        match &self.kind {
            RadialKind::V1 => 1.0,
            RadialKind::V2 | RadialKind::V3 | RadialKind::V4 => f64::INFINITY,
            RadialKind::Sampled { radii, values } => {
                let last = values.iter().rposition(|v| *v > TAIL_TOL);
                last.map_or(0.0, |k| radii[(k + 1).min(radii.len() - 1)])
            }
        }
    }

    /// `−r²V′(r−0)` nondecreasing on `{V > TAIL_TOL}`, checked on a log grid
    /// and on both sides of every breakpoint.
    pub fn hypothesis(&self) -> bool {
        let top = self.support_radius().min(1e6);
        if !(top > 0.0) {
            return false;
        }
        let mut rs: Vec<f64> = (0..=2000).map(|k| top * 10f64.powf(-9.0 + 9.0 * k as f64 / 2000.0)).collect();
        for b in self.breakpoints() {
            rs.extend([b * (1.0 - 1e-9), b, b * (1.0 + 1e-9)]);
        }
        rs.retain(|&r| r > 0.0 && r <= top && self.value(r) > TAIL_TOL);
        rs.sort_by(f64::total_cmp);
        let g: Vec<f64> = rs.iter().map(|&r| self.g_left(r)).collect();
        g.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0))
    }

    fn require_hypothesis(&self) -> Result<()> {
        if self.hypothesis() {
            Ok(())
        } else {
            Err(Error::Refused("−r²V′ is not nondecreasing on {V > 0}; this case is not covered".into()))
        }
    }

    /// Closed-form `M_∞(λv)` for the built-in potentials.
    pub fn closed_form_m_infty(&self, lambda: f64) -> Option<f64> {
        let l = lambda;
        match self.kind {
            RadialKind::V1 => Some(if l <= 3f64.sqrt() * 3.0 { 2.0 * l * l / (15.0 * 3f64.sqrt()) } else { l - 1.8 * l.cbrt() }),
            RadialKind::V2 => Some(if l <= 2.0 { l * l / 4.0 } else { l - 1.0 }),
            RadialKind::V3 => Some(if l <= 2.0 { l * l / 12.0 } else { l + 1.0 - (8.0 / 3.0) * (l / 2.0).sqrt() }),
            RadialKind::V4 => Some(if l <= 4.0 { l * l / 16.0 * (16.0 / (l * l)).ln() + 3.0 * l * l / 16.0 } else { l - 1.0 }),
            RadialKind::Sampled { .. } => None,
        }
    }
}

/// Largest `r` in `[lo, hi]` with `pred(r)` true, for a predicate that is
/// true on an initial segment.
fn last_true(pred: &dyn Fn(f64) -> bool, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `lim_{r→∞} f(r)` for a nondecreasing `f`, or `+∞` when the increments
/// along `r = 2^k` do not die out.
fn limit_at_infinity(f: &dyn Fn(f64) -> f64) -> f64 {
    let far = f(2f64.powi(60));
    let before = f(2f64.powi(59));
    if (far - before).abs() <= 1e-9 * far.abs().max(1.0) {
        far
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialConstants {
    /// `α_V = sup_{r>0} r V(r)`.
    pub alpha: f64,
    /// Smallest maximizer of `r V(r)`, `+∞` when the sup is not attained.
    pub r_star: f64,
    /// `max {r : V(r) = V(0)}`.
    pub r_zero: f64,
    /// `λ_V = 2/α_V`.
    pub lambda_v: f64,
    /// `γ_V = sup −r²V′`.
    pub gamma: f64,
    pub gamma_attained: bool,
}

/// `(α_V, r_V*, r_V⁰, λ_V)` together with `γ_V`.
pub fn radial_constants(pot: &RadialPotential) -> Result<RadialConstants> {
    pot.require_hypothesis()?;
    let support = pot.support_radius();
    let top = support.min(SEARCH_MAX);
    // (rV)′(r+0) = V(r) − g(r+0)/r is nonincreasing on {V > 0}.
    let rising = |r: f64| {
        let v = pot.value(r);
        let slope = r * pot.derivative_right(r);
        v + slope > 1e-12 * (v.abs() + slope.abs())
    };
    let r_star = if support.is_infinite() && rising(top) { f64::INFINITY } else { last_true(&rising, 0.0, top) };
    let alpha = if r_star.is_finite() {
        let at = r_star * pot.value(r_star);
        // Bisection stops one ulp short of a kink; take the better side.
        let next = r_star * (1.0 + 1e-15);
        at.max(next * pot.value(next))
    } else {
        limit_at_infinity(&|r| r * pot.value(r))
    };
    if !(alpha > 0.0) {
        return invalid("V vanishes identically");
    }
    let r_zero = if pot.g_left(top) == 0.0 { top } else { last_true(&|r| pot.g_left(r) == 0.0, 0.0, top) };
    let (gamma, gamma_attained) = if support.is_finite() {
        (pot.g_left(support), true)
    } else {
        let gamma = limit_at_infinity(&|r| pot.g_left(r));
        let attained = gamma.is_finite() && pot.g_left(2f64.powi(26)) >= gamma * (1.0 - 1e-15);
        (gamma, attained)
    };
    Ok(RadialConstants { alpha, r_star, r_zero, lambda_v: 2.0 / alpha, gamma, gamma_attained })
}

fn zeta_with(pot: &RadialPotential, consts: &RadialConstants, lambda: f64) -> f64 {
    let target = 2.0 / lambda;
    let below = |r: f64| pot.g_left(r) < target;
    let support = pot.support_radius();
    if support.is_finite() {
        if below(support) {
            return support;
        }
        return last_true(&below, 0.0, support);
    }
    if target > consts.gamma || (!consts.gamma_attained && target >= consts.gamma * (1.0 - 1e-15)) {
        return f64::INFINITY;
    }
    let mut hi = 1.0;
    while below(hi) {
        hi *= 2.0;
        if hi > 2f64.powi(60) {
            return f64::INFINITY;
        }
    }
    last_true(&below, 0.0, hi)
}

/// `ζ(λ) = sup {r ∈ cl{V > 0} : −r²V′(r−0) < 2/λ}`.
pub fn zeta(pot: &RadialPotential, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return invalid("ζ needs λ > 0");
    }
    let consts = radial_constants(pot)?;
    Ok(zeta_with(pot, &consts, lambda))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSolution {
    pub lambda: f64,
    pub potential: RadialPotential,
    /// `F_λ = min(scale · g, mass)` on `(0, r_λ]`.
    pub scale: f64,
    pub mass: f64,
    pub r_lambda: f64,
    pub c_lambda: f64,
    /// `⟨v, ρ_λ⟩`.
    pub v_pairing: f64,
    pub m_infty: f64,
    /// Spheres carrying mass: `(radius, mass)`.
    pub atoms: Vec<(f64, f64)>,
}

impl RadialSolution {
    /// `F_λ(r) = ρ_λ(B(0, r))` (open ball, so left-continuous).
    pub fn repartition(&self, r: f64) -> f64 {
        if r > self.r_lambda {
            self.mass
        } else {
            (self.scale * self.potential.g_left(r)).min(self.mass)
        }
    }

    /// `F_λ(r + 0)`.
    pub fn repartition_right(&self, r: f64) -> f64 {
        if r >= self.r_lambda {
            self.mass
        } else {
            (self.scale * self.potential.g_right(r)).min(self.mass)
        }
    }

    /// Integration breakpoints inside `(0, r_λ)`.
    fn cuts(&self) -> Vec<f64> {
        let mut cuts: Vec<f64> = self.potential.breakpoints().into_iter().filter(|&b| b > 0.0 && b < self.r_lambda).collect();
        cuts.extend(self.atoms.iter().map(|a| a.0).filter(|&r| r < self.r_lambda));
        cuts
    }

    /// `U_λ(r) = ∫_r^∞ F_λ(t)/t² dt`.
    pub fn potential_at(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return invalid("U_λ is evaluated at r > 0");
        }
        if r >= self.r_lambda {
            return Ok(self.mass / r);
        }
        let f = |t: f64| self.repartition(t) / (t * t);
        let inner = integrate(&f, r, self.r_lambda, &self.cuts(), QuadOptions::default())?.value;
        Ok(inner + if self.r_lambda.is_finite() { self.mass / self.r_lambda } else { 0.0 })
    }
}

/// Radial minimizer, its multiplier `c_λ` and `M_∞(λv)`.
pub fn solve_radial(pot: &RadialPotential, lambda: f64) -> Result<RadialSolution> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return invalid("λ must be finite and nonnegative");
    }
    let consts = radial_constants(pot)?;
    if lambda == 0.0 {
        return Ok(RadialSolution {
            lambda,
            potential: pot.clone(),
            scale: 0.0,
            mass: 0.0,
            r_lambda: consts.r_star,
            c_lambda: 0.0,
            v_pairing: 0.0,
            m_infty: 0.0,
            atoms: Vec::new(),
        });
    }
    let effective = lambda.max(consts.lambda_v);
    let r_lambda = zeta_with(pot, &consts, effective);
    let scale = 0.5 * lambda;
    let mass = (lambda / effective).min(1.0);
    let mut sol = RadialSolution {
        lambda,
        potential: pot.clone(),
        scale,
        mass,
        r_lambda,
        c_lambda: 0.0,
        v_pairing: 0.0,
        m_infty: 0.0,
        atoms: Vec::new(),
    };
    for b in pot.breakpoints() {
        if b > 0.0 && b < r_lambda {
            let jump = sol.repartition_right(b) - sol.repartition(b);
            if jump > 1e-12 {
                sol.atoms.push((b, jump));
            }
        }
    }
    if r_lambda.is_finite() {
        let jump = mass - sol.repartition(r_lambda);
        if jump > 1e-12 {
            sol.atoms.push((r_lambda, jump));
        }
        sol.c_lambda = mass / r_lambda - scale * pot.value(r_lambda);
    }
    let integrand = |t: f64| {
        let g = pot.g_left(t);
        if g == 0.0 {
            0.0
        } else {
            (scale * g).min(mass) * g / (t * t)
        }
    };
    let mut cuts = sol.cuts();
    // The cap of F at the mass is a kink.
    if let Some(k) = kink_of_cap(pot, scale, mass, r_lambda) {
        cuts.push(k);
    }
    let bulk = integrate(&integrand, 0.0, r_lambda, &cuts, QuadOptions::default())?.value;
    sol.v_pairing = bulk + if r_lambda.is_finite() { mass * pot.value(r_lambda) } else { 0.0 };
    sol.m_infty = scale * sol.v_pairing - sol.c_lambda * mass;
    Ok(sol)
}

fn kink_of_cap(pot: &RadialPotential, scale: f64, mass: f64, r_lambda: f64) -> Option<f64> {
    let top = r_lambda.min(SEARCH_MAX);
    if scale * pot.g_left(top) < mass {
        return None;
    }
    let k = last_true(&|r| scale * pot.g_left(r) < mass, 0.0, top);
    (k > 0.0 && k < r_lambda).then_some(k)
}

/// `U(r) = ∫_r^∞ F(t)/t² dt` on a grid for a repartition function `F`.
pub fn potential_from_f(f: &dyn Fn(f64) -> f64, radii: &[f64], breakpoints: &[f64]) -> Result<Vec<f64>> {
    radii
        .iter()
        .map(|&r| {
            if !(r > 0.0) {
                return invalid("U is evaluated at r > 0");
            }
            let integrand = |t: f64| f(t) / (t * t);
            integrate(&integrand, r, f64::INFINITY, breakpoints, QuadOptions::default()).map(|q| q.value)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassRow {
    pub lambda: f64,
    pub mass: f64,
    pub r_lambda: f64,
    pub c_lambda: f64,
    pub m_infty: f64,
    pub m_infty_closed_form: Option<f64>,
    pub rel_err: Option<f64>,
}

/// One row per `λ` (computed in parallel, input order kept).
pub fn mass_curve(pot: &RadialPotential, lambdas: &[f64]) -> Result<Vec<MassRow>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let s = solve_radial(pot, lambda)?;
            let closed = pot.closed_form_m_infty(lambda);
            let rel_err = closed.map(|c| if c == 0.0 { (s.m_infty - c).abs() } else { ((s.m_infty - c) / c).abs() });
            Ok(MassRow { lambda, mass: s.mass, r_lambda: s.r_lambda, c_lambda: s.c_lambda, m_infty: s.m_infty, m_infty_closed_form: closed, rel_err })
        })
        .collect()
}

/// Concentric spheres standing in for a radial measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Shells {
    pub radii: Vec<f64>,
    pub masses: Vec<f64>,
}

impl Shells {
    /// Coulomb interaction of uniform spheres, `1/max(r_i, r_j)`.
    pub fn kernel(&self) -> Vec<Vec<f64>> {
        shell_kernel(&self.radii, f64::INFINITY)
    }

    /// Optimality residuals of the shells for the potential of `sol`,
    /// with probes outside the support.
    pub fn optimality(&self, sol: &RadialSolution, tol: f64) -> Result<OptimalityReport> {
        let v: Vec<f64> = self.radii.iter().map(|&r| sol.potential.value(r)).collect();
        let mut probe_radii = Vec::new();
        if sol.r_lambda.is_finite() {
            probe_radii.extend([1.05, 1.5, 2.0, 4.0, 16.0].map(|f| f * sol.r_lambda));
        }
        let probes: Vec<Probe> = probe_radii
            .iter()
            .map(|&r| Probe { kernel_row: self.radii.iter().map(|&s| 1.0 / r.max(s)).collect(), v: sol.potential.value(r) })
            .collect();
        optimality_residuals_matrix(&self.kernel(), &self.masses, &v, sol.lambda, &probes, tol)
    }
}

/// `min(1/max(r_i, r_j), h)`.
pub fn shell_kernel(radii: &[f64], h: f64) -> Vec<Vec<f64>> {
    radii.iter().map(|&a| radii.iter().map(|&b| (1.0 / a.max(b)).min(h)).collect()).collect()
}

/// Discretizes `ρ_λ` onto at most `n` bins plus one sphere per atom. Each bin's mass
/// is placed at its harmonic radius `m / ∫ dF/t`, which reproduces the
/// potential exactly outside the bin.
pub fn shell_discretize(sol: &RadialSolution, n: usize) -> Result<Shells> {
    if n == 0 {
        return invalid("need at least one shell");
    }
    let mut edges = vec![0.0, sol.r_lambda];
    edges.extend(sol.cuts());
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let bin_mass = |a: f64, b: f64| {
        let fa = if a == 0.0 { 0.0 } else { sol.repartition_right(a) };
        let fb = if b.is_finite() { sol.repartition(b) } else { sol.mass };
        fb - fa
    };
    // ∫_{(a,b)} dF/t by parts.
    let inverse_moment = |a: f64, b: f64| -> Result<f64> {
        let upper_end = if b.is_finite() { sol.repartition(b) / b } else { 0.0 };
        let lower_end = if a == 0.0 { 0.0 } else { sol.repartition_right(a) / a };
        let inner = integrate(&|t: f64| sol.repartition(t) / (t * t), a.max(f64::MIN_POSITIVE), b, &[], QuadOptions::default())?.value;
        Ok(upper_end - lower_end + inner)
    };
    // Bound on the self-interaction error of a bin: ∫dF/t − m/b.
    let score = |a: f64, b: f64| -> Result<f64> {
        let m = bin_mass(a, b);
        if !(m > 1e-15) {
            return Ok(0.0);
        }
        Ok(inverse_moment(a, b)? - if b.is_finite() { m / b } else { 0.0 })
    };
    let mut scores = edges.windows(2).map(|w| score(w[0], w[1])).collect::<Result<Vec<f64>>>()?;
    while scores.len() < n {
        let (k, best) = scores.iter().copied().enumerate().fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if !(best > 0.0) {
            break;
        }
        let (a, b) = (edges[k], edges[k + 1]);
        let mid = if b.is_finite() { 0.5 * (a + b) } else { (2.0 * a).max(1.0) };
        edges.insert(k + 1, mid);
        scores[k] = score(a, mid)?;
        scores.insert(k + 1, score(mid, b)?);
    }
    let mut shells: Vec<(f64, f64)> = sol.atoms.clone();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let m = bin_mass(a, b);
        if !(m > 1e-15) {
            continue;
        }
        let moment = inverse_moment(a, b)?;
        if !(moment > 0.0) {
            return Err(Error::Numerical(format!("bin ({a}, {b}) has no positive harmonic mean")));
        }
        shells.push((m / moment, m));
    }
    shells.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(Shells { radii: shells.iter().map(|s| s.0).collect(), masses: shells.iter().map(|s| s.1).collect() })
}
