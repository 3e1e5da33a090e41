//! Discrete sub-probability measures, radial interaction costs and ground grids.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Default separation below which two support points are considered equal.
pub const POINT_TOL: f64 = 1e-12;
/// Default slack on the total mass.
pub const MASS_TOL: f64 = 1e-12;

/// Euclidean distance.
pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Mass-weighted product with the convention `0·∞ = 0`.
pub fn weighted(mass: f64, value: f64) -> f64 {
    if mass == 0.0 {
        0.0
    } else {
        mass * value
    }
}

/// Finitely supported nonnegative measure of total mass at most one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub masses: Vec<f64>,
    #[serde(default = "default_mass_tol")]
    pub mass_tol: f64,
}

fn default_mass_tol() -> f64 {
    MASS_TOL
}

impl DiscreteMeasure {
    /// Validates the data and merges atoms closer than [`POINT_TOL`].
    pub fn new(dim: usize, points: Vec<Vec<f64>>, masses: Vec<f64>) -> Result<Self> {
        Self::with_tolerances(dim, points, masses, POINT_TOL, MASS_TOL)
    }

    pub fn with_tolerances(dim: usize, points: Vec<Vec<f64>>, masses: Vec<f64>, point_tol: f64, mass_tol: f64) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        if points.len() != masses.len() {
            return invalid(format!("{} points but {} masses", points.len(), masses.len()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return invalid(format!("point {p:?} does not have dimension {dim}"));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return invalid("coordinates must be finite");
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return invalid(format!("mass {m} is not a nonnegative real"));
        }
        let mut merged_points: Vec<Vec<f64>> = Vec::with_capacity(points.len());
        let mut merged_masses: Vec<f64> = Vec::with_capacity(points.len());
        for (p, m) in points.into_iter().zip(masses) {
            match merged_points.iter().position(|q| distance(q, &p) <= point_tol) {
                Some(i) => merged_masses[i] += m,
                None => {
                    merged_points.push(p);
                    merged_masses.push(m);
                }
            }
        }
        let total: f64 = merged_masses.iter().sum();
        if total > 1.0 + mass_tol {
            return invalid(format!("total mass {total} exceeds 1"));
        }
        Ok(Self { dim, points: merged_points, masses: merged_masses, mass_tol })
    }

    pub fn dirac(point: Vec<f64>, mass: f64) -> Result<Self> {
        let dim = point.len();
        Self::new(dim, vec![point], vec![mass])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= self.mass_tol.max(1e-12)
    }

    pub fn translate(&self, h: &[f64]) -> Result<Self> {
        if h.len() != self.dim {
            return invalid(format!("shift has dimension {} but the measure has {}", h.len(), self.dim));
        }
        let points = self.points.iter().map(|p| p.iter().zip(h).map(|(a, b)| a + b).collect()).collect();
        Ok(Self { points, ..self.clone() })
    }

    /// The measure `θ·ρ`.
    pub fn scaled(&self, theta: f64) -> Result<Self> {
        Self::with_tolerances(self.dim, self.points.clone(), self.masses.iter().map(|m| m * theta).collect(), 0.0, self.mass_tol)
    }
}

/// Total mass of `rho`.
pub fn total_mass(rho: &DiscreteMeasure) -> f64 {
    rho.total_mass()
}

/// `rho` shifted by `h`.
pub fn translate(rho: &DiscreteMeasure, h: &[f64]) -> Result<DiscreteMeasure> {
    rho.translate(h)
}

/// Three-valued answer for properties that cannot always be decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tristate {
    Yes,
    No,
    Unknown,
}

/// Shape of the radial interaction `ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum CostKind {
    /// Right-continuous step function: `values[i]` on `[radii[i], radii[i+1])`,
    /// the last value extending to infinity. `radii[0]` must be `0`.
    Table { radii: Vec<f64>, values: Vec<f64> },
    Coulomb,
    /// `r^{-p}`.
    Riesz { p: f64 },
    /// `min(base, h)`.
    Truncated { base: Box<CostKind>, h: f64 },
    /// `e^{-a r}`.
    Exponential { a: f64 },
    /// `+∞` below distance one, zero from one on.
    HardSphere,
    /// Piecewise-linear samples on `[0, radii.last]`; beyond that cutoff the
    /// cost equals the declared `tail_bound`.
    Sampled { radii: Vec<f64>, values: Vec<f64>, tail_bound: f64 },
}

/// A radial cost with its classification flags.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpec {
    pub kind: CostKind,
    pub ell_at_zero: f64,
    pub bounded: bool,
    pub positive_type: Tristate,
}

/// Status of the standing hypotheses for a given ambient dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub h1_nonnegative_positive_at_zero: bool,
    pub h2_lower_semicontinuous: bool,
    pub h3_vanishes_at_infinity: bool,
    pub h4_locally_integrable: Tristate,
    pub h5_positive_type: Tristate,
}

fn validate_kind(kind: &CostKind) -> Result<()> {
    match kind {
        CostKind::Table { radii, values } => {
            if radii.is_empty() || radii.len() != values.len() {
                return invalid("table cost needs matching, nonempty radii and values");
            }
            if radii[0] != 0.0 {
                return invalid("table cost radii must start at 0");
            }
            if radii.windows(2).any(|w| !(w[1] > w[0])) {
                return invalid("table cost radii must be strictly increasing");
            }
            if values.iter().any(|v| v.is_nan() || *v < 0.0) {
                return invalid("table cost values must be nonnegative");
            }
        }
        CostKind::Riesz { p } if !(p.is_finite() && *p > 0.0) => return invalid("riesz exponent must be positive"),
        CostKind::Exponential { a } if !(a.is_finite() && *a > 0.0) => return invalid("exponential rate must be positive"),
        CostKind::Truncated { base, h } => {
            if !(h.is_finite() && *h > 0.0) {
                return invalid("truncation level must be positive and finite");
            }
            validate_kind(base)?;
        }
        CostKind::Sampled { radii, values, tail_bound } => {
            if radii.len() < 2 || radii.len() != values.len() {
                return invalid("sampled cost needs at least two matching samples");
            }
            if radii[0] != 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) {
                return invalid("sampled cost radii must start at 0 and increase");
            }
            if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return invalid("sampled cost values must be finite and nonnegative");
            }
            if !(tail_bound.is_finite() && *tail_bound >= 0.0) {
                return invalid("sampled cost needs a finite nonnegative tail bound");
            }
        }
        _ => {}
    }
    Ok(())
}

fn eval_kind(kind: &CostKind, r: f64) -> f64 {
    match kind {
        CostKind::Table { radii, values } => values[radii.partition_point(|&x| x <= r) - 1],
        CostKind::Coulomb => 1.0 / r,
        CostKind::Riesz { p } => r.powf(-p),
        CostKind::Truncated { base, h } => eval_kind(base, r).min(*h),
        CostKind::Exponential { a } => (-a * r).exp(),
        CostKind::HardSphere => {
            if r < 1.0 {
                f64::INFINITY
            } else {
                0.0
            }
        }
        CostKind::Sampled { radii, values, tail_bound } => sampled_value(radii, values, *tail_bound, r),
    }
}

fn sampled_value(radii: &[f64], values: &[f64], tail: f64, r: f64) -> f64 {
    let n = radii.len();
    if r > radii[n - 1] {
        return tail;
    }
    let k = radii.partition_point(|&x| x <= r).clamp(1, n - 1);
    let t = (r - radii[k - 1]) / (radii[k] - radii[k - 1]);
    values[k - 1] + t * (values[k] - values[k - 1])
}

fn is_monotone_kind(kind: &CostKind) -> bool {
    match kind {
        CostKind::Table { values, .. } => values.windows(2).all(|w| w[1] <= w[0]),
        CostKind::Sampled { values, tail_bound, .. } => {
            values.windows(2).all(|w| w[1] <= w[0]) && *tail_bound <= *values.last().expect("nonempty")
        }
        CostKind::Truncated { base, .. } => is_monotone_kind(base),
        _ => true,
    }
}

impl CostSpec {
    pub fn new(kind: CostKind) -> Result<Self> {
        validate_kind(&kind)?;
        let ell_at_zero = eval_kind(&kind, 0.0);
        let sup = sup_kind(&kind);
        let positive_type = match &kind {
            CostKind::Exponential { .. } | CostKind::Coulomb | CostKind::Riesz { .. } => Tristate::Yes,
            CostKind::HardSphere => Tristate::No,
            CostKind::Table { values, .. } if values.len() == 1 => Tristate::Yes,
            CostKind::Table { values, .. } | CostKind::Sampled { values, .. } if values.iter().skip(1).any(|v| *v > values[0]) => {
                Tristate::No
            }
            _ => Tristate::Unknown,
        };
        Ok(Self { kind, ell_at_zero, bounded: sup.is_finite(), positive_type })
    }

    pub fn coulomb() -> Self {
        Self::new(CostKind::Coulomb).expect("valid")
    }

    pub fn hard_sphere() -> Self {
        Self::new(CostKind::HardSphere).expect("valid")
    }

    pub fn exponential(a: f64) -> Result<Self> {
        Self::new(CostKind::Exponential { a })
    }

    pub fn riesz(p: f64) -> Result<Self> {
        Self::new(CostKind::Riesz { p })
    }

    pub fn truncated(base: CostKind, h: f64) -> Result<Self> {
        Self::new(CostKind::Truncated { base: Box::new(base), h })
    }

    /// Two-level table: `l0` at distance zero, `l1` on `(0, cutoff)` and zero beyond.
    pub fn two_level(l0: f64, l1: f64, cutoff: f64) -> Result<Self> {
        Self::new(CostKind::Table { radii: vec![0.0, POINT_TOL, cutoff], values: vec![l0, l1, 0.0] })
    }

    /// Constant cost `ℓ ≡ c`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::new(CostKind::Table { radii: vec![0.0], values: vec![c] })
    }

    /// `ℓ(r)`; negative radii are rejected.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r < 0.0 {
            return invalid(format!("cost evaluated at negative radius {r}"));
        }
        Ok(self.value(r))
    }

    /// `ℓ(r)` for a radius already known to be nonnegative.
    pub fn value(&self, r: f64) -> f64 {
        eval_kind(&self.kind, r)
    }

    pub fn sup(&self) -> f64 {
        sup_kind(&self.kind)
    }

    pub fn is_monotone(&self) -> bool {
        is_monotone_kind(&self.kind)
    }

    /// `(ℓ̲(r), ℓ̄(r))`: the infimum over `[0, r]` and the supremum over `[r, ∞)`.
    pub fn monotone_envelopes(&self, r: f64) -> Result<(f64, f64)> {
        if r.is_nan() || r < 0.0 {
            return invalid(format!("envelope requested at negative radius {r}"));
        }
        Ok(envelopes_kind(&self.kind, r))
    }

    pub fn hypotheses(&self, dim: usize) -> Hypotheses {
        let h1 = self.ell_at_zero > 0.0 && nonnegative_kind(&self.kind);
        let h3 = tail_kind(&self.kind) == 0.0;
        let h4 = match singular_exponent(&self.kind) {
            None => Tristate::Yes,
            Some(p) if p.is_infinite() => Tristate::No,
            Some(p) => {
                if p < dim as f64 {
                    Tristate::Yes
                } else {
                    Tristate::No
                }
            }
        };
        let h5 = if self.ell_at_zero.is_finite() { self.positive_type } else { Tristate::No };
        Hypotheses {
            h1_nonnegative_positive_at_zero: h1,
            h2_lower_semicontinuous: lsc_kind(&self.kind),
            h3_vanishes_at_infinity: h3,
            h4_locally_integrable: h4,
            h5_positive_type: h5,
        }
    }

    /// Riesz-type costs satisfy `ℓ(sr) ≤ s^{-p} ℓ(r)` with `∫₀¹ s^{d-1-p} ds < ∞`
    /// exactly when `p < d`; that slow-decay condition is decided here.
    pub fn slow_decay_condition(&self, dim: usize) -> bool {
        fn exponent(kind: &CostKind) -> Option<f64> {
            match kind {
                CostKind::Coulomb => Some(1.0),
                CostKind::Riesz { p } => Some(*p),
                CostKind::Truncated { base, .. } => exponent(base),
                _ => None,
            }
        }
        exponent(&self.kind).is_some_and(|p| p < dim as f64)
    }
}

fn sup_kind(kind: &CostKind) -> f64 {
    match kind {
        CostKind::Table { values, .. } => values.iter().copied().fold(0.0, f64::max),
        CostKind::Coulomb | CostKind::Riesz { .. } | CostKind::HardSphere => f64::INFINITY,
        CostKind::Truncated { base, h } => sup_kind(base).min(*h),
        CostKind::Exponential { .. } => 1.0,
        CostKind::Sampled { values, tail_bound, .. } => values.iter().copied().fold(*tail_bound, f64::max),
    }
}

fn tail_kind(kind: &CostKind) -> f64 {
    match kind {
        CostKind::Table { values, .. } => *values.last().expect("nonempty"),
        CostKind::Truncated { base, h } => tail_kind(base).min(*h),
        CostKind::Sampled { tail_bound, .. } => *tail_bound,
        _ => 0.0,
    }
}

fn nonnegative_kind(kind: &CostKind) -> bool {
    match kind {
        CostKind::Table { values, .. } | CostKind::Sampled { values, .. } => values.iter().all(|v| *v >= 0.0),
        CostKind::Truncated { base, .. } => nonnegative_kind(base),
        _ => true,
    }
}

fn lsc_kind(kind: &CostKind) -> bool {
    match kind {
        // A right-continuous step function is l.s.c. iff every jump goes up to the left.
        CostKind::Table { values, .. } => values.windows(2).all(|w| w[1] <= w[0]),
        CostKind::Truncated { base, .. } => lsc_kind(base),
        CostKind::Sampled { values, tail_bound, .. } => *tail_bound <= *values.last().expect("nonempty"),
        _ => true,
    }
}

/// Order of the singularity at the origin, `None` when bounded.
fn singular_exponent(kind: &CostKind) -> Option<f64> {
    match kind {
        CostKind::Coulomb => Some(1.0),
        CostKind::Riesz { p } => Some(*p),
        CostKind::HardSphere => Some(f64::INFINITY),
        _ => None,
    }
}

fn envelopes_kind(kind: &CostKind, r: f64) -> (f64, f64) {
    match kind {
        CostKind::Table { radii, values } => {
            let k = radii.partition_point(|&x| x <= r);
            let lower = values[..k].iter().copied().fold(f64::INFINITY, f64::min);
            let upper = values[k - 1..].iter().copied().fold(0.0, f64::max);
            (lower, upper)
        }
        CostKind::Truncated { base, h } => {
            let (lo, up) = envelopes_kind(base, r);
            (lo.min(*h), up.min(*h))
        }
        CostKind::Sampled { radii, values, tail_bound } => {
            let at = sampled_value(radii, values, *tail_bound, r);
            let mut lower = at;
            let mut upper = at.max(*tail_bound);
            for (x, v) in radii.iter().zip(values) {
                if *x <= r {
                    lower = lower.min(*v);
                } else {
                    upper = upper.max(*v);
                }
            }
            if r > *radii.last().expect("nonempty") {
                lower = lower.min(*tail_bound);
            }
            (lower, upper)
        }
        _ => {
            let v = eval_kind(kind, r);
            (v, v)
        }
    }
}

/// The ball average `[f](r) = (d/r^d) ∫₀^r f(t) t^{d−1} dt`.
pub fn radial_average(f: &dyn Fn(f64) -> f64, r: f64, dim: usize) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) || dim == 0 {
        return invalid("radial average needs r > 0 and a positive dimension");
    }
    let d = dim as i32;
    let g = |s: f64| {
        if s == 0.0 && d > 1 {
            return 0.0;
        }
        f(r * s) * s.powi(d - 1)
    };
    let q = integrate(&g, 0.0, 1.0, &[], QuadOptions::default())
        .map_err(|e| Error::Numerical(format!("radial average: {e}")))?;
    Ok(dim as f64 * q.value)
}

/// Monte-Carlo estimate with a standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Mean interaction `K(r,d)` of two independent uniform points of the ball `B(0,r)`.
/// Costs that are not locally integrable give an infinite value.
pub fn k_constant(cost: &CostSpec, r: f64, dim: usize, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if !(r > 0.0) || dim == 0 || samples < 2 {
        return invalid("K(r,d) needs r > 0, d ≥ 1 and at least two samples");
    }
    if cost.hypotheses(dim).h4_locally_integrable == Tristate::No {
        return Ok(MonteCarloEstimate { value: f64::INFINITY, std_error: 0.0, samples: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ball_point = |rng: &mut ChaCha8Rng| loop {
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return p;
        }
    };
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let x = ball_point(&mut rng);
        let y = ball_point(&mut rng);
        let v = cost.value(r * distance(&x, &y));
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(MonteCarloEstimate { value: mean, std_error: (var / n).sqrt(), samples })
}

/// Finite set of nodes, optionally augmented by a point at infinity `ω`
/// that interacts with everything at zero cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundGrid {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    #[serde(default = "yes")]
    pub has_omega: bool,
}

fn yes() -> bool {
    true
}

impl GroundGrid {
    pub fn new(dim: usize, nodes: Vec<Vec<f64>>, has_omega: bool) -> Result<Self> {
        if nodes.iter().any(|p| p.len() != dim) {
            return invalid("grid node dimension mismatch");
        }
        for i in 0..nodes.len() {
            for j in 0..i {
                if distance(&nodes[i], &nodes[j]) <= POINT_TOL {
                    return invalid(format!("grid nodes {j} and {i} coincide"));
                }
            }
        }
        Ok(Self { dim, nodes, has_omega })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interaction matrix `L_ij = ℓ(|x_i − x_j|)` over the finite nodes.
    pub fn interaction(&self, cost: &CostSpec) -> Vec<Vec<f64>> {
        self.nodes.iter().map(|x| self.nodes.iter().map(|y| cost.value(distance(x, y))).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_and_translation() {
        let rho = DiscreteMeasure::new(1, vec![vec![0.0], vec![1.0]], vec![0.3, 0.2]).unwrap();
        assert!((rho.total_mass() - 0.5).abs() < 1e-15);
        let empty = DiscreteMeasure::new(1, vec![], vec![]).unwrap();
        assert_eq!(empty.total_mass(), 0.0);
        let half = DiscreteMeasure::new(1, vec![vec![0.0], vec![1.0]], vec![0.5, 0.5]).unwrap();
        let moved = half.translate(&[2.0]).unwrap();
        assert_eq!(moved.points, vec![vec![2.0], vec![3.0]]);
        assert_eq!(half.translate(&[0.0]).unwrap(), half);
        assert!(half.translate(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn coincident_atoms_merge_and_excess_mass_fails() {
        let rho = DiscreteMeasure::new(1, vec![vec![0.0], vec![0.0]], vec![0.25, 0.25]).unwrap();
        assert_eq!(rho.len(), 1);
        assert_eq!(rho.masses, vec![0.5]);
        assert!(DiscreteMeasure::new(1, vec![vec![0.0]], vec![1.5]).is_err());
        assert!(DiscreteMeasure::new(1, vec![vec![0.0]], vec![-0.1]).is_err());
    }

    #[test]
    fn cost_evaluations() {
        assert_eq!(CostSpec::coulomb().eval(2.0).unwrap(), 0.5);
        assert_eq!(CostSpec::hard_sphere().eval(0.5).unwrap(), f64::INFINITY);
        let t = CostSpec::truncated(CostKind::Coulomb, 3.0).unwrap();
        assert_eq!(t.eval(0.1).unwrap(), 3.0);
        assert!(CostSpec::coulomb().eval(-1.0).is_err());
        let two = CostSpec::two_level(1.0, 0.5, 10.0).unwrap();
        assert_eq!(two.value(0.0), 1.0);
        assert_eq!(two.value(1.0), 0.5);
        assert_eq!(two.value(10.0), 0.0);
    }

    #[test]
    fn envelopes_examples() {
        assert_eq!(CostSpec::coulomb().monotone_envelopes(2.0).unwrap(), (0.5, 0.5));
        assert_eq!(CostSpec::hard_sphere().monotone_envelopes(2.0).unwrap(), (0.0, 0.0));
        let radii: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.005).collect();
        let values: Vec<f64> = radii.iter().map(|t| t.sin().abs() + (-t).exp()).collect();
        let cost = CostSpec::new(CostKind::Sampled { radii: radii.clone(), values: values.clone(), tail_bound: 1.0 }).unwrap();
        let (lo, _) = cost.monotone_envelopes(std::f64::consts::PI).unwrap();
        let dense = (0..=200_000)
            .map(|i| i as f64 * std::f64::consts::PI / 200_000.0)
            .map(|t| cost.value(t))
            .fold(f64::INFINITY, f64::min);
        assert!(lo <= dense && dense - lo < 3e-5, "{lo} {dense}");
    }

    #[test]
    fn radial_average_examples() {
        assert!((radial_average(&|_| 1.0, 2.5, 3).unwrap() - 1.0).abs() < 1e-12);
        assert!((radial_average(&|t| 1.0 / t, 1.0, 3).unwrap() - 1.5).abs() < 1e-10);
        assert!((radial_average(&|t| t, 2.0, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(radial_average(&|t| 1.0 / t, 1.0, 1).is_err());
    }

    #[test]
    fn k_constant_examples() {
        let one = CostSpec::constant(1.0).unwrap();
        assert!((k_constant(&one, 0.7, 2, 1000, 1).unwrap().value - 1.0).abs() < 1e-15);
        assert_eq!(k_constant(&CostSpec::hard_sphere(), 1.0, 3, 1000, 1).unwrap().value, f64::INFINITY);
        // Mean inverse distance of two uniform points in the unit ball is 6/5.
        let est = k_constant(&CostSpec::coulomb(), 1.0, 3, 200_000, 7).unwrap();
        assert!((est.value - 1.2).abs() < 5.0 * est.std_error + 1e-3, "{est:?}");
    }

    #[test]
    fn hypotheses_flags() {
        let h = CostSpec::coulomb().hypotheses(3);
        assert!(h.h1_nonnegative_positive_at_zero && h.h3_vanishes_at_infinity);
        assert_eq!(h.h4_locally_integrable, Tristate::Yes);
        assert_eq!(h.h5_positive_type, Tristate::No);
        assert_eq!(CostSpec::hard_sphere().hypotheses(2).h4_locally_integrable, Tristate::No);
        assert_eq!(CostSpec::exponential(1.0).unwrap().hypotheses(1).h5_positive_type, Tristate::Yes);
        assert!(CostSpec::coulomb().slow_decay_condition(3));
        assert!(!CostSpec::exponential(1.0).unwrap().slow_decay_condition(3));
    }
}
