//! Hard-sphere packing quantities: maximal ε-separated counts in boxes, the
//! packing constants `γ_1` and `γ_2`, weighted packing duals on a line,
//! congestion-set membership and Wasserstein diagnostics in one dimension.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Relative slack on the separation constraint, so that grid points spaced
/// exactly `ε` apart survive floating-point rounding.
pub const SEPARATION_TOL: f64 = 1e-9;
/// `γ_1`.
pub const GAMMA_1: f64 = 1.0;
/// Triangular-lattice density `2/√3`, the value of `γ_2`.
pub const GAMMA_2: f64 = 1.154_700_538_379_251_5;

fn separated(d: f64, eps: f64) -> bool {
    d >= eps * (1.0 - SEPARATION_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Points anywhere in the closure of `Ω` (the count `n_ε`).
    Points,
    /// Balls of diameter `ε` inside `Ω`, i.e. centers at distance `≥ ε/2` from the complement (`ñ_ε`).
    Balls,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return invalid("box corners must have the same positive dimension");
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return invalid("box must satisfy lo < hi in every coordinate");
        }
        Ok(Self { lo, hi })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    fn shrunk(&self, by: f64) -> Option<AxisBox> {
        let lo: Vec<f64> = self.lo.iter().map(|a| a + by).collect();
        let hi: Vec<f64> = self.hi.iter().map(|b| b - by).collect();
        lo.iter().zip(&hi).all(|(a, b)| a <= b).then_some(AxisBox { lo, hi })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingInstance {
    pub dim: usize,
    pub boxes: Vec<AxisBox>,
    pub eps: f64,
    pub mode: BoundaryMode,
}

impl PackingInstance {
    pub fn new(boxes: Vec<AxisBox>, eps: f64, mode: BoundaryMode) -> Result<Self> {
        let Some(first) = boxes.first() else {
            return invalid("the domain needs at least one box");
        };
        let dim = first.dim();
        if !(1..=2).contains(&dim) || boxes.iter().any(|b| b.dim() != dim) {
            return invalid("packing supports dimension 1 or 2 with boxes of a common dimension");
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return invalid("ε must be positive");
        }
        Ok(Self { dim, boxes, eps, mode })
    }

    pub fn interval(a: f64, b: f64, eps: f64, mode: BoundaryMode) -> Result<Self> {
        Self::new(vec![AxisBox::interval(a, b)?], eps, mode)
    }

    /// `|Ω|` for a union of boxes, counting overlaps once (1-D) or summing (2-D, assumed disjoint).
    pub fn volume(&self) -> f64 {
        if self.dim == 1 {
            merge_intervals(&self.boxes, 0.0).iter().map(|(a, b)| b - a).sum()
        } else {
            self.boxes.iter().map(AxisBox::volume).sum()
        }
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.boxes.clone(), eps, self.mode)
    }
}

/// Union of intervals as sorted disjoint closed intervals; touching ones merge.
fn merge_intervals(boxes: &[AxisBox], shrink: f64) -> Vec<(f64, f64)> {
    let mut iv: Vec<(f64, f64)> = boxes.iter().map(|b| (b.lo[0], b.hi[0])).collect();
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in iv {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    merged.into_iter().filter_map(|(a, b)| (a + shrink <= b - shrink).then_some((a + shrink, b - shrink))).collect()
}

/// Admissible centers along a line for the boundary mode.
fn admissible_1d(inst: &PackingInstance) -> Vec<(f64, f64)> {
    match inst.mode {
        BoundaryMode::Points => merge_intervals(&inst.boxes, 0.0),
        BoundaryMode::Balls => merge_intervals(&inst.boxes, 0.5 * inst.eps),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackCount1d {
    pub count: usize,
    pub witness: Vec<f64>,
}

/// Exact maximal count on a union of intervals by the left-to-right greedy sweep.
pub fn pack_count_1d(inst: &PackingInstance) -> Result<PackCount1d> {
    if inst.dim != 1 {
        return invalid("pack_count_1d needs a one-dimensional instance");
    }
    let step = inst.eps;
    let mut witness: Vec<f64> = Vec::new();
    for (a, b) in admissible_1d(inst) {
        let start = witness.last().map_or(a, |&x| a.max(x + step));
        if start > b && !(witness.last().is_some_and(|&x| separated(b - x, step))) {
            continue;
        }
        let start = start.min(b);
        let k = ((b - start) / (step * (1.0 - SEPARATION_TOL))).floor() as usize;
        witness.extend((0..=k).map(|i| (start + i as f64 * step).min(b)));
    }
    Ok(PackCount1d { count: witness.len(), witness })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackBracket {
    pub lower: usize,
    pub upper: usize,
    pub witness: Vec<[f64; 2]>,
}

/// Points of a lattice clipped to a box, with rows along the first axis when
/// `transpose` is false. `row_gap` is the spacing between rows and `shift`
/// the offset of every other row.
fn lattice_in_box(b: &AxisBox, eps: f64, row_gap: f64, shift: f64, transpose: bool) -> Vec<[f64; 2]> {
    let (ax, ay) = if transpose { (1, 0) } else { (0, 1) };
    let (x0, x1, y0, y1) = (b.lo[ax], b.hi[ax], b.lo[ay], b.hi[ay]);
    let mut pts = Vec::new();
    let rows = if row_gap > 0.0 { ((y1 - y0) / (row_gap * (1.0 - SEPARATION_TOL))).floor() as usize } else { 0 };
    for r in 0..=rows {
        let y = (y0 + r as f64 * row_gap).min(y1);
        let off = if r % 2 == 1 { shift } else { 0.0 };
        if x0 + off > x1 {
            continue;
        }
        let k = ((x1 - x0 - off) / (eps * (1.0 - SEPARATION_TOL))).floor() as usize;
        for i in 0..=k {
            let x = (x0 + off + i as f64 * eps).min(x1);
            pts.push(if transpose { [y, x] } else { [x, y] });
        }
    }
    pts
}

/// Spatial hash for separation queries.
struct Hash2 {
    cell: f64,
    map: HashMap<(i64, i64), Vec<[f64; 2]>>,
}

impl Hash2 {
    fn new(cell: f64) -> Self {
        Self { cell, map: HashMap::new() }
    }
    fn key(&self, p: &[f64; 2]) -> (i64, i64) {
        ((p[0] / self.cell).floor() as i64, (p[1] / self.cell).floor() as i64)
    }
    fn free(&self, p: &[f64; 2], eps: f64) -> bool {
        let (i, j) = self.key(p);
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(v) = self.map.get(&(i + di, j + dj)) {
                    if v.iter().any(|q| !separated(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt(), eps)) {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn insert(&mut self, p: [f64; 2]) {
        let k = self.key(&p);
        self.map.entry(k).or_default().push(p);
    }
}

/// Best lattice placement in one box, then greedy augmentation from a grid of step `ε/8`.
fn lower_in_box(b: &AxisBox, eps: f64) -> Vec<[f64; 2]> {
    let tri = 0.5 * 3f64.sqrt() * eps;
    let w = b.hi[0] - b.lo[0];
    let h = b.hi[1] - b.lo[1];
    let mut candidates = vec![
        lattice_in_box(b, eps, tri, 0.5 * eps, false),
        lattice_in_box(b, eps, tri, 0.5 * eps, true),
        lattice_in_box(b, eps, eps, 0.0, false),
    ];
    // Zigzag between the two long sides of a thin box.
    for (transpose, thin) in [(false, h), (true, w)] {
        if thin <= tri && thin > 0.0 {
            let s = (eps * eps - thin * thin).sqrt();
            let (ax, ay) = if transpose { (1, 0) } else { (0, 1) };
            let len = b.hi[ax] - b.lo[ax];
            let k = (len / (s * (1.0 - SEPARATION_TOL))).floor() as usize;
            let pts = (0..=k)
                .map(|i| {
                    let x = (b.lo[ax] + i as f64 * s).min(b.hi[ax]);
                    let y = if i % 2 == 0 { b.lo[ay] } else { b.hi[ay] };
                    if transpose {
                        [y, x]
                    } else {
                        [x, y]
                    }
                })
                .collect();
            candidates.push(pts);
        }
    }
    candidates.into_iter().max_by_key(|c| c.len()).expect("nonempty")
}

/// Upper bound on the number of `ε`-separated points in the closure of a box.
/// Disjoint discs of radius `ε/2` fit in `Ω ⊕ B(ε/2)`; Oler's inequality for
/// convex sets tightens this to `(2/√3)|Ω|/ε² + Per(Ω)/(2ε) + 1`.
fn upper_in_box(b: &AxisBox, eps: f64) -> usize {
    let w = b.hi[0] - b.lo[0];
    let h = b.hi[1] - b.lo[1];
    let disc = std::f64::consts::PI * eps * eps / 4.0;
    let area = ((w * h + eps * (w + h) + disc) / disc).floor();
    let oler = (GAMMA_2 * w * h / (eps * eps) + (w + h) / eps + 1.0).floor();
    let tri = 0.5 * 3f64.sqrt() * eps;
    let mut best = area.min(oler) as usize;
    // Thin strips are exact: x-consecutive points are at least √(ε² − t²) apart.
    for (len, thin) in [(w, h), (h, w)] {
        if thin <= tri {
            let s = (eps * eps - thin * thin).sqrt();
            best = best.min((len / (s * (1.0 - SEPARATION_TOL))).floor() as usize + 1);
        }
    }
    best
}

/// Bracket on the maximal count in a planar union of boxes (assumed disjoint).
pub fn pack_count_2d(inst: &PackingInstance) -> Result<PackBracket> {
    if inst.dim != 2 {
        return invalid("pack_count_2d needs a two-dimensional instance");
    }
    let eps = inst.eps;
    let regions: Vec<AxisBox> = match inst.mode {
        BoundaryMode::Points => inst.boxes.clone(),
        BoundaryMode::Balls => inst.boxes.iter().filter_map(|b| b.shrunk(0.5 * eps)).collect(),
    };
    let mut hash = Hash2::new(eps);
    let mut witness: Vec<[f64; 2]> = Vec::new();
    for b in &regions {
        for p in lower_in_box(b, eps) {
            if hash.free(&p, eps) {
                hash.insert(p);
                witness.push(p);
            }
        }
    }
    for b in &regions {
        let step = eps / 8.0;
        let nx = ((b.hi[0] - b.lo[0]) / step).floor() as usize;
        let ny = ((b.hi[1] - b.lo[1]) / step).floor() as usize;
        for i in 0..=nx {
            for j in 0..=ny {
                let p = [(b.lo[0] + i as f64 * step).min(b.hi[0]), (b.lo[1] + j as f64 * step).min(b.hi[1])];
                if hash.free(&p, eps) {
                    hash.insert(p);
                    witness.push(p);
                }
            }
        }
    }
    let upper = regions.iter().map(|b| {
        // A degenerate (zero-width) shrunk box is a segment.
        if b.hi[0] - b.lo[0] == 0.0 || b.hi[1] - b.lo[1] == 0.0 {
            let len = (b.hi[0] - b.lo[0]).max(b.hi[1] - b.lo[1]);
            (len / (eps * (1.0 - SEPARATION_TOL))).floor() as usize + 1
        } else {
            upper_in_box(b, eps)
        }
    });
    let upper = upper.sum::<usize>().max(witness.len());
    Ok(PackBracket { lower: witness.len(), upper, witness })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaRow {
    pub k: usize,
    pub lower: usize,
    pub upper: usize,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaEstimate {
    pub dim: usize,
    pub rows: Vec<GammaRow>,
    /// `min_k lower_k / k^d`, the tracked infimum of the witness sequence.
    pub inf_lower: f64,
    /// `min_k upper_k / k^d`, a rigorous upper bound for `γ_d = inf_k S(Q_k)/k^d`.
    pub inf_upper: f64,
}

/// `S(Q_k)/k^d` for unit separation in the cube `[0, k]^d`.
pub fn gamma_d_estimate(dim: usize, ks: &[usize]) -> Result<GammaEstimate> {
    if !(1..=2).contains(&dim) {
        return invalid("γ_d is estimated for d ∈ {1, 2}");
    }
    if ks.contains(&0) {
        return invalid("k must be positive");
    }
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let side = k as f64;
        let (lower, upper) = if dim == 1 {
            // S(Q_k) = k + 1 exactly.
            (k + 1, k + 1)
        } else {
            let inst = PackingInstance::new(vec![AxisBox::new(vec![0.0, 0.0], vec![side, side])?], 1.0, BoundaryMode::Points)?;
            let b = pack_count_2d(&inst)?;
            (b.lower, b.upper)
        };
        let vol = side.powi(dim as i32);
        rows.push(GammaRow { k, lower, upper, ratio_lower: lower as f64 / vol, ratio_upper: upper as f64 / vol });
    }
    let inf_lower = rows.iter().map(|r| r.ratio_lower).fold(f64::INFINITY, f64::min);
    let inf_upper = rows.iter().map(|r| r.ratio_upper).fold(f64::INFINITY, f64::min);
    Ok(GammaEstimate { dim, rows, inf_lower, inf_upper })
}

/// Sorted candidate positions: a grid of the given step on each admissible
/// interval, its endpoints, and any extra breakpoints that are admissible.
pub fn candidate_grid(inst: &PackingInstance, step: f64, breakpoints: &[f64]) -> Result<Vec<f64>> {
    if inst.dim != 1 || !(step > 0.0) {
        return invalid("candidate grids need a 1-D instance and a positive step");
    }
    let mut xs = Vec::new();
    let intervals = admissible_1d(inst);
    for &(a, b) in &intervals {
        let k = ((b - a) / step + 1e-9).floor() as usize;
        xs.extend((0..=k).map(|i| (a + i as f64 * step).min(b)));
        xs.push(b);
    }
    xs.extend(breakpoints.iter().copied().filter(|x| intervals.iter().any(|(a, b)| x >= a && x <= b)));
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (1.0 + y.abs()));
    Ok(xs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedPack {
    /// `max (1/N) Σ v(x_i)` over exactly-`N` separated configurations.
    pub value: f64,
    pub configuration: Vec<f64>,
}

/// Dynamic program over sorted candidates with state (prefix, count).
pub fn weighted_pack_1d(inst: &PackingInstance, candidates: &[f64], values: &[f64], n: usize) -> Result<WeightedPack> {
    if inst.dim != 1 {
        return invalid("weighted_pack_1d needs a one-dimensional instance");
    }
    if candidates.len() != values.len() || n == 0 {
        return invalid("need one value per candidate and N ≥ 1");
    }
    let intervals = admissible_1d(inst);
    let mut pts: Vec<(f64, f64)> = candidates
        .iter()
        .zip(values)
        .filter(|(x, _)| intervals.iter().any(|(a, b)| *x >= a && *x <= b))
        .map(|(x, v)| (*x, *v))
        .collect();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    let m = pts.len();
    // prev[i]: number of candidates usable before candidate i.
    let prev: Vec<usize> = (0..m).map(|i| pts[..i].partition_point(|p| separated(pts[i].0 - p.0, inst.eps))).collect();
    let neg = f64::NEG_INFINITY;
    let mut dp = vec![vec![neg; n + 1]; m + 1];
    let mut take = vec![vec![false; n + 1]; m + 1];
    for row in dp.iter_mut() {
        row[0] = 0.0;
    }
    for i in 1..=m {
        for c in 1..=n {
            let skip = dp[i - 1][c];
            let with = dp[prev[i - 1]][c - 1] + pts[i - 1].1;
            if with > skip {
                dp[i][c] = with;
                take[i][c] = true;
            } else {
                dp[i][c] = skip;
            }
        }
    }
    if dp[m][n] == neg {
        return Err(Error::Infeasible);
    }
    let mut configuration = Vec::with_capacity(n);
    let (mut i, mut c) = (m, n);
    while c > 0 {
        if take[i][c] {
            configuration.push(pts[i - 1].0);
            i = prev[i - 1];
            c -= 1;
        } else {
            i -= 1;
        }
    }
    configuration.reverse();
    Ok(WeightedPack { value: dp[m][n] / n as f64, configuration })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementStudy {
    pub coarse: WeightedPack,
    pub fine: WeightedPack,
    /// `fine − coarse`, an estimate of the gap to the continuum optimum.
    pub gap: f64,
}

/// Solves on a grid of the given step and again on the halved grid.
pub fn weighted_pack_refinement(inst: &PackingInstance, v: &dyn Fn(f64) -> f64, step: f64, breakpoints: &[f64], n: usize) -> Result<RefinementStudy> {
    let solve = |h: f64| {
        let cands = candidate_grid(inst, h, breakpoints)?;
        let vals: Vec<f64> = cands.iter().map(|&x| v(x)).collect();
        weighted_pack_1d(inst, &cands, &vals, n)
    };
    let coarse = solve(step)?;
    let fine = solve(0.5 * step)?;
    let gap = fine.value - coarse.value;
    Ok(RefinementStudy { coarse, fine, gap })
}

/// Density representation for congestion tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CongestionMeasure {
    Atoms { points: Vec<Vec<f64>>, masses: Vec<f64> },
    /// Piecewise-constant density on boxes.
    Boxes { boxes: Vec<AxisBox>, densities: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CongestionTest {
    pub dim: usize,
    pub omega: Vec<AxisBox>,
    pub rho: CongestionMeasure,
    pub kappa: f64,
    /// `θ = κ/(γ_d |Ω|)`.
    pub theta: f64,
    /// `1/(θ|Ω|)`.
    pub bound: f64,
}

impl CongestionTest {
    pub fn new(omega: Vec<AxisBox>, rho: CongestionMeasure, kappa: f64) -> Result<Self> {
        let inst = PackingInstance::new(omega, 1.0, BoundaryMode::Points)?;
        let vol = inst.volume();
        let gamma = if inst.dim == 1 { GAMMA_1 } else { GAMMA_2 };
        let theta = kappa / (gamma * vol);
        if !(theta > 0.0) {
            return invalid("κ must be positive");
        }
        if theta >= 1.0 {
            return invalid(format!("θ = {theta} ≥ 1: the congestion constraint needs κ < γ_d|Ω|"));
        }
        Ok(Self { dim: inst.dim, omega: inst.boxes, rho, kappa, theta, bound: 1.0 / (theta * vol) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CongestionReport {
    pub member: bool,
    pub max_density: f64,
    /// Index of the worst offending box, if any.
    pub violation: Option<usize>,
    pub reason: Option<String>,
}

pub fn congestion_membership(test: &CongestionTest, tol: f64) -> CongestionReport {
    match &test.rho {
        CongestionMeasure::Atoms { masses, .. } => {
            let atomic = masses.iter().any(|m| *m > 0.0);
            CongestionReport {
                member: !atomic,
                max_density: if atomic { f64::INFINITY } else { 0.0 },
                violation: atomic.then_some(0),
                reason: atomic.then(|| "atoms are not absolutely continuous".to_string()),
            }
        }
        CongestionMeasure::Boxes { boxes, densities } => {
            let mut worst: Option<usize> = None;
            let mut max_density = 0.0f64;
            for (i, (b, &d)) in boxes.iter().zip(densities).enumerate() {
                let inside = test.omega.iter().any(|o| o.contains(&b.lo) && o.contains(&b.hi));
                let d = if inside || d == 0.0 { d } else { f64::INFINITY };
                if d > max_density {
                    max_density = d;
                    worst = Some(i);
                }
            }
            let member = max_density <= test.bound + tol;
            CongestionReport {
                member,
                max_density,
                violation: if member { None } else { worst },
                reason: (!member).then(|| format!("density {max_density} exceeds the bound {}", test.bound)),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiminfRow {
    pub n: usize,
    pub eps: f64,
    /// `F_N^*(v)`; `None` when `N` points do not fit.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiminfReport {
    pub kappa: f64,
    /// `(γ_1/κ) ∫_Ω v`.
    pub bound: f64,
    pub rows: Vec<LiminfRow>,
    /// Largest `F_N^* − bound` over feasible rows.
    pub max_excess: f64,
}

impl LiminfReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_excess <= tol
    }
}

/// `F_N^*(v)` with `ε_N = κ/N` on `[a, b]` (points mode), candidates on a grid
/// of step `ε_N/refine` anchored at both ends.
pub fn gamma_liminf_check(v: &dyn Fn(f64) -> f64, interval: (f64, f64), kappa: f64, ns: &[usize], refine: usize) -> Result<LiminfReport> {
    let (a, b) = interval;
    if !(kappa > 0.0) || refine == 0 {
        return invalid("κ must be positive and the refinement at least 1");
    }
    let integral = integrate(v, a, b, &[], QuadOptions::default())?.value;
    let bound = GAMMA_1 / kappa * integral;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let eps = kappa / n as f64;
        let inst = PackingInstance::interval(a, b, eps, BoundaryMode::Points)?;
        let mut cands = candidate_grid(&inst, eps / refine as f64, &[])?;
        // Anchor a copy of the grid at the right end as well.
        let right: Vec<f64> = cands.iter().map(|x| b - (x - a)).collect();
        cands.extend(right);
        cands.sort_by(f64::total_cmp);
        cands.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);
        let vals: Vec<f64> = cands.iter().map(|&x| v(x)).collect();
        let value = match weighted_pack_1d(&inst, &cands, &vals, n) {
            Ok(w) => Some(w.value),
            Err(Error::Infeasible) => None,
            Err(e) => return Err(e),
        };
        rows.push(LiminfRow { n, eps, value });
    }
    let max_excess = rows.iter().filter_map(|r| r.value).map(|x| x - bound).fold(f64::NEG_INFINITY, f64::max);
    Ok(LiminfReport { kappa, bound, rows, max_excess })
}

/// A probability on the line: atoms and piecewise-constant density segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure1d {
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
    /// `(a, b, density)` with disjoint segments.
    #[serde(default)]
    pub segments: Vec<(f64, f64, f64)>,
}

impl Measure1d {
    pub fn dirac(x: f64) -> Self {
        Self { atoms: vec![(x, 1.0)], segments: Vec::new() }
    }

    pub fn uniform(a: f64, b: f64) -> Self {
        Self { atoms: Vec::new(), segments: vec![(a, b, 1.0 / (b - a))] }
    }

    pub fn empirical(xs: &[f64]) -> Self {
        let w = 1.0 / xs.len() as f64;
        Self { atoms: xs.iter().map(|&x| (x, w)).collect(), segments: Vec::new() }
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>() + self.segments.iter().map(|s| (s.1 - s.0) * s.2).sum::<f64>()
    }

    /// Quantile function as affine pieces `(u0, u1, x0, x1)`.
    pub fn quantile(&self) -> Result<Vec<(f64, f64, f64, f64)>> {
        if self.atoms.iter().any(|a| !(a.1 >= 0.0) || !a.0.is_finite()) || self.segments.iter().any(|s| !(s.0 < s.1 && s.2 >= 0.0)) {
            return invalid("measure on the line: masses and densities must be nonnegative, segments nondegenerate");
        }
        let mut segs = self.segments.clone();
        segs.sort_by(|p, q| p.0.total_cmp(&q.0));
        if segs.windows(2).any(|w| w[1].0 < w[0].1) {
            return invalid("density segments overlap");
        }
        // Cut segments at atoms so that events are ordered.
        let mut events: Vec<(f64, f64, f64)> = Vec::new(); // (x0, x1, mass)
        for &(a, b, d) in &segs {
            let mut cuts: Vec<f64> = self.atoms.iter().map(|p| p.0).filter(|&x| x > a && x < b).collect();
            cuts.sort_by(f64::total_cmp);
            let mut lo = a;
            for c in cuts.into_iter().chain(std::iter::once(b)) {
                if c > lo {
                    events.push((lo, c, d * (c - lo)));
                }
                lo = c;
            }
        }
        events.extend(self.atoms.iter().map(|&(x, m)| (x, x, m)));
        events.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
        let mut pieces = Vec::with_capacity(events.len());
        let mut u = 0.0;
        for (x0, x1, m) in events {
            if m > 0.0 {
                pieces.push((u, u + m, x0, x1));
                u += m;
            }
        }
        Ok(pieces)
    }
}

fn affine_at(p: &(f64, f64, f64, f64), u: f64) -> f64 {
    if p.1 == p.0 {
        p.2
    } else {
        p.2 + (p.3 - p.2) * (u - p.0) / (p.1 - p.0)
    }
}

/// Common refinement of two quantile functions: `(u0, u1, a0, a1, b0, b1)`.
fn merged(qa: &[(f64, f64, f64, f64)], qb: &[(f64, f64, f64, f64)]) -> Vec<(f64, f64, f64, f64, f64, f64)> {
    let mut us: Vec<f64> = qa.iter().chain(qb).flat_map(|p| [p.0, p.1]).collect();
    us.sort_by(f64::total_cmp);
    us.dedup();
    let (mut ia, mut ib) = (0, 0);
    let mut out = Vec::new();
    for w in us.windows(2) {
        let (u0, u1) = (w[0], w[1]);
        if u1 <= u0 {
            continue;
        }
        let mid = 0.5 * (u0 + u1);
        while ia + 1 < qa.len() && qa[ia].1 < mid {
            ia += 1;
        }
        while ib + 1 < qb.len() && qb[ib].1 < mid {
            ib += 1;
        }
        let (pa, pb) = (&qa[ia], &qb[ib]);
        out.push((u0, u1, affine_at(pa, u0), affine_at(pa, u1), affine_at(pb, u0), affine_at(pb, u1)));
    }
    out
}

fn check_masses(a: &Measure1d, b: &Measure1d) -> Result<()> {
    let (ma, mb) = (a.mass(), b.mass());
    if (ma - mb).abs() > 1e-9 * ma.max(1.0) {
        return invalid(format!("mass mismatch: {ma} vs {mb}"));
    }
    if !(ma > 0.0) {
        return invalid("measures must carry mass");
    }
    Ok(())
}

/// Exact `W_2` between measures on the line by the quantile coupling.
pub fn w2_distance_1d(a: &Measure1d, b: &Measure1d) -> Result<f64> {
    check_masses(a, b)?;
    let mut total = 0.0;
    for (u0, u1, a0, a1, b0, b1) in merged(&a.quantile()?, &b.quantile()?) {
        // ∫ of the square of an affine function from d0 to d1 over a length h.
        let (d0, d1) = (a0 - b0, a1 - b1);
        total += (u1 - u0) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
    }
    Ok((total / a.mass()).sqrt())
}

/// Exact `W_1` between measures on the line.
pub fn w1_distance_1d(a: &Measure1d, b: &Measure1d) -> Result<f64> {
    check_masses(a, b)?;
    let mut total = 0.0;
    for (u0, u1, a0, a1, b0, b1) in merged(&a.quantile()?, &b.quantile()?) {
        let (d0, d1) = (a0 - b0, a1 - b1);
        let h = u1 - u0;
        total += if d0 * d1 >= 0.0 {
            0.5 * h * (d0.abs() + d1.abs())
        } else {
            0.5 * h * (d0 * d0 + d1 * d1) / (d0.abs() + d1.abs())
        };
    }
    Ok(total / a.mass())
}

/// Weighted isotonic regression by pool-adjacent-violators.
pub fn pava(targets: &[f64], weights: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, f64, usize)> = Vec::new(); // (mean, weight, len)
    for (&t, &w) in targets.iter().zip(weights) {
        blocks.push((t, w, 1));
        while blocks.len() > 1 {
            let (m2, w2, l2) = blocks[blocks.len() - 1];
            let (m1, w1, l1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.pop();
            let w = w1 + w2;
            *blocks.last_mut().expect("nonempty") = ((m1 * w1 + m2 * w2) / w, w, l1 + l2);
        }
    }
    blocks.into_iter().flat_map(|(m, _, l)| std::iter::repeat(m).take(l)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatedProjection {
    pub value: f64,
    pub positions: Vec<f64>,
}

/// `∫Q`, `∫Q²` and `∫u·Q` over each of `n` equal `u`-cells.
fn cell_moments(q: &[(f64, f64, f64, f64)], n: usize) -> Vec<(f64, f64, f64)> {
    let mut out = vec![(0.0, 0.0, 0.0); n];
    let mut cell = 0;
    for &p in q {
        let mut u = p.0;
        while cell + 1 < n && (cell + 1) as f64 / n as f64 <= u {
            cell += 1;
        }
        while u < p.1 {
            let bound = (cell + 1) as f64 / n as f64;
            let end = if cell + 1 == n { p.1 } else { bound.min(p.1) };
            let (x0, x1) = (affine_at(&p, u), affine_at(&p, end));
            let h = end - u;
            out[cell].0 += h * 0.5 * (x0 + x1);
            out[cell].1 += h * (x0 * x0 + x0 * x1 + x1 * x1) / 3.0;
            out[cell].2 += h * (u * x0 + u * (x1 - x0) / 2.0 + h * x0 / 2.0 + h * (x1 - x0) / 3.0);
            u = end;
            if end >= bound && cell + 1 < n {
                cell += 1;
            }
        }
    }
    out
}

/// `W_2(ρ, K_N)`: distance from a probability to empirical measures of `N`
/// points in `[a, b]` with gaps `≥ ε`. Exact: with `y_i = x_i − (i−1)ε` the
/// problem becomes an isotonic regression in a box.
pub fn w2_to_separated(rho: &Measure1d, n: usize, eps: f64, interval: (f64, f64)) -> Result<SeparatedProjection> {
    let (a, b) = interval;
    if n == 0 || !(eps >= 0.0) {
        return invalid("need N ≥ 1 and ε ≥ 0");
    }
    let top = b - (n - 1) as f64 * eps;
    if top < a {
        return Err(Error::Infeasible);
    }
    if (rho.mass() - 1.0).abs() > 1e-12 {
        return invalid("ρ must be a probability");
    }
    let moments = cell_moments(&rho.quantile()?, n);
    let w = 1.0 / n as f64;
    let targets: Vec<f64> = moments.iter().enumerate().map(|(i, m)| m.0 / w - i as f64 * eps).collect();
    let y: Vec<f64> = pava(&targets, &vec![1.0; n]).into_iter().map(|v| v.clamp(a, top)).collect();
    let positions: Vec<f64> = y.iter().enumerate().map(|(i, v)| v + i as f64 * eps).collect();
    let value: f64 = moments.iter().zip(&positions).map(|(m, x)| m.1 - 2.0 * x * m.0 + w * x * x).sum();
    Ok(SeparatedProjection { value: value.max(0.0).sqrt(), positions })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityProjection {
    pub value: f64,
    /// Number of quantile cells used; the value is an upper bound that is exact in the limit.
    pub cells: usize,
}

/// `W_2(ρ, K)` for `K = {densities ≤ h on [a, b]}`. The optimal quantile is
/// `u/h + z(u)` with `z` the isotonic regression of `Q_ρ(u) − u/h`, clipped to
/// `[a, b − 1/h]`; it is solved on `cells` equal cells of `u`.
pub fn w2_to_density_bound(rho: &Measure1d, h: f64, interval: (f64, f64), cells: usize) -> Result<DensityProjection> {
    let (a, b) = interval;
    if !(h > 0.0) || cells == 0 {
        return invalid("need a positive density bound and at least one cell");
    }
    let top = b - 1.0 / h;
    if top < a {
        return Err(Error::Infeasible);
    }
    if (rho.mass() - 1.0).abs() > 1e-12 {
        return invalid("ρ must be a probability");
    }
    let moments = cell_moments(&rho.quantile()?, cells);
    let w = 1.0 / cells as f64;
    let targets: Vec<f64> = moments.iter().enumerate().map(|(i, m)| m.0 / w - (i as f64 + 0.5) * w / h).collect();
    let z: Vec<f64> = pava(&targets, &vec![1.0; cells]).into_iter().map(|v| v.clamp(a, top)).collect();
    // ∫_cell (Q − u/h − z)² = ∫Q² − 2∫Q(u/h + z) + ∫(u/h + z)².
    let mut total = 0.0;
    for (i, (m, zi)) in moments.iter().zip(&z).enumerate() {
        let u0 = i as f64 * w;
        let mid = u0 + 0.5 * w;
        let lin2 = ((u0 + w).powi(3) - u0.powi(3)) / (3.0 * h * h);
        total += m.1 - 2.0 * (m.2 / h + zi * m.0) + lin2 + 2.0 * zi * w * mid / h + zi * zi * w;
    }
    Ok(DensityProjection { value: total.max(0.0).sqrt(), cells })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityRow {
    pub eps: f64,
    pub count: usize,
    /// `W_1` in 1-D, sliced `W_1` in 2-D.
    pub distance: f64,
}

const SLICES: usize = 32;
const REFERENCE_GRID: usize = 200;

/// Distance between the empirical measure of maximal witnesses and the
/// uniform probability on `Ω`, along a decreasing sequence of `ε`.
pub fn empirical_uniformity(base: &PackingInstance, eps_list: &[f64]) -> Result<Vec<UniformityRow>> {
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let inst = base.with_eps(eps)?;
        if inst.dim == 1 {
            let w = pack_count_1d(&inst)?;
            if w.count == 0 {
                return invalid(format!("no admissible point for ε = {eps}"));
            }
            let total = inst.volume();
            let uniform = Measure1d {
                atoms: Vec::new(),
                segments: merge_intervals(&inst.boxes, 0.0).into_iter().map(|(a, b)| (a, b, 1.0 / total)).collect(),
            };
            rows.push(UniformityRow { eps, count: w.count, distance: w1_distance_1d(&Measure1d::empirical(&w.witness), &uniform)? });
        } else {
            let w = pack_count_2d(&inst)?;
            if w.lower == 0 {
                return invalid(format!("no admissible point for ε = {eps}"));
            }
            rows.push(UniformityRow { eps, count: w.lower, distance: sliced_w1(&w.witness, &inst.boxes)? });
        }
    }
    Ok(rows)
}

/// Sliced `W_1` against the uniform measure on boxes, which is represented by
/// a `200 × 200` cell-center grid per box.
fn sliced_w1(points: &[[f64; 2]], boxes: &[AxisBox]) -> Result<f64> {
    let total: f64 = boxes.iter().map(AxisBox::volume).sum();
    let mut reference: Vec<([f64; 2], f64)> = Vec::new();
    for b in boxes {
        let m = REFERENCE_GRID;
        let wt = b.volume() / total / (m * m) as f64;
        for i in 0..m {
            for j in 0..m {
                let x = b.lo[0] + (i as f64 + 0.5) / m as f64 * (b.hi[0] - b.lo[0]);
                let y = b.lo[1] + (j as f64 + 0.5) / m as f64 * (b.hi[1] - b.lo[1]);
                reference.push(([x, y], wt));
            }
        }
    }
    let mut sum = 0.0;
    for k in 0..SLICES {
        let t = std::f64::consts::PI * k as f64 / SLICES as f64;
        let (c, s) = (t.cos(), t.sin());
        let emp = Measure1d::empirical(&points.iter().map(|p| c * p[0] + s * p[1]).collect::<Vec<_>>());
        let refm = Measure1d { atoms: reference.iter().map(|(p, w)| (c * p[0] + s * p[1], *w)).collect(), segments: Vec::new() };
        sum += w1_distance_1d(&emp, &refm)?;
    }
    Ok(sum / SLICES as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(eps: f64, mode: BoundaryMode) -> PackingInstance {
        PackingInstance::interval(0.0, 1.0, eps, mode).unwrap()
    }

    #[test]
    fn one_dimensional_counts() {
        let p = pack_count_1d(&unit(0.3, BoundaryMode::Points)).unwrap();
        assert_eq!(p.count, 4);
        for (x, want) in p.witness.iter().zip([0.0, 0.3, 0.6, 0.9]) {
            assert!((x - want).abs() < 1e-12);
        }
        let b = pack_count_1d(&unit(0.3, BoundaryMode::Balls)).unwrap();
        assert_eq!(b.count, 3);
        for (x, want) in b.witness.iter().zip([0.15, 0.45, 0.75]) {
            assert!((x - want).abs() < 1e-12);
        }
        assert_eq!(pack_count_1d(&unit(1.5, BoundaryMode::Points)).unwrap().count, 1);
        assert_eq!(pack_count_1d(&unit(1.5, BoundaryMode::Balls)).unwrap().count, 0);
        assert_eq!(pack_count_1d(&unit(0.1, BoundaryMode::Points)).unwrap().count, 11);
    }

    #[test]
    fn unions_of_intervals() {
        let boxes = vec![AxisBox::interval(0.0, 0.5).unwrap(), AxisBox::interval(0.7, 1.0).unwrap()];
        let inst = PackingInstance::new(boxes, 0.3, BoundaryMode::Points).unwrap();
        // {0, 0.3} then 0.7 and 1.0.
        assert_eq!(pack_count_1d(&inst).unwrap().count, 4);
    }

    #[test]
    fn planar_brackets() {
        let sq = PackingInstance::new(vec![AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()], 1.0, BoundaryMode::Points).unwrap();
        let b = pack_count_2d(&sq).unwrap();
        assert!(b.lower >= 4 && b.upper >= b.lower);
        assert_eq!(b.upper, 4);
        let thin = PackingInstance::new(vec![AxisBox::new(vec![0.0, 0.0], vec![5.0, 0.6]).unwrap()], 1.0, BoundaryMode::Points).unwrap();
        let b = pack_count_2d(&thin).unwrap();
        assert_eq!(b.lower, b.upper);
        assert_eq!(b.lower, (5.0 / 0.8f64).floor() as usize + 1);
    }

    #[test]
    fn gamma_estimates() {
        let g = gamma_d_estimate(1, &[10, 1_000_000]).unwrap();
        assert!((g.rows[0].ratio_lower - 1.1).abs() < 1e-15);
        assert!((g.rows[1].ratio_lower - 1.0).abs() < 1e-5);
        let g = gamma_d_estimate(2, &[50]).unwrap();
        assert!(g.rows[0].ratio_lower >= 1.14);
        assert!(g.rows[0].ratio_upper >= g.rows[0].ratio_lower);
    }

    fn brute_force(cands: &[f64], vals: &[f64], n: usize, eps: f64) -> Option<f64> {
        fn rec(i: usize, cands: &[f64], vals: &[f64], left: usize, last: Option<f64>, eps: f64) -> Option<f64> {
            if left == 0 {
                return Some(0.0);
            }
            if i == cands.len() {
                return None;
            }
            let skip = rec(i + 1, cands, vals, left, last, eps);
            let ok = last.map_or(true, |l| separated(cands[i] - l, eps));
            let with = if ok { rec(i + 1, cands, vals, left - 1, Some(cands[i]), eps).map(|x| x + vals[i]) } else { None };
            match (skip, with) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            }
        }
        rec(0, cands, vals, n, None, eps).map(|x| x / n as f64)
    }

    #[test]
    fn weighted_packing_examples() {
        let inst = unit(0.2, BoundaryMode::Points);
        let cands = candidate_grid(&inst, 0.1, &[]).unwrap();
        let vals: Vec<f64> = cands.clone();
        let w = weighted_pack_1d(&inst, &cands, &vals, 3).unwrap();
        assert!((w.value - 0.8).abs() < 1e-12);
        let ones = vec![1.0; cands.len()];
        assert!((weighted_pack_1d(&inst, &cands, &ones, 6).unwrap().value - 1.0).abs() < 1e-15);
        assert!(matches!(weighted_pack_1d(&inst, &cands, &ones, 7), Err(Error::Infeasible)));
        assert_eq!(brute_force(&cands, &vals, 3, 0.2), Some(w.value));
        let study = weighted_pack_refinement(&inst, &|x| (1.0 - x) * x, 0.15, &[], 2).unwrap();
        assert!(study.gap >= -1e-15 && study.fine.value <= 0.25);
    }

    #[test]
    fn congestion_examples() {
        let omega = vec![AxisBox::interval(0.0, 2.0).unwrap()];
        // θ = κ/(γ_1 |Ω|) = ½ for κ = 1; the bound is 1/(θ|Ω|) = 1.
        let uniform = CongestionMeasure::Boxes { boxes: omega.clone(), densities: vec![0.5] };
        let t = CongestionTest::new(omega.clone(), uniform, 1.0).unwrap();
        assert!((t.theta - 0.5).abs() < 1e-15);
        assert!(congestion_membership(&t, 1e-12).member);
        let dense = CongestionMeasure::Boxes {
            boxes: vec![AxisBox::interval(0.0, 0.5).unwrap(), AxisBox::interval(0.5, 1.0).unwrap()],
            densities: vec![0.5, 1.1],
        };
        let t = CongestionTest::new(omega.clone(), dense, 1.0).unwrap();
        let r = congestion_membership(&t, 1e-12);
        assert!(!r.member && r.violation == Some(1));
        let atoms = CongestionMeasure::Atoms { points: vec![vec![0.5]], masses: vec![1.0] };
        assert!(!congestion_membership(&CongestionTest::new(omega.clone(), atoms, 1.0).unwrap(), 1e-12).member);
        assert!(CongestionTest::new(omega, CongestionMeasure::Atoms { points: vec![], masses: vec![] }, 2.0).is_err());
    }

    #[test]
    fn liminf_examples() {
        let ones = gamma_liminf_check(&|_| 1.0, (0.0, 1.0), 0.5, &[10, 40], 4).unwrap();
        assert!((ones.bound - 2.0).abs() < 1e-12);
        assert!(ones.rows.iter().all(|r| r.value == Some(1.0)));
        let lin = gamma_liminf_check(&|x| x, (0.0, 1.0), 0.5, &[10, 40], 4).unwrap();
        assert!(lin.holds(0.0));
        let tight = gamma_liminf_check(&|_| 1.0, (0.0, 1.0), 1.5, &[10, 40], 4).unwrap();
        assert!(tight.rows.iter().all(|r| r.value.is_none()));
    }

    #[test]
    fn wasserstein_examples() {
        let u = Measure1d::uniform(0.0, 1.0);
        let d = w2_distance_1d(&u, &Measure1d::dirac(0.5)).unwrap();
        assert!((d - 1.0 / 12f64.sqrt()).abs() < 1e-14);
        assert_eq!(w2_distance_1d(&u, &u).unwrap(), 0.0);
        assert!(w2_distance_1d(&u, &Measure1d { atoms: vec![(0.0, 0.5)], segments: vec![] }).is_err());
        assert!((w1_distance_1d(&u, &Measure1d::dirac(0.5)).unwrap() - 0.25).abs() < 1e-14);
    }

    /// Every block structure of the isotonic problem, each block at its clipped mean.
    fn separated_oracle(rho: &Measure1d, n: usize, eps: f64, a: f64, b: f64) -> f64 {
        let moments = cell_moments(&rho.quantile().unwrap(), n);
        let w = 1.0 / n as f64;
        let top = b - (n - 1) as f64 * eps;
        let t: Vec<f64> = moments.iter().enumerate().map(|(i, m)| m.0 / w - i as f64 * eps).collect();
        let mut best = f64::INFINITY;
        for mask in 0..(1u32 << (n - 1)) {
            let mut y = vec![0.0; n];
            let mut start = 0;
            for i in 0..n {
                if i == n - 1 || mask & (1 << i) != 0 {
                    let mean = t[start..=i].iter().sum::<f64>() / (i + 1 - start) as f64;
                    for yj in &mut y[start..=i] {
                        *yj = mean.clamp(a, top);
                    }
                    start = i + 1;
                }
            }
            if y.windows(2).any(|p| p[1] < p[0]) {
                continue;
            }
            let val: f64 = moments.iter().enumerate().map(|(i, m)| {
                let x = y[i] + i as f64 * eps;
                m.1 - 2.0 * x * m.0 + w * x * x
            }).sum();
            best = best.min(val);
        }
        best.sqrt()
    }

    #[test]
    fn separated_projection_matches_block_enumeration() {
        let rho = Measure1d { atoms: vec![(0.3, 0.2)], segments: vec![(0.0, 0.2, 2.0), (0.6, 1.0, 1.0)] };
        for n in 1..=6 {
            for eps in [0.0, 0.05, 0.15, 0.19] {
                let p = w2_to_separated(&rho, n, eps, (0.0, 1.0)).unwrap();
                let o = separated_oracle(&rho, n, eps, 0.0, 1.0);
                assert!((p.value - o).abs() < 1e-12, "N={n} ε={eps}: {} vs {o}", p.value);
                assert!(p.positions.windows(2).all(|w| separated(w[1] - w[0], eps)));
            }
        }
    }

    #[test]
    fn separated_sequence_approaches_the_density_projection() {
        let rho = Measure1d::uniform(0.0, 0.4);
        let kappa = 0.8;
        let k = w2_to_density_bound(&rho, 1.0 / kappa, (0.0, 1.0), 20_000).unwrap().value;
        // Spreading to density 1/κ from the left end: W_2² = ∫(0.4u)² du.
        assert!((k - (0.16f64 / 3.0).sqrt()).abs() < 1e-9);
        let gap = |n: usize| (w2_to_separated(&rho, n, kappa / n as f64, (0.0, 1.0)).unwrap().value - k).abs() / k;
        assert!(gap(200) <= 0.02);
        assert!(gap(200) < gap(50));
        let uniform = Measure1d::uniform(0.0, 1.0);
        assert!(w2_to_density_bound(&uniform, 1.0, (0.0, 1.0), 100).unwrap().value < 1e-7);
    }

    #[test]
    fn uniformity_improves_as_eps_decreases() {
        let rows = empirical_uniformity(&unit(0.5, BoundaryMode::Points), &[0.5, 0.1, 0.01]).unwrap();
        assert!(rows.windows(2).all(|w| w[1].distance < w[0].distance));
        assert!(rows[2].distance < 0.01);
        let sq = PackingInstance::new(vec![AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()], 0.5, BoundaryMode::Points).unwrap();
        let rows = empirical_uniformity(&sq, &[0.5, 0.1]).unwrap();
        assert!(rows[1].distance < rows[0].distance);
        let single = empirical_uniformity(&unit(2.0, BoundaryMode::Points), &[2.0]).unwrap();
        assert!((single[0].distance - 0.5).abs() < 1e-12);
    }
}
