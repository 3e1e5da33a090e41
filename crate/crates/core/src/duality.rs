//! Dual functionals on a ground grid with a point at infinity.
//!
//! `M_N(v) = sup { S_N v − c_N }` over N-point configurations and
//! `M_∞(v) = sup { ⟨v,ρ⟩ − D_2(ρ) }` over sub-probabilities, both restricted to
//! the grid nodes plus `ω`, where `v(ω) = 0` and `ω` interacts with nothing.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measures::{CostSpec, GroundGrid};
use crate::mmot::binomial;
use crate::qp::{self, QpMethod};

/// Multiset count up to which `M_N` is computed by exhaustive enumeration.
pub const BRUTE_FORCE_CAP: u128 = 10_000_000;
const ASCENT_RESTARTS: usize = 32;

/// Potential sampled on the nodes of a grid; `v(ω) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialOnGrid {
    pub grid: GroundGrid,
    pub values: Vec<f64>,
}

impl PotentialOnGrid {
    pub fn new(grid: GroundGrid, values: Vec<f64>) -> Result<Self> {
        if !grid.has_omega {
            return invalid("dual computations need the point at infinity on the grid");
        }
        if values.len() != grid.len() || values.iter().any(|v| !v.is_finite()) {
            return invalid("potential needs one finite value per grid node");
        }
        Ok(Self { grid, values })
    }

    pub fn sup_v_plus(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), values)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v * t).collect() }
    }

    /// Indices of nodes with `v > 0`; the others are never better than `ω`.
    fn positive_nodes(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i] > 0.0).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualMethod {
    Bruteforce,
    Ascent,
    Pgd,
}

impl DualMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DualMethod::Bruteforce => "bruteforce",
            DualMethod::Ascent => "ascent",
            DualMethod::Pgd => "pgd",
        }
    }
}

impl From<QpMethod> for DualMethod {
    fn from(m: QpMethod) -> Self {
        match m {
            QpMethod::Pgd => DualMethod::Pgd,
            QpMethod::Bruteforce => DualMethod::Bruteforce,
        }
    }
}

/// Value of a dual functional with its maximizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualReport {
    pub value: f64,
    /// Particle count per grid node (for `M_N`); the rest sit at `ω`.
    pub configuration: Option<Vec<usize>>,
    /// Mass per grid node (for `M_∞`); the rest sits at `ω`.
    pub measure: Option<Vec<f64>>,
    pub method: DualMethod,
    pub certified: bool,
}

fn sub_matrix(cost: &CostSpec, grid: &GroundGrid, idx: &[usize]) -> Vec<Vec<f64>> {
    let full = grid.interaction(cost);
    idx.iter().map(|&i| idx.iter().map(|&j| full[i][j]).collect()).collect()
}

/// Objective `(1/N) Σ kᵢvᵢ − w(k)/(N(N−1))` of an occupation vector.
fn config_value(l: &[Vec<f64>], v: &[f64], k: &[usize], n: usize) -> f64 {
    let mut lin = 0.0;
    let mut w = 0.0;
    for i in 0..k.len() {
        if k[i] == 0 {
            continue;
        }
        lin += k[i] as f64 * v[i];
        if k[i] > 1 {
            w += (k[i] * (k[i] - 1)) as f64 * l[i][i];
        }
        for j in 0..k.len() {
            if j != i && k[j] > 0 {
                w += (k[i] * k[j]) as f64 * l[i][j];
            }
        }
    }
    lin / n as f64 - w / (n * (n - 1)) as f64
}

struct Enumerator<'a> {
    l: &'a [Vec<f64>],
    v: &'a [f64],
    n: usize,
    counts: Vec<usize>,
    field: Vec<f64>,
    best: f64,
    best_counts: Vec<usize>,
}

impl Enumerator<'_> {
    /// Adds particles at nodes `≥ from`; `lin` and `w` describe the current multiset.
    fn walk(&mut self, from: usize, placed: usize, lin: f64, w: f64) {
        let value = lin / self.n as f64 - w / (self.n * (self.n - 1)) as f64;
        if value > self.best + 1e-15 {
            self.best = value;
            self.best_counts = self.counts.clone();
        }
        if placed == self.n {
            return;
        }
        for i in from..self.v.len() {
            let dw = 2.0 * self.field[i];
            if dw == f64::INFINITY {
                continue;
            }
            self.counts[i] += 1;
            for j in 0..self.v.len() {
                self.field[j] += self.l[i][j];
            }
            self.walk(i, placed + 1, lin + self.v[i], w + dw);
            for j in 0..self.v.len() {
                self.field[j] -= self.l[i][j];
            }
            self.counts[i] -= 1;
        }
    }
}

fn ascent(l: &[Vec<f64>], v: &[f64], n: usize, seed: u64) -> (f64, Vec<usize>) {
    let m = v.len();
    let runs: Vec<(f64, Vec<usize>)> = (0..ASCENT_RESTARTS)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
            // Slot value m stands for ω.
            let mut slots: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=m)).collect();
            let mut counts = vec![0usize; m];
            for &s in &slots {
                if s < m {
                    counts[s] += 1;
                }
            }
            loop {
                let mut moved = false;
                for s in 0..n {
                    let cur = slots[s];
                    if cur < m {
                        counts[cur] -= 1;
                    }
                    // Marginal value of placing one more particle at each node.
                    let gain = |i: usize| -> f64 {
                        if i == m {
                            return 0.0;
                        }
                        let inter: f64 = (0..m).filter(|&j| counts[j] > 0).map(|j| counts[j] as f64 * l[i][j]).sum();
                        v[i] / n as f64 - 2.0 * inter / (n * (n - 1)) as f64
                    };
                    let cur_gain = gain(cur);
                    let mut best = (cur_gain, cur);
                    for i in 0..=m {
                        let g = gain(i);
                        if g > best.0 + 1e-14 {
                            best = (g, i);
                        }
                    }
                    if best.1 != cur {
                        moved = true;
                    }
                    slots[s] = best.1;
                    if best.1 < m {
                        counts[best.1] += 1;
                    }
                }
                if !moved {
                    break;
                }
            }
            (config_value(l, v, &counts, n), counts)
        })
        .collect();
    let mut best = (0.0, vec![0; m]);
    for (val, c) in runs {
        if val > best.0 + 1e-15 {
            best = (val, c);
        }
    }
    best
}

/// `M_N` restricted to the grid: exhaustive over multisets when their number is
/// at most [`BRUTE_FORCE_CAP`], otherwise seeded multistart coordinate ascent.
pub fn m_n_grid(cost: &CostSpec, pot: &PotentialOnGrid, n: usize, seed: u64) -> Result<DualReport> {
    if n < 2 {
        return invalid("N must be at least 2");
    }
    let idx = pot.positive_nodes();
    let l = sub_matrix(cost, &pot.grid, &idx);
    let v: Vec<f64> = idx.iter().map(|&i| pot.values[i]).collect();
    let expand = |counts: &[usize]| {
        let mut full = vec![0usize; pot.values.len()];
        for (c, &i) in counts.iter().zip(&idx) {
            full[i] = *c;
        }
        full
    };
    let multisets = binomial((idx.len() + n) as u128, n as u128);
    if multisets <= BRUTE_FORCE_CAP {
        let mut e = Enumerator {
            l: &l,
            v: &v,
            n,
            counts: vec![0; v.len()],
            field: vec![0.0; v.len()],
            best: 0.0,
            best_counts: vec![0; v.len()],
        };
        e.walk(0, 0, 0.0, 0.0);
        return Ok(DualReport {
            value: e.best,
            configuration: Some(expand(&e.best_counts)),
            measure: None,
            method: DualMethod::Bruteforce,
            certified: true,
        });
    }
    let (value, counts) = ascent(&l, &v, n, seed);
    Ok(DualReport { value, configuration: Some(expand(&counts)), measure: None, method: DualMethod::Ascent, certified: false })
}

/// `M_∞ = sup ⟨v,ρ⟩ − ρᵀLρ` over sub-probabilities on the grid.
/// The cost must be finite on the grid; singular costs have to be truncated explicitly.
pub fn m_infty_grid(cost: &CostSpec, pot: &PotentialOnGrid, seed: u64) -> Result<DualReport> {
    let idx = pot.positive_nodes();
    let l = sub_matrix(cost, &pot.grid, &idx);
    if l.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Refused("M_∞ needs a finite cost on the grid; truncate it at an explicit level h".into()));
    }
    let v: Vec<f64> = idx.iter().map(|&i| pot.values[i]).collect();
    let sol = qp::maximize(&l, &v, seed);
    let mut measure = vec![0.0; pot.values.len()];
    for (r, &i) in sol.rho.iter().zip(&idx) {
        measure[i] = *r;
    }
    Ok(DualReport {
        value: sol.value.max(0.0),
        configuration: None,
        measure: Some(measure),
        method: sol.method.into(),
        certified: sol.certified,
    })
}

/// One line of the sandwich `M_∞ ≤ M_N ≤ M_∞ + (sup ℓ + sup v₊)/N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichRow {
    pub n: usize,
    pub m_n: f64,
    pub m_infty: f64,
    pub bound: f64,
    pub scaled_gap: f64,
    pub holds: bool,
    pub certified: bool,
}

/// Checks the sandwich estimate for every `N` in `ns` (bounded costs only).
pub fn sandwich_suite(cost: &CostSpec, pot: &PotentialOnGrid, ns: &[usize], seed: u64) -> Result<Vec<SandwichRow>> {
    let sup_l = cost.sup();
    if !sup_l.is_finite() {
        return Err(Error::Refused("the sandwich estimate needs a bounded cost".into()));
    }
    let inf = m_infty_grid(cost, pot, seed)?;
    let sup_v = pot.sup_v_plus();
    ns.par_iter()
        .map(|&n| {
            let mn = m_n_grid(cost, pot, n, seed)?;
            let bound = (sup_l + sup_v) / n as f64;
            let gap = mn.value - inf.value;
            Ok(SandwichRow {
                n,
                m_n: mn.value,
                m_infty: inf.value,
                bound,
                scaled_gap: gap * n as f64,
                holds: gap >= -1e-9 && gap <= bound + 1e-9,
                certified: mn.certified && inf.certified,
            })
        })
        .collect()
}

/// Outcome of an inequality check between two computed sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub certified: bool,
}

/// `M_N(v) ≥ K(K−1)/(N(N−1)) · M_K((N−1)/(K−1) v)`.
pub fn mn_mk_inequality(cost: &CostSpec, pot: &PotentialOnGrid, n: usize, k: usize, seed: u64) -> Result<InequalityReport> {
    if !(2 <= k && k <= n) {
        return invalid("need 2 ≤ K ≤ N");
    }
    let lhs = m_n_grid(cost, pot, n, seed)?;
    let scaled = pot.scaled((n - 1) as f64 / (k - 1) as f64);
    let mk = m_n_grid(cost, &scaled, k, seed)?;
    let rhs = (k * (k - 1)) as f64 / (n * (n - 1)) as f64 * mk.value;
    Ok(InequalityReport { lhs: lhs.value, rhs, holds: lhs.value >= rhs - 1e-9, certified: lhs.certified && mk.certified })
}

/// `|M_N(v1) − M_N(v2)| ≤ ‖v1 − v2‖_∞`.
pub fn lipschitz_check(cost: &CostSpec, v1: &PotentialOnGrid, v2: &PotentialOnGrid, n: usize, seed: u64) -> Result<InequalityReport> {
    if v1.grid != v2.grid {
        return invalid("potentials must live on the same grid");
    }
    let a = m_n_grid(cost, v1, n, seed)?;
    let b = m_n_grid(cost, v2, n, seed)?;
    let sup = v1.values.iter().zip(&v2.values).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let diff = (a.value - b.value).abs();
    Ok(InequalityReport { lhs: diff, rhs: sup, holds: diff <= sup + 1e-9, certified: a.certified && b.certified })
}

/// Behaviour of `t ↦ M_∞(tv)/t` at both ends of a scale grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeReport {
    /// `(t, M_∞(tv)/t)` sorted by increasing `t`.
    pub ratios: Vec<(f64, f64)>,
    /// The ratios are nondecreasing in `t`.
    pub monotone: bool,
    /// Ratio at the smallest scale.
    pub small_t_ratio: f64,
    /// `sup v₊` minus the ratio at the largest scale.
    pub large_t_gap: f64,
    pub certified: bool,
}

pub fn small_t_slope(cost: &CostSpec, pot: &PotentialOnGrid, ts: &[f64], seed: u64) -> Result<SlopeReport> {
    let mut ts: Vec<f64> = ts.iter().copied().filter(|t| *t > 0.0).collect();
    if ts.is_empty() {
        return invalid("need at least one positive scale");
    }
    ts.sort_by(f64::total_cmp);
    let reports: Vec<(f64, DualReport)> = ts
        .par_iter()
        .map(|&t| Ok((t, m_infty_grid(cost, &pot.scaled(t), seed)?)))
        .collect::<Result<_>>()?;
    let ratios: Vec<(f64, f64)> = reports.iter().map(|(t, r)| (*t, r.value / t)).collect();
    let monotone = ratios.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-9);
    Ok(SlopeReport {
        small_t_ratio: ratios[0].1,
        large_t_gap: pot.sup_v_plus() - ratios.last().expect("nonempty").1,
        monotone,
        certified: reports.iter().all(|(_, r)| r.certified),
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_grid(n: usize) -> GroundGrid {
        GroundGrid::new(1, (0..n).map(|i| vec![i as f64]).collect(), true).unwrap()
    }

    fn table() -> CostSpec {
        CostSpec::two_level(1.0, 0.5, 100.0).unwrap()
    }

    #[test]
    fn m_n_examples() {
        let grid = line_grid(2);
        let pot = PotentialOnGrid::new(grid.clone(), vec![-1.0, -0.5]).unwrap();
        assert_eq!(m_n_grid(&table(), &pot, 3, 0).unwrap().value, 0.0);
        let pot = PotentialOnGrid::new(grid, vec![1.0, 0.0]).unwrap();
        let r = m_n_grid(&table(), &pot, 2, 0).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        assert_eq!(r.configuration, Some(vec![1, 0]));
        assert!(r.certified);
    }

    #[test]
    fn m_n_bounds_from_sup() {
        let pot = PotentialOnGrid::new(line_grid(3), vec![1.0, 0.4, 0.7]).unwrap();
        for n in 2..7 {
            let r = m_n_grid(&table(), &pot, n, 0).unwrap();
            assert!(r.value >= 1.0 / n as f64 - 1e-12 && r.value <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn ascent_agrees_with_enumeration_on_small_grid() {
        let pot = PotentialOnGrid::new(line_grid(4), vec![1.0, 0.3, 0.8, 0.6]).unwrap();
        let cost = CostSpec::exponential(1.0).unwrap();
        let idx: Vec<usize> = (0..4).collect();
        let l = sub_matrix(&cost, &pot.grid, &idx);
        let exact = m_n_grid(&cost, &pot, 5, 0).unwrap();
        let (heur, _) = ascent(&l, &pot.values, 5, 11);
        assert!(heur <= exact.value + 1e-12);
        assert!(heur >= exact.value - 1e-9);
    }

    #[test]
    fn m_infty_examples() {
        let pot = PotentialOnGrid::new(line_grid(2), vec![1.0, 1.0]).unwrap();
        let r = m_infty_grid(&table(), &pot, 0).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.certified);
        let zero = CostSpec::constant(0.0).unwrap();
        let pot = PotentialOnGrid::new(line_grid(3), vec![0.2, 0.9, -1.0]).unwrap();
        assert!((m_infty_grid(&zero, &pot, 0).unwrap().value - 0.9).abs() < 1e-12);
        assert!(m_infty_grid(&CostSpec::coulomb(), &pot, 0).is_err());
    }

    #[test]
    fn sandwich_and_scaling() {
        let pot = PotentialOnGrid::new(line_grid(3), vec![1.0, 0.2, 0.6]).unwrap();
        let rows = sandwich_suite(&table(), &pot, &[2, 3, 4, 5, 6], 0).unwrap();
        assert!(rows.iter().all(|r| r.holds && r.certified), "{rows:?}");
        let zero = CostSpec::constant(0.0).unwrap();
        let rows = sandwich_suite(&zero, &pot, &[2, 5], 0).unwrap();
        assert!(rows.iter().all(|r| (r.m_n - r.m_infty).abs() < 1e-12));
    }

    #[test]
    fn mn_mk_and_lipschitz() {
        let pot = PotentialOnGrid::new(line_grid(3), vec![1.0, 0.2, 0.6]).unwrap();
        let same = mn_mk_inequality(&table(), &pot, 4, 4, 0).unwrap();
        assert!((same.lhs - same.rhs).abs() < 1e-12);
        assert!(mn_mk_inequality(&table(), &pot, 4, 2, 0).unwrap().holds);
        let bumped = pot.with_values(vec![1.0, 0.5, 0.6]).unwrap();
        let rep = lipschitz_check(&table(), &pot, &bumped, 4, 0).unwrap();
        assert!(rep.holds && rep.rhs == 0.3);
    }

    #[test]
    fn slope_diagnostics() {
        let one = CostSpec::constant(1.0).unwrap();
        let pot = PotentialOnGrid::new(line_grid(2), vec![1.0, 0.5]).unwrap();
        let rep = small_t_slope(&one, &pot, &[0.01, 0.1, 1.0, 10.0, 10000.0], 0).unwrap();
        assert!(rep.monotone);
        // With ℓ ≡ 1 only the total mass matters: M_∞(tv) = t²/4 for t ≤ 2.
        assert!((rep.small_t_ratio - 0.01 / 4.0).abs() < 1e-12);
        assert!(rep.large_t_gap < 1e-3);
    }
}
