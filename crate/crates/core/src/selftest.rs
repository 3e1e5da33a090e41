//! Invariant suites run by `mmot selftest`.
//!
//! The report is plain text with fixed number formatting, so two runs with the
//! same seed produce identical bytes regardless of the worker-pool size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::convex::{envelope_1d, envelope_eval};
use crate::duality::{lipschitz_check, sandwich_suite, PotentialOnGrid};
use crate::energy::kappa_scan;
use crate::error::Result;
use crate::measures::{CostSpec, DiscreteMeasure, GroundGrid};
use crate::mmot::{f_sigma_n, monotonicity_check, relaxed_cn, two_dirac_closed_form, QuadraticFormQ};
use crate::packing::{
    candidate_grid, gamma_d_estimate, pack_count_1d, pack_count_2d, w2_distance_1d, weighted_pack_1d, AxisBox, BoundaryMode, Measure1d,
    PackingInstance,
};
use crate::radial::{radial_constants, shell_discretize, solve_radial, RadialPotential};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub lines: Vec<SuiteLine>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!("selftest seed={}\n", self.seed);
        for l in &self.lines {
            out.push_str(&format!("{:<26} {}  {}\n", l.name, if l.passed { "PASS" } else { "FAIL" }, l.detail));
        }
        let ok = self.lines.iter().filter(|l| l.passed).count();
        out.push_str(&format!("summary: {ok}/{} suites passed\n", self.lines.len()));
        out
    }
}

fn line(name: &'static str, result: Result<(bool, String)>) -> SuiteLine {
    match result {
        Ok((passed, detail)) => SuiteLine { name, passed, detail },
        Err(e) => SuiteLine { name, passed: false, detail: format!("error: {e}") },
    }
}

fn envelope_suite(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let xs: Vec<f64> = (0..8).map(|i| i as f64 + 0.5 * rng.gen::<f64>()).collect();
        let ys: Vec<f64> = (0..8).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let hull = envelope_1d(&xs, &ys)?;
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let vals: Vec<Option<f64>> = ys.iter().map(|&y| Some(y)).collect();
        for k in 0..10 {
            let t = (xs[0] + (xs[7] - xs[0]) * k as f64 / 9.0).min(xs[7]);
            let e = envelope_eval(&pts, &vals, &[t])?.value.unwrap_or(f64::INFINITY);
            worst = worst.max((e - hull.eval(t)).abs());
        }
    }
    Ok((worst <= 1e-9, format!("max |1-D hull - LP envelope| = {worst:.6e}")))
}

fn two_dirac_suite() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for l1 in [0.0, 0.5, 1.0] {
        let cost = CostSpec::two_level(1.0, l1, 2.0)?;
        for i in 0..=4 {
            for j in 0..=(4 - i) {
                let (s, t) = (i as f64 / 4.0, j as f64 / 4.0);
                if s + t == 0.0 {
                    continue;
                }
                let rho = DiscreteMeasure::new(1, vec![vec![0.0], vec![1.0]], vec![s, t])?;
                for n in 2..=6 {
                    let lp = relaxed_cn(&cost, &rho, n)?.value;
                    let cf = two_dirac_closed_form(&1.0, &l1, &s, &t, n)?;
                    worst = worst.max((lp - cf).abs());
                }
            }
        }
    }
    Ok((worst <= 1e-9, format!("max |closed form - LP| = {worst:.6e}")))
}

fn f_sigma_suite(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(2..=6);
        let b: Vec<Vec<f64>> = (0..m).map(|_| (0..m).map(|_| rng.gen::<f64>()).collect()).collect();
        let l: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| (0..m).map(|k| b[k][i] * b[k][j]).sum()).collect()).collect();
        let q = QuadraticFormQ::from_matrix(l)?;
        let raw: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
        let scale = n as f64 * rng.gen::<f64>() / raw.iter().sum::<f64>();
        let t: Vec<f64> = raw.iter().map(|x| x * scale).collect();
        let f = f_sigma_n(&q, n, &t)?;
        let e = f.envelope_value.unwrap_or(f64::NAN);
        worst = worst.max((f.value - e).abs());
    }
    Ok((worst <= 1e-9, format!("max |LP - envelope| = {worst:.6e}")))
}

fn monotone_suite(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let cost = CostSpec::exponential(1.0)?;
    let points: Vec<Vec<f64>> = (0..3).map(|i| vec![i as f64 + rng.gen::<f64>()]).collect();
    let masses: Vec<f64> = (0..3).map(|_| 0.3 * rng.gen::<f64>()).collect();
    let rho = DiscreteMeasure::new(1, points, masses)?;
    let rep = monotonicity_check(&cost, &rho, &(2..=8).collect::<Vec<_>>())?;
    let last = rep.values.last().map_or(f64::NAN, |v| v.1);
    Ok((rep.ok(), format!("C_8 = {last:.12e}")))
}

fn line_potential(values: Vec<f64>) -> Result<PotentialOnGrid> {
    let grid = GroundGrid::new(1, (0..values.len()).map(|i| vec![i as f64]).collect(), true)?;
    PotentialOnGrid::new(grid, values)
}

fn sandwich_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let cost = CostSpec::two_level(1.0, 0.4, 1.5)?;
    let pot = line_potential((0..4).map(|_| rng.gen::<f64>() * 2.0 - 0.5).collect())?;
    let rows = sandwich_suite(&cost, &pot, &(2..=6).collect::<Vec<_>>(), 0)?;
    let ok = rows.iter().all(|r| r.holds && r.certified);
    let worst = rows.iter().map(|r| r.scaled_gap).fold(f64::NEG_INFINITY, f64::max);
    Ok((ok, format!("max N(M_N - M_inf) = {worst:.12e}")))
}

fn lipschitz_suite(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let cost = CostSpec::two_level(1.0, 0.4, 1.5)?;
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10 {
        let a = line_potential((0..3).map(|_| rng.gen::<f64>() * 2.0 - 0.5).collect())?;
        let b = line_potential((0..3).map(|_| rng.gen::<f64>() * 2.0 - 0.5).collect())?;
        let r = lipschitz_check(&cost, &a, &b, 4, 0)?;
        ok &= r.holds && r.certified;
        worst = worst.max(r.lhs - r.rhs);
    }
    Ok((ok, format!("max |dM_N| - |dv|_inf = {worst:.12e}")))
}

fn kappa_suite() -> Result<(bool, String)> {
    let l = vec![vec![1.0, 0.5], vec![0.5, 1.0]];
    let scan = kappa_scan(&l, &[1.0, 1.0], &[0.5, 1.0, 1.4, 2.0, 3.0], 0)?;
    let from_mass = scan.kappa_from_mass.unwrap_or(f64::NAN);
    Ok((scan.kappa == Some(1.4) && (from_mass - 1.5).abs() < 1e-9, format!("kappa from mass = {from_mass:.12e}")))
}

fn radial_suite() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for pot in [RadialPotential::v1(), RadialPotential::v2(), RadialPotential::v3(), RadialPotential::v4()] {
        let lv = radial_constants(&pot)?.lambda_v;
        for f in [0.5, 1.0, 2.0] {
            let lam = f * lv;
            let m = solve_radial(&pot, lam)?.m_infty;
            let cf = pot.closed_form_m_infty(lam).unwrap_or(f64::NAN);
            worst = worst.max((m - cf).abs() / cf.abs());
        }
    }
    Ok((worst <= 1e-6, format!("max relative error = {worst:.6e}")))
}

fn shell_suite() -> Result<(bool, String)> {
    let sol = solve_radial(&RadialPotential::v3(), 1.0)?;
    let rep = shell_discretize(&sol, 200)?.optimality(&sol, 1e-3)?;
    Ok((rep.passes(1e-3), format!("residual = {:.6e}", rep.residual)))
}

fn packing_suite() -> Result<(bool, String)> {
    let p = pack_count_1d(&PackingInstance::interval(0.0, 1.0, 0.3, BoundaryMode::Points)?)?.count;
    let b = pack_count_1d(&PackingInstance::interval(0.0, 1.0, 0.3, BoundaryMode::Balls)?)?.count;
    let g1 = gamma_d_estimate(1, &[1_000_000])?.inf_lower;
    let sq = PackingInstance::new(vec![AxisBox::new(vec![0.0, 0.0], vec![3.0, 3.0])?], 1.0, BoundaryMode::Points)?;
    let br = pack_count_2d(&sq)?;
    let ok = p == 4 && b == 3 && (g1 - 1.0).abs() <= 1e-5 && br.lower <= br.upper;
    Ok((ok, format!("n=4? {p} ntilde=3? {b} gamma_1={g1:.9} square3 [{}, {}]", br.lower, br.upper)))
}

fn dp_suite(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut mismatches = 0;
    for _ in 0..20 {
        let eps = 0.1 + 0.2 * rng.gen::<f64>();
        let inst = PackingInstance::interval(0.0, 1.0, eps, BoundaryMode::Points)?;
        let cands = candidate_grid(&inst, 0.05, &[])?;
        let vals: Vec<f64> = cands.iter().map(|_| rng.gen::<f64>()).collect();
        let n = rng.gen_range(1..=4);
        let dp = weighted_pack_1d(&inst, &cands, &vals, n).ok().map(|w| w.value);
        let agree = match (dp, brute_pack(&cands, &vals, n, eps)) {
            (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
            (a, b) => a.is_none() && b.is_none(),
        };
        if !agree {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, format!("mismatches = {mismatches}")))
}

/// Best `(1/N) Σ v` over all separated `N`-subsets, by exhaustive recursion.
pub(crate) fn brute_pack(cands: &[f64], vals: &[f64], n: usize, eps: f64) -> Option<f64> {
    fn rec(i: usize, c: &[f64], v: &[f64], left: usize, last: Option<f64>, eps: f64) -> Option<f64> {
        if left == 0 {
            return Some(0.0);
        }
        if c.len() - i < left {
            return None;
        }
        let skip = rec(i + 1, c, v, left, last, eps);
        let fits = last.map_or(true, |l| c[i] - l >= eps * (1.0 - crate::packing::SEPARATION_TOL));
        let take = if fits { rec(i + 1, c, v, left - 1, Some(c[i]), eps).map(|x| x + v[i]) } else { None };
        match (skip, take) {
            (Some(a), Some(b)) => Some(if b > a { b } else { a }),
            (a, b) => a.or(b),
        }
    }
    rec(0, cands, vals, n, None, eps).map(|x| x / n as f64)
}

fn w2_suite() -> Result<(bool, String)> {
    let d = w2_distance_1d(&Measure1d::uniform(0.0, 1.0), &Measure1d::dirac(0.5))?;
    let err = (d - 1.0 / 12f64.sqrt()).abs();
    Ok((err <= 1e-12, format!("W_2(U[0,1], delta_1/2) = {d:.15}")))
}

/// Runs every suite with random instances drawn from `seed`.
pub fn run_selftest(seed: u64) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lines = vec![
        line("convex.envelope", envelope_suite(&mut rng)),
        line("mmot.two_dirac", two_dirac_suite()),
        line("mmot.f_sigma", f_sigma_suite(&mut rng)),
        line("mmot.monotone_in_n", monotone_suite(&mut rng)),
        line("duality.sandwich", sandwich_check(&mut rng)),
        line("duality.lipschitz", lipschitz_suite(&mut rng)),
        line("energy.kappa", kappa_suite()),
        line("radial.closed_forms", radial_suite()),
        line("radial.shell_optimality", shell_suite()),
        line("packing.counts", packing_suite()),
        line("packing.weighted_dp", dp_suite(&mut rng)),
        line("packing.w2", w2_suite()),
    ];
    SelftestReport { seed, lines }
}
