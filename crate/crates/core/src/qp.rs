//! Quadratic maximization over sub-probability vectors:
//! `max vᵀρ − ρᵀLρ` subject to `ρ ≥ 0`, `Σρ ≤ 1`.
//!
//! The missing mass `1 − Σρ` sits at a zero-cost point at infinity.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::mmot::{min_eigenvalue, PSD_TOL};

/// KKT residual accepted as a certificate.
pub const KKT_TOL: f64 = 1e-9;
/// Largest instance solved by exhaustive face enumeration.
pub const FACE_ENUMERATION_MAX: usize = 14;
const PGD_MAX_ITER: usize = 100_000;
const PGD_TOL: f64 = 1e-10;
const RESTARTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QpMethod {
    /// Projected gradient, polished on its detected face.
    Pgd,
    /// Exhaustive enumeration of faces.
    Bruteforce,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QpSolution {
    pub rho: Vec<f64>,
    pub value: f64,
    pub kkt_residual: f64,
    pub method: QpMethod,
    pub certified: bool,
}

pub fn objective(l: &[Vec<f64>], v: &[f64], rho: &[f64]) -> f64 {
    let mut val = 0.0;
    for i in 0..rho.len() {
        if rho[i] == 0.0 {
            continue;
        }
        val += v[i] * rho[i];
        for j in 0..rho.len() {
            if rho[j] != 0.0 {
                val -= rho[i] * l[i][j] * rho[j];
            }
        }
    }
    val
}

fn gradient(l: &[Vec<f64>], v: &[f64], rho: &[f64]) -> Vec<f64> {
    (0..v.len())
        .map(|i| v[i] - 2.0 * l[i].iter().zip(rho).map(|(a, r)| a * r).sum::<f64>())
        .collect()
}

/// Violation of the first-order conditions at a feasible `rho`.
pub fn kkt_residual(l: &[Vec<f64>], v: &[f64], rho: &[f64]) -> f64 {
    let g = gradient(l, v, rho);
    let mass: f64 = rho.iter().sum();
    let support: Vec<usize> = (0..rho.len()).filter(|&i| rho[i] > 1e-12).collect();
    let mu = if mass < 1.0 - 1e-9 || support.is_empty() {
        0.0
    } else {
        (support.iter().map(|&i| rho[i] * g[i]).sum::<f64>() / mass).max(0.0)
    };
    let mut res: f64 = 0.0;
    for i in 0..rho.len() {
        if rho[i] > 1e-12 {
            res = res.max((g[i] - mu).abs());
        } else {
            res = res.max(g[i] - mu);
        }
        res = res.max(-rho[i]);
    }
    res.max(mass - 1.0)
}

/// Euclidean projection onto `{ρ ≥ 0, Σρ ≤ 1}`.
pub fn project_capped_simplex(x: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= 1.0 {
        return clipped;
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cum += u;
        let t = (cum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        }
    }
    x.iter().map(|v| (v - tau).max(0.0)).collect()
}

fn spectral_norm(l: &[Vec<f64>]) -> f64 {
    let n = l.len();
    let m = DMatrix::from_fn(n, n, |i, j| l[i][j]);
    m.symmetric_eigenvalues().iter().fold(0.0f64, |a, e| a.max(e.abs()))
}

/// Projected gradient ascent with step `1/(2‖L‖₂)`, at most `iters` steps.
pub fn pgd(l: &[Vec<f64>], v: &[f64], start: &[f64], iters: usize) -> Vec<f64> {
    let lip = 2.0 * spectral_norm(l);
    let step = if lip > 0.0 { 1.0 / lip } else { 1.0 };
    let mut rho = project_capped_simplex(start);
    for it in 0..iters {
        let g = gradient(l, v, &rho);
        let next: Vec<f64> = rho.iter().zip(&g).map(|(r, gi)| r + step * gi).collect();
        let next = project_capped_simplex(&next);
        let moved = next.iter().zip(&rho).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        rho = next;
        if moved == 0.0 || (it % 16 == 15 && kkt_residual(l, v, &rho) <= PGD_TOL) {
            break;
        }
    }
    rho
}

/// Projected gradient in chunks, trying an active-set polish after each chunk.
fn pgd_polished(l: &[Vec<f64>], v: &[f64], start: &[f64]) -> Vec<f64> {
    const CHUNK: usize = 250;
    let mut rho = project_capped_simplex(start);
    let mut done = 0;
    while done < PGD_MAX_ITER {
        rho = pgd(l, v, &rho, CHUNK);
        done += CHUNK;
        if kkt_residual(l, v, &rho) <= PGD_TOL {
            return rho;
        }
        let p = polish(l, v, &rho);
        if kkt_residual(l, v, &p) <= KKT_TOL {
            return p;
        }
    }
    rho
}

/// Solves the stationarity system on the face `support` with the mass cap
/// active or not. Returns `None` when the system is inconsistent.
fn face_point(l: &[Vec<f64>], v: &[f64], support: &[usize], cap: bool) -> Option<Vec<f64>> {
    let k = support.len();
    let dim = if cap { k + 1 } else { k };
    let mut a = DMatrix::zeros(dim, dim);
    let mut b = DVector::zeros(dim);
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[(r, c)] = 2.0 * l[i][j];
        }
        b[r] = v[i];
        if cap {
            a[(r, k)] = 1.0;
            a[(k, r)] = 1.0;
        }
    }
    if cap {
        b[k] = 1.0;
    }
    let ok = |x: &DVector<f64>| (&a * x - &b).amax() <= 1e-9 * (1.0 + b.amax());
    let x = match a.clone().lu().solve(&b).filter(|x| x.iter().all(|c| c.is_finite()) && ok(x)) {
        Some(x) => x,
        None => {
            let x = a.clone().svd(true, true).solve(&b, 1e-12).ok()?;
            if !ok(&x) {
                return None;
            }
            x
        }
    };
    if cap && x[k] < -1e-12 {
        return None;
    }
    let mut rho = vec![0.0; v.len()];
    for (r, &i) in support.iter().enumerate() {
        rho[i] = x[r];
    }
    Some(rho)
}

/// Active-set refinement from an approximate maximizer.
pub fn polish(l: &[Vec<f64>], v: &[f64], rho: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut support: Vec<usize> = (0..n).filter(|&i| rho[i] > 1e-9).collect();
    let mut cap = rho.iter().sum::<f64>() > 1.0 - 1e-7;
    let mut best = rho.to_vec();
    let mut best_res = kkt_residual(l, v, &best);
    for _ in 0..4 * n + 8 {
        if support.is_empty() {
            break;
        }
        let Some(x) = face_point(l, v, &support, cap) else { break };
        if let Some((pos, _)) = support.iter().enumerate().map(|(p, &i)| (p, x[i])).filter(|(_, xi)| *xi < 0.0).min_by(|a, b| a.1.total_cmp(&b.1)) {
            support.remove(pos);
            continue;
        }
        let mass: f64 = x.iter().sum();
        if !cap && mass > 1.0 {
            cap = true;
            continue;
        }
        let res = kkt_residual(l, v, &x);
        if res < best_res {
            best = x.clone();
            best_res = res;
        }
        if res <= KKT_TOL {
            break;
        }
        let g = gradient(l, v, &x);
        let mu = if cap { support.iter().map(|&i| g[i]).sum::<f64>() / support.len() as f64 } else { 0.0 };
        if cap && mu < 0.0 {
            cap = false;
            continue;
        }
        match (0..n).filter(|i| !support.contains(i)).max_by(|&a, &b| g[a].total_cmp(&g[b])) {
            Some(i) if g[i] > mu + KKT_TOL => {
                support.push(i);
                support.sort_unstable();
            }
            _ => break,
        }
    }
    best
}

/// Global maximizer by enumerating every face and its stationary point.
pub fn face_enumeration(l: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    assert!(n <= 24, "face enumeration is exponential in the grid size");
    let candidates: Vec<(f64, Vec<f64>)> = (1u32..(1u32 << n))
        .into_par_iter()
        .flat_map_iter(|mask| {
            let support: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            [false, true].into_iter().filter_map(move |cap| {
                let x = face_point(l, v, &support, cap)?;
                let feasible = x.iter().all(|&xi| xi >= -1e-12) && x.iter().sum::<f64>() <= 1.0 + 1e-12;
                if !feasible {
                    return None;
                }
                let x = project_capped_simplex(&x);
                Some((objective(l, v, &x), x))
            })
        })
        .collect();
    let mut best = (0.0, vec![0.0; n]);
    for (val, x) in candidates {
        if val > best.0 + 1e-15 {
            best = (val, x);
        }
    }
    best.1
}

/// Maximizes `vᵀρ − ρᵀLρ` over sub-probability vectors.
///
/// Positive semi-definite `L` gives a concave problem: projected gradient
/// followed by an active-set polish, certified by the KKT residual. Otherwise
/// small instances are solved by face enumeration and large ones by a seeded
/// multistart, which is not certified.
pub fn maximize(l: &[Vec<f64>], v: &[f64], seed: u64) -> QpSolution {
    let n = v.len();
    if n == 0 {
        return QpSolution { rho: Vec::new(), value: 0.0, kkt_residual: 0.0, method: QpMethod::Bruteforce, certified: true };
    }
    let psd = min_eigenvalue(l) >= PSD_TOL;
    let finish = |rho: Vec<f64>, method: QpMethod, certified: bool| {
        let kkt = kkt_residual(l, v, &rho);
        QpSolution { value: objective(l, v, &rho), kkt_residual: kkt, method, certified, rho }
    };
    if psd {
        let rho = pgd_polished(l, v, &vec![0.0; n]);
        let kkt = kkt_residual(l, v, &rho);
        return finish(rho, QpMethod::Pgd, kkt <= KKT_TOL);
    }
    if n <= FACE_ENUMERATION_MAX {
        return finish(face_enumeration(l, v), QpMethod::Bruteforce, true);
    }
    let starts: Vec<Vec<f64>> = (0..RESTARTS)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
            let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = raw.iter().sum::<f64>() * (1.0 + rng.gen::<f64>());
            raw.iter().map(|x| x / s).collect()
        })
        .collect();
    let runs: Vec<Vec<f64>> = starts.par_iter().map(|s| pgd_polished(l, v, s)).collect();
    let mut best = vec![0.0; n];
    let mut best_val = 0.0;
    for rho in runs {
        let val = objective(l, v, &rho);
        if val > best_val + 1e-15 {
            best_val = val;
            best = rho;
        }
    }
    finish(best, QpMethod::Pgd, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_properties() {
        let p = project_capped_simplex(&[0.2, -0.1, 0.3]);
        assert_eq!(p, vec![0.2, 0.0, 0.3]);
        let p = project_capped_simplex(&[2.0, 1.0, -1.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
    }

    #[test]
    fn two_node_closed_form() {
        let l = vec![vec![1.0, 0.5], vec![0.5, 1.0]];
        let s = maximize(&l, &[1.0, 1.0], 0);
        assert!(s.certified);
        assert!((s.value - 1.0 / 3.0).abs() < 1e-12);
        assert!((s.rho[0] - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn zero_cost_puts_everything_on_the_best_node() {
        let l = vec![vec![0.0; 3]; 3];
        let s = maximize(&l, &[0.2, 0.9, 0.5], 0);
        assert!((s.value - 0.9).abs() < 1e-12);
    }

    #[test]
    fn non_psd_enumeration_beats_random_search() {
        let l = vec![vec![1.0, 2.0, 0.1], vec![2.0, 1.0, 0.1], vec![0.1, 0.1, 1.0]];
        let v = [1.5, 1.5, 0.8];
        let s = maximize(&l, &v, 0);
        assert_eq!(s.method, QpMethod::Bruteforce);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20_000 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen::<f64>()).collect();
            let x = project_capped_simplex(&x);
            assert!(objective(&l, &v, &x) <= s.value + 1e-12);
        }
    }
}
