//! Legendre transforms and recession slopes of sampled convex functions.

use crate::error::{invalid, Error, Result};

/// Discrete Legendre transform `f*(v) = max_i (v·xᵢ − f(xᵢ))` on a slope grid.
/// Samples with value `+∞` do not contribute; with no finite sample the
/// transform is `−∞`.
pub fn legendre_1d(xs: &[f64], fs: &[f64], slopes: &[f64]) -> Result<Vec<f64>> {
    if xs.len() != fs.len() {
        return invalid("xs and fs differ in length");
    }
    Ok(slopes
        .iter()
        .map(|&v| {
            xs.iter()
                .zip(fs)
                .filter(|(_, f)| f.is_finite())
                .map(|(&x, &f)| v * x - f)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RecessionSlope {
    pub slope: f64,
    /// Largest `t` at which `f` was evaluated.
    pub t_max: f64,
}

/// Recession slope `lim_{t→∞} (f(x₀ + t z) − f(x₀)) / t` of a convex function.
///
/// Difference quotients at `t = 2^k` are nondecreasing for convex `f`. The
/// limit is declared infinite when successive increments stop shrinking
/// geometrically.
pub fn recession_slope(f: &dyn Fn(f64) -> f64, x0: f64, z: f64) -> Result<RecessionSlope> {
    let f0 = f(x0);
    if !f0.is_finite() {
        return invalid("base point must lie in the effective domain");
    }
    let mut quotients = Vec::with_capacity(64);
    for k in 0..=48 {
        let t = 2f64.powi(k);
        let v = f(x0 + t * z);
        if v == f64::INFINITY {
            return Ok(RecessionSlope { slope: f64::INFINITY, t_max: t });
        }
        let q = (v - f0) / t;
        if let Some(&prev) = quotients.last() {
            let prev: f64 = prev;
            if q < prev - 1e-9 * (1.0 + prev.abs()) {
                return Err(Error::Numerical("difference quotients decrease; function is not convex".into()));
            }
        }
        quotients.push(q);
    }
    let n = quotients.len();
    let d1 = quotients[n - 1] - quotients[n - 2];
    let d2 = quotients[n - 2] - quotients[n - 3];
    let scale = 1.0 + quotients[n - 1].abs();
    let t_max = 2f64.powi(48);
    if d1 > 1e-9 * scale && d1 >= 0.75 * d2 {
        return Ok(RecessionSlope { slope: f64::INFINITY, t_max });
    }
    Ok(RecessionSlope { slope: quotients[n - 1], t_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::envelope::envelope_1d;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    #[test]
    fn square_is_self_dual_up_to_scale() {
        let xs = grid(-5.0, 5.0, 2000);
        let fs: Vec<f64> = xs.iter().map(|x| 0.5 * x * x).collect();
        let vs = grid(-2.0, 2.0, 40);
        let fstar = legendre_1d(&xs, &fs, &vs).unwrap();
        for (v, s) in vs.iter().zip(&fstar) {
            assert!((s - 0.5 * v * v).abs() < 1e-4);
        }
    }

    #[test]
    fn indicator_of_origin_and_absolute_value() {
        let xs = grid(-3.0, 3.0, 600);
        let ind: Vec<f64> = xs.iter().map(|&x| if x.abs() < 1e-12 { 0.0 } else { f64::INFINITY }).collect();
        let vs = grid(-4.0, 4.0, 16);
        assert!(legendre_1d(&xs, &ind, &vs).unwrap().iter().all(|v| v.abs() < 1e-12));
        let abs: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
        for (v, s) in vs.iter().zip(legendre_1d(&xs, &abs, &vs).unwrap()) {
            if v.abs() <= 1.0 {
                assert!(s.abs() < 1e-12);
            } else {
                assert!(s >= (v.abs() - 1.0) * 3.0 - 1e-9);
            }
        }
    }

    #[test]
    fn biconjugate_is_envelope() {
        let xs = grid(-2.0, 2.0, 200);
        let fs: Vec<f64> = xs.iter().map(|&x| (x * x - 1.0).powi(2)).collect();
        let hull = envelope_1d(&xs, &fs).unwrap();
        let slopes: Vec<f64> = hull.slopes();
        let fstar = legendre_1d(&xs, &fs, &slopes).unwrap();
        for &x in &xs {
            let back = legendre_1d(&slopes, &fstar, &[x]).unwrap()[0];
            assert!((back - hull.eval(x)).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn recession_examples() {
        assert!((recession_slope(&|x: f64| x.abs(), 0.3, 1.0).unwrap().slope - 1.0).abs() < 1e-9);
        assert!((recession_slope(&|x: f64| x.abs(), 0.3, -2.0).unwrap().slope - 2.0).abs() < 1e-9);
        assert_eq!(recession_slope(&|x: f64| x * x, 1.0, 1.0).unwrap().slope, f64::INFINITY);
        let f = |x: f64| if x >= 0.0 { 0.0 } else { f64::INFINITY };
        let r = recession_slope(&f, 0.0, 1.0).unwrap();
        assert_eq!((r.slope, r.t_max), (0.0, 2f64.powi(48)));
        let r = recession_slope(&f, 0.0, -1.0).unwrap();
        assert_eq!((r.slope, r.t_max), (f64::INFINITY, 1.0));
        let hinge = |x: f64| (x - 1.0).max(0.0);
        assert_eq!(recession_slope(&hinge, 0.0, -1.0).unwrap().slope, 0.0);
    }
}
