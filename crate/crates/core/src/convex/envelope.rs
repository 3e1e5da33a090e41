//! Convex envelopes of finitely supported functions.

use super::lp::{self, LinearProgram, LpOutcome};
use super::scalar::Scalar;
use crate::error::{invalid, Result};

/// Value of the convex envelope at a point with a mixture attaining it.
#[derive(Debug, Clone)]
pub struct EnvelopeValue<T> {
    /// `+∞` outside the convex hull of the finite sample points.
    pub value: Option<T>,
    /// Weights on the input points, summing to one with barycenter `t`.
    pub weights: Vec<T>,
}

/// Convex envelope at `t` of the function taking value `values[i]` at `points[i]`
/// and `+∞` elsewhere. `None` values are `+∞` samples.
///
/// The supporting hyperplane problem `max a·t + b` with `a·pᵢ + b ≤ qᵢ` is solved
/// directly; its multipliers give the optimal mixture.
pub fn envelope_eval<T: Scalar>(points: &[Vec<T>], values: &[Option<T>], t: &[T]) -> Result<EnvelopeValue<T>> {
    if points.len() != values.len() {
        return invalid("points and values differ in length");
    }
    let dim = t.len();
    if points.iter().any(|p| p.len() != dim) {
        return invalid("point dimension does not match the evaluation point");
    }
    let finite: Vec<usize> = (0..points.len()).filter(|&i| values[i].is_some()).collect();
    let n = points.len();
    if finite.is_empty() {
        return Ok(EnvelopeValue { value: None, weights: vec![T::zero(); n] });
    }
    // Columns: a⁺ (dim), a⁻ (dim), b⁺, b⁻, slacks (one per finite sample).
    let cols = 2 * dim + 2 + finite.len();
    let mut c = vec![T::zero(); cols];
    for k in 0..dim {
        c[k] = -t[k].clone();
        c[dim + k] = t[k].clone();
    }
    c[2 * dim] = -T::one();
    c[2 * dim + 1] = T::one();
    let mut a = Vec::with_capacity(finite.len());
    let mut b = Vec::with_capacity(finite.len());
    for (r, &i) in finite.iter().enumerate() {
        let mut row = vec![T::zero(); cols];
        for k in 0..dim {
            row[k] = points[i][k].clone();
            row[dim + k] = -points[i][k].clone();
        }
        row[2 * dim] = T::one();
        row[2 * dim + 1] = -T::one();
        row[2 * dim + 2 + r] = T::one();
        a.push(row);
        b.push(values[i].clone().expect("finite sample"));
    }
    match lp::solve(&LinearProgram { c, a, b })? {
        LpOutcome::Unbounded => Ok(EnvelopeValue { value: None, weights: vec![T::zero(); n] }),
        LpOutcome::Infeasible => invalid("supporting hyperplane problem reported infeasible"),
        LpOutcome::Optimal(sol) => {
            let mut weights = vec![T::zero(); n];
            for (r, &i) in finite.iter().enumerate() {
                weights[i] = -sol.duals[r].clone();
            }
            Ok(EnvelopeValue { value: Some(-sol.value), weights })
        }
    }
}

/// Lower convex hull of one-dimensional samples, evaluated by linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseAffine {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl PiecewiseAffine {
    /// `+∞` outside `[xs[0], xs[last]]`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 0 || x < self.xs[0] || x > self.xs[n - 1] {
            return f64::INFINITY;
        }
        if n == 1 {
            return self.ys[0];
        }
        let k = self.xs.partition_point(|&v| v <= x).clamp(1, n - 1);
        let (x0, x1, y0, y1) = (self.xs[k - 1], self.xs[k], self.ys[k - 1], self.ys[k]);
        if x1 == x0 {
            return y0.min(y1);
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect()
    }
}

/// Convex envelope of 1-D samples via the lower monotone chain.
/// Non-finite values are treated as `+∞` and ignored.
pub fn envelope_1d(xs: &[f64], ys: &[f64]) -> Result<PiecewiseAffine> {
    if xs.len() != ys.len() {
        return invalid("xs and ys differ in length");
    }
    let mut pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(_, y)| y.is_finite()).map(|(&x, &y)| (x, y)).collect();
    if pts.iter().any(|(x, _)| !x.is_finite()) {
        return invalid("sample abscissae must be finite");
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|b, a| a.0 == b.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    Ok(PiecewiseAffine { xs: hull.iter().map(|p| p.0).collect(), ys: hull.iter().map(|p| p.1).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_of_square_on_integers() {
        let points: Vec<Vec<f64>> = (0..=4).map(|k| vec![k as f64]).collect();
        let values: Vec<Option<f64>> = (0..=4).map(|k| Some((k * k) as f64)).collect();
        let e = envelope_eval(&points, &values, &[1.5]).unwrap();
        assert!((e.value.unwrap() - 2.5).abs() < 1e-12);
        let mean: f64 = e.weights.iter().zip(&points).map(|(w, p)| w * p[0]).sum();
        assert!((mean - 1.5).abs() < 1e-12);
        assert!(envelope_eval(&points, &values, &[4.5]).unwrap().value.is_none());
    }

    #[test]
    fn monotone_chain_matches_lp() {
        let xs: Vec<f64> = (0..12).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x * 1.7).sin() + 0.1 * x * x).collect();
        let hull = envelope_1d(&xs, &ys).unwrap();
        let points: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let values: Vec<Option<f64>> = ys.iter().map(|&y| Some(y)).collect();
        for k in 0..=55 {
            let t = k as f64 * 0.1;
            let lp = envelope_eval(&points, &values, &[t]).unwrap().value.unwrap();
            assert!((lp - hull.eval(t)).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn two_dimensional_envelope() {
        let points = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let values = vec![Some(0.0), Some(1.0), Some(1.0), Some(4.0)];
        let e = envelope_eval(&points, &values, &[0.5, 0.5]).unwrap();
        assert!((e.value.unwrap() - 1.0).abs() < 1e-12);
    }
}
