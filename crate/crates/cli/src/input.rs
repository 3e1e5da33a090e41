//! Parsing of lists, cost names and JSON input files.

use std::path::Path;

use mmot_core::duality::PotentialOnGrid;
use mmot_core::packing::Measure1d;
use mmot_core::radial::RadialPotential;
use mmot_core::{CostKind, CostSpec, DiscreteMeasure, GroundGrid};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::failure::{Failure, Outcome};

/// Reads and deserializes a JSON file, reporting syntax errors as `path:line:column`.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

pub fn int_list(spec: &str) -> Outcome<Vec<usize>> {
    let bad = || Failure::input(format!("malformed integer list `{spec}`"));
    if let Some((a, b)) = spec.split_once(':') {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

pub fn float_list(spec: &str) -> Outcome<Vec<f64>> {
    let bad = || Failure::input(format!("malformed number list `{spec}`"));
    let parse = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let (a, b) = (parse(a)?, parse(b)?);
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            match n {
                0 => Err(bad()),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
            }
        }
        [single] => single.split(',').map(parse).collect(),
        _ => Err(bad()),
    }
}

pub fn interval(spec: &str) -> Outcome<(f64, f64)> {
    match float_list(spec)?.as_slice() {
        &[a, b] if a < b => Ok((a, b)),
        _ => Err(Failure::input(format!("interval must be `a,b` with a < b, got `{spec}`"))),
    }
}

fn params(spec: &str, name: &str, count: usize) -> Outcome<Vec<f64>> {
    let v = float_list(spec)?;
    if v.len() != count {
        return Err(Failure::input(format!("cost `{name}` takes {count} parameter(s)")));
    }
    Ok(v)
}

/// A cost by name, or a JSON file holding a tagged [`CostKind`].
pub fn cost(spec: &str) -> Outcome<CostSpec> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let kind = match name {
        "coulomb" => CostKind::Coulomb,
        "hard-sphere" => CostKind::HardSphere,
        "exponential" => CostKind::Exponential { a: params(rest, name, 1)?[0] },
        "riesz" => CostKind::Riesz { p: params(rest, name, 1)?[0] },
        "truncated-coulomb" => CostKind::Truncated { base: Box::new(CostKind::Coulomb), h: params(rest, name, 1)?[0] },
        "two-level" => {
            let p = params(rest, name, 3)?;
            CostKind::Table { radii: vec![0.0, p[2]], values: vec![p[0], p[1]] }
        }
        _ if Path::new(spec).is_file() => read_json(Path::new(spec))?,
        _ => return Err(Failure::input(format!("unknown cost `{spec}`"))),
    };
    Ok(CostSpec::new(kind)?)
}

#[derive(Deserialize)]
struct RawMeasure {
    dim: usize,
    points: Vec<Vec<f64>>,
    masses: Vec<f64>,
}

pub fn measure(path: &Path) -> Outcome<DiscreteMeasure> {
    let raw: RawMeasure = read_json(path)?;
    Ok(DiscreteMeasure::new(raw.dim, raw.points, raw.masses)?)
}

#[derive(Deserialize)]
struct RawPotential {
    grid: GroundGrid,
    values: Vec<f64>,
}

pub fn grid_potential(path: &Path) -> Outcome<PotentialOnGrid> {
    let raw: RawPotential = read_json(path)?;
    let grid = GroundGrid::new(raw.grid.dim, raw.grid.nodes, raw.grid.has_omega)?;
    Ok(PotentialOnGrid::new(grid, raw.values)?)
}

#[derive(Deserialize)]
struct RawSamples {
    radii: Vec<f64>,
    values: Vec<f64>,
}

pub fn radial_potential(spec: &str) -> Outcome<RadialPotential> {
    if Path::new(spec).is_file() {
        let raw: RawSamples = read_json(Path::new(spec))?;
        return Ok(RadialPotential::sampled(raw.radii, raw.values)?);
    }
    Ok(RadialPotential::catalog(spec)?)
}

#[derive(Deserialize)]
struct RawProfile {
    xs: Vec<f64>,
    values: Vec<f64>,
}

/// Weight on an interval, evaluated by linear interpolation for sampled profiles.
pub fn profile(spec: &str) -> Outcome<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    match spec {
        "one" => Ok(Box::new(|_| 1.0)),
        "linear" => Ok(Box::new(|x| x)),
        "quadratic" => Ok(Box::new(|x| x * x)),
        _ if Path::new(spec).is_file() => {
            let raw: RawProfile = read_json(Path::new(spec))?;
            if raw.xs.len() < 2 || raw.xs.len() != raw.values.len() || raw.xs.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Failure::input(format!("{spec}: profile needs at least two samples with increasing xs")));
            }
            let RawProfile { xs, values } = raw;
            Ok(Box::new(move |x| {
                let i = xs.partition_point(|&t| t <= x).clamp(1, xs.len() - 1);
                let w = ((x - xs[i - 1]) / (xs[i] - xs[i - 1])).clamp(0.0, 1.0);
                values[i - 1] + w * (values[i] - values[i - 1])
            }))
        }
        _ => Err(Failure::input(format!("unknown weight `{spec}`"))),
    }
}

pub fn line_measure(spec: &str, interval: (f64, f64)) -> Outcome<Measure1d> {
    if spec == "uniform" {
        return Ok(Measure1d::uniform(interval.0, interval.1));
    }
    read_json(Path::new(spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(int_list("2:5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(int_list("3, 7").unwrap(), vec![3, 7]);
        assert!(int_list("5:2").is_err());
        assert_eq!(float_list("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(float_list("1.5,2").unwrap(), vec![1.5, 2.0]);
        assert!(float_list("1:2").is_err());
        assert!(float_list("inf").is_err());
        assert!(interval("1,0").is_err());
    }

    #[test]
    fn cost_names() {
        assert_eq!(cost("coulomb").unwrap().kind, CostKind::Coulomb);
        let c = cost("two-level:3,1,2").unwrap();
        assert_eq!((c.value(0.5), c.value(2.5)), (3.0, 1.0));
        assert!(cost("exponential").is_err());
        assert!(cost("yukawa").is_err());
    }

    #[test]
    fn sampled_profile_interpolates() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.json");
        std::fs::write(&p, r#"{"xs": [0, 1], "values": [0, 2]}"#).unwrap();
        let f = profile(p.to_str().unwrap()).unwrap();
        assert_eq!((f(0.25), f(1.0), f(3.0)), (0.5, 2.0, 2.0));
    }
}
