use mmot_core::duality::{m_infty_grid, m_n_grid};
use mmot_core::energy::grid_minimize_slambda;
use mmot_core::mmot::{exact_cn_probability, gap_scan, relaxed_cn, relaxed_cn_restricted};
use mmot_core::packing::{
    gamma_d_estimate, gamma_liminf_check, pack_count_1d, pack_count_2d, w2_to_density_bound, w2_to_separated, AxisBox, BoundaryMode,
    PackingInstance,
};
use mmot_core::radial::{mass_curve, radial_constants};
use mmot_core::selftest::run_selftest;
use mmot_core::Error;
use rayon::prelude::*;
use serde_json::Value;

use crate::args::*;
use crate::failure::{Failure, Outcome};
use crate::input;
use crate::output::{Cell, Table};

fn to_json<T: serde::Serialize>(v: &T) -> Outcome<Value> {
    serde_json::to_value(v).map_err(|e| Failure::numerical(e.to_string()))
}

pub fn run(command: &Command, seed: u64) -> Outcome<Table> {
    match command {
        Command::Mmot(a) => mmot(a),
        Command::Relax(a) => relax(a),
        Command::Dual(a) => dual(a, seed),
        Command::Minfty(a) => minfty(a, seed),
        Command::Energy(a) => energy(a, seed),
        Command::Radial(a) => radial(a),
        Command::Sweep(a) => sweep(a),
        Command::Packing(p) => match p {
            PackingCommand::Count(a) => pack_count(a),
            PackingCommand::Gamma(a) => pack_gamma(a),
            PackingCommand::Dual(a) => pack_dual(a),
            PackingCommand::W2(a) => pack_w2(a),
        },
        Command::Selftest => Ok(selftest(seed).0),
    }
}

fn mmot(a: &CostArgs) -> Outcome<Table> {
    let (cost, rho, ns) = (input::cost(&a.cost)?, input::measure(&a.measure)?, input::int_list(&a.n)?);
    let values: Vec<f64> = ns.par_iter().map(|&n| exact_cn_probability(&cost, &rho, n)).collect::<Result<_, Error>>()?;
    let mut t = Table::new(&["N", "value"]);
    for (n, v) in ns.into_iter().zip(values) {
        t.push(vec![n.into(), v.into()]);
    }
    Ok(t)
}

fn relax(a: &CostArgs) -> Outcome<Table> {
    let (cost, rho, ns) = (input::cost(&a.cost)?, input::measure(&a.measure)?, input::int_list(&a.n)?);
    let solve = if cost.ell_at_zero.is_finite() { relaxed_cn } else { relaxed_cn_restricted };
    let results: Vec<_> = ns.par_iter().map(|&n| solve(&cost, &rho, n)).collect::<Result<_, Error>>()?;
    let mut t = Table::new(&["N", "value", "f_value", "k_min", "k_max", "alt_optima"]);
    let mut strata = Vec::new();
    for (&n, r) in ns.iter().zip(&results) {
        let s = &r.stratification;
        t.push(vec![n.into(), r.value.into(), r.f_value.into(), s.k_min.into(), s.k_max.into(), r.alternative_optima.into()]);
        strata.push(to_json(s)?);
    }
    t.extra.insert("stratifications".into(), Value::Array(strata));
    Ok(t)
}

const DUALITY_COLUMNS: [&str; 4] = ["t_or_N", "value", "method", "certified"];

fn dual(a: &DualArgs, seed: u64) -> Outcome<Table> {
    let (cost, pot, ns) = (input::cost(&a.cost)?, input::grid_potential(&a.potential)?, input::int_list(&a.n)?);
    let reports: Vec<_> = ns.par_iter().map(|&n| m_n_grid(&cost, &pot, n, seed)).collect::<Result<_, Error>>()?;
    let mut t = Table::new(&DUALITY_COLUMNS);
    for (&n, r) in ns.iter().zip(&reports) {
        t.push(vec![n.into(), r.value.into(), r.method.as_str().into(), r.certified.into()]);
        t.uncertified += usize::from(!r.certified);
    }
    t.extra.insert("configurations".into(), to_json(&reports.iter().map(|r| &r.configuration).collect::<Vec<_>>())?);
    Ok(t)
}

fn minfty(a: &MinftyArgs, seed: u64) -> Outcome<Table> {
    let (cost, pot, ts) = (input::cost(&a.cost)?, input::grid_potential(&a.potential)?, input::float_list(&a.lambda)?);
    let reports: Vec<_> = ts.par_iter().map(|&s| m_infty_grid(&cost, &pot.scaled(s), seed)).collect::<Result<_, Error>>()?;
    let mut t = Table::new(&DUALITY_COLUMNS);
    for (&s, r) in ts.iter().zip(&reports) {
        t.push(vec![s.into(), r.value.into(), r.method.as_str().into(), r.certified.into()]);
        t.uncertified += usize::from(!r.certified);
    }
    t.extra.insert("measures".into(), to_json(&reports.iter().map(|r| &r.measure).collect::<Vec<_>>())?);
    Ok(t)
}

fn energy(a: &EnergyArgs, seed: u64) -> Outcome<Table> {
    let (cost, pot, lambdas) = (input::cost(&a.cost)?, input::grid_potential(&a.potential)?, input::float_list(&a.lambda)?);
    let l = pot.grid.interaction(&cost);
    let sols: Vec<_> = lambdas.par_iter().map(|&lam| grid_minimize_slambda(&l, &pot.values, lam, seed)).collect::<Result<_, Error>>()?;
    let mut t = Table::new(&["lambda", "mass", "value", "c_lambda", "residual", "certified"]);
    for s in &sols {
        t.push(vec![s.lambda.into(), s.mass.into(), s.value.into(), s.c_lambda.into(), s.residual.into(), s.certified.into()]);
        t.uncertified += usize::from(!s.certified);
    }
    t.extra.insert("minimizers".into(), to_json(&sols.iter().map(|s| &s.rho).collect::<Vec<_>>())?);
    Ok(t)
}

fn radial(a: &RadialArgs) -> Outcome<Table> {
    let pot = input::radial_potential(&a.potential)?;
    let lambdas = input::float_list(&a.lambda)?;
    let constants = radial_constants(&pot)?;
    let rows = mass_curve(&pot, &lambdas)?;
    let mut t = Table::new(&["lambda", "mass", "r_lambda", "c_lambda", "M_infty", "M_infty_closed_form", "rel_err"]);
    for r in rows {
        t.push(vec![r.lambda.into(), r.mass.into(), r.r_lambda.into(), r.c_lambda.into(), r.m_infty.into(), r.m_infty_closed_form.into(), r.rel_err.into()]);
    }
    t.extra.insert("constants".into(), to_json(&constants)?);
    Ok(t)
}

fn sweep(a: &SweepArgs) -> Outcome<Table> {
    let (cost, rho) = (input::cost(&a.cost)?, input::measure(&a.measure)?);
    let (ns, thetas) = (input::int_list(&a.n)?, input::float_list(&a.theta)?);
    let mut t = Table::new(&["N", "theta", "Kmin_over_N", "Kmax_over_N", "value", "alt_optima"]);
    for r in gap_scan(&cost, &rho, &thetas, &ns)? {
        t.push(vec![r.n.into(), r.theta.into(), r.kmin_over_n.into(), r.kmax_over_n.into(), r.value.into(), r.alt_optima.into()]);
    }
    Ok(t)
}

fn parse_box(spec: &str) -> Outcome<AxisBox> {
    let c = input::float_list(spec)?;
    Ok(match c.len() {
        2 => AxisBox::interval(c[0], c[1])?,
        4 => AxisBox::new(vec![c[0], c[1]], vec![c[2], c[3]])?,
        _ => return Err(Failure::input(format!("box `{spec}` needs 2 or 4 coordinates"))),
    })
}

fn pack_count(a: &CountArgs) -> Outcome<Table> {
    let boxes = a.boxes.iter().map(|b| parse_box(b)).collect::<Outcome<Vec<_>>>()?;
    let mode = match a.mode {
        ModeArg::Points => BoundaryMode::Points,
        ModeArg::Balls => BoundaryMode::Balls,
    };
    let mut t = Table::new(&["eps", "lower", "upper"]);
    let mut witnesses = Vec::new();
    for eps in input::float_list(&a.eps)? {
        let inst = PackingInstance::new(boxes.clone(), eps, mode)?;
        if inst.dim == 1 {
            let c = pack_count_1d(&inst)?;
            t.push(vec![eps.into(), c.count.into(), c.count.into()]);
            witnesses.push(to_json(&c.witness)?);
        } else {
            let c = pack_count_2d(&inst)?;
            t.push(vec![eps.into(), c.lower.into(), c.upper.into()]);
            witnesses.push(to_json(&c.witness)?);
        }
    }
    t.extra.insert("witnesses".into(), Value::Array(witnesses));
    Ok(t)
}

fn pack_gamma(a: &GammaArgs) -> Outcome<Table> {
    let est = gamma_d_estimate(a.dim, &input::int_list(&a.k)?)?;
    let mut t = Table::new(&["k", "lower", "upper", "ratio_lower", "ratio_upper"]);
    for r in &est.rows {
        t.push(vec![r.k.into(), r.lower.into(), r.upper.into(), r.ratio_lower.into(), r.ratio_upper.into()]);
    }
    t.extra.insert("inf_lower".into(), to_json(&est.inf_lower)?);
    t.extra.insert("inf_upper".into(), to_json(&est.inf_upper)?);
    Ok(t)
}

fn pack_dual(a: &PackDualArgs) -> Outcome<Table> {
    let v = input::profile(&a.potential)?;
    let report = gamma_liminf_check(&v, input::interval(&a.interval)?, a.kappa, &input::int_list(&a.n)?, a.grid)?;
    let mut t = Table::new(&["N", "eps", "value", "bound"]);
    for r in &report.rows {
        t.push(vec![r.n.into(), r.eps.into(), r.value.into(), report.bound.into()]);
    }
    t.extra.insert("max_excess".into(), to_json(&report.max_excess)?);
    Ok(t)
}

fn pack_w2(a: &W2Args) -> Outcome<Table> {
    if !(a.kappa > 0.0) {
        return Err(Failure::input("κ must be positive"));
    }
    let iv = input::interval(&a.interval)?;
    let rho = input::line_measure(&a.measure, iv)?;
    let feasible = |r: Result<f64, Error>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Infeasible) => Ok(None),
        Err(e) => Err(Failure::from(e)),
    };
    let to_k = feasible(w2_to_density_bound(&rho, 1.0 / a.kappa, iv, a.grid).map(|p| p.value))?;
    let mut t = Table::new(&["N", "eps", "w2_separated", "w2_density_bound"]);
    for n in input::int_list(&a.n)? {
        let eps = a.kappa / n as f64;
        let to_kn = feasible(w2_to_separated(&rho, n, eps, iv).map(|p| p.value))?;
        t.push(vec![n.into(), eps.into(), to_kn.into(), to_k.into()]);
    }
    Ok(t)
}

/// The suites as a table, their plain-text rendering and the overall verdict.
pub fn selftest(seed: u64) -> (Table, String, bool) {
    let report = run_selftest(seed);
    let mut t = Table::new(&["suite", "passed", "detail"]);
    for line in &report.lines {
        t.push(vec![line.name.into(), line.passed.into(), Cell::Text(line.detail.clone())]);
        t.uncertified += usize::from(!line.passed);
    }
    t.extra.insert("seed".into(), Value::from(seed));
    (t, report.render(), report.passed())
}
