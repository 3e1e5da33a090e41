use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mmot",
    version,
    about = "Multi-marginal optimal transport with repulsive costs",
    long_about = "Relaxed and exact multi-marginal transport costs on finite supports, grand-canonical \
                  dual functionals, mean-field energies, radial minimizers and packing bounds.\n\n\
                  Exit status: 0 on success, 1 on invalid input or usage, 2 on numerical failure, \
                  infeasibility, refusal, or uncertified results under --require-certified."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every randomized routine.
    #[arg(long, global = true, env = "MMOT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel scans (defaults to the number of cores).
    #[arg(long, global = true, env = "MMOT_JOBS")]
    pub jobs: Option<usize>,
    /// Output format.
    #[arg(long, global = true, env = "MMOT_FORMAT", value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the output to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Exit with status 2 when any reported value is not certified.
    #[arg(long, global = true)]
    pub require_certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Shared syntax help for list-valued flags.
const LIST_HELP: &str = "Comma list (`2,3,5`) or range `a:b` (integers) / `a:b:n` (n evenly spaced reals)";

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact N-marginal cost C_N(ρ) of a discrete probability measure.
    ///
    /// Solves the symmetric linear program over plans with all N particles on
    /// the support of ρ. Prints one row per N.
    Mmot(CostArgs),
    /// Relaxed cost C̄_N(ρ) of a discrete sub-probability, with its stratification.
    ///
    /// The optimal plan is decomposed as ρ = Σ_K (K/N) a_K ρ_K; the output
    /// reports the smallest and largest active K and whether the optimum is
    /// degenerate. Costs with ℓ(0) = +∞ forbid two particles on one site.
    Relax(CostArgs),
    /// Grand-canonical dual M_N(v) = sup over configurations of at most N particles.
    ///
    /// The potential lives on a grid augmented by a point at infinity. Small
    /// instances are enumerated exhaustively (certified), larger ones by a
    /// multistart ascent (uncertified).
    Dual(DualArgs),
    /// Mean-field dual M_∞(λv) on a grid, one row per λ.
    Minfty(MinftyArgs),
    /// Minimizer of D_2(ρ) − λ⟨v, ρ⟩ over sub-probabilities on a grid.
    ///
    /// Reports the mass, the optimal value, the multiplier c_λ and the
    /// residual of the optimality conditions. Results are certified only for
    /// positive semi-definite interaction matrices.
    Energy(EnergyArgs),
    /// Radial Coulomb minimizers in dimension 3 for a radial potential.
    ///
    /// For each λ, computes the mass, the support radius r_λ, the multiplier
    /// c_λ and M_∞(λV), compared with the closed form when one is known.
    Radial(RadialArgs),
    /// Packing numbers, weighted packings and Wasserstein projections.
    #[command(subcommand)]
    Packing(PackingCommand),
    /// Scan of K_min/N and K_max/N for C̄_N(θρ) over a grid of (N, θ).
    Sweep(SweepArgs),
    /// Run the built-in consistency suites and print one line per suite.
    Selftest,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    /// Discrete measure as JSON: {"dim": d, "points": [[..], ..], "masses": [..]}.
    #[arg(long, value_name = "PATH")]
    pub measure: PathBuf,
    /// Cost name (coulomb, hard-sphere, exponential:a, riesz:p, truncated-coulomb:h,
    /// two-level:l0,l1,cutoff) or a JSON file {"kind": .., "params": ..}.
    #[arg(long)]
    pub cost: String,
    #[arg(long = "N", value_name = "LIST", help = format!("Particle numbers. {LIST_HELP}"))]
    pub n: String,
}

#[derive(Debug, Args)]
pub struct DualArgs {
    /// Potential on a grid as JSON: {"grid": {"dim": d, "nodes": [[..], ..]}, "values": [..]}.
    #[arg(long, value_name = "PATH")]
    pub potential: PathBuf,
    /// Cost name or JSON file, as for `relax`.
    #[arg(long)]
    pub cost: String,
    #[arg(long = "N", value_name = "LIST", help = format!("Particle numbers. {LIST_HELP}"))]
    pub n: String,
}

#[derive(Debug, Args)]
pub struct MinftyArgs {
    /// Potential on a grid, as for `dual`.
    #[arg(long, value_name = "PATH")]
    pub potential: PathBuf,
    #[arg(long)]
    pub cost: String,
    #[arg(long, value_name = "LIST", default_value = "1", help = format!("Scalings t of the potential. {LIST_HELP}"))]
    pub lambda: String,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    /// Potential on a grid, as for `dual`.
    #[arg(long, value_name = "PATH")]
    pub potential: PathBuf,
    /// Cost name or JSON file; it must be finite on the grid, diagonal included.
    #[arg(long)]
    pub cost: String,
    #[arg(long, value_name = "LIST", help = format!("Coupling constants λ. {LIST_HELP}"))]
    pub lambda: String,
}

#[derive(Debug, Args)]
pub struct RadialArgs {
    /// Built-in potential (v1, v2, v3, v4) or a JSON file {"radii": [..], "values": [..]}.
    #[arg(long)]
    pub potential: String,
    #[arg(long, value_name = "LIST", help = format!("Coupling constants λ. {LIST_HELP}"))]
    pub lambda: String,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Discrete measure, as for `relax`.
    #[arg(long, value_name = "PATH")]
    pub measure: PathBuf,
    #[arg(long)]
    pub cost: String,
    #[arg(long = "N", value_name = "LIST", help = format!("Particle numbers. {LIST_HELP}"))]
    pub n: String,
    #[arg(long, value_name = "LIST", help = format!("Mass scalings θ. {LIST_HELP}"))]
    pub theta: String,
}

#[derive(Debug, Subcommand)]
pub enum PackingCommand {
    /// Maximal number of ε-separated points in a union of boxes.
    ///
    /// Exact in dimension 1. In dimension 2 the output brackets the count
    /// between a constructed configuration and a proven upper bound.
    Count(CountArgs),
    /// Packing constant γ_d estimated from unit-separated points in cubes [0, k]^d.
    Gamma(GammaArgs),
    /// Weighted packing F_N*(v) on an interval with ε_N = κ/N, against the
    /// limit (γ_1/κ) ∫ v.
    Dual(PackDualArgs),
    /// W_2 distance from a measure on a line to N-point configurations with
    /// gaps κ/N, and to densities bounded by 1/κ.
    W2(W2Args),
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// A box: `a,b` in dimension 1 or `x0,y0,x1,y1` in dimension 2. Repeat for unions.
    #[arg(long = "box", value_name = "BOX", required = true)]
    pub boxes: Vec<String>,
    #[arg(long, value_name = "LIST", help = format!("Separation distances ε. {LIST_HELP}"))]
    pub eps: String,
    /// Count points anywhere in the closure, or centers of balls contained in the domain.
    #[arg(long, value_enum, default_value_t = ModeArg::Points)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Points,
    Balls,
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, value_name = "LIST", default_value = "4,8,16,32", help = format!("Cube sides k. {LIST_HELP}"))]
    pub k: String,
}

#[derive(Debug, Args)]
pub struct PackDualArgs {
    /// Weight on the interval: one, linear, quadratic, or a JSON file
    /// {"xs": [..], "values": [..]} interpolated linearly.
    #[arg(long, default_value = "one")]
    pub potential: String,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long = "N", value_name = "LIST", help = format!("Particle numbers. {LIST_HELP}"))]
    pub n: String,
    /// Interval `a,b`.
    #[arg(long, default_value = "0,1")]
    pub interval: String,
    /// Candidate grid step is ε_N divided by this factor.
    #[arg(long, default_value_t = 4)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct W2Args {
    /// Probability on the line as JSON {"atoms": [[x, m], ..], "segments": [[a, b, density], ..]},
    /// or `uniform` for the uniform law on the interval.
    #[arg(long, default_value = "uniform")]
    pub measure: String,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long = "N", value_name = "LIST", help = format!("Particle numbers. {LIST_HELP}"))]
    pub n: String,
    /// Interval `a,b`.
    #[arg(long, default_value = "0,1")]
    pub interval: String,
    /// Quantile cells for the density-bound projection.
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
}
