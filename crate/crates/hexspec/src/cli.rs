//! Argument parsing and subcommand dispatch.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hexspec_core::dynamics::{fit_holder_constant, irrational_cover, lyapunov, CocycleConfig};
use hexspec_core::graph::{butterfly_fluxes, GraphContext};
use hexspec_core::jacobi::rational_spectrum;
use hexspec_core::loops::{double_hexagon_state, verify_vertex_conditions, StateBranch};
use hexspec_core::qlambda::q_spectrum;
use hexspec_core::{BandList, Flux, HillSolver};
use rayon::prelude::*;
use serde::Serialize;

use crate::artifacts::{self, BandsJson, DirichletSidecar};
use crate::format::g15;
use crate::{parse_potential, verify, Failure};

/// Environment variable that overrides `--threads`.
pub const THREADS_ENV: &str = "HEXSPEC_THREADS";

/// Largest violation accepted by `loopstate` before it reports failure.
pub const LOOPSTATE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "hexspec", version, about = "Spectra of the hexagonal quantum graph in a constant magnetic field")]
pub struct Cli {
    /// Worker threads; HEXSPEC_THREADS takes precedence when set.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Operator {
    /// The graph Hamiltonian, pulled back into Hill bands.
    Graph,
    /// The reduced Jacobi operator.
    Jacobi,
    /// The tight-binding operator `Q`.
    Q,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Band structure at a rational flux.
    Bands {
        #[arg(long, default_value = "zero")]
        potential: String,
        /// Flux `Phi / 2 pi` as "p/q" or a finite decimal.
        #[arg(long)]
        flux: String,
        #[arg(long, default_value_t = 1)]
        hill_bands: usize,
        #[arg(long, value_enum, default_value_t = Operator::Graph)]
        operator: Operator,
        #[command(flatten)]
        out: Output,
    },
    /// Graph bands over all reduced fluxes with denominator up to `qmax`.
    Butterfly {
        #[arg(long, default_value = "zero")]
        potential: String,
        #[arg(long, default_value_t = 50)]
        qmax: u64,
        #[arg(long, default_value_t = 5)]
        hill_bands: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Lyapunov exponent of the Jacobi cocycle on an energy grid.
    Lyapunov {
        #[arg(long, default_value = "golden")]
        flux: String,
        /// Explicit energies; overrides the grid.
        #[arg(long, allow_negative_numbers = true, value_delimiter = ',')]
        lambda: Vec<f64>,
        #[arg(long, allow_negative_numbers = true, default_value_t = -4.0)]
        from: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 7.0)]
        to: f64,
        #[arg(long, default_value_t = 45)]
        points: usize,
        #[arg(long, default_value_t = 1 << 14)]
        max_n: usize,
        #[arg(long, default_value_t = 64)]
        theta_samples: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Cover of the spectrum at irrational flux from a convergent.
    Cover {
        #[arg(long, default_value = "golden")]
        flux: String,
        /// Convergent index, 1-based.
        #[arg(long, default_value_t = 5)]
        level: usize,
        /// Hölder constant; fitted from `fit_levels` convergents when omitted.
        #[arg(long)]
        holder_constant: Option<f64>,
        #[arg(long, default_value_t = 5)]
        fit_levels: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Compactly supported eigenstate on two adjacent hexagons.
    Loopstate {
        #[arg(long, default_value = "zero")]
        potential: String,
        /// Flux per hexagon in radians.
        #[arg(long, allow_negative_numbers = true)]
        phi: f64,
        /// Which Dirichlet eigenvalue, 1-based.
        #[arg(long, default_value_t = 1)]
        lambda_index: usize,
        /// Lattice cell of the lower hexagon as "g1,g2".
        #[arg(long, allow_negative_numbers = true, default_value = "0,0")]
        gamma: String,
        #[command(flatten)]
        out: Output,
    },
    /// Runs the invariant suite and reports one line per check.
    Verify,
}

/// Parses the command line and runs it; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}

pub fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    let from_env = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
        ),
        _ => None,
    };
    match from_env.or(flag) {
        Some(0) => Err(Failure::Usage("thread count must be positive".into())),
        n => Ok(n),
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let threads = resolve_threads(cli.threads)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Domain(anyhow::anyhow!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Bands {
            potential,
            flux,
            hill_bands,
            operator,
            out,
        } => bands(&potential, &flux, hill_bands, operator, &out),
        Command::Butterfly {
            potential,
            qmax,
            hill_bands,
            out,
        } => butterfly(&potential, qmax, hill_bands, &out),
        Command::Lyapunov {
            flux,
            lambda,
            from,
            to,
            points,
            max_n,
            theta_samples,
            out,
        } => {
            let energies = if lambda.is_empty() {
                grid(from, to, points)?
            } else {
                lambda
            };
            lyapunov_scan(&flux, &energies, max_n, theta_samples, &out)
        }
        Command::Cover {
            flux,
            level,
            holder_constant,
            fit_levels,
            out,
        } => cover(&flux, level, holder_constant, fit_levels, &out),
        Command::Loopstate {
            potential,
            phi,
            lambda_index,
            gamma,
            out,
        } => loopstate(&potential, phi, lambda_index, &gamma, &out),
        Command::Verify => {
            let results = verify::run_suite();
            let mut stdout = std::io::stdout().lock();
            for r in &results {
                let _ = writeln!(stdout, "{r}");
            }
            let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Verification(failed.join(", ")))
            }
        }
    }
}

fn grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>, Failure> {
    if !(from.is_finite() && to.is_finite()) || points == 0 {
        return Err(Failure::Usage("energy grid needs finite bounds and at least one point".into()));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    Ok((0..points)
        .map(|i| from + (to - from) * i as f64 / (points - 1) as f64)
        .collect())
}

fn parse_flux(s: &str) -> Result<Flux, Failure> {
    Flux::parse(s).map_err(|e| Failure::Usage(format!("flux {s:?}: {e}")))
}

fn rational(flux: &Flux, what: &str) -> Result<(u64, u64), Failure> {
    flux.as_rational()
        .ok_or_else(|| Failure::Usage(format!("{what} needs a rational flux")))
}

fn format_or(out: &Output, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = out.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::Usage(format!("format {f:?} is not available for this subcommand")))
    }
}

fn check_output_dir(path: &Path) -> Result<(), Failure> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(Failure::Usage(format!(
            "output directory {} does not exist",
            dir.display()
        ))),
        _ => Ok(()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            check_output_dir(path)?;
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .context("writing to stdout")?;
        }
    }
    Ok(())
}

fn graph_context(potential: &str, hill_bands: usize) -> Result<GraphContext, Failure> {
    if hill_bands == 0 {
        return Err(Failure::Usage("--hill-bands must be at least 1".into()));
    }
    let spec = parse_potential(potential)?;
    let solver = HillSolver::with_default_steps(&spec)?;
    Ok(GraphContext::new(solver, hill_bands)?)
}

#[derive(Serialize)]
struct GraphBandsJson {
    p: u64,
    q: u64,
    operator: &'static str,
    potential: String,
    hill_bands: Vec<[f64; 2]>,
    dirac_points: Vec<f64>,
    dirichlet: Vec<f64>,
    bands: Vec<[f64; 2]>,
    measure: f64,
}

fn bands(potential: &str, flux: &str, hill_bands: usize, operator: Operator, out: &Output) -> Result<(), Failure> {
    let (p, q) = rational(&parse_flux(flux)?, "bands")?;
    let format = format_or(out, Format::Json, &[Format::Json, Format::Csv])?;
    let text = match operator {
        Operator::Jacobi | Operator::Q => {
            let sigma = rational_spectrum(p, q)?;
            let (bands, tag) = match operator {
                Operator::Jacobi => (sigma, None),
                _ => (q_spectrum(&sigma)?.bands, Some("Q")),
            };
            match format {
                Format::Csv => interval_csv(p, q, None, &bands),
                _ => artifacts::to_json(&BandsJson::new(p, q, tag, &bands)),
            }
        }
        Operator::Graph => {
            let ctx = graph_context(potential, hill_bands)?;
            let spectra = ctx.graph_spectrum(p, q)?;
            match format {
                Format::Csv => {
                    let mut s = String::from(artifacts::BUTTERFLY_HEADER);
                    s.push('\n');
                    for g in &spectra {
                        s.push_str(&interval_csv(p, q, Some(g.hill_band_index), &g.continuous_bands));
                    }
                    s
                }
                _ => {
                    let all: BandList = spectra
                        .iter()
                        .flat_map(|g| g.continuous_bands.intervals().iter().copied())
                        .collect();
                    artifacts::to_json(&GraphBandsJson {
                        p,
                        q,
                        operator: "H",
                        potential: ctx.solver().potential().descriptor(),
                        hill_bands: ctx.hill_bands().iter().map(|b| [b.alpha, b.beta]).collect(),
                        dirac_points: ctx.dirac_points().to_vec(),
                        dirichlet: spectra.iter().flat_map(|g| g.dirichlet_points.iter().copied()).collect(),
                        bands: artifacts::pairs(&all),
                        measure: all.measure(),
                    })
                }
            }
        }
    };
    emit(out.output.as_deref(), &text)
}

fn interval_csv(p: u64, q: u64, hill_band: Option<usize>, bands: &BandList) -> String {
    let mut s = String::new();
    if hill_band.is_none() {
        s.push_str("p,q,lo,hi\n");
    }
    for b in bands.iter() {
        match hill_band {
            Some(k) => s.push_str(&format!("{p},{q},{k},{},{}\n", g15(b.lo), g15(b.hi))),
            None => s.push_str(&format!("{p},{q},{},{}\n", g15(b.lo), g15(b.hi))),
        }
    }
    s
}

/// Computes the butterfly with columns spread over the worker pool and
/// reassembled in flux order.
pub fn butterfly_dataset(ctx: &GraphContext, qmax: u64) -> Result<hexspec_core::graph::ButterflyDataset, Failure> {
    let columns = butterfly_fluxes(qmax)
        .into_par_iter()
        .map(|(p, q)| ctx.column(p, q))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ctx.dataset(columns))
}

fn butterfly(potential: &str, qmax: u64, hill_bands: usize, out: &Output) -> Result<(), Failure> {
    if qmax == 0 {
        return Err(Failure::Usage("--qmax must be at least 1".into()));
    }
    let format = format_or(out, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let ctx = graph_context(potential, hill_bands)?;
    let data = butterfly_dataset(&ctx, qmax)?;
    match format {
        Format::Csv => {
            emit(out.output.as_deref(), &artifacts::butterfly_csv(&data))?;
            if let Some(path) = &out.output {
                let side = artifacts::sidecar_path(path);
                emit(Some(&side), &artifacts::to_json(&DirichletSidecar::new(&data)))?;
            }
            Ok(())
        }
        Format::Svg => emit(out.output.as_deref(), &artifacts::butterfly_svg(&data)),
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                p: u64,
                q: u64,
                hill_band: usize,
                lo: f64,
                hi: f64,
            }
            #[derive(Serialize)]
            struct Doc {
                #[serde(flatten)]
                meta: DirichletSidecar,
                rows: Vec<Row>,
            }
            let doc = Doc {
                meta: DirichletSidecar::new(&data),
                rows: data
                    .rows
                    .iter()
                    .map(|r| Row {
                        p: r.p,
                        q: r.q,
                        hill_band: r.hill_band,
                        lo: r.lo,
                        hi: r.hi,
                    })
                    .collect(),
            };
            emit(out.output.as_deref(), &artifacts::to_json(&doc))
        }
    }
}

fn lyapunov_scan(flux: &str, energies: &[f64], max_n: usize, theta_samples: usize, out: &Output) -> Result<(), Failure> {
    format_or(out, Format::Csv, &[Format::Csv])?;
    let config = CocycleConfig::new(&parse_flux(flux)?)
        .with_max_n(max_n)
        .with_theta_samples(theta_samples);
    config
        .validate()
        .map_err(|e| Failure::Usage(format!("cocycle settings: {e}")))?;
    let estimates = energies
        .par_iter()
        .map(|&l| lyapunov(l, &config))
        .collect::<Result<Vec<_>, _>>()?;
    let mut s = String::from("lambda,L,converged\n");
    for (l, e) in energies.iter().zip(&estimates) {
        s.push_str(&format!("{},{},{}\n", g15(*l), g15(e.value), e.converged));
    }
    emit(out.output.as_deref(), &s)
}

#[derive(Serialize)]
struct CoverJson {
    p: u64,
    q: u64,
    operator: &'static str,
    bands: Vec<[f64; 2]>,
    measure: f64,
    alpha: f64,
    level: usize,
    holder_constant: f64,
    holder_constant_fitted: bool,
    radius: f64,
    bound: f64,
}

fn cover(flux: &str, level: usize, holder_constant: Option<f64>, fit_levels: usize, out: &Output) -> Result<(), Failure> {
    format_or(out, Format::Json, &[Format::Json])?;
    let flux = parse_flux(flux)?;
    if flux.as_rational().is_some() {
        return Err(Failure::Usage("cover needs an irrational flux such as \"golden\"".into()));
    }
    if level == 0 {
        return Err(Failure::Usage("--level is 1-based".into()));
    }
    let (c2, fitted) = match holder_constant {
        Some(c) => (c, false),
        None => {
            if fit_levels < 2 {
                return Err(Failure::Usage("--fit-levels must be at least 2".into()));
            }
            (fit_holder_constant(&flux, fit_levels)?, true)
        }
    };
    let c = irrational_cover(&flux, level, c2)?;
    let doc = CoverJson {
        p: c.p_n,
        q: c.q_n,
        operator: "cover",
        bands: artifacts::pairs(&c.intervals),
        measure: c.measure(),
        alpha: flux.alpha(),
        level,
        holder_constant: c.holder_constant,
        holder_constant_fitted: fitted,
        radius: c.radius,
        bound: c.bound,
    };
    emit(out.output.as_deref(), &artifacts::to_json(&doc))
}

#[derive(Serialize)]
struct LoopStateJson {
    potential: String,
    phi: f64,
    lambda_index: usize,
    lambda: f64,
    gamma: [i64; 2],
    branch: &'static str,
    outer: Vec<[f64; 2]>,
    slicing: [f64; 2],
    residual: f64,
    vertices: usize,
    max_violation: f64,
}

fn parse_gamma(s: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::Usage(format!("--gamma expects \"g1,g2\", got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn loopstate(potential: &str, phi: f64, lambda_index: usize, gamma: &str, out: &Output) -> Result<(), Failure> {
    format_or(out, Format::Json, &[Format::Json])?;
    if !phi.is_finite() {
        return Err(Failure::Usage("--phi must be finite".into()));
    }
    if lambda_index == 0 {
        return Err(Failure::Usage("--lambda-index is 1-based".into()));
    }
    let gamma = parse_gamma(gamma)?;
    let spec = parse_potential(potential)?;
    let solver = HillSolver::with_default_steps(&spec)?;
    let lambda = solver.first_dirichlet_eigenvalues(lambda_index)?[lambda_index - 1];
    let state = double_hexagon_state(&solver, phi, lambda, gamma)?;
    let report = verify_vertex_conditions(&solver, &state, phi)?;
    let c = |z: num_complex::Complex64| [z.re, z.im];
    let doc = LoopStateJson {
        potential: spec.descriptor(),
        phi,
        lambda_index,
        lambda,
        gamma: [gamma.0, gamma.1],
        branch: match state.branch {
            StateBranch::Kernel => "kernel",
            StateBranch::Solved => "solved",
        },
        outer: state.outer.iter().copied().map(c).collect(),
        slicing: c(state.slicing),
        residual: state.residual,
        vertices: report.vertices,
        max_violation: report.max_violation(),
    };
    emit(out.output.as_deref(), &artifacts::to_json(&doc))?;
    if report.passes(LOOPSTATE_TOLERANCE) {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "vertex conditions violated by {:.3e} (phi = {phi}, lambda = {lambda})",
            report.max_violation()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        assert_eq!(grid(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(grid(2.0, 5.0, 1).unwrap(), vec![2.0]);
        assert!(grid(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn gamma_parsing() {
        assert_eq!(parse_gamma("3,-2").unwrap(), (3, -2));
        assert!(parse_gamma("3").is_err());
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(main_with_args(["hexspec", "bands", "--flux", "x/y"]), 1);
        assert_eq!(main_with_args(["hexspec", "frobnicate"]), 1);
        assert_eq!(main_with_args(["hexspec", "bands", "--flux", "golden"]), 1);
    }
}
