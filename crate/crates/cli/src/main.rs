//! `lowform`: detect, reduce and solve polynomials that depend on a few
//! linear forms. Every command writes `report.json` and `manifest.json`
//! into `--out`.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use io::ParseFailure;

#[derive(Parser)]
#[command(name = "lowform", version, about)]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative eigenvalue threshold for numerical rank.
    #[arg(long, global = true, default_value_t = lowform::DEFAULT_RANK_TOL)]
    rank_tol: f64,
    /// Solver stationarity tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads for parallel sections.
    #[arg(long, env = "LOWFORM_THREADS", global = true, hide_env_values = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Randomized,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Simplex,
    Box,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproxPath {
    Exact,
    Cubature,
}

#[derive(Clone, Copy, ValueEnum)]
enum Half {
    None,
    YNonneg,
    YNonpos,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate m and a basis of the gradient subspace.
    Detect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Sample cap for the randomized method (default 2n + 2).
        #[arg(long)]
        max_k: Option<usize>,
    },
    /// Extract (f, ell) with h(x) = f(ellᵀx).
    Extract {
        #[arg(long)]
        input: PathBuf,
        /// Orthonormal basis (JSON matrix); detected when omitted.
        #[arg(long)]
        basis: Option<PathBuf>,
    },
    /// Reduce sphere minimization of a sparse form to the m-ball.
    ReduceSphere {
        #[arg(long)]
        sparse: PathBuf,
    },
    /// Reduce minimization over {x ≥ 0 : Ax = b}, the simplex or the box.
    ReducePolytope {
        #[arg(long)]
        sparse: PathBuf,
        #[arg(long = "A", alias = "a")]
        a: Option<PathBuf>,
        #[arg(long = "b")]
        b: Option<PathBuf>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long, default_value_t = lowform::polytope::DEFAULT_MAX_CUT_ITERS)]
        max_iter: usize,
    },
    /// Conditional-expectation surrogate and problem Q.
    Approx {
        #[arg(long)]
        input: PathBuf,
        /// Number of retained directions (spectral-gap heuristic when omitted).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum, default_value_t = ApproxPath::Exact)]
        path: ApproxPath,
        /// Cubature degree (default: degree of h).
        #[arg(long)]
        degree: Option<u32>,
        /// Monte Carlo samples for the L2 error.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Minimize a polynomial over the ball, the sphere or a polyhedron.
    Solve {
        #[arg(long)]
        objective: PathBuf,
        /// `ball`, `sphere` or a JSON file with cuts or {A, b}.
        #[arg(long)]
        domain: String,
        #[arg(long, value_enum, default_value_t = Half::None)]
        half: Half,
        #[arg(long, default_value_t = 32)]
        starts: usize,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
    },
    /// Detect, then reduce exactly or approximately, then solve.
    Pipeline {
        #[arg(long)]
        input: PathBuf,
        /// `sphere`, `ball`, `simplex`, `box` or a JSON file with {A, b}.
        #[arg(long)]
        domain: String,
        #[arg(long, default_value_t = 1e-8)]
        residual_threshold: f64,
        #[arg(long, default_value_t = 1e-10)]
        tail_threshold: f64,
        /// Retained directions on the approximate route.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 32)]
        starts: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Generate a random instance h = f₀(ell₀ᵀx) + ε·g₀.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// Keep ell₀ non-orthonormal.
        #[arg(long)]
        raw_ell: bool,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ParseFailure>().is_some() {
        return 2;
    }
    match err.downcast_ref::<lowform::Error>() {
        Some(
            lowform::Error::EmptyPolytope
            | lowform::Error::LpInfeasible
            | lowform::Error::UnboundedPolytope(_)
            | lowform::Error::LpUnbounded,
        ) => 3,
        Some(_) => 1,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let session = io::Session::new(cli.out.clone(), cli.seed, cli.rank_tol, cli.tol);
    match commands::run(cli.command, session) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: solver did not converge; partial report written");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
