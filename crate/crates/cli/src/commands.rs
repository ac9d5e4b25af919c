use std::path::Path;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use lowform::approx::{
    build_cubature, choose_m, conditional_expectation_cubature, conditional_expectation_exact, l2_error,
    solve_q, split_spectrum, DEFAULT_TAIL_RATIO,
};
use lowform::detection::{detect_exact, detect_randomized, extract_sparse_form, verify_sparse_form, SparseForm};
use lowform::instances::{generate, InstanceSpec};
use lowform::linalg::DenseMatrix;
use lowform::polytope::{reduce_polytope, CutLoopOptions, Polytope, PolytopeDomain};
use lowform::solvers::{
    minimize_ball, minimize_polytope, minimize_sphere, Polyhedron, SolveOptions, SolveStatus, SphereHalf,
};
use lowform::sphere::{lift_minimizer, reduce_sphere};
use lowform::Polynomial;

use crate::io::{ParseFailure, Session};
use crate::{ApproxPath, Command, Half, Method, Preset};

/// Points sampled when checking an extracted form.
const VERIFY_POINTS: usize = 200;

/// Runs one command; `Ok(false)` means a report was written but the solver
/// did not converge.
pub fn run(command: Command, mut session: Session) -> Result<bool> {
    let (report, converged) = match command {
        Command::Detect { input, method, max_k } => {
            let h: Polynomial = session.read_json(&input)?;
            let report = match method {
                Method::Exact => detect_exact(&h, session.rank_tol)?,
                Method::Randomized => {
                    let cap = max_k.unwrap_or(2 * h.num_vars() + 2);
                    detect_randomized(&h, session.seed, session.rank_tol, cap)?
                }
            };
            (serde_json::to_value(report)?, true)
        }
        Command::Extract { input, basis } => {
            let h: Polynomial = session.read_json(&input)?;
            let basis: DenseMatrix = match basis {
                Some(path) => session.read_json(&path)?,
                None => detect_exact(&h, session.rank_tol)?.basis,
            };
            let sf = extract_sparse_form(&h, &basis)?;
            let residual = verify_sparse_form(&h, &sf, VERIFY_POINTS, session.seed)?;
            (json!({ "f": sf.f, "ell": sf.ell, "m": sf.m(), "residual": residual }), true)
        }
        Command::ReduceSphere { sparse } => {
            let sf = read_sparse(&mut session, &sparse)?;
            (serde_json::to_value(reduce_sphere(&sf)?)?, true)
        }
        Command::ReducePolytope {
            sparse,
            a,
            b,
            preset,
            max_iter,
        } => {
            let sf = read_sparse(&mut session, &sparse)?;
            let domain = match (preset, a, b) {
                (Some(Preset::Simplex), None, None) => PolytopeDomain::Simplex { n: sf.n() },
                (Some(Preset::Box), None, None) => PolytopeDomain::Box { n: sf.n() },
                (None, Some(a), Some(b)) => {
                    let a: DenseMatrix = session.read_json(&a)?;
                    let b: Vec<f64> = session.read_json(&b)?;
                    PolytopeDomain::Standard(Polytope::new(a, b)?)
                }
                _ => bail!(ParseFailure("give either --preset or both --A and --b".into())),
            };
            let opts = CutLoopOptions {
                solve: solve_options(&session, 32, 500),
                max_iter,
                ..CutLoopOptions::default()
            };
            let r = reduce_polytope(&sf, &domain, &opts)?;
            let converged = r.status == SolveStatus::Converged;
            (serde_json::to_value(r)?, converged)
        }
        Command::Approx {
            input,
            m,
            path,
            degree,
            samples,
        } => {
            let h: Polynomial = session.read_json(&input)?;
            approx_report(&session, &h, m, path, degree, samples)?
        }
        Command::Solve {
            objective,
            domain,
            half,
            starts,
            max_iter,
        } => {
            let p = match session.read_json::<ObjectiveFile>(&objective)? {
                ObjectiveFile::Reduced { g } => g,
                ObjectiveFile::Plain(p) => p,
            };
            let opts = solve_options(&session, starts, max_iter);
            let result = match domain.as_str() {
                "ball" => minimize_ball(&p, &opts),
                "sphere" => {
                    let half = match half {
                        Half::None => SphereHalf::Full,
                        Half::YNonneg => SphereHalf::LastNonneg,
                        Half::YNonpos => SphereHalf::LastNonpos,
                    };
                    minimize_sphere(&p, &opts, half)
                }
                path => {
                    let region = read_region(&mut session, Path::new(path))?;
                    region.bounding_box()?;
                    minimize_polytope(&p, &region, &opts)?
                }
            };
            let converged = result.status == SolveStatus::Converged;
            (serde_json::to_value(result)?, converged)
        }
        Command::Pipeline {
            input,
            domain,
            residual_threshold,
            tail_threshold,
            m,
            starts,
            samples,
        } => {
            let h: Polynomial = session.read_json(&input)?;
            let domain = parse_domain(&mut session, &domain, h.num_vars())?;
            let thresholds = Thresholds {
                residual: residual_threshold,
                tail: tail_threshold,
            };
            pipeline(&session, &h, &domain, thresholds, m, starts, samples)?
        }
        Command::Gen {
            n,
            m,
            degree,
            epsilon,
            raw_ell,
        } => {
            let spec = InstanceSpec {
                n,
                m,
                degree,
                epsilon,
                seed: session.seed,
                orthonormal: !raw_ell,
            };
            let inst = generate(&spec)?;
            session.write_json("h.json", &inst.h)?;
            let truth = json!({
                "f": inst.truth.f,
                "ell": inst.truth.ell,
                "perturbation": inst.perturbation,
                "epsilon": inst.epsilon,
                "spec": inst.spec,
            });
            session.write_json("truth.json", &truth)?;
            session.write_manifest()?;
            return Ok(true);
        }
    };
    session.write_json("report.json", &report)?;
    session.write_manifest()?;
    Ok(converged)
}

fn solve_options(session: &Session, starts: usize, max_iter: usize) -> SolveOptions {
    SolveOptions {
        starts,
        max_iter,
        tol: session.tol,
        seed: session.seed,
        record_trace: false,
    }
}

fn read_sparse(session: &mut Session, path: &Path) -> Result<SparseForm> {
    let raw: SparseFile = session.read_json(path)?;
    Ok(SparseForm::new(raw.f, raw.ell)?)
}

#[derive(Deserialize)]
struct SparseFile {
    f: Polynomial,
    ell: DenseMatrix,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ObjectiveFile {
    Reduced { g: Polynomial },
    Plain(Polynomial),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RegionFile {
    Cuts {
        cuts: Vec<CutRow>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Standard {
        #[serde(rename = "A")]
        a: DenseMatrix,
        b: Vec<f64>,
    },
}

#[derive(Deserialize)]
struct CutRow {
    u: Vec<f64>,
    rhs: f64,
}

fn read_region(session: &mut Session, path: &Path) -> Result<Polyhedron> {
    Ok(match session.read_json::<RegionFile>(path)? {
        RegionFile::Cuts { cuts, lower, upper } => {
            if lower.len() != upper.len() || cuts.iter().any(|c| c.u.len() != lower.len()) {
                bail!(ParseFailure("cut and bound dimensions disagree".into()));
            }
            let mut p = Polyhedron::free(lower.len()).with_bounds(lower, upper);
            for c in cuts {
                p.add_leq(c.u, c.rhs);
            }
            p.feasible_point()?;
            p
        }
        RegionFile::Standard { a, b } => Polytope::new(a, b)?.polyhedron(),
    })
}

enum Domain {
    Sphere,
    Ball,
    Polytope(PolytopeDomain),
}

fn parse_domain(session: &mut Session, spec: &str, n: usize) -> Result<Domain> {
    Ok(match spec {
        "sphere" => Domain::Sphere,
        "ball" => Domain::Ball,
        "simplex" => Domain::Polytope(PolytopeDomain::Simplex { n }),
        "box" => Domain::Polytope(PolytopeDomain::Box { n }),
        path => match session.read_json::<RegionFile>(Path::new(path))? {
            RegionFile::Standard { a, b } => Domain::Polytope(PolytopeDomain::Standard(Polytope::new(a, b)?)),
            RegionFile::Cuts { .. } => bail!(ParseFailure("pipeline domains must be {A, b} polytopes".into())),
        },
    })
}

fn approx_report(
    session: &Session,
    h: &Polynomial,
    m: Option<usize>,
    path: ApproxPath,
    degree: Option<u32>,
    samples: usize,
) -> Result<(Value, bool)> {
    let n = h.num_vars();
    let m = match m {
        Some(m) => m,
        None => {
            let spectrum = detect_exact(h, session.rank_tol)?.spectrum;
            choose_m(&spectrum, DEFAULT_TAIL_RATIO).clamp(1, n.saturating_sub(1).max(1))
        }
    };
    let split = split_spectrum(h, m)?;
    let fhat = match path {
        ApproxPath::Exact => conditional_expectation_exact(h, &split)?,
        ApproxPath::Cubature => {
            let rule = build_cubature(n - m, degree.unwrap_or(h.degree()), session.seed)?;
            conditional_expectation_cubature(h, &split, &rule)?
        }
    };
    let q = solve_q(&fhat, &solve_options(session, 32, 500))?;
    let err = l2_error(h, &fhat, &split, samples, session.seed)?;
    let converged = q.plus.status == SolveStatus::Converged && q.minus.status == SolveStatus::Converged;
    let report = json!({
        "m": m,
        "fhat": fhat,
        "split": split,
        "rho": q.rho,
        "rho_plus": q.rho_plus,
        "rho_minus": q.rho_minus,
        "point": q.point,
        "l2_error": err,
    });
    Ok((report, converged))
}

#[derive(Clone, Copy)]
struct Thresholds {
    residual: f64,
    tail: f64,
}

#[derive(Serialize)]
struct DetectionSummary {
    m: usize,
    spectrum: Vec<f64>,
    residual: f64,
    tail_ratio: f64,
}

fn pipeline(
    session: &Session,
    h: &Polynomial,
    domain: &Domain,
    thresholds: Thresholds,
    approx_m: Option<usize>,
    starts: usize,
    samples: usize,
) -> Result<(Value, bool)> {
    let n = h.num_vars();
    let opts = solve_options(session, starts, 500);
    let detection = detect_exact(h, session.rank_tol)?;
    let sf = extract_sparse_form(h, &detection.basis)?;
    let residual = verify_sparse_form(h, &sf, VERIFY_POINTS, session.seed)?;
    let total: f64 = detection.spectrum.iter().map(|v| v.max(0.0)).sum();
    let tail: f64 = detection.spectrum[detection.m..].iter().map(|v| v.max(0.0)).sum();
    let tail_ratio = if total > 0.0 { tail / total } else { 0.0 };
    let summary = DetectionSummary {
        m: detection.m,
        spectrum: detection.spectrum.clone(),
        residual,
        tail_ratio,
    };
    let exact = detection.m < n && residual < thresholds.residual && tail_ratio < thresholds.tail;

    let (route, rho, point, status, details) = match (domain, exact) {
        (Domain::Sphere, true) => {
            let prob = reduce_sphere(&sf)?;
            let sol = minimize_ball(&prob.g, &opts);
            let x = lift_minimizer(&prob, &sol.point)?;
            let details = json!({ "g": prob.g, "L": prob.root_gram, "y_star": sol.point });
            ("exact/sphere", sol.value, x, sol.status, details)
        }
        (Domain::Ball, true) => {
            let sol = minimize_ball(&sf.f, &opts);
            let x = sf.ell.matvec(&sol.point)?;
            ("exact/ball", sol.value, x, sol.status, json!({ "f": sf.f, "y_star": sol.point }))
        }
        (Domain::Polytope(p), true) => {
            let cut_opts = CutLoopOptions {
                solve: opts.clone(),
                ..CutLoopOptions::default()
            };
            let r = reduce_polytope(&sf, p, &cut_opts)?;
            let details = json!({
                "X_star": r.reduced_point,
                "cuts": r.cuts,
                "iterations": r.iterations,
                "tau_history": r.tau_history,
            });
            ("exact/polytope", r.rho, r.point, r.status, details)
        }
        (Domain::Polytope(p), false) => {
            let region = p.polyhedron();
            region.bounding_box()?;
            let sol = minimize_polytope(h, &region, &opts)?;
            ("direct/polytope", sol.value, sol.point, sol.status, Value::Null)
        }
        (Domain::Sphere | Domain::Ball, false) if n >= 2 => {
            let (report, converged) = approx_report(session, h, approx_m, ApproxPath::Exact, None, samples)?;
            let status = if converged { SolveStatus::Converged } else { SolveStatus::MaxIter };
            let rho = report["rho"].as_f64().unwrap_or(f64::NAN);
            let point = serde_json::from_value(report["point"].clone())?;
            ("approx", rho, point, status, report)
        }
        (Domain::Sphere, false) => {
            let sol = minimize_sphere(h, &opts, SphereHalf::Full);
            ("direct/sphere", sol.value, sol.point, sol.status, Value::Null)
        }
        (Domain::Ball, false) => {
            let sol = minimize_ball(h, &opts);
            ("direct/ball", sol.value, sol.point, sol.status, Value::Null)
        }
    };
    let report = json!({
        "route": route,
        "n": n,
        "detection": summary,
        "rho": rho,
        "point": point,
        "status": status,
        "details": details,
    });
    Ok((report, status == SolveStatus::Converged))
}
