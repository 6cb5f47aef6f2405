use anyhow::{Context, Result};
use mindisk_core::io::{write_multigraph_csv, write_separation_csv};
use mindisk_core::multigraph::separation;
use mindisk_core::solver::{
    convergence_order, max_principle_excess, AnnularDomain, BoundaryData, ExactSolution, OrderEstimate, Problem,
};
use mindisk_core::Error;
use serde::Serialize;

use super::Outcome;
use crate::config::{Boundary, RunConfig};
use crate::failure::Usage;
use crate::output::OutputDir;

#[derive(Serialize)]
struct NonConvergenceReport {
    converged: bool,
    iterations: usize,
    last_residual: f64,
    residual_history: Vec<f64>,
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    converged: bool,
    boundary_reproduced: bool,
    residual_monotone: bool,
    max_principle_excess: f64,
    #[serde(flatten)]
    report: &'a mindisk_core::solver::SolveReport,
}

fn exact(cfg: &RunConfig) -> Result<ExactSolution> {
    Ok(match cfg.boundary {
        Boundary::Constant => ExactSolution::Constant(cfg.constant),
        Boundary::Theta => ExactSolution::Theta,
        Boundary::Arccosh => ExactSolution::Arccosh,
        Boundary::PerturbedHelicoid => {
            return Err(Usage::new("--convergence needs an exact solution: constant, theta or arccosh").into())
        }
    })
}

pub fn problem(cfg: &RunConfig) -> Result<Problem> {
    if let Some(path) = &cfg.problem {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading problem {}", path.display())).map_err(Usage::wrap)?;
        let p: Problem =
            serde_json::from_str(&text).map_err(|e| Usage::new(format!("malformed problem {}: {e}", path.display())))?;
        p.domain.validate()?;
        p.boundary.validate(&p.domain)?;
        return Ok(p);
    }
    let domain = AnnularDomain::new(cfg.rin, cfg.rout, cfg.sheets, cfg.grid[0], cfg.grid[1] * cfg.sheets)?;
    let r_out = cfg.rout;
    let boundary = match cfg.boundary {
        Boundary::PerturbedHelicoid => {
            let amp = cfg.perturbation;
            BoundaryData::from_fn(&domain, |r, t| if r == r_out { t + amp * t.cos() } else { t })?
        }
        _ => {
            let e = exact(cfg)?;
            BoundaryData::from_fn(&domain, |r, t| e.eval(r, t))?
        }
    };
    Ok(Problem { domain, boundary, config: cfg.solver })
}

pub fn run(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome> {
    if cfg.convergence {
        let study = convergence_order(exact(cfg)?, cfg.rin, cfg.rout, cfg.sheets, &cfg.resolutions, &cfg.solver)?;
        out.write_json("convergence.json", &study)?;
        match study.order {
            OrderEstimate::Exact => println!("order: exact (max errors {:?})", study.max_errors),
            OrderEstimate::Slope(s) => println!("order: {s:.4} (pairwise {:?})", study.pairwise_orders),
        }
        return Ok(Outcome::ok());
    }
    let p = problem(cfg)?;
    match p.solve() {
        Ok((g, report)) => {
            out.write("solution.csv", |w| write_multigraph_csv(&g, w))?;
            if g.sheets() >= 2 {
                let prof = separation(&g)?;
                out.write("separation.csv", |w| write_separation_csv(&prof, w))?;
            }
            let summary = SolveSummary {
                converged: true,
                boundary_reproduced: p.boundary.reproduced_by(&g),
                residual_monotone: report.is_monotone(),
                max_principle_excess: max_principle_excess(&g),
                report: &report,
            };
            out.write_json("report.json", &summary)?;
            println!("converged in {} Newton steps, residual {:e}", report.iterations, report.final_max_residual);
            Ok(Outcome::ok())
        }
        Err(Error::NonConvergence { iterations, last_residual, history }) => {
            let r = NonConvergenceReport { converged: false, iterations, last_residual, residual_history: history };
            out.write_json("report.json", &r)?;
            eprintln!("error: Newton iteration did not converge after {iterations} iterations (last residual {last_residual:e})");
            Ok(Outcome::non_convergence())
        }
        Err(e) => Err(e.into()),
    }
}
