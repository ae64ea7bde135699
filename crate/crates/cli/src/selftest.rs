//! Solver self-test: analytic and planted conic programs, rank checks of
//! both relaxations and closed-form cross-checks.

use rayon::prelude::*;
use swipt_core::conic::battery::{analytic_cases, certificate_residual, planted_instance, Expected};
use swipt_core::conic::{kkt_residuals, solve, ConicProblem, SolveStatus, SolverConfig};
use swipt_core::moop::{ehee_closed_form, solve_ehee_max_sdp, solve_weighted_minmax, MoopAnchors, WeightVector};
use swipt_core::secure::{solve_secure, verify_secure};
use swipt_core::sysmodel::{SecureChannels, SecureParams, SepChannels};

use crate::config::ExperimentConfig;
use crate::experiments::{moop_config, secure_config};
use crate::rows::{status_label, SelftestRow};

/// Largest duality gap and residual accepted from a solve.
pub const KKT_TOL: f64 = 1e-7;
/// Largest relative objective error on programs with known optima.
pub const ORACLE_TOL: f64 = 1e-6;
pub const RANK_TOL: f64 = 1e-6;
pub const CLOSED_FORM_TOL: f64 = 1e-4;
pub const PLANTED_CASES: u64 = 50;
pub const STRUCTURE_CASES: u64 = 20;

fn solver_config(cfg: &ExperimentConfig) -> SolverConfig {
    let mut sc = SolverConfig::default();
    if let Some(tol) = cfg.gap_tol {
        sc.gap_tol = tol;
    }
    sc
}

fn check_program(group: &str, name: String, problem: &ConicProblem, expected: Expected, sc: &SolverConfig) -> SelftestRow {
    let sol = match solve(problem, sc) {
        Ok(s) => s,
        Err(e) => return SelftestRow::new(group, name, None, ORACLE_TOL, false, e.to_string()),
    };
    if sol.status != expected.status() {
        let detail = format!("status {} expected {}", status_label(sol.status), status_label(expected.status()));
        return SelftestRow::new(group, name, None, ORACLE_TOL, false, detail);
    }
    match expected {
        Expected::Optimal(value) => {
            let err = (sol.primal_objective - value).abs() / value.abs().max(1.0);
            let kkt = kkt_residuals(problem, &sol);
            let worst_kkt = kkt.gap.max(kkt.primal_res).max(kkt.dual_res);
            let pass = err <= ORACLE_TOL && worst_kkt <= KKT_TOL;
            let detail = format!("objective {:.12e} oracle {value:.12e} kkt {worst_kkt:.3e}", sol.primal_objective);
            SelftestRow::new(group, name, Some(err), ORACLE_TOL, pass, detail)
        }
        _ => {
            let r = certificate_residual(problem, &sol).unwrap_or(f64::INFINITY);
            SelftestRow::new(group, name, Some(r), ORACLE_TOL, r <= ORACLE_TOL, "certificate residual")
        }
    }
}

/// Run every check; rows come back in a fixed order.
pub fn run_selftest(cfg: &ExperimentConfig) -> anyhow::Result<Vec<SelftestRow>> {
    let sc = solver_config(cfg);
    let default_gap = SolverConfig::default().gap_tol;
    let mut rows = vec![SelftestRow::new(
        "tolerance",
        "solver gap tolerance",
        Some(sc.gap_tol),
        default_gap,
        sc.gap_tol <= default_gap,
        if sc.gap_tol <= default_gap { "default or tighter" } else { "loosened gap tolerance" },
    )];
    for case in analytic_cases() {
        rows.push(check_program("analytic", case.name.clone(), &case.problem, case.expected, &sc));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    pool.install(|| {
        let planted: Vec<SelftestRow> = (0..PLANTED_CASES)
            .into_par_iter()
            .map(|i| {
                let (p, value) = planted_instance(cfg.seed.wrapping_mul(1_000_003).wrapping_add(i));
                check_program("planted", format!("instance {i}"), &p, Expected::Optimal(value), &sc)
            })
            .collect();
        rows.extend(planted);
        let mc = moop_config(cfg);
        let system = cfg.system_with(cfg.system.n_tx);
        let moop: Vec<SelftestRow> = (0..STRUCTURE_CASES)
            .into_par_iter()
            .flat_map_iter(|t| {
                let name = format!("realization {t}");
                let run = || -> swipt_core::Result<(f64, f64, f64)> {
                    let ch = SepChannels::generate(&system, cfg.seed, t)?;
                    let anchors = MoopAnchors::compute(&ch, &system, &mc)?;
                    let w = WeightVector::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)?;
                    let alloc = solve_weighted_minmax(w, &ch, &system, &anchors, &mc)?;
                    let sdp = solve_ehee_max_sdp(&ch, &system, &mc)?;
                    let (_, closed) = ehee_closed_form(&ch, &system)?;
                    let closed_err = (sdp.objectives.eh_ee - closed).abs() / closed;
                    Ok((alloc.info_rank_ratio(), closed_err, alloc.w_energy.norm()))
                };
                match run() {
                    Ok((ratio, closed_err, energy)) => vec![
                        SelftestRow::new(
                            "moop-rank",
                            name.clone(),
                            Some(ratio),
                            RANK_TOL,
                            ratio <= RANK_TOL,
                            format!("energy covariance norm {energy:.3e}"),
                        ),
                        SelftestRow::new(
                            "closed-form",
                            name,
                            Some(closed_err),
                            CLOSED_FORM_TOL,
                            closed_err <= CLOSED_FORM_TOL,
                            "EH-EE relaxation vs closed form",
                        ),
                    ],
                    Err(e) => vec![
                        SelftestRow::new("moop-rank", name.clone(), None, RANK_TOL, false, e.to_string()),
                        SelftestRow::new("closed-form", name, None, CLOSED_FORM_TOL, false, e.to_string()),
                    ],
                }
            })
            .collect();
        rows.extend(moop.iter().filter(|r| r.group == "moop-rank").cloned());
        rows.extend(moop.into_iter().filter(|r| r.group == "closed-form"));
        let secure_params = SecureParams::table_3_1(5);
        let scfg = secure_config(cfg);
        let secure: Vec<SelftestRow> = (0..STRUCTURE_CASES)
            .into_par_iter()
            .map(|t| {
                let name = format!("realization {t}");
                let run = || -> swipt_core::Result<(f64, Vec<&'static str>, SolveStatus)> {
                    let ch = SecureChannels::generate(&secure_params, cfg.seed, t)?;
                    let alloc = solve_secure(&ch, &secure_params, &scfg)?;
                    let report = verify_secure(&alloc, &ch, &secure_params)?;
                    Ok((report.max_rank_ratio, report.violations(scfg.verify_tol), alloc.status))
                };
                match run() {
                    Ok((ratio, violations, status)) => {
                        let pass = ratio <= RANK_TOL && violations.is_empty();
                        let detail = format!("{} violations [{}]", status_label(status), violations.join(";"));
                        SelftestRow::new("secure-rank", name, Some(ratio), RANK_TOL, pass, detail)
                    }
                    Err(e) => SelftestRow::new("secure-rank", name, None, RANK_TOL, false, e.to_string()),
                }
            })
            .collect();
        rows.extend(secure);
    });
    Ok(rows)
}

/// Largest rank ratio over the rank-check rows.
pub fn max_rank_ratio(rows: &[SelftestRow]) -> Option<f64> {
    rows.iter().filter(|r| r.group.ends_with("-rank")).filter_map(|r| r.value).fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}
