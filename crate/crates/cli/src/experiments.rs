//! Monte Carlo sweeps. Work items run on a worker pool and their rows are
//! returned in a fixed order that does not depend on scheduling.

use rayon::prelude::*;
use swipt_core::linalg::trace_re;
use swipt_core::metrics::{harvested_sep, rate_sep};
use swipt_core::moop::{
    edge_weights, solve_throughput_minmax, solve_weighted_minmax, sweep_weights, MoopAllocation, MoopAnchors, MoopConfig, WeightVector,
};
use swipt_core::secure::{baseline_zf, solve_secure, verify_secure, SecureAllocation, SecureConfig, ZfScheme};
use swipt_core::sysmodel::{SecureChannels, SepChannels, SystemParams};
use swipt_core::{Result as CoreResult, SwiptError};

use crate::config::ExperimentConfig;
use crate::rows::{error_label, status_label, MoopRow, SecureRow};

pub const OPTIMAL: &str = "optimal";
pub const THROUGHPUT_BASELINE: &str = "throughput-baseline";

pub fn moop_config(cfg: &ExperimentConfig) -> MoopConfig {
    let mut mc = MoopConfig::default();
    if let Some(tol) = cfg.gap_tol {
        mc.solver.gap_tol = tol;
    }
    mc
}

pub fn secure_config(cfg: &ExperimentConfig) -> SecureConfig {
    let mut sc = SecureConfig::default();
    if let Some(tol) = cfg.gap_tol {
        sc.solver.gap_tol = tol;
    }
    sc
}

fn moop_row(
    trial: u64,
    n_tx: usize,
    weights: WeightVector,
    scheme: &str,
    params: &SystemParams,
    result: CoreResult<(&SepChannels, MoopAllocation)>,
) -> MoopRow {
    let [w_ir_ee, w_eh_ee, w_power] = weights.as_array();
    let mut row = MoopRow {
        trial,
        n_tx,
        w_ir_ee,
        w_eh_ee,
        w_power,
        scheme: scheme.to_string(),
        status: String::new(),
        ir_ee_bit_per_joule: None,
        eh_ee: None,
        p_tx_w: None,
        rate_bps_hz: None,
        harvested_w: None,
        tau: None,
        rank_ratio: None,
        energy_norm: None,
        relaxed_energy_norm: None,
        message: String::new(),
    };
    match result {
        Ok((ch, alloc)) => {
            row.status = status_label(alloc.status).to_string();
            row.ir_ee_bit_per_joule = Some(alloc.objectives.ir_ee * params.bandwidth_hz);
            row.eh_ee = Some(alloc.objectives.eh_ee);
            row.p_tx_w = Some(alloc.objectives.p_tx);
            row.rate_bps_hz = Some(rate_sep(&ch.h, &alloc.w_info, params.noise_w));
            row.harvested_w = Some(harvested_sep(&ch.g, &alloc.w_info, &alloc.w_energy, params.eta));
            row.tau = Some(alloc.tau);
            row.rank_ratio = Some(alloc.info_rank_ratio());
            row.energy_norm = Some(alloc.w_energy.norm());
            row.relaxed_energy_norm = Some(alloc.energy_norm());
        }
        Err(e) => {
            row.status = error_label(&e).to_string();
            row.message = e.to_string();
        }
    }
    row
}

fn pool(cfg: &ExperimentConfig) -> anyhow::Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?)
}

struct Realization {
    n_tx: usize,
    trial: u64,
    params: SystemParams,
    channels: CoreResult<(SepChannels, MoopAnchors)>,
}

fn realizations(cfg: &ExperimentConfig, mc: &MoopConfig) -> Vec<Realization> {
    let items: Vec<(usize, u64)> = cfg.antennas.iter().flat_map(|&n| (0..cfg.trials as u64).map(move |t| (n, t))).collect();
    items
        .par_iter()
        .map(|&(n_tx, trial)| {
            let params = cfg.system_with(n_tx);
            let channels =
                SepChannels::generate(&params, cfg.seed, trial).and_then(|ch| MoopAnchors::compute(&ch, &params, mc).map(|a| (ch, a)));
            Realization { n_tx, trial, params, channels }
        })
        .collect()
}

fn moop_sweep(cfg: &ExperimentConfig, weights: &[WeightVector], with_baseline: bool) -> anyhow::Result<Vec<MoopRow>> {
    let mc = moop_config(cfg);
    pool(cfg)?.install(|| {
        let reals = realizations(cfg, &mc);
        let schemes: &[&str] = if with_baseline { &[OPTIMAL, THROUGHPUT_BASELINE] } else { &[OPTIMAL] };
        let items: Vec<(usize, WeightVector, &str)> =
            (0..reals.len()).flat_map(|r| weights.iter().flat_map(move |&w| schemes.iter().map(move |&s| (r, w, s)))).collect();
        Ok(items
            .par_iter()
            .map(|&(r, w, scheme)| {
                let real = &reals[r];
                let result = real.channels.as_ref().map_err(Clone::clone).and_then(|(ch, anchors)| {
                    let alloc = if scheme == OPTIMAL {
                        solve_weighted_minmax(w, ch, &real.params, anchors, &mc)
                    } else {
                        solve_throughput_minmax(w, ch, &real.params, &mc)
                    };
                    alloc.map(|a| (ch, a))
                });
                moop_row(real.trial, real.n_tx, w, scheme, &real.params, result)
            })
            .collect())
    })
}

/// Every weight vector of the simplex grid, for every realization.
pub fn moop_region(cfg: &ExperimentConfig) -> anyhow::Result<Vec<MoopRow>> {
    moop_sweep(cfg, &sweep_weights(cfg.weight_step)?, false)
}

/// Weights on the edge opposite the configured zero-weight objective, with
/// the throughput baseline alongside.
pub fn moop_pairwise(cfg: &ExperimentConfig) -> anyhow::Result<Vec<MoopRow>> {
    let others: Vec<usize> = (0..3).filter(|&j| j != cfg.zero_weight.0).collect();
    moop_sweep(cfg, &edge_weights(others[0], others[1], cfg.weight_step)?, true)
}

/// Allocation schemes compared by the secure sweep, in row order.
pub const SECURE_SCHEMES: [&str; 3] = ["optimal", "baseline1", "baseline2"];

fn secure_row(
    trial: u64,
    n_tx: usize,
    gamma_db: f64,
    scheme: &str,
    result: CoreResult<(SecureAllocation, Vec<&'static str>)>,
) -> SecureRow {
    let mut row = SecureRow {
        trial,
        n_tx,
        gamma_db,
        scheme: scheme.to_string(),
        status: String::new(),
        p_tx_w: None,
        signal_power_w: None,
        an_power_w: None,
        secrecy_min_bps_hz: None,
        secrecy_mean_bps_hz: None,
        harvested_total_w: None,
        max_rank_ratio: None,
        max_sinr_margin: None,
        reconstruction: String::new(),
        violations: String::new(),
        message: String::new(),
    };
    match result {
        Ok((alloc, violations)) => {
            row.status = status_label(alloc.status).to_string();
            row.p_tx_w = Some(alloc.p_tx);
            row.signal_power_w = Some(alloc.w.iter().map(trace_re).sum());
            row.an_power_w = Some(alloc.noise_power());
            row.secrecy_min_bps_hz = Some(alloc.qos.secrecy.iter().copied().fold(f64::INFINITY, f64::min));
            row.secrecy_mean_bps_hz = Some(alloc.qos.mean_secrecy());
            row.harvested_total_w = Some(alloc.qos.total_harvested());
            row.max_rank_ratio = Some(alloc.rank_ratios.iter().copied().fold(0.0, f64::max));
            row.max_sinr_margin = Some(alloc.sinr_margins.iter().copied().fold(0.0, f64::max));
            row.reconstruction = format!("{:?}", alloc.reconstruction).to_lowercase();
            row.violations = violations.join(";");
        }
        Err(e) => {
            row.status = error_label(&e).to_string();
            row.message = e.to_string();
        }
    }
    row
}

fn run_scheme(
    scheme: &str,
    ch: &SecureChannels,
    params: &swipt_core::sysmodel::SecureParams,
    sc: &SecureConfig,
) -> CoreResult<(SecureAllocation, Vec<&'static str>)> {
    let alloc = match scheme {
        "optimal" => solve_secure(ch, params, sc)?,
        "baseline1" => baseline_zf(ch, params, ZfScheme::AdaptiveSplit, sc)?,
        "baseline2" => baseline_zf(ch, params, ZfScheme::EqualSplit, sc)?,
        other => return Err(SwiptError::Degenerate(format!("unknown scheme {other}"))),
    };
    let report = verify_secure(&alloc, ch, params)?;
    let violations = report.violations(sc.verify_tol);
    Ok((alloc, violations))
}

/// Three schemes for every antenna count, SINR target and trial. Smaller
/// arrays use the leading antennas of the largest array's channels.
pub fn secure_sweep(cfg: &ExperimentConfig) -> anyhow::Result<Vec<SecureRow>> {
    let sc = secure_config(cfg);
    let n_max = cfg.max_antennas();
    let base = cfg.secure_with(n_max, cfg.sinr_db[0]);
    pool(cfg)?.install(|| {
        let channels: Vec<CoreResult<SecureChannels>> =
            (0..cfg.trials as u64).into_par_iter().map(|t| SecureChannels::generate(&base, cfg.seed, t)).collect();
        let mut items = Vec::new();
        for &n_tx in &cfg.antennas {
            for &gamma_db in &cfg.sinr_db {
                for trial in 0..cfg.trials as u64 {
                    for scheme in SECURE_SCHEMES {
                        items.push((n_tx, gamma_db, trial, scheme));
                    }
                }
            }
        }
        Ok(items
            .par_iter()
            .map(|&(n_tx, gamma_db, trial, scheme)| {
                let params = cfg.secure_with(n_tx, gamma_db);
                let result = channels[trial as usize]
                    .clone()
                    .and_then(|ch| ch.truncate_antennas(n_tx))
                    .and_then(|ch| run_scheme(scheme, &ch, &params, &sc));
                secure_row(trial, n_tx, gamma_db, scheme, result)
            })
            .collect())
    })
}
