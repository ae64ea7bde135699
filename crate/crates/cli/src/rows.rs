//! Per-row result records and their aggregation.

use serde::Serialize;
use swipt_core::conic::SolveStatus;
use swipt_core::SwiptError;

/// A CSV record that can be grouped and averaged over trials.
pub trait Record: Serialize + Send {
    /// Columns identifying a group of trials in the aggregate file.
    const KEY_COLUMNS: &'static [&'static str];
    /// Numeric columns averaged over the successful rows of a group.
    const METRIC_COLUMNS: &'static [&'static str];

    fn key(&self) -> Vec<String>;
    fn metrics(&self) -> Vec<Option<f64>>;
    fn succeeded(&self) -> bool;
}

pub fn status_label(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::NumericalLimit => "numerical-limit",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
    }
}

pub fn error_label(err: &SwiptError) -> &'static str {
    match err {
        SwiptError::Infeasible(_) | SwiptError::Solver(SolveStatus::Infeasible) => "infeasible",
        _ => "error",
    }
}

fn is_success(status: &str) -> bool {
    matches!(status, "optimal" | "numerical-limit")
}

/// One weight vector of an energy-efficiency sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoopRow {
    pub trial: u64,
    pub n_tx: usize,
    pub w_ir_ee: f64,
    pub w_eh_ee: f64,
    pub w_power: f64,
    pub scheme: String,
    pub status: String,
    /// Information-receiver energy efficiency in bit/J.
    pub ir_ee_bit_per_joule: Option<f64>,
    /// Harvested power per consumed watt.
    pub eh_ee: Option<f64>,
    pub p_tx_w: Option<f64>,
    pub rate_bps_hz: Option<f64>,
    pub harvested_w: Option<f64>,
    /// Scalarized objective of the returned allocation.
    pub tau: Option<f64>,
    /// `lambda_2 / lambda_1` of the relaxed information covariance.
    pub rank_ratio: Option<f64>,
    /// Frobenius norm of the returned energy covariance.
    pub energy_norm: Option<f64>,
    /// Same for the covariance returned by the relaxation.
    pub relaxed_energy_norm: Option<f64>,
    pub message: String,
}

impl Record for MoopRow {
    const KEY_COLUMNS: &'static [&'static str] = &["n_tx", "w_ir_ee", "w_eh_ee", "w_power", "scheme"];
    const METRIC_COLUMNS: &'static [&'static str] =
        &["ir_ee_bit_per_joule", "eh_ee", "p_tx_w", "rate_bps_hz", "harvested_w", "tau", "rank_ratio"];

    fn key(&self) -> Vec<String> {
        vec![self.n_tx.to_string(), self.w_ir_ee.to_string(), self.w_eh_ee.to_string(), self.w_power.to_string(), self.scheme.clone()]
    }

    fn metrics(&self) -> Vec<Option<f64>> {
        vec![self.ir_ee_bit_per_joule, self.eh_ee, self.p_tx_w, self.rate_bps_hz, self.harvested_w, self.tau, self.rank_ratio]
    }

    fn succeeded(&self) -> bool {
        is_success(&self.status)
    }
}

/// One scheme at one SINR target of the secure sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecureRow {
    pub trial: u64,
    pub n_tx: usize,
    pub gamma_db: f64,
    pub scheme: String,
    pub status: String,
    pub p_tx_w: Option<f64>,
    /// `sum_k Tr W_k`.
    pub signal_power_w: Option<f64>,
    /// `Tr V`.
    pub an_power_w: Option<f64>,
    /// Smallest secrecy rate over desired users.
    pub secrecy_min_bps_hz: Option<f64>,
    pub secrecy_mean_bps_hz: Option<f64>,
    /// Power harvested by all desired and roaming receivers.
    pub harvested_total_w: Option<f64>,
    pub max_rank_ratio: Option<f64>,
    /// Largest relative SINR back-off applied to pass re-verification.
    pub max_sinr_margin: Option<f64>,
    pub reconstruction: String,
    /// Constraint families that failed re-verification, separated by `;`.
    pub violations: String,
    pub message: String,
}

impl Record for SecureRow {
    const KEY_COLUMNS: &'static [&'static str] = &["n_tx", "gamma_db", "scheme"];
    const METRIC_COLUMNS: &'static [&'static str] =
        &["p_tx_w", "signal_power_w", "an_power_w", "secrecy_min_bps_hz", "secrecy_mean_bps_hz", "harvested_total_w", "max_rank_ratio"];

    fn key(&self) -> Vec<String> {
        vec![self.n_tx.to_string(), self.gamma_db.to_string(), self.scheme.clone()]
    }

    fn metrics(&self) -> Vec<Option<f64>> {
        vec![
            self.p_tx_w,
            self.signal_power_w,
            self.an_power_w,
            self.secrecy_min_bps_hz,
            self.secrecy_mean_bps_hz,
            self.harvested_total_w,
            self.max_rank_ratio,
        ]
    }

    fn succeeded(&self) -> bool {
        is_success(&self.status)
    }
}

/// One check of the solver self-test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestRow {
    pub group: String,
    pub case: String,
    /// `pass` or `fail`.
    pub status: String,
    /// Measured quantity compared against `threshold`.
    pub value: Option<f64>,
    pub threshold: f64,
    pub detail: String,
}

impl SelftestRow {
    pub fn new(group: &str, case: impl Into<String>, value: Option<f64>, threshold: f64, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            group: group.to_string(),
            case: case.into(),
            status: if pass { "pass" } else { "fail" }.to_string(),
            value,
            threshold,
            detail: detail.into(),
        }
    }
}

impl Record for SelftestRow {
    const KEY_COLUMNS: &'static [&'static str] = &["group"];
    const METRIC_COLUMNS: &'static [&'static str] = &["value"];

    fn key(&self) -> Vec<String> {
        vec![self.group.clone()]
    }

    fn metrics(&self) -> Vec<Option<f64>> {
        vec![self.value]
    }

    fn succeeded(&self) -> bool {
        self.status == "pass"
    }
}

/// Mean of each metric over the successful rows of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub key: Vec<String>,
    pub rows: usize,
    pub succeeded: usize,
    pub means: Vec<Option<f64>>,
}

/// Groups in order of first appearance.
pub fn aggregate<R: Record>(rows: &[R]) -> Vec<Aggregate> {
    let mut groups: Vec<(Aggregate, Vec<(f64, usize)>)> = Vec::new();
    for row in rows {
        let key = row.key();
        let idx = match groups.iter().position(|(g, _)| g.key == key) {
            Some(i) => i,
            None => {
                groups.push((Aggregate { key, rows: 0, succeeded: 0, means: Vec::new() }, vec![(0.0, 0); R::METRIC_COLUMNS.len()]));
                groups.len() - 1
            }
        };
        let (agg, sums) = &mut groups[idx];
        agg.rows += 1;
        if row.succeeded() {
            agg.succeeded += 1;
            for (slot, value) in sums.iter_mut().zip(row.metrics()) {
                if let Some(v) = value.filter(|v| v.is_finite()) {
                    slot.0 += v;
                    slot.1 += 1;
                }
            }
        }
    }
    groups
        .into_iter()
        .map(|(mut agg, sums)| {
            agg.means = sums.iter().map(|&(s, n)| (n > 0).then(|| s / n as f64)).collect();
            agg
        })
        .collect()
}
