//! Recomputation of every constraint of a secure allocation from raw channels.

use nalgebra::Cholesky;
use num_complex::Complex64;

use super::sdp::eavesdrop_scale;
use super::SecureAllocation;
use crate::error::{Result, SwiptError};
use crate::linalg::{hermitian_eigen_desc, CMatrix};
use crate::metrics::{eav_rate_upper, eavesdropper_interference, harvested_desired, harvested_roaming, secure_qos, sinr_k};
use crate::moop::rank_one_extract;
use crate::sysmodel::{SecureChannels, SecureParams};

/// Worst normalized violation of each constraint family; nonpositive values
/// mean the family holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecureReport {
    /// `max_k (gamma_k - SINR_k) / gamma_k`.
    pub sinr_shortfall: f64,
    /// `max (lambda_max(Q^{-1/2} G^H W_k G Q^{-1/2}) - (psi - 1)) / (psi - 1)`.
    pub lmi_excess: f64,
    /// Largest exact log-det eavesdropping rate minus its tolerance, in bit/s/Hz.
    pub eav_rate_excess: f64,
    /// `max_k (P_req1 - E_k) / P_req1` over users with a positive requirement.
    pub harvest_shortfall: f64,
    /// Same for roaming receivers.
    pub roaming_shortfall: f64,
    /// Distance of the splitting ratios outside `[0, 1]`.
    pub rho_excess: f64,
    /// Most negative eigenvalue of any covariance relative to the transmit power.
    pub psd_violation: f64,
    /// `max_k (log2(1 + gamma_k) - max_m r_max - secrecy_k)` in bit/s/Hz.
    pub secrecy_shortfall: f64,
    /// Largest `lambda_2 / lambda_1` over the user covariances.
    pub max_rank_ratio: f64,
}

impl SecureReport {
    /// Names of the constraint families violated by more than `tol`.
    pub fn violations(&self, tol: f64) -> Vec<&'static str> {
        let checks = [
            ("sinr", self.sinr_shortfall),
            ("eavesdropping lmi", self.lmi_excess),
            ("eavesdropping rate", self.eav_rate_excess),
            ("desired harvesting", self.harvest_shortfall),
            ("roaming harvesting", self.roaming_shortfall),
            ("splitting ratio", self.rho_excess),
            ("positive semidefinite", self.psd_violation),
            ("secrecy rate", self.secrecy_shortfall),
        ];
        checks.iter().filter(|(_, v)| !(*v <= tol)).map(|(name, _)| *name).collect()
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        self.violations(tol).is_empty()
    }
}

/// Largest eigenvalue of `Q^{-1/2} G_m^H W_k G_m Q^{-1/2}` where `Q` is the
/// full noise-plus-interference covariance of roaming receiver `m`.
pub fn eavesdrop_leakage(ch: &SecureChannels, w: &[CMatrix], v: &CMatrix, m: usize, k: usize, params: &SecureParams) -> Result<f64> {
    let g = &ch.g[m];
    let n_rx = g.ncols();
    let q = eavesdropper_interference(ch, w, v, m, k, params) + CMatrix::identity(n_rx, n_rx) * Complex64::new(params.sigma_s_w, 0.0);
    let chol = Cholesky::new(q).ok_or_else(|| SwiptError::Degenerate("eavesdropper noise covariance".into()))?;
    let l = chol.l();
    let s = g.adjoint() * &w[k] * g;
    let half = l.solve_lower_triangular(&s).ok_or_else(|| SwiptError::Degenerate("singular noise factor".into()))?;
    let whitened = l.solve_lower_triangular(&half.adjoint()).ok_or_else(|| SwiptError::Degenerate("singular noise factor".into()))?;
    let sym = (&whitened + whitened.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(hermitian_eigen_desc(&sym).0[0])
}

/// Eavesdropping rate implied by the LMI form, `log2(1 + leakage)`. It equals
/// the log-det rate whenever `W_k` has rank one.
pub fn lmi_eav_rate(ch: &SecureChannels, w: &[CMatrix], v: &CMatrix, m: usize, k: usize, params: &SecureParams) -> Result<f64> {
    Ok((1.0 + eavesdrop_leakage(ch, w, v, m, k, params)?.max(0.0)).log2())
}

fn min_eig(m: &CMatrix) -> f64 {
    hermitian_eigen_desc(m).0.last().copied().unwrap_or(0.0)
}

/// Check a candidate `(W, V, rho)` against every constraint.
pub fn verify_parts(ch: &SecureChannels, w: &[CMatrix], v: &CMatrix, rho: &[f64], params: &SecureParams) -> Result<SecureReport> {
    let (k_n, m_n) = (params.k_desired, params.m_roaming);
    let mut report = SecureReport {
        sinr_shortfall: f64::NEG_INFINITY,
        lmi_excess: f64::NEG_INFINITY,
        eav_rate_excess: f64::NEG_INFINITY,
        harvest_shortfall: f64::NEG_INFINITY,
        roaming_shortfall: f64::NEG_INFINITY,
        rho_excess: 0.0,
        psd_violation: 0.0,
        secrecy_shortfall: f64::NEG_INFINITY,
        max_rank_ratio: 0.0,
    };
    for &r in rho {
        report.rho_excess = report.rho_excess.max(-r).max(r - 1.0);
    }
    let clipped: Vec<f64> = rho.iter().map(|r| r.clamp(0.0, 1.0)).collect();
    let p_tx: f64 = w.iter().chain(std::iter::once(v)).map(crate::linalg::trace_re).sum();
    for m in w.iter().chain(std::iter::once(v)) {
        report.psd_violation = report.psd_violation.max(-min_eig(m) / p_tx.max(f64::MIN_POSITIVE));
    }
    for wk in w {
        report.max_rank_ratio = report.max_rank_ratio.max(rank_one_extract(wk).1);
    }
    for k in 0..k_n {
        let sinr = sinr_k(ch, w, v, clipped[k], k, params)?;
        report.sinr_shortfall = report.sinr_shortfall.max((params.gamma_req[k] - sinr) / params.gamma_req[k]);
        let need = params.p_req1_w[k];
        if need > 0.0 {
            let got = harvested_desired(ch, w, v, clipped[k], k, params)?;
            report.harvest_shortfall = report.harvest_shortfall.max((need - got) / need);
        }
    }
    for m in 0..m_n {
        for k in 0..k_n {
            let scale = eavesdrop_scale(params, m, k)?;
            let leak = eavesdrop_leakage(ch, w, v, m, k, params)?;
            report.lmi_excess = report.lmi_excess.max((leak - scale) / scale);
            let rate = eav_rate_upper(ch, w, v, m, k, params)?;
            report.eav_rate_excess = report.eav_rate_excess.max(rate - params.r_max[m][k]);
        }
        let need = params.p_req2_w[m];
        if need > 0.0 {
            let got = harvested_roaming(ch, w, v, 0.0, m, params)?;
            report.roaming_shortfall = report.roaming_shortfall.max((need - got) / need);
        }
    }
    let qos = secure_qos(ch, w, v, &clipped, params)?;
    for k in 0..k_n {
        let worst_tolerance = (0..m_n).map(|m| params.r_max[m][k]).fold(0.0, f64::max);
        let floor = (1.0 + params.gamma_req[k]).log2() - worst_tolerance;
        report.secrecy_shortfall = report.secrecy_shortfall.max(floor - qos.secrecy[k]);
    }
    Ok(report)
}

/// Check an allocation against every constraint, recomputed from raw channels.
pub fn verify_secure(alloc: &SecureAllocation, ch: &SecureChannels, params: &SecureParams) -> Result<SecureReport> {
    verify_parts(ch, &alloc.w, &alloc.v, &alloc.rho, params)
}
