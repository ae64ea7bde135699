//! Secure power minimization with artificial noise and power-splitting receivers.

mod sdp;
mod verify;


use num_complex::Complex64;

use crate::conic::{solve, ConicSolution, SolveStatus, SolverConfig};
use crate::error::{invalid, Result, SwiptError};
use crate::linalg::{hermitian_eigen_desc, hermitian_unembed, outer, quad_form, trace_re, CMatrix, CVector};
use crate::metrics::{secure_qos, SecureQoS};
use crate::moop::rank_one_extract;
use crate::sysmodel::{SecureChannels, SecureParams};

pub use sdp::{build_secure_sdp, eavesdrop_scale, ConstraintSummary, Scaling, SecureSdp, RHO_MARGIN};
pub use verify::{eavesdrop_leakage, lmi_eav_rate, verify_parts, verify_secure, SecureReport};

use sdp::{assemble, check_instance, Beam, Split};

/// Solver and acceptance tolerances of the secure allocator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecureConfig {
    pub solver: SolverConfig,
    /// Gap and residuals up to which a stalled solve is still accepted.
    pub accept_tol: f64,
    /// Relative tolerance of the constraint recomputation after reconstruction.
    pub verify_tol: f64,
}

impl Default for SecureConfig {
    fn default() -> Self {
        Self {
            // the SINR rows cancel large interference terms, so the residuals
            // must be tighter than the verification tolerance
            solver: SolverConfig::default().with_gap_tol(1e-9).with_feas_tol(1e-9),
            accept_tol: 1e-6,
            verify_tol: 1e-6,
        }
    }
}

/// Allocation strategy that produced a [`SecureAllocation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Relaxed program followed by rank-one reconstruction.
    Optimal,
    /// Zero-forcing directions with optimized splitting ratios.
    ZeroForcing,
    /// Zero-forcing directions with every splitting ratio fixed to one half.
    ZeroForcingEqualSplit,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Optimal => "optimal",
            Scheme::ZeroForcing => "baseline1",
            Scheme::ZeroForcingEqualSplit => "baseline2",
        }
    }
}

/// How the user covariances were made rank one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reconstruction {
    /// The relaxed covariances were projected onto their user's channel.
    Projection,
    /// The projection introduced a violation and the beam directions were re-optimized.
    Fallback,
    /// The program already had rank-one covariances by construction.
    Direct,
}

/// Multipliers of the scalar constraints, in units matching watts.
#[derive(Debug, Clone, PartialEq)]
pub struct SecureDuals {
    /// SINR constraints, one per desired user.
    pub sinr: Vec<f64>,
    /// Harvesting constraints of desired users; `None` without a requirement.
    pub harvest: Vec<Option<f64>>,
    /// Harvesting constraints of roaming receivers.
    pub roaming: Vec<Option<f64>>,
}

/// Solution of the relaxed program mapped back to physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedSecure {
    pub w: Vec<CMatrix>,
    pub v: CMatrix,
    pub rho: Vec<f64>,
    pub duals: SecureDuals,
    pub status: SolveStatus,
    pub p_tx: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecureAllocation {
    pub scheme: Scheme,
    /// Transmit covariance of each desired user's stream.
    pub w: Vec<CMatrix>,
    /// Principal beam of each covariance.
    pub beams: Vec<CVector>,
    /// Artificial-noise covariance.
    pub v: CMatrix,
    pub rho: Vec<f64>,
    /// `sum_k Tr W_k + Tr V`.
    pub p_tx: f64,
    /// Objective of the program before reconstruction.
    pub relaxed_p_tx: f64,
    pub qos: SecureQoS,
    pub duals: Option<SecureDuals>,
    /// `lambda_2 / lambda_1` of each relaxed covariance.
    pub relaxed_rank_ratios: Vec<f64>,
    /// `lambda_2 / lambda_1` of each returned covariance.
    pub rank_ratios: Vec<f64>,
    pub reconstruction: Reconstruction,
    pub status: SolveStatus,
    /// Relative increase of each SINR target used by the final solve, zero
    /// unless re-verification asked for a back-off.
    pub sinr_margins: Vec<f64>,
}

impl SecureAllocation {
    pub fn noise_power(&self) -> f64 {
        trace_re(&self.v)
    }
}

/// Zero-forcing baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZfScheme {
    /// Optimized splitting ratios.
    AdaptiveSplit,
    /// Splitting ratios fixed to one half.
    EqualSplit,
}

impl ZfScheme {
    /// Scheme by its baseline number, 1 or 2.
    pub fn from_index(index: u8) -> Result<Self> {
        match index {
            1 => Ok(ZfScheme::AdaptiveSplit),
            2 => Ok(ZfScheme::EqualSplit),
            _ => Err(invalid("scheme", format!("unknown baseline {index}"))),
        }
    }
}

fn total_power(w: &[CMatrix], v: &CMatrix) -> f64 {
    w.iter().map(trace_re).sum::<f64>() + trace_re(v)
}

/// Rejects instances where some user misses its SINR target even when the
/// whole transmit budget is beamed to it without interference.
pub fn feasibility_precheck(ch: &SecureChannels, params: &SecureParams) -> Result<()> {
    check_instance(ch, params)?;
    let Some(budget) = params.p_max_w else {
        return Ok(());
    };
    for (k, h) in ch.h.iter().enumerate() {
        let best = budget * h.norm_squared() / (params.sigma_ant_w + params.sigma_s_w);
        if best < params.gamma_req[k] {
            return Err(SwiptError::Infeasible(format!(
                "user {k} reaches SINR {best:.3e} at most within the budget, below its target {:.3e}",
                params.gamma_req[k]
            )));
        }
    }
    Ok(())
}

fn infeasibility_certificate(sdp: &SecureSdp, sol: &ConicSolution) -> String {
    let scale = sol.duals.iter().fold(0.0f64, |acc, y| acc.max(y.abs()));
    let mut weights: Vec<(String, f64)> = Vec::new();
    for (label, y) in sdp.row_labels.iter().zip(&sol.duals) {
        let share = if scale > 0.0 { y.abs() / scale } else { 0.0 };
        match weights.iter_mut().find(|(l, _)| l == label) {
            Some(entry) => entry.1 = entry.1.max(share),
            None => weights.push((label.clone(), share)),
        }
    }
    weights.sort_by(|a, b| b.1.total_cmp(&a.1));
    let parts: Vec<String> = weights.iter().take(4).filter(|(_, w)| *w > 1e-6).map(|(l, w)| format!("{l} ({w:.2})")).collect();
    format!("Farkas certificate concentrated on: {}", parts.join(", "))
}

fn solve_program(sdp: &SecureSdp, cfg: &SecureConfig) -> Result<ConicSolution> {
    let sol = solve(&sdp.problem, &cfg.solver)?;
    match sol.status {
        SolveStatus::Optimal => Ok(sol),
        SolveStatus::NumericalLimit
            if sol.gap <= cfg.accept_tol && sol.primal_residual <= cfg.accept_tol && sol.dual_residual <= cfg.accept_tol =>
        {
            Ok(sol)
        }
        SolveStatus::Infeasible => Err(SwiptError::Infeasible(infeasibility_certificate(sdp, &sol))),
        status => Err(SwiptError::Solver(status)),
    }
}

fn extract(sdp: &SecureSdp, sol: &ConicSolution, params: &SecureParams) -> Result<RelaxedSecure> {
    let unit = sdp.scaling.unit_w;
    let to_watts = Complex64::new(unit, 0.0);
    let w = sdp
        .beams
        .iter()
        .map(|beam| match beam {
            Beam::Free(x) => Ok(hermitian_unembed(sol.block(*x))? * to_watts),
            Beam::Fixed { power, dir } => Ok(outer(dir) * Complex64::new(unit * sol.value(*power).max(0.0), 0.0)),
        })
        .collect::<Result<Vec<_>>>()?;
    let v = hermitian_unembed(sol.block(sdp.noise))? * to_watts;
    let rho = match sdp.split {
        Split::Free => sdp.rho.iter().map(|r| sol.value(*r)).collect(),
        Split::Fixed(value) => vec![value; params.k_desired],
    };
    // rows were divided by sigma_s^2 and the objective by the power unit
    let dual_scale = unit / params.sigma_s_w;
    let duals = SecureDuals {
        sinr: sdp.sinr_rows.iter().map(|c| sol.dual(*c) * dual_scale).collect(),
        harvest: sdp.harvest_rows.iter().map(|c| c.map(|c| sol.dual(c) * dual_scale)).collect(),
        roaming: sdp.roaming_rows.iter().map(|c| c.map(|c| sol.dual(c) * dual_scale)).collect(),
    };
    let p_tx = total_power(&w, &v);
    Ok(RelaxedSecure { w, v, rho, duals, status: sol.status, p_tx })
}

/// Solves the relaxed program without reconstruction.
pub fn solve_relaxed(ch: &SecureChannels, params: &SecureParams, cfg: &SecureConfig) -> Result<RelaxedSecure> {
    let sdp = build_secure_sdp(ch, params)?;
    let sol = solve_program(&sdp, cfg)?;
    extract(&sdp, &sol, params)
}

/// Projects each user covariance onto its own channel and moves the
/// remainder into the artificial noise:
/// `W'_k = W_k h_k h_k^H W_k / (h_k^H W_k h_k)` and `V' = V + sum_k (W_k - W'_k)`.
///
/// The total covariance and every desired-user quadratic form are unchanged,
/// `W'_k` is dominated by `W_k` and `V'` dominates `V`.
pub fn project_rank_one(w: &[CMatrix], v: &CMatrix, ch: &SecureChannels) -> Result<(Vec<CMatrix>, CMatrix)> {
    if w.len() != ch.h.len() {
        return Err(SwiptError::Dimension(format!("{} covariances for {} users", w.len(), ch.h.len())));
    }
    let mut projected = Vec::with_capacity(w.len());
    let mut noise = v.clone();
    for (k, (wk, h)) in w.iter().zip(&ch.h).enumerate() {
        let wh = wk * h;
        let gain = quad_form(h, wk);
        if !(gain > 1e-14 * trace_re(wk).max(f64::MIN_POSITIVE) * h.norm_squared()) {
            return Err(SwiptError::Degenerate(format!("covariance of user {k} carries no power toward its channel")));
        }
        let pk = &wh * wh.adjoint() * Complex64::new(gain.recip(), 0.0);
        let pk = (&pk + pk.adjoint()) * Complex64::new(0.5, 0.0);
        noise += wk - &pk;
        projected.push(pk);
    }
    let noise = (&noise + noise.adjoint()) * Complex64::new(0.5, 0.0);
    Ok((projected, noise))
}

fn unit_direction(m: &CMatrix) -> Result<CVector> {
    let (beam, _) = rank_one_extract(m);
    let norm = beam.norm();
    if !(norm > 0.0) {
        return Err(SwiptError::Degenerate("covariance has no principal direction".into()));
    }
    Ok(beam / Complex64::new(norm, 0.0))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    scheme: Scheme,
    w: Vec<CMatrix>,
    v: CMatrix,
    rho: Vec<f64>,
    relaxed: &RelaxedSecure,
    reconstruction: Reconstruction,
    ch: &SecureChannels,
    params: &SecureParams,
) -> Result<SecureAllocation> {
    let qos = secure_qos(ch, &w, &v, &rho.iter().map(|r| r.clamp(0.0, 1.0)).collect::<Vec<_>>(), params)?;
    let extracted: Vec<(CVector, f64)> = w.iter().map(rank_one_extract).collect();
    Ok(SecureAllocation {
        scheme,
        beams: extracted.iter().map(|(b, _)| b.clone()).collect(),
        rank_ratios: extracted.iter().map(|(_, r)| *r).collect(),
        relaxed_rank_ratios: relaxed.w.iter().map(|m| rank_one_extract(m).1).collect(),
        p_tx: total_power(&w, &v),
        relaxed_p_tx: relaxed.p_tx,
        w,
        v,
        rho,
        qos,
        duals: Some(relaxed.duals.clone()),
        reconstruction,
        status: relaxed.status,
        sinr_margins: vec![0.0; params.k_desired],
    })
}

/// Most re-solves with raised SINR targets.
const BACKOFF_ROUNDS: usize = 4;

/// Runs `attempt` and, while some user misses its SINR target when recomputed
/// from the raw channels, re-runs it with that target raised by twice the
/// observed relative shortfall.
///
/// Strong users must cancel interference from beams sized for much weaker
/// users, so their SINR rows are only as accurate as the solver residual
/// times that gain ratio.
fn with_sinr_backoff(
    params: &SecureParams,
    cfg: &SecureConfig,
    attempt: impl Fn(&SecureParams) -> Result<SecureAllocation>,
) -> Result<SecureAllocation> {
    let mut alloc = attempt(params)?;
    let mut margins = vec![0.0; params.k_desired];
    for _ in 0..BACKOFF_ROUNDS {
        let shortfalls: Vec<f64> = alloc.qos.sinr.iter().zip(&params.gamma_req).map(|(s, g)| 1.0 - s / g).collect();
        if shortfalls.iter().all(|s| *s <= 0.5 * cfg.verify_tol) {
            break;
        }
        let next: Vec<f64> =
            margins.iter().zip(&shortfalls).map(|(m, s)| if *s > 0.5 * cfg.verify_tol { m + 2.0 * s } else { *m }).collect();
        let raised = SecureParams { gamma_req: params.gamma_req.iter().zip(&next).map(|(g, m)| g * (1.0 + m)).collect(), ..params.clone() };
        match attempt(&raised) {
            Ok(a) => {
                alloc = a;
                margins = next;
            }
            Err(_) => break,
        }
    }
    alloc.sinr_margins = margins;
    Ok(alloc)
}

/// Rank-one allocation from a relaxed solution: the projection of
/// [`project_rank_one`], or, when the projection violates a constraint that the
/// relaxed point met, a re-solve with the beam directions fixed to the principal eigenvectors of the projection.
pub fn rank_one_reconstruct(
    relaxed: &RelaxedSecure,
    ch: &SecureChannels,
    params: &SecureParams,
    cfg: &SecureConfig,
) -> Result<SecureAllocation> {
    let (w, v) = project_rank_one(&relaxed.w, &relaxed.v, ch)?;
    let report = verify_parts(ch, &w, &v, &relaxed.rho, params)?;
    // violations inherited from the relaxed point are left to the SINR back-off
    let inherited = verify_parts(ch, &relaxed.w, &relaxed.v, &relaxed.rho, params)?.violations(cfg.verify_tol);
    if report.violations(cfg.verify_tol).iter().all(|v| inherited.contains(v)) {
        return finish(Scheme::Optimal, w, v, relaxed.rho.clone(), relaxed, Reconstruction::Projection, ch, params);
    }
    let dirs = w.iter().map(unit_direction).collect::<Result<Vec<_>>>()?;
    let sdp = assemble(ch, params, Some(&dirs), Split::Free)?;
    let sol = solve_program(&sdp, cfg)?;
    let fixed = extract(&sdp, &sol, params)?;
    let alloc = finish(Scheme::Optimal, fixed.w.clone(), fixed.v.clone(), fixed.rho.clone(), &fixed, Reconstruction::Fallback, ch, params)?;
    Ok(SecureAllocation {
        relaxed_p_tx: relaxed.p_tx,
        relaxed_rank_ratios: relaxed.w.iter().map(|m| rank_one_extract(m).1).collect(),
        ..alloc
    })
}

/// Minimum-power allocation meeting every SINR, secrecy and harvesting requirement.
pub fn solve_secure(ch: &SecureChannels, params: &SecureParams, cfg: &SecureConfig) -> Result<SecureAllocation> {
    feasibility_precheck(ch, params)?;
    with_sinr_backoff(params, cfg, |p| {
        let relaxed = solve_relaxed(ch, p, cfg)?;
        rank_one_reconstruct(&relaxed, ch, p, cfg)
    })
}

/// Splitting ratio that minimizes the Lagrangian for given SINR and
/// harvesting multipliers:
/// `sqrt(alpha sigma_s^2 eta) / (sqrt(alpha sigma_s^2 eta) + sqrt(beta P_req1))`.
pub fn optimal_rho_from_duals(sinr_dual: f64, harvest_dual: f64, k: usize, params: &SecureParams) -> Result<f64> {
    if !(sinr_dual > 0.0) || !(harvest_dual > 0.0) {
        return Err(invalid("duals", "SINR and harvesting multipliers must be positive"));
    }
    let need = *params.p_req1_w.get(k).ok_or_else(|| SwiptError::Dimension(format!("no desired user {k}")))?;
    if !(need > 0.0) {
        return Err(invalid("p_req1_w", "formula needs a positive harvesting requirement"));
    }
    let info = (sinr_dual * params.sigma_s_w * params.eta).sqrt();
    Ok(info / (info + (harvest_dual * need).sqrt()))
}

/// Unit zero-forcing directions: the projection of each user's channel onto
/// the null space of the other users' channels.
pub fn zero_forcing_directions(ch: &SecureChannels) -> Result<Vec<CVector>> {
    let (k_n, n) = (ch.h.len(), ch.n_tx());
    if k_n > n {
        return Err(invalid("k_desired", format!("{k_n} users leave no null space with {n} antennas")));
    }
    let mut dirs = Vec::with_capacity(k_n);
    for k in 0..k_n {
        let mut gram = CMatrix::zeros(n, n);
        for (j, h) in ch.h.iter().enumerate() {
            if j != k {
                gram += outer(h);
            }
        }
        let (values, vectors) = hermitian_eigen_desc(&gram);
        let top = values.first().copied().unwrap_or(0.0).max(0.0);
        let mut dir = CVector::zeros(n);
        for (i, &lambda) in values.iter().enumerate() {
            if lambda <= 1e-12 * top {
                let u = vectors.column(i);
                dir += u * u.dotc(&ch.h[k]);
            }
        }
        let norm = dir.norm();
        if !(norm > 1e-12 * ch.h[k].norm()) {
            return Err(SwiptError::Degenerate(format!("channel of user {k} lies in the span of the others")));
        }
        dirs.push(dir / Complex64::new(norm, 0.0));
    }
    Ok(dirs)
}

/// Zero-forcing information beams with optimized powers and artificial noise.
pub fn baseline_zf(ch: &SecureChannels, params: &SecureParams, scheme: ZfScheme, cfg: &SecureConfig) -> Result<SecureAllocation> {
    feasibility_precheck(ch, params)?;
    let dirs = zero_forcing_directions(ch)?;
    let (split, label) = match scheme {
        ZfScheme::AdaptiveSplit => (Split::Free, Scheme::ZeroForcing),
        ZfScheme::EqualSplit => (Split::Fixed(0.5), Scheme::ZeroForcingEqualSplit),
    };
    with_sinr_backoff(params, cfg, |p| {
        let sdp = assemble(ch, p, Some(&dirs), split)?;
        let sol = solve_program(&sdp, cfg)?;
        let relaxed = extract(&sdp, &sol, p)?;
        finish(label, relaxed.w.clone(), relaxed.v.clone(), relaxed.rho.clone(), &relaxed, Reconstruction::Direct, ch, p)
    })
}
