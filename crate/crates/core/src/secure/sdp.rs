//! Assembly of the relaxed power-minimization program.
//!
//! Rows are divided by the signal-processing noise power and covariances are
//! measured in units of [`Scaling::unit_w`], the largest power a single
//! user would need on its own.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::conic::{ConicProblem, ConstraintId, LinExpr, PsdVar, Relation, ScalarVar, SymCoef};
use crate::error::{invalid, Result, SwiptError};
use crate::linalg::{complex_embed, CMatrix, CVector};
use crate::sysmodel::{EavesdropperModel, SecureChannels, SecureParams};

/// Smallest distance between a splitting ratio and the ends of `[0, 1]`.
pub const RHO_MARGIN: f64 = 1e-6;

/// Number of constraints of each family in an assembled program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConstraintSummary {
    /// Linearized SINR rows, one per desired user.
    pub sinr: usize,
    /// Eavesdropping LMIs, one per (roaming receiver, desired user).
    pub eavesdrop_lmis: usize,
    /// Harvesting rows of desired users with a positive requirement.
    pub harvest_desired: usize,
    /// Harvesting rows of roaming receivers with a positive requirement.
    pub harvest_roaming: usize,
    /// 2x2 blocks bounding `1 / rho` and `1 / (1 - rho)`.
    pub hyperbolic_blocks: usize,
    /// Boxes keeping each splitting ratio inside the unit interval.
    pub rho_boxes: usize,
    /// Covariance blocks: one per desired user plus the artificial noise.
    pub psd_blocks: usize,
}

/// How the power-splitting ratios enter the program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Split {
    Free,
    Fixed(f64),
}

/// A beamforming covariance: a full PSD block or a nonnegative power along a
/// fixed unit direction.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Beam {
    Free(PsdVar),
    Fixed { power: ScalarVar, dir: CVector },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Re,
    Im,
}

/// Channels normalized for the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaling {
    /// Watts per unit of covariance in the program.
    pub unit_w: f64,
    pub(crate) h: Vec<CVector>,
    pub(crate) g: Vec<CMatrix>,
    g_embed: Vec<DMatrix<f64>>,
    /// Antenna noise relative to the signal-processing noise.
    pub(crate) antenna_noise: f64,
}

impl Scaling {
    fn new(ch: &SecureChannels, params: &SecureParams) -> Result<Self> {
        // power that a lone user would need with a matched beam
        let mut unit_w = 0.0f64;
        for (k, h) in ch.h.iter().enumerate() {
            let gain = h.norm_squared();
            if !(gain > 0.0) || !gain.is_finite() {
                return Err(SwiptError::Degenerate(format!("channel of user {k} vanishes")));
            }
            let need = params.gamma_req[k] * params.sigma_s_w + params.p_req1_w[k] / params.eta;
            unit_w = unit_w.max(need / gain);
        }
        let amp = Complex64::new((unit_w / params.sigma_s_w).sqrt(), 0.0);
        let g: Vec<CMatrix> = ch.g.iter().map(|m| m * amp).collect();
        Ok(Self {
            unit_w,
            h: ch.h.iter().map(|v| v * amp).collect(),
            g_embed: g.iter().map(complex_embed).collect(),
            g,
            antenna_noise: params.sigma_ant_w / params.sigma_s_w,
        })
    }
}

/// Assembled program together with the handles needed to read a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SecureSdp {
    pub problem: ConicProblem,
    pub summary: ConstraintSummary,
    pub scaling: Scaling,
    pub(crate) beams: Vec<Beam>,
    pub(crate) noise: PsdVar,
    pub(crate) rho: Vec<ScalarVar>,
    pub(crate) split: Split,
    pub(crate) sinr_rows: Vec<ConstraintId>,
    pub(crate) harvest_rows: Vec<Option<ConstraintId>>,
    pub(crate) roaming_rows: Vec<Option<ConstraintId>>,
    /// Family name of every row, for infeasibility reports.
    pub(crate) row_labels: Vec<String>,
}

/// `psi - 1 = 2^{r_max} - 1`, the factor scaling the eavesdropper noise in the LMI.
pub fn eavesdrop_scale(params: &SecureParams, m: usize, k: usize) -> Result<f64> {
    let scale = params.psi(m, k) - 1.0;
    if !(scale > 0.0) {
        return Err(invalid("r_max", format!("tolerable rate of receiver {m} for user {k} rounds to zero")));
    }
    Ok(scale)
}

pub(crate) fn check_instance(ch: &SecureChannels, params: &SecureParams) -> Result<()> {
    params.validate()?;
    if ch.h.len() != params.k_desired || ch.g.len() != params.m_roaming {
        return Err(SwiptError::Dimension(format!(
            "channels for {} desired and {} roaming receivers, parameters expect {} and {}",
            ch.h.len(),
            ch.g.len(),
            params.k_desired,
            params.m_roaming
        )));
    }
    let n = params.n_tx;
    if ch.h.iter().any(|h| h.len() != n) || ch.g.iter().any(|g| g.shape() != (n, params.n_rx)) {
        return Err(SwiptError::Dimension(format!("channels must have {n} transmit antennas and {} receive antennas", params.n_rx)));
    }
    Ok(())
}

/// Relaxed program with a free covariance per user and free splitting ratios.
pub fn build_secure_sdp(ch: &SecureChannels, params: &SecureParams) -> Result<SecureSdp> {
    assemble(ch, params, None, Split::Free)
}

fn add_quad(expr: &mut LinExpr, beam: &Beam, h: &CVector, weight: f64) {
    match beam {
        Beam::Free(x) => expr.add_psd(*x, SymCoef::hermitian_rank_one(weight, h)),
        Beam::Fixed { power, dir } => expr.add_scalar(*power, weight * h.dotc(dir).norm_sqr()),
    }
}

fn add_gram_trace(expr: &mut LinExpr, beam: &Beam, g: &CMatrix, weight: f64) {
    match beam {
        Beam::Free(x) => {
            let terms = g
                .column_iter()
                .flat_map(|col| match SymCoef::hermitian_rank_one(weight, &col.into_owned()) {
                    SymCoef::LowRank(t) => t,
                    SymCoef::Dense(_) => unreachable!("rank-one coefficients are low rank"),
                })
                .collect();
            expr.add_psd(*x, SymCoef::LowRank(terms));
        }
        Beam::Fixed { power, dir } => expr.add_scalar(*power, weight * (g.adjoint() * dir).norm_squared()),
    }
}

fn low_rank_terms(c: SymCoef, scale: f64) -> Vec<(f64, DVector<f64>)> {
    match c {
        SymCoef::LowRank(t) => t.into_iter().map(|(w, u)| (w * scale, u)).collect(),
        SymCoef::Dense(_) => unreachable!("bilinear coefficients are low rank"),
    }
}

/// Adds `weight * part((G^H W G)[p, q])`.
///
/// On a free block the functional averages the two copies of each entry in
/// the real embedding, so it only sees the complex-structured part of the block.
#[allow(clippy::too_many_arguments)]
fn add_gram_entry(expr: &mut LinExpr, beam: &Beam, g: &CMatrix, g_hat: &DMatrix<f64>, part: Part, p: usize, q: usize, weight: f64) {
    let r = g.ncols();
    match beam {
        Beam::Free(x) => {
            let col = |i: usize| g_hat.column(i).into_owned();
            let (first, second, sign) = match part {
                Part::Re => (SymCoef::bilinear(&col(p), &col(q)), SymCoef::bilinear(&col(p + r), &col(q + r)), 1.0),
                Part::Im => (SymCoef::bilinear(&col(p + r), &col(q)), SymCoef::bilinear(&col(p), &col(q + r)), -1.0),
            };
            let mut terms = low_rank_terms(first, 0.5 * weight);
            terms.extend(low_rank_terms(second, 0.5 * sign * weight));
            expr.add_psd(*x, SymCoef::LowRank(terms));
        }
        Beam::Fixed { power, dir } => {
            let a = g.adjoint() * dir;
            let z = a[p] * a[q].conj();
            let value = match part {
                Part::Re => z.re,
                Part::Im => z.im,
            };
            expr.add_scalar(*power, weight * value);
        }
    }
}

/// Same functional on the slack block of an LMI, which has size `2 r`.
fn slack_entry(r: usize, part: Part, p: usize, q: usize) -> SymCoef {
    let n = 2 * r;
    let (first, second, sign) = match part {
        Part::Re => (SymCoef::entry(n, p, q), SymCoef::entry(n, p + r, q + r), 1.0),
        Part::Im => (SymCoef::entry(n, p + r, q), SymCoef::entry(n, p, q + r), -1.0),
    };
    let mut terms = low_rank_terms(first, 0.5);
    terms.extend(low_rank_terms(second, 0.5 * sign));
    SymCoef::LowRank(terms)
}

/// Adds a 2x2 block `[[t, 1], [1, y]]` with `y = rho` (or `1 - rho` when
/// `complement`), so that `t >= 1 / y`. Returns the block; `t` is its `(0, 0)` entry.
pub(crate) fn add_inverse_bound(problem: &mut ConicProblem, rho: ScalarVar, complement: bool) -> PsdVar {
    let block = problem.add_psd(2);
    problem.add_constraint(LinExpr::new().psd(block, SymCoef::entry(2, 0, 1)), Relation::Eq, 1.0);
    let sign = if complement { 1.0 } else { -1.0 };
    let rhs = if complement { 1.0 } else { 0.0 };
    problem.add_constraint(LinExpr::new().psd(block, SymCoef::entry(2, 1, 1)).scalar(rho, sign), Relation::Eq, rhs);
    block
}

pub(crate) fn assemble(ch: &SecureChannels, params: &SecureParams, directions: Option<&[CVector]>, split: Split) -> Result<SecureSdp> {
    check_instance(ch, params)?;
    let (k_n, m_n, n, r) = (params.k_desired, params.m_roaming, params.n_tx, params.n_rx);
    let scaling = Scaling::new(ch, params)?;
    let psi: Vec<Vec<f64>> =
        (0..m_n).map(|m| (0..k_n).map(|k| eavesdrop_scale(params, m, k)).collect::<Result<_>>()).collect::<Result<_>>()?;
    if let Split::Fixed(rho) = split {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(SwiptError::OutOfRange { name: "rho", value: rho, lo: 0.0, hi: 1.0 });
        }
    }
    if let Some(dirs) = directions {
        if dirs.len() != k_n || dirs.iter().any(|d| d.len() != n || (d.norm() - 1.0).abs() > 1e-9) {
            return Err(invalid("directions", "need one unit-norm direction per desired user"));
        }
    }

    let mut problem = ConicProblem::new();
    let mut labels = Vec::new();
    let mut summary = ConstraintSummary::default();
    let beams: Vec<Beam> = (0..k_n)
        .map(|k| match directions {
            None => Beam::Free(problem.add_psd(2 * n)),
            Some(dirs) => Beam::Fixed { power: problem.add_nonneg(), dir: dirs[k].clone() },
        })
        .collect();
    let noise_var = problem.add_psd(2 * n);
    let noise = Beam::Free(noise_var);
    summary.psd_blocks = k_n + 1;

    let mut objective = LinExpr::new();
    for beam in beams.iter().chain(std::iter::once(&noise)) {
        match beam {
            Beam::Free(x) => objective.add_psd(*x, SymCoef::hermitian_trace(n)),
            Beam::Fixed { power, .. } => objective.add_scalar(*power, 1.0),
        }
    }
    problem.set_objective(objective);

    // splitting ratios and the blocks bounding their inverses
    let mut rho = Vec::new();
    let mut inv_rho = Vec::new();
    let mut inv_comp: Vec<Option<PsdVar>> = Vec::new();
    if split == Split::Free {
        for k in 0..k_n {
            let v = problem.add_nonneg();
            problem.add_constraint(LinExpr::new().scalar(v, 1.0), Relation::Ge, RHO_MARGIN);
            problem.add_constraint(LinExpr::new().scalar(v, 1.0), Relation::Le, 1.0 - RHO_MARGIN);
            labels.extend(["rho lower bound".to_string(), "rho upper bound".to_string()]);
            summary.rho_boxes += 1;
            inv_rho.push(add_inverse_bound(&mut problem, v, false));
            labels.extend(["1/rho block".to_string(), "1/rho block".to_string()]);
            summary.hyperbolic_blocks += 1;
            if params.p_req1_w[k] > 0.0 {
                inv_comp.push(Some(add_inverse_bound(&mut problem, v, true)));
                labels.extend(["1/(1-rho) block".to_string(), "1/(1-rho) block".to_string()]);
                summary.hyperbolic_blocks += 1;
            } else {
                inv_comp.push(None);
            }
            rho.push(v);
        }
    }

    let a = scaling.antenna_noise;
    let mut sinr_rows = Vec::with_capacity(k_n);
    for k in 0..k_n {
        let h = &scaling.h[k];
        let mut expr = LinExpr::new();
        for (j, beam) in beams.iter().enumerate() {
            let weight = if j == k { 1.0 / params.gamma_req[k] } else { -1.0 };
            add_quad(&mut expr, beam, h, weight);
        }
        add_quad(&mut expr, &noise, h, -1.0);
        let rhs = match split {
            Split::Free => {
                expr.add_psd(inv_rho[k], SymCoef::entry(2, 0, 0).scaled(-1.0));
                a
            }
            Split::Fixed(value) => a + 1.0 / value,
        };
        sinr_rows.push(problem.add_constraint(expr, Relation::Ge, rhs));
        labels.push(format!("SINR of user {k}"));
        summary.sinr += 1;
    }

    for m in 0..m_n {
        let (g, g_hat) = (&scaling.g[m], &scaling.g_embed[m]);
        // the slack is stored divided by the receiver's channel gain
        let slack_unit = (g.norm_squared() / r as f64).max(1.0);
        for k in 0..k_n {
            let scale = psi[m][k];
            let slack = problem.add_psd(2 * r);
            // structured part of the slack equals (psi - 1) Q - G^H W_k G
            for part in [Part::Re, Part::Im] {
                for p in 0..r {
                    let start = if part == Part::Re { p } else { p + 1 };
                    for q in start..r {
                        let mut expr = LinExpr::new().psd(slack, slack_entry(r, part, p, q).scaled(slack_unit));
                        add_gram_entry(&mut expr, &noise, g, g_hat, part, p, q, -scale);
                        if params.eavesdropper == EavesdropperModel::SingleUser {
                            for (j, beam) in beams.iter().enumerate() {
                                if j != k {
                                    add_gram_entry(&mut expr, beam, g, g_hat, part, p, q, -scale);
                                }
                            }
                        }
                        add_gram_entry(&mut expr, &beams[k], g, g_hat, part, p, q, 1.0);
                        let rhs = if part == Part::Re && p == q { scale * (a + 1.0) } else { 0.0 };
                        problem.add_constraint(expr, Relation::Eq, rhs);
                        labels.push(format!("eavesdropping LMI of receiver {m} on user {k}"));
                    }
                }
            }
            summary.eavesdrop_lmis += 1;
        }
    }

    let mut harvest_rows = Vec::with_capacity(k_n);
    for k in 0..k_n {
        let need = params.p_req1_w[k] / (params.eta * params.sigma_s_w);
        if !(need > 0.0) {
            harvest_rows.push(None);
            continue;
        }
        let h = &scaling.h[k];
        let mut expr = LinExpr::new();
        for beam in beams.iter().chain(std::iter::once(&noise)) {
            add_quad(&mut expr, beam, h, 1.0);
        }
        let rhs = match split {
            Split::Free => {
                let block = inv_comp[k].expect("complement block exists for a positive requirement");
                expr.add_psd(block, SymCoef::entry(2, 0, 0).scaled(-need));
                -a
            }
            Split::Fixed(value) => need / (1.0 - value) - a,
        };
        harvest_rows.push(Some(problem.add_constraint(expr, Relation::Ge, rhs)));
        labels.push(format!("harvesting of user {k}"));
        summary.harvest_desired += 1;
    }

    let mut roaming_rows = Vec::with_capacity(m_n);
    for m in 0..m_n {
        if !(params.p_req2_w[m] > 0.0) {
            roaming_rows.push(None);
            continue;
        }
        let need = params.p_req2_w[m] / (params.eta * params.sigma_s_w) - r as f64 * a;
        let mut expr = LinExpr::new();
        for beam in beams.iter().chain(std::iter::once(&noise)) {
            add_gram_trace(&mut expr, beam, &scaling.g[m], 1.0);
        }
        roaming_rows.push(Some(problem.add_constraint(expr, Relation::Ge, need)));
        labels.push(format!("harvesting of roaming receiver {m}"));
        summary.harvest_roaming += 1;
    }

    debug_assert_eq!(labels.len(), problem.constraints().len());
    Ok(SecureSdp {
        problem,
        summary,
        scaling,
        beams,
        noise: noise_var,
        rho,
        split,
        sinr_rows,
        harvest_rows,
        roaming_rows,
        row_labels: labels,
    })
}
