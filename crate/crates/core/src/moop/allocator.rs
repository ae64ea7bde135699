//! Single-objective and weighted min-max allocators for separated receivers.
//!
//! All allocators solve a lifted semidefinite relaxation. The concave rate
//! term `theta * log2(1 + x / theta)` is represented by its tangent planes,
//! indexed by the signal-to-noise ratio at the tangent point. Planes are
//! added at the ratio of each relaxed optimum until the relaxation and the
//! true objective agree.

use std::f64::consts::LN_2;

use nalgebra::DMatrix;

use super::lifting::{lift, LiftedVars};
use super::structure::rank_one_extract;
use super::weights::WeightVector;
use crate::conic::{solve, ConicProblem, ConicSolution, LinExpr, PsdVar, Relation, ScalarVar, SolveStatus, SolverConfig, SymCoef};
use crate::error::{Result, SwiptError};
use crate::linalg::{hermitian_unembed, CMatrix, CVector};
use crate::metrics::{harvested_sep, moop_objectives, rate_sep, MoopObjectives};
use crate::sysmodel::{SepChannels, SystemParams};
use num_complex::Complex64;

/// Settings shared by the allocators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoopConfig {
    pub solver: SolverConfig,
    /// Stop adding tangent planes once the relaxation is within this
    /// relative distance of the true objective.
    pub cut_tol: f64,
    pub max_cut_rounds: usize,
    /// Residual level up to which a solve that stalled is still accepted.
    pub accept_tol: f64,
}

impl Default for MoopConfig {
    fn default() -> Self {
        Self { solver: SolverConfig::default(), cut_tol: 1e-7, max_cut_rounds: 40, accept_tol: 1e-6 }
    }
}

/// Spectral efficiencies, in bit/s/Hz, of the initial tangent planes.
const INITIAL_RATES: [f64; 9] = [0.5, 2.0, 5.0, 8.0, 12.0, 16.0, 20.0, 25.0, 32.0];

/// Best values of the single objectives for one channel realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoopAnchors {
    pub ir_ee_star: f64,
    pub eh_ee_star: f64,
    pub p_max_w: f64,
}

impl MoopAnchors {
    pub fn compute(ch: &SepChannels, params: &SystemParams, cfg: &MoopConfig) -> Result<Self> {
        let ir = solve_iree_max(ch, params, cfg)?;
        let (_, eh_ee_star) = ehee_closed_form(ch, params)?;
        Ok(Self { ir_ee_star: ir.objectives.ir_ee, eh_ee_star, p_max_w: params.p_max_w })
    }

    /// Objectives mapped to `[0, 1]`, with 1 the best value.
    pub fn normalized(&self, obj: &MoopObjectives) -> [f64; 3] {
        [obj.ir_ee / self.ir_ee_star, obj.eh_ee / self.eh_ee_star, (self.p_max_w - obj.p_tx) / self.p_max_w]
    }

    /// `max_j w_j (1 - normalized_j)`.
    pub fn scalarize(&self, weights: &WeightVector, obj: &MoopObjectives) -> f64 {
        let f = self.normalized(obj);
        weights.as_array().iter().zip(f).map(|(w, v)| w * (1.0 - v)).fold(0.0, f64::max)
    }
}

/// Best rate and harvested power of the throughput baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputAnchors {
    pub rate_star: f64,
    pub harvest_star_w: f64,
    pub p_max_w: f64,
}

impl ThroughputAnchors {
    /// Full power on the respective channel direction.
    pub fn compute(ch: &SepChannels, params: &SystemParams) -> Result<Self> {
        if ch.h.norm() == 0.0 || ch.g.norm() == 0.0 {
            return Err(SwiptError::Degenerate("zero channel".into()));
        }
        Ok(Self {
            rate_star: (1.0 + params.p_max_w * ch.h.norm_squared() / params.noise_w).log2(),
            harvest_star_w: params.eta * params.p_max_w * ch.g.norm_squared(),
            p_max_w: params.p_max_w,
        })
    }

    pub fn normalized(&self, rate: f64, harvest_w: f64, p_tx: f64) -> [f64; 3] {
        [rate / self.rate_star, harvest_w / self.harvest_star_w, (self.p_max_w - p_tx) / self.p_max_w]
    }
}

/// Result of an allocator.
#[derive(Debug, Clone, PartialEq)]
pub struct MoopAllocation {
    /// Information beamformer under the canonical phase.
    pub w_info: CVector,
    pub w_energy: CMatrix,
    /// Inverse consumed power of the allocation.
    pub theta: f64,
    /// Scalarized objective `max_j w_j (1 - normalized_j)` of the allocation.
    pub tau: f64,
    /// Optimal value of the final relaxation, a lower bound on `tau`.
    pub relaxed_tau: f64,
    pub objectives: MoopObjectives,
    pub weights: WeightVector,
    /// Lifted covariances returned by the relaxation before any post-processing.
    pub relaxed: LiftedVars,
    /// `l2 / l1` of the combined relaxed covariance `info + energy`.
    pub rank_ratio: f64,
    pub status: SolveStatus,
    pub cut_rounds: usize,
}

impl MoopAllocation {
    /// `l2 / l1` of the relaxed information covariance alone.
    pub fn info_rank_ratio(&self) -> f64 {
        rank_one_extract(&self.relaxed.info).1
    }

    /// Frobenius norm of the relaxed energy covariance.
    pub fn energy_norm(&self) -> f64 {
        self.relaxed.energy.norm()
    }
}

#[derive(Debug, Clone, Copy)]
enum Goal {
    MaxRate,
    MaxHarvest,
    MinMax { weights: WeightVector, rate_star: f64, harvest_star: f64 },
}

/// Problem family: lifted energy efficiencies, or plain rate and harvested power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    EnergyEfficiency,
    Throughput,
}

struct Formulation<'a> {
    ch: &'a SepChannels,
    params: &'a SystemParams,
    family: Family,
    energy_block: bool,
    goal: Goal,
}

struct Built {
    problem: ConicProblem,
    info: PsdVar,
    energy: Option<PsdVar>,
    theta: Option<ScalarVar>,
    epigraph: Option<ScalarVar>,
}

/// Tangent plane of `(theta, x) -> theta log2(1 + x / theta)` at ratio `snr`:
/// returns the coefficients of `theta` and `x`.
fn tangent(snr: f64) -> (f64, f64) {
    let slope = 1.0 / (LN_2 * (1.0 + snr));
    ((1.0 + snr).log2() - snr * slope, slope)
}

impl Formulation<'_> {
    fn n(&self) -> usize {
        self.ch.n_tx()
    }

    fn snr_coef(&self) -> SymCoef {
        SymCoef::hermitian_rank_one(1.0 / self.params.noise_w, &self.ch.h)
    }

    fn harvest_coef(&self) -> SymCoef {
        SymCoef::hermitian_rank_one(self.params.eta, &self.ch.g)
    }

    fn build(&self, cuts: &[f64]) -> Built {
        let n = self.n();
        let p = self.params;
        let mut problem = ConicProblem::new();
        let info = problem.add_psd(2 * n);
        let energy = self.energy_block.then(|| problem.add_psd(2 * n));
        let theta = (self.family == Family::EnergyEfficiency).then(|| problem.add_nonneg());
        let trace = SymCoef::hermitian_trace(n);

        let mut radiated = LinExpr::new().psd(info, trace.clone());
        if let Some(e) = energy {
            radiated.add_psd(e, trace.clone());
        }
        match theta {
            Some(t) => {
                problem.add_constraint(radiated.clone().scalar(t, -p.p_max_w), Relation::Le, 0.0);
                let budget = LinExpr::new().psd(info, trace.scaled(1.0 / p.xi)).scalar(t, p.circuit_power());
                let budget = match energy {
                    Some(e) => budget.psd(e, trace.scaled(1.0 / p.xi)),
                    None => budget,
                };
                problem.add_constraint(budget, Relation::Eq, 1.0);
            }
            None => {
                problem.add_constraint(radiated.clone(), Relation::Le, p.p_max_w);
            }
        }

        let mut harvest = LinExpr::new().psd(info, self.harvest_coef());
        if let Some(e) = energy {
            harvest.add_psd(e, self.harvest_coef());
        }

        // rate tangent planes, scaled by `weight`, as (expr, constant)
        let snr = self.snr_coef();
        let plane = |z: f64, weight: f64| {
            let (a, b) = tangent(z);
            let expr = LinExpr::new().psd(info, snr.scaled(weight * b));
            match theta {
                Some(t) => (expr.scalar(t, weight * a), 0.0),
                None => (expr, weight * a),
            }
        };

        let epigraph = match self.goal {
            Goal::MaxRate => {
                let t = problem.add_nonneg();
                for &z in cuts {
                    let (expr, constant) = plane(z, 1.0);
                    problem.add_constraint(expr.scalar(t, -1.0), Relation::Ge, -constant);
                }
                problem.set_objective(LinExpr::new().scalar(t, -1.0));
                Some(t)
            }
            Goal::MaxHarvest => {
                let mut obj = LinExpr::new().psd(info, self.harvest_coef().scaled(-1.0));
                if let Some(e) = energy {
                    obj.add_psd(e, self.harvest_coef().scaled(-1.0));
                }
                problem.set_objective(obj);
                None
            }
            Goal::MinMax { weights, rate_star, harvest_star } => {
                let tau = problem.add_nonneg();
                let [w_rate, w_harvest, w_power] = weights.as_array();
                if w_rate > 0.0 {
                    for &z in cuts {
                        let (expr, constant) = plane(z, w_rate / rate_star);
                        problem.add_constraint(expr.scalar(tau, 1.0), Relation::Ge, w_rate - constant);
                    }
                }
                if w_harvest > 0.0 {
                    let mut expr = LinExpr::new().psd(info, self.harvest_coef().scaled(w_harvest / harvest_star));
                    if let Some(e) = energy {
                        expr.add_psd(e, self.harvest_coef().scaled(w_harvest / harvest_star));
                    }
                    problem.add_constraint(expr.scalar(tau, 1.0), Relation::Ge, w_harvest);
                }
                if w_power > 0.0 {
                    match theta {
                        Some(t) => {
                            // theta * (circuit + tau P_max / (w xi)) >= 1 as a 2x2 LMI
                            let lmi = problem.add_psd(2);
                            problem.add_constraint(LinExpr::new().psd(lmi, SymCoef::entry(2, 0, 0)).scalar(t, -1.0), Relation::Eq, 0.0);
                            problem.add_constraint(LinExpr::new().psd(lmi, SymCoef::entry(2, 0, 1)), Relation::Eq, 1.0);
                            problem.add_constraint(
                                LinExpr::new().psd(lmi, SymCoef::entry(2, 1, 1).scaled(w_power * p.xi)).scalar(tau, -p.p_max_w),
                                Relation::Eq,
                                w_power * p.xi * p.circuit_power(),
                            );
                        }
                        None => {
                            let mut expr = LinExpr::new().psd(info, trace.scaled(w_power / p.p_max_w));
                            if let Some(e) = energy {
                                expr.add_psd(e, trace.scaled(w_power / p.p_max_w));
                            }
                            problem.add_constraint(expr.scalar(tau, -1.0), Relation::Le, 0.0);
                        }
                    }
                }
                problem.set_objective(LinExpr::new().scalar(tau, 1.0));
                Some(tau)
            }
        };
        Built { problem, info, energy, theta, epigraph }
    }

    /// Rate term (IR-EE or spectral efficiency), harvest term and radiated power
    /// of a relaxed point.
    fn evaluate(&self, x_info: &DMatrix<f64>, x_energy: Option<&DMatrix<f64>>, theta: f64) -> (f64, f64, f64) {
        let snr = self.snr_coef().inner(x_info);
        let mut harvest = self.harvest_coef().inner(x_info);
        let mut trace = 0.5 * x_info.trace();
        if let Some(xe) = x_energy {
            harvest += self.harvest_coef().inner(xe);
            trace += 0.5 * xe.trace();
        }
        match self.family {
            Family::EnergyEfficiency => {
                let rate = if theta > 0.0 { theta * (1.0 + snr.max(0.0) / theta).log2() } else { 0.0 };
                (rate, harvest, if theta > 0.0 { trace / theta } else { f64::INFINITY })
            }
            Family::Throughput => ((1.0 + snr.max(0.0)).log2(), harvest, trace),
        }
    }

    fn tangent_ratio(&self, x_info: &DMatrix<f64>, theta: f64) -> f64 {
        let snr = self.snr_coef().inner(x_info).max(0.0);
        match self.family {
            Family::EnergyEfficiency if theta > 0.0 => snr / theta,
            Family::EnergyEfficiency => 0.0,
            Family::Throughput => snr,
        }
    }
}

struct Relaxed {
    sol: ConicSolution,
    built: Built,
    /// Optimal value of the relaxation in the goal's own units.
    bound: f64,
    rounds: usize,
}

fn checked_solve(problem: &ConicProblem, cfg: &MoopConfig) -> Result<ConicSolution> {
    let sol = solve(problem, &cfg.solver)?;
    match sol.status {
        SolveStatus::Optimal => Ok(sol),
        SolveStatus::NumericalLimit
            if sol.gap <= cfg.accept_tol && sol.primal_residual <= cfg.accept_tol && sol.dual_residual <= cfg.accept_tol =>
        {
            Ok(sol)
        }
        status => Err(SwiptError::Solver(status)),
    }
}

fn solve_with_cuts(form: &Formulation, cfg: &MoopConfig, extra_cuts: &[f64]) -> Result<Relaxed> {
    let mut cuts: Vec<f64> = INITIAL_RATES.iter().map(|s| s.exp2() - 1.0).collect();
    cuts.extend_from_slice(extra_cuts);
    let needs_cuts = match form.goal {
        Goal::MaxRate => true,
        Goal::MaxHarvest => false,
        Goal::MinMax { weights, .. } => weights.ir_ee() > 0.0,
    };
    let mut rounds = 0;
    loop {
        rounds += 1;
        let built = form.build(&cuts);
        let sol = checked_solve(&built.problem, cfg)?;
        let x_info = sol.block(built.info).clone();
        let x_energy = built.energy.map(|e| sol.block(e).clone());
        let theta = built.theta.map_or(1.0, |t| sol.value(t));
        let bound = match form.goal {
            Goal::MaxRate => sol.value(built.epigraph.expect("rate epigraph")),
            Goal::MaxHarvest => -sol.primal_objective,
            Goal::MinMax { .. } => sol.value(built.epigraph.expect("tau epigraph")),
        };
        if !needs_cuts || rounds >= cfg.max_cut_rounds {
            return Ok(Relaxed { sol, built, bound, rounds });
        }
        let (rate, _, _) = form.evaluate(&x_info, x_energy.as_ref(), theta);
        let excess = match form.goal {
            Goal::MaxRate => (bound - rate) / bound.abs().max(f64::MIN_POSITIVE),
            Goal::MinMax { weights, rate_star, .. } => weights.ir_ee() * (1.0 - rate / rate_star) - bound,
            Goal::MaxHarvest => 0.0,
        };
        let z = form.tangent_ratio(&x_info, theta);
        let repeated = cuts.iter().any(|&c| (c - z).abs() <= 1e-12 * c.max(1.0));
        if excess <= cfg.cut_tol || repeated {
            return Ok(Relaxed { sol, built, bound, rounds });
        }
        cuts.push(z);
    }
}

/// Fold the relaxed energy covariance into the information covariance and
/// extract the principal beam.
fn construct(form: &Formulation, relaxed: &Relaxed, weights: WeightVector) -> Result<MoopAllocation> {
    let sol = &relaxed.sol;
    let b = &relaxed.built;
    let n = form.n();
    let info = hermitian_unembed(sol.block(b.info))?;
    let energy = match b.energy {
        Some(e) => hermitian_unembed(sol.block(e))?,
        None => CMatrix::zeros(n, n),
    };
    let p = form.params;
    let (raw_theta, lifted_scale) = match b.theta {
        Some(t) => (sol.value(t), 1.0),
        None => {
            let theta = 1.0 / ((info.trace().re + energy.trace().re) / p.xi + p.circuit_power());
            (theta, theta)
        }
    };
    let s = Complex64::new(lifted_scale, 0.0);
    let relaxed_vars = LiftedVars { info: &info * s, energy: &energy * s, theta: raw_theta };
    if !(raw_theta > 0.0) {
        return Err(SwiptError::Degenerate("relaxation returned zero theta".into()));
    }
    let combined = &relaxed_vars.info + &relaxed_vars.energy;
    let (v, rank_ratio) = rank_one_extract(&combined);
    let mut w = v / Complex64::new(raw_theta.sqrt(), 0.0);
    let power = w.norm_squared();
    if power > p.p_max_w {
        w *= Complex64::new((p.p_max_w / power).sqrt(), 0.0);
    }
    let w_energy = CMatrix::zeros(n, n);
    let objectives = moop_objectives(form.ch, &w, &w_energy, p);
    let theta = lift(&w, &w_energy, p)?.theta;
    let tau = match form.goal {
        Goal::MaxRate | Goal::MaxHarvest => 0.0,
        Goal::MinMax { weights, rate_star, harvest_star } => match form.family {
            Family::EnergyEfficiency => {
                MoopAnchors { ir_ee_star: rate_star, eh_ee_star: harvest_star, p_max_w: p.p_max_w }.scalarize(&weights, &objectives)
            }
            Family::Throughput => {
                let anchors = ThroughputAnchors { rate_star, harvest_star_w: harvest_star, p_max_w: p.p_max_w };
                let f = anchors.normalized(
                    rate_sep(&form.ch.h, &w, p.noise_w),
                    harvested_sep(&form.ch.g, &w, &w_energy, p.eta),
                    objectives.p_tx,
                );
                weights.as_array().iter().zip(f).map(|(a, v)| a * (1.0 - v)).fold(0.0, f64::max)
            }
        },
    };
    let relaxed_tau = match form.goal {
        Goal::MinMax { .. } => relaxed.bound,
        _ => 0.0,
    };
    Ok(MoopAllocation {
        w_info: w,
        w_energy,
        theta,
        tau,
        relaxed_tau,
        objectives,
        weights,
        relaxed: relaxed_vars,
        rank_ratio,
        status: sol.status,
        cut_rounds: relaxed.rounds,
    })
}

fn check_channels(ch: &SepChannels, params: &SystemParams) -> Result<()> {
    if ch.h.len() != params.n_tx || ch.g.len() != params.n_tx {
        return Err(SwiptError::Dimension(format!("channels of length {} and {} for {} antennas", ch.h.len(), ch.g.len(), params.n_tx)));
    }
    params.validate()
}

/// The zero allocation, which minimizes transmit power.
pub fn solve_power_min(ch: &SepChannels, params: &SystemParams) -> MoopAllocation {
    let n = ch.n_tx();
    let zero = CMatrix::zeros(n, n);
    let theta = 1.0 / params.circuit_power();
    MoopAllocation {
        w_info: CVector::zeros(n),
        w_energy: zero.clone(),
        theta,
        tau: 0.0,
        relaxed_tau: 0.0,
        objectives: MoopObjectives { ir_ee: 0.0, eh_ee: 0.0, p_tx: 0.0 },
        weights: WeightVector::unit(2).expect("valid unit weight"),
        relaxed: LiftedVars { info: zero.clone(), energy: zero, theta },
        rank_ratio: 0.0,
        status: SolveStatus::Optimal,
        cut_rounds: 0,
    }
}

/// Full power along `g`: returns the beamformer and the optimal EH-EE.
pub fn ehee_closed_form(ch: &SepChannels, params: &SystemParams) -> Result<(CVector, f64)> {
    check_channels(ch, params)?;
    let ng = ch.g.norm();
    if ng == 0.0 {
        return Err(SwiptError::Degenerate("energy receiver channel is zero".into()));
    }
    let w = crate::linalg::canonical_phase(&(&ch.g * Complex64::new(params.p_max_w.sqrt() / ng, 0.0)));
    let value = params.eta * params.p_max_w * ng * ng / (params.p_max_w / params.xi + params.circuit_power());
    Ok((w, value))
}

/// EH-EE maximization through its closed form.
pub fn solve_ehee_max(ch: &SepChannels, params: &SystemParams) -> Result<MoopAllocation> {
    let (w, _) = ehee_closed_form(ch, params)?;
    let n = ch.n_tx();
    let w_energy = CMatrix::zeros(n, n);
    let relaxed = lift(&w, &w_energy, params)?;
    Ok(MoopAllocation {
        objectives: moop_objectives(ch, &w, &w_energy, params),
        theta: relaxed.theta,
        w_info: w,
        w_energy,
        tau: 0.0,
        relaxed_tau: 0.0,
        weights: WeightVector::unit(1)?,
        relaxed,
        rank_ratio: 0.0,
        status: SolveStatus::Optimal,
        cut_rounds: 0,
    })
}

/// EH-EE maximization through the lifted relaxation.
pub fn solve_ehee_max_sdp(ch: &SepChannels, params: &SystemParams, cfg: &MoopConfig) -> Result<MoopAllocation> {
    check_channels(ch, params)?;
    if ch.g.norm() == 0.0 {
        return Err(SwiptError::Degenerate("energy receiver channel is zero".into()));
    }
    let form = Formulation { ch, params, family: Family::EnergyEfficiency, energy_block: true, goal: Goal::MaxHarvest };
    let relaxed = solve_with_cuts(&form, cfg, &[])?;
    construct(&form, &relaxed, WeightVector::unit(1)?)
}

/// SNR of the best full-alignment beam, used to place the first tangent planes.
fn aligned_snr_guess(ch: &SepChannels, params: &SystemParams) -> f64 {
    let gain = ch.h.norm_squared() / params.noise_w;
    let ee = |p: f64| (1.0 + p * gain).log2() / (p / params.xi + params.circuit_power());
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, params.p_max_w);
    for _ in 0..80 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if ee(a) < ee(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    0.5 * (lo + hi) * gain
}

/// IR-EE maximization.
pub fn solve_iree_max(ch: &SepChannels, params: &SystemParams, cfg: &MoopConfig) -> Result<MoopAllocation> {
    check_channels(ch, params)?;
    if ch.h.norm() == 0.0 {
        return Err(SwiptError::Degenerate("information receiver channel is zero".into()));
    }
    let form = Formulation { ch, params, family: Family::EnergyEfficiency, energy_block: false, goal: Goal::MaxRate };
    let z = aligned_snr_guess(ch, params);
    let relaxed = solve_with_cuts(&form, cfg, &[z, z * 1.001, z * 0.999])?;
    construct(&form, &relaxed, WeightVector::unit(0)?)
}

fn validate_anchor(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(crate::error::invalid(name, format!("anchor {v} must be positive")))
    }
}

/// Weighted min-max allocation over IR-EE, EH-EE and transmit power.
pub fn solve_weighted_minmax(
    weights: WeightVector,
    ch: &SepChannels,
    params: &SystemParams,
    anchors: &MoopAnchors,
    cfg: &MoopConfig,
) -> Result<MoopAllocation> {
    check_channels(ch, params)?;
    if weights.ir_ee() == 0.0 && weights.eh_ee() == 0.0 {
        let mut alloc = solve_power_min(ch, params);
        alloc.weights = weights;
        return Ok(alloc);
    }
    validate_anchor("ir_ee_star", anchors.ir_ee_star)?;
    validate_anchor("eh_ee_star", anchors.eh_ee_star)?;
    let form = Formulation {
        ch,
        params,
        family: Family::EnergyEfficiency,
        energy_block: true,
        goal: Goal::MinMax { weights, rate_star: anchors.ir_ee_star, harvest_star: anchors.eh_ee_star },
    };
    let relaxed = solve_with_cuts(&form, cfg, &[])?;
    construct(&form, &relaxed, weights)
}

/// Weighted min-max allocation over rate, harvested power and transmit power.
pub fn solve_throughput_minmax(weights: WeightVector, ch: &SepChannels, params: &SystemParams, cfg: &MoopConfig) -> Result<MoopAllocation> {
    check_channels(ch, params)?;
    if weights.ir_ee() == 0.0 && weights.eh_ee() == 0.0 {
        let mut alloc = solve_power_min(ch, params);
        alloc.weights = weights;
        return Ok(alloc);
    }
    let anchors = ThroughputAnchors::compute(ch, params)?;
    let form = Formulation {
        ch,
        params,
        family: Family::Throughput,
        energy_block: true,
        goal: Goal::MinMax { weights, rate_star: anchors.rate_star, harvest_star: anchors.harvest_star_w },
    };
    let relaxed = solve_with_cuts(&form, cfg, &[])?;
    construct(&form, &relaxed, weights)
}
