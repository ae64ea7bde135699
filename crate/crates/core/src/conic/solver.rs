//! Homogeneous self-dual interior-point method with Nesterov-Todd scaling.
//!
//! The problem is brought to the standard form `min <c, x>, A x = b, x in K`
//! where `K` is a product of a nonnegative orthant and PSD cones. Free scalars
//! are split into differences of nonnegative ones, inequality rows get slack
//! columns, and rows are equilibrated before iterating.

use nalgebra::{Cholesky, DMatrix, DVector, SVD};

use super::problem::{ConicProblem, ConstraintId, PsdVar, Relation, ScalarKind, ScalarVar, SymCoef};
use crate::error::Result;

/// Termination tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative duality gap `|p - d| / max(1, |p|)`.
    pub gap_tol: f64,
    /// Relative primal and dual residuals.
    pub feas_tol: f64,
    /// Allowed negative eigenvalue on returned PSD blocks.
    pub eig_tol: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { gap_tol: 1e-8, feas_tol: 1e-8, eig_tol: 1e-9, max_iters: 200 }
    }
}

impl SolverConfig {
    pub fn with_gap_tol(mut self, tol: f64) -> Self {
        self.gap_tol = tol;
        self
    }

    pub fn with_feas_tol(mut self, tol: f64) -> Self {
        self.feas_tol = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    /// The primal is infeasible; `duals` hold a Farkas ray with `b^T y = 1`.
    Infeasible,
    /// The primal is unbounded; the primal fields hold a ray with `<c, x> = -1`.
    Unbounded,
    NumericalLimit,
}

/// Output of [`solve`]. Multipliers follow `c - sum_i y_i a_i in K*`, so rows
/// with relation `Ge` have `y >= 0` and rows with `Le` have `y <= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicSolution {
    pub status: SolveStatus,
    pub psd: Vec<DMatrix<f64>>,
    pub scalars: Vec<f64>,
    pub duals: Vec<f64>,
    /// Dual slack matrices `C_b - sum_i y_i A_ib`.
    pub dual_psd: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Relative duality gap.
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

impl ConicSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn block(&self, v: PsdVar) -> &DMatrix<f64> {
        &self.psd[v.0]
    }

    pub fn value(&self, v: ScalarVar) -> f64 {
        self.scalars[v.0]
    }

    pub fn dual(&self, c: ConstraintId) -> f64 {
        self.duals[c.0]
    }
}

#[derive(Debug, Clone, Copy)]
enum ScalarMap {
    Nonneg(usize),
    Free(usize, usize),
}

struct Block {
    n: usize,
    rows: Vec<(usize, SymCoef)>,
}

/// Equilibrated standard-form data.
struct Standard {
    m: usize,
    blocks: Vec<Block>,
    lp_a: DMatrix<f64>,
    c: Vars,
    b: DVector<f64>,
    scalar_map: Vec<ScalarMap>,
    row_scale: DVector<f64>,
    obj_scale: f64,
}

#[derive(Debug, Clone)]
struct Vars {
    lp: DVector<f64>,
    psd: Vec<DMatrix<f64>>,
}

impl Vars {
    fn zeros(nlp: usize, sizes: &[usize]) -> Self {
        Self { lp: DVector::zeros(nlp), psd: sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect() }
    }

    fn identity(nlp: usize, sizes: &[usize]) -> Self {
        Self { lp: DVector::from_element(nlp, 1.0), psd: sizes.iter().map(|&n| DMatrix::identity(n, n)).collect() }
    }

    fn dot(&self, o: &Vars) -> f64 {
        self.lp.dot(&o.lp) + self.psd.iter().zip(&o.psd).map(|(a, b)| a.dot(b)).sum::<f64>()
    }

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    fn axpy(&mut self, a: f64, o: &Vars) {
        self.lp.axpy(a, &o.lp, 1.0);
        for (x, y) in self.psd.iter_mut().zip(&o.psd) {
            *x += y * a;
        }
    }

    fn scaled(&self, a: f64) -> Vars {
        Vars { lp: &self.lp * a, psd: self.psd.iter().map(|m| m * a).collect() }
    }

    fn lin_comb(a: f64, x: &Vars, b: f64, y: &Vars) -> Vars {
        let mut out = x.scaled(a);
        out.axpy(b, y);
        out
    }

    /// Removes the rounding-level antisymmetric part of every block, which
    /// the scalings never see and therefore never correct.
    fn symmetrized(self) -> Vars {
        Vars { lp: self.lp, psd: self.psd.into_iter().map(|m| (&m + m.transpose()) * 0.5).collect() }
    }

    fn jordan(&self, o: &Vars) -> Vars {
        Vars {
            lp: self.lp.component_mul(&o.lp),
            psd: self
                .psd
                .iter()
                .zip(&o.psd)
                .map(|(a, b)| {
                    let ab = a * b;
                    let t = ab.transpose();
                    (ab + t) * 0.5
                })
                .collect(),
        }
    }
}

struct PsdScale {
    r: DMatrix<f64>,
    lambda: DVector<f64>,
    g: DMatrix<f64>,
}

/// Nesterov-Todd scaling `W` with `W^{-1} x = W^T s = lambda`.
struct Scaling {
    lp_w: DVector<f64>,
    lp_lambda: DVector<f64>,
    psd: Vec<PsdScale>,
}

impl Scaling {
    fn new(x: &Vars, s: &Vars) -> Option<Self> {
        if x.lp.iter().chain(s.lp.iter()).any(|&v| !(v > 0.0)) {
            return None;
        }
        let lp_w = x.lp.zip_map(&s.lp, |a, b| (a / b).sqrt());
        let lp_lambda = x.lp.zip_map(&s.lp, |a, b| (a * b).sqrt());
        let mut psd = Vec::with_capacity(x.psd.len());
        for (xm, sm) in x.psd.iter().zip(&s.psd) {
            let lx = Cholesky::new(xm.clone())?.unpack();
            let ls = Cholesky::new(sm.clone())?.unpack();
            let svd = SVD::new(ls.transpose() * &lx, false, true);
            let vt = svd.v_t?;
            let lambda = svd.singular_values;
            if lambda.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
                return None;
            }
            let inv_sqrt = lambda.map(|l| 1.0 / l.sqrt());
            let mut r = &lx * vt.transpose();
            for (j, f) in inv_sqrt.iter().enumerate() {
                r.column_mut(j).scale_mut(*f);
            }
            let g = &r * r.transpose();
            psd.push(PsdScale { r, lambda, g });
        }
        Some(Self { lp_w, lp_lambda, psd })
    }

    /// `W u`.
    fn w(&self, u: &Vars) -> Vars {
        Vars { lp: self.lp_w.component_mul(&u.lp), psd: self.psd.iter().zip(&u.psd).map(|(p, m)| &p.r * m * p.r.transpose()).collect() }
    }

    /// `W^T u`.
    fn wt(&self, u: &Vars) -> Vars {
        Vars { lp: self.lp_w.component_mul(&u.lp), psd: self.psd.iter().zip(&u.psd).map(|(p, m)| p.r.transpose() * m * &p.r).collect() }
    }

    /// `W W^T u`.
    fn d(&self, u: &Vars) -> Vars {
        Vars {
            lp: self.lp_w.component_mul(&self.lp_w).component_mul(&u.lp),
            psd: self.psd.iter().zip(&u.psd).map(|(p, m)| &p.g * m * &p.g).collect(),
        }
    }

    fn lambda_sq(&self) -> Vars {
        Vars {
            lp: self.lp_lambda.component_mul(&self.lp_lambda),
            psd: self.psd.iter().map(|p| DMatrix::from_diagonal(&p.lambda.component_mul(&p.lambda))).collect(),
        }
    }

    /// Solve `lambda o q = r` for `q`.
    fn lambda_div(&self, r: &Vars) -> Vars {
        Vars {
            lp: r.lp.component_div(&self.lp_lambda),
            psd: self
                .psd
                .iter()
                .zip(&r.psd)
                .map(|(p, m)| {
                    let l = &p.lambda;
                    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| 2.0 * m[(i, j)] / (l[i] + l[j]))
                })
                .collect(),
        }
    }

    /// Largest `alpha` such that `lambda + alpha * d` stays in the cone.
    fn max_step(&self, d: &Vars) -> f64 {
        let mut alpha = f64::INFINITY;
        for (l, v) in self.lp_lambda.iter().zip(d.lp.iter()) {
            if *v < 0.0 {
                alpha = alpha.min(-l / v);
            }
        }
        for (p, m) in self.psd.iter().zip(&d.psd) {
            let inv = p.lambda.map(|l| 1.0 / l.sqrt());
            let t = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * inv[i] * inv[j]);
            let ev = t.symmetric_eigenvalues().min();
            if ev < 0.0 {
                alpha = alpha.min(-1.0 / ev);
            }
        }
        alpha
    }
}

enum ScaledRow<'a> {
    LowRank(Vec<(f64, &'a DVector<f64>, DVector<f64>)>),
    Dense(&'a DMatrix<f64>, DMatrix<f64>),
}

impl Standard {
    fn build(p: &ConicProblem) -> Self {
        let m = p.constraints.len();
        let mut scalar_map = Vec::with_capacity(p.scalar_kinds.len());
        let mut nlp = 0usize;
        for kind in &p.scalar_kinds {
            match kind {
                ScalarKind::Nonneg => {
                    scalar_map.push(ScalarMap::Nonneg(nlp));
                    nlp += 1;
                }
                ScalarKind::Free => {
                    scalar_map.push(ScalarMap::Free(nlp, nlp + 1));
                    nlp += 2;
                }
            }
        }
        let n_user_lp = nlp;
        nlp += p.constraints.iter().filter(|c| c.relation != Relation::Eq).count();

        let mut lp_a = DMatrix::zeros(m, nlp);
        let mut b = DVector::zeros(m);
        let mut per_block: Vec<Vec<(usize, Vec<SymCoef>)>> = vec![Vec::new(); p.psd_sizes.len()];
        let mut slack = n_user_lp;
        let mut slacks = Vec::new();
        for (i, con) in p.constraints.iter().enumerate() {
            b[i] = con.rhs;
            for (v, coef) in &con.expr.scalar {
                match scalar_map[v.0] {
                    ScalarMap::Nonneg(k) => lp_a[(i, k)] += coef,
                    ScalarMap::Free(kp, kn) => {
                        lp_a[(i, kp)] += coef;
                        lp_a[(i, kn)] -= coef;
                    }
                }
            }
            for (v, coef) in &con.expr.psd {
                let rows = &mut per_block[v.0];
                match rows.last_mut() {
                    Some((r, list)) if *r == i => list.push(coef.clone()),
                    _ => rows.push((i, vec![coef.clone()])),
                }
            }
            match con.relation {
                Relation::Le => {
                    slacks.push((i, slack, 1.0));
                    slack += 1;
                }
                Relation::Ge => {
                    slacks.push((i, slack, -1.0));
                    slack += 1;
                }
                Relation::Eq => {}
            }
        }
        let mut blocks: Vec<Block> = p
            .psd_sizes
            .iter()
            .zip(per_block)
            .map(|(&n, rows)| Block { n, rows: rows.into_iter().map(|(i, list)| (i, merge(list, n))).collect() })
            .collect();

        let mut c = Vars::zeros(nlp, &p.psd_sizes);
        for (v, coef) in &p.objective.scalar {
            match scalar_map[v.0] {
                ScalarMap::Nonneg(k) => c.lp[k] += coef,
                ScalarMap::Free(kp, kn) => {
                    c.lp[kp] += coef;
                    c.lp[kn] -= coef;
                }
            }
        }
        for (v, coef) in &p.objective.psd {
            coef.add_to(&mut c.psd[v.0], 1.0);
        }

        // row equilibration over the user variables
        let mut norms = DVector::from_fn(m, |i, _| lp_a.row(i).norm_squared());
        for blk in &blocks {
            for (i, coef) in &blk.rows {
                norms[*i] += coef.frobenius_sq();
            }
        }
        let row_scale = norms.map(|v: f64| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 });
        for i in 0..m {
            lp_a.row_mut(i).scale_mut(row_scale[i]);
            b[i] *= row_scale[i];
        }
        for blk in &mut blocks {
            for (i, coef) in &mut blk.rows {
                *coef = coef.scaled(row_scale[*i]);
            }
        }
        // slacks enter after scaling so that they measure normalized residuals
        for (i, col, sign) in slacks {
            lp_a[(i, col)] = sign;
        }
        let cn = c.norm();
        let obj_scale = if cn > 0.0 { cn } else { 1.0 };
        let c = c.scaled(1.0 / obj_scale);

        Self { m, blocks, lp_a, c, b, scalar_map, row_scale, obj_scale }
    }

    fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.n).collect()
    }

    fn nlp(&self) -> usize {
        self.lp_a.ncols()
    }

    fn a(&self, v: &Vars) -> DVector<f64> {
        let mut out = &self.lp_a * &v.lp;
        for (blk, x) in self.blocks.iter().zip(&v.psd) {
            for (i, coef) in &blk.rows {
                out[*i] += coef.inner(x);
            }
        }
        out
    }

    fn at(&self, y: &DVector<f64>) -> Vars {
        let lp = self.lp_a.tr_mul(y);
        let psd = self
            .blocks
            .iter()
            .map(|blk| {
                let mut acc = DMatrix::zeros(blk.n, blk.n);
                for (i, coef) in &blk.rows {
                    if y[*i] != 0.0 {
                        coef.add_to(&mut acc, y[*i]);
                    }
                }
                acc
            })
            .collect();
        Vars { lp, psd }
    }

    fn schur(&self, sc: &Scaling) -> DMatrix<f64> {
        let d = sc.lp_w.component_mul(&sc.lp_w);
        let mut scaled_a = self.lp_a.clone();
        for (j, f) in d.iter().enumerate() {
            scaled_a.column_mut(j).scale_mut(*f);
        }
        let mut m = &scaled_a * self.lp_a.transpose();
        for (blk, p) in self.blocks.iter().zip(&sc.psd) {
            let rows: Vec<(usize, ScaledRow)> = blk
                .rows
                .iter()
                .map(|(i, coef)| {
                    let sr = match coef {
                        SymCoef::LowRank(t) => ScaledRow::LowRank(t.iter().map(|(w, u)| (*w, u, &p.g * u)).collect()),
                        SymCoef::Dense(a) => ScaledRow::Dense(a, &p.g * a * &p.g),
                    };
                    (*i, sr)
                })
                .collect();
            for (ia, (i, ra)) in rows.iter().enumerate() {
                for (j, rb) in rows[ia..].iter() {
                    let v = pair(ra, rb);
                    m[(*i, *j)] += v;
                    if i != j {
                        m[(*j, *i)] += v;
                    }
                }
            }
        }
        m
    }
}

fn pair(a: &ScaledRow, b: &ScaledRow) -> f64 {
    match (a, b) {
        (ScaledRow::LowRank(ta), ScaledRow::LowRank(tb)) => {
            let mut acc = 0.0;
            for (wa, ua, _) in ta {
                for (wb, _, gub) in tb {
                    let t = ua.dot(gub);
                    acc += wa * wb * t * t;
                }
            }
            acc
        }
        (ScaledRow::LowRank(ta), ScaledRow::Dense(_, gbg)) => ta.iter().map(|(w, u, _)| w * (gbg * *u).dot(u)).sum(),
        (ScaledRow::Dense(_, gag), ScaledRow::LowRank(tb)) => tb.iter().map(|(w, u, _)| w * (gag * *u).dot(u)).sum(),
        (ScaledRow::Dense(a, _), ScaledRow::Dense(_, gbg)) => a.dot(gbg),
    }
}

fn merge(list: Vec<SymCoef>, n: usize) -> SymCoef {
    if list.len() == 1 {
        return list.into_iter().next().expect("one element");
    }
    if list.iter().all(|c| matches!(c, SymCoef::LowRank(_))) {
        let mut terms = Vec::new();
        for c in list {
            if let SymCoef::LowRank(t) = c {
                terms.extend(t);
            }
        }
        return SymCoef::LowRank(terms);
    }
    let mut acc = DMatrix::zeros(n, n);
    for c in &list {
        c.add_to(&mut acc, 1.0);
    }
    SymCoef::Dense(acc)
}

/// Factorization of the Schur complement with a regularized fallback.
struct Factor {
    chol: Cholesky<f64, nalgebra::Dyn>,
    m: DMatrix<f64>,
}

impl Factor {
    fn new(m: DMatrix<f64>) -> Option<Self> {
        if let Some(chol) = Cholesky::new(m.clone()) {
            return Some(Self { chol, m });
        }
        let scale = m.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        let mut delta = 1e-14 * scale;
        for _ in 0..8 {
            let mut reg = m.clone();
            for i in 0..reg.nrows() {
                reg[(i, i)] += delta;
            }
            if let Some(chol) = Cholesky::new(reg) {
                return Some(Self { chol, m });
            }
            delta *= 100.0;
        }
        None
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut x = self.chol.solve(rhs);
        for _ in 0..2 {
            let r = rhs - &self.m * &x;
            x += self.chol.solve(&r);
        }
        x
    }
}

struct Direction {
    dx: Vars,
    ds: Vars,
    dy: DVector<f64>,
    dtau: f64,
    dkappa: f64,
    dx_scaled: Vars,
    ds_scaled: Vars,
}

struct Iterate {
    x: Vars,
    s: Vars,
    y: DVector<f64>,
    tau: f64,
    kappa: f64,
}

/// Solve a conic problem. Malformed input is an error; solver failure is
/// reported through [`SolveStatus`].
pub fn solve(problem: &ConicProblem, config: &SolverConfig) -> Result<ConicSolution> {
    problem.validate()?;
    let std = Standard::build(problem);
    let (it, status, iterations) = iterate(&std, config);
    Ok(assemble(problem, &std, &it, status, iterations))
}

struct Measures {
    pres: f64,
    dres: f64,
    gap: f64,
}

fn measures(std: &Standard, it: &Iterate, bnorm: f64, cnorm: f64) -> Measures {
    let tau = it.tau;
    let rp = std.a(&it.x) - &std.b * tau;
    let mut rd = std.at(&it.y);
    rd.axpy(1.0, &it.s);
    rd.axpy(-tau, &std.c);
    let pobj = std.c.dot(&it.x) / tau * std.obj_scale;
    let dobj = std.b.dot(&it.y) / tau * std.obj_scale;
    Measures {
        pres: rp.norm() / tau / (1.0 + bnorm),
        dres: rd.norm() / tau / (1.0 + cnorm),
        gap: (pobj - dobj).abs() / pobj.abs().max(1.0),
    }
}

impl Iterate {
    fn stepped(&self, alpha: f64, d: &Direction) -> Iterate {
        let mut x = self.x.clone();
        x.axpy(alpha, &d.dx);
        let mut s = self.s.clone();
        s.axpy(alpha, &d.ds);
        let mut y = self.y.clone();
        y.axpy(alpha, &d.dy, 1.0);
        Iterate { x, s, y, tau: self.tau + alpha * d.dtau, kappa: self.kappa + alpha * d.dkappa }
    }
}

fn iterate(std: &Standard, cfg: &SolverConfig) -> (Iterate, SolveStatus, usize) {
    let sizes = std.sizes();
    let nlp = std.nlp();
    let nu = (nlp + sizes.iter().sum::<usize>()) as f64;
    let bnorm = std.b.norm();
    let cnorm = std.c.norm();
    let mut it = Iterate { x: Vars::identity(nlp, &sizes), s: Vars::identity(nlp, &sizes), y: DVector::zeros(std.m), tau: 1.0, kappa: 1.0 };
    let Some(mut sc) = Scaling::new(&it.x, &it.s) else {
        return (it, SolveStatus::NumericalLimit, 0);
    };
    let infeas_tol = cfg.feas_tol;
    // best iterate by its worst optimality measure, returned if we stall
    let mut best: Option<(f64, Iterate)> = None;
    let give_up = |best: Option<(f64, Iterate)>, it: Iterate, k: usize| match best {
        Some((_, b)) => (b, SolveStatus::NumericalLimit, k),
        None => (it, SolveStatus::NumericalLimit, k),
    };

    for k in 0..cfg.max_iters {
        let ms = measures(std, &it, bnorm, cnorm);
        if ms.pres <= cfg.feas_tol && ms.dres <= cfg.feas_tol && ms.gap <= cfg.gap_tol {
            return (it, SolveStatus::Optimal, k);
        }
        let by = std.b.dot(&it.y);
        if by > 0.0 {
            let mut r = std.at(&it.y);
            r.axpy(1.0, &it.s);
            if r.norm() <= infeas_tol * by {
                return (it, SolveStatus::Infeasible, k);
            }
        }
        let cx = -std.c.dot(&it.x);
        if cx > 0.0 && std.a(&it.x).norm() <= infeas_tol * cx {
            return (it, SolveStatus::Unbounded, k);
        }
        let merit = ms.pres.max(ms.dres).max(ms.gap);
        if merit.is_finite() && best.as_ref().is_none_or(|(m, _)| merit < *m) {
            best = Some((merit, Iterate { x: it.x.clone(), s: it.s.clone(), y: it.y.clone(), tau: it.tau, kappa: it.kappa }));
        }

        let Some(fac) = Factor::new(std.schur(&sc)) else {
            return give_up(best, it, k);
        };
        let mu = (it.x.dot(&it.s) + it.tau * it.kappa) / (nu + 1.0);

        let dc = sc.d(&std.c);
        let adc = std.a(&dc);
        let u = fac.solve(&(&adc + &std.b));
        let cdc = std.c.dot(&dc);
        let b_minus_adc = &std.b - &adc;
        let denom = b_minus_adc.dot(&u) + cdc + it.kappa / it.tau;

        // Newton system with right-hand sides (r1, r2, r3) for the three linear
        // equations, q for the scaled complementarity and rtk for tau*kappa.
        let raw_dir = |r1: &DVector<f64>, r2: &Vars, r3: f64, q: &Vars, rtk: f64| -> Direction {
            let wq = sc.w(q);
            let v = Vars::lin_comb(1.0, &wq, -1.0, &sc.d(r2));
            let f = fac.solve(&(r1 - std.a(&v)));
            let dtau = (r3 + std.c.dot(&v) - b_minus_adc.dot(&f) + rtk / it.tau) / denom;
            let dy = f + &u * dtau;
            let mut ds = r2.clone();
            ds.axpy(-1.0, &std.at(&dy));
            ds.axpy(dtau, &std.c);
            let ds_scaled = sc.wt(&ds);
            let dx_scaled = Vars::lin_comb(1.0, q, -1.0, &ds_scaled);
            let dx = Vars::lin_comb(1.0, &wq, -1.0, &sc.d(&ds)).symmetrized();
            let ds = ds.symmetrized();
            let dkappa = (rtk - it.kappa * dtau) / it.tau;
            Direction { dx, ds, dy, dtau, dkappa, dx_scaled, ds_scaled }
        };
        let solve_dir = |eta: f64, rc: &Vars, rtk: f64| -> Direction {
            let r1 = (std.a(&it.x) - &std.b * it.tau) * (-eta);
            let mut r2 = std.at(&it.y);
            r2.axpy(1.0, &it.s);
            r2.axpy(-it.tau, &std.c);
            let r2 = r2.scaled(-eta);
            let r3 = -eta * (-std.c.dot(&it.x) + std.b.dot(&it.y) - it.kappa);
            let q = sc.lambda_div(rc);
            raw_dir(&r1, &r2, r3, &q, rtk)
        };

        let step_len = |d: &Direction| -> f64 {
            let mut a = sc.max_step(&d.dx_scaled).min(sc.max_step(&d.ds_scaled));
            if d.dtau < 0.0 {
                a = a.min(-it.tau / d.dtau);
            }
            if d.dkappa < 0.0 {
                a = a.min(-it.kappa / d.dkappa);
            }
            a
        };

        let lsq = sc.lambda_sq();
        let aff = solve_dir(1.0, &lsq.scaled(-1.0), -it.tau * it.kappa);
        let alpha_aff = step_len(&aff).min(1.0);
        let sigma = (1.0 - alpha_aff).powi(3).clamp(0.0, 1.0);

        let e = Vars::identity(nlp, &sizes);
        let mut rc = e.scaled(sigma * mu);
        rc.axpy(-1.0, &lsq);
        rc.axpy(-1.0, &aff.dx_scaled.jordan(&aff.ds_scaled));
        let rtk = sigma * mu - it.tau * it.kappa - aff.dtau * aff.dkappa;
        let dir = solve_dir(1.0 - sigma, &rc, rtk);
        let mut alpha = (0.99 * step_len(&dir)).min(1.0);
        if !alpha.is_finite() {
            return give_up(best, it, k);
        }

        // backtrack until the new point admits a scaling
        let mut accepted = None;
        for _ in 0..12 {
            if !(alpha > 1e-12) {
                break;
            }
            let trial = it.stepped(alpha, &dir);
            if trial.tau > 0.0 && trial.kappa > 0.0 {
                if let Some(next_sc) = Scaling::new(&trial.x, &trial.s) {
                    accepted = Some((trial, next_sc));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((next, next_sc)) = accepted else {
            return give_up(best, it, k);
        };
        it = next;
        sc = next_sc;
    }
    give_up(best, it, cfg.max_iters)
}

fn assemble(p: &ConicProblem, std: &Standard, it: &Iterate, status: SolveStatus, iterations: usize) -> ConicSolution {
    let (xs, ys, ss) = match status {
        SolveStatus::Infeasible => {
            let by = std.b.dot(&it.y);
            let zero = Vars::zeros(std.nlp(), &std.sizes());
            (zero, &it.y / by, it.s.scaled(1.0 / by))
        }
        SolveStatus::Unbounded => {
            let cx = -std.c.dot(&it.x);
            (it.x.scaled(1.0 / cx), DVector::zeros(std.m), Vars::zeros(std.nlp(), &std.sizes()))
        }
        _ => (it.x.scaled(1.0 / it.tau).symmetrized(), &it.y / it.tau, it.s.scaled(1.0 / it.tau)),
    };
    let scalars = std
        .scalar_map
        .iter()
        .map(|m| match *m {
            ScalarMap::Nonneg(k) => xs.lp[k],
            ScalarMap::Free(kp, kn) => xs.lp[kp] - xs.lp[kn],
        })
        .collect::<Vec<_>>();
    let y_scale = if status == SolveStatus::Infeasible { 1.0 } else { std.obj_scale };
    let duals: Vec<f64> = (0..std.m).map(|i| ys[i] * std.row_scale[i] * y_scale).collect();
    let dual_psd: Vec<DMatrix<f64>> = ss.psd.iter().map(|m| m * y_scale).collect();

    let primal_objective = p.objective.eval(&xs.psd, &scalars);
    let dual_objective: f64 = p.constraints.iter().zip(&duals).map(|(c, y)| c.rhs * y).sum();
    let bnorm = std.b.norm();
    let cnorm = std.c.norm();
    let ms = measures(std, it, bnorm, cnorm);
    ConicSolution {
        status,
        psd: xs.psd,
        scalars,
        duals,
        dual_psd,
        primal_objective,
        dual_objective,
        gap: (primal_objective - dual_objective).abs() / primal_objective.abs().max(1.0),
        primal_residual: ms.pres,
        dual_residual: ms.dres,
        iterations,
    }
}

#[cfg(test)]
#[path = "solver_tests.rs"]
mod tests;
