//! Conic programs with known answers, used by the solver self-test.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::problem::{ConicProblem, LinExpr, Relation, ScalarKind, SymCoef};
use super::solver::{ConicSolution, SolveStatus};
use crate::linalg::sym_eigenvalues_asc;

/// Expected outcome of a battery case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expected {
    /// Solved to optimality with the given objective value.
    Optimal(f64),
    Infeasible,
    Unbounded,
}

impl Expected {
    pub fn status(self) -> SolveStatus {
        match self {
            Expected::Optimal(_) => SolveStatus::Optimal,
            Expected::Infeasible => SolveStatus::Infeasible,
            Expected::Unbounded => SolveStatus::Unbounded,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatteryCase {
    pub name: String,
    pub problem: ConicProblem,
    pub expected: Expected,
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    m.qr().q()
}

fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    (&m + m.transpose()) * 0.5
}

/// Random program built around a strictly complementary primal-dual pair,
/// so the optimal value is known in advance.
pub fn planted_instance(seed: u64) -> (ConicProblem, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = [rng.gen_range(2..5usize), rng.gen_range(1..4usize)];
    let nlp = 2usize;
    let m = rng.gen_range(1..5usize);
    let mut p = ConicProblem::new();
    let blocks: Vec<_> = sizes.iter().map(|&n| p.add_psd(n)).collect();
    let scal: Vec<_> = (0..nlp).map(|_| p.add_nonneg()).collect();

    let mut x0 = Vec::new();
    let mut s0 = Vec::new();
    for &n in &sizes {
        let q = random_orthogonal(&mut rng, n);
        let r = rng.gen_range(1..=n);
        let xd = DVector::from_fn(n, |i, _| if i < r { rng.gen_range(0.5..2.0) } else { 0.0 });
        let sd = DVector::from_fn(n, |i, _| if i < r { 0.0 } else { rng.gen_range(0.5..2.0) });
        x0.push(&q * DMatrix::from_diagonal(&xd) * q.transpose());
        s0.push(&q * DMatrix::from_diagonal(&sd) * q.transpose());
    }
    let xl = [rng.gen_range(0.5..2.0), 0.0];
    let sl = [0.0, rng.gen_range(0.5..2.0)];
    let y0: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let mut c_psd = s0.clone();
    let mut c_lp = sl.to_vec();
    for &yi in &y0 {
        let a: Vec<DMatrix<f64>> = sizes.iter().map(|&n| random_sym(&mut rng, n)).collect();
        let al: Vec<f64> = (0..nlp).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut expr = LinExpr::new();
        let mut rhs = 0.0;
        for (k, am) in a.iter().enumerate() {
            rhs += am.dot(&x0[k]);
            c_psd[k] += am * yi;
            expr.add_psd(blocks[k], SymCoef::dense(am.clone()));
        }
        for (k, av) in al.iter().enumerate() {
            rhs += av * xl[k];
            c_lp[k] += av * yi;
            expr.add_scalar(scal[k], *av);
        }
        p.add_constraint(expr, Relation::Eq, rhs);
    }
    let mut obj = LinExpr::new();
    for (k, cm) in c_psd.iter().enumerate() {
        obj.add_psd(blocks[k], SymCoef::dense(cm.clone()));
    }
    for (k, cv) in c_lp.iter().enumerate() {
        obj.add_scalar(scal[k], *cv);
    }
    p.set_objective(obj);
    let value: f64 = c_psd.iter().zip(&x0).map(|(c, x)| c.dot(x)).sum::<f64>() + c_lp[0] * xl[0];
    (p, value)
}

/// Small programs whose solution follows from hand calculation.
pub fn analytic_cases() -> Vec<BatteryCase> {
    let mut cases = Vec::new();

    let mut p = ConicProblem::new();
    let x = p.add_nonneg();
    p.set_objective(LinExpr::new().scalar(x, 1.0));
    p.add_constraint(LinExpr::new().scalar(x, 1.0), Relation::Ge, 3.0);
    cases.push(BatteryCase { name: "scalar lower bound".into(), problem: p, expected: Expected::Optimal(3.0) });

    // smallest eigenvalue of a symmetric matrix as min <C, X> over unit-trace X
    let c = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
    let mut p = ConicProblem::new();
    let x = p.add_psd(3);
    p.set_objective(LinExpr::new().psd(x, SymCoef::dense(c)));
    p.add_constraint(LinExpr::new().psd(x, SymCoef::identity(3)), Relation::Eq, 1.0);
    cases.push(BatteryCase { name: "minimum eigenvalue".into(), problem: p, expected: Expected::Optimal(2.0 - 2f64.sqrt()) });

    // max 2 x_12 over 2x2 PSD X with unit diagonal
    let mut p = ConicProblem::new();
    let x = p.add_psd(2);
    p.set_objective(LinExpr::new().psd(x, SymCoef::entry(2, 0, 1).scaled(-2.0)));
    p.add_constraint(LinExpr::new().psd(x, SymCoef::entry(2, 0, 0)), Relation::Eq, 1.0);
    p.add_constraint(LinExpr::new().psd(x, SymCoef::entry(2, 1, 1)), Relation::Eq, 1.0);
    cases.push(BatteryCase { name: "unit-diagonal correlation".into(), problem: p, expected: Expected::Optimal(-2.0) });

    // min x subject to [[x, 1], [1, y]] PSD and y <= 4, so x >= 1/4
    let mut p = ConicProblem::new();
    let x = p.add_psd(2);
    p.set_objective(LinExpr::new().psd(x, SymCoef::entry(2, 0, 0)));
    p.add_constraint(LinExpr::new().psd(x, SymCoef::entry(2, 0, 1)), Relation::Eq, 1.0);
    p.add_constraint(LinExpr::new().psd(x, SymCoef::entry(2, 1, 1)), Relation::Le, 4.0);
    cases.push(BatteryCase { name: "hyperbolic bound".into(), problem: p, expected: Expected::Optimal(0.25) });

    let mut p = ConicProblem::new();
    let x = p.add_nonneg();
    p.set_objective(LinExpr::new().scalar(x, -1.0));
    p.add_constraint(LinExpr::new().scalar(x, 1.0), Relation::Le, 4.0);
    cases.push(BatteryCase { name: "upper bound with nonpositive dual".into(), problem: p, expected: Expected::Optimal(-4.0) });

    let mut p = ConicProblem::new();
    let x = p.add_psd(2);
    p.set_objective(LinExpr::new());
    p.add_constraint(LinExpr::new().psd(x, SymCoef::identity(2)), Relation::Eq, -1.0);
    cases.push(BatteryCase { name: "negative trace".into(), problem: p, expected: Expected::Infeasible });

    let mut p = ConicProblem::new();
    let a = p.add_nonneg();
    let b = p.add_nonneg();
    p.set_objective(LinExpr::new().scalar(a, -1.0));
    p.add_constraint(LinExpr::new().scalar(a, 1.0).scalar(b, -1.0), Relation::Eq, 0.0);
    cases.push(BatteryCase { name: "unbounded ray".into(), problem: p, expected: Expected::Unbounded });

    cases
}

/// Largest violation of the infeasibility or unboundedness certificate carried
/// by `sol`; `None` for other statuses.
///
/// An infeasibility ray must satisfy `b^T y = 1`, sign conditions on `y` and
/// `-sum_i y_i a_i` in the dual cone. An unbounded ray must satisfy
/// `<c, x> = -1`, `a_i(x)` with the sign of its row relation and `x` in the cone.
pub fn certificate_residual(problem: &ConicProblem, sol: &ConicSolution) -> Option<f64> {
    match sol.status {
        SolveStatus::Infeasible => Some(farkas_residual(problem, &sol.duals)),
        SolveStatus::Unbounded => Some(ray_residual(problem, &sol.psd, &sol.scalars)),
        _ => None,
    }
}

fn farkas_residual(problem: &ConicProblem, y: &[f64]) -> f64 {
    let mut worst = (problem.constraints.iter().zip(y).map(|(c, yi)| c.rhs * yi).sum::<f64>() - 1.0).abs();
    let mut blocks: Vec<DMatrix<f64>> = problem.psd_sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    let mut scalars = vec![0.0; problem.scalar_kinds.len()];
    for (con, &yi) in problem.constraints.iter().zip(y) {
        let sign_violation = match con.relation {
            Relation::Eq => 0.0,
            Relation::Ge => -yi,
            Relation::Le => yi,
        };
        worst = worst.max(sign_violation);
        for (v, coef) in &con.expr.psd {
            coef.add_to(&mut blocks[v.0], -yi);
        }
        for (v, a) in &con.expr.scalar {
            scalars[v.0] -= yi * a;
        }
    }
    for b in &blocks {
        if b.nrows() > 0 {
            worst = worst.max(-sym_eigenvalues_asc(b)[0]);
        }
    }
    for (s, kind) in scalars.iter().zip(&problem.scalar_kinds) {
        worst = worst.max(match kind {
            ScalarKind::Nonneg => -s,
            ScalarKind::Free => s.abs(),
        });
    }
    worst
}

fn ray_residual(problem: &ConicProblem, psd: &[DMatrix<f64>], scalars: &[f64]) -> f64 {
    let mut worst = (problem.objective.eval(psd, scalars) + 1.0).abs();
    for con in &problem.constraints {
        let ax = con.expr.eval(psd, scalars);
        worst = worst.max(match con.relation {
            Relation::Eq => ax.abs(),
            Relation::Ge => -ax,
            Relation::Le => ax,
        });
    }
    for b in psd {
        if b.nrows() > 0 {
            worst = worst.max(-sym_eigenvalues_asc(b)[0]);
        }
    }
    for (s, kind) in scalars.iter().zip(&problem.scalar_kinds) {
        if *kind == ScalarKind::Nonneg {
            worst = worst.max(-s);
        }
    }
    worst
}
