//! Optimality diagnostics and plain-text export.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::problem::{ConicProblem, Relation, ScalarKind, SymCoef};
use super::solver::ConicSolution;

/// Residuals of the optimality conditions, each normalized by the size of the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    pub primal_res: f64,
    pub dual_res: f64,
    pub gap: f64,
    /// Smallest eigenvalue over all primal PSD blocks (`+inf` without blocks).
    pub min_eig: f64,
}

/// Recompute primal feasibility, dual feasibility and the duality gap of a
/// candidate pair from the problem data.
pub fn kkt_residuals(problem: &ConicProblem, sol: &ConicSolution) -> KktResiduals {
    let mut primal_res = 0.0f64;
    for con in &problem.constraints {
        let lhs = con.expr.eval(&sol.psd, &sol.scalars);
        let viol = match con.relation {
            Relation::Eq => (lhs - con.rhs).abs(),
            Relation::Ge => (con.rhs - lhs).max(0.0),
            Relation::Le => (lhs - con.rhs).max(0.0),
        };
        primal_res = primal_res.max(viol / (1.0 + con.rhs.abs()));
    }
    for (v, kind) in sol.scalars.iter().zip(&problem.scalar_kinds) {
        if *kind == ScalarKind::Nonneg {
            primal_res = primal_res.max(-v);
        }
    }

    let mut cmax = 0.0f64;
    let mut slack_psd: Vec<DMatrix<f64>> = problem.psd_sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    let mut slack_scalar = vec![0.0; problem.scalar_kinds.len()];
    for (v, c) in &problem.objective.psd {
        c.add_to(&mut slack_psd[v.0], 1.0);
    }
    for (v, c) in &problem.objective.scalar {
        slack_scalar[v.0] += c;
        cmax = cmax.max(c.abs());
    }
    for m in &slack_psd {
        cmax = cmax.max(m.amax());
    }
    let mut dual_res = 0.0f64;
    for (con, y) in problem.constraints.iter().zip(&sol.duals) {
        for (v, c) in &con.expr.psd {
            c.add_to(&mut slack_psd[v.0], -y);
        }
        for (v, c) in &con.expr.scalar {
            slack_scalar[v.0] -= c * y;
        }
        let sign_viol = match con.relation {
            Relation::Eq => 0.0,
            Relation::Ge => (-y).max(0.0),
            Relation::Le => y.max(0.0),
        };
        dual_res = dual_res.max(sign_viol);
    }
    for m in &slack_psd {
        let ev = m.clone().symmetric_eigenvalues().min();
        dual_res = dual_res.max(-ev);
    }
    for (s, kind) in slack_scalar.iter().zip(&problem.scalar_kinds) {
        let viol = match kind {
            ScalarKind::Nonneg => (-s).max(0.0),
            ScalarKind::Free => s.abs(),
        };
        dual_res = dual_res.max(viol);
    }
    dual_res /= 1.0 + cmax;

    let pobj = problem.objective.eval(&sol.psd, &sol.scalars);
    let dobj: f64 = problem.constraints.iter().zip(&sol.duals).map(|(c, y)| c.rhs * y).sum();
    let min_eig = sol.psd.iter().map(|m| m.clone().symmetric_eigenvalues().min()).fold(f64::INFINITY, f64::min);
    KktResiduals { primal_res, dual_res, gap: (pobj - dobj).abs() / pobj.abs().max(1.0), min_eig }
}

/// Plain-text dump of the problem data.
///
/// Row `0` is the objective and rows `1..=m` are the constraints. PSD blocks
/// are numbered from `1`; block `0` holds the scalars, with the scalar index
/// in the `i` column. Only the upper triangle of each coefficient is listed.
///
/// ```text
/// blocks <n_1> <n_2> ...
/// scalars <kind> ...
/// rhs <row> <le|eq|ge> <value>
/// <row> <block> <i> <j> <value>
/// ```
pub fn dump_triplets(problem: &ConicProblem) -> String {
    let mut out = String::new();
    let sizes: Vec<String> = problem.psd_sizes.iter().map(|n| n.to_string()).collect();
    let _ = writeln!(out, "blocks {}", sizes.join(" "));
    let kinds: Vec<&str> = problem
        .scalar_kinds
        .iter()
        .map(|k| match k {
            ScalarKind::Nonneg => "nonneg",
            ScalarKind::Free => "free",
        })
        .collect();
    let _ = writeln!(out, "scalars {}", kinds.join(" "));
    let emit = |out: &mut String, row: usize, expr: &super::problem::LinExpr| {
        for (v, c) in &expr.scalar {
            let _ = writeln!(out, "{row} 0 {} 0 {c:.17e}", v.0);
        }
        for (v, c) in &expr.psd {
            let n = problem.psd_sizes[v.0];
            let m = match c {
                SymCoef::Dense(m) => m.clone(),
                other => other.to_dense(n),
            };
            for i in 0..n {
                for j in i..n {
                    if m[(i, j)] != 0.0 {
                        let _ = writeln!(out, "{row} {} {i} {j} {:.17e}", v.0 + 1, m[(i, j)]);
                    }
                }
            }
        }
    };
    emit(&mut out, 0, &problem.objective);
    for (k, con) in problem.constraints.iter().enumerate() {
        let rel = match con.relation {
            Relation::Le => "le",
            Relation::Eq => "eq",
            Relation::Ge => "ge",
        };
        let _ = writeln!(out, "rhs {} {rel} {:.17e}", k + 1, con.rhs);
        emit(&mut out, k + 1, &con.expr);
    }
    out
}
