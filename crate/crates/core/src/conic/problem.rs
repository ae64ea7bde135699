//! Problem description for block-diagonal linear conic programs.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SwiptError};
use crate::linalg::{complex_embed, realify, realify_rotated, CMatrix, CVector};

/// Symmetric coefficient matrix of a linear functional `X -> <C, X>` on a PSD block.
#[derive(Debug, Clone, PartialEq)]
pub enum SymCoef {
    Dense(DMatrix<f64>),
    /// `sum_r weight_r * u_r u_r^T`.
    LowRank(Vec<(f64, DVector<f64>)>),
}

impl SymCoef {
    /// Dense coefficient; the input is symmetrized.
    pub fn dense(m: DMatrix<f64>) -> Self {
        let t = m.transpose();
        SymCoef::Dense((m + t) * 0.5)
    }

    pub fn identity(n: usize) -> Self {
        SymCoef::Dense(DMatrix::identity(n, n))
    }

    pub fn rank_one(weight: f64, u: DVector<f64>) -> Self {
        SymCoef::LowRank(vec![(weight, u)])
    }

    /// Coefficient selecting entry `(i, j)`, so that `<C, X> = X[i, j]`.
    pub fn entry(n: usize, i: usize, j: usize) -> Self {
        let e = |k: usize| DVector::from_fn(n, |r, _| if r == k { 1.0 } else { 0.0 });
        Self::bilinear(&e(i), &e(j))
    }

    /// Coefficient of `X -> a^T X b`.
    pub fn bilinear(a: &DVector<f64>, b: &DVector<f64>) -> Self {
        if a == b {
            return SymCoef::LowRank(vec![(1.0, a.clone())]);
        }
        SymCoef::LowRank(vec![(0.25, a + b), (-0.25, a - b)])
    }

    /// Coefficient of `W -> weight * h^H W h` acting on the real embedding of a
    /// Hermitian `W`.
    pub fn hermitian_rank_one(weight: f64, h: &CVector) -> Self {
        SymCoef::LowRank(vec![(0.5 * weight, realify(h)), (0.5 * weight, realify_rotated(h))])
    }

    /// Coefficient of `W -> Re Tr(C W)` acting on the real embedding of a Hermitian `W`.
    pub fn hermitian(c: &CMatrix) -> Self {
        SymCoef::Dense(complex_embed(c) * 0.5)
    }

    /// Coefficient of `W -> Tr W` acting on the real embedding of an `n x n` Hermitian `W`.
    pub fn hermitian_trace(n: usize) -> Self {
        SymCoef::Dense(DMatrix::identity(2 * n, 2 * n) * 0.5)
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            SymCoef::Dense(m) => Some(m.nrows()),
            SymCoef::LowRank(terms) => terms.first().map(|(_, u)| u.len()),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        match self {
            SymCoef::Dense(m) => SymCoef::Dense(m * a),
            SymCoef::LowRank(t) => SymCoef::LowRank(t.iter().map(|(w, u)| (w * a, u.clone())).collect()),
        }
    }

    /// `<C, X>`.
    pub fn inner(&self, x: &DMatrix<f64>) -> f64 {
        match self {
            SymCoef::Dense(m) => m.dot(x),
            SymCoef::LowRank(t) => t.iter().map(|(w, u)| w * (u.transpose() * x * u)[(0, 0)]).sum(),
        }
    }

    /// `target += a * C`.
    pub fn add_to(&self, target: &mut DMatrix<f64>, a: f64) {
        match self {
            SymCoef::Dense(m) => *target += m * a,
            SymCoef::LowRank(t) => {
                for (w, u) in t {
                    target.ger(a * w, u, u, 1.0);
                }
            }
        }
    }

    pub fn to_dense(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        self.add_to(&mut m, 1.0);
        m
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> f64 {
        match self {
            SymCoef::Dense(m) => m.norm_squared(),
            SymCoef::LowRank(t) => {
                let mut acc = 0.0;
                for (wa, ua) in t {
                    for (wb, ub) in t {
                        let d = ua.dot(ub);
                        acc += wa * wb * d * d;
                    }
                }
                acc.max(0.0)
            }
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            SymCoef::Dense(m) => m.iter().all(|v| v.is_finite()),
            SymCoef::LowRank(t) => t.iter().all(|(w, u)| w.is_finite() && u.iter().all(|v| v.is_finite())),
        }
    }
}

/// Handle to a PSD matrix variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PsdVar(pub(crate) usize);

impl PsdVar {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Handle to a scalar variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScalarVar(pub(crate) usize);

impl ScalarVar {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Handle to a constraint, used to read its multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConstraintId(pub(crate) usize);

impl ConstraintId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarKind {
    Nonneg,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Linear functional over the problem variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub(crate) psd: Vec<(PsdVar, SymCoef)>,
    pub(crate) scalar: Vec<(ScalarVar, f64)>,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn psd(mut self, var: PsdVar, coef: SymCoef) -> Self {
        self.psd.push((var, coef));
        self
    }

    pub fn scalar(mut self, var: ScalarVar, coef: f64) -> Self {
        self.scalar.push((var, coef));
        self
    }

    pub fn add_psd(&mut self, var: PsdVar, coef: SymCoef) {
        self.psd.push((var, coef));
    }

    pub fn add_scalar(&mut self, var: ScalarVar, coef: f64) {
        self.scalar.push((var, coef));
    }

    pub fn is_empty(&self) -> bool {
        self.psd.is_empty() && self.scalar.is_empty()
    }

    /// Value of the functional at a point given per block and per scalar.
    pub fn eval(&self, psd: &[DMatrix<f64>], scalars: &[f64]) -> f64 {
        let a: f64 = self.psd.iter().map(|(v, c)| c.inner(&psd[v.0])).sum();
        let b: f64 = self.scalar.iter().map(|(v, c)| c * scalars[v.0]).sum();
        a + b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub expr: LinExpr,
    pub relation: Relation,
    pub rhs: f64,
}

/// `min <objective, x>` subject to linear constraints, with `x` ranging over a
/// product of PSD blocks, nonnegative scalars and free scalars.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConicProblem {
    pub(crate) psd_sizes: Vec<usize>,
    pub(crate) scalar_kinds: Vec<ScalarKind>,
    pub(crate) objective: LinExpr,
    pub(crate) constraints: Vec<Constraint>,
}

impl ConicProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_psd(&mut self, n: usize) -> PsdVar {
        self.psd_sizes.push(n);
        PsdVar(self.psd_sizes.len() - 1)
    }

    pub fn add_nonneg(&mut self) -> ScalarVar {
        self.scalar_kinds.push(ScalarKind::Nonneg);
        ScalarVar(self.scalar_kinds.len() - 1)
    }

    pub fn add_free(&mut self) -> ScalarVar {
        self.scalar_kinds.push(ScalarKind::Free);
        ScalarVar(self.scalar_kinds.len() - 1)
    }

    pub fn set_objective(&mut self, expr: LinExpr) {
        self.objective = expr;
    }

    pub fn add_constraint(&mut self, expr: LinExpr, relation: Relation, rhs: f64) -> ConstraintId {
        self.constraints.push(Constraint { expr, relation, rhs });
        ConstraintId(self.constraints.len() - 1)
    }

    pub fn psd_sizes(&self) -> &[usize] {
        &self.psd_sizes
    }

    pub fn scalar_kinds(&self) -> &[ScalarKind] {
        &self.scalar_kinds
    }

    pub fn objective(&self) -> &LinExpr {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Check that every term refers to an existing variable with matching size.
    pub fn validate(&self) -> Result<()> {
        let check = |expr: &LinExpr, what: &str| -> Result<()> {
            for (v, c) in &expr.psd {
                let n = *self.psd_sizes.get(v.0).ok_or_else(|| SwiptError::Dimension(format!("{what}: unknown PSD block {}", v.0)))?;
                match c.dim() {
                    Some(d) if d != n => {
                        return Err(SwiptError::Dimension(format!("{what}: coefficient of size {d} on block {} of size {n}", v.0)))
                    }
                    _ => {}
                }
                if let SymCoef::Dense(m) = c {
                    if m.nrows() != m.ncols() {
                        return Err(SwiptError::Dimension(format!("{what}: non-square coefficient")));
                    }
                }
                if !c.is_finite() {
                    return Err(SwiptError::Degenerate(format!("{what}: non-finite coefficient")));
                }
            }
            for (v, c) in &expr.scalar {
                if v.0 >= self.scalar_kinds.len() {
                    return Err(SwiptError::Dimension(format!("{what}: unknown scalar {}", v.0)));
                }
                if !c.is_finite() {
                    return Err(SwiptError::Degenerate(format!("{what}: non-finite coefficient")));
                }
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for (i, c) in self.constraints.iter().enumerate() {
            check(&c.expr, &format!("constraint {i}"))?;
            if !c.rhs.is_finite() {
                return Err(SwiptError::Degenerate(format!("constraint {i}: non-finite right-hand side")));
            }
        }
        if self.psd_sizes.contains(&0) {
            return Err(SwiptError::Dimension("PSD block of size 0".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn entry_coefficient_reads_one_entry() {
        let x = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 5.0, 6.0, 3.0, 6.0, 9.0]);
        assert_abs_diff_eq!(SymCoef::entry(3, 0, 2).inner(&x), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(SymCoef::entry(3, 1, 1).inner(&x), 5.0, epsilon = 1e-14);
    }

    #[test]
    fn hermitian_coefficients_act_on_embedding() {
        use crate::linalg::{hermitian_embed, quad_form, trace_re};
        use num_complex::Complex64;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.2, -0.3), c(-0.4, 0.1), c(0.7, 0.0)]);
        let w = &a * a.adjoint();
        let x = hermitian_embed(&w).unwrap();
        let h = CVector::from_vec(vec![c(0.3, -1.2), c(2.0, 0.4)]);
        assert_abs_diff_eq!(SymCoef::hermitian_rank_one(2.0, &h).inner(&x), 2.0 * quad_form(&h, &w), epsilon = 1e-12);
        assert_abs_diff_eq!(SymCoef::hermitian(&(&h * h.adjoint())).inner(&x), quad_form(&h, &w), epsilon = 1e-12);
        assert_abs_diff_eq!(SymCoef::hermitian_trace(2).inner(&x), trace_re(&w), epsilon = 1e-12);
    }

    #[test]
    fn low_rank_matches_dense() {
        let a = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let b = DVector::from_vec(vec![0.0, 1.0, 3.0]);
        let c = SymCoef::bilinear(&a, &b);
        let dense = (&a * b.transpose() + &b * a.transpose()) * 0.5;
        assert_abs_diff_eq!((c.to_dense(3) - &dense).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.frobenius_sq(), dense.norm_squared(), epsilon = 1e-12);
    }

    #[test]
    fn validate_rejects_size_mismatch() {
        let mut p = ConicProblem::new();
        let x = p.add_psd(2);
        p.add_constraint(LinExpr::new().psd(x, SymCoef::identity(3)), Relation::Eq, 1.0);
        assert!(p.validate().is_err());
    }
}
