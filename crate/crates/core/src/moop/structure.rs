//! Rank-one extraction and structural checks on optimal beamformers.

use crate::linalg::{canonical_phase, hermitian_eigen_desc, CMatrix, CVector};
use num_complex::Complex64;

/// Principal component `sqrt(l1) u1` of a Hermitian PSD matrix under the
/// canonical phase, together with the eigenvalue ratio `l2 / l1`.
///
/// A matrix with nonpositive top eigenvalue yields the zero vector and ratio 0.
pub fn rank_one_extract(m: &CMatrix) -> (CVector, f64) {
    let n = m.nrows();
    if n == 0 {
        return (CVector::zeros(0), 0.0);
    }
    let (values, vectors) = hermitian_eigen_desc(m);
    if values[0] <= 0.0 {
        return (CVector::zeros(n), 0.0);
    }
    let ratio = if n > 1 { values[1].max(0.0) / values[0] } else { 0.0 };
    let v = vectors.column(0) * Complex64::new(values[0].sqrt(), 0.0);
    (canonical_phase(&v), ratio)
}

/// Sine of the angle between the lines spanned by `a` and `b`; zero when
/// either vector vanishes.
pub fn line_angle(a: &CVector, b: &CVector) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let ua = a / Complex64::new(na, 0.0);
    let ub = b / Complex64::new(nb, 0.0);
    let proj = &ua * ua.dotc(&ub);
    (ub - proj).norm().min(1.0)
}

/// Norm of the component of `w` outside `span{h, g}`, relative to `||w||`.
pub fn span_residual(w: &CVector, h: &CVector, g: &CVector) -> f64 {
    let nw = w.norm();
    if nw == 0.0 {
        return 0.0;
    }
    // Gram-Schmidt on {h, g}
    let mut basis: Vec<CVector> = Vec::with_capacity(2);
    for v in [h, g] {
        let mut r = v.clone();
        for q in &basis {
            r -= q * q.dotc(&r);
        }
        let nr = r.norm();
        if nr > 1e-12 * v.norm() {
            basis.push(r / Complex64::new(nr, 0.0));
        }
    }
    let mut r = w.clone();
    for q in &basis {
        r -= q * q.dotc(&r);
    }
    r.norm() / nw
}

/// Residuals of the structure of an optimal information beamformer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureReport {
    /// Relative norm of the beamformer outside `span{h, g}`.
    pub span_residual: f64,
    /// Sine of the angle to `h`.
    pub angle_to_info: f64,
    /// Sine of the angle to `g`.
    pub angle_to_energy: f64,
}

impl StructureReport {
    /// Whether the residuals expected for the given IR-EE and EH-EE weights
    /// are below `tol`: collinear with `h` without an EH-EE weight, collinear
    /// with `g` without an IR-EE weight, and inside `span{h, g}` otherwise.
    pub fn holds(&self, ir_weight: f64, eh_weight: f64, tol: f64) -> bool {
        match (ir_weight > 0.0, eh_weight > 0.0) {
            (true, false) => self.angle_to_info <= tol,
            (false, true) => self.angle_to_energy <= tol,
            _ => self.span_residual <= tol,
        }
    }
}

pub fn kkt_structure_check(w_info: &CVector, h: &CVector, g: &CVector) -> StructureReport {
    StructureReport {
        span_residual: span_residual(w_info, h, g),
        angle_to_info: line_angle(w_info, h),
        angle_to_energy: line_angle(w_info, g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::outer;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn extracts_rank_one_up_to_phase() {
        let v = CVector::from_vec(vec![c(0.0, 1.0), c(2.0, -1.0), c(0.5, 0.5)]);
        let (w, ratio) = rank_one_extract(&outer(&v));
        assert!(ratio <= 1e-14);
        assert!((outer(&w) - outer(&v)).norm() <= 1e-12);
        assert!(w[0].im.abs() <= 1e-14 && w[0].re >= 0.0);
    }

    #[test]
    fn identity_has_unit_ratio() {
        let (_, ratio) = rank_one_extract(&CMatrix::identity(2, 2));
        assert!((ratio - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn zero_matrix_gives_zero_vector() {
        let (w, ratio) = rank_one_extract(&CMatrix::zeros(3, 3));
        assert_eq!(w.norm(), 0.0);
        assert_eq!(ratio, 0.0);
    }

    #[test]
    fn structure_residuals() {
        let h = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let g = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 1.0), c(0.0, 0.0)]);
        let w = &h * c(0.0, 3.0);
        let r = kkt_structure_check(&w, &h, &g);
        assert!(r.angle_to_info <= 1e-15);
        assert!((r.angle_to_energy - 1.0).abs() <= 1e-15);
        assert!(r.holds(1.0, 0.0, 1e-9));
        let mixed = &h + &g * c(0.5, 0.0);
        assert!(kkt_structure_check(&mixed, &h, &g).span_residual <= 1e-15);
        let outside = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = kkt_structure_check(&outside, &h, &g);
        assert!((r.span_residual - 0.5f64.sqrt()).abs() <= 1e-14);
        assert!(!r.holds(0.5, 0.5, 1e-6));
    }
}
