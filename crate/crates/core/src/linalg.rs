//! Dense complex helpers and the real embedding of Hermitian matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Result, SwiptError};

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;

/// Largest entry of `|m - m^H|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Real embedding `[[Re, -Im], [Im, Re]]` of a Hermitian matrix.
///
/// The embedding has every eigenvalue of `m` with doubled multiplicity, and
/// `m` is PSD exactly when its embedding is.
pub fn hermitian_embed(m: &CMatrix) -> Result<DMatrix<f64>> {
    if m.nrows() != m.ncols() {
        return Err(SwiptError::Dimension(format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let scale = m.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL * scale {
        return Err(SwiptError::NotHermitian(defect));
    }
    Ok(complex_embed(m))
}

/// Real embedding of an arbitrary (possibly rectangular) complex matrix.
///
/// Products are preserved: `embed(A B) = embed(A) embed(B)` and
/// `embed(A^H) = embed(A)^T`.
pub fn complex_embed(m: &CMatrix) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Inverse of [`hermitian_embed`].
///
/// Input that lacks the block structure is first projected onto it, which
/// maps a real PSD matrix to the embedding of a complex PSD matrix.
pub fn hermitian_unembed(x: &DMatrix<f64>) -> Result<CMatrix> {
    let n2 = x.nrows();
    if n2 != x.ncols() || !n2.is_multiple_of(2) {
        return Err(SwiptError::Dimension(format!("embedded matrix must be square with even size, got {}x{}", x.nrows(), x.ncols())));
    }
    let n = n2 / 2;
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re = 0.5 * (x[(i, j)] + x[(i + n, j + n)]);
            let im = 0.5 * (x[(i + n, j)] - x[(i, j + n)]);
            out[(i, j)] = Complex64::new(re, im);
        }
    }
    // symmetrize against rounding
    let adj = out.adjoint();
    Ok((out + adj) * Complex64::new(0.5, 0.0))
}

/// Stack `[Re v; Im v]`.
pub fn realify(v: &CVector) -> DVector<f64> {
    let n = v.len();
    DVector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

/// Stack `[-Im v; Re v]`, the image of `i v` under [`realify`].
pub fn realify_rotated(v: &CVector) -> DVector<f64> {
    let n = v.len();
    DVector::from_fn(2 * n, |i, _| if i < n { -v[i].im } else { v[i - n].re })
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in descending order.
pub fn hermitian_eigen_desc(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a real symmetric matrix in ascending order.
pub fn sym_eigenvalues_asc(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `v v^H`.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Real part of `v^H m v`.
pub fn quad_form(v: &CVector, m: &CMatrix) -> f64 {
    (v.adjoint() * m * v)[(0, 0)].re
}

/// Real part of the trace.
pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Rotate `v` by a global phase so that its first entry with magnitude above
/// `1e-14 * ||v||` is real and nonnegative.
pub fn canonical_phase(v: &CVector) -> CVector {
    let scale = v.norm();
    match v.iter().find(|z| z.norm() > 1e-14 * scale) {
        Some(z) => {
            let rot = z.conj() / z.norm();
            v.map(|x| x * rot)
        }
        None => v.clone(),
    }
}

/// Promote a real vector to a complex one.
pub fn to_complex(v: &DVector<f64>) -> CVector {
    v.map(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_embeds_to_identity() {
        let e = hermitian_embed(&CMatrix::identity(2, 2)).unwrap();
        assert_eq!(e, DMatrix::identity(4, 4));
    }

    #[test]
    fn embedding_of_rank_one_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        let spec = sym_eigenvalues_asc(&hermitian_embed(&m).unwrap());
        for (got, want) in spec.iter().zip([0.0, 0.0, 2.0, 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(hermitian_embed(&m), Err(SwiptError::NotHermitian(_))));
    }

    #[test]
    fn unembed_inverts_embed() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.5, -0.25), c(0.5, 0.25), c(1.0, 0.0)]);
        let back = hermitian_unembed(&hermitian_embed(&m).unwrap()).unwrap();
        assert_abs_diff_eq!((back - m).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn embedding_preserves_products() {
        let a = CMatrix::from_fn(3, 2, |i, j| c(i as f64 - 0.5 * j as f64, 0.3 * (i + j) as f64));
        let b = CMatrix::from_fn(2, 2, |i, j| c(1.0 + i as f64, j as f64 - 0.7));
        let lhs = complex_embed(&(&a * &b));
        let rhs = complex_embed(&a) * complex_embed(&b);
        assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((complex_embed(&a.adjoint()) - complex_embed(&a).transpose()).norm(), 0.0);
    }

    #[test]
    fn canonical_phase_makes_leading_entry_real() {
        let v = CVector::from_vec(vec![c(0.0, 0.0), c(0.0, 2.0), c(1.0, 1.0)]);
        let p = canonical_phase(&v);
        assert_abs_diff_eq!(p[1].im, 0.0, epsilon = 1e-15);
        assert!(p[1].re > 0.0);
        assert_abs_diff_eq!(p.norm(), v.norm(), epsilon = 1e-14);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
            prop::collection::vec(-10.0f64..10.0, 2 * n * n).prop_map(move |v| {
                let a = CMatrix::from_fn(n, n, |i, j| Complex64::new(v[i * n + j], v[n * n + i * n + j]));
                (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
            })
        }

        proptest! {
            #[test]
            fn embedding_round_trips(m in (1usize..6).prop_flat_map(hermitian)) {
                let back = hermitian_unembed(&hermitian_embed(&m).unwrap()).unwrap();
                prop_assert!((back - &m).norm() <= 1e-12 * m.norm().max(1.0));
            }

            #[test]
            fn embedding_doubles_the_spectrum(m in (1usize..6).prop_flat_map(hermitian)) {
                let mut complex: Vec<f64> = hermitian_eigen_desc(&m).0;
                complex.sort_by(f64::total_cmp);
                let real = sym_eigenvalues_asc(&hermitian_embed(&m).unwrap());
                for (i, l) in complex.iter().enumerate() {
                    prop_assert!((real[2 * i] - l).abs() <= 1e-9 * m.norm().max(1.0));
                    prop_assert!((real[2 * i + 1] - l).abs() <= 1e-9 * m.norm().max(1.0));
                }
            }
        }
    }
}
