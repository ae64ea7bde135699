//! Change of variables that turns the energy-efficiency ratios into linear functions.

use crate::error::{invalid, Result, SwiptError};
use crate::linalg::{canonical_phase, hermitian_eigen_desc, outer, trace_re, CMatrix, CVector};
use crate::metrics::radiated_power;
use crate::sysmodel::SystemParams;
use num_complex::Complex64;

/// Covariances scaled by the inverse consumed power `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedVars {
    pub info: CMatrix,
    pub energy: CMatrix,
    /// Inverse of the consumed power, in 1/W.
    pub theta: f64,
}

impl LiftedVars {
    /// `Tr(info + energy) / xi + theta * circuit_power`, which equals one for
    /// any lifted allocation.
    pub fn budget(&self, params: &SystemParams) -> f64 {
        (trace_re(&self.info) + trace_re(&self.energy)) / params.xi + self.theta * params.circuit_power()
    }
}

pub fn lift(w_info: &CVector, w_energy: &CMatrix, params: &SystemParams) -> Result<LiftedVars> {
    let p_tot = radiated_power(w_info, w_energy) / params.xi + params.circuit_power();
    if !(p_tot > 0.0) {
        return Err(invalid("consumed power", "must be positive to lift"));
    }
    let theta = 1.0 / p_tot;
    let s = Complex64::new(theta, 0.0);
    Ok(LiftedVars { info: outer(w_info) * s, energy: w_energy * s, theta })
}

/// Inverse of [`lift`]. The beamformer is the principal eigenvector of the
/// unlifted information covariance under the canonical phase.
pub fn recover(lifted: &LiftedVars) -> Result<(CVector, CMatrix)> {
    if !(lifted.theta > 0.0) {
        return Err(SwiptError::Degenerate("cannot recover an allocation with zero theta".into()));
    }
    let s = Complex64::new(1.0 / lifted.theta, 0.0);
    let info = &lifted.info * s;
    let (values, vectors) = hermitian_eigen_desc(&info);
    let w = vectors.column(0) * Complex64::new(values[0].max(0.0).sqrt(), 0.0);
    Ok((canonical_phase(&w), &lifted.energy * s))
}

/// `(value - zero) / (star - zero)`.
pub fn normalize(value: f64, star: f64, zero: f64) -> Result<f64> {
    if star == zero {
        return Err(invalid("anchors", "best and worst values coincide"));
    }
    Ok((value - zero) / (star - zero))
}
