//! Performance metrics evaluated directly from channels and transmit covariances.
//!
//! Rates are spectral efficiencies in bit/s/Hz; energy efficiencies are the
//! corresponding ratios per watt of consumed power.

use nalgebra::Cholesky;
use num_complex::Complex64;

use crate::error::{invalid, Result, SwiptError};
use crate::linalg::{quad_form, trace_re, CMatrix, CVector};
use crate::sysmodel::{EavesdropperModel, SecureChannels, SecureParams, SepChannels, SystemParams};

/// `log2(1 + |h^H w|^2 / noise)`.
pub fn rate_sep(h: &CVector, w: &CVector, noise_w: f64) -> f64 {
    (1.0 + h.dotc(w).norm_sqr() / noise_w).log2()
}

/// `eta (|g^H w|^2 + g^H W_E g)`.
pub fn harvested_sep(g: &CVector, w: &CVector, w_energy: &CMatrix, eta: f64) -> f64 {
    eta * (g.dotc(w).norm_sqr() + quad_form(g, w_energy))
}

/// Radiated power `||w||^2 + Tr W_E`.
pub fn radiated_power(w: &CVector, w_energy: &CMatrix) -> f64 {
    w.norm_squared() + trace_re(w_energy)
}

/// Consumed power `(||w||^2 + Tr W_E) / xi + N_T P_ant + P_c`.
pub fn total_power(w: &CVector, w_energy: &CMatrix, params: &SystemParams) -> f64 {
    radiated_power(w, w_energy) / params.xi + params.circuit_power()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoopObjectives {
    /// Information-receiver energy efficiency.
    pub ir_ee: f64,
    /// Energy-receiver energy efficiency.
    pub eh_ee: f64,
    /// Radiated power.
    pub p_tx: f64,
}

/// The three objectives of the energy-efficiency study, plus rate and harvested power.
pub fn moop_objectives(ch: &SepChannels, w: &CVector, w_energy: &CMatrix, params: &SystemParams) -> MoopObjectives {
    let p_tx = radiated_power(w, w_energy);
    if p_tx == 0.0 {
        return MoopObjectives { ir_ee: 0.0, eh_ee: 0.0, p_tx: 0.0 };
    }
    let p_tot = total_power(w, w_energy, params);
    MoopObjectives { ir_ee: rate_sep(&ch.h, w, params.noise_w) / p_tot, eh_ee: harvested_sep(&ch.g, w, w_energy, params.eta) / p_tot, p_tx }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(SwiptError::OutOfRange { name: "rho", value: rho, lo: 0.0, hi: 1.0 });
    }
    Ok(())
}

fn check_dims(ch: &SecureChannels, w: &[CMatrix], v: &CMatrix) -> Result<()> {
    let n = ch.n_tx();
    if w.len() != ch.h.len() {
        return Err(SwiptError::Dimension(format!("{} beamformers for {} users", w.len(), ch.h.len())));
    }
    if w.iter().chain(std::iter::once(v)).any(|m| m.shape() != (n, n)) {
        return Err(SwiptError::Dimension(format!("covariances must be {n}x{n}")));
    }
    Ok(())
}

/// Received SINR of desired user `k` after power splitting with ratio `rho`.
pub fn sinr_k(ch: &SecureChannels, w: &[CMatrix], v: &CMatrix, rho: f64, k: usize, params: &SecureParams) -> Result<f64> {
    check_dims(ch, w, v)?;
    check_rho(rho)?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    let h = &ch.h[k];
    let signal = quad_form(h, &w[k]);
    let interference: f64 = (0..w.len()).filter(|&j| j != k).map(|j| quad_form(h, &w[j])).sum::<f64>() + quad_form(h, v);
    Ok(rho * signal / (rho * (interference + params.sigma_ant_w) + params.sigma_s_w))
}

/// Interference covariance seen by roaming receiver `m` when decoding user `k`.
pub(crate) fn eavesdropper_interference(
    ch: &SecureChannels,
    w: &[CMatrix],
    v: &CMatrix,
    m: usize,
    k: usize,
    params: &SecureParams,
) -> CMatrix {
    let g = &ch.g[m];
    let n_rx = g.ncols();
    let mut cov = g.adjoint() * v * g + CMatrix::identity(n_rx, n_rx) * Complex64::new(params.sigma_ant_w, 0.0);
    if params.eavesdropper == EavesdropperModel::SingleUser {
        for (j, wj) in w.iter().enumerate() {
            if j != k {
                cov += g.adjoint() * wj * g;
            }
        }
    }
    cov
}

/// `ln det(A)` of a Hermitian positive definite matrix via Cholesky.
fn ln_det_pd(a: CMatrix) -> Result<f64> {
    let chol = Cholesky::new(a).ok_or_else(|| SwiptError::Degenerate("matrix is not positive definite".into()))?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|z| z.re.ln()).sum::<f64>())
}

/// `log2 det(I + (Sigma_m + sigma_s^2 I)^{-1} G_m^H W_k G_m)`, an upper bound
/// on what roaming receiver `m` can decode about user `k`.
pub fn eav_rate_upper(ch: &SecureChannels, w: &[CMatrix], v: &CMatrix, m: usize, k: usize, params: &SecureParams) -> Result<f64> {
    check_dims(ch, w, v)?;
    let g = &ch.g[m];
    let n_rx = g.ncols();
    let q = eavesdropper_interference(ch, w, v, m, k, params) + CMatrix::identity(n_rx, n_rx) * Complex64::new(params.sigma_s_w, 0.0);
    let chol = Cholesky::new(q).ok_or_else(|| SwiptError::Degenerate("eavesdropper noise covariance".into()))?;
    let s = g.adjoint() * &w[k] * g;
    let l = chol.l();
    let half = l.solve_lower_triangular(&s).ok_or_else(|| SwiptError::Degenerate("singular noise factor".into()))?;
    let whitened = l.solve_lower_triangular(&half.adjoint()).ok_or_else(|| SwiptError::Degenerate("singular noise factor".into()))?;
    let sym = (&whitened + whitened.adjoint()) * Complex64::new(0.5, 0.0);
    let arg = CMatrix::identity(n_rx, n_rx) + sym;
    Ok(ln_det_pd(arg)? / std::f64::consts::LN_2)
}

/// `[R_k - max_m R_eav]^+`.
pub fn secrecy_rate(rate: f64, eav_rates: &[f64]) -> f64 {
    let worst = eav_rates.iter().copied().fold(0.0f64, f64::max);
    (rate - worst).max(0.0)
}

/// Power harvested by desired user `k` from the `1 - rho` branch.
pub fn harvested_desired(ch: &SecureChannels, w: &[CMatrix], v: &CMatrix, rho: f64, k: usize, params: &SecureParams) -> Result<f64> {
    check_dims(ch, w, v)?;
    check_rho(rho)?;
    let h = &ch.h[k];
    let rx: f64 = w.iter().map(|wj| quad_form(h, wj)).sum::<f64>() + quad_form(h, v) + params.sigma_ant_w;
    Ok(params.eta * (1.0 - rho) * rx)
}

/// Power harvested by roaming receiver `m` with splitting ratio `rho_roaming`.
pub fn harvested_roaming(
    ch: &SecureChannels,
    w: &[CMatrix],
    v: &CMatrix,
    rho_roaming: f64,
    m: usize,
    params: &SecureParams,
) -> Result<f64> {
    check_dims(ch, w, v)?;
    check_rho(rho_roaming)?;
    let g = &ch.g[m];
    let rx: f64 = w.iter().map(|wj| trace_re(&(g.adjoint() * wj * g))).sum::<f64>()
        + trace_re(&(g.adjoint() * v * g))
        + g.ncols() as f64 * params.sigma_ant_w;
    Ok(params.eta * (1.0 - rho_roaming) * rx)
}

/// Quality-of-service summary of a secure allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct SecureQoS {
    pub sinr: Vec<f64>,
    pub rate: Vec<f64>,
    /// Indexed `[m][k]`.
    pub eav_rate_upper: Vec<Vec<f64>>,
    pub secrecy: Vec<f64>,
    pub harvested: Vec<f64>,
    /// Harvested by roaming receivers that devote all power to harvesting.
    pub harvested_roaming: Vec<f64>,
}

impl SecureQoS {
    pub fn mean_secrecy(&self) -> f64 {
        self.secrecy.iter().sum::<f64>() / self.secrecy.len().max(1) as f64
    }

    pub fn total_harvested(&self) -> f64 {
        self.harvested.iter().chain(&self.harvested_roaming).sum()
    }
}

pub fn secure_qos(ch: &SecureChannels, w: &[CMatrix], v: &CMatrix, rho: &[f64], params: &SecureParams) -> Result<SecureQoS> {
    let k_n = ch.h.len();
    if rho.len() != k_n {
        return Err(invalid("rho", "one splitting ratio per desired user"));
    }
    let mut sinr = Vec::with_capacity(k_n);
    let mut harvested = Vec::with_capacity(k_n);
    for k in 0..k_n {
        sinr.push(sinr_k(ch, w, v, rho[k], k, params)?);
        harvested.push(harvested_desired(ch, w, v, rho[k], k, params)?);
    }
    let rate: Vec<f64> = sinr.iter().map(|s| (1.0 + s).log2()).collect();
    let mut eav = Vec::with_capacity(ch.g.len());
    for m in 0..ch.g.len() {
        eav.push((0..k_n).map(|k| eav_rate_upper(ch, w, v, m, k, params)).collect::<Result<Vec<_>>>()?);
    }
    let secrecy = (0..k_n)
        .map(|k| {
            let col: Vec<f64> = eav.iter().map(|row| row[k]).collect();
            secrecy_rate(rate[k], &col)
        })
        .collect();
    let harvested_roaming = (0..ch.g.len()).map(|m| harvested_roaming(ch, w, v, 0.0, m, params)).collect::<Result<Vec<_>>>()?;
    Ok(SecureQoS { sinr, rate, eav_rate_upper: eav, secrecy, harvested, harvested_roaming })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::outer;
    use crate::sysmodel::stream_rng;
    use approx::assert_relative_eq;
    use rand_distr::{Distribution, StandardNormal};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e1(n: usize) -> CVector {
        CVector::from_fn(n, |i, _| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    #[test]
    fn rate_example() {
        let w = e1(3) * c(3f64.sqrt(), 0.0);
        assert_relative_eq!(rate_sep(&e1(3), &w, 1.0), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn harvest_example() {
        let mut we = CMatrix::zeros(3, 3);
        we[(0, 0)] = c(2.0, 0.0);
        we[(1, 1)] = c(5.0, 0.0);
        let zero = CVector::zeros(3);
        assert_relative_eq!(harvested_sep(&e1(3), &zero, &we, 0.8), 1.6, max_relative = 1e-14);
    }

    #[test]
    fn harvest_matches_monte_carlo() {
        let n = 3;
        let a = CMatrix::from_fn(n, n, |i, j| c(0.3 * i as f64 + 0.1, 0.2 * j as f64 - 0.1));
        let we = &a * a.adjoint();
        let g = CVector::from_vec(vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.7, -0.4)]);
        let mut rng = stream_rng(5, 0, 0);
        let draws = 100_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let z = CVector::from_fn(n, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                c(re, im) * std::f64::consts::FRAC_1_SQRT_2
            });
            acc += g.dotc(&(&a * z)).norm_sqr();
        }
        let mc = 0.8 * acc / draws as f64;
        let exact = harvested_sep(&g, &CVector::zeros(n), &we, 0.8);
        assert_relative_eq!(mc, exact, max_relative = 0.01);
    }

    #[test]
    fn idle_power_of_preset() {
        let p = SystemParams::table_2_1();
        assert_relative_eq!(total_power(&CVector::zeros(8), &CMatrix::zeros(8, 8), &p), 1.6, max_relative = 1e-12);
    }

    fn scalar_channels(h: f64, g: f64) -> SepChannels {
        SepChannels { h: CVector::from_element(1, c(h, 0.0)), g: CVector::from_element(1, c(g, 0.0)), d_info_m: 1.0, d_energy_m: 1.0 }
    }

    #[test]
    fn single_antenna_objectives() {
        let mut p = SystemParams::table_2_1();
        p.n_tx = 1;
        let ch = scalar_channels(1.0, 1.0);
        let w = CVector::from_element(1, c(1.0, 0.0));
        let obj = moop_objectives(&ch, &w, &CMatrix::zeros(1, 1), &p);
        let p_tot = total_power(&w, &CMatrix::zeros(1, 1), &p);
        assert_relative_eq!(p_tot, 3.575, max_relative = 1e-12);
        assert_relative_eq!(obj.eh_ee, 0.8 / 3.575, max_relative = 1e-12);
        assert_relative_eq!(obj.ir_ee, (1.0 + 1.0 / p.noise_w).log2() / 3.575, max_relative = 1e-12);
        assert_relative_eq!(obj.p_tx, 1.0);
    }

    #[test]
    fn zero_signal_objectives() {
        let p = SystemParams::table_2_1();
        let ch = SepChannels::generate(&p, 1, 0).unwrap();
        let obj = moop_objectives(&ch, &CVector::zeros(8), &CMatrix::zeros(8, 8), &p);
        assert_eq!(obj, MoopObjectives { ir_ee: 0.0, eh_ee: 0.0, p_tx: 0.0 });
    }

    fn tiny_secure() -> (SecureChannels, SecureParams) {
        let mut p = SecureParams::table_3_1(2);
        p.n_rx = 1;
        p.k_desired = 1;
        p.m_roaming = 1;
        p.gamma_req = vec![10.0];
        p.r_max = vec![vec![1.0]];
        p.p_req1_w = vec![0.0];
        p.p_req2_w = vec![0.0];
        p.sigma_ant_w = 1.0;
        p.sigma_s_w = 1.0;
        let ch = SecureChannels {
            h: vec![CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)])],
            g: vec![CMatrix::from_vec(2, 1, vec![c(0.5, 0.0), c(0.5, 0.5)])],
            d_desired_m: vec![2.0],
            d_roaming_m: vec![2.0],
        };
        (ch, p)
    }

    #[test]
    fn sinr_vanishes_without_information_branch() {
        let (ch, p) = tiny_secure();
        let w = vec![CMatrix::identity(2, 2)];
        assert_eq!(sinr_k(&ch, &w, &CMatrix::zeros(2, 2), 0.0, 0, &p).unwrap(), 0.0);
        assert!(sinr_k(&ch, &w, &CMatrix::zeros(2, 2), 1.2, 0, &p).is_err());
    }

    #[test]
    fn sinr_single_user_closed_form() {
        let (ch, p) = tiny_secure();
        let w = vec![outer(&ch.h[0])];
        let v = CMatrix::identity(2, 2) * c(0.5, 0.0);
        // |h|^2 = 2, h^H W h = 4, h^H V h = 1
        let got = sinr_k(&ch, &w, &v, 0.5, 0, &p).unwrap();
        assert_relative_eq!(got, 0.5 * 4.0 / (0.5 * (1.0 + 1.0) + 1.0), max_relative = 1e-14);
    }

    #[test]
    fn eavesdropper_rate_examples() {
        let (ch, p) = tiny_secure();
        let v = CMatrix::identity(2, 2);
        assert_relative_eq!(eav_rate_upper(&ch, &[CMatrix::zeros(2, 2)], &v, 0, 0, &p).unwrap(), 0.0, epsilon = 1e-15);
        // scalar receiver: log2(1 + g^H W g / (g^H V g + sigma_ant + sigma_s))
        let w = vec![outer(&ch.h[0])];
        let g = ch.g[0].column(0).into_owned();
        let want = (1.0 + quad_form(&g, &w[0]) / (quad_form(&g, &v) + 2.0)).log2();
        assert_relative_eq!(eav_rate_upper(&ch, &w, &v, 0, 0, &p).unwrap(), want, max_relative = 1e-13);
    }

    #[test]
    fn eavesdropper_rate_matches_eigenvalue_oracle() {
        let mut p = SecureParams::table_3_1(4);
        p.sigma_ant_w = 0.3;
        p.sigma_s_w = 0.7;
        let full = SecureChannels::generate(&p, 3, 0).unwrap();
        let ch = SecureChannels {
            h: full.h.iter().map(|h| h * c(30.0, 0.0)).collect(),
            g: full.g.iter().map(|g| g * c(30.0, 0.0)).collect(),
            ..full
        };
        let w: Vec<CMatrix> = ch.h.iter().map(|h| outer(h) * c(2.0, 0.0)).collect();
        let v = CMatrix::from_fn(4, 4, |i, j| if i == j { c(0.5 + i as f64, 0.0) } else { c(0.1, 0.0) });
        for m in 0..2 {
            for k in 0..3 {
                let g = &ch.g[m];
                let q = g.adjoint() * &v * g + CMatrix::identity(2, 2) * c(1.0, 0.0);
                let s = g.adjoint() * &w[k] * g;
                // det(I + Q^{-1} S) = det(Q + S) / det(Q), each 2x2 expanded directly
                let det2 = |a: &CMatrix| (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).re;
                let want = (det2(&(&q + &s)) / det2(&q)).log2();
                assert_relative_eq!(eav_rate_upper(&ch, &w, &v, m, k, &p).unwrap(), want, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn single_user_detection_adds_interference() {
        let mut p = SecureParams::table_3_1(4);
        let ch = SecureChannels::generate(&p, 3, 0).unwrap();
        let w: Vec<CMatrix> = ch.h.iter().map(|h| outer(h) * c(1e4, 0.0)).collect();
        let v = CMatrix::identity(4, 4) * c(10.0, 0.0);
        let joint = eav_rate_upper(&ch, &w, &v, 0, 1, &p).unwrap();
        p.eavesdropper = EavesdropperModel::SingleUser;
        let single = eav_rate_upper(&ch, &w, &v, 0, 1, &p).unwrap();
        assert!(single < joint);
    }

    #[test]
    fn secrecy_examples() {
        assert_relative_eq!(secrecy_rate(3.0, &[1.0]), 2.0);
        assert_eq!(secrecy_rate(0.5, &[1.0]), 0.0);
        assert_relative_eq!(secrecy_rate(11f64.log2(), &[1.0, 0.2]), 2.459, max_relative = 1e-3);
    }

    #[test]
    fn harvested_power_of_desired_and_roaming_receivers() {
        let (ch, p) = tiny_secure();
        let w = vec![outer(&ch.h[0])];
        let v = CMatrix::zeros(2, 2);
        // h^H W h = 4, sigma_ant = 1
        assert_relative_eq!(harvested_desired(&ch, &w, &v, 0.25, 0, &p).unwrap(), 0.5 * 0.75 * 5.0, max_relative = 1e-14);
        let g = ch.g[0].column(0).into_owned();
        let want = 0.5 * (quad_form(&g, &w[0]) + 1.0);
        assert_relative_eq!(harvested_roaming(&ch, &w, &v, 0.0, 0, &p).unwrap(), want, max_relative = 1e-14);
    }

    #[test]
    fn qos_summary_is_consistent() {
        let (ch, p) = tiny_secure();
        let w = vec![outer(&ch.h[0]) * c(3.0, 0.0)];
        let v = CMatrix::identity(2, 2);
        let q = secure_qos(&ch, &w, &v, &[0.5], &p).unwrap();
        assert_relative_eq!(q.rate[0], (1.0 + q.sinr[0]).log2());
        assert_relative_eq!(q.secrecy[0], (q.rate[0] - q.eav_rate_upper[0][0]).max(0.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn objectives_ignore_global_phase(phase in 0.0f64..std::f64::consts::TAU, seed in 0u64..50) {
                let p = SystemParams::table_2_1();
                let ch = SepChannels::generate(&p, seed, 0).unwrap();
                let w = ch.h.map(|z| z * c(0.1, 0.05));
                let we = outer(&ch.g) * c(2.0, 0.0);
                let rot = Complex64::from_polar(1.0, phase);
                let a = moop_objectives(&ch, &w, &we, &p);
                let b = moop_objectives(&ch, &w.map(|z| z * rot), &we, &p);
                prop_assert!((a.ir_ee - b.ir_ee).abs() <= 1e-12 * a.ir_ee.abs().max(1.0));
                prop_assert!((a.eh_ee - b.eh_ee).abs() <= 1e-12 * a.eh_ee.abs().max(1.0));
                prop_assert!((a.p_tx - b.p_tx).abs() <= 1e-12 * a.p_tx.max(1.0));
            }
        }
    }
}
