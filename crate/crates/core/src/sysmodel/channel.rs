use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::params::{db_to_linear, Propagation, SecureParams, SystemParams};
use crate::error::{invalid, Result, SwiptError};
use crate::linalg::{CMatrix, CVector};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Linear power gain of a link of length `d_m`.
///
/// Free-space loss up to the breakpoint and 35 dB/decade beyond it; the
/// antenna gain is applied once per link.
pub fn path_loss_gain(d_m: f64, prop: &Propagation) -> Result<f64> {
    if !d_m.is_finite() || d_m < prop.d_ref_m {
        return Err(SwiptError::OutOfRange { name: "distance", value: d_m, lo: prop.d_ref_m, hi: f64::INFINITY });
    }
    let free_space = |d: f64| 20.0 * (4.0 * PI * d * prop.carrier_hz / SPEED_OF_LIGHT).log10();
    let loss_db =
        if d_m <= prop.breakpoint_m { free_space(d_m) } else { free_space(prop.breakpoint_m) + 35.0 * (d_m / prop.breakpoint_m).log10() };
    Ok(db_to_linear(prop.antenna_gain_dbi - loss_db))
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Rician-faded `rows x cols` channel with an all-ones line-of-sight part.
pub fn draw_rician<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, rician_factor_db: f64, link_gain: f64) -> CMatrix {
    let kappa = db_to_linear(rician_factor_db);
    let los = (kappa / (kappa + 1.0)).sqrt();
    let nlos = (1.0 / (kappa + 1.0)).sqrt();
    let amp = link_gain.sqrt();
    CMatrix::from_fn(rows, cols, |_, _| {
        let z = complex_normal(rng);
        (Complex64::new(los, 0.0) + z * nlos) * amp
    })
}

/// `n` distances drawn uniformly on `[d_ref, d_max]`.
pub fn place_receivers<R: Rng + ?Sized>(rng: &mut R, n: usize, d_ref: f64, d_max: f64) -> Result<Vec<f64>> {
    if !(d_ref <= d_max) || !d_ref.is_finite() || !d_max.is_finite() {
        return Err(invalid("d_max_m", "must be at least d_ref_m"));
    }
    Ok((0..n).map(|_| d_ref + (d_max - d_ref) * rng.gen::<f64>()).collect())
}

/// Generator whose output depends only on `(seed, trial, stream)`.
pub fn stream_rng(seed: u64, trial: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.set_word_pos(u128::from(stream) << 40);
    rng
}

const STREAM_DISTANCES: u64 = 0;

fn link_stream(index: usize) -> u64 {
    1 + index as u64
}

fn nonzero_rician(rng: &mut ChaCha20Rng, rows: usize, cols: usize, prop: &Propagation, gain: f64) -> CMatrix {
    loop {
        let m = draw_rician(rng, rows, cols, prop.rician_factor_db, gain);
        if m.norm() > 0.0 && m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return m;
        }
    }
}

/// One realization of the single-user system.
#[derive(Debug, Clone, PartialEq)]
pub struct SepChannels {
    /// Transmitter to information receiver.
    pub h: CVector,
    /// Transmitter to energy receiver.
    pub g: CVector,
    pub d_info_m: f64,
    pub d_energy_m: f64,
}

impl SepChannels {
    pub fn generate(params: &SystemParams, seed: u64, trial: u64) -> Result<Self> {
        params.validate()?;
        let prop = &params.propagation;
        let mut drng = stream_rng(seed, trial, STREAM_DISTANCES);
        let d = place_receivers(&mut drng, 2, prop.d_ref_m, prop.d_max_m)?;
        let gh = path_loss_gain(d[0], prop)?;
        let gg = path_loss_gain(d[1], prop)?;
        let h = nonzero_rician(&mut stream_rng(seed, trial, link_stream(0)), params.n_tx, 1, prop, gh);
        let g = nonzero_rician(&mut stream_rng(seed, trial, link_stream(1)), params.n_tx, 1, prop, gg);
        Ok(Self { h: h.column(0).into_owned(), g: g.column(0).into_owned(), d_info_m: d[0], d_energy_m: d[1] })
    }

    pub fn n_tx(&self) -> usize {
        self.h.len()
    }
}

/// One realization of the multi-user secure system.
#[derive(Debug, Clone, PartialEq)]
pub struct SecureChannels {
    /// Transmitter to each desired user.
    pub h: Vec<CVector>,
    /// Transmitter to each roaming receiver, `N_T x N_R`.
    pub g: Vec<CMatrix>,
    pub d_desired_m: Vec<f64>,
    pub d_roaming_m: Vec<f64>,
}

impl SecureChannels {
    pub fn generate(params: &SecureParams, seed: u64, trial: u64) -> Result<Self> {
        params.validate()?;
        let prop = &params.propagation;
        let (k, m) = (params.k_desired, params.m_roaming);
        let mut drng = stream_rng(seed, trial, STREAM_DISTANCES);
        let d = place_receivers(&mut drng, k + m, prop.d_ref_m, prop.d_max_m)?;
        let mut h = Vec::with_capacity(k);
        for (i, &dist) in d[..k].iter().enumerate() {
            let gain = path_loss_gain(dist, prop)?;
            let mut rng = stream_rng(seed, trial, link_stream(i));
            h.push(nonzero_rician(&mut rng, params.n_tx, 1, prop, gain).column(0).into_owned());
        }
        let mut g = Vec::with_capacity(m);
        for (j, &dist) in d[k..].iter().enumerate() {
            let gain = path_loss_gain(dist, prop)?;
            let mut rng = stream_rng(seed, trial, link_stream(k + j));
            g.push(nonzero_rician(&mut rng, params.n_tx, params.n_rx, prop, gain));
        }
        Ok(Self { h, g, d_desired_m: d[..k].to_vec(), d_roaming_m: d[k..].to_vec() })
    }

    pub fn n_tx(&self) -> usize {
        self.h.first().map_or(0, |v| v.len())
    }

    /// Channels of the first `n_tx` transmit antennas.
    ///
    /// Realizations generated for a large array and truncated this way give
    /// paired channels for comparing array sizes.
    pub fn truncate_antennas(&self, n_tx: usize) -> Result<Self> {
        if n_tx == 0 || n_tx > self.n_tx() {
            return Err(invalid("n_tx", format!("cannot truncate {} antennas to {n_tx}", self.n_tx())));
        }
        Ok(Self {
            h: self.h.iter().map(|v| v.rows(0, n_tx).into_owned()).collect(),
            g: self.g.iter().map(|m| m.rows(0, n_tx).into_owned()).collect(),
            d_desired_m: self.d_desired_m.clone(),
            d_roaming_m: self.d_roaming_m.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn prop(gain_dbi: f64) -> Propagation {
        Propagation { carrier_hz: 470e6, antenna_gain_dbi: gain_dbi, rician_factor_db: 3.0, d_ref_m: 1.0, d_max_m: 10.0, breakpoint_m: 5.0 }
    }

    #[test]
    fn free_space_gain_at_one_metre() {
        let want = (SPEED_OF_LIGHT / (4.0 * PI * 470e6)).powi(2);
        assert_relative_eq!(path_loss_gain(1.0, &prop(0.0)).unwrap(), want, max_relative = 1e-12);
        assert_relative_eq!(want, 2.58e-3, max_relative = 2e-3);
    }

    #[test]
    fn path_loss_is_continuous_at_breakpoint() {
        let p = prop(10.0);
        let below = path_loss_gain(5.0 - 1e-9, &p).unwrap();
        let above = path_loss_gain(5.0 + 1e-9, &p).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-8);
    }

    #[test]
    fn slope_beyond_breakpoint() {
        let p = prop(10.0);
        let r = path_loss_gain(16.0, &p).unwrap() / path_loss_gain(8.0, &p).unwrap();
        assert_relative_eq!(r, 2f64.powf(-3.5), max_relative = 1e-12);
    }

    #[test]
    fn antenna_gain_is_applied_once() {
        let r = path_loss_gain(3.0, &prop(10.0)).unwrap() / path_loss_gain(3.0, &prop(0.0)).unwrap();
        assert_relative_eq!(r, 10.0, max_relative = 1e-12);
    }

    #[test]
    fn distance_below_reference_is_rejected() {
        assert!(matches!(path_loss_gain(0.5, &prop(0.0)), Err(SwiptError::OutOfRange { .. })));
    }

    #[test]
    fn huge_rician_factor_is_deterministic() {
        let mut rng = stream_rng(1, 0, 0);
        let m = draw_rician(&mut rng, 4, 3, 200.0, 2.0);
        for z in m.iter() {
            assert!((z - Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn unit_rician_factor_mean_power() {
        let mut rng = stream_rng(2, 0, 0);
        let m = draw_rician(&mut rng, 100_000, 1, 0.0, 3.0);
        let mean = m.iter().map(|z| z.norm_sqr()).sum::<f64>() / 1e5;
        assert_relative_eq!(mean, 3.0, max_relative = 0.02);
    }

    #[test]
    fn line_of_sight_fraction() {
        let mut rng = stream_rng(3, 0, 0);
        let m = draw_rician(&mut rng, 100_000, 1, 3.0, 1.0);
        let mean = m.iter().sum::<Complex64>() / 1e5;
        let power = m.iter().map(|z| z.norm_sqr()).sum::<f64>() / 1e5;
        assert_relative_eq!(mean.norm_sqr() / power, 0.666, max_relative = 0.01);
    }

    #[test]
    fn placement_examples() {
        let mut rng = stream_rng(4, 0, 0);
        assert_eq!(place_receivers(&mut rng, 3, 2.0, 2.0).unwrap(), vec![2.0; 3]);
        assert!(place_receivers(&mut rng, 0, 1.0, 10.0).unwrap().is_empty());
        let d = place_receivers(&mut rng, 100_000, 1.0, 10.0).unwrap();
        assert!(d.iter().all(|v| (1.0..=10.0).contains(v)));
        assert_relative_eq!(d.iter().sum::<f64>() / 1e5, 5.5, max_relative = 0.01);
        assert!(place_receivers(&mut rng, 1, 3.0, 2.0).is_err());
    }

    #[test]
    fn realizations_do_not_depend_on_generation_order() {
        let params = SystemParams::table_2_1();
        let forward: Vec<_> = (0..6).map(|t| SepChannels::generate(&params, 9, t).unwrap()).collect();
        let lone = SepChannels::generate(&params, 9, 5).unwrap();
        assert_eq!(forward[5], lone);
        assert_ne!(forward[4], forward[5]);
        let s = SecureParams::table_3_1(8);
        assert_eq!(SecureChannels::generate(&s, 9, 3).unwrap(), SecureChannels::generate(&s, 9, 3).unwrap());
    }

    #[test]
    fn truncation_keeps_leading_antennas() {
        let s = SecureParams::table_3_1(8);
        let full = SecureChannels::generate(&s, 1, 0).unwrap();
        let small = full.truncate_antennas(5).unwrap();
        assert_eq!(small.n_tx(), 5);
        assert_eq!(small.h[1][4], full.h[1][4]);
        assert_eq!(small.g[0][(4, 1)], full.g[0][(4, 1)]);
        assert!(full.truncate_antennas(9).is_err());
    }

    #[test]
    fn channel_energy_is_plausible() {
        let params = SystemParams::table_2_1();
        for t in 0..200 {
            let ch = SepChannels::generate(&params, 11, t).unwrap();
            for (v, d) in [(&ch.h, ch.d_info_m), (&ch.g, ch.d_energy_m)] {
                let gain = path_loss_gain(d, &params.propagation).unwrap();
                let ratio = v.norm_squared() / (params.n_tx as f64 * gain);
                assert!(ratio > 1e-3 && ratio < 20.0, "trial {t}: ratio {ratio}");
            }
        }
    }
}
