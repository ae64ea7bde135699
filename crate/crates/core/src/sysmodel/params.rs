use crate::error::{invalid, Result, SwiptError};

/// Linear power in watts from dBm.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watt_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Large-scale propagation settings shared by both system models.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub carrier_hz: f64,
    pub antenna_gain_dbi: f64,
    pub rician_factor_db: f64,
    pub d_ref_m: f64,
    pub d_max_m: f64,
    /// Distance where the path-loss slope changes from free space to 35 dB/decade.
    pub breakpoint_m: f64,
}

impl Propagation {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0) {
            return Err(invalid("carrier_hz", "must be positive"));
        }
        if !(self.d_ref_m > 0.0) {
            return Err(invalid("d_ref_m", "must be positive"));
        }
        if !(self.d_ref_m < self.d_max_m) {
            return Err(invalid("d_max_m", "must exceed d_ref_m"));
        }
        if !(self.breakpoint_m > 0.0) {
            return Err(invalid("breakpoint_m", "must be positive"));
        }
        if !self.rician_factor_db.is_finite() || !self.antenna_gain_dbi.is_finite() {
            return Err(invalid("propagation", "gains must be finite"));
        }
        Ok(())
    }
}

/// Single-user system with one information receiver and one energy receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub n_tx: usize,
    pub bandwidth_hz: f64,
    /// Circuit power per antenna.
    pub p_ant_w: f64,
    /// Static circuit power.
    pub p_c_w: f64,
    /// Power amplifier drain efficiency in `(0, 1]`.
    pub xi: f64,
    pub p_max_w: f64,
    /// Energy conversion efficiency in `[0, 1]`.
    pub eta: f64,
    pub noise_w: f64,
    pub propagation: Propagation,
}

impl SystemParams {
    /// Simulation setting of the energy-efficiency study.
    pub fn table_2_1() -> Self {
        Self {
            n_tx: 8,
            bandwidth_hz: 200e3,
            p_ant_w: 75e-3,
            p_c_w: 1.0,
            xi: 0.4,
            p_max_w: 1.0,
            eta: 0.8,
            noise_w: dbm_to_watt(-47.0),
            propagation: Propagation {
                carrier_hz: 470e6,
                antenna_gain_dbi: 10.0,
                rician_factor_db: 3.0,
                d_ref_m: 1.0,
                d_max_m: 10.0,
                breakpoint_m: 5.0,
            },
        }
    }

    /// `N_T P_ant + P_c`.
    pub fn circuit_power(&self) -> f64 {
        self.n_tx as f64 * self.p_ant_w + self.p_c_w
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tx == 0 {
            return Err(invalid("n_tx", "need at least one antenna"));
        }
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(SwiptError::OutOfRange { name: "xi", value: self.xi, lo: 0.0, hi: 1.0 });
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(SwiptError::OutOfRange { name: "eta", value: self.eta, lo: 0.0, hi: 1.0 });
        }
        if !(self.p_max_w > 0.0) {
            return Err(invalid("p_max_w", "must be positive"));
        }
        if !(self.noise_w > 0.0) {
            return Err(invalid("noise_w", "must be positive"));
        }
        if !(self.p_ant_w >= 0.0 && self.p_c_w >= 0.0) {
            return Err(invalid("circuit power", "must be nonnegative"));
        }
        self.propagation.validate()
    }
}

/// How a roaming receiver treats the signals meant for other desired users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EavesdropperModel {
    /// Joint decoding; only artificial noise and thermal noise interfere.
    #[default]
    MultiUser,
    /// Single-user decoding; the other users' streams add to the interference.
    SingleUser,
}

/// Multi-user secure system with `K` desired and `M` roaming receivers.
#[derive(Debug, Clone, PartialEq)]
pub struct SecureParams {
    pub n_tx: usize,
    /// Antennas per roaming receiver.
    pub n_rx: usize,
    pub k_desired: usize,
    pub m_roaming: usize,
    /// Antenna noise power.
    pub sigma_ant_w: f64,
    /// Signal processing noise power after power splitting.
    pub sigma_s_w: f64,
    /// Minimum SINR per desired user (linear).
    pub gamma_req: Vec<f64>,
    /// Maximum tolerable eavesdropping rate, indexed `[m][k]` in bit/s/Hz.
    pub r_max: Vec<Vec<f64>>,
    /// Harvested-power requirement per desired user.
    pub p_req1_w: Vec<f64>,
    /// Harvested-power requirement per roaming receiver.
    pub p_req2_w: Vec<f64>,
    pub eta: f64,
    /// Optional transmit budget; only used to reject hopeless instances early.
    pub p_max_w: Option<f64>,
    pub eavesdropper: EavesdropperModel,
    pub propagation: Propagation,
}

impl SecureParams {
    /// Simulation setting of the secure-communication study.
    pub fn table_3_1(n_tx: usize) -> Self {
        let k = 3;
        let m = 2;
        Self {
            n_tx,
            n_rx: 2,
            k_desired: k,
            m_roaming: m,
            sigma_ant_w: dbm_to_watt(-124.0),
            sigma_s_w: dbm_to_watt(-23.0),
            gamma_req: vec![db_to_linear(10.0); k],
            r_max: vec![vec![1.0; k]; m],
            p_req1_w: vec![dbm_to_watt(0.0); k],
            p_req2_w: vec![dbm_to_watt(0.0); m],
            eta: 0.5,
            p_max_w: None,
            eavesdropper: EavesdropperModel::MultiUser,
            propagation: Propagation {
                carrier_hz: 470e6,
                antenna_gain_dbi: 10.0,
                rician_factor_db: 3.0,
                d_ref_m: 2.0,
                d_max_m: 50.0,
                breakpoint_m: 5.0,
            },
        }
    }

    /// Same setting with every SINR target set to `gamma_db`.
    pub fn with_gamma_db(mut self, gamma_db: f64) -> Self {
        self.gamma_req = vec![db_to_linear(gamma_db); self.k_desired];
        self
    }

    pub fn with_n_tx(mut self, n_tx: usize) -> Self {
        self.n_tx = n_tx;
        self
    }

    /// `psi = 2^{r_max}` for roaming receiver `m` and desired user `k`.
    pub fn psi(&self, m: usize, k: usize) -> f64 {
        2f64.powf(self.r_max[m][k])
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rx == 0 {
            return Err(invalid("n_rx", "need at least one receive antenna"));
        }
        if self.n_tx <= self.n_rx {
            return Err(invalid("n_tx", "must exceed n_rx"));
        }
        if self.k_desired == 0 {
            return Err(invalid("k_desired", "need at least one desired user"));
        }
        if self.gamma_req.len() != self.k_desired || self.p_req1_w.len() != self.k_desired {
            return Err(invalid("gamma_req", "one entry per desired user"));
        }
        if self.p_req2_w.len() != self.m_roaming || self.r_max.len() != self.m_roaming {
            return Err(invalid("p_req2_w", "one entry per roaming receiver"));
        }
        if self.gamma_req.iter().any(|g| !(*g > 0.0)) {
            return Err(invalid("gamma_req", "must be positive"));
        }
        for row in &self.r_max {
            if row.len() != self.k_desired || row.iter().any(|r| !(*r > 0.0)) {
                return Err(invalid("r_max", "must be positive for every (m, k)"));
            }
        }
        if self.p_req1_w.iter().chain(&self.p_req2_w).any(|p| !(*p >= 0.0)) {
            return Err(invalid("p_req", "must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.eta) || self.eta == 0.0 {
            return Err(SwiptError::OutOfRange { name: "eta", value: self.eta, lo: 0.0, hi: 1.0 });
        }
        if !(self.sigma_ant_w >= 0.0 && self.sigma_s_w > 0.0) {
            return Err(invalid("noise", "sigma_s must be positive and sigma_ant nonnegative"));
        }
        if let Some(p) = self.p_max_w {
            if !(p > 0.0) {
                return Err(invalid("p_max_w", "must be positive"));
            }
        }
        self.propagation.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dbm_conversion_examples() {
        assert_relative_eq!(dbm_to_watt(30.0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watt(0.0), 1e-3, max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watt(-47.0), 1.9953e-8, max_relative = 1e-4);
        assert_relative_eq!(watt_to_dbm(dbm_to_watt(-23.0)), -23.0, max_relative = 1e-12);
    }

    #[test]
    fn presets_are_valid() {
        SystemParams::table_2_1().validate().unwrap();
        SecureParams::table_3_1(5).validate().unwrap();
        SecureParams::table_3_1(8).validate().unwrap();
    }

    #[test]
    fn circuit_power_of_preset() {
        assert_relative_eq!(SystemParams::table_2_1().circuit_power(), 1.6, max_relative = 1e-12);
    }

    #[test]
    fn invalid_settings_are_rejected() {
        let mut p = SystemParams::table_2_1();
        p.xi = 0.0;
        assert!(p.validate().is_err());
        let mut p = SystemParams::table_2_1();
        p.eta = 1.5;
        assert!(p.validate().is_err());
        let mut p = SystemParams::table_2_1();
        p.propagation.d_max_m = 0.5;
        assert!(p.validate().is_err());
        let mut s = SecureParams::table_3_1(2);
        assert!(s.validate().is_err());
        s = SecureParams::table_3_1(5);
        s.r_max[0][0] = 0.0;
        assert!(s.validate().is_err());
    }
}
