//! Fixed benchmark instances for the conic solver and the allocators.

use swipt_core::moop::{MoopAnchors, MoopConfig};
use swipt_core::sysmodel::{SecureChannels, SecureParams, SepChannels, SystemParams};
use swipt_core::Result;

pub const SEED: u64 = 2024;

/// Separated-receiver instance with its normalization anchors.
pub fn moop_instance(trial: u64) -> Result<(SepChannels, SystemParams, MoopAnchors)> {
    let params = SystemParams::table_2_1();
    let ch = SepChannels::generate(&params, SEED, trial)?;
    let anchors = MoopAnchors::compute(&ch, &params, &MoopConfig::default())?;
    Ok((ch, params, anchors))
}

/// Secure instance with `n_tx` antennas and every SINR target at `gamma_db`.
pub fn secure_instance(n_tx: usize, gamma_db: f64, trial: u64) -> Result<(SecureChannels, SecureParams)> {
    let params = SecureParams::table_3_1(n_tx).with_gamma_db(gamma_db);
    let ch = SecureChannels::generate(&params, SEED, trial)?;
    Ok((ch, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_build() {
        assert!(moop_instance(0).is_ok());
        assert_eq!(secure_instance(5, 10.0, 0).unwrap().0.n_tx(), 5);
    }
}
