//! System parameters, units and channel generation.

mod channel;
mod params;

pub use channel::{draw_rician, path_loss_gain, place_receivers, stream_rng, SecureChannels, SepChannels, SPEED_OF_LIGHT};
pub use params::{db_to_linear, dbm_to_watt, linear_to_db, watt_to_dbm, EavesdropperModel, Propagation, SecureParams, SystemParams};
