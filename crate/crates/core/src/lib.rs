//! Resource allocation for simultaneous wireless information and power transfer.

// `!(x > 0.0)` also rejects NaN; several loops walk parallel per-user arrays
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod conic;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod moop;
pub mod secure;
pub mod sysmodel;

pub use error::{Result, SwiptError};
