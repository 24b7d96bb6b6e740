//! Die-to-die interconnect models for electrical vs. optical design-space
//! exploration.

pub mod bw_density;
pub mod calibration;
pub mod elec_energy;
pub mod error;
pub mod fom;
pub mod opt_link;
pub mod plot;
pub mod rx_model;
pub mod scenario;
pub mod sweep;
pub mod tline;
pub mod units;

pub use error::{Error, Result};
