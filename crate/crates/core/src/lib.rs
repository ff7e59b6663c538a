pub mod configure;
pub mod donor;
pub mod error;
pub mod harness;
pub mod integrals;
pub mod lattice;
pub mod spectra;
pub mod spins;
pub mod units;

pub use error::{Error, Result};
