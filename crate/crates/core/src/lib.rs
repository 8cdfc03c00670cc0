//! Dispersive permittivity models, discretized Helmholtz operators and
//! electromagnetic Green's functions at complex frequencies, together with
//! numerical certificates for their analytic properties.

pub mod banded;
pub mod cli;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod freespace;
pub mod helmholtz;
pub mod quad;
pub mod report;
pub mod spectral;
pub mod transforms;

pub use error::{Error, Result};
