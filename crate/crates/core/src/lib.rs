//! Desk-scale simulation and estimation toolkit for quantum delocalization
//! of a levitated nanoparticle.
//!
//! The crate covers the full chain of such an experiment on synthetic data:
//! closed-form Gaussian-state propagation through trap-stiffness pulse
//! protocols ([`dynamics`]), stochastic generation of homodyne measurement
//! records ([`sim`]), backward high-pass conditioning and retrodiction
//! filtering ([`filter`], [`retrodiction`]), ensemble-variance model fits
//! and decoherence-based calibration ([`fitting`]), physically constrained
//! noise subtraction with Monte Carlo confidence intervals ([`inference`]),
//! and stray-force compensation ([`compensation`]).
//!
//! All state quantities are expressed in zero-point units of the full-power
//! trap; conversion to meters happens only in reporting.

pub mod compensation;
pub mod dynamics;
pub mod error;
pub mod filter;
pub mod fitting;
pub mod inference;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod params;
pub mod retrodiction;
pub mod sim;

pub use error::{Error, Result};
pub use params::PhysicalParams;
