//! Physical parameters of the trapped nanoparticle.
//!
//! All dynamics run in zero-point units of the full-power trap: position in
//! units of z_zpf, momentum in units of p_zpf = ħ/z_zpf. The zero-point
//! length itself is only used when reporting lengths in meters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trap and noise parameters, all rates in rad/s (angular units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Mechanical angular frequency of the full-power trap.
    pub omega_m: f64,
    /// Photon-recoil decoherence rate at full power, in phonons/s.
    pub gamma_qba: f64,
    /// Detection efficiency, in (0, 1].
    pub eta: f64,
    /// Mean phonon occupancy of the initial (feedback-cooled) state.
    pub n_bar: f64,
    /// Mean stray force, as a rate of normalized momentum change.
    pub f0_mean: f64,
    /// Ensemble variance of the stray force across repetitions, (rad/s)².
    pub v_f0: f64,
    /// Zero-point length in meters, for reporting only.
    pub z_zpf: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_m > 0.0) {
            return Err(Error::invalid("omega_m must be positive"));
        }
        if !(self.gamma_qba >= 0.0) {
            return Err(Error::invalid("gamma_qba must be non-negative"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::invalid("eta must lie in (0, 1]"));
        }
        if !(self.n_bar >= 0.0) {
            return Err(Error::invalid("n_bar must be non-negative"));
        }
        if !(self.v_f0 >= 0.0) {
            return Err(Error::invalid("v_f0 must be non-negative"));
        }
        if !(self.z_zpf > 0.0) {
            return Err(Error::invalid("z_zpf must be positive"));
        }
        Ok(())
    }

    /// Initial variance V0 = n̄ + 1/2 of the thermal state.
    pub fn v0(&self) -> f64 {
        self.n_bar + 0.5
    }

    /// Measurement rate of the homodyne record, Γ_meas = η Γ_qba.
    pub fn gamma_meas(&self) -> f64 {
        self.eta * self.gamma_qba
    }

    /// Dimensionless backaction parameter Λ = 4 Γ_qba / Ω_m.
    pub fn lambda(&self) -> f64 {
        4.0 * self.gamma_qba / self.omega_m
    }
}

impl Default for PhysicalParams {
    /// Main-dataset values (56.5 kHz trap, 3.77 kHz recoil, η = 0.21,
    /// n̄ = 0.68, z_zpf = 15.6 pm), zero stray force.
    fn default() -> Self {
        use std::f64::consts::TAU;
        PhysicalParams {
            omega_m: TAU * 56.5e3,
            gamma_qba: TAU * 3.77e3,
            eta: 0.21,
            n_bar: 0.68,
            f0_mean: 0.0,
            v_f0: 0.0,
            z_zpf: 15.6e-12,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_consistent() {
        let p = PhysicalParams::default();
        p.validate().unwrap();
        assert!((p.v0() - 1.18).abs() < 1e-12);
        // 23.7e3 phonons/s quoted as a plain rate equals 2π × 3.77 kHz within 0.2%
        assert!((p.gamma_qba - 23.7e3).abs() / 23.7e3 < 2e-3);
        assert!((p.lambda() - 0.26690).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_values() {
        let mut p = PhysicalParams::default();
        p.eta = 0.0;
        assert!(p.validate().is_err());
        p = PhysicalParams::default();
        p.omega_m = -1.0;
        assert!(p.validate().is_err());
        p = PhysicalParams::default();
        p.n_bar = -0.1;
        assert!(p.validate().is_err());
    }
}
