//! Closed-form Gaussian-state propagation under trap-stiffness pulse
//! protocols.
//!
//! A pulse segment holds the trap at a constant stiffness, parameterized by
//! the frequency ratio r = Ω_m/Ω_e. In zero-point units of the full-power
//! trap the state flow over a segment of phase φ = Ω_e t is affine,
//!
//! ```text
//!   (z, p) -> M (z - z_eq, p) + (z_eq, 0),   M = [[cos φ, r sin φ],
//!                                                 [-sin φ / r, cos φ]]
//! ```
//!
//! with the stray-force equilibrium shift z_eq = f0 (r² - 1)/Ω_m. Photon
//! recoil adds a Gaussian covariance increment per segment, and the
//! ensemble effect of a repetition-to-repetition stray-force spread is
//! carried as a per-state force-sensitivity vector, materialized into a
//! covariance block only at readout. Segment durations are stored as phase
//! at the segment frequency so that quarter/half/full-period protocols are
//! exact for every r.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{Mat2, SymMat2, Vec2};
use crate::params::PhysicalParams;

/// Margin allowed below the Heisenberg bound det Σ >= 1/4 before a
/// covariance is rejected as non-physical.
pub const HEISENBERG_TOL: f64 = 1e-9;

/// Gaussian motional state in zero-point units.
///
/// `sens` is the sensitivity of the first moments to a unit stray force
/// (in seconds); the ensemble covariance contributed by a force spread
/// `v_f0` is `v_f0 * sens sensᵀ`, kept separate from the quantum covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub mean_z: f64,
    pub mean_p: f64,
    pub vz: f64,
    pub vp: f64,
    pub czp: f64,
    pub sens: [f64; 2],
}

impl GaussianState {
    /// Thermal state of the full-power trap with occupancy n̄.
    pub fn thermal(n_bar: f64) -> Result<Self> {
        if !(n_bar >= 0.0) {
            return Err(Error::invalid("thermal occupancy must be non-negative"));
        }
        let v = n_bar + 0.5;
        Ok(GaussianState {
            mean_z: 0.0,
            mean_p: 0.0,
            vz: v,
            vp: v,
            czp: 0.0,
            sens: [0.0, 0.0],
        })
    }

    pub fn covariance(&self) -> SymMat2 {
        SymMat2::new(self.vz, self.vp, self.czp)
    }

    /// Ensemble covariance block contributed by the stray-force spread.
    pub fn stray_covariance(&self, v_f0: f64) -> SymMat2 {
        SymMat2::outer(Vec2::new(self.sens[0], self.sens[1])).scale(v_f0)
    }

    /// Quantum covariance plus the stray-force ensemble block.
    pub fn total_covariance(&self, params: &PhysicalParams) -> SymMat2 {
        self.covariance().add(&self.stray_covariance(params.v_f0))
    }

    pub fn det(&self) -> f64 {
        self.covariance().det()
    }

    /// Mean motional energy (Ṽz + Ṽp)/2 in phonon units (zero-point = 1/2).
    pub fn energy(&self) -> f64 {
        0.5 * (self.vz + self.vp)
    }
}

/// One constant-stiffness stretch of the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSegment {
    /// Frequency ratio r = Ω_m / Ω_e of this segment, r > 0.
    pub ratio: f64,
    /// Duration as accumulated phase Ω_e t at the segment frequency.
    pub phase: f64,
}

impl PulseSegment {
    pub fn new(ratio: f64, phase: f64) -> Result<Self> {
        if !(ratio > 0.0) {
            return Err(Error::invalid("segment ratio must be positive"));
        }
        if !(phase >= 0.0) {
            return Err(Error::invalid("segment phase must be non-negative"));
        }
        Ok(PulseSegment { ratio, phase })
    }

    /// Wall-clock duration of the segment given the full-power frequency.
    pub fn duration(&self, omega_m: f64) -> f64 {
        self.phase * self.ratio / omega_m
    }
}

/// Ordered list of constant-stiffness segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseProtocol {
    pub segments: Vec<PulseSegment>,
}

impl PulseProtocol {
    pub fn new(segments: Vec<PulseSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::invalid("protocol must contain at least one segment"));
        }
        Ok(PulseProtocol { segments })
    }

    /// Expansion sequence: quarter period at the softened trap, quarter
    /// period at full power, quarter period softened again.
    pub fn two_pulse(r: f64) -> Result<Self> {
        if !(r >= 1.0) {
            return Err(Error::invalid("two_pulse requires a softening ratio r >= 1"));
        }
        Ok(PulseProtocol {
            segments: vec![
                PulseSegment { ratio: r, phase: FRAC_PI_2 },
                PulseSegment { ratio: 1.0, phase: FRAC_PI_2 },
                PulseSegment { ratio: r, phase: FRAC_PI_2 },
            ],
        })
    }

    /// Single quarter-period expansion pulse.
    pub fn one_pulse(r: f64) -> Result<Self> {
        if !(r >= 1.0) {
            return Err(Error::invalid("one_pulse requires a softening ratio r >= 1"));
        }
        Ok(PulseProtocol {
            segments: vec![PulseSegment { ratio: r, phase: FRAC_PI_2 }],
        })
    }

    /// Expand-and-recompress sequence: two half-period pulses separated by
    /// `gap_phase` (phase at Ω_m). With zero gap and no decoherence the
    /// protocol is the identity map.
    pub fn loop_protocol(r: f64, gap_phase: f64) -> Result<Self> {
        if !(r >= 1.0) {
            return Err(Error::invalid("loop_protocol requires a softening ratio r >= 1"));
        }
        if !(gap_phase >= 0.0) {
            return Err(Error::invalid("gap phase must be non-negative"));
        }
        Ok(PulseProtocol {
            segments: vec![
                PulseSegment { ratio: r, phase: PI },
                PulseSegment { ratio: 1.0, phase: gap_phase },
                PulseSegment { ratio: r, phase: PI },
            ],
        })
    }

    /// Measurement-only run: a zero-duration segment at full power.
    pub fn hold() -> Self {
        PulseProtocol {
            segments: vec![PulseSegment { ratio: 1.0, phase: 0.0 }],
        }
    }

    pub fn duration(&self, omega_m: f64) -> f64 {
        self.segments.iter().map(|s| s.duration(omega_m)).sum()
    }
}

/// Affine flow matrix of a segment.
pub(crate) fn segment_flow(ratio: f64, phase: f64) -> Mat2 {
    let (s, c) = phase.sin_cos();
    Mat2::new(c, ratio * s, -s / ratio, c)
}

/// Photon-recoil covariance accumulated over a segment of phase φ at ratio
/// r, for recoil rate Γ at full power. The r scaling reflects the reduced
/// optical power in the softened trap.
pub(crate) fn segment_recoil(ratio: f64, phase: f64, gamma_qba: f64, omega_m: f64) -> SymMat2 {
    if gamma_qba == 0.0 || phase == 0.0 {
        return SymMat2::ZERO;
    }
    let (s2, c2) = (2.0 * phase).sin_cos();
    let g = gamma_qba / omega_m;
    SymMat2::new(
        ratio * g * (phase - 0.5 * s2),
        g / ratio * (phase + 0.5 * s2),
        0.5 * g * (1.0 - c2),
    )
}

/// Propagate a state through one constant-stiffness segment.
pub fn evolve_segment(
    state: &GaussianState,
    seg: &PulseSegment,
    params: &PhysicalParams,
) -> GaussianState {
    let m = segment_flow(seg.ratio, seg.phase);
    // equilibrium shift per unit force; the actual shift scales with f0
    let zeq_unit = (seg.ratio * seg.ratio - 1.0) / params.omega_m;
    let zeq = params.f0_mean * zeq_unit;

    let mean = m.mul_vec(Vec2::new(state.mean_z - zeq, state.mean_p));
    let cov = m
        .congruence(&state.covariance())
        .add(&segment_recoil(seg.ratio, seg.phase, params.gamma_qba, params.omega_m));

    // sensitivity follows the same affine flow with a unit-force source
    let s = m.mul_vec(Vec2::new(state.sens[0] - zeq_unit, state.sens[1]));

    GaussianState {
        mean_z: mean.x + zeq,
        mean_p: mean.y,
        vz: cov.vz,
        vp: cov.vp,
        czp: cov.czp,
        sens: [s.x + zeq_unit, s.y],
    }
}

/// Left-fold of `evolve_segment` over the protocol.
pub fn run_protocol(
    state: &GaussianState,
    protocol: &PulseProtocol,
    params: &PhysicalParams,
) -> GaussianState {
    protocol
        .segments
        .iter()
        .fold(*state, |st, seg| evolve_segment(&st, seg, params))
}

/// Predicted biased variances (Ṽz, Ṽp) after the 2-pulse expansion,
/// starting from the configured thermal state. `v_n` is the estimation
/// noise added by the readout chain.
///
/// The recoil term is the closed form of the segment-wise composition; the
/// position variance scales as r⁴ and the recoil contribution as
/// (Γ π / 2Ω_m)(r + r² + r³).
pub fn predict_two_pulse(r: f64, params: &PhysicalParams, v_n: f64) -> Result<(f64, f64)> {
    if !(r >= 1.0) {
        return Err(Error::invalid("two-pulse prediction requires r >= 1"));
    }
    let v0 = params.v0();
    let g = 0.5 * PI * params.gamma_qba / params.omega_m;
    let vz = v_n + r.powi(4) * v0 + g * (r + r * r + r * r * r);
    let vp = v_n + v0 / r.powi(4) + g * (1.0 / r + 1.0 / (r * r) + 1.0 / (r * r * r));
    Ok((vz, vp))
}

/// Predicted estimated energy after the expand-and-recompress loop.
pub fn predict_recompression_energy(r: f64, params: &PhysicalParams, v_n: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::invalid("recompression prediction requires r >= 1"));
    }
    let g = PI * params.gamma_qba / params.omega_m;
    Ok(v_n + params.v0() + g * (r + 1.0 / r))
}

/// Which expansion protocol a stray-noise block refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProtocolKind {
    OnePulse,
    TwoPulse,
}

/// Ensemble covariance block added by a drifting stray force, as a function
/// of the delocalization factor D (D = r for 1-pulse, D = r² for 2-pulse).
pub fn stray_noise(kind: ProtocolKind, d: f64, params: &PhysicalParams) -> Result<SymMat2> {
    if !(d >= 1.0) {
        return Err(Error::invalid("delocalization factor must be >= 1"));
    }
    let scale = params.v_f0 / (params.omega_m * params.omega_m);
    Ok(match kind {
        ProtocolKind::OnePulse => {
            let q = (d * d - 1.0).powi(2);
            SymMat2::new(q, q / (d * d), q / d).scale(scale)
        }
        ProtocolKind::TwoPulse => {
            let q = (d - 1.0).powi(2) * (d.sqrt() - 1.0).powi(2);
            SymMat2::new(q, q / (d * d), -q / d).scale(scale)
        }
    })
}

/// State purity Tr(ρ²) = 1/(2 sqrt(det Σ)).
pub fn purity(state: &GaussianState) -> f64 {
    0.5 / state.det().sqrt()
}

/// Coherence length in meters, z_zpf sqrt(2/λ_min) with λ_min the smaller
/// covariance eigenvalue. Reduces to z_zpf sqrt(2/V_p) for czp = 0.
pub fn coherence_length(state: &GaussianState, params: &PhysicalParams) -> Result<f64> {
    let det = state.det();
    if det < 0.25 - HEISENBERG_TOL {
        return Err(Error::NonPhysical(format!(
            "covariance determinant {det} violates the Heisenberg bound 1/4"
        )));
    }
    let (_, lo) = state.covariance().eigenvalues();
    Ok(params.z_zpf * (2.0 / lo).sqrt())
}

/// Purity-based coherence length sqrt(8 P) Δz in meters. Coincides with
/// `coherence_length` only for minimum-uncertainty states.
pub fn coherence_length_purity_form(state: &GaussianState, params: &PhysicalParams) -> Result<f64> {
    let det = state.det();
    if det < 0.25 - HEISENBERG_TOL {
        return Err(Error::NonPhysical(format!(
            "covariance determinant {det} violates the Heisenberg bound 1/4"
        )));
    }
    Ok((8.0 * purity(state) * state.vz).sqrt() * params.z_zpf)
}

/// Squeezing of the smaller covariance eigenvalue relative to the
/// zero-point variance 1/2, in dB. Negative values are below zero point.
pub fn squeezing_db(state: &GaussianState) -> f64 {
    let (_, lo) = state.covariance().eigenvalues();
    10.0 * (lo / 0.5).log10()
}
