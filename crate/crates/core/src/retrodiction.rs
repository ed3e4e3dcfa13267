//! Backward-in-time optimal estimation of position and momentum from a
//! homodyne record.
//!
//! The record model is i dt = sqrt(8 Γ_meas) z dt + dW with ⟨dW²⟩ = dt and
//! Γ_meas = η Γ_qba. Running the optimal estimator backward from the end of
//! the record, the conditional covariance settles to a steady state whose
//! elements act as the filter gains; the diagonal is the estimation noise
//! V_n that biases ensemble variances of the estimates.
//!
//! Two realizations of the same filter are provided: a two-state recursion
//! using the exact zero-order-hold discretization of the estimator ODE (the
//! reference path), and scalar second-order IIR sections (the fast path).
//! With the default coefficient design the IIR sections realize exactly the
//! same discrete map as the recursion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::Biquad;
use crate::linalg::{Mat2, SymMat2, Vec2};
use crate::params::PhysicalParams;

/// Steady-state conditional covariance of the backward estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrodictionGains {
    /// Conditional position variance; the estimation noise on Ṽz.
    pub v_z: f64,
    /// Conditional momentum variance; the estimation noise on Ṽp.
    pub v_p: f64,
    /// Conditional covariance. Negative for the backward filter.
    pub c_zp: f64,
    /// Λ = 4 Γ_qba / Ω_m.
    pub lambda: f64,
    /// Measurement rate η Γ_qba in rad/s.
    pub gamma_meas: f64,
}

impl RetrodictionGains {
    pub fn as_matrix(&self) -> SymMat2 {
        SymMat2::new(self.v_z, self.v_p, self.c_zp)
    }
}

/// Closed-form steady-state conditional covariance.
pub fn steady_state_gains(params: &PhysicalParams) -> Result<RetrodictionGains> {
    if !(params.eta > 0.0) {
        return Err(Error::invalid(
            "steady-state gains diverge at eta = 0 (no measurement information)",
        ));
    }
    if !(params.gamma_qba > 0.0) {
        return Err(Error::invalid(
            "steady-state gains require a positive measurement backaction rate",
        ));
    }
    let lambda = params.lambda();
    let el = params.eta * lambda;
    let root = (1.0 + params.eta * lambda * lambda).sqrt();
    let v_z = ((root - 1.0) / 2.0).sqrt() / el;
    Ok(RetrodictionGains {
        v_z,
        v_p: root * v_z,
        c_zp: -(root - 1.0) / (2.0 * el),
        lambda,
        gamma_meas: params.gamma_meas(),
    })
}

/// Steady state of the backward conditional-covariance Riccati flow,
/// integrated numerically until the update rate falls below `tol * Ω_m`.
/// Serves as an independent verification of `steady_state_gains`.
pub fn riccati_steady_state_numeric(params: &PhysicalParams, tol: f64) -> Result<RetrodictionGains> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if !(params.eta > 0.0 && params.gamma_qba > 0.0) {
        return Err(Error::invalid("riccati fixed point requires eta > 0 and gamma_qba > 0"));
    }
    let omega = params.omega_m;
    let k = 8.0 * params.gamma_meas();
    let q = 2.0 * params.gamma_qba;
    // backward-time dynamics reverse the rotation sense
    let deriv = |v: &[f64; 3]| -> [f64; 3] {
        let (a, b, c) = (v[0], v[1], v[2]);
        [
            -2.0 * omega * c - k * a * a,
            2.0 * omega * c + q - k * c * c,
            omega * (a - b) - k * a * c,
        ]
    };
    let v0 = params.v0().max(1.0);
    let mut v = [v0, v0, 0.0];
    let h = 0.02 / omega;
    let max_steps = 200_000_000usize;
    for step in 0..max_steps {
        let k1 = deriv(&v);
        let mut y = v;
        for i in 0..3 {
            y[i] = v[i] + 0.5 * h * k1[i];
        }
        let k2 = deriv(&y);
        for i in 0..3 {
            y[i] = v[i] + 0.5 * h * k2[i];
        }
        let k3 = deriv(&y);
        for i in 0..3 {
            y[i] = v[i] + h * k3[i];
        }
        let k4 = deriv(&y);
        let mut rate: f64 = 0.0;
        for i in 0..3 {
            let d = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            v[i] += d;
            rate = rate.max((d / h).abs());
        }
        // settle for at least one mechanical period before testing
        if rate < tol * omega && step > (std::f64::consts::TAU / (h * omega)) as usize {
            return Ok(RetrodictionGains {
                v_z: v[0],
                v_p: v[1],
                c_zp: v[2],
                lambda: params.lambda(),
                gamma_meas: params.gamma_meas(),
            });
        }
    }
    Err(Error::NoConvergence(format!(
        "riccati flow not stationary to {tol} after {max_steps} steps"
    )))
}

/// Coefficient design of the fast-path IIR sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IirDesign {
    /// Poles and zeros mapped from the exact zero-order-hold discretization;
    /// bit-compatible with the reference recursion.
    Exact,
    /// Bilinear transform of the continuous transfer functions. Kept for
    /// comparison; deviates from the recursion at O((Ω dt)²).
    Bilinear,
}

/// Output of the backward estimator: position and momentum estimates at the
/// record sample times. `converged` is false when the record is shorter
/// than a few filter relaxation times, leaving the early-time (late in
/// processing order) estimates reliable but the late-time ones not.
#[derive(Debug, Clone)]
pub struct RetrodictOutput {
    pub z: Vec<f64>,
    pub p: Vec<f64>,
    pub converged: bool,
}

/// Backward estimator for a fixed sample interval.
#[derive(Debug, Clone)]
pub struct Retrodictor {
    gains: RetrodictionGains,
    omega_m: f64,
    dt: f64,
    ad: Mat2,
    bd: Vec2,
}

impl Retrodictor {
    pub fn new(params: &PhysicalParams, dt: f64) -> Result<Self> {
        let gains = steady_state_gains(params)?;
        Self::with_gains(params, dt, gains)
    }

    pub fn with_gains(params: &PhysicalParams, dt: f64, gains: RetrodictionGains) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::invalid("sample interval must be positive"));
        }
        let omega = params.omega_m;
        let k8 = 8.0 * gains.gamma_meas;
        let root_k8 = k8.sqrt();
        // backward-time estimator flow dx/ds = F x + G i
        let f = Mat2::new(-k8 * gains.v_z, -omega, omega - k8 * gains.c_zp, 0.0);
        let g = Vec2::new(root_k8 * gains.v_z, root_k8 * gains.c_zp);
        let ad = f.expm(dt);
        let f_inv = f
            .inverse()
            .ok_or_else(|| Error::invalid("degenerate estimator dynamics"))?;
        let bd = f_inv.mul_vec(Vec2::new(
            (ad.a11 - 1.0) * g.x + ad.a12 * g.y,
            ad.a21 * g.x + (ad.a22 - 1.0) * g.y,
        ));
        Ok(Retrodictor { gains, omega_m: omega, dt, ad, bd })
    }

    pub fn gains(&self) -> &RetrodictionGains {
        &self.gains
    }

    /// 1/e settling time of the estimator, set by the real part of its poles.
    pub fn relaxation_time(&self) -> f64 {
        1.0 / (4.0 * self.gains.gamma_meas * self.gains.v_z)
    }

    fn check_converged(&self, n: usize) -> bool {
        n as f64 * self.dt >= 5.0 * self.relaxation_time()
    }

    /// Reference path: two-state recursion from the last sample toward the
    /// first, exact for a zero-order-hold record.
    pub fn run(&self, record: &[f64]) -> RetrodictOutput {
        let n = record.len();
        let mut z = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut x = Vec2::ZERO;
        for k in (0..n).rev() {
            x = Vec2::new(
                self.ad.a11 * x.x + self.ad.a12 * x.y + self.bd.x * record[k],
                self.ad.a21 * x.x + self.ad.a22 * x.y + self.bd.y * record[k],
            );
            z[k] = x.x;
            p[k] = x.y;
        }
        RetrodictOutput { z, p, converged: self.check_converged(n) }
    }

    /// Scalar IIR coefficients for the position and momentum outputs.
    pub fn iir_sections(&self, design: IirDesign) -> (Biquad, Biquad) {
        match design {
            IirDesign::Exact => {
                let a = [-self.ad.trace(), self.ad.det()];
                let bz = [
                    self.bd.x,
                    self.ad.a12 * self.bd.y - self.ad.a22 * self.bd.x,
                    0.0,
                ];
                let bp = [
                    self.bd.y,
                    self.ad.a21 * self.bd.x - self.ad.a11 * self.bd.y,
                    0.0,
                ];
                (Biquad::new(bz, a), Biquad::new(bp, a))
            }
            IirDesign::Bilinear => {
                let root_k8 = (8.0 * self.gains.gamma_meas).sqrt();
                let k8 = 8.0 * self.gains.gamma_meas;
                let omega = self.omega_m;
                // continuous transfer functions share the denominator
                // s² + 8Γm Ṽz s + Ω(Ω - 8Γm C̃zp)
                let a1 = k8 * self.gains.v_z;
                let a0 = omega * (omega - k8 * self.gains.c_zp);
                let bz = (root_k8 * self.gains.v_z, -root_k8 * omega * self.gains.c_zp);
                let bp = (root_k8 * self.gains.c_zp, root_k8 * omega * self.gains.v_z);
                let make = |b1: f64, b0: f64| {
                    let kk = 2.0 / self.dt;
                    let d0 = kk * kk + a1 * kk + a0;
                    Biquad::new(
                        [
                            (b1 * kk + b0) / d0,
                            2.0 * b0 / d0,
                            (b0 - b1 * kk) / d0,
                        ],
                        [
                            (2.0 * a0 - 2.0 * kk * kk) / d0,
                            (kk * kk - a1 * kk + a0) / d0,
                        ],
                    )
                };
                (make(bz.0, bz.1), make(bp.0, bp.1))
            }
        }
    }

    /// Fast path: the same map realized as scalar IIR sections applied to
    /// the time-reversed record.
    pub fn run_iir(&self, record: &[f64], design: IirDesign) -> RetrodictOutput {
        let (mut fz, mut fp) = self.iir_sections(design);
        let n = record.len();
        let mut z = vec![0.0; n];
        let mut p = vec![0.0; n];
        for k in (0..n).rev() {
            z[k] = fz.process(record[k]);
            p[k] = fp.process(record[k]);
        }
        RetrodictOutput { z, p, converged: self.check_converged(n) }
    }
}

/// Convenience wrapper running the fast path with steady-state gains.
pub fn retrodict(record: &[f64], params: &PhysicalParams, dt: f64) -> Result<RetrodictOutput> {
    Ok(Retrodictor::new(params, dt)?.run_iir(record, IirDesign::Exact))
}
