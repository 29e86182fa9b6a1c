//! Parameters, phase-space states and the slow-flow vector field.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The five parameters of the slow flow.
///
/// `amp_a` and `amp_b` are the forcing amplitudes `A` and `B`, `detuning` is `J`,
/// `gamma` is the forcing angle in radians and `nonlinearity` is the cubic
/// coefficient `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub amp_a: f64,
    pub amp_b: f64,
    pub detuning: f64,
    pub gamma: f64,
    pub nonlinearity: f64,
}

impl Default for SystemParams {
    /// The reference parameter set `A = 0.1, B = 0.001, J = 1e-5, γ = π/9, C = 2`.
    fn default() -> Self {
        SystemParams { amp_a: 0.1, amp_b: 0.001, detuning: 1e-5, gamma: std::f64::consts::PI / 9.0, nonlinearity: 2.0 }
    }
}

impl SystemParams {
    pub fn new(amp_a: f64, amp_b: f64, detuning: f64, gamma: f64, nonlinearity: f64) -> Result<Self> {
        let p = SystemParams { amp_a, amp_b, detuning, gamma, nonlinearity };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.amp_a, self.amp_b, self.detuning, self.gamma, self.nonlinearity];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if self.nonlinearity <= 0.0 {
            return Err(Error::InvalidParams(format!("C must be positive, got {}", self.nonlinearity)));
        }
        Ok(())
    }

    /// `A + B cos γ`, the drive component along `a`.
    pub fn drive_cos(&self) -> f64 {
        self.amp_a + self.amp_b * self.gamma.cos()
    }

    /// `B sin γ - J`, the drive component along `b`.
    pub fn drive_sin(&self) -> f64 {
        self.amp_b * self.gamma.sin() - self.detuning
    }

    /// `D = (A + B cos γ)² + (J - B sin γ)²`.
    pub fn derived_d(&self) -> f64 {
        let p = self.drive_cos();
        let q = self.drive_sin();
        p * p + q * q
    }

    /// Angle of the drive vector `(A + B cos γ, B sin γ - J)`.
    pub fn drive_angle(&self) -> f64 {
        self.drive_sin().atan2(self.drive_cos())
    }

    /// `S(θ) = (B sin γ - J) sin θ + (A + B cos γ) cos θ`.
    pub fn drive_projection(&self, theta: f64) -> f64 {
        self.drive_sin() * theta.sin() + self.drive_cos() * theta.cos()
    }

    pub fn vector_field(&self, s: CartesianState) -> (f64, f64) {
        let k = 0.375 * self.nonlinearity;
        let r2 = s.a * s.a + s.b * s.b;
        let da = 0.5 * s.b - k * r2 * s.b + 0.5 * self.drive_sin();
        let db = -0.5 * s.a + k * r2 * s.a - 0.5 * self.drive_cos();
        (da, db)
    }

    pub fn jacobian(&self, s: CartesianState) -> Jacobian2 {
        let k = 0.375 * self.nonlinearity;
        let (a, b) = (s.a, s.b);
        let cross = 2.0 * k * a * b;
        Jacobian2 {
            daa: -cross,
            dab: 0.5 - k * (a * a + 3.0 * b * b),
            dba: -0.5 + k * (3.0 * a * a + b * b),
            dbb: cross,
        }
    }

    pub fn hamiltonian(&self, s: CartesianState) -> f64 {
        let r2 = s.a * s.a + s.b * s.b;
        0.25 * r2 - (3.0 * self.nonlinearity / 32.0) * r2 * r2
            + 0.5 * s.b * self.drive_sin()
            + 0.5 * s.a * self.drive_cos()
    }

    pub fn hamiltonian_polar(&self, s: PolarState) -> f64 {
        let rho = s.rho;
        0.5 * rho - 0.375 * self.nonlinearity * rho * rho + (2.0 * rho).sqrt() * 0.5 * self.drive_projection(s.theta)
    }

    /// Radial rate `ρ'` in polar coordinates.
    pub fn rho_dot(&self, s: PolarState) -> f64 {
        let (sin, cos) = s.theta.sin_cos();
        (2.0 * s.rho).sqrt() * 0.5 * (self.drive_sin() * cos - sin * self.drive_cos())
    }

    /// Angular rate `θ'`, from `-2ρθ' = ρ - (3C/2)ρ² + sqrt(ρ/2) S(θ)`.
    pub fn theta_dot(&self, s: PolarState) -> Result<f64> {
        if s.rho <= 0.0 {
            return Err(Error::SingularRho { rho: s.rho });
        }
        let rho = s.rho;
        let rhs = rho - 1.5 * self.nonlinearity * rho * rho + (0.5 * rho).sqrt() * self.drive_projection(s.theta);
        Ok(-rhs / (2.0 * rho))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CartesianState {
    pub a: f64,
    pub b: f64,
}

impl CartesianState {
    pub fn new(a: f64, b: f64) -> Self {
        CartesianState { a, b }
    }

    pub fn to_polar(self) -> Result<PolarState> {
        if self.a == 0.0 && self.b == 0.0 {
            return Err(Error::DegenerateAngle);
        }
        Ok(PolarState { rho: 0.5 * (self.a * self.a + self.b * self.b), theta: self.b.atan2(self.a) })
    }

    pub fn distance(self, other: CartesianState) -> f64 {
        (self.a - other.a).hypot(self.b - other.b)
    }
}

/// Action-angle-like coordinates with `a = sqrt(2ρ) cos θ`, `b = sqrt(2ρ) sin θ`.
///
/// `theta` is never wrapped, so phase histories stay continuous.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PolarState {
    pub rho: f64,
    pub theta: f64,
}

impl PolarState {
    pub fn new(rho: f64, theta: f64) -> Self {
        PolarState { rho, theta }
    }

    pub fn to_cartesian(self) -> CartesianState {
        let r = (2.0 * self.rho).sqrt();
        let (sin, cos) = self.theta.sin_cos();
        CartesianState { a: r * cos, b: r * sin }
    }
}

/// Jacobian of the vector field; rows are `(a', b')`, columns `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian2 {
    pub daa: f64,
    pub dab: f64,
    pub dba: f64,
    pub dbb: f64,
}

impl Jacobian2 {
    pub fn trace(&self) -> f64 {
        self.daa + self.dbb
    }

    pub fn det(&self) -> f64 {
        self.daa * self.dbb - self.dab * self.dba
    }

    /// Solves `J x = rhs`; `None` when the matrix is singular.
    pub fn solve(&self, rhs: (f64, f64)) -> Option<(f64, f64)> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(((self.dbb * rhs.0 - self.dab * rhs.1) / det, (self.daa * rhs.1 - self.dba * rhs.0) / det))
    }
}
