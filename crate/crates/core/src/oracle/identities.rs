//! Numerical check of the algebraic chain from the squared radial equation to
//! the factorised separable form.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::homoclinic::{radicand, saddle_energy};
use crate::model::{PolarState, SystemParams};

/// Max relative errors; each is normalised by the magnitude of the terms that
/// cancel on the right-hand side, so values near the double root do not blow up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub seed: u64,
    /// `(ρ')² + (sqrt(ρ/2) S(θ))² = ρ D / 2`.
    pub flow_square: f64,
    /// `(ρ')² = (sqrt(ρD/2) - X)(sqrt(ρD/2) + X)` with `X = h - ρ/2 + (3C/8)ρ²`, `h` from the polar Hamiltonian.
    pub energy_factorization: f64,
    /// Saddle-energy product equals the intermediate `(ρ - ρ*){...}` form.
    pub product_to_linear: f64,
    /// Saddle-energy product equals `(ρ - ρ*)² R(ρ)`.
    pub product_to_separable: f64,
}

impl IdentityReport {
    pub fn max_error(&self) -> f64 {
        self.flow_square.max(self.energy_factorization).max(self.product_to_linear).max(self.product_to_separable)
    }
}

fn rel(lhs: f64, rhs: f64, scale: f64) -> f64 {
    let d = (lhs - rhs).abs();
    if d == 0.0 {
        0.0
    } else {
        d / scale.abs().max(lhs.abs()).max(rhs.abs())
    }
}

/// The product form evaluated with the saddle energy of `rho_star`.
pub(crate) fn saddle_product(rho: f64, rho_star: f64, p: &SystemParams) -> (f64, f64) {
    let h = saddle_energy(rho_star, p);
    let x = h - 0.5 * rho + 0.375 * p.nonlinearity * rho * rho;
    let s = (0.5 * rho * p.derived_d()).sqrt();
    ((s - x) * (s + x), s * s + x * x)
}

/// The intermediate form linear in `(ρ - ρ*)` before the saddle condition is used.
fn linear_form(rho: f64, rho_star: f64, p: &SystemParams) -> f64 {
    let c = p.nonlinearity;
    let half_d = (0.5 * p.derived_d()).sqrt();
    let rs = rho_star.sqrt();
    let du = rho - rho_star;
    let sum = rho + rho_star;
    du * (half_d * (half_d - rs + 1.5 * c * rs.powi(3) + 0.75 * c * rs * rho - 0.75 * c * rs * rho_star) - 0.25 * du
        + 0.375 * c * du * sum
        - (9.0 * c * c / 64.0) * du * sum * sum)
}

/// Evaluates the identities at `n` seeded samples `ρ ∈ (0, 2ρ*]`, `θ ∈ [0, 2π)`.
pub fn identity_suite(p: &SystemParams, rho_star: f64, n: usize, seed: u64) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = p.derived_d();
    let mut rep = IdentityReport {
        samples: n,
        seed,
        flow_square: 0.0,
        energy_factorization: 0.0,
        product_to_linear: 0.0,
        product_to_separable: 0.0,
    };
    for _ in 0..n {
        // (0, 2ρ*]
        let rho = 2.0 * rho_star * (1.0 - rng.random::<f64>());
        let theta = rng.random_range(0.0..2.0 * PI);
        let s = PolarState::new(rho, theta);

        let rd = p.rho_dot(s);
        let proj = (0.5 * rho).sqrt() * p.drive_projection(theta);
        let target = 0.5 * rho * d;
        rep.flow_square = rep.flow_square.max(rel(rd * rd + proj * proj, target, target));

        let h = p.hamiltonian_polar(s);
        let x = h - 0.5 * rho + 0.375 * p.nonlinearity * rho * rho;
        let root = target.sqrt();
        let fact = (root - x) * (root + x);
        // X is itself a difference of O(|h| + ρ/2 + (3C/8)ρ²) terms
        let x_scale = (h.abs() + 0.5 * rho + 0.375 * p.nonlinearity * rho * rho).powi(2);
        rep.energy_factorization = rep.energy_factorization.max(rel(rd * rd, fact, target + x_scale));

        let (prod, scale) = saddle_product(rho, rho_star, p);
        rep.product_to_linear = rep.product_to_linear.max(rel(prod, linear_form(rho, rho_star, p), scale));
        let du = rho - rho_star;
        let sep = du * du * radicand(rho, rho_star, p);
        rep.product_to_separable = rep.product_to_separable.max(rel(prod, sep, scale));
    }
    rep
}
