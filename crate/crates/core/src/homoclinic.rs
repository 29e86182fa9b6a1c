//! Homoclinic lobes of the saddle.
//!
//! With `h` the saddle energy, squaring the radial equation and eliminating the
//! angle gives the separable form
//!
//! ```text
//! (ρ')² = (ρ - ρ*)² R(ρ),
//! R(ρ)  = sqrt(D/2) (3C/4) sqrt(ρ*) - 1/4 + (3C/8)(ρ + ρ*) - (9C²/64)(ρ + ρ*)²
//! ```
//!
//! `R` is a concave quadratic with `R(ρ*) = (q/4)²`, so the level set through the
//! saddle has one lobe on each side of `ρ*`. Writing `E = exp(q t / 4)` and
//! `K = 27 C sqrt(2 D ρ*)`, the lobes are
//!
//! ```text
//! ρ(t) = ρ* ∓ (32 q² / C) E / (128 E² + K ∓ 48 (3Cρ* - 2) E)
//! ```
//!
//! with the upper signs for the lower lobe (`ρ ≤ ρ*`) and the lower signs for
//! the upper lobe. The upper lobe is the lower-lobe expression with `E` replaced
//! by `-E`. The phase is recovered by quadrature of the angular equation along
//! `ρ(t)`, which is independent of `θ` once the energy is fixed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::equilibria::{find_saddle, solve_equilibria, three_root_condition, Equilibrium, Stability};
use crate::model::{CartesianState, PolarState, SystemParams};
use crate::quadrature;
use crate::{Error, Result};

/// Minimum `ρ` accepted by the phase reconstruction.
pub const RHO_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// The lobe with `ρ ≤ ρ*`.
    Lower,
    /// The lobe with `ρ ≥ ρ*`.
    Upper,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Lower, Branch::Upper];

    fn sign(self) -> f64 {
        match self {
            Branch::Lower => 1.0,
            Branch::Upper => -1.0,
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Lower => "lower",
            Branch::Upper => "upper",
        })
    }
}

/// `h = ρ*/2 - (3C/8) ρ*² - sqrt(ρ* D / 2)`.
pub fn saddle_energy(rho_star: f64, p: &SystemParams) -> f64 {
    0.5 * rho_star - 0.375 * p.nonlinearity * rho_star * rho_star - (0.5 * rho_star * p.derived_d()).sqrt()
}

/// The quadratic under the square root of the separable radial equation.
pub fn radicand(rho: f64, rho_star: f64, p: &SystemParams) -> f64 {
    let c = p.nonlinearity;
    let sum = rho + rho_star;
    (0.5 * p.derived_d()).sqrt() * 0.75 * c * rho_star.sqrt() - 0.25 + 0.375 * c * sum
        - (9.0 * c * c / 64.0) * sum * sum
}

/// `sqrt(-4 + 3C (2 sqrt(2 D ρ*) + ρ* (4 - 3 C ρ*)))`, the rate constant in `Q(t) = q t`.
pub fn q_coefficient(rho_star: f64, p: &SystemParams) -> Result<f64> {
    let c = p.nonlinearity;
    let arg = -4.0 + 3.0 * c * (2.0 * (2.0 * p.derived_d() * rho_star).sqrt() + rho_star * (4.0 - 3.0 * c * rho_star));
    if arg > 0.0 && arg.is_finite() {
        Ok(arg.sqrt())
    } else {
        Err(Error::Nonexistence { branch: None, reason: format!("saddle radicand is not positive (q² = {arg:e})") })
    }
}

/// The two zeros of [`radicand`] in `ρ`, ascending: `(4/(3C))(1 ± 2 sqrt(κ)) - ρ*`
/// with `κ = (3C/4) sqrt(D ρ* / 2)`.
pub fn radicand_roots(rho_star: f64, p: &SystemParams) -> (f64, f64) {
    let c = p.nonlinearity;
    let kappa = 0.75 * c * (0.5 * p.derived_d() * rho_star).sqrt();
    let root = 2.0 * kappa.sqrt();
    let scale = 4.0 / (3.0 * c);
    (scale * (1.0 - root) - rho_star, scale * (1.0 + root) - rho_star)
}

/// One homoclinic lobe of the saddle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomoclinicOrbit {
    pub rho_star: f64,
    pub theta_star: f64,
    pub energy: f64,
    pub q_coeff: f64,
    pub branch: Branch,
    pub params: SystemParams,
}

impl HomoclinicOrbit {
    /// Builds the requested lobe of a classified saddle.
    pub fn from_saddle(p: &SystemParams, saddle: &Equilibrium, branch: Branch) -> Result<Self> {
        if saddle.stability != Stability::Saddle {
            return Err(Error::NoSaddle);
        }
        if p.drive_projection(saddle.polar.theta) > 0.0 {
            return Err(Error::PositiveSignSaddle);
        }
        Self::from_parts(p, saddle.polar.rho, saddle.polar.theta, branch)
    }

    /// Builds a lobe from raw saddle coordinates. The energy comes from the
    /// saddle-energy formula and is not cross-checked against the flow.
    pub fn from_parts(p: &SystemParams, rho_star: f64, theta_star: f64, branch: Branch) -> Result<Self> {
        p.validate()?;
        if !(rho_star > 0.0 && rho_star.is_finite()) {
            return Err(Error::InvalidInput(format!("rho_star must be positive, got {rho_star}")));
        }
        let q_coeff = q_coefficient(rho_star, p).map_err(|e| match e {
            Error::Nonexistence { reason, .. } => Error::Nonexistence { branch: Some(branch), reason },
            other => other,
        })?;
        let (lo, hi) = radicand_roots(rho_star, p);
        let reject = |reason: String| Err(Error::Nonexistence { branch: Some(branch), reason });
        match branch {
            Branch::Lower if !(lo < rho_star) => return reject(format!("no radicand root below rho* ({lo})")),
            Branch::Lower if lo <= 0.0 => return reject(format!("lobe reaches the origin (turning rho {lo:e})")),
            Branch::Upper if !(hi > rho_star) => return reject(format!("no radicand root above rho* ({hi})")),
            _ => {}
        }
        Ok(HomoclinicOrbit { rho_star, theta_star, energy: saddle_energy(rho_star, p), q_coeff, branch, params: *p })
    }

    /// Hyperbolic rate `q/4` governing the approach to the saddle.
    pub fn rate(&self) -> f64 {
        0.25 * self.q_coeff
    }

    fn k_term(&self) -> f64 {
        let p = &self.params;
        27.0 * p.nonlinearity * (2.0 * p.derived_d() * self.rho_star).sqrt()
    }

    fn mid_term(&self) -> f64 {
        48.0 * (3.0 * self.params.nonlinearity * self.rho_star - 2.0)
    }

    fn numerator_scale(&self) -> f64 {
        32.0 * self.q_coeff * self.q_coeff / self.params.nonlinearity
    }

    /// Time of the turning point, where `ρ` is extremal.
    pub fn turning_time(&self) -> f64 {
        (self.k_term() / 128.0).ln() / (2.0 * self.rate())
    }

    pub fn turning_rho(&self) -> f64 {
        self.rho(self.turning_time())
    }

    pub fn saddle_point(&self) -> CartesianState {
        PolarState::new(self.rho_star, self.theta_star).to_cartesian()
    }

    /// `ρ(t) - ρ*`, normalised by the dominant exponential.
    fn offset(&self, t: f64) -> f64 {
        let sg = self.branch.sign();
        let x = self.rate() * t;
        let (k, m) = (self.k_term(), self.mid_term());
        let den = if x > 0.0 {
            let e = (-x).exp();
            (e, 128.0 + k * e * e - sg * m * e)
        } else {
            let e = x.exp();
            (e, 128.0 * e * e + k - sg * m * e)
        };
        -sg * self.numerator_scale() * den.0 / den.1
    }

    /// Closed-form `ρ(t)`.
    pub fn rho(&self, t: f64) -> f64 {
        self.rho_star + self.offset(t)
    }

    /// Analytic `dρ/dt` of the closed form.
    pub fn rho_dot(&self, t: f64) -> f64 {
        let sg = self.branch.sign();
        let x = self.rate() * t;
        let (k, m) = (self.k_term(), self.mid_term());
        let ratio = if x > 0.0 {
            let e = (-x).exp();
            let den = 128.0 + k * e * e - sg * m * e;
            e * (128.0 - k * e * e) / (den * den)
        } else {
            let e = x.exp();
            let den = 128.0 * e * e + k - sg * m * e;
            e * (128.0 * e * e - k) / (den * den)
        };
        sg * self.numerator_scale() * self.rate() * ratio
    }

    /// `θ'` along the orbit; with the energy fixed it depends on `ρ` only.
    pub fn theta_rate(&self, rho: f64) -> f64 {
        let c = self.params.nonlinearity;
        -(self.energy + 0.5 * rho - 1.125 * c * rho * rho) / (2.0 * rho)
    }

    /// Phase from the energy relation at a single time, as the representative
    /// nearest `θ*`.
    fn anchor_phase(&self, t: f64) -> f64 {
        let p = &self.params;
        let rho = self.rho(t);
        let x = self.energy - 0.5 * rho + 0.375 * p.nonlinearity * rho * rho;
        let raw = p.drive_angle() + (-self.rho_dot(t)).atan2(x);
        let d = raw - self.theta_star;
        self.theta_star + (PI - (PI - d).rem_euclid(2.0 * PI))
    }

    /// `θ` on a sorted time grid by quadrature of the angular equation,
    /// anchored at the first grid point.
    pub fn theta_reconstruct(&self, t_grid: &[f64]) -> Result<Vec<f64>> {
        let Some(&t0) = t_grid.first() else {
            return Ok(Vec::new());
        };
        if t_grid.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidInput("time grid must be sorted".into()));
        }
        for &t in t_grid {
            let rho = self.rho(t);
            if !(rho >= RHO_FLOOR) {
                return Err(Error::SingularRho { rho });
            }
        }
        let integrand = |s: f64| self.theta_rate(self.rho(s));
        let mut out = Vec::with_capacity(t_grid.len());
        let mut theta = self.anchor_phase(t0);
        out.push(theta);
        for w in t_grid.windows(2) {
            let tol = 1e-15 * (w[1] - w[0]).abs().max(1.0);
            theta += quadrature::integrate(&integrand, w[0], w[1], tol);
            out.push(theta);
        }
        Ok(out)
    }

    /// `n` evenly spaced samples on `[t_min, t_max]` with diagnostics.
    pub fn sample(&self, t_min: f64, t_max: f64, n: usize) -> Result<Vec<OrbitSample>> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 samples, got {n}")));
        }
        if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(Error::InvalidInput(format!("need t_min < t_max, got [{t_min}, {t_max}]")));
        }
        let step = (t_max - t_min) / (n - 1) as f64;
        let ts: Vec<f64> = (0..n).map(|i| if i == n - 1 { t_max } else { t_min + step * i as f64 }).collect();
        let thetas = self.theta_reconstruct(&ts)?;
        let p = &self.params;
        Ok(ts
            .iter()
            .zip(thetas)
            .map(|(&t, theta)| {
                let rho = self.rho(t);
                let polar = PolarState::new(rho, theta);
                let cart = polar.to_cartesian();
                let flow_rate = p.rho_dot(polar);
                let du = rho - self.rho_star;
                OrbitSample {
                    t,
                    rho,
                    theta,
                    a: cart.a,
                    b: cart.b,
                    energy_err: (p.hamiltonian(cart) - self.energy).abs(),
                    ode_residual: (flow_rate * flow_rate - du * du * radicand(rho, self.rho_star, p)).abs(),
                }
            })
            .collect())
    }
}

/// Closed-form `ρ(t)` of a lobe.
pub fn rho_closed_form(t: f64, orbit: &HomoclinicOrbit) -> f64 {
    orbit.rho(t)
}

/// The literal radial formula: constant `27 C³ sqrt(2Dρ*)`, linear coefficient
/// `-16 (3C(6ρ* - 3Cρ*² + 4 sqrt(2Dρ*)) - 8)`, and `Q ↦ -Q` for the upper
/// lobe. Kept as a diagnostic; coincides with [`rho_closed_form`] only when `C = 1`.
pub fn rho_literal_form(t: f64, orbit: &HomoclinicOrbit) -> f64 {
    let p = &orbit.params;
    let c = p.nonlinearity;
    let rs = orbit.rho_star;
    let sq = (2.0 * p.derived_d() * rs).sqrt();
    let q = match orbit.branch {
        Branch::Lower => orbit.q_coeff * t,
        Branch::Upper => -orbit.q_coeff * t,
    };
    let (e2, e4) = ((0.5 * q).exp(), (0.25 * q).exp());
    let k = 27.0 * c.powi(3) * sq;
    let num = (128.0 * e2 + k) * rs - 16.0 * e4 * (3.0 * c * (6.0 * rs - 3.0 * c * rs * rs + 4.0 * sq) - 8.0);
    let den = 128.0 * e2 + k - 48.0 * e4 * (3.0 * c * rs - 2.0);
    num / den
}

/// Constants of the literal closed-form phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiteralPhaseConstants {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

fn checked_sqrt(x: f64, what: &'static str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else {
        Err(Error::LiteralFormDomain(what))
    }
}

/// `W₃ = (9Cρ*² - 16ρ* - 8h) / (64ρ*)`, the secular coefficient of the literal phase.
pub fn literal_w3(orbit: &HomoclinicOrbit) -> f64 {
    let c = orbit.params.nonlinearity;
    let rs = orbit.rho_star;
    (9.0 * c * rs * rs - 16.0 * rs - 8.0 * orbit.energy) / (64.0 * rs)
}

/// Evaluates the literal phase constants as written. The second radical in
/// `W₁` is read with `ρ*²`, the two fragments of `W₂` are multiplied and the
/// second `g₃` is taken as `g₄`.
pub fn literal_phase_constants(orbit: &HomoclinicOrbit) -> Result<LiteralPhaseConstants> {
    let p = &orbit.params;
    let c = p.nonlinearity;
    let rs = orbit.rho_star;
    let h = orbit.energy;
    let sq = (2.0 * p.derived_d() * rs).sqrt();

    let rad1 = checked_sqrt(
        -9.0 * c * c * (rs - 2.0 / (3.0 * c)).powi(2) + 6.0 * c.powi(3) * sq,
        "first radical of W1/W2/g1/g2",
    )?;
    let rad1b =
        checked_sqrt(-9.0 * c * c * (rs * rs - 2.0 / (3.0 * c)).powi(2) + 6.0 * c * sq, "second radical of W1")?;
    let rad2 = checked_sqrt(
        54.0 * c.powi(3) * rs * rs * sq - (8.0 + 3.0 * c * (3.0 * rs * (c * rs - 2.0) - 4.0 * sq)).powi(2),
        "radical of W2/g3/g4",
    )?;

    let w1 = 3.0 * c * (8.0 - 6.0 * (1.0 + 3.0 * c) * rs + 9.0 * c * (1.0 + c) * rs - 12.0 * c * sq) / (rad1 * rad1b);
    let w2 = h / (rs * rad1) * (6.0 * (3.0 * c - 1.0) * rs - 9.0 * c * (c - 1.0) * rs + 12.0 * c * sq - 8.0) / rad2;
    Ok(LiteralPhaseConstants {
        w1,
        w2,
        w3: literal_w3(orbit),
        g1: (2.0 - 3.0 * c * rs) / rad1,
        g2: 16.0 / (3.0 * rad1),
        g3: (8.0 + 9.0 * c * c * rs * rs - 6.0 * c * (3.0 * rs + 2.0 * sq)) / rad2,
        g4: 16.0 * rs / rad2,
    })
}

/// The literal closed-form phase at time `t`. Diagnostic only.
pub fn theta_literal_form(t: f64, orbit: &HomoclinicOrbit) -> Result<f64> {
    let k = literal_phase_constants(orbit)?;
    let e = (0.25 * orbit.q_coeff * t).exp();
    Ok(match orbit.branch {
        Branch::Lower => k.w1 * (k.g1 + k.g2 * e).atan() + k.w2 * (k.g3 + k.g4 * e).atan() + k.w3 * t,
        Branch::Upper => k.w3 * t - k.w1 * (k.g1 + k.g2 / e).atan() - k.w2 * (k.g3 + k.g4 / e).atan(),
    })
}

/// Pointwise comparison of the literal phase against the reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiteralPhaseComparison {
    pub reconstructed: Vec<f64>,
    /// `None` when a literal radical is negative; see `domain_error`.
    pub literal: Option<Vec<f64>>,
    pub domain_error: Option<String>,
    /// `max - min` of `θ_literal - θ_reconstructed`; zero if the literal form
    /// were an antiderivative of the angular equation.
    pub offset_spread: Option<f64>,
}

pub fn compare_literal_phase(orbit: &HomoclinicOrbit, t_grid: &[f64]) -> Result<LiteralPhaseComparison> {
    let reconstructed = orbit.theta_reconstruct(t_grid)?;
    let literal: Result<Vec<f64>> = t_grid.iter().map(|&t| theta_literal_form(t, orbit)).collect();
    Ok(match literal {
        Ok(literal) => {
            let (lo, hi) = literal
                .iter()
                .zip(&reconstructed)
                .map(|(p, r)| p - r)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
            LiteralPhaseComparison {
                reconstructed,
                literal: Some(literal),
                domain_error: None,
                offset_spread: Some(hi - lo),
            }
        }
        Err(e) => LiteralPhaseComparison {
            reconstructed,
            literal: None,
            domain_error: Some(e.to_string()),
            offset_spread: None,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    pub t: f64,
    pub rho: f64,
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    /// `|h(a, b) - orbit.energy|`.
    pub energy_err: f64,
    /// `|(ρ')² - (ρ - ρ*)² R(ρ)|` with `ρ'` taken from the flow at `(ρ, θ)`.
    pub ode_residual: f64,
}

/// Result of [`build_orbits`]: the lobes that exist and why the others do not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSet {
    pub equilibria: Vec<Equilibrium>,
    pub saddle: Equilibrium,
    pub orbits: Vec<HomoclinicOrbit>,
    pub omitted: Vec<(Branch, String)>,
}

impl OrbitSet {
    pub fn get(&self, branch: Branch) -> Option<&HomoclinicOrbit> {
        self.orbits.iter().find(|o| o.branch == branch)
    }
}

/// Constructs every homoclinic lobe of the saddle.
pub fn build_orbits(p: &SystemParams) -> Result<OrbitSet> {
    p.validate()?;
    if !three_root_condition(p) {
        return Err(Error::NoSaddle);
    }
    let equilibria = solve_equilibria(p)?;
    let saddle = find_saddle(p)?;
    let mut orbits = Vec::new();
    let mut omitted = Vec::new();
    for branch in Branch::BOTH {
        match HomoclinicOrbit::from_saddle(p, &saddle, branch) {
            Ok(o) => orbits.push(o),
            Err(Error::Nonexistence { reason, .. }) => omitted.push((branch, reason)),
            Err(e) => return Err(e),
        }
    }
    Ok(OrbitSet { equilibria, saddle, orbits, omitted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig_set() -> OrbitSet {
        build_orbits(&SystemParams::default()).unwrap()
    }

    #[test]
    fn saddle_energy_edge_cases() {
        let p = SystemParams::new(0.0, 0.0, 0.0, 0.0, 2.0).unwrap();
        assert_relative_eq!(saddle_energy(0.3, &p), 0.15 - 0.75 * 0.09, max_relative = 1e-15);
        assert_eq!(saddle_energy(0.0, &SystemParams::default()), 0.0);
        assert!(saddle_energy(1e-14, &SystemParams::default()).abs() < 1e-7);
    }

    #[test]
    fn saddle_energy_matches_hamiltonian() {
        let set = fig_set();
        let p = SystemParams::default();
        let h = p.hamiltonian(set.saddle.cart);
        assert_relative_eq!(saddle_energy(set.saddle.polar.rho, &p), h, max_relative = 1e-10);
        assert_relative_eq!(p.hamiltonian_polar(set.saddle.polar), h, max_relative = 1e-12);
    }

    #[test]
    fn radicand_cancels_in_symmetric_case() {
        let p = SystemParams::new(0.0, 0.0, 0.0, 0.0, 2.0).unwrap();
        let rs = 2.0 / 3.0 / p.nonlinearity;
        assert!(radicand(rs, rs, &p).abs() < 1e-15);
        assert!(matches!(q_coefficient(rs, &p), Err(Error::Nonexistence { .. })));
    }

    #[test]
    fn q_identity_at_reference_saddle() {
        let set = fig_set();
        let p = SystemParams::default();
        let rs = set.saddle.polar.rho;
        let q = q_coefficient(rs, &p).unwrap();
        assert!(q > 0.0);
        assert_relative_eq!(q * q, 16.0 * radicand(rs, rs, &p), max_relative = 1e-10);
        // hyperbolic rate equals the saddle eigenvalue
        assert_relative_eq!(q / 4.0, set.saddle.eigenvalues[0].re, max_relative = 1e-9);
    }

    #[test]
    fn both_lobes_exist_for_reference() {
        let set = fig_set();
        assert_eq!(set.orbits.len(), 2);
        assert!(set.omitted.is_empty());
        let p = SystemParams::default();
        let (lo, hi) = radicand_roots(set.saddle.polar.rho, &p);
        assert!(radicand(lo, set.saddle.polar.rho, &p).abs() < 1e-14);
        assert!(radicand(hi, set.saddle.polar.rho, &p).abs() < 1e-14);
        let lower = set.get(Branch::Lower).unwrap();
        let upper = set.get(Branch::Upper).unwrap();
        assert!((lower.turning_rho() - lo).abs() < 1e-8);
        assert!((upper.turning_rho() - hi).abs() < 1e-8);
    }

    #[test]
    fn no_saddle_outside_condition() {
        let p = SystemParams::new(1.0, 0.0, 1e-3, 0.0, 2.0).unwrap();
        assert_eq!(build_orbits(&p), Err(Error::NoSaddle));
    }

    #[test]
    fn limits_and_sign() {
        for o in fig_set().orbits {
            let big_t = 30.0 / o.rate();
            assert!((o.rho(big_t) - o.rho_star).abs() < 1e-6);
            assert!((o.rho(-big_t) - o.rho_star).abs() < 1e-6);
            // no overflow deep in the tails
            let far = 700.0 / o.rate();
            assert!(o.rho(far).is_finite() && o.rho(-far).is_finite());
            assert!(o.rho_dot(far).is_finite() && o.rho_dot(-far).is_finite());
            for i in 0..=4000 {
                let t = -200.0 + 0.1 * i as f64;
                let r = o.rho(t);
                match o.branch {
                    Branch::Lower => assert!(r <= o.rho_star),
                    Branch::Upper => assert!(r >= o.rho_star),
                }
            }
        }
    }

    #[test]
    fn lobes_related_by_sign_of_exponential() {
        let set = fig_set();
        let lower = set.get(Branch::Lower).unwrap();
        let upper = set.get(Branch::Upper).unwrap();
        let p = &lower.params;
        let (k, m) = (lower.k_term(), lower.mid_term());
        let s = 32.0 * lower.q_coeff.powi(2) / p.nonlinearity;
        for t in [-20.0, -7.0, -1.0, 0.0, 3.0, 15.0] {
            let e = (lower.rate() * t).exp();
            let lower_expr = |e: f64| lower.rho_star - s * e / (128.0 * e * e + k - m * e);
            assert_relative_eq!(lower.rho(t), lower_expr(e), max_relative = 1e-14);
            assert_relative_eq!(upper.rho(t), lower_expr(-e), max_relative = 1e-14);
        }
    }

    #[test]
    fn reflection_symmetry_about_turning_time() {
        for o in fig_set().orbits {
            let tm = o.turning_time();
            assert!(o.rho_dot(tm).abs() < 1e-14);
            for s in [0.1, 1.0, 3.7, 12.0, 40.0] {
                assert!((o.rho(tm + s) - o.rho(tm - s)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn literal_radial_form_agrees_only_at_unit_c() {
        let set = fig_set();
        let o = set.get(Branch::Lower).unwrap();
        let dev = (o.rho(0.0) - rho_literal_form(0.0, o)).abs();
        assert!(dev > 1e-3, "{dev}");

        let p = SystemParams::new(0.1, 0.001, 1e-5, PI / 9.0, 1.0).unwrap();
        let set = build_orbits(&p).unwrap();
        let o = set.get(Branch::Lower).unwrap();
        for t in [-10.0, -2.0, 0.0, 4.0] {
            assert_relative_eq!(o.rho(t), rho_literal_form(t, o), max_relative = 1e-12);
        }
    }

    #[test]
    fn literal_w3_is_finite() {
        for o in fig_set().orbits {
            assert!(literal_w3(&o).is_finite());
        }
    }

    #[test]
    fn literal_phase_domain_error_is_reported() {
        let set = fig_set();
        let o = set.get(Branch::Lower).unwrap();
        let cmp = compare_literal_phase(o, &[-5.0, 0.0, 5.0]).unwrap();
        assert_eq!(cmp.reconstructed.len(), 3);
        match (&cmp.literal, &cmp.domain_error) {
            (Some(_), None) => assert!(cmp.offset_spread.unwrap() >= 0.0),
            (None, Some(msg)) => assert!(msg.contains("radical")),
            _ => panic!("inconsistent comparison"),
        }
    }

    #[test]
    fn theta_reconstruct_rejects_unsorted() {
        let o = fig_set().orbits[0];
        assert!(o.theta_reconstruct(&[1.0, 0.0]).is_err());
        assert_eq!(o.theta_reconstruct(&[]).unwrap(), Vec::<f64>::new());
    }

    #[test]
    fn sample_shape() {
        let o = fig_set().orbits[0];
        let s = o.sample(-40.0, 40.0, 2).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].t, s[1].t), (-40.0, 40.0));
        assert!(o.sample(1.0, 1.0, 10).is_err());
        assert!(o.sample(0.0, 1.0, 1).is_err());
    }
}
