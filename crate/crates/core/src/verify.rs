//! Aggregated verification of the equilibria, lobes and oracle comparisons.

use serde::{Deserialize, Serialize};

use crate::equilibria::{find_saddle, solve_equilibria};
use crate::homoclinic::{radicand, saddle_energy, Branch, HomoclinicOrbit};
use crate::model::{CartesianState, SystemParams};
use crate::oracle::{identity_suite, shadow_compare, IntegratorConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub identity_samples: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    /// Central-difference step for `ρ'`.
    pub fd_step: f64,
    pub integrator: IntegratorConfig,
    /// Multiplies the saddle `ρ*` before the lobes are built. Values other
    /// than 1 are a negative control and should make the lobe checks fail.
    pub rho_star_scale: f64,
    /// `None` checks every existing branch.
    pub branch: Option<Branch>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            identity_samples: 1000,
            t_min: -40.0,
            t_max: 40.0,
            samples: 2001,
            fd_step: 1e-3,
            integrator: IntegratorConfig::default(),
            rho_star_scale: 1.0,
            branch: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        // NaN never passes
        Check { name: name.into(), value, tolerance, passed: value < tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub params: SystemParams,
    pub seed: u64,
    pub rho_star: f64,
    pub rho_star_scale: f64,
    pub checks: Vec<Check>,
    pub omitted: Vec<(Branch, String)>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

fn grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { t_max } else { t_min + (t_max - t_min) * i as f64 / (n - 1) as f64 }).collect()
}

/// Lobe checks. References are always taken from the classified saddle of
/// `p`, never from the orbit under test, so a mis-set `ρ*` shows up.
fn lobe_checks(
    orbit: &HomoclinicOrbit,
    true_rho: f64,
    true_energy: f64,
    lambda: f64,
    cfg: &VerifyConfig,
    out: &mut Vec<Check>,
) -> Result<()> {
    let p = &orbit.params;
    let c = p.nonlinearity;
    let d = p.derived_d();
    let name = |s: &str| format!("{}.{s}", orbit.branch);
    let q = orbit.q_coeff;
    let rs = orbit.rho_star;

    // rate of the closed form against the independent Jacobian eigenvalue
    out.push(Check::new(name("q_identity"), rel(q * q, 16.0 * radicand(rs, rs, p)), 1e-10));
    out.push(Check::new(name("q_eigenvalue"), rel(0.25 * q, lambda), 1e-10));

    // finite-difference (ρ')² against the separable form and against the
    // energy product built from the true saddle energy
    let ts = grid(cfg.t_min, cfg.t_max, cfg.samples);
    let h = cfg.fd_step;
    let mut fd_sq = Vec::with_capacity(ts.len());
    let mut sep = Vec::with_capacity(ts.len());
    let mut flow = Vec::with_capacity(ts.len());
    for &t in &ts {
        let rd = (orbit.rho(t + h) - orbit.rho(t - h)) / (2.0 * h);
        let rho = orbit.rho(t);
        let du = rho - rs;
        let x = true_energy - 0.5 * rho + 0.375 * c * rho * rho;
        fd_sq.push(rd * rd);
        sep.push(du * du * radicand(rho, rs, p));
        flow.push(0.5 * rho * d - x * x);
    }
    let peak = fd_sq.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let max_dev = |model: &[f64]| fd_sq.iter().zip(model).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak;
    out.push(Check::new(name("ode_residual_separable"), max_dev(&sep), 1e-6));
    out.push(Check::new(name("ode_residual_energy"), max_dev(&flow), 1e-6));

    let t_inf = 30.0 / lambda;
    let tail = (orbit.rho(t_inf) - true_rho).abs().max((orbit.rho(-t_inf) - true_rho).abs());
    out.push(Check::new(name("asymptote"), tail, 1e-6));

    let samples = orbit.sample(cfg.t_min, cfg.t_max, cfg.samples)?;
    let energy =
        samples.iter().map(|s| (p.hamiltonian(CartesianState::new(s.a, s.b)) - true_energy).abs()).fold(0.0, f64::max);
    out.push(Check::new(name("energy"), energy, 1e-8));

    let shadow = shadow_compare(orbit, orbit.turning_time(), f64::INFINITY, &cfg.integrator)?;
    out.push(Check::new(name("shadow"), shadow, 1e-6));
    Ok(())
}

/// Runs every check at the given parameters.
pub fn verify(p: &SystemParams, cfg: &VerifyConfig) -> Result<VerifyReport> {
    p.validate()?;
    if cfg.samples < 2 {
        return Err(Error::InvalidInput(format!("samples must be at least 2, got {}", cfg.samples)));
    }
    if !(cfg.t_min < cfg.t_max) || !(cfg.fd_step > 0.0) || !(cfg.rho_star_scale > 0.0) || cfg.identity_samples == 0 {
        return Err(Error::InvalidInput("verify config out of range".into()));
    }
    cfg.integrator.validate()?;

    let eqs = solve_equilibria(p)?;
    let saddle = find_saddle(p)?;
    let true_rho = saddle.polar.rho;
    let rho_star = true_rho * cfg.rho_star_scale;
    let lambda = saddle.eigenvalues[0].re.abs().max(saddle.eigenvalues[1].re.abs());
    let true_energy = p.hamiltonian(saddle.cart);

    let mut checks = Vec::new();
    let max_res = eqs.iter().map(|e| e.residual).fold(0.0, f64::max);
    checks.push(Check::new("equilibria.residual", max_res, 1e-10));
    checks.push(Check::new("saddle.energy_formula", rel(saddle_energy(rho_star, p), true_energy), 1e-10));

    let ids = identity_suite(p, rho_star, cfg.identity_samples, cfg.seed);
    checks.push(Check::new("identity.flow_square", ids.flow_square, 1e-10));
    checks.push(Check::new("identity.energy_factorization", ids.energy_factorization, 1e-10));
    checks.push(Check::new("identity.product_to_linear", ids.product_to_linear, 1e-10));
    checks.push(Check::new("identity.product_to_separable", ids.product_to_separable, 1e-10));

    let branches: &[Branch] = match &cfg.branch {
        Some(b) => std::slice::from_ref(b),
        None => &Branch::BOTH,
    };
    let mut omitted = Vec::new();
    for &b in branches {
        match HomoclinicOrbit::from_parts(p, rho_star, saddle.polar.theta, b) {
            Ok(orbit) => lobe_checks(&orbit, true_rho, true_energy, lambda, cfg, &mut checks)?,
            Err(e @ Error::Nonexistence { .. }) => {
                if cfg.branch.is_some() {
                    return Err(e);
                }
                omitted.push((b, e.to_string()));
            }
            Err(e) => return Err(e),
        }
    }
    if omitted.len() == branches.len() {
        return Err(Error::Nonexistence { branch: cfg.branch, reason: "no homoclinic lobe exists".into() });
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        params: *p,
        seed: cfg.seed,
        rho_star,
        rho_star_scale: cfg.rho_star_scale,
        checks,
        omitted,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_passes() {
        let rep = verify(&SystemParams::default(), &VerifyConfig::default()).unwrap();
        let fails: Vec<_> = rep.failures().collect();
        assert!(rep.passed, "{fails:?}");
        assert!(rep.check("lower.shadow").is_some() && rep.check("upper.shadow").is_some());
    }

    #[test]
    fn perturbed_saddle_fails() {
        let cfg = VerifyConfig { rho_star_scale: 1.01, ..Default::default() };
        let rep = verify(&SystemParams::default(), &cfg).unwrap();
        assert!(!rep.passed);
        for n in ["lower.q_eigenvalue", "lower.ode_residual_energy", "lower.energy", "saddle.energy_formula"] {
            assert!(!rep.check(n).unwrap().passed, "{n}");
        }
    }

    #[test]
    fn deterministic() {
        let cfg = VerifyConfig { identity_samples: 50, samples: 101, ..Default::default() };
        let p = SystemParams::default();
        assert_eq!(verify(&p, &cfg).unwrap(), verify(&p, &cfg).unwrap());
    }

    #[test]
    fn bad_config() {
        let cfg = VerifyConfig { samples: 1, ..Default::default() };
        assert!(verify(&SystemParams::default(), &cfg).is_err());
    }
}
