//! Dormand–Prince 5(4) integration of the slow flow.

use serde::{Deserialize, Serialize};

use crate::model::{CartesianState, SystemParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-14, max_step: 1.0, max_steps: 2_000_000 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0 && self.max_steps >= 1;
        if ok && self.rel_tol.is_finite() && self.abs_tol.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid integrator config {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrajectoryStats {
    pub steps: usize,
    pub rejected: usize,
    /// Max `|h(state) - h(s0)|` over the accepted steps.
    pub max_energy_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Start state followed by every accepted step, ordered in the direction of integration.
    pub samples: Vec<(f64, CartesianState)>,
    pub stats: TrajectoryStats,
}

impl Trajectory {
    pub fn last(&self) -> CartesianState {
        self.samples.last().map(|s| s.1).unwrap_or_default()
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type V = [f64; 2];

fn rhs(p: &SystemParams, y: V) -> V {
    let (da, db) = p.vector_field(CartesianState::new(y[0], y[1]));
    [da, db]
}

fn axpy(y: V, h: f64, terms: &[(f64, V)]) -> V {
    let mut out = y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// One step; returns the 5th-order solution, its derivative and the error estimate.
fn step(p: &SystemParams, y: V, k1: V, h: f64) -> (V, V, V) {
    let k2 = rhs(p, axpy(y, h, &[(A21, k1)]));
    let k3 = rhs(p, axpy(y, h, &[(A31, k1), (A32, k2)]));
    let k4 = rhs(p, axpy(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
    let k5 = rhs(p, axpy(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
    let k6 = rhs(p, axpy(y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]));
    let y_new = axpy(y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
    let k7 = rhs(p, y_new);
    let err = axpy([0.0; 2], h, &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)]);
    (y_new, k7, err)
}

fn err_norm(err: V, y: V, y_new: V, cfg: &IntegratorConfig) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / 2.0).sqrt()
}

fn initial_step(p: &SystemParams, y: V, f0: V, dir: f64, cfg: &IntegratorConfig) -> f64 {
    let sc = |i: usize| cfg.abs_tol + cfg.rel_tol * y[i].abs();
    let d0 = ((y[0] / sc(0)).powi(2) + (y[1] / sc(1)).powi(2)).sqrt() / 2f64.sqrt();
    let d1 = ((f0[0] / sc(0)).powi(2) + (f0[1] / sc(1)).powi(2)).sqrt() / 2f64.sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y, dir * h0, &[(1.0, f0)]);
    let f1 = rhs(p, y1);
    let d2 = (((f1[0] - f0[0]) / sc(0)).powi(2) + ((f1[1] - f0[1]) / sc(1)).powi(2)).sqrt() / 2f64.sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(cfg.max_step)
}

/// Adaptive integration from `t0` to `t1` (either direction), recording every accepted step.
pub fn integrate(s0: CartesianState, p: &SystemParams, t0: f64, t1: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
        return Err(Error::InvalidInput(format!("need finite t0 != t1, got {t0}, {t1}")));
    }
    let dir = (t1 - t0).signum();
    let h_start = p.hamiltonian(s0);
    let mut y = [s0.a, s0.b];
    let mut t = t0;
    let mut f = rhs(p, y);
    let mut h = initial_step(p, y, f, dir, cfg);
    let mut stats = TrajectoryStats::default();
    let mut samples = vec![(t0, s0)];

    while (t1 - t) * dir > 0.0 {
        if stats.steps + stats.rejected >= cfg.max_steps {
            return Err(Error::StepLimit { steps: cfg.max_steps });
        }
        h = h.min(cfg.max_step);
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h <= 1e-14 * t.abs().max(1.0) && !last {
            return Err(Error::StepUnderflow { t, h });
        }
        let (y_new, f_new, err) = step(p, y, f, dir * h);
        let en = err_norm(err, y, y_new, cfg);
        if en <= 1.0 {
            t = if last { t1 } else { t + dir * h };
            y = y_new;
            f = f_new;
            stats.steps += 1;
            let s = CartesianState::new(y[0], y[1]);
            stats.max_energy_drift = stats.max_energy_drift.max((p.hamiltonian(s) - h_start).abs());
            samples.push((t, s));
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            stats.rejected += 1;
            h *= (0.9 * en.powf(-0.2)).clamp(0.2, 1.0);
        }
        if !(y[0].is_finite() && y[1].is_finite()) {
            return Err(Error::StepUnderflow { t, h });
        }
    }
    Ok(Trajectory { samples, stats })
}

/// Fixed-step integration with the 5th-order Dormand–Prince solution.
pub fn integrate_fixed(s0: CartesianState, p: &SystemParams, t0: f64, t1: f64, n_steps: usize) -> CartesianState {
    let h = (t1 - t0) / n_steps.max(1) as f64;
    let mut y = [s0.a, s0.b];
    let mut f = rhs(p, y);
    for _ in 0..n_steps.max(1) {
        let (y_new, f_new, _) = step(p, y, f, h);
        y = y_new;
        f = f_new;
    }
    CartesianState::new(y[0], y[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::solve_equilibria;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_rotation_exact() {
        // A = B = J = 0 and tiny C: a rotation with angular rate 1/2 near the origin
        let p = SystemParams::new(0.0, 0.0, 0.0, 0.0, 1e-12).unwrap();
        let s0 = CartesianState::new(1e-3, 0.0);
        let tr = integrate(s0, &p, 0.0, 2.0 * std::f64::consts::PI, &IntegratorConfig::default()).unwrap();
        let end = tr.last();
        // a' = b/2, b' = -a/2: clockwise rotation at rate 1/2, half a turn
        assert!((end.a + 1e-3).abs() < 1e-13, "{end:?}");
        assert!(end.b.abs() < 1e-13, "{end:?}");
    }

    #[test]
    fn equilibrium_stays_put() {
        let p = SystemParams::default();
        for e in solve_equilibria(&p).unwrap() {
            let tr = integrate(e.cart, &p, 0.0, 100.0, &IntegratorConfig::default()).unwrap();
            let worst = tr.samples.iter().map(|(_, s)| s.distance(e.cart)).fold(0.0, f64::max);
            assert!(worst < 1e-10, "{worst}");
        }
    }

    #[test]
    fn conserves_energy() {
        let p = SystemParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let s0 = CartesianState::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
            let tr = integrate(s0, &p, 0.0, 50.0, &IntegratorConfig::default()).unwrap();
            assert!(tr.stats.max_energy_drift < 1e-9, "{:?}", tr.stats);
        }
    }

    #[test]
    fn reversible() {
        let p = SystemParams::default();
        let s0 = CartesianState::new(0.4, -0.6);
        let cfg = IntegratorConfig::default();
        let fwd = integrate(s0, &p, 0.0, 20.0, &cfg).unwrap();
        let back = integrate(fwd.last(), &p, 20.0, 0.0, &cfg).unwrap();
        assert!(back.last().distance(s0) < 1e-8);
        assert!(back.samples.windows(2).all(|w| w[1].0 < w[0].0));
    }

    #[test]
    fn fixed_step_order() {
        let p = SystemParams::default();
        let s0 = CartesianState::new(0.5, 0.3);
        let reference = integrate_fixed(s0, &p, 0.0, 5.0, 4096);
        let e1 = integrate_fixed(s0, &p, 0.0, 5.0, 64).distance(reference);
        let e2 = integrate_fixed(s0, &p, 0.0, 5.0, 128).distance(reference);
        let order = (e1 / e2).log2();
        assert!((order - 5.0).abs() <= 1.0, "observed order {order}");
    }

    #[test]
    fn bad_inputs() {
        let p = SystemParams::default();
        let s0 = CartesianState::new(0.1, 0.1);
        assert!(integrate(s0, &p, 1.0, 1.0, &IntegratorConfig::default()).is_err());
        let cfg = IntegratorConfig { rel_tol: -1.0, ..Default::default() };
        assert!(integrate(s0, &p, 0.0, 1.0, &cfg).is_err());
        let cfg = IntegratorConfig { max_steps: 3, ..Default::default() };
        assert_eq!(integrate(s0, &p, 0.0, 100.0, &cfg), Err(Error::StepLimit { steps: 3 }));
    }
}
