//! Shadowing of an analytic lobe by direct integration of the flow.

use crate::homoclinic::HomoclinicOrbit;
use crate::model::PolarState;
use crate::oracle::integrator::{integrate, IntegratorConfig};
use crate::{Error, Result};

/// Bound on `exp(q · window)` for the shadowing window.
pub const SHADOW_GROWTH_CAP: f64 = 1e4;

/// Longest window whose growth factor `exp(q · window)` stays within the cap.
pub fn shadow_window_cap(orbit: &HomoclinicOrbit) -> f64 {
    SHADOW_GROWTH_CAP.ln() / orbit.q_coeff
}

/// Integrates the flow from the analytic state at `t0` over
/// `[t0, t0 + min(window, cap)]` and returns the largest Euclidean distance
/// to the analytic `(a, b)` at the accepted step times.
pub fn shadow_compare(orbit: &HomoclinicOrbit, t0: f64, window: f64, cfg: &IntegratorConfig) -> Result<f64> {
    if !(window >= 0.0) {
        return Err(Error::InvalidInput(format!("window must be non-negative, got {window}")));
    }
    let window = window.min(shadow_window_cap(orbit));
    if window == 0.0 {
        return Ok(0.0);
    }
    let theta0 = orbit.theta_reconstruct(&[t0])?[0];
    let start = PolarState::new(orbit.rho(t0), theta0).to_cartesian();
    let traj = integrate(start, &orbit.params, t0, t0 + window, cfg)?;

    let times: Vec<f64> = traj.samples.iter().map(|s| s.0).collect();
    let thetas = orbit.theta_reconstruct(&times)?;
    Ok(traj
        .samples
        .iter()
        .zip(thetas)
        .map(|((t, s), theta)| PolarState::new(orbit.rho(*t), theta).to_cartesian().distance(*s))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homoclinic::build_orbits;
    use crate::model::SystemParams;

    #[test]
    fn zero_window() {
        let set = build_orbits(&SystemParams::default()).unwrap();
        let o = &set.orbits[0];
        assert_eq!(shadow_compare(o, 0.0, 0.0, &IntegratorConfig::default()).unwrap(), 0.0);
        assert!(shadow_compare(o, 0.0, -1.0, &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn analytic_lobes_are_shadowed() {
        let set = build_orbits(&SystemParams::default()).unwrap();
        for o in &set.orbits {
            let dev = shadow_compare(o, o.turning_time(), f64::INFINITY, &IntegratorConfig::default()).unwrap();
            assert!(dev < 1e-6, "{:?}: {dev}", o.branch);
        }
    }

    #[test]
    fn looser_tolerance_deviates_more() {
        let set = build_orbits(&SystemParams::default()).unwrap();
        let o = &set.orbits[0];
        let tm = o.turning_time();
        let devs: Vec<f64> = [1e-12, 1e-9, 1e-6]
            .iter()
            .map(|&tol| {
                let cfg = IntegratorConfig { rel_tol: tol, abs_tol: tol * 1e-2, ..Default::default() };
                shadow_compare(o, tm, f64::INFINITY, &cfg).unwrap()
            })
            .collect();
        assert!(devs[0] < devs[1] && devs[1] < devs[2], "{devs:?}");
    }
}
