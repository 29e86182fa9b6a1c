//! Phase-portrait grids of the Hamiltonian and the saddle level set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibria::{find_saddle, Stability};
use crate::homoclinic::{Branch, OrbitSet};
use crate::model::{CartesianState, SystemParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortraitGrid {
    pub nx: usize,
    pub ny: usize,
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
}

impl PortraitGrid {
    pub fn square(n: usize, half_width: f64) -> Self {
        PortraitGrid { nx: n, ny: n, a_min: -half_width, a_max: half_width, b_min: -half_width, b_max: half_width }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidInput(format!("grid must be at least 2x2, got {}x{}", self.nx, self.ny)));
        }
        let finite = [self.a_min, self.a_max, self.b_min, self.b_max].iter().all(|v| v.is_finite());
        if !finite || !(self.a_min < self.a_max) || !(self.b_min < self.b_max) {
            return Err(Error::InvalidInput(format!("grid bounds must be finite and ordered: {self:?}")));
        }
        Ok(())
    }

    pub fn a_at(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.a_max
        } else {
            self.a_min + (self.a_max - self.a_min) * i as f64 / (self.nx - 1) as f64
        }
    }

    pub fn b_at(&self, j: usize) -> f64 {
        if j + 1 == self.ny {
            self.b_max
        } else {
            self.b_min + (self.b_max - self.b_min) * j as f64 / (self.ny - 1) as f64
        }
    }

    fn da(&self) -> f64 {
        (self.a_max - self.a_min) / (self.nx - 1) as f64
    }

    fn db(&self) -> f64 {
        (self.b_max - self.b_min) / (self.ny - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortraitRow {
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub da: f64,
    pub db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portrait {
    pub grid: PortraitGrid,
    /// Row-major: `b` index outer, `a` index inner.
    pub rows: Vec<PortraitRow>,
    /// Hamiltonian at the saddle, when one exists.
    pub saddle_level: Option<f64>,
    pub saddle: Option<CartesianState>,
}

impl Portrait {
    fn h(&self, i: usize, j: usize) -> f64 {
        self.rows[j * self.grid.nx + i].h
    }

    /// Bilinear interpolation of `h`; `None` outside the grid.
    pub fn h_interp(&self, s: CartesianState) -> Option<f64> {
        let g = &self.grid;
        if s.a < g.a_min || s.a > g.a_max || s.b < g.b_min || s.b > g.b_max {
            return None;
        }
        let fx = ((s.a - g.a_min) / g.da()).min((g.nx - 1) as f64);
        let fy = ((s.b - g.b_min) / g.db()).min((g.ny - 1) as f64);
        let i = (fx.floor() as usize).min(g.nx - 2);
        let j = (fy.floor() as usize).min(g.ny - 2);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        Some(
            self.h(i, j) * (1.0 - tx) * (1.0 - ty)
                + self.h(i + 1, j) * tx * (1.0 - ty)
                + self.h(i, j + 1) * (1.0 - tx) * ty
                + self.h(i + 1, j + 1) * tx * ty,
        )
    }
}

/// Samples `(a, b, h, a', b')` on the grid.
pub fn portrait(p: &SystemParams, grid: &PortraitGrid) -> Result<Portrait> {
    p.validate()?;
    grid.validate()?;
    let rows: Vec<PortraitRow> = (0..grid.ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let b = grid.b_at(j);
            (0..grid.nx).map(move |i| {
                let s = CartesianState::new(grid.a_at(i), b);
                let (da, db) = p.vector_field(s);
                PortraitRow { a: s.a, b: s.b, h: p.hamiltonian(s), da, db }
            })
        })
        .collect();
    let saddle = find_saddle(p).ok();
    Ok(Portrait {
        grid: *grid,
        rows,
        saddle_level: saddle.as_ref().map(|s| p.hamiltonian(s.cart)),
        saddle: saddle.map(|s| s.cart),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeCheck {
    pub branch: Branch,
    /// Radius `sqrt(2ρ)` of the analytic turning point.
    pub turning_radius: f64,
    /// Grid crossing of `h = h_saddle` along the ray through the turning point.
    pub grid_crossing_radius: Option<f64>,
    /// Centers on this side of `ρ*` enclosed by the sampled lobe.
    pub encloses_matching_centers: bool,
    /// Centers on the other side of `ρ*` that the lobe does not enclose.
    pub excludes_other_side: Vec<bool>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetCheck {
    pub passes_through_saddle: bool,
    pub lobes: Vec<LobeCheck>,
    pub consistent: bool,
}

fn winding_number(poly: &[CartesianState], pt: CartesianState) -> i32 {
    let mut wn = 0;
    for k in 0..poly.len() {
        let (u, v) = (poly[k], poly[(k + 1) % poly.len()]);
        let cross = (v.a - u.a) * (pt.b - u.b) - (pt.a - u.a) * (v.b - u.b);
        if u.b <= pt.b {
            if v.b > pt.b && cross > 0.0 {
                wn += 1;
            }
        } else if v.b <= pt.b && cross < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// Compares the analytic lobes with the saddle level set of a portrait grid:
/// the level set changes sign in the grid cells around the saddle, it crosses
/// the ray through each lobe's turning point within one cell diagonal of the
/// analytic radius, and each lobe encloses the centers on its own side of `ρ*`.
pub fn level_set_consistency(portrait: &Portrait, set: &OrbitSet) -> Result<LevelSetCheck> {
    let Some(level) = portrait.saddle_level else {
        return Err(Error::NoSaddle);
    };
    let g = &portrait.grid;
    let cell = g.da().hypot(g.db());
    let saddle = set.saddle.cart;

    let mut signs = (false, false);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let pt = CartesianState::new(g.a_at(i), g.b_at(j));
            if (pt.a - saddle.a).abs() <= 1.5 * g.da() && (pt.b - saddle.b).abs() <= 1.5 * g.db() {
                let d = portrait.h(i, j) - level;
                signs.0 |= d > 0.0;
                signs.1 |= d < 0.0;
            }
        }
    }
    let passes_through_saddle = signs.0 && signs.1;

    let mut lobes = Vec::new();
    for orbit in &set.orbits {
        let tm = orbit.turning_time();
        let theta_m = orbit.theta_reconstruct(&[tm])?[0];
        let turning_radius = (2.0 * orbit.turning_rho()).sqrt();
        let (ux, uy) = (theta_m.cos(), theta_m.sin());

        // march along the ray and collect sign changes of h - h_saddle
        let r_max = g.a_max.abs().max(g.a_min.abs()).hypot(g.b_max.abs().max(g.b_min.abs()));
        let dr = 0.05 * cell;
        let mut crossings = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        let mut r = 0.0;
        while r <= r_max {
            if let Some(h) = portrait.h_interp(CartesianState::new(r * ux, r * uy)) {
                let d = h - level;
                if let Some((r0, d0)) = prev {
                    if d0.signum() != d.signum() {
                        crossings.push(r0 + (r - r0) * d0 / (d0 - d));
                    }
                }
                prev = Some((r, d));
            }
            r += dr;
        }
        let grid_crossing_radius =
            crossings.into_iter().min_by(|x, y| (x - turning_radius).abs().total_cmp(&(y - turning_radius).abs()));

        // sampled lobe polygon over the time span where it is within 1e-12 of the saddle
        let span = 28.0 / orbit.rate();
        let samples = orbit.sample(tm - span, tm + span, 4001)?;
        let poly: Vec<CartesianState> = samples.iter().map(|s| CartesianState::new(s.a, s.b)).collect();
        let side = |rho: f64| match orbit.branch {
            Branch::Lower => rho < orbit.rho_star,
            Branch::Upper => rho > orbit.rho_star,
        };
        let centers = set.equilibria.iter().filter(|e| e.stability == Stability::Center);
        let mut encloses_matching_centers = true;
        let mut excludes_other_side = Vec::new();
        for c in centers {
            let inside = winding_number(&poly, c.cart) != 0;
            if side(c.polar.rho) {
                encloses_matching_centers &= inside;
            } else if orbit.branch == Branch::Lower {
                excludes_other_side.push(!inside);
            }
        }

        let radius_ok = grid_crossing_radius.is_some_and(|r| (r - turning_radius).abs() <= cell);
        let ok = radius_ok && encloses_matching_centers && excludes_other_side.iter().all(|&b| b);
        lobes.push(LobeCheck {
            branch: orbit.branch,
            turning_radius,
            grid_crossing_radius,
            encloses_matching_centers,
            excludes_other_side,
            ok,
        });
    }
    let consistent = passes_through_saddle && !lobes.is_empty() && lobes.iter().all(|l| l.ok);
    Ok(LevelSetCheck { passes_through_saddle, lobes, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homoclinic::build_orbits;

    #[test]
    fn small_grids() {
        let p = SystemParams::default();
        let pt = portrait(&p, &PortraitGrid::square(2, 0.8)).unwrap();
        assert_eq!(pt.rows.len(), 4);
        let pt = portrait(&p, &PortraitGrid::square(5, 0.8)).unwrap();
        let origin = pt.rows.iter().find(|r| r.a == 0.0 && r.b == 0.0).unwrap();
        assert_eq!(origin.h, 0.0);
        assert!(portrait(&p, &PortraitGrid::square(1, 0.8)).is_err());
        let bad = PortraitGrid { a_min: 1.0, a_max: -1.0, ..PortraitGrid::square(3, 1.0) };
        assert!(portrait(&p, &bad).is_err());
    }

    #[test]
    fn row_major_order() {
        let p = SystemParams::default();
        let g = PortraitGrid { nx: 3, ny: 2, a_min: 0.0, a_max: 1.0, b_min: 0.0, b_max: 1.0 };
        let pt = portrait(&p, &g).unwrap();
        let coords: Vec<(f64, f64)> = pt.rows.iter().map(|r| (r.a, r.b)).collect();
        assert_eq!(coords, [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (0.0, 1.0), (0.5, 1.0), (1.0, 1.0)]);
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let p = SystemParams::default();
        let pt = portrait(&p, &PortraitGrid::square(11, 1.0)).unwrap();
        for r in pt.rows.iter().step_by(7) {
            assert!((pt.h_interp(CartesianState::new(r.a, r.b)).unwrap() - r.h).abs() < 1e-14);
        }
        assert!(pt.h_interp(CartesianState::new(2.0, 0.0)).is_none());
    }

    #[test]
    fn winding() {
        let sq = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)].map(|(a, b)| CartesianState::new(a, b));
        assert_eq!(winding_number(&sq, CartesianState::new(0.5, 0.5)).abs(), 1);
        assert_eq!(winding_number(&sq, CartesianState::new(1.5, 0.5)), 0);
    }

    #[test]
    fn reference_level_set() {
        let p = SystemParams::default();
        let set = build_orbits(&p).unwrap();
        let pt = portrait(&p, &PortraitGrid::square(200, 1.3)).unwrap();
        let chk = level_set_consistency(&pt, &set).unwrap();
        assert!(chk.consistent, "{chk:?}");
    }
}
