//! Equilibrium points: the depressed cubic in `b`, three-root condition,
//! Newton polish on the full planar system and saddle/center classification.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{CartesianState, PolarState, SystemParams};
use crate::{Error, Result};

/// Below this `|J - B sin γ|` the `a`-from-`b` elimination is not trusted.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;
/// Maximum vector-field component accepted for a polished equilibrium.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// `|det J|` below this cannot be classified.
pub const CLASSIFY_DET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stability {
    Saddle,
    Center,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stability::Saddle => "saddle",
            Stability::Center => "center",
        })
    }
}

/// `c3 b³ + c2 b² + c1 b + c0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoefficients {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl CubicCoefficients {
    pub fn eval(&self, x: f64) -> f64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0
    }

    /// All real roots, ascending. Bracketing on the monotone pieces between
    /// critical points, refined by bisection.
    pub fn real_roots(&self) -> Vec<f64> {
        if self.c3 == 0.0 {
            return quadratic_roots(self.c2, self.c1, self.c0);
        }
        // monic x³ + p x² + q x + r
        let (p, q, r) = (self.c2 / self.c3, self.c1 / self.c3, self.c0 / self.c3);
        let f = |x: f64| ((x + p) * x + q) * x + r;
        // Fujiwara bound on root magnitude
        let bound = 2.0 * p.abs().max(q.abs().sqrt()).max((0.5 * r.abs()).cbrt());
        let bound = if bound > 0.0 { bound * 1.0001 } else { 1.0 };

        let mut breaks = vec![-bound];
        let crit = quadratic_roots(3.0, 2.0 * p, q);
        if crit.len() == 2 {
            breaks.extend(crit.iter().copied().filter(|c| c.abs() < bound));
        }
        breaks.push(bound);

        let mut roots = Vec::new();
        for w in breaks.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let (flo, fhi) = (f(lo), f(hi));
            if flo == 0.0 {
                if roots.last() != Some(&lo) {
                    roots.push(lo);
                }
                continue;
            }
            if fhi == 0.0 {
                roots.push(hi);
                continue;
            }
            if flo.signum() != fhi.signum() {
                roots.push(bisect(f, lo, hi, flo));
            }
        }
        roots
    }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    // cancellation-free pair
    let t = -0.5 * (b + b.signum() * disc.sqrt());
    if t == 0.0 {
        return vec![0.0, 0.0];
    }
    let (x1, x2) = (t / a, c / t);
    if x1 <= x2 {
        vec![x1, x2]
    } else {
        vec![x2, x1]
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut flo: f64) -> f64 {
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub cart: CartesianState,
    pub polar: PolarState,
    pub eigenvalues: [Complex64; 2],
    pub stability: Stability,
    /// Max absolute vector-field component at `cart`.
    pub residual: f64,
}

/// `D < 16 / (81 C)`.
pub fn three_root_condition(p: &SystemParams) -> bool {
    p.derived_d() < 16.0 / (81.0 * p.nonlinearity)
}

/// The cubic in `b` obtained by eliminating `a = (A + B cos γ) b / (B sin γ - J)`.
pub fn cubic_coefficients(p: &SystemParams) -> Result<CubicCoefficients> {
    let q = p.drive_sin();
    if q.abs() < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateParameters { value: q.abs() });
    }
    Ok(CubicCoefficients { c3: -0.75 * p.nonlinearity * p.derived_d() / (q * q), c2: 0.0, c1: 1.0, c0: q })
}

fn residual(p: &SystemParams, s: CartesianState) -> f64 {
    let (da, db) = p.vector_field(s);
    da.abs().max(db.abs())
}

fn newton_polish(p: &SystemParams, mut s: CartesianState) -> Result<CartesianState> {
    let mut res = residual(p, s);
    let mut settled = 0;
    for _ in 0..60 {
        let (da, db) = p.vector_field(s);
        let Some((dx, dy)) = p.jacobian(s).solve((da, db)) else {
            break;
        };
        let next = CartesianState::new(s.a - dx, s.b - dy);
        let next_res = residual(p, next);
        if next_res <= res || res > RESIDUAL_TOL {
            s = next;
            res = next_res;
        }
        if res <= RESIDUAL_TOL {
            // a couple of extra sweeps once inside tolerance
            settled += 1;
            if settled >= 3 || dx.abs().max(dy.abs()) == 0.0 {
                break;
            }
        }
    }
    if res <= RESIDUAL_TOL && s.a.is_finite() && s.b.is_finite() {
        Ok(s)
    } else {
        Err(Error::NewtonFailed { residual: res })
    }
}

/// Eigenvalues of the trace-free Jacobian, `±sqrt(-det)`, and the class.
pub fn classify(s: CartesianState, p: &SystemParams) -> Result<([Complex64; 2], Stability)> {
    let det = p.jacobian(s).det();
    if det.abs() < CLASSIFY_DET_TOL {
        return Err(Error::DegenerateClassification { det });
    }
    if det < 0.0 {
        let lam = (-det).sqrt();
        Ok(([Complex64::new(lam, 0.0), Complex64::new(-lam, 0.0)], Stability::Saddle))
    } else {
        let w = det.sqrt();
        Ok(([Complex64::new(0.0, w), Complex64::new(0.0, -w)], Stability::Center))
    }
}

/// All equilibria, sorted by `ρ` ascending.
pub fn solve_equilibria(p: &SystemParams) -> Result<Vec<Equilibrium>> {
    p.validate()?;
    if p.derived_d() == 0.0 {
        return Err(Error::ContinuumOfEquilibria);
    }
    let cubic = cubic_coefficients(p)?;
    let ratio = p.drive_cos() / p.drive_sin();

    let mut out = Vec::with_capacity(3);
    for b in cubic.real_roots() {
        let cart = newton_polish(p, CartesianState::new(ratio * b, b))?;
        let (eigenvalues, stability) = classify(cart, p)?;
        out.push(Equilibrium { cart, polar: cart.to_polar()?, eigenvalues, stability, residual: residual(p, cart) });
    }
    out.sort_by(|x, y| x.polar.rho.total_cmp(&y.polar.rho));
    Ok(out)
}

/// The unique saddle among the equilibria, if any.
pub fn find_saddle(p: &SystemParams) -> Result<Equilibrium> {
    solve_equilibria(p)?.into_iter().find(|e| e.stability == Stability::Saddle).ok_or(Error::NoSaddle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrigVariant {
    /// Phase `ϖ/3` with `ϖ = (1/3) arccos(...)`, i.e. the factor 1/3 applied twice.
    Literal,
    /// Phase `arccos(...)/3`, the standard trigonometric form.
    SingleThird,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigCandidate {
    pub k: usize,
    pub state: CartesianState,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigRootReport {
    /// `-9 sqrt(CD) / 4`.
    pub arccos_arg: f64,
    pub literal: Vec<TrigCandidate>,
    pub single_third: Vec<TrigCandidate>,
    /// Points that pass the residual test, tagged with the variant that produced them.
    pub matched: Vec<(CartesianState, TrigVariant)>,
}

/// Residual threshold for accepting a trigonometric root.
pub const TRIG_MATCH_TOL: f64 = 1e-9;

/// Evaluates the closed-form trigonometric roots in both the literal
/// double-one-third phase and the single-one-third phase.
pub fn trig_root_formula(p: &SystemParams) -> Result<TrigRootReport> {
    let cd = p.nonlinearity * p.derived_d();
    if cd <= 0.0 {
        return Err(Error::ContinuumOfEquilibria);
    }
    let root_cd = cd.sqrt();
    let arg = -9.0 * root_cd / 4.0;
    if !(-1.0..=1.0).contains(&arg) {
        return Err(Error::ArccosDomain { arg });
    }
    let acos = arg.acos();
    let amp_a = -4.0 * p.drive_cos() / (3.0 * root_cd);
    let amp_b = 4.0 * (p.detuning - p.amp_b * p.gamma.sin()) / (3.0 * root_cd);

    let eval = |phase: f64| -> Vec<TrigCandidate> {
        (0..3)
            .map(|k| {
                let c = (phase + 2.0 * PI * k as f64 / 3.0).cos();
                let state = CartesianState::new(amp_a * c, amp_b * c);
                TrigCandidate { k, state, residual: residual(p, state) }
            })
            .collect()
    };
    let varpi = acos / 3.0;
    let literal = eval(varpi / 3.0);
    let single_third = eval(acos / 3.0);

    let mut matched = Vec::new();
    for (cands, tag) in [(&literal, TrigVariant::Literal), (&single_third, TrigVariant::SingleThird)] {
        matched.extend(cands.iter().filter(|c| c.residual <= TRIG_MATCH_TOL).map(|c| (c.state, tag)));
    }
    Ok(TrigRootReport { arccos_arg: arg, literal, single_third, matched })
}
