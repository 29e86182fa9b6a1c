//! Parameter sweeps of the three-equilibrium condition and homoclinic existence.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibria::{solve_equilibria, three_root_condition, Stability};
use crate::homoclinic::{build_orbits, Branch};
use crate::model::SystemParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamName {
    A,
    B,
    J,
    #[serde(rename = "gamma")]
    Gamma,
    C,
}

impl ParamName {
    pub fn get(self, p: &SystemParams) -> f64 {
        match self {
            ParamName::A => p.amp_a,
            ParamName::B => p.amp_b,
            ParamName::J => p.detuning,
            ParamName::Gamma => p.gamma,
            ParamName::C => p.nonlinearity,
        }
    }

    pub fn set(self, p: &mut SystemParams, v: f64) {
        match self {
            ParamName::A => p.amp_a = v,
            ParamName::B => p.amp_b = v,
            ParamName::J => p.detuning = v,
            ParamName::Gamma => p.gamma = v,
            ParamName::C => p.nonlinearity = v,
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParamName::A => "A",
            ParamName::B => "B",
            ParamName::J => "J",
            ParamName::Gamma => "gamma",
            ParamName::C => "C",
        })
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(ParamName::A),
            "B" => Ok(ParamName::B),
            "J" => Ok(ParamName::J),
            "gamma" => Ok(ParamName::Gamma),
            "C" => Ok(ParamName::C),
            other => Err(Error::InvalidInput(format!(
                "unknown sweep parameter {other:?}, expected one of A, B, J, gamma, C"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: ParamName,
    pub min: f64,
    pub max: f64,
    /// Number of grid points, endpoints included.
    pub n: usize,
}

impl SweepAxis {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidInput(format!(
                "sweep axis {} needs at least 2 points, got {}",
                self.param, self.n
            )));
        }
        if !self.min.is_finite() || !self.max.is_finite() || !(self.min < self.max) {
            return Err(Error::InvalidInput(format!(
                "sweep axis {} bounds must be finite and ordered, got [{}, {}]",
                self.param, self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.n - 1) as f64
        }
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: SystemParams,
    pub x: SweepAxis,
    pub y: Option<SweepAxis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub ix: usize,
    pub iy: usize,
    pub x: f64,
    pub y: Option<f64>,
    pub d: f64,
    pub condition: bool,
    pub equilibrium_count: Option<usize>,
    pub saddle: Option<bool>,
    pub lower: Option<bool>,
    pub upper: Option<bool>,
    pub error: Option<String>,
}

fn evaluate(p: &SystemParams, ix: usize, iy: usize, x: f64, y: Option<f64>) -> SweepCell {
    let mut cell = SweepCell {
        ix,
        iy,
        x,
        y,
        d: p.derived_d(),
        condition: false,
        equilibrium_count: None,
        saddle: None,
        lower: None,
        upper: None,
        error: None,
    };
    if let Err(e) = p.validate() {
        cell.error = Some(e.to_string());
        return cell;
    }
    cell.condition = three_root_condition(p);
    match solve_equilibria(p) {
        Ok(eqs) => {
            cell.equilibrium_count = Some(eqs.len());
            cell.saddle = Some(eqs.iter().any(|e| e.stability == Stability::Saddle));
        }
        Err(e) => {
            cell.error = Some(e.to_string());
            return cell;
        }
    }
    match build_orbits(p) {
        Ok(set) => {
            cell.lower = Some(set.get(Branch::Lower).is_some());
            cell.upper = Some(set.get(Branch::Upper).is_some());
        }
        Err(Error::NoSaddle) => {
            cell.lower = Some(false);
            cell.upper = Some(false);
        }
        Err(e) => cell.error = Some(e.to_string()),
    }
    cell
}

/// Evaluates every cell in parallel; the output is row-major (`y` outer).
/// Failures are recorded per cell and never abort the sweep.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepCell>> {
    spec.x.validate()?;
    if let Some(y) = &spec.y {
        y.validate()?;
        if y.param == spec.x.param {
            return Err(Error::InvalidInput(format!("both sweep axes use {}", y.param)));
        }
    }
    let ny = spec.y.map_or(1, |y| y.n);
    let nx = spec.x.n;
    Ok((0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let (iy, ix) = (k / nx, k % nx);
            let mut p = spec.base;
            let x = spec.x.value(ix);
            spec.x.param.set(&mut p, x);
            let y = spec.y.map(|ay| {
                let v = ay.value(iy);
                ay.param.set(&mut p, v);
                v
            });
            evaluate(&p, ix, iy, x, y)
        })
        .collect())
}

/// Indices `i` along a one-dimensional sweep where the equilibrium count
/// differs between cells `i` and `i + 1`.
pub fn count_transitions(cells: &[SweepCell]) -> Vec<(usize, Option<usize>, Option<usize>)> {
    cells
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].iy == w[1].iy && w[0].equilibrium_count != w[1].equilibrium_count)
        .map(|(i, w)| (i, w[0].equilibrium_count, w[1].equilibrium_count))
        .collect()
}
