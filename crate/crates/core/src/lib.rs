//! Equilibria, closed-form homoclinic orbits and numerical verification for the
//! planar Hamiltonian slow flow
//!
//! ```text
//! a' =  b/2 - (3C/8)(a² + b²) b - J/2 + (B/2) sin γ
//! b' = -a/2 + (3C/8)(a² + b²) a - A/2 - (B/2) cos γ
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: parameters, states, vector field, Hamiltonian, polar form.
//! * [`equilibria`]: the equilibrium cubic, root counting and classification.
//! * [`homoclinic`]: saddle energy, the separable radial equation, the closed-form
//!   lobes and phase reconstruction.
//! * [`oracle`]: an independent adaptive integrator, shadowing and identity checks.
//! * [`portrait`], [`sweep`], [`verify`]: data products consumed by the CLI.

// `!(x < y)` is used on purpose so NaN bounds are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equilibria;
mod error;
pub mod homoclinic;
pub mod model;
pub mod oracle;
pub mod portrait;
mod quadrature;
pub mod sweep;
pub mod verify;

pub use equilibria::{
    classify, cubic_coefficients, solve_equilibria, three_root_condition, trig_root_formula, CubicCoefficients,
    Equilibrium, Stability, TrigVariant,
};
pub use error::{Error, Result};
pub use homoclinic::{build_orbits, Branch, HomoclinicOrbit, OrbitSample, OrbitSet};
pub use model::{CartesianState, Jacobian2, PolarState, SystemParams};
pub use portrait::{level_set_consistency, portrait, LevelSetCheck, Portrait, PortraitGrid, PortraitRow};
pub use sweep::{sweep, ParamName, SweepAxis, SweepCell, SweepSpec};
pub use verify::{verify, Check, VerifyConfig, VerifyReport};
