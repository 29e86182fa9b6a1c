//! Independent numerical checks of the analytic results.

mod identities;
mod integrator;
mod shadow;

pub use identities::{identity_suite, IdentityReport};
pub use integrator::{integrate, integrate_fixed, IntegratorConfig, Trajectory, TrajectoryStats};
pub use shadow::{shadow_compare, shadow_window_cap, SHADOW_GROWTH_CAP};
