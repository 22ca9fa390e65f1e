//! Exact time-domain response of a thickness-polarised piezoelectric rod
//! with a power-law damper under its lower face and a stress pulse on its
//! upper face.
//!
//! The rod carries one longitudinal wave speed `c = sqrt(C^D/ρ)` with
//! `C^D = C + e²/ε`. Because the electric displacement vanishes under
//! open-circuit conditions, the boundary velocities obey a delay recursion
//! with period `θ = h/c` and the damper enters only through the inverse
//! `Q_α` of `ξ ↦ ξ + γ|ξ|^α sgn ξ`. That recursion is exact on any time
//! grid whose step divides `θ`.
//!
//! ```
//! use piezodyn::prelude::*;
//!
//! let mat = MaterialProperties::PZT5A;
//! let geo = Geometry::with_diameter(0.01, 0.01)?;
//! let derived = derive_constants(&mat, &geo)?;
//! let damper = derive_damper(1000.0, 0.5, &derived, &geo)?;
//! let grid = make_grid(derived.transit, 64, 50e-6)?;
//! let p_a = face_pressure_from_force(28_640.0, &geo)?;
//! let load = LoadSignal::rectangular(p_a, 5e-6)?.snapped_to(&grid);
//!
//! let run = run_recursive(&mat, &geo, &damper, &load, &grid)?;
//! let peak = run.history.voltage.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
//! assert!(peak > 50e3 && peak < 150e3);
//! # Ok::<(), piezodyn::Error>(())
//! ```
//!
//! Module map:
//!
//! * [`material`]: constants, damper coefficient, time grid
//! * [`damper`]: the damper inverse `Q_α` and `2Q_α − I`
//! * [`load`]: applied stress pulses
//! * [`solver`]: the recursion and damper dissipation
//! * [`explicit`]: closed forms for pulses shorter than `6θ`
//! * [`fields`]: interior `u, v, σ, φ`
//! * [`fd`]: finite-difference cross-check
//! * [`metrics`]: peak statistics of voltage traces

pub mod damper;
pub mod error;
pub mod explicit;
pub mod fd;
pub mod fields;
pub mod load;
pub mod material;
pub mod metrics;
pub mod solver;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::damper::{damper_residual, QAlphaSolver};
    pub use crate::error::{Error, Result};
    pub use crate::explicit::{classify_case, explicit_on_grid, explicit_v0, explicit_vh, DurationCase};
    pub use crate::fd::{convergence_study, run_fd, FdConfig};
    pub use crate::fields::{displacement_at, potential_at, snapshot, stress_at, velocity_at, FieldSnapshot};
    pub use crate::load::{face_pressure_from_force, LoadSignal};
    pub use crate::material::{
        derive_constants, derive_damper, make_grid, DamperSpec, DerivedConstants, Geometry,
        MaterialProperties, TimeGrid,
    };
    pub use crate::metrics::{relative_deviation, VoltageMetrics};
    pub use crate::solver::{
        boundary_residual, dissipated_energy, run_recursive, BoundaryHistory, SimulationResult,
    };
}

// The guide's Rust listings run as doctests of these empty modules.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/damper.md")]
    mod damper {}
    #[doc = include_str!("../../../book/src/recursion.md")]
    mod recursion {}
    #[doc = include_str!("../../../book/src/closed-forms.md")]
    mod closed_forms {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/cross-checks.md")]
    mod cross_checks {}
}
