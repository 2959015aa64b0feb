//! Lie-group time integration of constrained rigid multibody systems.
//!
//! Configurations live on `SE(3)ⁿ` or `(SO(3)×ℝ³)ⁿ`; the index-1 equations of
//! motion are stepped with explicit Munthe-Kaas Runge–Kutta schemes so that
//! the two formulations can be compared on the same mechanisms.

pub mod bench;
pub mod dae;
pub mod error;
pub mod integrator;
pub mod lie;
pub mod models;
pub mod oracle;
pub mod state;

pub use error::{Error, Result};
