//! Numerical laboratory for a first-moment shallow water Exner moment model
//! with sediment entrainment and deposition.
//!
//! The model couples water mass balance, depth-averaged momentum, the first
//! velocity-moment equation, a suspended-sediment concentration equation, and
//! bed evolution into a quasilinear balance law
//!
//! ```text
//!     dW/dt + A(W) dW/dx = S(W),    W = (h, h*u_m, h*alpha_1, h*c_m, h_b)
//! ```
//!
//! The crate provides:
//!
//! * the empirical closures (mixture density, Shields stress, Meyer-Peter-Muller
//!   bedload capacity, settling velocity, entrainment/deposition) in [`closures`],
//! * the source vector, its fast/slow split, and analytic Jacobians in [`source`],
//! * the 5x5 transport matrix in [`transport`],
//! * a small dense real/complex linear-algebra kernel in [`linalg`],
//! * equilibrium classification, structural stability conditions, weak
//!   hyperbolicity detection, and spectral scans in [`stability`],
//! * a 1-D operator-split finite-volume solver in [`solver`],
//! * JSON configuration and CSV output in [`io`], and
//! * the built-in verification checks in [`verify`].
//!
//! Runnable entry points live in `examples/` (one per capability) and in the
//! thin `swemed1` binary with `simulate`, `stability`, `spectrum`, and
//! `verify` subcommands.

pub mod closures;
pub mod io;
pub mod linalg;
pub mod params;
pub mod solver;
pub mod source;
pub mod stability;
pub mod state;
pub mod transport;
pub mod verify;

pub use closures::ClosureBundle;
pub use params::Parameters;
pub use source::SourceMode;
pub use state::{Primitive, State};

use thiserror::Error;

/// Errors raised by pointwise model evaluations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dry state: h = {h:.6e} is below the floor h_min = {h_min:.6e}")]
    Dry { h: f64, h_min: f64 },
    #[error("non-finite state component encountered")]
    NonFinite,
}
