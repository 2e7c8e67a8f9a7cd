//! Vibrational levels of symmetric hydrogen-bonded triatomics (X–H–X).
//!
//! The pipeline: fit a quartic normal-form potential to electronic-surface
//! samples (`surface`), reduce the three-nucleus problem to standard form via
//! Jacobi coordinates and mass scalings (`geometry`), solve the coupled 2D
//! normal-form eigenproblem in a harmonic-oscillator product basis
//! (`nf_solver`), cross-check against a finite-difference reference
//! (`oracle`), and assemble the small-parameter energy expansion and
//! quasimode residual diagnostics (`expansion`).

pub mod error;
pub mod expansion;
pub mod geometry;
pub mod nf_solver;
pub mod oracle;
pub mod surface;
pub mod units;

pub use error::{Error, Result};
