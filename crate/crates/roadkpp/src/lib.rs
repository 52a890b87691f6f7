//! Numerical laboratory for Fisher-KPP invasion in a half-plane coupled to a
//! line carrying fractional (non-local) diffusion.
//!
//! The field `v(x, y, t)` obeys a reaction-diffusion equation in the upper
//! half-plane, the road `u(x, t)` obeys a fractional diffusion equation on the
//! line `y = 0`, and the two exchange individuals through a Robin flux
//! condition. The crate provides:
//!
//! * the coupled time-stepper and its reduced variants (linearized,
//!   reaction-free, Dirichlet benchmark),
//! * two independent realizations of the 1D fractional Laplacian that serve
//!   as oracles for each other,
//! * grid-free evaluation of the linearized road density through its
//!   Fourier-Laplace representation, with the explicit asymptotic law,
//! * explicit sub-solution constructions and verification of the
//!   inequalities they must satisfy,
//! * level-set extraction, spreading-rate fits and rescaled-frame views,
//! * a scenario runner driven by a single TOML config.

pub mod config;
pub mod contour;
pub mod diagnostics;
pub mod error;
pub mod fraclap;
pub mod grid;
pub mod io;
pub mod model;
pub mod scenario;
pub mod solver;
pub mod subsolution;

pub use error::{Error, Result};
pub use model::{DerivedConstants, ModelParams, ReactionSpec};
