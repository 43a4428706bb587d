//! Self-similar interface shapes in a radial Hele-Shaw cell.
//!
//! The interface is a star-shaped curve r(α) = Σ δ_k cos kα. A shape x and a
//! flux constant C form an eigenpair of the nonlinear problem M[x] + C·G[x] = 0,
//! where M is a surface-tension term (hypersingular integral of curvature) and
//! G collects the flux-driven normal motion. M is homogeneous of degree −2 and
//! G of degree +1, so (βx, C/β³) is an eigenpair whenever (x, C) is; circles
//! solve the system identically for every C.
//!
//! Pipeline: `geometry` samples the curve spectrally, `quadrature` evaluates
//! the singular boundary integrals, `operators` assembles M, G and the
//! residual, `solver` runs damped Newton iteration at fixed C₀ and normalizes
//! the converged eigenpair, `linear_theory` provides closed-form references,
//! `oracle` cross-checks everything against independent naive evaluations, and
//! `experiment` drives the CLI studies.

pub mod config;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod linear_theory;
pub mod operators;
pub mod oracle;
pub mod quadrature;
pub mod solver;
pub mod spectral;

pub use error::{Result, SelfsimError};
pub use geometry::{FourierShape, PhysicalParams, SampledInterface};
pub use solver::{SolveResult, SolveStatus, SolverConfig, StepMode};
