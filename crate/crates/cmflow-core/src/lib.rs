//! Colding-Minicozzi kappa-entropy of discretized submanifolds in
//! Cartan-Hadamard model spaces, mean curvature flow for the shipped
//! submanifold variants, and numerical verification of the kernel
//! identities, the weighted monotonicity formula, and the sharp entropy
//! lower bounds.
//!
//! Modules mirror the moving parts:
//!
//! * [`kernel`] - hyperbolic heat kernels K_{n,kappa}, backwards kernels,
//!   radial log-derivatives, bounds and normalization checks.
//! * [`geometry`] - Euclidean / hyperboloid / warped-product ambient
//!   spaces with exact distance and comparison functions.
//! * [`submanifold`] - geodesic spheres, polyline curves, surfaces of
//!   revolution, with quadrature weights, normals, and mean curvature.
//! * [`entropy`] - the F-functional, the entropy supremum search, and
//!   Gaussian densities along flows.
//! * [`flow`] - mean curvature flow integrators, the warped-product
//!   counterexample, and the monotonicity-identity residual.
//! * [`harness`] - the `cmflow` CLI: property suites, experiment sweeps,
//!   and CSV/JSON export.

pub mod entropy;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod harness;
mod jets;
pub mod kernel;
pub mod optim;
pub mod quad;
pub mod shapes;
pub mod submanifold;

pub use error::{CmError, Result};
pub use geometry::{AmbientPoint, ModelSpace, WarpedProfile};
pub use kernel::{BackwardsKernel, KernelEvaluator, QuadraturePolicy};
pub use submanifold::Submanifold;
