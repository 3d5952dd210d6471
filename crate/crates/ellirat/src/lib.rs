//! John ellipsoids and integral ratios of log-concave functions.
//!
//! The crate models integrable log-concave functions `f = h·e^{-v}` with
//! polytopal level sets, computes the maximum-volume inscribed ellipsoid of
//! every level set, locates the level `t₀` maximizing `t‖f‖∞|E_t(f)|`, and
//! derives from that the integral ratio, John-position normalizations,
//! contact-point certificates, polar projection bodies and the associated
//! affine Sobolev-type inequality reports.
//!
//! Layout:
//! - [`geometry`]: H/V-polytopes, ellipsoids, volumes, projections;
//! - [`mvie`]: the inscribed-ellipsoid solver and its certificates;
//! - [`logconcave`]: the function model and layer-cake integrals;
//! - [`john`]: the optimal level search and extremal comparisons;
//! - [`projection`]: polar projection bodies and inequality reports;
//! - [`asplund`]: sup-convolution products and derivative checks;
//! - [`funcspec`]: the JSON function-spec format consumed by the CLI;
//! - [`verify`]: the built-in verification corpus and its checks.

pub mod error;
pub mod lp;
pub mod nnls;
pub mod quad;
pub mod special;

pub mod asplund;
pub mod funcspec;
pub mod geometry;
pub mod john;
pub mod logconcave;
pub mod mvie;
pub mod projection;
pub mod verify;

pub use error::{Error, Result};
