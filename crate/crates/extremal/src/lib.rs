//! Computational laboratory for extremal nonexpansive self-mappings of
//! finite-dimensional unit balls.
//!
//! The crate works in the unit ball `C` of R^n equipped with the l1,
//! l2, or linf norm, and studies the space `M` of nonexpansive
//! mappings `C -> C` under the uniform metric
//! `d(f, g) = sup_x ||f(x) - g(x)||`. It provides:
//!
//! * ball geometry: extreme points, normal cones, and the exposed /
//!   almost-exposed taxonomy ([`ball`]);
//! * a small expression language for mappings, with Lipschitz and
//!   uniform-distance estimation ([`mapping`]);
//! * an exact extremality classifier for linear mappings on linf,
//!   boundary-pinning diagnostics, and a brute-force extremality
//!   oracle for grid mappings ([`extremality`]);
//! * convex-decomposition certificates and the geometry of the set of
//!   decomposition members ([`decomp`]);
//! * porosity witnesses: certified empty balls inside the set of
//!   proper convex-combination members ([`porosity`]);
//! * JSON documents, deterministic reports, and the CLI command layer
//!   ([`doc`], [`report`], [`cli`]).
//!
//! The `examples/` directory contains one runnable walkthrough per
//! capability; start there. The `extremal` binary exposes the same
//! operations as subcommands for scripted runs.

pub mod ball;
pub mod cli;
pub mod decomp;
pub mod doc;
pub mod error;
pub mod extremality;
pub mod linalg;
pub mod mapping;
pub mod porosity;
pub mod report;
pub mod sample;
pub mod space;

pub use ball::{classify_point, is_extreme_point, normal_cone, NormalCone, PointClass, PointReport};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use space::{Functional, NormTag, SpaceContext, Vector, DEFAULT_TOL};
