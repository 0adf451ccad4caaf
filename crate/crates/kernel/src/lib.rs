//! Numerical verification kernel for a family of non-Kaehler Calabi-Yau
//! 3-folds built from minimal-surface charts times a flat 4-torus.
//!
//! The library constructs the twisted complex structure from holomorphic
//! Weierstrass data, the balanced metric family, the holomorphic volume form
//! and the Chern curvature of the conformal ansatz, and checks the defining
//! identities pointwise on discretized charts: integrability, balancedness,
//! the anomaly-cancellation trace identities, the explicit degenerate
//! solution of the Strominger system with vanishing gauge curvature, and the
//! pluriclosed obstruction.
//!
//! See the `report` module for the suite runner and the `cycheck` binary for
//! the command-line front end.

pub mod acs;
pub mod catalog;
pub mod config;
pub mod curvature;
pub mod error;
pub mod exterior;
pub mod fiber;
pub mod forms;
pub mod grid;
pub mod jet;
pub mod jet6;
pub mod jetform;
pub mod metrics;
pub mod report;
pub mod roots;
pub mod topology;
pub mod weierstrass;

pub use error::{KernelError, Result};
