//! Designs and cubatures on unions of Grassmannians.
//!
//! Points are orthogonal projectors of fixed ranks in R^d. The crate computes
//! dimensions of polynomial spaces, exact lower bounds for the weighted
//! fusion frame potential, certifies configurations against those bounds,
//! minimizes the potential numerically and constructs explicit designs.

// NaN-rejecting guards such as `!(x > 0.0)` are intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod families;
pub mod geometry;
pub mod io;
pub mod kernels;
pub mod optimizer;
pub mod partitions;
pub mod potential;
pub mod repdim;
pub mod zonal;

pub use error::{Error, Result};
pub use geometry::Projector;
pub use partitions::Partition;
pub use potential::{certify, ffp, CertificationReport, Configuration, Verdict};
pub use zonal::{lower_bound, t_matrix, SignedMeasure};
