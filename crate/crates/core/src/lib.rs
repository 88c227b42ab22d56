//! Enhanced multiscale restriction-smoothed basis (MsRSB) preconditioning.
//!
//! The crate covers the full pipeline used to study the method: structured
//! (optionally distorted) meshes and coarse partitions, TPFA / MPFA-O finite
//! volume flow and Q1 finite element elasticity discretizations, prolongation
//! construction with M-matrix filtering, Krylov solvers with one- and
//! two-level preconditioners, and a configuration-driven experiment runner.

// `!(x > 0.0)` is used on purpose to reject NaN along with non-positive values.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod bench;
pub mod error;
pub mod fe;
pub mod fv;
pub mod krylov;
pub mod mesh;
pub mod sparse;

pub use error::{Error, Result};
