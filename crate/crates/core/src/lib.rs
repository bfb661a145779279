//! Exact log and local Gromov-Witten invariants of products of fake weighted
//! projective spaces, and the log-local correspondence between them.
//!
//! Log invariants come from tropical multiplicities ([`tropical`]), local
//! invariants from coefficients of an equivariant I-function ([`givental`]).
//! [`verify`] compares both against closed forms over a box of degrees.

pub mod coh_ring;
pub mod error;
pub mod fault;
pub mod givental;
pub mod lattice;
pub mod multivector;
pub mod toric;
pub mod tropical;
pub mod verify;

pub use error::{Error, Result};
pub use toric::{CurveClass, FwpsFactor, NefToricProduct};
