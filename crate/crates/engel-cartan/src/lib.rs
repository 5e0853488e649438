//! Canonical Cartan geometry of 4-dimensional Engel CR manifolds.
//!
//! The crate builds, from a pair of vector fields spanning the CR
//! distribution, the normalized adapted frame, the coefficients of the
//! canonical connection, and the curvature invariants whose vanishing
//! characterizes the flat model. Everything is computed through truncated
//! Taylor arithmetic at chosen anchor points, so results are exact for
//! polynomial data up to the working order.

pub mod cartan;
pub mod cohomology;
pub mod engel;
pub mod manifest;
pub mod report;
pub mod error;
pub mod fields;
pub mod flows;
pub mod jets;
pub mod models;
pub mod poly;

pub use cartan::CartanContext;
pub use engel::EngelStructure;
pub use error::{Error, Point, Result};
pub use fields::{Frame, ScalarField, StructureFunctions, VectorField};
pub use jets::Jet;
pub use poly::ChartPolynomial;
