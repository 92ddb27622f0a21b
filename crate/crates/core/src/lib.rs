//! Nonlinear isogeometric Kirchhoff–Love membranes and shells with surface
//! and bending viscoelasticity.

pub mod elastic;
pub mod element;
pub mod error;
pub mod kinematics;
pub mod material;
pub mod maxwell;
pub mod mesh;
pub mod oracles;
pub mod point;
pub mod scenario;
pub mod solver;
pub mod spline;
mod sparse;
pub mod tensor;

pub use error::{Error, ErrorCategory, Result};
