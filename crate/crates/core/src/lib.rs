//! Numerical laboratory for homogeneous determinantal point processes on
//! Gromov hyperbolic spaces: model geometries (Poincaré disk, q-regular
//! tree), projection kernels in radial form, number-variance machinery,
//! exact sampling, and the uniform variance/expectation lower bound.

pub mod bounds;
pub mod dpp;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod kernels;
pub mod operator;
pub mod policy;
pub mod quad;
pub mod sampler;

pub use error::{Error, Result};
pub use policy::NumericPolicy;
