//! Shared numerical kernels: adaptive quadrature, monotone interpolation,
//! geometric grids, and finite differences.

pub mod fd;
pub mod grid;
pub mod interp;
pub mod quad;
pub mod special;
