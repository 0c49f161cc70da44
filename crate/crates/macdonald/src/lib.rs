//! Nonsymmetric and intermediate Macdonald polynomials computed exactly in the
//! basic representation of a double affine Hecke algebra.

pub mod params;
pub mod rootdata;
pub mod laurent;
pub mod hecke;
pub mod weights;
pub mod macpoly;
pub mod induced;
pub mod matweight;
pub mod verify;
pub mod cli;
