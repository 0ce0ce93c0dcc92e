//! Symbolic tensor calculus for checking the Kaluza-Klein route from the
//! five-dimensional connection to the electromagnetic field tensor, its
//! gauge invariance, and the holonomy quantization bound.

pub mod cli;
pub mod exprlang;
pub mod geometry;
pub mod holonomy;
pub mod kaluza;
pub mod symmetry;
