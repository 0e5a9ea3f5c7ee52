pub mod coefficient;
pub mod geometry;
pub mod mesh;
pub mod kernels;
pub mod quadrature;
pub mod linalg;
pub mod potentials;
pub mod system;
pub mod verification;
pub mod config;
pub mod cli;
