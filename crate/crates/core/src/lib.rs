pub mod error;
pub mod exec;
pub mod geometry;
pub mod harness;
pub mod linsolve;
pub mod operators;
pub mod potentials;
pub mod solvers;
pub mod special_fn;
