//! Combinatorial and algebraic rigidity analysis of body-and-cad frameworks.

pub mod algebra;
pub mod analyzer;
pub mod cad;
pub mod engine;
pub mod field;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod parallel;
