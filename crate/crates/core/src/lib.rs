//! Exact solver for flexible systems of linear inclusions: linear systems
//! whose coefficients and right-hand sides carry neutrix error terms from
//! the eps-scaled class, solved by increasing row-echelon elimination and
//! the parameter method, plus robustness analysis of the solution set.

pub mod extlinalg;
pub mod extnum;
pub mod parse;
mod poly;
pub mod render;
pub mod robustness;
pub mod solver;

pub use poly::{rat, rat_int, Poly, Rat};
