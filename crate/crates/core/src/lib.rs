//! Initial value problems for integrable quad-equations on planar quad-graphs.

pub mod cauchy;
pub mod cli;
pub mod equations;
pub mod field;
pub mod fixtures;
pub mod graph;
pub mod lax;
pub mod scalar;
pub mod solitons;
pub mod solver;
pub mod unionfind;
