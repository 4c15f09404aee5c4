//! Degree sets of superelliptic curves y^q = F(x) over a discretely valued
//! field with algebraically closed residue field.

pub mod error;
pub mod cluster_tree;
pub mod congruence;
pub mod curve_model;
pub mod degree_engine;
pub mod exact_arith;
pub mod family_gen;
pub mod natset;
pub mod oracle;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
