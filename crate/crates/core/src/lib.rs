//! Analysis and sizing optimisation of four-legged X-braced jacket
//! substructures for offshore wind turbines.

// negated comparisons reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// element matrices read best with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod constraints;
pub mod defaults;
pub mod design;
pub mod error;
pub mod exec;
pub mod fem;
pub mod ga;
pub mod io;
pub mod manifest;
pub mod material;
pub mod mesh;
pub mod model;
pub mod report;
pub mod scenario;
pub mod section;
pub mod soil;
pub mod sweeps;
pub mod wave;

pub use error::{Error, Result};
