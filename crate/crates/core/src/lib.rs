//! Arithmetic of the weight 3/2 forms attached to `X_0(49)`: theta series of
//! ternary forms, Hecke operators and Shimura lifts, the CM newform of level 49,
//! central values of its quadratic twists, and a rank criterion built on them.

pub mod arith;
pub mod cli;
pub mod cmform;
pub mod criterion;
pub mod error;
pub mod fixtures;
pub mod halfint;
pub mod latticesearch;
pub mod lfun;
pub mod qseries;
pub mod theta;

pub use error::{Error, Result};
