//! Chevalley groups of types `D_l`, `E_6`, `E_7` in minuscule modules over
//! products of chain rings, and tools for studying their overgroups of the
//! subsystem subgroup obtained by crossing one end node.
//!
//! The modules build on each other: [`rings`] supplies the coefficient
//! rings, [`roots`] and [`weights`] the combinatorics, [`rep`] the matrices of
//! root elements, [`forms`] the invariant forms, and [`overgroup`] the
//! membership tests and extraction procedures. [`suites`] bundles the
//! verification suites used by the command-line tool and the tests.

pub mod error;
pub mod exec;
pub mod forms;
pub mod io;
pub mod matrix;
pub mod overgroup;
pub mod rep;
pub mod rings;
pub mod rng;
pub mod roots;
pub mod suites;
pub mod weights;

pub use error::{Error, Result};
