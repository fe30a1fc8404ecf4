//! Exact enumeration toolkit for skew Motzkin paths.
//!
//! Skew Motzkin paths are Motzkin paths that may also use a left step
//! `(-1,-1)` as long as they never overlap themselves. The crate counts them
//! four independent ways and cross-checks the results:
//!
//! * [`path`]: the automaton definition and an exhaustive enumerator;
//! * [`dpcount`]: dynamic programming over `(length, level, layer)`;
//! * [`closedforms`]: kernel-method generating functions as exact
//!   truncated series ([`series`]);
//! * [`asymptotics`]: the dominant singularity and the leading-order laws
//!   for counts and average height, in high precision.
//!
//! [`sampler`] draws exactly uniform paths from the DP tables and [`cli`]
//! drives everything from the `skm` binary.

pub mod asymptotics;
pub mod cli;
pub mod closedforms;
pub mod dpcount;
pub mod path;
pub mod precision;
pub mod sampler;
pub mod series;
pub mod verify;

pub use path::{Layer, Path, Step};
pub use series::{MarkedSeries, TruncatedSeries};
