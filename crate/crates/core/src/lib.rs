//! Sprague-Grundy solver and verification toolkit for multi-dimensional
//! chocolate-bar games and Nim with a threshold-restricted pass.
//!
//! * [`grundy`]: nim-sum, mex, the memoized engine and disjunctive sums.
//! * [`fdsl`]: the expression language for monotone shape functions.
//! * [`chocolate`]: bars `CB(F, x1..xs, y)` and their move relations.
//! * [`nsprop`]: bounded NS checks, slices and the supporting lemmas.
//! * [`verify`]: exhaustive theorem sweeps.
//! * [`nimpass`]: pass-Nim and its encoding as a threshold bar.
//! * [`oracle`]: independent reference evaluators used to confirm results.

pub mod chocolate;
pub mod error;
pub mod exec;
pub mod fdsl;
pub mod grundy;
pub mod nimpass;
pub mod nsprop;
pub mod oracle;
pub mod verify;

pub use chocolate::{ChocGame, ChocPosition};
pub use error::{Error, Result};
pub use exec::Execution;
pub use fdsl::{FunctionSpec, MonotoneFn};
pub use grundy::{grundy, is_p_position, mex, nim_sum, sum_game, GrundyTable, ImpartialGame};
