//! Values for cooperative games with incomplete coalition information.
//!
//! A game is known only on a family of coalitions (a set system). This crate
//! computes three completions of such games and their Shapley values: the
//! R-value, the IC-value and the uniform-dividend (UD) value. It decides when
//! the UD-value is unique, samples positive extensions, checks allocation
//! axioms on concrete instances, and runs the census and comparison
//! experiments.
//!
//! Games are generic over [`Scalar`]; use the `f64` aliases for experiments
//! and the exact [`Rational`] aliases wherever a decision must not depend on
//! rounding.

// Negated float comparisons are how argument checks reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axioms;
pub mod error;
pub mod experiments;
pub mod gamefile;
pub mod games;
pub mod linalg;
pub mod plot;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod setsys;
pub mod values;

pub use error::{GameError, Result};
pub use games::{Allocation, CompleteGame, Dividends, IncompleteGame};
pub use scalar::{Rational, Scalar};
pub use setsys::{ClosurePartition, Coalition, SetSystem};
pub use values::ValueKind;

pub type Game = CompleteGame<f64>;
pub type ExactGame = CompleteGame<Rational>;
pub type Incomplete = IncompleteGame<f64>;
pub type ExactIncomplete = IncompleteGame<Rational>;
pub type Payoffs = Allocation<f64>;
pub type ExactPayoffs = Allocation<Rational>;
