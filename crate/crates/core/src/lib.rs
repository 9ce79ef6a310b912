//! Wavelet estimation in Besov classes: coefficient trees, periodized transforms,
//! Besov and weak Besov functionals, the generic saturating function, observation
//! models, shrinkage estimators, rate formulas and a Monte Carlo risk engine.

// `!(x > 0.0)` guards reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dyadic;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod function_spaces;
pub mod generic;
pub mod models;
pub mod rates;
pub mod records;
pub mod regression;
pub mod wavelet;

pub use dyadic::{level_count, reduce_dyadic, CoefficientTree, Dimension, LevelIndex};
pub use error::{Error, Result};
