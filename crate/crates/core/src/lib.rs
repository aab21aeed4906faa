//! Exact computation of open and closed descendent integrals in low genus,
//! their Virasoro and KdV constraints, and the stable-graph combinatorics of
//! moduli of marked disks.

pub mod closed;
pub mod error;
pub mod graphs;
pub mod identities;
pub mod multiset;
pub mod open;
pub mod operator;
pub mod rational;
pub mod series;

pub use error::{Error, Result};
pub use operator::DiffOperator;
pub use rational::ExactRational;
pub use series::{FormalSeries, Monomial, SeriesAction};
