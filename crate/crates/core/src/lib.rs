//! Weighted timed automata over timed valuation monoids, Nivat-style
//! decompositions, relative distance logics and threshold decisions.

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod model;
pub mod monoid;
pub mod optcost;
pub mod rational;
pub mod rdl;
pub mod timed;
pub mod transform;
pub mod wta;
pub mod wrdl;

pub use error::{Error, Result};
pub use monoid::{TimedPvMonoid, TimedValuationMonoid, Weight, WeightPairWord};
pub use rational::Q;
pub use timed::{ClockConstraint, Edge, TimedAutomaton, TimedWord};
pub use wta::WeightedTimedAutomaton;
