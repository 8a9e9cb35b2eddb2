//! Optimal cost of priced timed automata via the corner-point abstraction,
//! and threshold problems for weighted sentences built on it.

mod compile;
mod decide;
mod graph;
pub mod lp;
mod realize;
mod region;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::rational::{fmt_q, Q};

pub use compile::compile_language;
pub use decide::{
    avg_threshold_automaton, compose_sentence, decide_avg_threshold, decide_sum_threshold, shift_for_average,
    sum_threshold_automaton, Decision,
};
pub use graph::{build_corner_points, inf_cost, Arc, ArcKind, CornerPointGraph, Node, Optimum};
pub use realize::{corner_word, realize};
pub use region::{Corner, Region};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CostBound {
    Finite(Q),
    /// No accepting run.
    PosInf,
    /// Costs are unbounded below.
    NegInf,
}

impl CostBound {
    pub fn below(&self, theta: &Q) -> bool {
        match self {
            CostBound::Finite(v) => v < theta,
            CostBound::PosInf => false,
            CostBound::NegInf => true,
        }
    }
}

impl fmt::Display for CostBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostBound::Finite(v) => f.write_str(&fmt_q(v)),
            CostBound::PosInf => f.write_str("inf"),
            CostBound::NegInf => f.write_str("-inf"),
        }
    }
}

impl Serialize for CostBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests;
