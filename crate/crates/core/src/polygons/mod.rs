//! Hodge and arithmetic polygons of the interval `[-e, d]`.
//!
//! Everything here is exact rational arithmetic on small combinatorial data:
//! ceiling sums, the index sets `I_k` and `V_k`, and the polygons built from
//! them.

mod arithmetic;
mod chain;
mod rational;
mod shape;

pub use arithmetic::{
    analyze_arithmetic_polygon, arithmetic_polygon, degree, hodge_gap, hodge_polygon, index_pairs,
    minimizing_pairs, p_unit, ArithmeticAnalysis, IndexPair, LocalRelation, LocalRelationKind,
    PairSet,
};
pub use chain::{convexity_report, lies_on_or_above, ConvexityReport, LowerPolygon};
pub use rational::RationalValue;
pub use shape::{IntervalShape, Threshold};

#[cfg(test)]
mod tests;
