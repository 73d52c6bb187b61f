//! Triangular memberships, rule bases and Mamdani inference.

mod centroid;
mod membership;
mod rule;
mod rulebase;

pub use membership::{build_partition, tri_membership, TriangularMF, Universe};
pub use rule::{firing_strength, Clause, Connective, Degrees, Rule};
pub use rulebase::{
    infer, Evaluator, Inference, ParamSlot, ReferentialSet, RuleBase, DEFAULT_GRID_POINTS,
};
