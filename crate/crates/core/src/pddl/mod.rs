//! Reader for the supported PDDL subset: STRIPS with typing, negative,
//! disjunctive and quantified preconditions, plus numeric fluents that are
//! parsed and ignored.

pub mod model;
mod parser;
pub mod sexpr;

pub use model::LiftedModel;
pub(crate) use parser::parse_number;
pub use parser::{parse_domain, parse_domain_and_problem, parse_problem};
