//! Goal recognition with planning landmarks.
//!
//! The crate parses and grounds a STRIPS-oriented PDDL subset, extracts fact
//! landmarks per goal hypothesis from the relaxed planning graph, scores
//! goals online from observed actions, and mixes those scores with a naive
//! Bayes posterior using a weight that grows with the training-set size.
//! [`eval`] holds the cross-validation harness and fixture generators.

pub mod condition;
pub mod error;
pub mod eval;
pub mod ground;
pub mod landmarks;
pub mod nbm;
pub mod online;
pub mod pddl;
pub mod problem;
pub mod recognizer;
pub mod rpg;

pub use error::{Error, ParseError, Result};
pub use ground::{ground, ground_with, load_problem, GroundOptions};
pub use landmarks::{extract_landmarks, extract_per_subgoal, LandmarkExtractor, LandmarkSet};
pub use problem::{ActionId, FactId, GroundAction, GroundFact, Plan, PlanningProblem, State};
pub use rpg::{build_rpg, relaxed_solvable, Rpg};
