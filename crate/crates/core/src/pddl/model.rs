//! Lifted (ungrounded) domain and problem representation.

use std::collections::BTreeMap;

use num_rational::Rational64;

use super::sexpr::Pos;

pub const ROOT_TYPE: &str = "object";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedName>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedAtom {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftedCondition {
    And(Vec<LiftedCondition>),
    Or(Vec<LiftedCondition>),
    Not(Box<LiftedCondition>),
    Atom(LiftedAtom),
    Equal(Term, Term),
    Exists(Vec<TypedName>, Box<LiftedCondition>),
    Forall(Vec<TypedName>, Box<LiftedCondition>),
    /// Numeric comparison; parsed and ignored by all fact-level reasoning.
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LiftedEffect {
    pub add: Vec<LiftedAtom>,
    pub del: Vec<LiftedAtom>,
    /// Sum of constant `(increase (total-cost) k)` effects, if any.
    pub cost: Option<Rational64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub precondition: LiftedCondition,
    pub effect: LiftedEffect,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub requirements: Vec<String>,
    /// type -> parent type; `object` is the implicit root.
    pub types: BTreeMap<String, String>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    /// True if `ty` equals `ancestor` or inherits from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ancestor == ROOT_TYPE {
            return true;
        }
        let mut cur = ty;
        // Bounded walk; a cyclic type declaration cannot loop forever.
        for _ in 0..=self.types.len() {
            if cur == ancestor {
                return true;
            }
            match self.types.get(cur) {
                Some(parent) if parent != cur => cur = parent,
                _ => return false,
            }
        }
        false
    }
}

/// A named goal hypothesis: a conjunction of ground atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedGoal {
    pub name: String,
    pub atoms: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<(String, Vec<String>)>,
    pub goal: Vec<(String, Vec<String>)>,
    pub hypotheses: Vec<NamedGoal>,
}

/// Parsed domain + problem, before grounding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedModel {
    pub domain: Domain,
    pub problem: Problem,
}

impl LiftedModel {
    /// Domain constants followed by problem objects, deduplicated by name.
    pub fn object_table(&self) -> Vec<TypedName> {
        let mut seen = BTreeMap::new();
        for o in self.domain.constants.iter().chain(&self.problem.objects) {
            seen.entry(o.name.clone()).or_insert_with(|| o.ty.clone());
        }
        seen.into_iter().map(|(name, ty)| TypedName { name, ty }).collect()
    }
}
