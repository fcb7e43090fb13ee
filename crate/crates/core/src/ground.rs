//! Instantiates lifted action schemas over type-compatible objects.
//!
//! Predicates that no action adds or deletes are static: their atoms are
//! evaluated against the initial state while grounding and folded out of the
//! grounded preconditions, as are equality tests and numeric comparisons.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_rational::Rational64;

use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::pddl::model::*;
use crate::problem::{GroundActionSpec, GroundFact, PlanningProblem, ProblemBuilder};

pub const DEFAULT_MAX_ACTIONS: usize = 5_000_000;

#[derive(Debug, Clone, Copy)]
pub struct GroundOptions {
    pub max_actions: usize,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions { max_actions: DEFAULT_MAX_ACTIONS }
    }
}

/// Name given to the single hypothesis of a problem with only `:goal`.
pub const DEFAULT_GOAL_NAME: &str = "goal";

enum Folded {
    True,
    False,
    Open(Condition<GroundFact>),
}

struct Grounder {
    objects_by_type: HashMap<String, Vec<String>>,
    static_preds: HashSet<String>,
    init: HashSet<GroundFact>,
}

type Binding = HashMap<String, String>;

impl Grounder {
    fn new(model: &LiftedModel) -> Self {
        let objects = model.object_table();
        let mut objects_by_type: HashMap<String, Vec<String>> = HashMap::new();
        let mut type_names: BTreeSet<String> = model.domain.types.keys().cloned().collect();
        type_names.extend(model.domain.types.values().cloned());
        type_names.insert(ROOT_TYPE.to_string());
        for action in &model.domain.actions {
            type_names.extend(action.params.iter().map(|p| p.ty.clone()));
        }
        for ty in type_names {
            // object_table() is sorted by name, so each list is canonical.
            let members =
                objects.iter().filter(|o| model.domain.is_subtype(&o.ty, &ty)).map(|o| o.name.clone()).collect();
            objects_by_type.insert(ty, members);
        }

        let mut fluent = HashSet::new();
        for a in &model.domain.actions {
            for atom in a.effect.add.iter().chain(&a.effect.del) {
                fluent.insert(atom.predicate.clone());
            }
        }
        let static_preds =
            model.domain.predicates.iter().map(|p| p.name.clone()).filter(|p| !fluent.contains(p)).collect();
        let init = model.problem.init.iter().map(|(p, args)| GroundFact::new(p.clone(), args.clone())).collect();
        Grounder { objects_by_type, static_preds, init }
    }

    fn objects_of(&self, ty: &str) -> &[String] {
        self.objects_by_type.get(ty).map(Vec::as_slice).unwrap_or(&[])
    }

    fn resolve(term: &Term, binding: &Binding) -> String {
        match term {
            Term::Const(c) => c.clone(),
            Term::Var(v) => binding[v].clone(),
        }
    }

    fn ground_atom(atom: &LiftedAtom, binding: &Binding) -> GroundFact {
        GroundFact::new(atom.predicate.clone(), atom.args.iter().map(|t| Self::resolve(t, binding)).collect())
    }

    fn fold(&self, c: &LiftedCondition, binding: &mut Binding) -> Folded {
        match c {
            LiftedCondition::Atom(atom) => {
                let f = Self::ground_atom(atom, binding);
                if self.static_preds.contains(&atom.predicate) {
                    if self.init.contains(&f) {
                        Folded::True
                    } else {
                        Folded::False
                    }
                } else {
                    Folded::Open(Condition::Atom(f))
                }
            }
            LiftedCondition::Equal(a, b) => {
                if Self::resolve(a, binding) == Self::resolve(b, binding) {
                    Folded::True
                } else {
                    Folded::False
                }
            }
            LiftedCondition::Numeric => Folded::True,
            LiftedCondition::Not(inner) => match self.fold(inner, binding) {
                Folded::True => Folded::False,
                Folded::False => Folded::True,
                Folded::Open(Condition::Not(c)) => Folded::Open(*c),
                Folded::Open(c) => Folded::Open(Condition::Not(Box::new(c))),
            },
            LiftedCondition::And(parts) => {
                let folded = parts.iter().map(|p| self.fold(p, binding)).collect();
                Self::combine(folded, true)
            }
            LiftedCondition::Or(parts) => {
                let folded = parts.iter().map(|p| self.fold(p, binding)).collect();
                Self::combine(folded, false)
            }
            LiftedCondition::Exists(params, body) | LiftedCondition::Forall(params, body) => {
                let conjunctive = matches!(c, LiftedCondition::Forall(..));
                let mut folded = Vec::new();
                self.expand(params, body, binding, &mut folded);
                Self::combine(folded, conjunctive)
            }
        }
    }

    fn expand(&self, params: &[TypedName], body: &LiftedCondition, binding: &mut Binding, out: &mut Vec<Folded>) {
        let Some((first, rest)) = params.split_first() else {
            out.push(self.fold(body, binding));
            return;
        };
        let shadowed = binding.get(&first.name).cloned();
        for obj in self.objects_of(&first.ty) {
            binding.insert(first.name.clone(), obj.clone());
            self.expand(rest, body, binding, out);
        }
        match shadowed {
            Some(v) => binding.insert(first.name.clone(), v),
            None => binding.remove(&first.name),
        };
    }

    fn combine(parts: Vec<Folded>, conjunctive: bool) -> Folded {
        let mut open = Vec::new();
        for p in parts {
            match (p, conjunctive) {
                (Folded::False, true) => return Folded::False,
                (Folded::True, false) => return Folded::True,
                (Folded::True, true) | (Folded::False, false) => {}
                (Folded::Open(Condition::And(cs)), true) => open.extend(cs),
                (Folded::Open(Condition::Or(cs)), false) => open.extend(cs),
                (Folded::Open(c), _) => open.push(c),
            }
        }
        match (open.len(), conjunctive) {
            (0, true) => Folded::True,
            (0, false) => Folded::False,
            (1, _) => Folded::Open(open.pop().unwrap()),
            (_, true) => Folded::Open(Condition::And(open)),
            (_, false) => Folded::Open(Condition::Or(open)),
        }
    }

    /// Static literals in conjunctive position, checked as soon as their
    /// variables are bound to prune the binding search early.
    fn static_filters<'c>(&self, c: &'c LiftedCondition, out: &mut Vec<(&'c LiftedCondition, bool)>) {
        match c {
            LiftedCondition::And(parts) => parts.iter().for_each(|p| self.static_filters(p, out)),
            LiftedCondition::Atom(a) if self.static_preds.contains(&a.predicate) => out.push((c, true)),
            LiftedCondition::Equal(..) => out.push((c, true)),
            LiftedCondition::Not(inner) => match inner.as_ref() {
                LiftedCondition::Atom(a) if self.static_preds.contains(&a.predicate) => out.push((inner, false)),
                LiftedCondition::Equal(..) => out.push((inner, false)),
                _ => {}
            },
            _ => {}
        }
    }

    fn ground_schema(&self, schema: &ActionSchema, cap: usize, out: &mut ProblemBuilder) -> Result<()> {
        let mut filters = Vec::new();
        self.static_filters(&schema.precondition, &mut filters);
        // Attach each filter to the parameter position after which all of
        // its variables are bound.
        let position: HashMap<&str, usize> =
            schema.params.iter().enumerate().map(|(i, p)| (p.name.as_str(), i)).collect();
        let mut checks: Vec<Vec<(&LiftedCondition, bool)>> = vec![Vec::new(); schema.params.len().max(1)];
        for (c, expected) in filters {
            let terms: Vec<&Term> = match c {
                LiftedCondition::Atom(a) => a.args.iter().collect(),
                LiftedCondition::Equal(a, b) => vec![a, b],
                _ => unreachable!(),
            };
            let last = terms
                .iter()
                .filter_map(|t| match t {
                    Term::Var(v) => position.get(v.as_str()).copied(),
                    Term::Const(_) => Some(0),
                })
                .max()
                .unwrap_or(0);
            checks[last].push((c, expected));
        }
        let mut binding = Binding::new();
        self.bind(schema, 0, &checks, &mut binding, cap, out)
    }

    fn bind(
        &self,
        schema: &ActionSchema,
        depth: usize,
        checks: &[Vec<(&LiftedCondition, bool)>],
        binding: &mut Binding,
        cap: usize,
        out: &mut ProblemBuilder,
    ) -> Result<()> {
        if depth == schema.params.len() {
            if schema.params.is_empty() && !self.passes(&checks[0], binding) {
                return Ok(());
            }
            return self.emit(schema, binding, cap, out);
        }
        let param = &schema.params[depth];
        for obj in self.objects_of(&param.ty) {
            binding.insert(param.name.clone(), obj.clone());
            if self.passes(&checks[depth], binding) {
                self.bind(schema, depth + 1, checks, binding, cap, out)?;
            }
        }
        binding.remove(&param.name);
        Ok(())
    }

    fn passes(&self, checks: &[(&LiftedCondition, bool)], binding: &mut Binding) -> bool {
        checks.iter().all(|(c, expected)| match self.fold(c, binding) {
            Folded::True => *expected,
            Folded::False => !*expected,
            Folded::Open(_) => true,
        })
    }

    fn emit(&self, schema: &ActionSchema, binding: &mut Binding, cap: usize, out: &mut ProblemBuilder) -> Result<()> {
        let precondition = match self.fold(&schema.precondition, binding) {
            Folded::False => return Ok(()),
            Folded::True => Condition::always(),
            Folded::Open(c) => c,
        };
        if out.num_actions() >= cap {
            return Err(Error::GroundingBlowUp { cap });
        }
        let args: Vec<String> = schema.params.iter().map(|p| binding[&p.name].clone()).collect();
        let name = GroundFact::new(schema.name.clone(), args).as_str().to_string();
        out.action(GroundActionSpec {
            name,
            precondition,
            add: schema.effect.add.iter().map(|a| Self::ground_atom(a, binding)).collect(),
            del: schema.effect.del.iter().map(|a| Self::ground_atom(a, binding)).collect(),
            cost: schema.effect.cost.unwrap_or_else(|| Rational64::from_integer(1)),
        });
        Ok(())
    }
}

/// Grounds a parsed model with the default action cap.
pub fn ground(model: &LiftedModel) -> Result<PlanningProblem> {
    ground_with(model, &GroundOptions::default())
}

pub fn ground_with(model: &LiftedModel, opts: &GroundOptions) -> Result<PlanningProblem> {
    let grounder = Grounder::new(model);
    let mut b = ProblemBuilder::new();
    for o in model.object_table() {
        b.object(&o.name, &o.ty);
    }
    for f in &grounder.init {
        b.init(f.clone());
    }
    let to_facts = |atoms: &[(String, Vec<String>)]| -> Vec<GroundFact> {
        atoms.iter().map(|(p, a)| GroundFact::new(p.clone(), a.clone())).collect()
    };
    let goal = to_facts(&model.problem.goal);
    for f in &goal {
        b.goal(f.clone());
    }
    if model.problem.hypotheses.is_empty() {
        if !goal.is_empty() {
            b.hypothesis(DEFAULT_GOAL_NAME, goal);
        }
    } else {
        for h in &model.problem.hypotheses {
            b.hypothesis(&h.name, to_facts(&h.atoms));
        }
    }
    for schema in &model.domain.actions {
        grounder.ground_schema(schema, opts.max_actions, &mut b)?;
    }
    b.build()
}

/// Parses and grounds in one step.
pub fn load_problem(domain_text: &str, problem_text: &str) -> Result<PlanningProblem> {
    ground(&crate::pddl::parse_domain_and_problem(domain_text, problem_text)?)
}
