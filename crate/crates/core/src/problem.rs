//! Grounded planning problems and their state-transition semantics.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::hash::{Hash, Hasher};

use num_rational::Rational64;
use num_traits::Zero;

use crate::condition::{write_condition, Condition};
use crate::error::{Error, Result};
use crate::pddl::sexpr::{parse_all, Sexpr};

/// A ground atom such as `(is-at c1)`.
///
/// Identity and ordering are those of the canonical text.
#[derive(Clone)]
pub struct GroundFact {
    predicate: String,
    args: Vec<String>,
    text: String,
}

impl GroundFact {
    pub fn new(predicate: impl Into<String>, args: Vec<String>) -> Self {
        let predicate = predicate.into();
        let text = canonical_text(&predicate, &args);
        GroundFact { predicate, args, text }
    }

    /// Parses the canonical form, e.g. `(is-at c1)`.
    pub fn parse(text: &str) -> Result<Self> {
        let e = crate::pddl::sexpr::parse_one(text)?;
        fact_from_sexpr(&e)
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn args(&self) -> &[String] {
        &self.args
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

fn canonical_text(head: &str, args: &[String]) -> String {
    let mut s = String::with_capacity(head.len() + 2 + args.iter().map(|a| a.len() + 1).sum::<usize>());
    s.push('(');
    s.push_str(head);
    for a in args {
        s.push(' ');
        s.push_str(a);
    }
    s.push(')');
    s
}

fn fact_from_sexpr(e: &Sexpr) -> Result<GroundFact> {
    let items = e.as_list().ok_or_else(|| Error::Syntax(e.error("expected a ground atom")))?;
    let mut names = Vec::with_capacity(items.len());
    for item in items {
        names.push(item.as_atom().ok_or_else(|| Error::Syntax(item.error("expected a symbol")))?.to_string());
    }
    if names.is_empty() {
        return Err(Error::Syntax(e.error("empty atom")));
    }
    let pred = names.remove(0);
    Ok(GroundFact::new(pred, names))
}

impl PartialEq for GroundFact {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}
impl Eq for GroundFact {}
impl Hash for GroundFact {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.text.hash(state)
    }
}
impl PartialOrd for GroundFact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for GroundFact {
    fn cmp(&self, other: &Self) -> Ordering {
        self.text.cmp(&other.text)
    }
}
impl fmt::Display for GroundFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}
impl fmt::Debug for GroundFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Index of a fact in the problem's canonically sorted fact universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactId(pub u32);

impl FactId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of an action in the problem's canonically sorted action list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    /// Canonical `(schema arg1 ... argk)` text.
    pub name: String,
    pub precondition: Condition,
    /// Positive facts of the flattened precondition.
    pub pre: BTreeSet<FactId>,
    pub add: BTreeSet<FactId>,
    pub del: BTreeSet<FactId>,
    pub cost: Rational64,
}

impl GroundAction {
    pub fn is_applicable(&self, state: &State) -> bool {
        self.precondition.holds(&|f| state.contains(*f))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(BTreeSet<FactId>);

impl State {
    pub fn new(facts: impl IntoIterator<Item = FactId>) -> Self {
        State(facts.into_iter().collect())
    }

    pub fn contains(&self, f: FactId) -> bool {
        self.0.contains(&f)
    }

    pub fn facts(&self) -> &BTreeSet<FactId> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_superset(&self, facts: &BTreeSet<FactId>) -> bool {
        facts.is_subset(&self.0)
    }
}

/// A named goal hypothesis over the problem's facts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalHypothesis {
    pub name: String,
    pub facts: BTreeSet<FactId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<ActionId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanFailure {
    /// The step at this index was not applicable.
    Inapplicable(usize),
    /// All steps applied but the final state misses a goal fact.
    GoalUnmet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanValidation {
    pub valid: bool,
    pub end_state: State,
    /// Cost of the steps that were applied.
    pub cost: Rational64,
    pub failure: Option<PlanFailure>,
}

/// A grounded STRIPS-style planning problem plus the goal hypotheses used
/// for recognition. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanningProblem {
    objects: Vec<(String, String)>,
    facts: Vec<GroundFact>,
    fact_index: HashMap<GroundFact, FactId>,
    init: State,
    actions: Vec<GroundAction>,
    action_index: HashMap<String, ActionId>,
    goal: BTreeSet<FactId>,
    hypotheses: Vec<GoalHypothesis>,
    achievers: Vec<Vec<ActionId>>,
}

impl PlanningProblem {
    pub fn objects(&self) -> &[(String, String)] {
        &self.objects
    }

    pub fn facts(&self) -> &[GroundFact] {
        &self.facts
    }

    pub fn fact(&self, id: FactId) -> &GroundFact {
        &self.facts[id.index()]
    }

    pub fn fact_id(&self, fact: &GroundFact) -> Option<FactId> {
        self.fact_index.get(fact).copied()
    }

    /// Looks up a fact by its canonical text.
    pub fn find_fact(&self, text: &str) -> Result<FactId> {
        let fact = GroundFact::parse(text)?;
        self.fact_id(&fact).ok_or_else(|| Error::UnknownFact(fact.to_string()))
    }

    pub fn num_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn init(&self) -> &State {
        &self.init
    }

    pub fn actions(&self) -> &[GroundAction] {
        &self.actions
    }

    pub fn action(&self, id: ActionId) -> &GroundAction {
        &self.actions[id.index()]
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len() as u32).map(ActionId)
    }

    /// Resolves an action by name; whitespace and case are normalized.
    pub fn find_action(&self, text: &str) -> Result<ActionId> {
        let canonical = match crate::pddl::sexpr::parse_one(text) {
            Ok(e) => fact_from_sexpr(&e).map(|f| f.text).unwrap_or_else(|_| text.trim().to_string()),
            Err(_) => text.trim().to_string(),
        };
        self.action_index.get(&canonical).copied().ok_or(Error::UnknownAction(canonical))
    }

    pub fn goal(&self) -> &BTreeSet<FactId> {
        &self.goal
    }

    pub fn hypotheses(&self) -> &[GoalHypothesis] {
        &self.hypotheses
    }

    /// Actions with `f` among their add effects.
    pub fn achievers(&self, f: FactId) -> &[ActionId] {
        &self.achievers[f.index()]
    }

    pub fn fact_names(&self, facts: impl IntoIterator<Item = FactId>) -> Vec<String> {
        facts.into_iter().map(|f| self.fact(f).to_string()).collect()
    }

    /// `s ∪ Add(a) \ Del(a)`; fails with the unmet preconditions if the
    /// action is not applicable.
    pub fn apply(&self, state: &State, action: ActionId) -> Result<State> {
        let a = self.action(action);
        if !a.is_applicable(state) {
            return Err(Error::Inapplicable { action: a.name.clone(), missing: self.unmet(state, a) });
        }
        let mut next = state.0.clone();
        next.extend(a.add.iter().copied());
        for d in &a.del {
            next.remove(d);
        }
        Ok(State(next))
    }

    fn unmet(&self, state: &State, a: &GroundAction) -> Vec<String> {
        match a.precondition.literals() {
            Some(lits) => lits
                .into_iter()
                .filter(|(positive, f)| state.contains(**f) != *positive)
                .map(
                    |(positive, f)| {
                        if positive {
                            self.fact(*f).to_string()
                        } else {
                            format!("(not {})", self.fact(*f))
                        }
                    },
                )
                .collect(),
            None => vec![self.condition_text(&a.precondition)],
        }
    }

    pub fn validate_plan(&self, plan: &Plan) -> PlanValidation {
        self.validate_plan_for(plan, &self.goal)
    }

    pub fn validate_plan_for(&self, plan: &Plan, goal: &BTreeSet<FactId>) -> PlanValidation {
        let mut state = self.init.clone();
        let mut cost = Rational64::zero();
        for (i, &step) in plan.steps.iter().enumerate() {
            match self.apply(&state, step) {
                Ok(next) => {
                    cost += self.action(step).cost;
                    state = next;
                }
                Err(_) => {
                    return PlanValidation {
                        valid: false,
                        end_state: state,
                        cost,
                        failure: Some(PlanFailure::Inapplicable(i)),
                    }
                }
            }
        }
        let valid = state.is_superset(goal);
        PlanValidation { valid, end_state: state, cost, failure: (!valid).then_some(PlanFailure::GoalUnmet) }
    }

    pub fn condition_text(&self, c: &Condition) -> String {
        let mut s = String::new();
        write_condition(c, &mut s, &|f: &FactId| self.fact(*f).to_string()).unwrap();
        s
    }

    /// Canonical grounded dump: one object, fact, init/goal entry,
    /// hypothesis or action per line. [`PlanningProblem::from_dump`] reads
    /// it back.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (name, ty) in &self.objects {
            writeln!(out, "object {name} {ty}").unwrap();
        }
        for f in &self.facts {
            writeln!(out, "fact {f}").unwrap();
        }
        for f in self.init.facts() {
            writeln!(out, "init {}", self.fact(*f)).unwrap();
        }
        for f in &self.goal {
            writeln!(out, "goal {}", self.fact(*f)).unwrap();
        }
        for h in &self.hypotheses {
            write!(out, "hypothesis {}", h.name).unwrap();
            for f in &h.facts {
                write!(out, " {}", self.fact(*f)).unwrap();
            }
            out.push('\n');
        }
        let fact_list = |set: &BTreeSet<FactId>| {
            let names: Vec<String> = set.iter().map(|f| self.fact(*f).to_string()).collect();
            format!("({})", names.join(" "))
        };
        for a in &self.actions {
            writeln!(
                out,
                "action {} {} {} {} {}",
                a.name,
                a.cost,
                self.condition_text(&a.precondition),
                fact_list(&a.add),
                fact_list(&a.del)
            )
            .unwrap();
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Self> {
        let mut b = ProblemBuilder::new();
        let syntax = |line: usize, msg: &str| Error::Syntax(crate::error::ParseError::new(line, 1, msg));
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (kw, rest) = line.split_once(' ').unwrap_or((line, ""));
            let exprs = parse_all(rest).map_err(|mut e| {
                e.line = lineno;
                Error::Syntax(e)
            })?;
            match kw {
                "object" => match exprs.as_slice() {
                    [Sexpr::Atom(n, _), Sexpr::Atom(t, _)] => {
                        b.object(n, t);
                    }
                    _ => return Err(syntax(lineno, "expected `object <name> <type>`")),
                },
                "fact" => {
                    let [e] = exprs.as_slice() else { return Err(syntax(lineno, "expected one fact")) };
                    b.fact(fact_from_sexpr(e)?);
                }
                "init" | "goal" => {
                    let [e] = exprs.as_slice() else { return Err(syntax(lineno, "expected one fact")) };
                    let f = fact_from_sexpr(e)?;
                    if kw == "init" {
                        b.init(f);
                    } else {
                        b.goal(f);
                    }
                }
                "hypothesis" => {
                    let Some((Sexpr::Atom(name, _), facts)) = exprs.split_first() else {
                        return Err(syntax(lineno, "expected `hypothesis <name> <facts>`"));
                    };
                    let facts = facts.iter().map(fact_from_sexpr).collect::<Result<Vec<_>>>()?;
                    b.hypothesis(name, facts);
                }
                "action" => {
                    let [name, Sexpr::Atom(cost, _), pre, add, del] = exprs.as_slice() else {
                        return Err(syntax(lineno, "expected `action <name> <cost> <pre> <add> <del>`"));
                    };
                    let name = fact_from_sexpr(name)?.text;
                    let cost = parse_rational(cost).ok_or_else(|| syntax(lineno, "bad action cost"))?;
                    let list = |e: &Sexpr| -> Result<Vec<GroundFact>> {
                        e.as_list()
                            .ok_or_else(|| syntax(lineno, "expected a fact list"))?
                            .iter()
                            .map(fact_from_sexpr)
                            .collect()
                    };
                    b.action(GroundActionSpec {
                        name,
                        precondition: condition_from_sexpr(pre)?,
                        add: list(add)?,
                        del: list(del)?,
                        cost,
                    });
                }
                _ => return Err(syntax(lineno, &format!("unknown dump entry `{kw}`"))),
            }
        }
        b.build()
    }
}

fn parse_rational(s: &str) -> Option<Rational64> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.parse().ok()?;
            let n: i64 = n.parse().ok()?;
            (d != 0).then(|| Rational64::new(n, d))
        }
        None => crate::pddl::parse_number(s),
    }
}

fn condition_from_sexpr(e: &Sexpr) -> Result<Condition<GroundFact>> {
    match e.head() {
        Some("and") | Some("or") => {
            let parts = e.as_list().unwrap()[1..].iter().map(condition_from_sexpr).collect::<Result<Vec<_>>>()?;
            Ok(if e.head() == Some("and") { Condition::And(parts) } else { Condition::Or(parts) })
        }
        Some("not") => match e.as_list().unwrap() {
            [_, inner] => Ok(Condition::Not(Box::new(condition_from_sexpr(inner)?))),
            _ => Err(Error::Syntax(e.error("`not` takes one argument"))),
        },
        _ => Ok(Condition::Atom(fact_from_sexpr(e)?)),
    }
}

/// Action description in terms of facts, before interning.
#[derive(Debug, Clone)]
pub struct GroundActionSpec {
    pub name: String,
    pub precondition: Condition<GroundFact>,
    pub add: Vec<GroundFact>,
    pub del: Vec<GroundFact>,
    pub cost: Rational64,
}

impl GroundActionSpec {
    /// STRIPS action with a conjunctive precondition and unit cost.
    pub fn strips(
        name: impl Into<String>,
        pre: impl IntoIterator<Item = GroundFact>,
        add: impl IntoIterator<Item = GroundFact>,
        del: impl IntoIterator<Item = GroundFact>,
    ) -> Self {
        GroundActionSpec {
            name: name.into(),
            precondition: Condition::conjunction(pre),
            add: add.into_iter().collect(),
            del: del.into_iter().collect(),
            cost: Rational64::from_integer(1),
        }
    }
}

/// Assembles a [`PlanningProblem`], sorting facts and actions canonically and
/// interning facts into dense ids.
#[derive(Debug, Default)]
pub struct ProblemBuilder {
    objects: BTreeMap<String, String>,
    facts: BTreeSet<GroundFact>,
    init: BTreeSet<GroundFact>,
    goal: BTreeSet<GroundFact>,
    hypotheses: Vec<(String, BTreeSet<GroundFact>)>,
    actions: Vec<GroundActionSpec>,
}

impl ProblemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(&mut self, name: &str, ty: &str) -> &mut Self {
        self.objects.insert(name.to_string(), ty.to_string());
        self
    }

    pub fn fact(&mut self, f: GroundFact) -> &mut Self {
        self.facts.insert(f);
        self
    }

    pub fn init(&mut self, f: GroundFact) -> &mut Self {
        self.init.insert(f);
        self
    }

    pub fn goal(&mut self, f: GroundFact) -> &mut Self {
        self.goal.insert(f);
        self
    }

    pub fn hypothesis(&mut self, name: &str, facts: impl IntoIterator<Item = GroundFact>) -> &mut Self {
        self.hypotheses.push((name.to_string(), facts.into_iter().collect()));
        self
    }

    pub fn action(&mut self, a: GroundActionSpec) -> &mut Self {
        self.actions.push(a);
        self
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn build(&self) -> Result<PlanningProblem> {
        // F = init ∪ goals ∪ everything mentioned by an action.
        let mut universe = self.facts.clone();
        universe.extend(self.init.iter().cloned());
        universe.extend(self.goal.iter().cloned());
        for (_, h) in &self.hypotheses {
            universe.extend(h.iter().cloned());
        }
        for a in &self.actions {
            let mut atoms = Vec::new();
            a.precondition.atoms(&mut atoms);
            universe.extend(atoms.into_iter().cloned());
            universe.extend(a.add.iter().cloned());
            universe.extend(a.del.iter().cloned());
        }
        let facts: Vec<GroundFact> = universe.into_iter().collect();
        let fact_index: HashMap<GroundFact, FactId> =
            facts.iter().enumerate().map(|(i, f)| (f.clone(), FactId(i as u32))).collect();
        let id = |f: &GroundFact| fact_index[f];

        let mut specs: Vec<&GroundActionSpec> = self.actions.iter().collect();
        specs.sort_by(|a, b| a.name.cmp(&b.name));
        if let Some(w) = specs.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(Error::InvalidArgument(format!("duplicate action {}", w[0].name)));
        }
        let mut actions = Vec::with_capacity(specs.len());
        let mut achievers = vec![Vec::new(); facts.len()];
        for (i, spec) in specs.iter().enumerate() {
            if spec.cost < Rational64::zero() {
                return Err(Error::InvalidArgument(format!("negative cost on {}", spec.name)));
            }
            let precondition = spec.precondition.map(&mut |f| id(f));
            let add: BTreeSet<FactId> = spec.add.iter().map(id).collect();
            // Add wins over delete.
            let del: BTreeSet<FactId> = spec.del.iter().map(id).filter(|f| !add.contains(f)).collect();
            for f in &add {
                achievers[f.index()].push(ActionId(i as u32));
            }
            actions.push(GroundAction {
                name: spec.name.clone(),
                pre: precondition.flatten(),
                precondition,
                add,
                del,
                cost: spec.cost,
            });
        }
        let action_index = actions.iter().enumerate().map(|(i, a)| (a.name.clone(), ActionId(i as u32))).collect();
        let hypotheses = self
            .hypotheses
            .iter()
            .map(|(name, fs)| GoalHypothesis { name: name.clone(), facts: fs.iter().map(id).collect() })
            .collect();
        Ok(PlanningProblem {
            objects: self.objects.iter().map(|(n, t)| (n.clone(), t.clone())).collect(),
            init: State(self.init.iter().map(id).collect()),
            goal: self.goal.iter().map(id).collect(),
            facts,
            fact_index,
            actions,
            action_index,
            hypotheses,
            achievers,
        })
    }
}

/// Shorthand for building facts in code: `fact("is-at", &["c0"])`.
pub fn fact(predicate: &str, args: &[&str]) -> GroundFact {
    GroundFact::new(predicate, args.iter().map(|a| a.to_string()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(c: &str) -> GroundFact {
        fact("is-at", &[c])
    }

    fn corridor(n: usize) -> PlanningProblem {
        let mut b = ProblemBuilder::new();
        for i in 0..n {
            b.object(&format!("c{i}"), "cell");
        }
        b.init(at("c0")).goal(at(&format!("c{}", n - 1)));
        for i in 0..n - 1 {
            for (x, y) in [(i, i + 1), (i + 1, i)] {
                let (cx, cy) = (format!("c{x}"), format!("c{y}"));
                b.action(GroundActionSpec::strips(format!("(move {cx} {cy})"), [at(&cx)], [at(&cy)], [at(&cx)]));
            }
        }
        b.build().unwrap()
    }

    #[test]
    fn canonical_fact_order_is_textual() {
        // Textual order puts "(p a b)" before "(p a)" since ' ' < ')'.
        let mut v = [fact("p", &["a"]), fact("p", &["a", "b"]), fact("p", &[])];
        v.sort();
        let texts: Vec<&str> = v.iter().map(|f| f.as_str()).collect();
        assert_eq!(texts, ["(p a b)", "(p a)", "(p)"]);
    }

    #[test]
    fn apply_move() {
        let p = corridor(4);
        let s = p.init().clone();
        let a = p.find_action("(move c0 c1)").unwrap();
        let next = p.apply(&s, a).unwrap();
        assert_eq!(p.fact_names(next.facts().iter().copied()), ["(is-at c1)"]);
    }

    #[test]
    fn apply_noop_action_keeps_state() {
        let mut b = ProblemBuilder::new();
        b.init(fact("p", &[]));
        b.action(GroundActionSpec::strips("(noop)", [], [], []));
        let p = b.build().unwrap();
        let a = p.find_action("(noop)").unwrap();
        assert_eq!(&p.apply(p.init(), a).unwrap(), p.init());
    }

    #[test]
    fn apply_reports_missing_preconditions() {
        let p = corridor(4);
        let a = p.find_action("(move c0 c1)").unwrap();
        match p.apply(&State::default(), a) {
            Err(Error::Inapplicable { missing, .. }) => assert_eq!(missing, ["(is-at c0)"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn add_wins_over_delete() {
        let mut b = ProblemBuilder::new();
        b.action(GroundActionSpec::strips("(flip)", [], [fact("p", &[])], [fact("p", &[])]));
        let p = b.build().unwrap();
        let a = p.action(ActionId(0));
        assert!(a.del.is_empty());
        assert_eq!(a.add.len(), 1);
    }

    #[test]
    fn validate_corridor_plan() {
        let p = corridor(4);
        let steps =
            ["(move c0 c1)", "(move c1 c2)", "(move c2 c3)"].iter().map(|s| p.find_action(s).unwrap()).collect();
        let v = p.validate_plan(&Plan { steps });
        assert!(v.valid);
        assert_eq!(v.cost, Rational64::from_integer(3));
        assert_eq!(p.fact_names(v.end_state.facts().iter().copied()), ["(is-at c3)"]);
    }

    #[test]
    fn validate_empty_plan_when_goal_in_init() {
        let mut b = ProblemBuilder::new();
        b.init(at("c0")).goal(at("c0"));
        let p = b.build().unwrap();
        let v = p.validate_plan(&Plan::default());
        assert!(v.valid);
        assert_eq!(v.cost, Rational64::zero());
    }

    #[test]
    fn validate_reports_first_failing_index() {
        let p = corridor(4);
        let m = p.find_action("(move c0 c1)").unwrap();
        let v = p.validate_plan(&Plan { steps: vec![m, m] });
        assert!(!v.valid);
        assert_eq!(v.failure, Some(PlanFailure::Inapplicable(1)));
        let v = p.validate_plan(&Plan { steps: vec![m] });
        assert_eq!(v.failure, Some(PlanFailure::GoalUnmet));
    }

    #[test]
    fn find_action_normalizes_spacing_and_case() {
        let p = corridor(3);
        assert!(p.find_action("( MOVE  c0 c1 )").is_ok());
        assert!(matches!(p.find_action("(move c0 c2)"), Err(Error::UnknownAction(_))));
    }

    #[test]
    fn dump_round_trip() {
        let p = corridor(5);
        let q = PlanningProblem::from_dump(&p.dump()).unwrap();
        assert_eq!(p, q);
    }
}
