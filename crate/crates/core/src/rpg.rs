//! Relaxed planning graph: layered reachability ignoring delete effects.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::problem::{ActionId, FactId, PlanningProblem};

/// Precomputed precondition structure of a problem, shared by every RPG
/// built over it.
#[derive(Debug, Clone)]
pub struct RelaxedIndex {
    /// Positive requirements for conjunctive actions; `None` for actions
    /// whose precondition needs full tree evaluation.
    requirements: Vec<Option<Vec<FactId>>>,
    consumers: Vec<Vec<ActionId>>,
    complex: Vec<ActionId>,
}

impl RelaxedIndex {
    pub fn new(problem: &PlanningProblem) -> Self {
        let mut requirements = Vec::with_capacity(problem.actions().len());
        let mut consumers = vec![Vec::new(); problem.num_facts()];
        let mut complex = Vec::new();
        for (i, a) in problem.actions().iter().enumerate() {
            let id = ActionId(i as u32);
            match a.precondition.literals() {
                Some(lits) => {
                    let req: BTreeSet<FactId> = lits.into_iter().filter(|(pos, _)| *pos).map(|(_, f)| *f).collect();
                    for f in &req {
                        consumers[f.index()].push(id);
                    }
                    requirements.push(Some(req.into_iter().collect()));
                }
                None => {
                    complex.push(id);
                    requirements.push(None);
                }
            }
        }
        RelaxedIndex { requirements, consumers, complex }
    }
}

/// Layered delete-relaxed reachability. Fact layer `l` holds every fact with
/// `fact_level <= l`; action layer `l` every action with `action_level <= l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rpg {
    fact_level: Vec<Option<u32>>,
    action_level: Vec<Option<u32>>,
    last_level: u32,
}

impl Rpg {
    /// Builds the graph with the actions in `excluded` removed.
    pub fn build(problem: &PlanningProblem, excluded: &BTreeSet<ActionId>) -> Self {
        let mut mask = vec![false; problem.actions().len()];
        for a in excluded {
            mask[a.index()] = true;
        }
        Self::build_indexed(problem, &RelaxedIndex::new(problem), &mask)
    }

    /// Builds the graph from a shared index; `excluded[a]` removes action `a`.
    pub fn build_indexed(problem: &PlanningProblem, index: &RelaxedIndex, excluded: &[bool]) -> Self {
        let n_actions = problem.actions().len();
        let mut fact_level = vec![None; problem.num_facts()];
        let mut action_level = vec![None; n_actions];
        let mut missing: Vec<usize> =
            index.requirements.iter().map(|r| r.as_ref().map_or(usize::MAX, Vec::len)).collect();

        let mut frontier: Vec<FactId> = problem.init().facts().iter().copied().collect();
        for f in &frontier {
            fact_level[f.index()] = Some(0);
        }
        let mut pending_complex: Vec<ActionId> =
            index.complex.iter().copied().filter(|a| !excluded[a.index()]).collect();
        let mut level = 0u32;
        loop {
            let mut newly: Vec<ActionId> = Vec::new();
            if level == 0 {
                newly.extend((0..n_actions).filter(|&i| missing[i] == 0 && !excluded[i]).map(|i| ActionId(i as u32)));
            }
            for f in &frontier {
                for &a in &index.consumers[f.index()] {
                    let m = &mut missing[a.index()];
                    *m -= 1;
                    if *m == 0 && !excluded[a.index()] {
                        newly.push(a);
                    }
                }
            }
            if level == 0 || !frontier.is_empty() {
                pending_complex.retain(|&a| {
                    let ok =
                        problem.action(a).precondition.holds_relaxed(&|f: &FactId| fact_level[f.index()].is_some());
                    if ok {
                        newly.push(a);
                    }
                    !ok
                });
            }
            let mut next = Vec::new();
            for a in newly {
                action_level[a.index()] = Some(level);
                for f in &problem.action(a).add {
                    if fact_level[f.index()].is_none() {
                        fact_level[f.index()] = Some(level + 1);
                        next.push(*f);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            level += 1;
            frontier = next;
        }
        Rpg { fact_level, action_level, last_level: level }
    }

    /// First fact layer containing `f`; `None` if unreachable.
    pub fn fact_level(&self, f: FactId) -> Option<u32> {
        self.fact_level[f.index()]
    }

    /// First action layer containing `a`; `None` if never applicable.
    pub fn action_level(&self, a: ActionId) -> Option<u32> {
        self.action_level[a.index()]
    }

    pub fn is_reachable(&self, f: FactId) -> bool {
        self.fact_level[f.index()].is_some()
    }

    /// Number of fact layers; the last two are equal (fixpoint).
    pub fn num_layers(&self) -> usize {
        self.last_level as usize + 2
    }

    pub fn fact_layer(&self, level: usize) -> BTreeSet<FactId> {
        self.fact_level
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_some_and(|l| (l as usize) <= level))
            .map(|(i, _)| FactId(i as u32))
            .collect()
    }

    pub fn action_layer(&self, level: usize) -> BTreeSet<ActionId> {
        self.action_level
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_some_and(|l| (l as usize) <= level))
            .map(|(i, _)| ActionId(i as u32))
            .collect()
    }

    /// All fact layers, including the repeated fixpoint layer.
    pub fn fact_layers(&self) -> Vec<BTreeSet<FactId>> {
        (0..self.num_layers()).map(|l| self.fact_layer(l)).collect()
    }

    /// True iff every goal fact is in the final fact layer.
    pub fn relaxed_solvable(&self, goal: &BTreeSet<FactId>) -> bool {
        goal.iter().all(|f| self.is_reachable(*f))
    }

    /// One line per level with the facts first reached there.
    pub fn dump(&self, problem: &PlanningProblem) -> String {
        let mut out = String::new();
        for level in 0..=self.last_level {
            write!(out, "level {level}:").unwrap();
            for (i, l) in self.fact_level.iter().enumerate() {
                if *l == Some(level) {
                    write!(out, " {}", problem.fact(FactId(i as u32))).unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Builds an RPG with `excluded` actions removed.
pub fn build_rpg(problem: &PlanningProblem, excluded: &BTreeSet<ActionId>) -> Rpg {
    Rpg::build(problem, excluded)
}

pub fn relaxed_solvable(rpg: &Rpg, goal: &BTreeSet<FactId>) -> bool {
    rpg.relaxed_solvable(goal)
}
