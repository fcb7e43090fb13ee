//! Fact-landmark extraction.
//!
//! Candidates are generated by back-chaining from the goal facts through the
//! relaxed planning graph: for a fact first reached at level `l`, the
//! flattened preconditions shared by all of its achievers in action layer
//! `l - 1` become candidates. Each candidate that is neither initial nor a
//! goal fact is then verified by removing its achievers and checking that
//! the goal is no longer reachable in the delete relaxation.
//!
//! Ordering relations between landmarks are not produced.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::problem::{FactId, PlanningProblem};
use crate::rpg::{RelaxedIndex, Rpg};

/// Verified landmarks of one goal, partitioned by membership in the initial
/// state and the goal. A fact in both belongs to both trivial subsets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LandmarkSet {
    pub goal: BTreeSet<FactId>,
    pub all: BTreeSet<FactId>,
    pub trivial_init: BTreeSet<FactId>,
    pub trivial_goal: BTreeSet<FactId>,
    pub non_trivial: BTreeSet<FactId>,
}

impl LandmarkSet {
    pub fn classify(problem: &PlanningProblem, goal: &BTreeSet<FactId>, all: BTreeSet<FactId>) -> Self {
        let trivial_init = all.iter().copied().filter(|f| problem.init().contains(*f)).collect();
        let trivial_goal = all.iter().copied().filter(|f| goal.contains(f)).collect();
        let non_trivial = all.iter().copied().filter(|f| !problem.init().contains(*f) && !goal.contains(f)).collect();
        LandmarkSet { goal: goal.clone(), all, trivial_init, trivial_goal, non_trivial }
    }

    /// Landmarks not already true initially.
    pub fn without_init(&self) -> BTreeSet<FactId> {
        self.all.difference(&self.trivial_init).copied().collect()
    }
}

/// Positive facts occurring anywhere in a precondition, treating the whole
/// tree as one conjunction.
pub fn flatten_precondition(pre: &Condition) -> BTreeSet<FactId> {
    pre.flatten()
}

/// Back-chains from `goal` through `rpg` and returns the candidate set
/// (including the goal facts).
pub fn generate_candidates(problem: &PlanningProblem, goal: &BTreeSet<FactId>, rpg: &Rpg) -> Result<BTreeSet<FactId>> {
    if !rpg.relaxed_solvable(goal) {
        return Err(unsolvable(problem, goal));
    }
    let mut candidates: BTreeSet<FactId> = goal.clone();
    let mut queue: VecDeque<FactId> = goal.iter().copied().collect();
    while let Some(f) = queue.pop_front() {
        let Some(level) = rpg.fact_level(f) else { continue };
        if level == 0 {
            continue;
        }
        let mut shared: Option<BTreeSet<FactId>> = None;
        for &a in problem.achievers(f) {
            if rpg.action_level(a) != Some(level - 1) {
                continue;
            }
            let pre = &problem.action(a).pre;
            shared = Some(match shared {
                None => pre.clone(),
                Some(acc) => acc.intersection(pre).copied().collect(),
            });
            if shared.as_ref().is_some_and(BTreeSet::is_empty) {
                break;
            }
        }
        for c in shared.unwrap_or_default() {
            if candidates.insert(c) {
                queue.push_back(c);
            }
        }
    }
    Ok(candidates)
}

fn unsolvable(problem: &PlanningProblem, goal: &BTreeSet<FactId>) -> Error {
    Error::UnsolvableGoal(problem.fact_names(goal.iter().copied()).join(" "))
}

/// Extraction state reused across goals of one problem.
pub struct LandmarkExtractor<'a> {
    problem: &'a PlanningProblem,
    index: RelaxedIndex,
    rpg: Rpg,
}

impl<'a> LandmarkExtractor<'a> {
    pub fn new(problem: &'a PlanningProblem) -> Self {
        let index = RelaxedIndex::new(problem);
        let rpg = Rpg::build_indexed(problem, &index, &vec![false; problem.actions().len()]);
        LandmarkExtractor { problem, index, rpg }
    }

    pub fn rpg(&self) -> &Rpg {
        &self.rpg
    }

    /// True iff the goal becomes unreachable in the delete relaxation once
    /// every achiever of `candidate` is removed.
    pub fn verify(&self, goal: &BTreeSet<FactId>, candidate: FactId) -> bool {
        let mut excluded = vec![false; self.problem.actions().len()];
        for a in self.problem.achievers(candidate) {
            excluded[a.index()] = true;
        }
        !Rpg::build_indexed(self.problem, &self.index, &excluded).relaxed_solvable(goal)
    }

    pub fn extract(&self, goal: &BTreeSet<FactId>) -> Result<LandmarkSet> {
        let candidates = generate_candidates(self.problem, goal, &self.rpg)?;
        let init = self.problem.init();
        let (trivial, to_probe): (Vec<FactId>, Vec<FactId>) =
            candidates.into_iter().partition(|f| init.contains(*f) || goal.contains(f));
        let verified: Vec<FactId> = to_probe.into_par_iter().filter(|&c| self.verify(goal, c)).collect();
        let all: BTreeSet<FactId> = trivial.into_iter().chain(verified).collect();
        Ok(LandmarkSet::classify(self.problem, goal, all))
    }

    /// One extraction per singleton sub-goal; failures are collected.
    pub fn extract_per_subgoal(&self, goal: &BTreeSet<FactId>) -> Result<BTreeMap<FactId, LandmarkSet>> {
        let mut out = BTreeMap::new();
        let mut errors = Vec::new();
        for &sg in goal {
            match self.extract(&BTreeSet::from([sg])) {
                Ok(ls) => {
                    out.insert(sg, ls);
                }
                Err(e) => errors.push(e),
            }
        }
        match errors.len() {
            0 => Ok(out),
            1 => Err(errors.pop().unwrap()),
            _ => Err(Error::Many(errors)),
        }
    }
}

pub fn verify_candidate(problem: &PlanningProblem, goal: &BTreeSet<FactId>, candidate: FactId) -> bool {
    LandmarkExtractor::new(problem).verify(goal, candidate)
}

pub fn extract_landmarks(problem: &PlanningProblem, goal: &BTreeSet<FactId>) -> Result<LandmarkSet> {
    LandmarkExtractor::new(problem).extract(goal)
}

pub fn extract_per_subgoal(
    problem: &PlanningProblem,
    goal: &BTreeSet<FactId>,
) -> Result<BTreeMap<FactId, LandmarkSet>> {
    LandmarkExtractor::new(problem).extract_per_subgoal(goal)
}

/// `<goal-id> <TRIVIAL_INIT|TRIVIAL_GOAL|NONTRIVIAL> <fact>` lines, sorted.
pub fn landmark_dump<'s>(
    problem: &PlanningProblem,
    sets: impl IntoIterator<Item = (&'s str, &'s LandmarkSet)>,
) -> String {
    let mut lines = Vec::new();
    for (goal_id, ls) in sets {
        let kinds =
            [("TRIVIAL_INIT", &ls.trivial_init), ("TRIVIAL_GOAL", &ls.trivial_goal), ("NONTRIVIAL", &ls.non_trivial)];
        for (kind, facts) in kinds {
            for f in facts {
                lines.push(format!("{goal_id} {kind} {}", problem.fact(*f)));
            }
        }
    }
    lines.sort();
    let mut out = String::new();
    for l in lines {
        writeln!(out, "{l}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{fact, GroundActionSpec, GroundFact, ProblemBuilder};

    fn at(c: &str) -> GroundFact {
        fact("is-at", &[c])
    }

    /// Undirected cell graph with moves in both directions.
    fn graph(edges: &[(&str, &str)], init: &str, goal: &str) -> PlanningProblem {
        let mut b = ProblemBuilder::new();
        b.init(at(init)).goal(at(goal));
        for &(x, y) in edges {
            for (u, v) in [(x, y), (y, x)] {
                b.action(GroundActionSpec::strips(format!("(move {u} {v})"), [at(u)], [at(v)], [at(u)]));
            }
        }
        b.build().unwrap()
    }

    fn names(p: &PlanningProblem, s: &BTreeSet<FactId>) -> Vec<String> {
        p.fact_names(s.iter().copied())
    }

    #[test]
    fn corridor_candidates_and_landmarks() {
        let p = graph(&[("c0", "c1"), ("c1", "c2"), ("c2", "c3")], "c0", "c3");
        let ex = LandmarkExtractor::new(&p);
        let cands = generate_candidates(&p, p.goal(), ex.rpg()).unwrap();
        assert_eq!(names(&p, &cands), ["(is-at c0)", "(is-at c1)", "(is-at c2)", "(is-at c3)"]);
        let ls = ex.extract(p.goal()).unwrap();
        assert_eq!(names(&p, &ls.non_trivial), ["(is-at c1)", "(is-at c2)"]);
        assert_eq!(names(&p, &ls.trivial_init), ["(is-at c0)"]);
        assert_eq!(names(&p, &ls.trivial_goal), ["(is-at c3)"]);
        assert!(ex.verify(p.goal(), p.find_fact("(is-at c1)").unwrap()));
    }

    #[test]
    fn diamond_side_cell_is_not_a_landmark() {
        // a - b - d and a - c - d
        let p = graph(&[("a", "b"), ("b", "d"), ("a", "c"), ("c", "d")], "a", "d");
        let b = p.find_fact("(is-at b)").unwrap();
        assert!(!verify_candidate(&p, p.goal(), b));
        let ls = extract_landmarks(&p, p.goal()).unwrap();
        assert!(ls.non_trivial.is_empty());
    }

    #[test]
    fn achievers_with_disjoint_preconditions_yield_no_candidate() {
        let p = graph(&[("a", "b"), ("b", "d"), ("a", "c"), ("c", "d")], "a", "d");
        let ex = LandmarkExtractor::new(&p);
        let cands = generate_candidates(&p, p.goal(), ex.rpg()).unwrap();
        assert_eq!(names(&p, &cands), ["(is-at d)"]);
    }

    #[test]
    fn fact_without_achievers_is_rejected_when_goal_stays_reachable() {
        let mut b = ProblemBuilder::new();
        b.init(fact("p", &[])).goal(fact("q", &[]));
        b.action(GroundActionSpec::strips("(go)", [fact("p", &[])], [fact("q", &[])], []));
        b.fact(fact("orphan", &[]));
        let p = b.build().unwrap();
        assert!(!verify_candidate(&p, p.goal(), p.find_fact("(orphan)").unwrap()));
    }

    #[test]
    fn goal_in_init_has_only_trivial_landmarks() {
        let p = graph(&[("a", "b")], "a", "a");
        let ls = extract_landmarks(&p, p.goal()).unwrap();
        assert_eq!(names(&p, &ls.all), ["(is-at a)"]);
        assert!(ls.non_trivial.is_empty());
        assert_eq!(ls.trivial_init, ls.trivial_goal);
    }

    #[test]
    fn unreachable_goal_is_an_error() {
        let mut b = ProblemBuilder::new();
        b.init(at("a")).goal(at("z"));
        let p = b.build().unwrap();
        assert!(matches!(extract_landmarks(&p, p.goal()), Err(Error::UnsolvableGoal(_))));
    }

    #[test]
    fn per_subgoal_for_a_fork() {
        // j is a junction; branches j-x1-x2 and j-y1-y2.
        let mut b = ProblemBuilder::new();
        let (hx, hy) = (fact("has", &["x"]), fact("has", &["y"]));
        b.init(at("s"));
        b.goal(hx.clone()).goal(hy.clone());
        for (u, v) in [("s", "j"), ("j", "x1"), ("x1", "x2"), ("j", "y1"), ("y1", "y2")] {
            b.action(GroundActionSpec::strips(format!("(move {u} {v})"), [at(u)], [at(v)], [at(u)]));
            b.action(GroundActionSpec::strips(format!("(move {v} {u})"), [at(v)], [at(u)], [at(v)]));
        }
        b.action(GroundActionSpec::strips("(grab x)", [at("x2")], [hx], []));
        b.action(GroundActionSpec::strips("(grab y)", [at("y2")], [hy], []));
        let p = b.build().unwrap();
        let per = extract_per_subgoal(&p, p.goal()).unwrap();
        assert_eq!(per.len(), 2);
        let x = &per[&p.find_fact("(has x)").unwrap()];
        let y = &per[&p.find_fact("(has y)").unwrap()];
        assert_eq!(names(&p, &x.non_trivial), ["(is-at j)", "(is-at x1)", "(is-at x2)"]);
        assert_eq!(names(&p, &y.non_trivial), ["(is-at j)", "(is-at y1)", "(is-at y2)"]);
        let single = extract_per_subgoal(&p, &BTreeSet::from([p.find_fact("(has x)").unwrap()])).unwrap();
        assert_eq!(single.values().next().unwrap(), &extract_landmarks(&p, &x.goal).unwrap());
    }

    #[test]
    fn dump_lists_fact_in_both_trivial_parts_twice() {
        let p = graph(&[("a", "b")], "a", "a");
        let ls = extract_landmarks(&p, p.goal()).unwrap();
        assert_eq!(landmark_dump(&p, [("g", &ls)]), "g TRIVIAL_GOAL (is-at a)\ng TRIVIAL_INIT (is-at a)\n");
    }
}
