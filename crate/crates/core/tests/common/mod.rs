//! Reference implementations used as test oracles, kept independent of the
//! library's relaxed planning graph.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use goalrec::eval::GridSpec;
use goalrec::problem::{FactId, PlanningProblem, State};
use rand::Rng;

/// Every state trajectory from the initial state that reaches `goal` without
/// revisiting a state, stopping when the goal first holds. Returns `None`
/// once more than `limit` trajectories exist.
pub fn acyclic_plans(problem: &PlanningProblem, goal: &BTreeSet<FactId>, limit: usize) -> Option<Vec<Vec<State>>> {
    fn dfs(
        p: &PlanningProblem,
        goal: &BTreeSet<FactId>,
        path: &mut Vec<State>,
        on_path: &mut HashSet<State>,
        out: &mut Vec<Vec<State>>,
        limit: usize,
    ) -> bool {
        let s = path.last().unwrap().clone();
        if s.is_superset(goal) {
            out.push(path.clone());
            return out.len() <= limit;
        }
        for a in p.action_ids() {
            if let Ok(next) = p.apply(&s, a) {
                if on_path.insert(next.clone()) {
                    path.push(next.clone());
                    let ok = dfs(p, goal, path, on_path, out, limit);
                    path.pop();
                    on_path.remove(&next);
                    if !ok {
                        return false;
                    }
                }
            }
        }
        true
    }
    let mut out = Vec::new();
    let init = problem.init().clone();
    let mut on_path = HashSet::from([init.clone()]);
    dfs(problem, goal, &mut vec![init], &mut on_path, &mut out, limit).then_some(out)
}

/// Facts reachable when delete effects are ignored, by breadth-first search
/// over relaxed states.
pub fn relaxed_reachable(problem: &PlanningProblem) -> BTreeSet<FactId> {
    let start: BTreeSet<FactId> = problem.init().facts().clone();
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut reached = BTreeSet::new();
    while let Some(s) = queue.pop_front() {
        reached.extend(s.iter().copied());
        for a in problem.actions() {
            let holds = a.precondition.holds_relaxed(&|f: &FactId| s.contains(f));
            if holds {
                let mut next = s.clone();
                next.extend(a.add.iter().copied());
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    reached
}

/// A random connected layout of at most `max_cells` cells: a few small
/// rooms and corridors joined by random doors, with a random initial cell
/// and up to three goal cells.
pub fn random_grid(rng: &mut impl Rng, max_cells: usize) -> GridSpec {
    let mut g = GridSpec::new();
    let mut blocks: Vec<Vec<String>> = Vec::new();
    let mut total = 0;
    let mut idx = 0;
    while total < max_cells {
        let (w, h) =
            if rng.gen_bool(0.5) { (rng.gen_range(1..=4), 1) } else { (rng.gen_range(1..=3), rng.gen_range(1..=3)) };
        if total + w * h > max_cells {
            break;
        }
        let prefix = format!("r{idx}x");
        g.room(&prefix, w, h).unwrap();
        blocks.push((1..=w * h).map(|i| format!("{prefix}{i}")).collect());
        total += w * h;
        idx += 1;
        if rng.gen_bool(0.3) {
            break;
        }
    }
    if blocks.is_empty() {
        g.room("r0x", 2, 1).unwrap();
        blocks.push(vec!["r0x1".into(), "r0x2".into()]);
    }
    for i in 1..blocks.len() {
        let j = rng.gen_range(0..i);
        let a = blocks[i][rng.gen_range(0..blocks[i].len())].clone();
        let b = blocks[j][rng.gen_range(0..blocks[j].len())].clone();
        g.edge(&a, &b).unwrap();
        if rng.gen_bool(0.3) {
            let a = blocks[i][rng.gen_range(0..blocks[i].len())].clone();
            let b = blocks[j][rng.gen_range(0..blocks[j].len())].clone();
            g.edge(&a, &b).unwrap();
        }
    }
    let cells = g.cells().to_vec();
    let init = cells[rng.gen_range(0..cells.len())].clone();
    g.init(&init).unwrap();
    for _ in 0..rng.gen_range(1..=3) {
        let goal = cells[rng.gen_range(0..cells.len())].clone();
        if goal != init {
            g.goal(&goal).unwrap();
        }
    }
    if g.goals().is_empty() {
        let other = cells.iter().find(|c| **c != init).cloned().unwrap_or(init);
        g.goal(&other).unwrap();
    }
    g
}
