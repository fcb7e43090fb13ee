//! Seeded synthetic recognition suites.
//!
//! Recipe suites model an activity that starts with a styled `begin`
//! action, runs through steps shared by every goal (with optional filler
//! actions in between), and ends with steps unique to the goal. The style
//! chosen at the start usually, but not always, identifies the goal, so
//! observed facts are informative early while landmarks only separate the
//! goals once the unique steps begin. Goals may also require tool facts
//! that hold initially, which makes them differ only in initial-state
//! landmarks.
//!
//! Junction suites are grid worlds with a hub corridor that forks into
//! equally long branches, one goal at the end of each.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::dataset::RecognitionDataset;
use crate::eval::grid::GridSpec;
use crate::ground::load_problem;
use crate::recognizer::ObservationSequence;

#[derive(Debug, Clone, PartialEq)]
pub struct RecipeSpec {
    pub goals: usize,
    /// Steps every goal goes through.
    pub shared_steps: usize,
    /// Steps unique to each goal; at least one.
    pub distinct_steps: usize,
    /// Initial tool facts used up by each goal's first unique step; goals
    /// past the end of the list need none.
    pub tools: Vec<usize>,
    /// Number of distinct filler actions.
    pub fillers: usize,
    /// Filler actions per sequence are drawn from `0..=max_fillers` and
    /// placed among the shared steps.
    pub max_fillers: usize,
    /// Probability that a sequence begins with another goal's style.
    pub style_noise: f64,
    pub sequences_per_goal: usize,
    pub seed: u64,
}

impl Default for RecipeSpec {
    fn default() -> Self {
        RecipeSpec {
            goals: 5,
            shared_steps: 3,
            distinct_steps: 4,
            tools: Vec::new(),
            fillers: 4,
            max_fillers: 4,
            style_noise: 0.1,
            sequences_per_goal: 10,
            seed: 0,
        }
    }
}

/// Generated PDDL and labelled observation sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecipeSuite {
    pub domain: String,
    pub problem: String,
    /// Action names per sequence and the goal that produced it.
    pub sequences: Vec<(Vec<String>, String)>,
}

fn goal_name(g: usize) -> String {
    format!("dish{g}")
}

impl RecipeSpec {
    fn tools_of(&self, g: usize) -> usize {
        self.tools.get(g).copied().unwrap_or(0)
    }

    fn last_shared(&self) -> String {
        if self.shared_steps == 0 {
            "(ready)".into()
        } else {
            format!("(shared{})", self.shared_steps)
        }
    }

    pub fn domain_pddl(&self) -> String {
        let mut preds = vec!["(idle)".to_string(), "(ready)".to_string()];
        let mut actions = String::new();
        let mut action = |name: String, pre: Vec<String>, add: Vec<String>, del: Vec<String>| {
            let effects: Vec<String> = add.into_iter().chain(del.into_iter().map(|d| format!("(not {d})"))).collect();
            writeln!(
                actions,
                "  (:action {name}\n    :parameters ()\n    :precondition (and {})\n    :effect (and {}))",
                pre.join(" "),
                effects.join(" ")
            )
            .unwrap();
        };
        for s in 0..self.goals {
            preds.push(format!("(style{s})"));
            action(
                format!("begin{s}"),
                vec!["(idle)".into()],
                vec!["(ready)".into(), format!("(style{s})")],
                vec!["(idle)".into()],
            );
        }
        for i in 1..=self.shared_steps {
            preds.push(format!("(shared{i})"));
            let pre = if i == 1 { "(ready)".to_string() } else { format!("(shared{})", i - 1) };
            action(format!("shared{i}"), vec![pre], vec![format!("(shared{i})")], vec![]);
        }
        for g in 0..self.goals {
            for k in 1..=self.tools_of(g) {
                preds.push(format!("(tool{g}-{k})"));
            }
            for j in 1..=self.distinct_steps {
                preds.push(format!("(step{g}-{j})"));
                let tools: Vec<String> = (1..=self.tools_of(g)).map(|k| format!("(tool{g}-{k})")).collect();
                let (pre, del) = if j == 1 {
                    (std::iter::once(self.last_shared()).chain(tools.iter().cloned()).collect(), tools)
                } else {
                    (vec![format!("(step{g}-{})", j - 1)], Vec::new())
                };
                action(format!("step{g}-{j}"), pre, vec![format!("(step{g}-{j})")], del);
            }
        }
        for f in 1..=self.fillers {
            preds.push(format!("(fidget{f})"));
            action(format!("fidget{f}"), vec!["(ready)".into()], vec![format!("(fidget{f})")], vec![]);
        }
        format!(
            "(define (domain recipes)\n  (:requirements :strips)\n  (:predicates {})\n{actions})\n",
            preds.join(" ")
        )
    }

    pub fn problem_pddl(&self) -> String {
        let mut init = vec!["(idle)".to_string()];
        for g in 0..self.goals {
            init.extend((1..=self.tools_of(g)).map(|k| format!("(tool{g}-{k})")));
        }
        let last = |g: usize| format!("(step{g}-{})", self.distinct_steps);
        let hyps: Vec<String> = (0..self.goals).map(|g| format!("    ({} {})", goal_name(g), last(g))).collect();
        format!(
            "(define (problem cooking)\n  (:domain recipes)\n  (:init {})\n  (:goal {})\n  (:goal-hypotheses\n{}))\n",
            init.join(" "),
            last(0),
            hyps.join("\n")
        )
    }

    fn sequence(&self, g: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
        let style = if self.goals > 1 && rng.gen_bool(self.style_noise) {
            let others: Vec<usize> = (0..self.goals).filter(|&s| s != g).collect();
            *others.choose(rng).unwrap()
        } else {
            g
        };
        let mut seq = vec![format!("(begin{style})")];
        let mut middle: Vec<String> = (1..=self.shared_steps).map(|i| format!("(shared{i})")).collect();
        if self.fillers > 0 {
            for _ in 0..rng.gen_range(0..=self.max_fillers) {
                let f = rng.gen_range(1..=self.fillers);
                let at = rng.gen_range(0..=middle.len());
                middle.insert(at, format!("(fidget{f})"));
            }
        }
        seq.extend(middle);
        seq.extend((1..=self.distinct_steps).map(|j| format!("(step{g}-{j})")));
        seq
    }

    pub fn generate(&self) -> Result<RecipeSuite> {
        if self.goals == 0 {
            return Err(Error::EmptyGoals);
        }
        if self.distinct_steps == 0 {
            return Err(Error::InvalidArgument("recipes need at least one distinct step".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut sequences = Vec::new();
        for _ in 0..self.sequences_per_goal {
            for g in 0..self.goals {
                sequences.push((self.sequence(g, &mut rng), goal_name(g)));
            }
        }
        Ok(RecipeSuite { domain: self.domain_pddl(), problem: self.problem_pddl(), sequences })
    }
}

impl RecipeSuite {
    pub fn to_dataset(&self) -> Result<RecognitionDataset> {
        let mut d = RecognitionDataset::new();
        let p = d.add_problem("recipes", load_problem(&self.domain, &self.problem)?);
        for (steps, goal) in &self.sequences {
            let obs = ObservationSequence::parse(&d.problems[p].1, &steps.join("\n"))?;
            d.add_entry(p, obs, goal)?;
        }
        Ok(d)
    }

    /// Writes `domain.pddl`, `problem.pddl`, one observation file per
    /// sequence and a `manifest.txt` listing them.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("obs"))?;
        fs::write(dir.join("domain.pddl"), &self.domain)?;
        fs::write(dir.join("problem.pddl"), &self.problem)?;
        let mut manifest = String::from("# domain problem observations true-goal\n");
        for (i, (steps, goal)) in self.sequences.iter().enumerate() {
            let name = format!("obs/seq{i:03}.txt");
            fs::write(dir.join(&name), steps.join("\n") + "\n")?;
            writeln!(manifest, "domain.pddl problem.pddl {name} {goal}").unwrap();
        }
        fs::write(dir.join("manifest.txt"), manifest)?;
        Ok(())
    }
}

/// A hub corridor `h1 .. h<hub>` whose last cell forks into `branches`
/// corridors of `branch_len` cells each; the goals are the branch ends.
pub fn junction_grid(hub: usize, branches: usize, branch_len: usize) -> Result<GridSpec> {
    let mut g = GridSpec::new();
    g.room("h", hub, 1)?.init("h1")?;
    for b in 1..=branches {
        let prefix = format!("b{b}-");
        g.room(&prefix, branch_len, 1)?;
        g.edge(&format!("h{hub}"), &format!("{prefix}1"))?;
        g.goal(&format!("{prefix}{branch_len}"))?;
    }
    Ok(g)
}

/// Moves along the shortest path from the initial cell to `goal`.
pub fn walk_to(spec: &GridSpec, goal: &str) -> Result<Vec<String>> {
    let init = spec.initial().ok_or_else(|| Error::InvalidArgument("grid has no initial cell".into()))?;
    let path =
        spec.shortest_path(init, goal).ok_or_else(|| Error::DisconnectedGrid(goal.to_string(), init.to_string()))?;
    Ok(path.windows(2).map(|w| format!("(move {} {})", w[0], w[1])).collect())
}

/// `instances` random junction grids (hub 2..=6 cells, 2..=4 branches of
/// 3..=5 cells), each contributing one shortest walk per goal.
pub fn junction_suite(instances: usize, seed: u64) -> Result<RecognitionDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = RecognitionDataset::new();
    for i in 0..instances {
        let spec = junction_grid(rng.gen_range(2..=6), rng.gen_range(2..=4), rng.gen_range(3..=5))?;
        let problem = load_problem(&spec.domain_pddl(), &spec.problem_pddl(&format!("junction{i}"))?)?;
        let p = d.add_problem(format!("junction{i}"), problem);
        for goal in spec.goals().to_vec() {
            let obs = ObservationSequence::parse(&d.problems[p].1, &walk_to(&spec, &goal)?.join("\n"))?;
            d.add_entry(p, obs, &goal)?;
        }
    }
    Ok(d)
}
