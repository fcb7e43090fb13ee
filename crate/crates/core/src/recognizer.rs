//! Landmark-based goal scoring from observed actions.
//!
//! A landmark counts as achieved once it occurs in the flattened
//! precondition or the add list of an observed action. Landmarks true in
//! the initial state are left out of both the achieved set and the
//! denominators unless `use_init_landmarks` is set, in which case they are
//! counted as achieved before the first observation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::landmarks::{LandmarkExtractor, LandmarkSet};
use crate::problem::{ActionId, FactId, GoalHypothesis, PlanningProblem};

/// Exact heuristic value.
pub type Score = Ratio<i128>;

/// Absolute tolerance when comparing scores for the maximum.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Achieved fraction of the goal's landmarks.
    #[default]
    Completion,
    /// Mean over sub-goals of the achieved fraction of each sub-goal's
    /// landmarks.
    CompletionSubgoal,
    /// Achieved landmarks weighted by how few goals share them.
    Uniqueness,
}

impl FromStr for Heuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "completion" => Ok(Heuristic::Completion),
            "completion-subgoal" => Ok(Heuristic::CompletionSubgoal),
            "uniqueness" => Ok(Heuristic::Uniqueness),
            _ => Err(Error::InvalidArgument(format!("unknown heuristic `{s}`"))),
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Heuristic::Completion => "completion",
            Heuristic::CompletionSubgoal => "completion-subgoal",
            Heuristic::Uniqueness => "uniqueness",
        })
    }
}

/// Observed actions in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ObservationSequence {
    pub steps: Vec<ActionId>,
}

impl ObservationSequence {
    pub fn new(steps: Vec<ActionId>) -> Self {
        ObservationSequence { steps }
    }

    /// One action per line; blank lines and `#` comments are skipped.
    /// Every unresolvable line is reported.
    pub fn parse(problem: &PlanningProblem, text: &str) -> Result<Self> {
        let mut steps = Vec::new();
        let mut errors = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match problem.find_action(line) {
                Ok(a) => steps.push(a),
                Err(e) => errors.push(Error::AtLine { line: i + 1, inner: Box::new(e) }),
            }
        }
        match errors.len() {
            0 => Ok(ObservationSequence { steps }),
            1 => Err(errors.pop().unwrap()),
            _ => Err(Error::Many(errors)),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The first `t` observations.
    pub fn prefix(&self, t: usize) -> &[ActionId] {
        &self.steps[..t.min(self.steps.len())]
    }

    pub fn to_text(&self, problem: &PlanningProblem) -> String {
        let mut out = String::new();
        for a in &self.steps {
            writeln!(out, "{}", problem.action(*a).name).unwrap();
        }
        out
    }
}

/// Facts an observed action reveals: its flattened precondition and its
/// add effects.
pub fn observed_facts(problem: &PlanningProblem, action: ActionId) -> impl Iterator<Item = FactId> + '_ {
    let a = problem.action(action);
    a.pre.iter().chain(&a.add).copied()
}

/// The landmarks a goal is scored against.
pub fn scored_landmarks(set: &LandmarkSet, use_init_landmarks: bool) -> BTreeSet<FactId> {
    if use_init_landmarks {
        set.all.clone()
    } else {
        set.without_init()
    }
}

/// Achieved landmarks per goal, in the order of the input sets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AchievedLandmarks {
    pub per_goal: Vec<BTreeSet<FactId>>,
}

/// Achieved landmarks of every goal after `observations`, computed from
/// scratch.
pub fn compute_achieved(
    problem: &PlanningProblem,
    sets: &[LandmarkSet],
    observations: &[ActionId],
    use_init_landmarks: bool,
) -> AchievedLandmarks {
    let mut revealed = BTreeSet::new();
    for &o in observations {
        revealed.extend(observed_facts(problem, o));
    }
    let per_goal = sets
        .iter()
        .map(|set| {
            let scored = scored_landmarks(set, use_init_landmarks);
            let mut achieved: BTreeSet<FactId> = scored.intersection(&revealed).copied().collect();
            if use_init_landmarks {
                achieved.extend(set.trivial_init.iter().copied());
            }
            achieved
        })
        .collect();
    AchievedLandmarks { per_goal }
}

fn ratio(num: usize, den: usize) -> Score {
    if den == 0 {
        Score::zero()
    } else {
        Score::new(num as i128, den as i128)
    }
}

/// `|AL| / |L|`, or 0 when the goal has no scored landmarks.
pub fn h_completion(achieved: &BTreeSet<FactId>, landmarks: &BTreeSet<FactId>) -> Score {
    ratio(achieved.intersection(landmarks).count(), landmarks.len())
}

/// Mean over the `num_subgoals` sub-goals of `|AL_sg| / |L_sg|`; a sub-goal
/// without scored landmarks contributes 0.
pub fn h_completion_subgoal(
    achieved: &[BTreeSet<FactId>],
    landmarks: &[BTreeSet<FactId>],
    num_subgoals: usize,
) -> Score {
    if num_subgoals == 0 {
        return Score::zero();
    }
    let total: Score = achieved.iter().zip(landmarks).map(|(al, l)| h_completion(al, l)).sum();
    total / Score::from_integer(num_subgoals as i128)
}

/// `1 / |{g : l ∈ L_g}|` over the given landmark sets.
pub fn landmark_uniqueness(problem: &PlanningProblem, l: FactId, sets: &[BTreeSet<FactId>]) -> Result<Score> {
    let count = sets.iter().filter(|s| s.contains(&l)).count();
    if count == 0 {
        return Err(Error::UndefinedLandmark(problem.fact(l).to_string()));
    }
    Ok(Score::new(1, count as i128))
}

/// Uniqueness of every landmark occurring in `sets`.
pub fn uniqueness_weights(sets: &[BTreeSet<FactId>]) -> BTreeMap<FactId, Score> {
    let mut counts: BTreeMap<FactId, i128> = BTreeMap::new();
    for s in sets {
        for &l in s {
            *counts.entry(l).or_default() += 1;
        }
    }
    counts.into_iter().map(|(l, c)| (l, Score::new(1, c))).collect()
}

/// `Σ_{AL} uniq / Σ_{L} uniq`, or 0 when the denominator is 0.
pub fn h_uniqueness(
    achieved: &BTreeSet<FactId>,
    landmarks: &BTreeSet<FactId>,
    weights: &BTreeMap<FactId, Score>,
) -> Score {
    let weight = |l: &FactId| weights.get(l).copied().unwrap_or_else(Score::zero);
    let den: Score = landmarks.iter().map(weight).sum();
    if den.is_zero() {
        return Score::zero();
    }
    let num: Score = achieved.intersection(landmarks).map(weight).sum();
    num / den
}

/// Indices attaining the maximum within [`TIE_TOLERANCE`].
pub fn argmax_set(values: &[f64]) -> Vec<usize> {
    let Some(max) = values.iter().copied().reduce(f64::max) else {
        return Vec::new();
    };
    (0..values.len()).filter(|&i| values[i] >= max - TIE_TOLERANCE).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalScores {
    pub goals: Vec<String>,
    pub scores: Vec<Score>,
    /// Indices into `goals` of every goal tying the maximum.
    pub most_probable: Vec<usize>,
}

impl GoalScores {
    pub fn most_probable_names(&self) -> Vec<&str> {
        self.most_probable.iter().map(|&i| self.goals[i].as_str()).collect()
    }
}

pub fn rank_goals(goals: &[String], scores: &[Score]) -> Result<GoalScores> {
    if goals.is_empty() {
        return Err(Error::EmptyGoals);
    }
    let floats: Vec<f64> = scores.iter().map(score_f64).collect();
    Ok(GoalScores { goals: goals.to_vec(), scores: scores.to_vec(), most_probable: argmax_set(&floats) })
}

pub fn score_f64(s: &Score) -> f64 {
    s.to_f64().unwrap_or(0.0)
}

/// Landmark knowledge for a fixed goal set of one problem, extracted once
/// and shared by every recognition over that problem.
#[derive(Debug, Clone)]
pub struct PlrModel {
    names: Vec<String>,
    goals: Vec<BTreeSet<FactId>>,
    sets: Vec<LandmarkSet>,
    /// Landmarks each goal is scored against.
    scored: Vec<BTreeSet<FactId>>,
    /// Per goal, per sub-goal in fact order; filled only for the sub-goal
    /// heuristic.
    subgoal_scored: Vec<Vec<BTreeSet<FactId>>>,
    subgoal_init: Vec<Vec<BTreeSet<FactId>>>,
    weights: BTreeMap<FactId, Score>,
    uniqueness_den: Vec<Score>,
    heuristic: Heuristic,
    use_init_landmarks: bool,
    /// `watchers[f]`: `(goal, None)` when f is a scored landmark of the goal,
    /// `(goal, Some(sg))` for sub-goal landmarks.
    watchers: Vec<Vec<(u32, Option<u32>)>>,
    extraction_time: Duration,
    dropped: Vec<(String, String)>,
}

impl PlrModel {
    /// Extracts landmarks for every hypothesis. Hypotheses whose extraction
    /// fails are dropped and reported by [`PlrModel::dropped`]; it is an
    /// error if none remain.
    pub fn build(
        problem: &PlanningProblem,
        hypotheses: &[GoalHypothesis],
        heuristic: Heuristic,
        use_init_landmarks: bool,
    ) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::EmptyGoals);
        }
        let started = Instant::now();
        let extractor = LandmarkExtractor::new(problem);
        let mut names = Vec::new();
        let mut goals = Vec::new();
        let mut sets = Vec::new();
        let mut subgoal_sets = Vec::new();
        let mut dropped = Vec::new();
        for h in hypotheses {
            let extracted = extractor.extract(&h.facts).and_then(|set| {
                let per_sg = if heuristic == Heuristic::CompletionSubgoal {
                    extractor.extract_per_subgoal(&h.facts)?.into_values().collect()
                } else {
                    Vec::new()
                };
                Ok((set, per_sg))
            });
            match extracted {
                Ok((set, per_sg)) => {
                    names.push(h.name.clone());
                    goals.push(h.facts.clone());
                    sets.push(set);
                    subgoal_sets.push(per_sg);
                }
                Err(e) => {
                    log::warn!("dropping goal {}: {e}", h.name);
                    dropped.push((h.name.clone(), e));
                }
            }
        }
        if names.is_empty() {
            return Err(Error::Many(dropped.into_iter().map(|(_, e)| e).collect()));
        }
        let dropped = dropped.into_iter().map(|(g, e)| (g, e.to_string())).collect();
        let extraction_time = started.elapsed();
        let mut model = Self::from_sets(problem, names, goals, sets, subgoal_sets, heuristic, use_init_landmarks);
        model.extraction_time = extraction_time;
        model.dropped = dropped;
        Ok(model)
    }

    /// Builds the model from precomputed landmark sets. `subgoal_sets[g]`
    /// may be empty unless the sub-goal heuristic is used.
    pub fn from_sets(
        problem: &PlanningProblem,
        names: Vec<String>,
        goals: Vec<BTreeSet<FactId>>,
        sets: Vec<LandmarkSet>,
        subgoal_sets: Vec<Vec<LandmarkSet>>,
        heuristic: Heuristic,
        use_init_landmarks: bool,
    ) -> Self {
        let scored: Vec<BTreeSet<FactId>> = sets.iter().map(|s| scored_landmarks(s, use_init_landmarks)).collect();
        let subgoal_scored: Vec<Vec<BTreeSet<FactId>>> = subgoal_sets
            .iter()
            .map(|per| per.iter().map(|s| scored_landmarks(s, use_init_landmarks)).collect())
            .collect();
        let subgoal_init: Vec<Vec<BTreeSet<FactId>>> = subgoal_sets
            .iter()
            .map(|per| {
                per.iter().map(|s| if use_init_landmarks { s.trivial_init.clone() } else { BTreeSet::new() }).collect()
            })
            .collect();
        let weights = uniqueness_weights(&scored);
        let uniqueness_den = scored.iter().map(|l| l.iter().map(|f| weights[f]).sum()).collect();
        let mut watchers = vec![Vec::new(); problem.num_facts()];
        for (g, l) in scored.iter().enumerate() {
            for f in l {
                watchers[f.index()].push((g as u32, None));
            }
        }
        for (g, per) in subgoal_scored.iter().enumerate() {
            for (sg, l) in per.iter().enumerate() {
                for f in l {
                    watchers[f.index()].push((g as u32, Some(sg as u32)));
                }
            }
        }
        PlrModel {
            names,
            goals,
            sets,
            scored,
            subgoal_scored,
            subgoal_init,
            weights,
            uniqueness_den,
            heuristic,
            use_init_landmarks,
            watchers,
            extraction_time: Duration::ZERO,
            dropped: Vec::new(),
        }
    }

    pub fn goal_names(&self) -> &[String] {
        &self.names
    }

    pub fn goal_facts(&self, g: usize) -> &BTreeSet<FactId> {
        &self.goals[g]
    }

    pub fn landmark_sets(&self) -> &[LandmarkSet] {
        &self.sets
    }

    /// Landmarks goal `g` is scored against.
    pub fn scored(&self, g: usize) -> &BTreeSet<FactId> {
        &self.scored[g]
    }

    pub fn heuristic(&self) -> Heuristic {
        self.heuristic
    }

    pub fn use_init_landmarks(&self) -> bool {
        self.use_init_landmarks
    }

    pub fn extraction_time(&self) -> Duration {
        self.extraction_time
    }

    /// Goals left out because extraction failed, with the reason.
    pub fn dropped(&self) -> &[(String, String)] {
        &self.dropped
    }

    pub fn num_goals(&self) -> usize {
        self.names.len()
    }

    /// Achieved sets before any observation.
    pub fn initial_tracker(&self) -> PlrTracker {
        let achieved: Vec<BTreeSet<FactId>> = self
            .sets
            .iter()
            .map(|s| if self.use_init_landmarks { s.trivial_init.clone() } else { BTreeSet::new() })
            .collect();
        let uniqueness_num = achieved.iter().map(|al| al.iter().map(|f| self.weights[f]).sum()).collect();
        PlrTracker { achieved, subgoal_achieved: self.subgoal_init.clone(), uniqueness_num }
    }

    /// Tracker state after `observations`, computed from scratch.
    pub fn tracker_for(&self, problem: &PlanningProblem, observations: &[ActionId]) -> PlrTracker {
        let achieved = compute_achieved(problem, &self.sets, observations, self.use_init_landmarks).per_goal;
        let mut revealed = BTreeSet::new();
        for &o in observations {
            revealed.extend(observed_facts(problem, o));
        }
        let subgoal_achieved = self
            .subgoal_scored
            .iter()
            .zip(&self.subgoal_init)
            .map(|(per, init)| {
                per.iter()
                    .zip(init)
                    .map(|(l, i)| l.intersection(&revealed).copied().chain(i.iter().copied()).collect())
                    .collect()
            })
            .collect();
        let uniqueness_num = achieved.iter().map(|al| al.iter().map(|f| self.weights[f]).sum()).collect();
        PlrTracker { achieved, subgoal_achieved, uniqueness_num }
    }

    /// Scores of every goal under the configured heuristic.
    pub fn scores(&self, tracker: &PlrTracker) -> Vec<Score> {
        (0..self.names.len())
            .map(|g| match self.heuristic {
                Heuristic::Completion => ratio(tracker.achieved[g].len(), self.scored[g].len()),
                Heuristic::CompletionSubgoal => {
                    h_completion_subgoal(&tracker.subgoal_achieved[g], &self.subgoal_scored[g], self.goals[g].len())
                }
                Heuristic::Uniqueness => {
                    if self.uniqueness_den[g].is_zero() {
                        Score::zero()
                    } else {
                        tracker.uniqueness_num[g] / self.uniqueness_den[g]
                    }
                }
            })
            .collect()
    }

    /// Completion and uniqueness scores side by side, with set sizes.
    pub fn score_rows(&self, tracker: &PlrTracker) -> Vec<ScoreRow> {
        (0..self.names.len())
            .map(|g| ScoreRow {
                achieved: tracker.achieved[g].len(),
                landmarks: self.scored[g].len(),
                completion: ratio(tracker.achieved[g].len(), self.scored[g].len()),
                uniqueness: h_uniqueness(&tracker.achieved[g], &self.scored[g], &self.weights),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreRow {
    pub achieved: usize,
    pub landmarks: usize,
    pub completion: Score,
    pub uniqueness: Score,
}

/// Running achieved-landmark sets of one recognition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlrTracker {
    achieved: Vec<BTreeSet<FactId>>,
    subgoal_achieved: Vec<Vec<BTreeSet<FactId>>>,
    uniqueness_num: Vec<Score>,
}

impl PlrTracker {
    /// Records one observed action, touching only the goals watching the
    /// facts it reveals.
    pub fn observe(&mut self, model: &PlrModel, problem: &PlanningProblem, action: ActionId) {
        for f in observed_facts(problem, action) {
            for &(g, sg) in &model.watchers[f.index()] {
                let g = g as usize;
                match sg {
                    None => {
                        if self.achieved[g].insert(f) {
                            self.uniqueness_num[g] += model.weights[&f];
                        }
                    }
                    Some(sg) => {
                        self.subgoal_achieved[g][sg as usize].insert(f);
                    }
                }
            }
        }
    }

    pub fn achieved(&self) -> &[BTreeSet<FactId>] {
        &self.achieved
    }
}

/// CSV `t,goal,AL_size,L_size,h_gc,h_uniq`, one row per goal for every
/// prefix length from 0 to the sequence length.
pub fn score_csv(problem: &PlanningProblem, model: &PlrModel, observations: &ObservationSequence) -> String {
    let mut out = String::from("t,goal,AL_size,L_size,h_gc,h_uniq\n");
    let mut tracker = model.initial_tracker();
    for t in 0..=observations.len() {
        if t > 0 {
            tracker.observe(model, problem, observations.steps[t - 1]);
        }
        for (g, row) in model.score_rows(&tracker).iter().enumerate() {
            writeln!(
                out,
                "{t},{},{},{},{},{}",
                model.names[g],
                row.achieved,
                row.landmarks,
                score_f64(&row.completion),
                score_f64(&row.uniqueness)
            )
            .unwrap();
        }
    }
    out
}
