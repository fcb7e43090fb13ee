//! Online recognition sessions mixing landmark scores with the naive Bayes
//! posterior.
//!
//! Landmarks are extracted once when a session starts. Each observed action
//! then updates the achieved-landmark sets and the fact evidence in place.
//! The landmark scores are normalized to a distribution (uniform when all
//! are zero) and mixed with the posterior using
//! `w_nbm(n) = a / (1 + exp(-b (n - c)))`, where `n` is the size of the
//! training set the naive Bayes model was fit on.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::nbm::{featurize, NbmModel};
use crate::problem::{ActionId, GoalHypothesis, PlanningProblem};
use crate::recognizer::{argmax_set, score_f64, Heuristic, ObservationSequence, PlrModel, PlrTracker, Score};

pub const DEFAULT_A: f64 = 0.7;
pub const DEFAULT_B: f64 = 0.45;
pub const DEFAULT_C: f64 = 11.5;

/// Logistic weight of the naive Bayes term for training-set size `n`.
pub fn weight_nbm(n: f64, a: f64, b: f64, c: f64) -> f64 {
    a / (1.0 + (-b * (n - c)).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub heuristic: Heuristic,
    /// Training-set size of the naive Bayes model.
    pub n: usize,
    pub use_init_landmarks: bool,
    /// Replaces the logistic weight, e.g. 0 for landmarks only and 1 for the
    /// posterior only.
    pub weight_override: Option<f64>,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            a: DEFAULT_A,
            b: DEFAULT_B,
            c: DEFAULT_C,
            heuristic: Heuristic::default(),
            n: 0,
            use_init_landmarks: false,
            weight_override: None,
        }
    }
}

impl HybridConfig {
    pub fn w_nbm(&self) -> f64 {
        self.weight_override.unwrap_or_else(|| weight_nbm(self.n as f64, self.a, self.b, self.c))
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.a) {
            return Err(Error::InvalidArgument(format!("a must lie in [0, 1], got {}", self.a)));
        }
        if let Some(w) = self.weight_override {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidArgument(format!("weight must lie in [0, 1], got {w}")));
            }
        }
        Ok(())
    }
}

/// Recognition state after `t` observations.
#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionSnapshot {
    pub t: usize,
    pub goals: Arc<[String]>,
    pub plr_scores: Vec<Score>,
    pub plr_dist: Vec<f64>,
    pub nbm: Vec<f64>,
    pub hybrid: Vec<f64>,
    /// Indices of the goals tying the maximum of `hybrid`.
    pub most_probable: Vec<usize>,
    pub plr_time: Duration,
    pub nbm_time: Duration,
}

impl RecognitionSnapshot {
    /// Equality of everything except the timing fields.
    pub fn same_values(&self, other: &Self) -> bool {
        self.t == other.t
            && self.goals == other.goals
            && self.plr_scores == other.plr_scores
            && self.plr_dist == other.plr_dist
            && self.nbm == other.nbm
            && self.hybrid == other.hybrid
            && self.most_probable == other.most_probable
    }

    /// Argmax set of the raw landmark scores.
    pub fn plr_argmax(&self) -> Vec<usize> {
        argmax_set(&self.plr_scores.iter().map(score_f64).collect::<Vec<_>>())
    }

    pub fn nbm_argmax(&self) -> Vec<usize> {
        argmax_set(&self.nbm)
    }
}

/// Scores normalized to sum to one; uniform when they are all zero.
pub fn normalize_scores(scores: &[Score]) -> Vec<f64> {
    let total: Score = scores.iter().sum();
    if total.is_zero() {
        return vec![1.0 / scores.len() as f64; scores.len()];
    }
    scores.iter().map(|s| score_f64(&(s / total))).collect()
}

/// Convex combination `(1 - w) * plr + w * nbm`.
pub fn combine(plr_dist: &[f64], nbm: &[f64], w_nbm: f64) -> Vec<f64> {
    let w_plr = 1.0 - w_nbm;
    plr_dist.iter().zip(nbm).map(|(p, q)| w_plr * p + w_nbm * q).collect()
}

struct NbmView<'a> {
    model: &'a NbmModel,
    goals: Vec<usize>,
    fact_index: Vec<Option<usize>>,
    evidence: BTreeSet<usize>,
}

pub struct RecognitionSession<'a> {
    problem: &'a PlanningProblem,
    plr: Arc<PlrModel>,
    tracker: PlrTracker,
    nbm: Option<NbmView<'a>>,
    goals: Arc<[String]>,
    w_nbm: f64,
    t: usize,
}

impl<'a> RecognitionSession<'a> {
    /// Extracts landmarks for `goals` and starts at t = 0. Goals whose
    /// extraction fails are dropped with a warning.
    pub fn start(
        problem: &'a PlanningProblem,
        goals: &[GoalHypothesis],
        nbm: Option<&'a NbmModel>,
        config: &HybridConfig,
    ) -> Result<Self> {
        let plr = PlrModel::build(problem, goals, config.heuristic, config.use_init_landmarks)?;
        Self::with_model(problem, Arc::new(plr), nbm, config)
    }

    /// Starts a session over landmarks extracted earlier. Without a naive
    /// Bayes model the posterior term is uniform.
    pub fn with_model(
        problem: &'a PlanningProblem,
        plr: Arc<PlrModel>,
        nbm: Option<&'a NbmModel>,
        config: &HybridConfig,
    ) -> Result<Self> {
        config.validate()?;
        if plr.heuristic() != config.heuristic || plr.use_init_landmarks() != config.use_init_landmarks {
            return Err(Error::InvalidArgument("landmark model was built with different scoring options".into()));
        }
        let nbm = match nbm {
            Some(model) => Some(NbmView {
                model,
                goals: model.resolve_goals(plr.goal_names())?,
                fact_index: model.index_for(problem),
                evidence: BTreeSet::new(),
            }),
            None => None,
        };
        Ok(RecognitionSession {
            problem,
            tracker: plr.initial_tracker(),
            goals: plr.goal_names().into(),
            plr,
            nbm,
            w_nbm: config.w_nbm(),
            t: 0,
        })
    }

    pub fn plr_model(&self) -> &PlrModel {
        &self.plr
    }

    pub fn extraction_time(&self) -> Duration {
        self.plr.extraction_time()
    }

    pub fn goals(&self) -> &[String] {
        &self.goals
    }

    pub fn w_nbm(&self) -> f64 {
        self.w_nbm
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Snapshot of the current state.
    pub fn snapshot(&self) -> RecognitionSnapshot {
        self.assemble(Duration::ZERO, Duration::ZERO)
    }

    fn posterior(&self) -> Vec<f64> {
        match &self.nbm {
            Some(v) => v.model.posterior_indexed(&v.goals, &v.evidence),
            None => vec![1.0 / self.goals.len() as f64; self.goals.len()],
        }
    }

    fn assemble(&self, plr_elapsed: Duration, nbm_elapsed: Duration) -> RecognitionSnapshot {
        let started = Instant::now();
        let plr_scores = self.plr.scores(&self.tracker);
        let plr_dist = normalize_scores(&plr_scores);
        let plr_time = plr_elapsed + started.elapsed();
        let started = Instant::now();
        let nbm = self.posterior();
        let nbm_time = nbm_elapsed + started.elapsed();
        let hybrid = combine(&plr_dist, &nbm, self.w_nbm);
        RecognitionSnapshot {
            t: self.t,
            goals: self.goals.clone(),
            most_probable: argmax_set(&hybrid),
            plr_scores,
            plr_dist,
            nbm,
            hybrid,
            plr_time,
            nbm_time,
        }
    }

    /// Reveals one more observation.
    pub fn step(&mut self, action: ActionId) -> RecognitionSnapshot {
        let started = Instant::now();
        self.tracker.observe(&self.plr, self.problem, action);
        let plr_elapsed = started.elapsed();
        let started = Instant::now();
        if let Some(v) = &mut self.nbm {
            let a = self.problem.action(action);
            for f in a.pre.iter().chain(&a.add) {
                if let Some(i) = v.fact_index[f.index()] {
                    v.evidence.insert(i);
                }
            }
        }
        let nbm_elapsed = started.elapsed();
        self.t += 1;
        self.assemble(plr_elapsed, nbm_elapsed)
    }

    /// Resolves `text` against the problem's actions, then steps.
    pub fn step_text(&mut self, text: &str) -> Result<RecognitionSnapshot> {
        let a = self.problem.find_action(text)?;
        Ok(self.step(a))
    }

    /// Snapshots for t = 1..=T.
    pub fn run_online(&mut self, observations: &ObservationSequence) -> Vec<RecognitionSnapshot> {
        observations.steps.iter().map(|&a| self.step(a)).collect()
    }

    /// Steps through action names, stopping at the first unknown one. The
    /// snapshots produced so far are returned with the error.
    pub fn run_text<'s>(
        &mut self,
        lines: impl IntoIterator<Item = &'s str>,
    ) -> (Vec<RecognitionSnapshot>, Option<Error>) {
        let mut out = Vec::new();
        for line in lines {
            match self.step_text(line) {
                Ok(s) => out.push(s),
                Err(e) => return (out, Some(e)),
            }
        }
        (out, None)
    }
}

/// Snapshot for the first `prefix.len()` observations, recomputed from
/// scratch.
pub fn batch_snapshot(
    problem: &PlanningProblem,
    plr: &PlrModel,
    nbm: Option<&NbmModel>,
    config: &HybridConfig,
    prefix: &[ActionId],
) -> Result<RecognitionSnapshot> {
    let goals: Arc<[String]> = plr.goal_names().into();
    let plr_scores = plr.scores(&plr.tracker_for(problem, prefix));
    let plr_dist = normalize_scores(&plr_scores);
    let nbm_post = match nbm {
        Some(m) => {
            let indices = m.evidence_indices(&featurize(problem, prefix));
            m.posterior_indexed(&m.resolve_goals(&goals)?, &indices)
        }
        None => vec![1.0 / goals.len() as f64; goals.len()],
    };
    let hybrid = combine(&plr_dist, &nbm_post, config.w_nbm());
    Ok(RecognitionSnapshot {
        t: prefix.len(),
        goals,
        most_probable: argmax_set(&hybrid),
        plr_scores,
        plr_dist,
        nbm: nbm_post,
        hybrid,
        plr_time: Duration::ZERO,
        nbm_time: Duration::ZERO,
    })
}

/// CSV `t,goal,plr_score,plr_dist,nbm,hybrid,is_argmax,plr_ms,nbm_ms`.
pub fn snapshot_csv<'s>(snapshots: impl IntoIterator<Item = &'s RecognitionSnapshot>) -> String {
    let mut out = String::from("t,goal,plr_score,plr_dist,nbm,hybrid,is_argmax,plr_ms,nbm_ms\n");
    for s in snapshots {
        for (g, name) in s.goals.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{:.6},{:.6}",
                s.t,
                name,
                score_f64(&s.plr_scores[g]),
                s.plr_dist[g],
                s.nbm[g],
                s.hybrid[g],
                u8::from(s.most_probable.contains(&g)),
                s.plr_time.as_secs_f64() * 1e3,
                s.nbm_time.as_secs_f64() * 1e3
            )
            .unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{fact, GroundActionSpec, ProblemBuilder};

    #[test]
    fn weight_at_midpoint_and_limit() {
        assert!((weight_nbm(11.5, 0.7, 0.45, 11.5) - 0.35).abs() < 1e-12);
        assert!((weight_nbm(1000.0, 0.7, 0.45, 11.5) - 0.7).abs() < 1e-6);
        assert!(weight_nbm(0.0, 0.7, 0.45, 11.5) > 0.0);
    }

    #[test]
    fn normalization_falls_back_to_uniform() {
        assert_eq!(normalize_scores(&[Score::zero(), Score::zero()]), vec![0.5, 0.5]);
        assert_eq!(normalize_scores(&[Score::new(1, 4), Score::new(3, 4)]), vec![0.25, 0.75]);
    }

    #[test]
    fn combination_is_convex() {
        let h = combine(&[0.2, 0.8], &[0.6, 0.4], 0.25);
        assert!((h[0] - 0.3).abs() < 1e-12 && (h[1] - 0.7).abs() < 1e-12);
        assert_eq!(combine(&[0.5, 0.5], &[0.5, 0.5], 0.9), vec![0.5, 0.5]);
    }

    /// Hub c0-c1 with branches c1-a2-a3 and c1-b2-b3.
    fn fork() -> PlanningProblem {
        let mut b = ProblemBuilder::new();
        let at = |c: &str| fact("is-at", &[c]);
        b.init(at("c0"));
        for (x, y) in [("c0", "c1"), ("c1", "a2"), ("a2", "a3"), ("c1", "b2"), ("b2", "b3")] {
            b.action(GroundActionSpec::strips(format!("(move {x} {y})"), [at(x)], [at(y)], [at(x)]));
            b.action(GroundActionSpec::strips(format!("(move {y} {x})"), [at(y)], [at(x)], [at(y)]));
        }
        b.hypothesis("a3", [at("a3")]).hypothesis("b3", [at("b3")]);
        b.build().unwrap()
    }

    #[test]
    fn branch_entry_decides_the_goal() {
        let p = fork();
        let mut s = RecognitionSession::start(&p, p.hypotheses(), None, &HybridConfig::default()).unwrap();
        assert_eq!(s.snapshot().most_probable, vec![0, 1]);
        let snaps = s.run_text(["(move c0 c1)", "(move c1 b2)", "(move b2 b3)"]).0;
        assert_eq!(snaps[0].most_probable, vec![0, 1]);
        assert_eq!(snaps[1].most_probable, vec![1]);
        assert_eq!(snaps[2].most_probable, vec![1]);
        assert_eq!(snaps[2].plr_scores[1], Score::from_integer(1));
    }

    #[test]
    fn unknown_action_stops_with_partial_results() {
        let p = fork();
        let mut s = RecognitionSession::start(&p, p.hypotheses(), None, &HybridConfig::default()).unwrap();
        let (snaps, err) = s.run_text(["(move c0 c1)", "(jump c1 a3)", "(move c1 a2)"]);
        assert_eq!(snaps.len(), 1);
        assert!(matches!(err, Some(Error::UnknownAction(_))));
    }

    #[test]
    fn empty_goal_list_is_an_error() {
        let p = fork();
        assert!(matches!(RecognitionSession::start(&p, &[], None, &HybridConfig::default()), Err(Error::EmptyGoals)));
    }

    #[test]
    fn csv_lists_every_goal() {
        let p = fork();
        let mut s = RecognitionSession::start(&p, p.hypotheses(), None, &HybridConfig::default()).unwrap();
        let snap = s.step_text("(move c0 c1)").unwrap();
        let csv = snapshot_csv([&snap]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,a3,0.3333333333333333,0.5,0.5,0.5,1,"), "{}", lines[1]);
    }
}
