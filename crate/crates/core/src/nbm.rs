//! Bernoulli naive Bayes over observable facts.
//!
//! Every vocabulary fact is one binary feature: true iff it occurs in the
//! flattened precondition or add list of some observed action. Parameters
//! are Laplace-smoothed counts and the prior over goals is uniform.
//! Log-likelihoods are accumulated in vocabulary order so that the same
//! evidence always yields bit-identical posteriors.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result};
use crate::problem::{ActionId, FactId, GroundFact, PlanningProblem};
use crate::recognizer::observed_facts;

pub const DEFAULT_ALPHA: f64 = 1.0;
const FORMAT_HEADER: &str = "nbm-v1";

/// Facts observed to be true; everything else in the vocabulary is false.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactEvidence {
    pub true_facts: BTreeSet<GroundFact>,
}

/// Evidence revealed by a sequence of observed actions.
pub fn featurize(problem: &PlanningProblem, observations: &[ActionId]) -> FactEvidence {
    let ids: BTreeSet<FactId> = observations.iter().flat_map(|&o| observed_facts(problem, o)).collect();
    FactEvidence { true_facts: ids.into_iter().map(|f| problem.fact(f).clone()).collect() }
}

/// One labelled training sequence, already featurized.
#[derive(Debug, Clone)]
pub struct TrainingExample {
    pub evidence: FactEvidence,
    pub goal: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbmModel {
    goals: Vec<String>,
    prior: Vec<f64>,
    vocabulary: Vec<GroundFact>,
    /// `cpt[g][i]`: P(vocabulary[i] true | goals[g]).
    cpt: Vec<Vec<f64>>,
    /// `Σ_i ln(1 - cpt[g][i])`: log-likelihood of all-false evidence.
    base: Vec<f64>,
    /// `ln cpt[g][i] - ln(1 - cpt[g][i])`.
    delta: Vec<Vec<f64>>,
    index: HashMap<GroundFact, usize>,
}

/// Trains on `examples`. The vocabulary is every fact seen in training
/// plus `extra_vocabulary` (usually the problems' fact universes).
pub fn train(
    examples: &[TrainingExample],
    goals: &[String],
    alpha: f64,
    extra_vocabulary: impl IntoIterator<Item = GroundFact>,
) -> Result<NbmModel> {
    if goals.is_empty() {
        return Err(Error::EmptyGoals);
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("smoothing pseudo-count must be positive, got {alpha}")));
    }
    let goal_index: HashMap<&str, usize> = goals.iter().enumerate().map(|(i, g)| (g.as_str(), i)).collect();
    if goal_index.len() != goals.len() {
        return Err(Error::InvalidArgument("duplicate goal names".into()));
    }
    let mut vocab: BTreeSet<GroundFact> = extra_vocabulary.into_iter().collect();
    for ex in examples {
        vocab.extend(ex.evidence.true_facts.iter().cloned());
    }
    let vocabulary: Vec<GroundFact> = vocab.into_iter().collect();
    let index: HashMap<GroundFact, usize> = vocabulary.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();

    let mut sequences = vec![0usize; goals.len()];
    let mut counts = vec![vec![0usize; vocabulary.len()]; goals.len()];
    for ex in examples {
        let g = *goal_index.get(ex.goal.as_str()).ok_or_else(|| Error::UnknownGoal(ex.goal.clone()))?;
        sequences[g] += 1;
        for f in &ex.evidence.true_facts {
            counts[g][index[f]] += 1;
        }
    }
    let cpt = counts
        .iter()
        .zip(&sequences)
        .map(|(row, &m)| row.iter().map(|&c| (c as f64 + alpha) / (m as f64 + 2.0 * alpha)).collect())
        .collect();
    let prior = vec![1.0 / goals.len() as f64; goals.len()];
    Ok(NbmModel::assemble(goals.to_vec(), prior, vocabulary, cpt))
}

impl NbmModel {
    fn assemble(goals: Vec<String>, prior: Vec<f64>, vocabulary: Vec<GroundFact>, cpt: Vec<Vec<f64>>) -> Self {
        let base = cpt.iter().map(|row| row.iter().map(|p| (1.0 - p).ln()).sum()).collect();
        let delta = cpt.iter().map(|row| row.iter().map(|p| p.ln() - (1.0 - p).ln()).collect()).collect();
        let index = vocabulary.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        NbmModel { goals, prior, vocabulary, cpt, base, delta, index }
    }

    pub fn goals(&self) -> &[String] {
        &self.goals
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn vocabulary(&self) -> &[GroundFact] {
        &self.vocabulary
    }

    pub fn goal_index(&self, name: &str) -> Option<usize> {
        self.goals.iter().position(|g| g == name)
    }

    /// P(fact true | goal).
    pub fn cpt(&self, fact: &GroundFact, goal: &str) -> Option<f64> {
        Some(self.cpt[self.goal_index(goal)?][*self.index.get(fact)?])
    }

    pub fn vocabulary_index(&self, fact: &GroundFact) -> Option<usize> {
        self.index.get(fact).copied()
    }

    /// Vocabulary position of each fact of `problem`, if any.
    pub fn index_for(&self, problem: &PlanningProblem) -> Vec<Option<usize>> {
        problem.facts().iter().map(|f| self.vocabulary_index(f)).collect()
    }

    /// Log of prior times likelihood for goal `g`, given the sorted
    /// vocabulary indices of the true facts.
    pub fn log_joint(&self, g: usize, true_indices: &BTreeSet<usize>) -> f64 {
        let mut acc = self.prior[g].ln() + self.base[g];
        for &i in true_indices {
            acc += self.delta[g][i];
        }
        acc
    }

    /// Posterior over `goals` (a subset of the model's goals), normalized
    /// over that subset.
    pub fn posterior_indexed(&self, goals: &[usize], true_indices: &BTreeSet<usize>) -> Vec<f64> {
        let logs: Vec<f64> = goals.iter().map(|&g| self.log_joint(g, true_indices)).collect();
        normalize_log(&logs)
    }

    /// Posterior over all model goals; evidence outside the vocabulary is
    /// ignored.
    pub fn posterior(&self, evidence: &FactEvidence) -> Vec<f64> {
        let all: Vec<usize> = (0..self.goals.len()).collect();
        self.posterior_indexed(&all, &self.evidence_indices(evidence))
    }

    pub fn evidence_indices(&self, evidence: &FactEvidence) -> BTreeSet<usize> {
        evidence.true_facts.iter().filter_map(|f| self.vocabulary_index(f)).collect()
    }

    /// Model indices of `names`, failing on the first unknown goal.
    pub fn resolve_goals(&self, names: &[String]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.goal_index(n).ok_or_else(|| Error::UnknownGoal(n.clone()))).collect()
    }

    /// `nbm-v1` text: goal lines in model order, then one cpt line per
    /// (fact, goal) in vocabulary order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{FORMAT_HEADER}").unwrap();
        for (g, p) in self.goals.iter().zip(&self.prior) {
            writeln!(out, "goal {g} {p:?}").unwrap();
        }
        for (i, f) in self.vocabulary.iter().enumerate() {
            for (g, name) in self.goals.iter().enumerate() {
                writeln!(out, "cpt {f} {name} {:?}", self.cpt[g][i]).unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Syntax(ParseError::new(line, 1, msg));
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == FORMAT_HEADER => {}
            Some((i, _)) => return Err(err(i + 1, format!("expected `{FORMAT_HEADER}` header"))),
            None => return Err(err(1, "empty model file".into())),
        }
        let mut goals = Vec::new();
        let mut prior = Vec::new();
        let mut entries: BTreeMap<GroundFact, BTreeMap<usize, f64>> = BTreeMap::new();
        for (i, raw) in lines {
            let lineno = i + 1;
            let line = raw.trim();
            let parse_p = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .ok()
                    .filter(|p| (0.0..=1.0).contains(p))
                    .ok_or_else(|| err(lineno, format!("bad probability `{s}`")))
            };
            if let Some(rest) = line.strip_prefix("goal ") {
                let (name, p) =
                    rest.trim().rsplit_once(' ').ok_or_else(|| err(lineno, "expected `goal <name> <prior>`".into()))?;
                goals.push(name.trim().to_string());
                prior.push(parse_p(p.trim())?);
            } else if let Some(rest) = line.strip_prefix("cpt ") {
                let close = rest.find(')').ok_or_else(|| err(lineno, "expected a parenthesized fact".into()))?;
                let fact = GroundFact::parse(&rest[..=close]).map_err(|_| err(lineno, "bad fact".into()))?;
                let mut tail = rest[close + 1..].split_whitespace();
                let (Some(goal), Some(p), None) = (tail.next(), tail.next(), tail.next()) else {
                    return Err(err(lineno, "expected `cpt <fact> <goal> <p_true>`".into()));
                };
                let g = goals
                    .iter()
                    .position(|n| n == goal)
                    .ok_or_else(|| err(lineno, format!("undeclared goal `{goal}`")))?;
                let p = parse_p(p)?;
                if entries.entry(fact).or_default().insert(g, p).is_some() {
                    return Err(err(lineno, "duplicate cpt entry".into()));
                }
            } else {
                return Err(err(lineno, format!("unrecognized line `{line}`")));
            }
        }
        if goals.is_empty() {
            return Err(Error::EmptyGoals);
        }
        let sum: f64 = prior.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("goal priors sum to {sum}")));
        }
        let vocabulary: Vec<GroundFact> = entries.keys().cloned().collect();
        let mut cpt = vec![Vec::with_capacity(vocabulary.len()); goals.len()];
        for (f, row) in &entries {
            if row.len() != goals.len() {
                return Err(Error::InvalidArgument(format!("incomplete cpt rows for {f}")));
            }
            for (g, p) in row {
                cpt[*g].push(*p);
            }
        }
        Ok(NbmModel::assemble(goals, prior, vocabulary, cpt))
    }
}

/// Exponentiates and normalizes log-weights, shifting by the maximum.
pub fn normalize_log(logs: &[f64]) -> Vec<f64> {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return vec![1.0 / logs.len() as f64; logs.len()];
    }
    let exps: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.iter().map(|e| e / total).collect()
}
