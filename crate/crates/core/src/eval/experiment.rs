//! Cross-validated accuracy sweeps over observation fractions.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::cv::make_cv_plan;
use crate::eval::dataset::RecognitionDataset;
use crate::eval::metrics::{accuracy, lenient_accuracy, ProblemOutcome};
use crate::nbm::{featurize, train, NbmModel, TrainingExample, DEFAULT_ALPHA};
use crate::online::{HybridConfig, RecognitionSession};
use crate::recognizer::PlrModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Plr,
    Nbm,
    Hybrid,
}

impl Method {
    /// Fixed mixing weight of the method, if any.
    pub fn weight_override(self) -> Option<f64> {
        match self {
            Method::Plr => Some(0.0),
            Method::Nbm => Some(1.0),
            Method::Hybrid => None,
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plr" => Ok(Method::Plr),
            "nbm" => Ok(Method::Nbm),
            "hybrid" => Ok(Method::Hybrid),
            _ => Err(Error::InvalidArgument(format!("unknown method `{s}`"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Plr => "plr",
            Method::Nbm => "nbm",
            Method::Hybrid => "hybrid",
        })
    }
}

/// 1 % to 5 % in steps of 1, then 10 % to 95 % in steps of 5.
pub fn default_lambda_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=5).map(|p| p as f64 / 100.0).collect();
    grid.extend((2..=19).map(|p| (p * 5) as f64 / 100.0));
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub method: Method,
    /// Training-set size per fold.
    pub n: usize,
    pub seed: u64,
    /// Weight parameters and landmark scoring options; `n` and the weight
    /// override are set from this config.
    pub hybrid: HybridConfig,
    pub alpha: f64,
    pub lambdas: Vec<f64>,
}

impl ExperimentConfig {
    pub fn new(method: Method, n: usize, seed: u64) -> Self {
        ExperimentConfig {
            method,
            n,
            seed,
            hybrid: HybridConfig::default(),
            alpha: DEFAULT_ALPHA,
            lambdas: default_lambda_grid(),
        }
    }

    fn session_config(&self) -> HybridConfig {
        HybridConfig { n: self.n, weight_override: self.method.weight_override(), ..self.hybrid.clone() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    pub lambda: f64,
    pub accuracy: f64,
    /// Counting ties that include the true goal as correct.
    pub lenient_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyTable {
    pub method: Method,
    pub n: usize,
    pub seed: u64,
    pub folds: usize,
    pub rows: Vec<AccuracyRow>,
}

pub const CSV_HEADER: &str = "method,n,lambda,accuracy,folds,seed";

impl AccuracyTable {
    /// Rows of `method,n,lambda,accuracy,folds,seed` without the header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            writeln!(out, "{},{},{},{:.6},{},{}", self.method, self.n, r.lambda, r.accuracy, self.folds, self.seed)
                .unwrap();
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{CSV_HEADER}\n{}", self.csv_rows())
    }

    pub fn accuracy_at(&self, lambda: f64) -> Option<f64> {
        self.rows.iter().find(|r| (r.lambda - lambda).abs() < 1e-12).map(|r| r.accuracy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    /// Strict accuracy per grid point.
    pub accuracy: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub table: AccuracyTable,
    pub folds: Vec<FoldResult>,
    /// Entries whose recognition failed, with the reason; they count as
    /// wrong at every fraction.
    pub failures: Vec<(usize, String)>,
}

/// Landmark models for every dataset problem, extracted once.
pub fn plr_models(
    dataset: &RecognitionDataset,
    config: &HybridConfig,
) -> Vec<std::result::Result<Arc<PlrModel>, String>> {
    dataset
        .problems
        .par_iter()
        .map(|(label, p)| {
            PlrModel::build(p, p.hypotheses(), config.heuristic, config.use_init_landmarks)
                .map(Arc::new)
                .map_err(|e| format!("{label}: {e}"))
        })
        .collect()
}

/// Recognizes one dataset entry online, producing the most-probable sets
/// for t = 0..=T.
pub fn recognize_entry(
    dataset: &RecognitionDataset,
    entry: usize,
    plr: &std::result::Result<Arc<PlrModel>, String>,
    nbm: Option<&NbmModel>,
    config: &HybridConfig,
) -> std::result::Result<ProblemOutcome, String> {
    let e = &dataset.entries[entry];
    let problem = dataset.problem_of(entry);
    let plr = plr.as_ref().map_err(Clone::clone)?;
    let true_goal = plr
        .goal_names()
        .iter()
        .position(|g| *g == e.true_goal)
        .ok_or_else(|| format!("true goal {} has no landmark model", e.true_goal))?;
    let mut session = RecognitionSession::with_model(problem, plr.clone(), nbm, config).map_err(|e| e.to_string())?;
    let mut most_probable = Vec::with_capacity(e.observations.len() + 1);
    most_probable.push(session.snapshot().most_probable);
    for &a in &e.observations.steps {
        most_probable.push(session.step(a).most_probable);
    }
    Ok(ProblemOutcome { true_goal, most_probable })
}

/// Trains the naive Bayes model on the full sequences of `train_entries`.
pub fn train_on(dataset: &RecognitionDataset, train_entries: &[usize], alpha: f64) -> Result<NbmModel> {
    let examples: Vec<TrainingExample> = train_entries
        .iter()
        .map(|&i| TrainingExample {
            evidence: featurize(dataset.problem_of(i), &dataset.entries[i].observations.steps),
            goal: dataset.entries[i].true_goal.clone(),
        })
        .collect();
    let mut problems: Vec<usize> = train_entries.iter().map(|&i| dataset.entries[i].problem).collect();
    problems.sort_unstable();
    problems.dedup();
    let universe = problems.iter().flat_map(|&p| dataset.problems[p].1.facts().iter().cloned());
    train(&examples, &dataset.goal_names(), alpha, universe)
}

/// Runs the protocol: one fold per training partition, online recognition
/// of every validation entry, and accuracy averaged over all validated
/// (fold, entry) pairs at each grid point.
pub fn run_experiment(dataset: &RecognitionDataset, config: &ExperimentConfig) -> Result<ExperimentResult> {
    if let Some(l) = config.lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::InvalidArgument(format!("observation fraction {l} outside [0, 1]")));
    }
    let session_config = config.session_config();
    session_config.validate()?;
    let plan = make_cv_plan(dataset.len(), config.n, config.seed)?;
    let plr = plr_models(dataset, &session_config);

    // Without the naive Bayes term the outcome of an entry does not depend
    // on the fold.
    let shared: Option<Vec<std::result::Result<ProblemOutcome, String>>> = (config.method == Method::Plr).then(|| {
        (0..dataset.len())
            .into_par_iter()
            .map(|i| recognize_entry(dataset, i, &plr[dataset.entries[i].problem], None, &session_config))
            .collect()
    });

    let per_fold: Vec<Vec<std::result::Result<ProblemOutcome, String>>> = plan
        .folds
        .par_iter()
        .map(|fold| -> Result<Vec<_>> {
            if let Some(shared) = &shared {
                return Ok(fold.validation.iter().map(|&i| shared[i].clone()).collect());
            }
            let model = train_on(dataset, &fold.train, config.alpha)?;
            Ok(fold
                .validation
                .par_iter()
                .map(|&i| recognize_entry(dataset, i, &plr[dataset.entries[i].problem], Some(&model), &session_config))
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut failures = Vec::new();
    let mut all = Vec::new();
    let mut folds = Vec::new();
    for (fold, results) in plan.folds.iter().zip(per_fold) {
        let mut outcomes = Vec::with_capacity(results.len());
        for (&i, r) in fold.validation.iter().zip(results) {
            match r {
                Ok(o) => outcomes.push(o),
                Err(msg) => {
                    if !failures.iter().any(|(j, _)| *j == i) {
                        log::warn!("entry {i} failed: {msg}");
                        failures.push((i, msg));
                    }
                    outcomes.push(ProblemOutcome::failed());
                }
            }
        }
        folds.push(FoldResult {
            train: fold.train.clone(),
            validation: fold.validation.clone(),
            accuracy: config.lambdas.iter().map(|&l| accuracy(&outcomes, l)).collect(),
        });
        all.extend(outcomes);
    }
    failures.sort();
    let rows = config
        .lambdas
        .iter()
        .map(|&lambda| AccuracyRow {
            lambda,
            accuracy: accuracy(&all, lambda),
            lenient_accuracy: lenient_accuracy(&all, lambda),
        })
        .collect();
    Ok(ExperimentResult {
        table: AccuracyTable { method: config.method, n: config.n, seed: config.seed, folds: plan.folds.len(), rows },
        folds,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_grid_ticks() {
        let g = default_lambda_grid();
        assert_eq!(g.len(), 23);
        assert_eq!(g[..6], [0.01, 0.02, 0.03, 0.04, 0.05, 0.10]);
        assert_eq!(*g.last().unwrap(), 0.95);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Plr, Method::Nbm, Method::Hybrid] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("rg".parse::<Method>().is_err());
    }
}
