//! Recognition datasets and their manifest files.
//!
//! A manifest lists one recognition problem per line:
//!
//! ```text
//! # domain        problem         observations     true-goal
//! domain.pddl     kitchen.pddl    obs/seq01.txt    tea
//! ```
//!
//! Paths are relative to the manifest's directory. Problems sharing the same
//! domain and problem files are parsed and grounded once.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ground::ground;
use crate::pddl::{parse_domain, parse_problem, LiftedModel};
use crate::problem::PlanningProblem;
use crate::recognizer::ObservationSequence;

#[derive(Debug, Clone)]
pub struct DatasetEntry {
    /// Index into [`RecognitionDataset::problems`].
    pub problem: usize,
    pub observations: ObservationSequence,
    pub true_goal: String,
}

#[derive(Debug, Clone, Default)]
pub struct RecognitionDataset {
    /// Grounded problems with a label naming their source.
    pub problems: Vec<(String, PlanningProblem)>,
    pub entries: Vec<DatasetEntry>,
}

impl RecognitionDataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_problem(&mut self, label: impl Into<String>, problem: PlanningProblem) -> usize {
        self.problems.push((label.into(), problem));
        self.problems.len() - 1
    }

    /// Adds a recognition problem after checking that the sequence is
    /// non-empty and the true goal is one of the problem's hypotheses.
    pub fn add_entry(&mut self, problem: usize, observations: ObservationSequence, true_goal: &str) -> Result<()> {
        let p = &self.problems[problem].1;
        if !p.hypotheses().iter().any(|h| h.name == true_goal) {
            return Err(Error::UnknownGoal(true_goal.to_string()));
        }
        if observations.is_empty() {
            return Err(Error::InvalidArgument("empty observation sequence".into()));
        }
        self.entries.push(DatasetEntry { problem, observations, true_goal: true_goal.to_string() });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn problem_of(&self, entry: usize) -> &PlanningProblem {
        &self.problems[self.entries[entry].problem].1
    }

    /// Every hypothesis name across all problems, sorted.
    pub fn goal_names(&self) -> Vec<String> {
        let names: BTreeSet<&str> =
            self.problems.iter().flat_map(|(_, p)| p.hypotheses().iter().map(|h| h.name.as_str())).collect();
        names.into_iter().map(String::from).collect()
    }
}

fn at(path: &Path, line: usize, e: Error) -> Error {
    Error::AtFile { path: path.to_path_buf(), line, inner: Box::new(e) }
}

/// Reads a manifest and everything it references. Errors of all entries
/// are collected before failing.
pub fn load_dataset(manifest: &Path) -> Result<RecognitionDataset> {
    let text = fs::read_to_string(manifest).map_err(|e| at(manifest, 0, e.into()))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut dataset = RecognitionDataset::new();
    let mut loaded: HashMap<(PathBuf, PathBuf), usize> = HashMap::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [domain, problem, obs, goal] = fields[..] else {
            errors.push(at(
                manifest,
                lineno,
                Error::InvalidArgument("expected `<domain> <problem> <observations> <true-goal>`".into()),
            ));
            continue;
        };
        let (domain, problem, obs) = (base.join(domain), base.join(problem), base.join(obs));
        if let Err(e) = load_entry(&mut dataset, &mut loaded, &domain, &problem, &obs, goal) {
            errors.push(at(manifest, lineno, e));
        }
    }
    match errors.len() {
        0 => Ok(dataset),
        1 => Err(errors.pop().unwrap()),
        _ => Err(Error::Many(errors)),
    }
}

fn load_entry(
    dataset: &mut RecognitionDataset,
    loaded: &mut HashMap<(PathBuf, PathBuf), usize>,
    domain: &Path,
    problem: &Path,
    obs: &Path,
    goal: &str,
) -> Result<()> {
    let key = (domain.to_path_buf(), problem.to_path_buf());
    let index = match loaded.get(&key) {
        Some(&i) => i,
        None => {
            let read = |p: &Path| fs::read_to_string(p).map_err(|e| at(p, 0, e.into()));
            let d = parse_domain(&read(domain)?).map_err(|e| in_file(domain, e))?;
            let pr = parse_problem(&read(problem)?, &d).map_err(|e| in_file(problem, e))?;
            let grounded = ground(&LiftedModel { domain: d, problem: pr }).map_err(|e| in_file(problem, e))?;
            let label = format!("{} {}", domain.display(), problem.display());
            let i = dataset.add_problem(label, grounded);
            loaded.insert(key, i);
            i
        }
    };
    let text = fs::read_to_string(obs).map_err(|e| at(obs, 0, e.into()))?;
    let observations = ObservationSequence::parse(&dataset.problems[index].1, &text).map_err(|e| locate(obs, e))?;
    dataset.add_entry(index, observations, goal)
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Syntax(pe) => at(path, pe.line, Error::Syntax(pe)),
        Error::Unsupported { line, .. } => at(path, line, e),
        other => at(path, 0, other),
    }
}

fn locate(path: &Path, e: Error) -> Error {
    match e {
        Error::AtLine { line, inner } => Error::AtFile { path: path.to_path_buf(), line, inner },
        Error::Many(es) => Error::Many(es.into_iter().map(|e| locate(path, e)).collect()),
        other => at(path, 0, other),
    }
}
