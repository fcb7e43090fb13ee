use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use goalrec::eval::experiment::{train_on, CSV_HEADER};
use goalrec::eval::synthetic::RecipeSpec;
use goalrec::eval::{
    default_lambda_grid, generate_gridworld, load_dataset, run_experiment, ExperimentConfig, GridSpec, Method,
};
use goalrec::landmarks::landmark_dump;
use goalrec::nbm::{NbmModel, DEFAULT_ALPHA};
use goalrec::online::{snapshot_csv, HybridConfig, RecognitionSession, DEFAULT_A, DEFAULT_B, DEFAULT_C};
use goalrec::recognizer::{Heuristic, ObservationSequence};
use goalrec::{load_problem, LandmarkExtractor, PlanningProblem};

#[derive(Parser)]
#[command(name = "goalrec", version, about = "Online goal recognition with planning landmarks and naive Bayes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the landmarks of every goal hypothesis.
    Extract {
        domain: PathBuf,
        problem: PathBuf,
        /// Also print the relaxed planning graph layers.
        #[arg(long)]
        rpg: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recognize one observation sequence online and print a snapshot CSV.
    Recognize {
        domain: PathBuf,
        problem: PathBuf,
        observations: PathBuf,
        /// Model written by `train-nbm`; without one the naive Bayes term is
        /// uniform.
        #[arg(long)]
        nbm: Option<PathBuf>,
        #[arg(long, default_value = "hybrid")]
        method: Method,
        #[command(flatten)]
        scoring: Scoring,
        /// Training-set size that sets the mixing weight.
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a naive Bayes model on every sequence of a manifest.
    TrainNbm {
        manifest: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validated accuracy over observation fractions, as CSV.
    Evaluate {
        manifest: PathBuf,
        #[arg(long, default_value = "hybrid")]
        method: Method,
        #[command(flatten)]
        scoring: Scoring,
        /// Training-set sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Observation fractions, comma separated.
        #[arg(long, value_delimiter = ',')]
        lambda_grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write grid-world PDDL and reference landmarks, or a recipe suite.
    GenGrid(GenGrid),
}

#[derive(Args)]
struct Scoring {
    #[arg(long, default_value = "completion")]
    heuristic: Heuristic,
    /// Keep initial-state landmarks in the scored sets.
    #[arg(long)]
    use_init_landmarks: bool,
    #[arg(long, default_value_t = DEFAULT_A)]
    a: f64,
    #[arg(long, default_value_t = DEFAULT_B)]
    b: f64,
    #[arg(long, default_value_t = DEFAULT_C)]
    c: f64,
}

impl Scoring {
    fn config(&self, n: usize, method: Method) -> HybridConfig {
        HybridConfig {
            a: self.a,
            b: self.b,
            c: self.c,
            heuristic: self.heuristic,
            n,
            use_init_landmarks: self.use_init_landmarks,
            weight_override: method.weight_override(),
        }
    }
}

#[derive(Args)]
struct GenGrid {
    /// Layout file with `room`, `cell`, `edge`, `init` and `goal` lines.
    #[arg(conflicts_with_all = ["flat", "recipes"], required_unless_present_any = ["flat", "recipes"])]
    layout: Option<PathBuf>,
    /// Use the built-in flat layout instead of a layout file.
    #[arg(long)]
    flat: bool,
    /// Write a synthetic recipe suite with this many goals instead.
    #[arg(long)]
    recipes: Option<usize>,
    /// Sequences per goal for `--recipes`.
    #[arg(long, default_value_t = 10)]
    sequences: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(domain: &Path, problem: &Path) -> Result<PlanningProblem> {
    load_problem(&read(domain)?, &read(problem)?)
        .with_context(|| format!("loading {} with {}", problem.display(), domain.display()))
}

fn extract(domain: &Path, problem: &Path, rpg: bool, out: Option<&Path>) -> Result<()> {
    let p = load(domain, problem)?;
    let ex = LandmarkExtractor::new(&p);
    let mut sets = Vec::new();
    for h in p.hypotheses() {
        match ex.extract(&h.facts) {
            Ok(ls) => sets.push((h.name.as_str(), ls)),
            Err(e) => log::warn!("goal {}: {e}", h.name),
        }
    }
    if sets.is_empty() {
        bail!("no goal hypothesis has landmarks");
    }
    let mut text = landmark_dump(&p, sets.iter().map(|(g, ls)| (*g, ls)));
    if rpg {
        text.push_str(&ex.rpg().dump(&p));
    }
    emit(out, &text)
}

fn gen_grid(args: &GenGrid) -> Result<()> {
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    if let Some(goals) = args.recipes {
        let spec = RecipeSpec { goals, sequences_per_goal: args.sequences, seed: args.seed, ..RecipeSpec::default() };
        spec.generate()?.write_to(&args.out)?;
        return Ok(());
    }
    let (spec, name) = match &args.layout {
        Some(path) => {
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("grid").to_string();
            (GridSpec::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))?, name)
        }
        None => (GridSpec::example_flat(), "flat".to_string()),
    };
    let world = generate_gridworld(&spec, &name)?;
    fs::write(args.out.join("domain.pddl"), &world.domain)?;
    fs::write(args.out.join("problem.pddl"), &world.problem)?;
    fs::write(args.out.join("landmarks.txt"), world.oracle_dump())?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract { domain, problem, rpg, out } => extract(&domain, &problem, rpg, out.as_deref()),
        Command::Recognize { domain, problem, observations, nbm, method, scoring, n, out } => {
            let p = load(&domain, &problem)?;
            let obs = ObservationSequence::parse(&p, &read(&observations)?)
                .with_context(|| format!("reading {}", observations.display()))?;
            let model = match nbm {
                Some(path) => {
                    Some(NbmModel::from_text(&read(&path)?).with_context(|| format!("reading {}", path.display()))?)
                }
                None => None,
            };
            let config = scoring.config(n, method);
            let mut session = RecognitionSession::start(&p, p.hypotheses(), model.as_ref(), &config)?;
            log::info!("landmark extraction took {:?}", session.extraction_time());
            let mut snapshots = vec![session.snapshot()];
            snapshots.extend(session.run_online(&obs));
            emit(out.as_deref(), &snapshot_csv(&snapshots))
        }
        Command::TrainNbm { manifest, alpha, out } => {
            let d = load_dataset(&manifest)?;
            let all: Vec<usize> = (0..d.len()).collect();
            emit(out.as_deref(), &train_on(&d, &all, alpha)?.to_text())
        }
        Command::Evaluate { manifest, method, scoring, n, seed, lambda_grid, alpha, out } => {
            let d = load_dataset(&manifest)?;
            let mut csv = format!("{CSV_HEADER}\n");
            for n in n {
                let config = ExperimentConfig {
                    method,
                    n,
                    seed,
                    hybrid: scoring.config(n, method),
                    alpha,
                    lambdas: lambda_grid.clone().unwrap_or_else(default_lambda_grid),
                };
                let result = run_experiment(&d, &config).with_context(|| format!("n = {n}"))?;
                for (i, why) in &result.failures {
                    log::warn!("entry {i} scored as wrong: {why}");
                }
                csv.push_str(&result.table.csv_rows());
            }
            emit(out.as_deref(), &csv)
        }
        Command::GenGrid(args) => gen_grid(&args),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
