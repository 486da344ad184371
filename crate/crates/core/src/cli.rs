//! Command-line surface.
//!
//! Every command builds a resolved [`RunConfig`], runs, and emits a JSON
//! envelope (config echoed alongside the result) and a text table. With
//! `--out DIR` both are written to `DIR/<command>.json` and
//! `DIR/<command>.txt`; stdout gets whichever `--format` selects.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | bad command line (reported by the argument parser) |
//! | 3 | file could not be read or written |
//! | 4 | malformed or invalid input data |
//! | 5 | invalid option, configuration or model artifact |
//! | 6 | data cannot support the requested computation |

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::artifact::{self, ModelArtifact};
use crate::corpus::{self, Corpus};
use crate::error::{Error, Result};
use crate::eval::{self, Averaging, ExperimentConfig, PreparedCourse};
use crate::features::{FeatureGroups, PreparedThread};
use crate::model;
use crate::report::{self, Envelope};
use crate::syngen::{self, CorpusSpec};
use crate::textprep::{TextConfig, TextProcessor};

#[derive(Debug, Parser)]
#[command(name = "intervene", version, about = "Predict instructor intervention in MOOC forum threads")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Thread corpus, one JSON thread per line
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Experiment config JSON; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Text-processing config JSON (stopwords and patterns)
    #[arg(long, global = true)]
    pub text_config: Option<PathBuf>,
    /// Comma-separated feature groups, or "all"
    #[arg(long, global = true)]
    pub features: Option<FeatureGroups>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// L1 strength; defaults to 1 / training instances
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub w_min: Option<f64>,
    #[arg(long, global = true)]
    pub w_max: Option<f64>,
    /// Worker threads; results do not depend on it
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Directory for the JSON report and text table
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Omit the wall-clock timestamp so reruns are byte-identical
    #[arg(long, global = true)]
    pub fixed_clock: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Thread, post and intervention counts per course and forum type
    Stats,
    /// Train on the whole corpus and write a model artifact
    Train {
        /// Artifact path; defaults to OUT/model.json or ./model.json
        #[arg(long)]
        model: Option<PathBuf>,
        /// Use this class weight instead of tuning it
        #[arg(long)]
        w: Option<f64>,
    },
    /// Probability and label for every thread
    Predict {
        #[arg(long)]
        model: PathBuf,
    },
    /// Threads by descending probability
    Rank {
        #[arg(long)]
        model: PathBuf,
        /// Keep only the first N threads
        #[arg(long)]
        top: Option<usize>,
    },
    /// Per-course stratified k-fold cross validation
    Cv {
        #[arg(long)]
        folds: Option<usize>,
        /// Average pooled confusion counts instead of per-fold metrics
        #[arg(long)]
        pooled: bool,
        /// Oversample each course's intervened threads up to the corpus density
        #[arg(long)]
        oversample: bool,
    },
    /// Leave-one-course-out cross validation
    Loocv,
    /// Additive and ablative feature study
    Ablate,
    /// All-positive baseline per course
    Baseline {
        /// Also run an experiment and show its F1 next to the baseline
        #[arg(long, value_enum)]
        with_model: Option<Learned>,
    },
    /// Validation F1 over the class-weight grid on a stratified split
    Tune,
    /// Pairwise Cohen's kappa between annotators
    Kappa {
        #[arg(long)]
        annotations: PathBuf,
        /// Restrict to items carrying this tag
        #[arg(long)]
        tag: Option<String>,
    },
    /// Generate a synthetic corpus
    Synth {
        /// Generator spec JSON; defaults to the 14-course reference layout
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Where to write the corpus; defaults to OUT/corpus.jsonl
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Learned {
    Cv,
    Loocv,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Stats => "stats",
            Command::Train { .. } => "train",
            Command::Predict { .. } => "predict",
            Command::Rank { .. } => "rank",
            Command::Cv { .. } => "cv",
            Command::Loocv => "loocv",
            Command::Ablate => "ablate",
            Command::Baseline { .. } => "baseline",
            Command::Tune => "tune",
            Command::Kappa { .. } => "kappa",
            Command::Synth { .. } => "synth",
        }
    }
}

/// Everything a run depends on, echoed into its report. Worker count and
/// output directory are left out: they do not change results.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub corpus: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub text: TextConfig,
    pub experiment: ExperimentConfig,
    pub options: serde_json::Value,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => 3,
        Error::Parse { .. } | Error::Validation(_) | Error::EmptyCorpus | Error::Json(_) => 4,
        Error::InvalidArgument(_)
        | Error::Pattern { .. }
        | Error::ArtifactVersion { .. }
        | Error::DimensionMismatch { .. } => 5,
        Error::SingleClass
        | Error::NonFinite(_)
        | Error::NoPositives
        | Error::TooFewThreads { .. }
        | Error::UnreachableDensity(_)
        | Error::DegenerateVariance => 6,
    }
}

/// Applies the config file, then command-line overrides.
pub fn resolve_experiment(g: &GlobalArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(f) = g.features {
        cfg.features = f;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(l) = g.lambda {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidArgument(format!("--lambda must be positive, got {l}")));
        }
        cfg.lambda = Some(l);
    }
    if let Some(w) = g.w_min {
        cfg.w_grid.min = w;
    }
    if let Some(w) = g.w_max {
        cfg.w_grid.max = w;
    }
    cfg.w_grid.validate()?;
    Ok(cfg)
}

fn load_text(g: &GlobalArgs) -> Result<TextConfig> {
    match &g.text_config {
        Some(p) => TextConfig::load(p),
        None => Ok(TextConfig::default()),
    }
}

fn need_corpus(g: &GlobalArgs) -> Result<Corpus> {
    let path = g
        .corpus
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("this command needs --corpus".into()))?;
    corpus::load_corpus(path)
}

/// A finished command: JSON envelope and text rendering.
#[derive(Debug, Clone)]
pub struct Output {
    pub command: String,
    pub json: String,
    pub table: String,
}

fn output<R: Serialize>(run: &RunConfig, g: &GlobalArgs, result: &R, table: String) -> Result<Output> {
    Ok(Output {
        command: run.command.clone(),
        json: Envelope::new(&run.command, run, result, g.fixed_clock).to_json()?,
        table,
    })
}

fn prepared(corpus: &Corpus, text: &TextConfig) -> Result<Vec<PreparedCourse>> {
    Ok(eval::prepare_corpus(corpus, &TextProcessor::new(text.clone())?))
}

fn scores_table(scores: &[artifact::ThreadScore]) -> String {
    let mut t = report::Table::new(["Thread", "Probability", "Label", "Gold"]);
    for s in scores {
        t.row([
            format!("{}/{}", s.course_id, s.thread_id),
            format!("{:.4}", s.probability),
            s.label.to_string(),
            s.gold.to_string(),
        ]);
    }
    t.render()
}

/// Runs one command without touching stdout or the output directory.
pub fn execute(cli: &Cli) -> Result<Output> {
    let g = &cli.global;
    let experiment = resolve_experiment(g)?;
    let text = load_text(g)?;
    let mut run = RunConfig {
        command: cli.command.name().to_string(),
        corpus: g.corpus.clone(),
        config: g.config.clone(),
        text,
        experiment,
        options: serde_json::Value::Null,
    };
    match &cli.command {
        Command::Stats => {
            let stats = corpus::compute_stats(&need_corpus(g)?);
            output(&run, g, &stats, report::stats_table(&stats))
        }
        Command::Train { model, w } => {
            let corpus = need_corpus(g)?;
            if let Some(w) = w {
                run.experiment.fixed_w = Some(*w);
            }
            let path = model.clone().unwrap_or_else(|| match &g.out {
                Some(dir) => dir.join("model.json"),
                None => PathBuf::from("model.json"),
            });
            run.options = serde_json::json!({ "model": path });
            let prep = TextProcessor::new(run.text.clone())?;
            let art = artifact::train_artifact(&corpus, &run.experiment, &prep)?;
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            art.save(&path)?;
            let summary = serde_json::json!({
                "model": path,
                "features": art.features,
                "dim": art.model.dim(),
                "nonzero_weights": art.model.n_nonzero(),
                "lambda": art.lambda,
                "w": art.w,
                "constant": art.constant,
                "notes": art.notes,
            });
            let table = format!(
                "wrote {}\nfeatures {}  dim {}  nonzero {}  lambda {:.3e}  W {:.4}\n",
                path.display(),
                art.features,
                art.model.dim(),
                art.model.n_nonzero(),
                art.lambda,
                art.w
            );
            output(&run, g, &summary, table)
        }
        Command::Predict { model } => {
            let art = ModelArtifact::load(model)?;
            run.options = serde_json::json!({ "model": model });
            run.text = art.text.clone();
            run.experiment.features = art.features;
            let scores = artifact::score_corpus(&art, &need_corpus(g)?)?;
            output(&run, g, &scores, scores_table(&scores))
        }
        Command::Rank { model, top } => {
            let art = ModelArtifact::load(model)?;
            run.options = serde_json::json!({ "model": model, "top": top });
            run.text = art.text.clone();
            run.experiment.features = art.features;
            let mut ranked = artifact::rank(artifact::score_corpus(&art, &need_corpus(g)?)?);
            if let Some(n) = top {
                ranked.truncate(*n);
            }
            output(&run, g, &ranked, scores_table(&ranked))
        }
        Command::Cv {
            folds,
            pooled,
            oversample,
        } => {
            if let Some(k) = folds {
                run.experiment.folds = *k;
            }
            if *pooled {
                run.experiment.averaging = Averaging::Pooled;
            }
            run.options = serde_json::json!({ "oversample": oversample });
            let mut corpus = need_corpus(g)?;
            if *oversample {
                corpus = oversample_corpus(&corpus, run.experiment.seed)?;
            }
            let courses = prepared(&corpus, &run.text)?;
            let r = eval::cross_validate_corpus(&courses, &run.experiment)?;
            output(&run, g, &r, report::experiment_table(&r))
        }
        Command::Loocv => {
            let courses = prepared(&need_corpus(g)?, &run.text)?;
            let r = eval::loo_course_cv(&courses, &run.experiment)?;
            output(&run, g, &r, report::experiment_table(&r))
        }
        Command::Ablate => {
            let courses = prepared(&need_corpus(g)?, &run.text)?;
            let rows = eval::feature_study(&courses, &run.experiment)?;
            output(&run, g, &rows, report::study_table(&rows))
        }
        Command::Baseline { with_model } => {
            run.options = serde_json::json!({ "with_model": with_model });
            let courses = prepared(&need_corpus(g)?, &run.text)?;
            let learned = match with_model {
                Some(Learned::Cv) => Some(eval::cross_validate_corpus(&courses, &run.experiment)?),
                Some(Learned::Loocv) => Some(eval::loo_course_cv(&courses, &run.experiment)?),
                None => None,
            };
            let r = eval::baseline_report(&courses, learned.as_ref())?;
            output(&run, g, &r, report::baseline_table(&r))
        }
        Command::Tune => {
            let courses = prepared(&need_corpus(g)?, &run.text)?;
            let r = tune_corpus(&courses, &run.experiment)?;
            output(&run, g, &r, report::tuning_table(&r))
        }
        Command::Kappa { annotations, tag } => {
            run.options = serde_json::json!({ "annotations": annotations, "tag": tag });
            let text = std::fs::read_to_string(annotations).map_err(|e| Error::io(annotations, e))?;
            let set: eval::AnnotationSet = serde_json::from_str(&text)?;
            let r = eval::kappa(&set, tag.as_deref())?;
            output(&run, g, &r, report::kappa_table(&r))
        }
        Command::Synth { spec, output: path } => {
            let mut s = match spec {
                Some(p) => CorpusSpec::load(p)?,
                None => syngen::default_d14_like_spec(),
            };
            s.seed = run.experiment.seed;
            let path = path.clone().unwrap_or_else(|| match &g.out {
                Some(dir) => dir.join("corpus.jsonl"),
                None => PathBuf::from("corpus.jsonl"),
            });
            run.options = serde_json::json!({ "spec": s, "output": path });
            let corpus = syngen::generate(&s)?;
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            corpus::save_corpus(&corpus, &path)?;
            let stats = corpus::compute_stats(&corpus);
            let table = format!("wrote {}\n{}", path.display(), report::stats_table(&stats));
            output(&run, g, &stats, table)
        }
    }
}

/// Oversamples every course below the corpus-wide intervention density.
pub fn oversample_corpus(corpus: &Corpus, seed: u64) -> Result<Corpus> {
    let stats = corpus::compute_stats(corpus);
    let target = stats.total.ratio;
    let courses = corpus
        .courses
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if c.intervention_ratio() >= target || c.n_intervened() == 0 {
                Ok(c.clone())
            } else {
                corpus::oversample_to_density(c, target, eval::derive_seed(seed, i as u64))
            }
        })
        .collect::<Result<_>>()?;
    Ok(Corpus { courses })
}

/// Tunes W on a stratified split of all threads pooled.
pub fn tune_corpus(courses: &[PreparedCourse], cfg: &ExperimentConfig) -> Result<model::Tuning> {
    let threads: Vec<&PreparedThread> = courses.iter().flat_map(|c| c.threads.iter()).collect();
    if threads.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let labels: Vec<bool> = threads.iter().map(|t| t.label).collect();
    let (fit_idx, val_idx) = eval::stratified_split(&labels, cfg.validation_frac, cfg.seed);
    let fit: Vec<&PreparedThread> = fit_idx.iter().map(|&i| threads[i]).collect();
    let val: Vec<&PreparedThread> = val_idx.iter().map(|&i| threads[i]).collect();
    let space = crate::features::FeatureSpace::fit(&fit, cfg.features, cfg.df_min)?;
    let encode = |ts: &[&PreparedThread]| -> Result<model::Dataset> {
        let mut d = model::Dataset::new(space.dim());
        for t in ts {
            d.push(&space.encode(t).to_sparse(), t.label)?;
        }
        Ok(d)
    };
    let (fit_data, val_data) = (encode(&fit)?, encode(&val)?);
    if fit_data.labels().iter().all(|&y| y == fit_data.labels()[0]) {
        return Err(Error::SingleClass);
    }
    model::tune_class_weight(&fit_data, &val_data, &cfg.train_config(fit_data.len(), 1.0), &cfg.w_grid)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Runs a command: writes report files under `--out` when given, and
/// prints the selected format.
pub fn run(cli: &Cli, stdout: &mut impl Write) -> Result<()> {
    let out = match cli.global.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("--jobs: {e}")))?
            .install(|| execute(cli))?,
        None => execute(cli)?,
    };
    if let Some(dir) = &cli.global.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_file(&dir.join(format!("{}.json", out.command)), &out.json)?;
        write_file(&dir.join(format!("{}.txt", out.command)), &out.table)?;
    }
    let text = match cli.global.format {
        Format::Json => &out.json,
        Format::Table => &out.table,
    };
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}
