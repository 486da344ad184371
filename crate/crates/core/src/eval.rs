//! Evaluation harness: metrics, seeded stratified splits, per-course
//! k-fold cross-validation, leave-one-course-out cross-validation, the
//! feature study, the all-positive baseline, correlation and annotator
//! agreement.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{label_thread, Corpus, Course, Thread};
use crate::error::{Error, Result};
use crate::features::{FeatureGroup, FeatureGroups, FeatureSpace, PreparedThread};
use crate::model::{self, Dataset, ModelParams, Prediction, TrainConfig, WGrid};
use crate::textprep::TextProcessor;

/// Confusion counts and the metrics derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn safe_div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

impl Metrics {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let precision = safe_div(tp as f64, (tp + fp) as f64);
        let recall = safe_div(tp as f64, (tp + fn_) as f64);
        let f1 = safe_div(2.0 * precision * recall, precision + recall);
        Metrics {
            tp,
            fp,
            fn_,
            tn,
            precision,
            recall,
            f1,
        }
    }
}

pub fn compute_metrics(predictions: &[bool], gold: &[bool]) -> Result<Metrics> {
    if predictions.len() != gold.len() {
        return Err(Error::InvalidArgument(format!(
            "{} predictions for {} gold labels",
            predictions.len(),
            gold.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::InvalidArgument("no instances to score".into()));
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&p, &g) in predictions.iter().zip(gold) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    Ok(Metrics::from_counts(tp, fp, fn_, tn))
}

/// Metrics of predicting every instance positive; F1 is `2p / (1 + p)`
/// for positive proportion `p`.
pub fn all_positive_baseline(gold: &[bool]) -> Result<Metrics> {
    compute_metrics(&vec![true; gold.len()], gold)
}

/// Mixes a stream index into a seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn shuffled_by_class(labels: &[bool], rng: &mut ChaCha8Rng) -> [Vec<usize>; 2] {
    let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    pos.shuffle(rng);
    neg.shuffle(rng);
    [pos, neg]
}

/// Seeded split of indices into `(train, test)`, stratified by label. Each
/// class sends `round(n · test_frac)` members to test, but a class with at
/// least two members keeps at least one on each side.
pub fn stratified_split(labels: &[bool], test_frac: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in shuffled_by_class(labels, &mut rng) {
        let n = class.len();
        let mut n_test = (n as f64 * test_frac).round() as usize;
        if n >= 2 {
            n_test = n_test.clamp(1, n - 1);
        } else {
            n_test = 0;
        }
        test.extend_from_slice(&class[..n_test]);
        train.extend_from_slice(&class[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Seeded stratified k-fold assignment; returns the test indices of each
/// fold. Folds partition `0..labels.len()` and differ in size by at most one.
pub fn stratified_folds(labels: &[bool], k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let [pos, neg] = shuffled_by_class(labels, &mut rng);
    for (n, i) in pos.into_iter().chain(neg).enumerate() {
        folds[n % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    folds
}

#[derive(Debug, Clone, PartialEq)]
pub struct CourseSplit {
    pub train: Vec<Thread>,
    pub test: Vec<Thread>,
    /// Fit/validation partition of `train`, as indices into it.
    pub fit: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Seeded 80/20-style train/test split of a course, stratified by label,
/// with the training part further divided 75/25 into fit and validation.
pub fn split_course(course: &Course, train_frac: f64, seed: u64) -> Result<CourseSplit> {
    if course.threads.len() < 5 {
        return Err(Error::TooFewThreads {
            needed: 5,
            got: course.threads.len(),
        });
    }
    let labels: Vec<bool> = course.threads.iter().map(label_thread).collect();
    let (train_idx, test_idx) = stratified_split(&labels, 1.0 - train_frac, seed);
    let train_labels: Vec<bool> = train_idx.iter().map(|&i| labels[i]).collect();
    let (fit, validation) = stratified_split(&train_labels, 0.25, derive_seed(seed, 1));
    Ok(CourseSplit {
        train: train_idx.iter().map(|&i| course.threads[i].clone()).collect(),
        test: test_idx.iter().map(|&i| course.threads[i].clone()).collect(),
        fit,
        validation,
    })
}

/// How per-fold results combine into a course result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Mean of per-fold precision, recall and F1.
    #[default]
    Folds,
    /// Metrics of the summed confusion counts.
    Pooled,
}

/// Everything an experiment needs besides the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub features: FeatureGroups,
    /// L1 strength; `None` means 1 / number of training instances.
    pub lambda: Option<f64>,
    pub max_iters: usize,
    pub tolerance: f64,
    pub w_grid: WGrid,
    /// Skip tuning and use this class weight.
    pub fixed_w: Option<f64>,
    /// Fraction of the training portion held out for tuning W.
    pub validation_frac: f64,
    pub folds: usize,
    pub averaging: Averaging,
    pub df_min: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            features: FeatureGroups::all(),
            lambda: None,
            max_iters: 300,
            tolerance: 1e-5,
            w_grid: WGrid::default(),
            fixed_w: None,
            validation_frac: 0.25,
            folds: 10,
            averaging: Averaging::Folds,
            df_min: 1,
            seed: 42,
        }
    }
}

impl ExperimentConfig {
    pub fn train_config(&self, n: usize, w: f64) -> TrainConfig {
        TrainConfig {
            lambda: self.lambda.unwrap_or(1.0 / n.max(1) as f64),
            class_weight: w,
            max_iters: self.max_iters,
            tolerance: self.tolerance,
            seed: self.seed,
        }
    }
}

/// A course after truncation and text preparation. Threads with nothing
/// observable before the first intervention are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedCourse {
    pub id: String,
    pub threads: Vec<PreparedThread>,
    pub excluded: usize,
}

impl PreparedCourse {
    pub fn labels(&self) -> Vec<bool> {
        self.threads.iter().map(|t| t.label).collect()
    }

    pub fn intervention_ratio(&self) -> f64 {
        crate::corpus::ratio(self.threads.iter().filter(|t| t.label).count(), self.threads.len())
    }
}

pub fn prepare_course(course: &Course, prep: &TextProcessor) -> PreparedCourse {
    let all: Vec<PreparedThread> = course
        .threads
        .par_iter()
        .map(|t| PreparedThread::new(t, prep))
        .collect();
    let total = all.len();
    let threads: Vec<PreparedThread> = all.into_iter().filter(|t| !t.degenerate).collect();
    PreparedCourse {
        id: course.id.clone(),
        excluded: total - threads.len(),
        threads,
    }
}

pub fn prepare_corpus(corpus: &Corpus, prep: &TextProcessor) -> Vec<PreparedCourse> {
    corpus.courses.iter().map(|c| prepare_course(c, prep)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    Linear(ModelParams),
    /// Training data held one class only; predict it everywhere.
    Constant(bool),
}

/// A fitted feature space plus decision rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub space: FeatureSpace,
    pub decision: Decision,
    pub w: f64,
    pub lambda: f64,
    pub notes: Vec<String>,
}

impl Classifier {
    pub fn predict(&self, t: &PreparedThread) -> Prediction {
        match &self.decision {
            Decision::Linear(params) => {
                model::predict_sparse(params, &self.space.encode(t).to_sparse())
                    .expect("encoded within the fitted space")
            }
            Decision::Constant(label) => Prediction {
                probability: if *label { 1.0 } else { 0.0 },
                label: *label,
            },
        }
    }
}

/// Thread keys that reached a vocabulary, scaler or training set.
pub type Footprint = BTreeSet<String>;

fn fit_space(
    threads: &[&PreparedThread],
    cfg: &ExperimentConfig,
    footprint: &mut Footprint,
) -> Result<FeatureSpace> {
    footprint.extend(threads.iter().map(|t| t.key()));
    FeatureSpace::fit(threads, cfg.features, cfg.df_min)
}

fn dataset(space: &FeatureSpace, threads: &[&PreparedThread], footprint: &mut Footprint) -> Dataset {
    let mut d = Dataset::new(space.dim());
    for t in threads {
        footprint.insert(t.key());
        d.push(&space.encode(t).to_sparse(), t.label)
            .expect("encoded within the fitted space");
    }
    d
}

fn single_class(threads: &[&PreparedThread]) -> Option<bool> {
    let first = threads.first()?.label;
    threads.iter().all(|t| t.label == first).then_some(first)
}

/// Fits the whole pipeline on `train`: W is tuned on a stratified inner
/// split (unless fixed), then vocabulary, scaler and weights are refitted
/// on all of `train`.
pub fn fit_classifier(
    train: &[&PreparedThread],
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<(Classifier, Footprint)> {
    let mut footprint = Footprint::new();
    let space = fit_space(train, cfg, &mut footprint)?;
    let mut notes = Vec::new();
    if let Some(label) = single_class(train) {
        notes.push(format!("single-class training data; constant {label} predictor"));
        let classifier = Classifier {
            space,
            decision: Decision::Constant(label),
            w: 1.0,
            lambda: 0.0,
            notes,
        };
        return Ok((classifier, footprint));
    }

    let w = match cfg.fixed_w {
        Some(w) => w,
        None => match tune_on_inner_split(train, cfg, seed, &mut footprint)? {
            Some(w) => w,
            None => {
                notes.push("W tuning impossible on inner split; using W = 1".into());
                1.0
            }
        },
    };
    let data = dataset(&space, train, &mut footprint);
    let tc = cfg.train_config(data.len(), w);
    let params = model::train(&data, &tc)?;
    let classifier = Classifier {
        space,
        decision: Decision::Linear(params),
        w,
        lambda: tc.lambda,
        notes,
    };
    Ok((classifier, footprint))
}

fn tune_on_inner_split(
    train: &[&PreparedThread],
    cfg: &ExperimentConfig,
    seed: u64,
    footprint: &mut Footprint,
) -> Result<Option<f64>> {
    let labels: Vec<bool> = train.iter().map(|t| t.label).collect();
    let (fit_idx, val_idx) = stratified_split(&labels, cfg.validation_frac, derive_seed(seed, 7));
    let fit: Vec<&PreparedThread> = fit_idx.iter().map(|&i| train[i]).collect();
    let val: Vec<&PreparedThread> = val_idx.iter().map(|&i| train[i]).collect();
    if val.is_empty() || !val.iter().any(|t| t.label) || single_class(&fit).is_some() {
        return Ok(None);
    }
    let space = fit_space(&fit, cfg, footprint)?;
    let fit_data = dataset(&space, &fit, footprint);
    let val_data = dataset(&space, &val, footprint);
    let tc = cfg.train_config(fit_data.len(), 1.0);
    let tuning = model::tune_class_weight(&fit_data, &val_data, &tc, &cfg.w_grid)?;
    Ok(Some(tuning.w))
}

/// Result of training on one portion and testing on another.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldRun {
    pub classifier: Classifier,
    pub metrics: Metrics,
    pub predictions: Vec<Prediction>,
    /// Keys of every thread that reached a training structure.
    pub footprint: Footprint,
    pub test_keys: Vec<String>,
}

impl FoldRun {
    pub fn leaked(&self) -> Vec<&str> {
        self.test_keys
            .iter()
            .filter(|k| self.footprint.contains(*k))
            .map(String::as_str)
            .collect()
    }
}

pub fn run_fold(
    train: &[&PreparedThread],
    test: &[&PreparedThread],
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<FoldRun> {
    let (classifier, footprint) = fit_classifier(train, cfg, seed)?;
    let predictions: Vec<Prediction> = test.iter().map(|t| classifier.predict(t)).collect();
    let labels: Vec<bool> = predictions.iter().map(|p| p.label).collect();
    let gold: Vec<bool> = test.iter().map(|t| t.label).collect();
    let run = FoldRun {
        metrics: compute_metrics(&labels, &gold)?,
        classifier,
        predictions,
        footprint,
        test_keys: test.iter().map(|t| t.key()).collect(),
    };
    let leaked = run.leaked();
    if !leaked.is_empty() {
        return Err(Error::Validation(format!(
            "test threads reached training: {}",
            leaked.join(", ")
        )));
    }
    Ok(run)
}

/// Precision, recall, F1 and W as reported in result tables.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub test_threads: usize,
    pub w: f64,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CourseResult {
    pub course_id: String,
    pub threads: usize,
    pub excluded_threads: usize,
    pub intervention_ratio: f64,
    pub summary: Summary,
    /// Confusion counts summed over folds.
    pub pooled: Metrics,
    pub folds: Vec<FoldSummary>,
    pub training_threads: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: String,
    pub features: FeatureGroups,
    pub courses: Vec<CourseResult>,
    pub average: Summary,
    pub weighted_macro: Summary,
}

/// Plain and thread-weighted means of the per-course summaries.
pub fn aggregate(courses: &[CourseResult]) -> (Summary, Summary) {
    let n = courses.len().max(1) as f64;
    let total: usize = courses.iter().map(|c| c.threads).sum();
    let mut avg = Summary::default();
    let mut wavg = Summary::default();
    for c in courses {
        let share = crate::corpus::ratio(c.threads, total);
        for (acc, weight) in [(&mut avg, 1.0 / n), (&mut wavg, share)] {
            acc.precision += weight * c.summary.precision;
            acc.recall += weight * c.summary.recall;
            acc.f1 += weight * c.summary.f1;
            acc.w += weight * c.summary.w;
        }
    }
    (avg, wavg)
}

pub fn weighted_macro(values: &[(f64, usize)]) -> f64 {
    let total: usize = values.iter().map(|(_, n)| n).sum();
    values
        .iter()
        .map(|(v, n)| v * crate::corpus::ratio(*n, total))
        .sum()
}

fn summarize_folds(runs: &[(usize, FoldRun)], averaging: Averaging) -> (Summary, Metrics) {
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (_, r) in runs {
        tp += r.metrics.tp;
        fp += r.metrics.fp;
        fn_ += r.metrics.fn_;
        tn += r.metrics.tn;
    }
    let pooled = Metrics::from_counts(tp, fp, fn_, tn);
    let n = runs.len().max(1) as f64;
    let w = runs.iter().map(|(_, r)| r.classifier.w).sum::<f64>() / n;
    let summary = match averaging {
        Averaging::Folds => Summary {
            precision: runs.iter().map(|(_, r)| r.metrics.precision).sum::<f64>() / n,
            recall: runs.iter().map(|(_, r)| r.metrics.recall).sum::<f64>() / n,
            f1: runs.iter().map(|(_, r)| r.metrics.f1).sum::<f64>() / n,
            w,
        },
        Averaging::Pooled => Summary {
            precision: pooled.precision,
            recall: pooled.recall,
            f1: pooled.f1,
            w,
        },
    };
    (summary, pooled)
}

/// Stratified k-fold cross-validation within a single course, with W tuned
/// inside every fold.
pub fn cross_validate_course(course: &PreparedCourse, cfg: &ExperimentConfig) -> Result<CourseResult> {
    let k = cfg.folds;
    if k < 2 {
        return Err(Error::InvalidArgument("need at least 2 folds".into()));
    }
    if course.threads.len() < k {
        return Err(Error::TooFewThreads {
            needed: k,
            got: course.threads.len(),
        });
    }
    let course_seed = derive_seed(cfg.seed, fnv(&course.id));
    let folds = stratified_folds(&course.labels(), k, course_seed);
    let runs: Vec<(usize, FoldRun)> = folds
        .par_iter()
        .enumerate()
        .map(|(f, test_idx)| {
            let in_test: BTreeSet<usize> = test_idx.iter().copied().collect();
            let train: Vec<&PreparedThread> = (0..course.threads.len())
                .filter(|i| !in_test.contains(i))
                .map(|i| &course.threads[i])
                .collect();
            let test: Vec<&PreparedThread> = test_idx.iter().map(|&i| &course.threads[i]).collect();
            run_fold(&train, &test, cfg, derive_seed(course_seed, f as u64)).map(|r| (f, r))
        })
        .collect::<Result<_>>()?;
    let (summary, pooled) = summarize_folds(&runs, cfg.averaging);
    let mut notes: Vec<String> = runs
        .iter()
        .flat_map(|(f, r)| r.classifier.notes.iter().map(move |n| format!("fold {f}: {n}")))
        .collect();
    notes.dedup();
    Ok(CourseResult {
        course_id: course.id.clone(),
        threads: course.threads.len(),
        excluded_threads: course.excluded,
        intervention_ratio: course.intervention_ratio(),
        summary,
        pooled,
        folds: runs
            .iter()
            .map(|(f, r)| FoldSummary {
                fold: *f,
                test_threads: r.test_keys.len(),
                w: r.classifier.w,
                metrics: r.metrics,
            })
            .collect(),
        training_threads: course.threads.len() - folds.iter().map(Vec::len).min().unwrap_or(0),
        notes,
    })
}

/// Per-course cross-validation over every course.
pub fn cross_validate_corpus(courses: &[PreparedCourse], cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let results: Vec<CourseResult> = courses
        .iter()
        .map(|c| cross_validate_course(c, cfg))
        .collect::<Result<_>>()?;
    let (average, weighted_macro) = aggregate(&results);
    Ok(ExperimentReport {
        kind: format!("{}-fold per-course cross-validation", cfg.folds),
        features: cfg.features,
        courses: results,
        average,
        weighted_macro,
    })
}

fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// One held-out course of a leave-one-course-out run.
#[derive(Debug, Clone, PartialEq)]
pub struct LooFold {
    pub held_out: String,
    pub run: FoldRun,
}

/// Trains one model per held-out course on all the other courses.
pub fn loo_course_folds(courses: &[PreparedCourse], cfg: &ExperimentConfig) -> Result<Vec<LooFold>> {
    if courses.len() < 2 {
        return Err(Error::InvalidArgument(
            "leave-one-course-out needs at least 2 courses".into(),
        ));
    }
    courses
        .par_iter()
        .enumerate()
        .map(|(c, held)| {
            let train: Vec<&PreparedThread> = courses
                .iter()
                .filter(|o| o.id != held.id)
                .flat_map(|o| o.threads.iter())
                .collect();
            let test: Vec<&PreparedThread> = held.threads.iter().collect();
            let run = run_fold(&train, &test, cfg, derive_seed(cfg.seed, c as u64))?;
            Ok(LooFold {
                held_out: held.id.clone(),
                run,
            })
        })
        .collect()
}

pub fn loo_course_cv(courses: &[PreparedCourse], cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let folds = loo_course_folds(courses, cfg)?;
    let results: Vec<CourseResult> = courses
        .iter()
        .zip(folds)
        .map(|(course, fold)| {
            let m = fold.run.metrics;
            CourseResult {
                course_id: course.id.clone(),
                threads: course.threads.len(),
                excluded_threads: course.excluded,
                intervention_ratio: course.intervention_ratio(),
                summary: Summary {
                    precision: m.precision,
                    recall: m.recall,
                    f1: m.f1,
                    w: fold.run.classifier.w,
                },
                pooled: m,
                folds: vec![FoldSummary {
                    fold: 0,
                    test_threads: fold.run.test_keys.len(),
                    w: fold.run.classifier.w,
                    metrics: m,
                }],
                training_threads: fold.run.footprint.len(),
                notes: fold.run.classifier.notes.clone(),
            }
        })
        .collect();
    let (average, weighted_macro) = aggregate(&results);
    Ok(ExperimentReport {
        kind: "leave-one-course-out cross-validation".into(),
        features: cfg.features,
        courses: results,
        average,
        weighted_macro,
    })
}

/// The thirteen feature configurations: seven cumulative additions, then
/// the full set with one group removed at a time.
pub fn feature_study_configs() -> Vec<(String, FeatureGroups)> {
    use FeatureGroup::*;
    let additive = [
        (Unigrams, "Unigrams"),
        (ForumType, "(1) + Forum Type"),
        (CourseRef, "(2) + Course Ref"),
        (Affirmation, "(3) + Affirmation"),
        (ThreadProps, "(4) + T Properties"),
        (NumSents, "(5) + Num Sents"),
        (NonlexRef, "(6) + Non-Lex Ref"),
    ];
    let mut rows = Vec::new();
    let mut acc = FeatureGroups::none();
    for (g, name) in additive {
        acc = acc.with(g);
        rows.push((name.to_string(), acc));
    }
    let ablations = [
        (ForumType, "(7) - Forum Type"),
        (CourseRef, "(7) - Course Ref"),
        (Affirmation, "(7) - Affirmation"),
        (ThreadProps, "(7) - T Properties"),
        (NumSents, "(7) - Num Sents"),
        (NonlexRef, "(7) - Non-Lex Ref"),
    ];
    for (g, name) in ablations {
        rows.push((name.to_string(), FeatureGroups::all().without(g)));
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub row: usize,
    pub name: String,
    pub features: FeatureGroups,
    pub weighted_macro: Summary,
    pub average: Summary,
}

/// Leave-one-course-out results for every feature configuration, each with
/// its own tuned W.
pub fn feature_study(courses: &[PreparedCourse], cfg: &ExperimentConfig) -> Result<Vec<StudyRow>> {
    feature_study_configs()
        .into_iter()
        .enumerate()
        .map(|(i, (name, features))| {
            let report = loo_course_cv(
                courses,
                &ExperimentConfig {
                    features,
                    ..cfg.clone()
                },
            )?;
            Ok(StudyRow {
                row: i + 1,
                name,
                features,
                weighted_macro: report.weighted_macro,
                average: report.average,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub course_id: String,
    pub threads: usize,
    pub intervention_ratio: f64,
    pub baseline: Metrics,
    pub learned_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub rows: Vec<BaselineRow>,
    pub average_baseline_f1: f64,
    pub weighted_baseline_f1: f64,
    pub average_learned_f1: Option<f64>,
    pub weighted_learned_f1: Option<f64>,
}

/// All-positive baseline per course, optionally next to learned F1 from
/// an experiment over the same courses.
pub fn baseline_report(courses: &[PreparedCourse], learned: Option<&ExperimentReport>) -> Result<BaselineReport> {
    let rows: Vec<BaselineRow> = courses
        .iter()
        .map(|c| {
            Ok(BaselineRow {
                course_id: c.id.clone(),
                threads: c.threads.len(),
                intervention_ratio: c.intervention_ratio(),
                baseline: all_positive_baseline(&c.labels())?,
                learned_f1: learned.and_then(|r| {
                    r.courses
                        .iter()
                        .find(|x| x.course_id == c.id)
                        .map(|x| x.summary.f1)
                }),
            })
        })
        .collect::<Result<_>>()?;
    let n = rows.len().max(1) as f64;
    let sized = |f: &dyn Fn(&BaselineRow) -> f64| -> Vec<(f64, usize)> {
        rows.iter().map(|r| (f(r), r.threads)).collect()
    };
    let learned_present = rows.iter().all(|r| r.learned_f1.is_some()) && learned.is_some();
    Ok(BaselineReport {
        average_baseline_f1: rows.iter().map(|r| r.baseline.f1).sum::<f64>() / n,
        weighted_baseline_f1: weighted_macro(&sized(&|r| r.baseline.f1)),
        average_learned_f1: learned_present
            .then(|| rows.iter().map(|r| r.learned_f1.unwrap()).sum::<f64>() / n),
        weighted_learned_f1: learned_present
            .then(|| weighted_macro(&sized(&|r| r.learned_f1.unwrap()))),
        rows,
    })
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument(
            "pearson needs two equal-length lists of at least 2 values".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationItem {
    pub id: String,
    #[serde(default)]
    pub tags: Vec<String>,
}

/// Binary judgments by several annotators over one shared item list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub items: Vec<AnnotationItem>,
    pub annotators: BTreeMap<String, Vec<bool>>,
}

impl AnnotationSet {
    pub fn validate(&self) -> Result<()> {
        for (name, judgments) in &self.annotators {
            if judgments.len() != self.items.len() {
                return Err(Error::Validation(format!(
                    "annotator {name} judged {} of {} items",
                    judgments.len(),
                    self.items.len()
                )));
            }
        }
        Ok(())
    }

    /// Restricts to items carrying `tag`.
    pub fn with_tag(&self, tag: &str) -> AnnotationSet {
        let keep: Vec<usize> = (0..self.items.len())
            .filter(|&i| self.items[i].tags.iter().any(|t| t == tag))
            .collect();
        AnnotationSet {
            items: keep.iter().map(|&i| self.items[i].clone()).collect(),
            annotators: self
                .annotators
                .iter()
                .map(|(k, v)| (k.clone(), keep.iter().map(|&i| v[i]).collect()))
                .collect(),
        }
    }
}

/// Cohen's kappa for two binary annotation vectors; `None` when chance
/// agreement is 1 and kappa is undefined.
pub fn cohen_kappa(a: &[bool], b: &[bool]) -> Option<f64> {
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    let pa = a.iter().filter(|&&x| x).count() as f64 / n;
    let pb = b.iter().filter(|&&x| x).count() as f64 / n;
    let p_o = agree / n;
    let p_e = pa * pb + (1.0 - pa) * (1.0 - pb);
    if p_e >= 1.0 {
        None
    } else {
        Some((p_o - p_e) / (1.0 - p_e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairKappa {
    pub a: String,
    pub b: String,
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaReport {
    pub tag: Option<String>,
    pub items: usize,
    pub pairs: Vec<PairKappa>,
    /// Mean over pairs with a defined kappa.
    pub average: Option<f64>,
}

/// Pairwise Cohen's kappa between all annotators and their mean.
pub fn kappa(set: &AnnotationSet, tag: Option<&str>) -> Result<KappaReport> {
    set.validate()?;
    let filtered;
    let set = match tag {
        Some(t) => {
            filtered = set.with_tag(t);
            &filtered
        }
        None => set,
    };
    if set.annotators.len() < 2 || set.items.len() < 2 {
        return Err(Error::InvalidArgument(
            "kappa needs at least 2 annotators and 2 items".into(),
        ));
    }
    let names: Vec<&String> = set.annotators.keys().collect();
    let mut pairs = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            let k = cohen_kappa(&set.annotators[names[i]], &set.annotators[names[j]]);
            if k.is_none() {
                log::warn!("kappa undefined for {} vs {}; excluded from average", names[i], names[j]);
            }
            pairs.push(PairKappa {
                a: names[i].clone(),
                b: names[j].clone(),
                kappa: k,
            });
        }
    }
    let defined: Vec<f64> = pairs.iter().filter_map(|p| p.kappa).collect();
    Ok(KappaReport {
        tag: tag.map(String::from),
        items: set.items.len(),
        average: (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64),
        pairs,
    })
}
