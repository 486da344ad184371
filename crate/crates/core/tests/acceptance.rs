//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Criteria 5 to 7 share one
//! leave-one-course-out run over the default synthetic corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use intervene::corpus::{label_thread, truncate_at_first_intervention, AuthorRole};
use intervene::eval::{self, ExperimentConfig, ExperimentReport, PreparedCourse};
use intervene::features::{tf_itf_vector, FeatureGroup, FeatureGroups, Vocabulary};
use intervene::model::{self, Dataset, ModelParams, TrainConfig};
use intervene::syngen;
use intervene::textprep::TextProcessor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Lazily computed leave-one-course-out runs on the seed-42 default corpus.
#[derive(Default)]
struct Shared {
    courses: Option<Vec<PreparedCourse>>,
    reports: BTreeMap<String, ExperimentReport>,
}

impl Shared {
    fn courses(&mut self) -> &[PreparedCourse] {
        self.courses.get_or_insert_with(|| {
            let corpus = syngen::generate(&syngen::default_d14_like_spec()).expect("default corpus");
            eval::prepare_corpus(&corpus, &TextProcessor::default())
        })
    }

    fn loo(&mut self, features: FeatureGroups) -> &ExperimentReport {
        let key = features.to_string();
        if !self.reports.contains_key(&key) {
            let cfg = ExperimentConfig {
                features,
                ..Default::default()
            };
            let report = eval::loo_course_cv(self.courses(), &cfg).expect("leave-one-course-out run");
            self.reports.insert(key.clone(), report);
        }
        &self.reports[&key]
    }
}

fn main() {
    type Check = fn(&mut Shared) -> Outcome;
    let checks: [(u32, &str, u64, Check); 9] = [
        (1, "metric algebra", 1, metric_algebra),
        (2, "solver correctness", 30, solver_correctness),
        (3, "tf-itf oracle equivalence", 10, tf_itf_oracle),
        (4, "truncation and leakage", 10, truncation_and_leakage),
        (5, "synthetic feature ordering", 300, feature_ordering),
        (6, "baseline crossover", 120, baseline_crossover),
        (7, "correlation harness", 1, correlation),
        (8, "kappa", 1, kappa),
        (9, "determinism", 300, determinism),
    ];
    let mut shared = Shared::default();
    let mut failed = 0;
    for (id, name, budget, check) in checks {
        let start = Instant::now();
        let mut o = check(&mut shared);
        let took = start.elapsed();
        if took > Duration::from_secs(budget) {
            o.pass = false;
            o.detail += &format!("; over the {budget} s budget");
        }
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id} {verdict} {name} ({:.2} s of {budget} s): {}",
            took.as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}

fn metric_algebra(_: &mut Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst, mut inexact) = (0.0f64, 0);
    for _ in 0..1000 {
        let n = rng.gen_range(1..200);
        let rate = rng.gen_range(0.0..1.0);
        let gold: Vec<bool> = (0..n).map(|_| rng.gen_bool(rate)).collect();
        let pred: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let m = eval::compute_metrics(&pred, &gold).unwrap();
        let tp = pred.iter().zip(&gold).filter(|(p, g)| **p && **g).count() as f64;
        let pp = pred.iter().filter(|p| **p).count() as f64;
        let gp = gold.iter().filter(|g| **g).count() as f64;
        let (p, r) = (
            if pp > 0.0 { tp / pp } else { 0.0 },
            if gp > 0.0 { tp / gp } else { 0.0 },
        );
        let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        worst = worst.max((m.f1 - f1).abs());

        let share = gp / n as f64;
        let base = eval::all_positive_baseline(&gold).unwrap().f1;
        if base != 2.0 * share / (1.0 + share) {
            inexact += 1;
        }
    }
    outcome(
        worst <= 1e-12 && inexact == 0,
        format!("1000 configurations, max F1 error {worst:.1e}, {inexact} inexact baselines"),
    )
}

fn random_dataset(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Dataset {
    let mut d = Dataset::new(dim);
    for i in 0..n {
        let mut row = Vec::new();
        for j in 0..dim {
            if rng.gen_bool(0.6) {
                row.push((j, rng.gen_range(-1.5..1.5)));
            }
        }
        // both classes present
        let label = if i < 2 { i == 0 } else { rng.gen_bool(0.4) };
        d.push(&row, label).unwrap();
    }
    d
}

fn solver_correctness(_: &mut Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_rel = 0.0f64;
    let mut non_monotone = 0;
    for _ in 0..20 {
        let n = rng.gen_range(8..60);
        let dim = rng.gen_range(1..12);
        let data = random_dataset(&mut rng, n, dim);
        let cfg = TrainConfig {
            lambda: 0.0,
            class_weight: rng.gen_range(0.5..4.0),
            ..Default::default()
        };
        let params = ModelParams {
            weights: (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            bias: rng.gen_range(-1.0..1.0),
        };
        let (gw, gb) = model::smooth_gradient(&params, &data, &cfg);
        let h = 1e-6;
        let mut fd = Vec::with_capacity(dim + 1);
        for j in 0..=dim {
            let shifted = |delta: f64| {
                let mut p = params.clone();
                if j < dim {
                    p.weights[j] += delta;
                } else {
                    p.bias += delta;
                }
                model::objective(&p, &data, &cfg)
            };
            fd.push((shifted(h) - shifted(-h)) / (2.0 * h));
        }
        let analytic: Vec<f64> = gw.iter().copied().chain([gb]).collect();
        let scale = analytic.iter().fold(0.0f64, |m, g| m.max(g.abs())).max(1e-8);
        let err = analytic
            .iter()
            .zip(&fd)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        worst_rel = worst_rel.max(err / scale);

        let train_cfg = TrainConfig {
            lambda: rng.gen_range(0.001..0.5),
            ..cfg
        };
        let (_, trace) = model::train_with_trace(&data, &train_cfg).unwrap();
        if trace.objectives.windows(2).any(|w| w[1] > w[0]) {
            non_monotone += 1;
        }
    }

    let data = random_dataset(&mut rng, 80, 10);
    let heavy = TrainConfig {
        lambda: 1e6,
        ..Default::default()
    };
    let zeroed = model::train(&data, &heavy).unwrap().n_nonzero() == 0;

    // two clusters with a wide gap along the first coordinate
    let mut sep = Dataset::new(3);
    for i in 0..100 {
        let label = i % 2 == 0;
        let x0 = if label { rng.gen_range(1.0..2.0) } else { rng.gen_range(-2.0..-1.0) };
        let row = [(0, x0), (1, rng.gen_range(-1.0..1.0)), (2, rng.gen_range(-1.0..1.0))];
        sep.push(&row, label).unwrap();
    }
    let fit = model::train(&sep, &TrainConfig::for_instances(100)).unwrap();
    let pred: Vec<bool> = model::predict_dataset(&fit, &sep).iter().map(|p| p.label).collect();
    let sep_f1 = eval::compute_metrics(&pred, sep.labels()).unwrap().f1;

    outcome(
        worst_rel <= 1e-5 && non_monotone == 0 && zeroed && sep_f1 == 1.0,
        format!(
            "gradient rel. error {worst_rel:.1e}, {non_monotone} non-monotone traces, \
             λ=1e6 all-zero {zeroed}, separable training F1 {sep_f1}"
        ),
    )
}

/// Nested-loop tf-itf: for every vocabulary term in sorted order, count
/// its occurrences in the thread and the threads that contain it.
fn brute_force_tf_itf(corpus: &[Vec<String>], thread: &[String]) -> (Vec<String>, Vec<(usize, f64)>) {
    let mut terms: Vec<String> = Vec::new();
    for t in corpus {
        for tok in t {
            if !terms.contains(tok) {
                terms.push(tok.clone());
            }
        }
    }
    terms.sort();
    let mut raw = Vec::new();
    for (j, term) in terms.iter().enumerate() {
        let mut tf = 0usize;
        for tok in thread {
            if tok == term {
                tf += 1;
            }
        }
        let mut df = 0usize;
        for t in corpus {
            let mut seen = false;
            for tok in t {
                if tok == term {
                    seen = true;
                }
            }
            if seen {
                df += 1;
            }
        }
        let w = tf as f64 * (corpus.len() as f64 / df as f64).ln();
        if w != 0.0 {
            raw.push((j, w));
        }
    }
    let mut sq = 0.0;
    for (_, w) in &raw {
        sq += w * w;
    }
    let norm = sq.sqrt();
    if norm == 0.0 {
        return (terms, Vec::new());
    }
    (terms, raw.into_iter().map(|(j, w)| (j, w / norm)).collect())
}

fn tf_itf_oracle(_: &mut Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    let mut vectors = 0;
    for _ in 0..100 {
        let n_terms = rng.gen_range(1..=50);
        let n_threads = rng.gen_range(1..=10);
        let corpus: Vec<Vec<String>> = (0..n_threads)
            .map(|_| {
                (0..rng.gen_range(0..30))
                    .map(|_| format!("w{}", rng.gen_range(0..n_terms)))
                    .collect()
            })
            .collect();
        let vocab = Vocabulary::from_token_lists(&corpus, 1).unwrap();
        for thread in &corpus {
            let (terms, expected) = brute_force_tf_itf(&corpus, thread);
            let got_terms: Vec<String> = vocab.iter().map(|(t, _)| t.to_string()).collect();
            vectors += 1;
            if terms != got_terms || tf_itf_vector(thread, &vocab) != expected {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("100 corpora, {vectors} vectors, {mismatches} differ from the oracle"),
    )
}

fn truncation_and_leakage(_: &mut Shared) -> Outcome {
    let corpus = syngen::generate(&syngen::default_d14_like_spec()).unwrap();
    let mut checked = 0;
    let mut staff_left = 0;
    for t in corpus.threads().filter(|t| label_thread(t)) {
        let first_staff = t
            .items()
            .filter(|(role, _, _)| *role == AuthorRole::Staff)
            .map(|(_, ts, _)| ts)
            .min()
            .unwrap();
        let tr = truncate_at_first_intervention(t);
        checked += 1;
        if tr.thread.items().any(|(role, ts, _)| role == AuthorRole::Staff || ts >= first_staff) {
            staff_left += 1;
        }
    }

    let mut small = syngen::default_d14_like_spec();
    for c in &mut small.courses {
        c.threads = 40;
    }
    let small_corpus = syngen::generate(&small).unwrap();
    let courses = eval::prepare_corpus(&small_corpus, &TextProcessor::default());
    let cfg = ExperimentConfig {
        max_iters: 100,
        ..Default::default()
    };
    let folds = eval::loo_course_folds(&courses, &cfg).unwrap();
    let mut leaked = 0;
    let mut empty_footprints = 0;
    for fold in &folds {
        let held = small_corpus.course(&fold.held_out).unwrap();
        let held_keys: BTreeSet<String> = held.threads.iter().map(|t| format!("{}/{}", held.id, t.id)).collect();
        leaked += fold.run.footprint.intersection(&held_keys).count();
        if fold.run.footprint.is_empty() {
            empty_footprints += 1;
        }
    }
    outcome(
        staff_left == 0 && leaked == 0 && empty_footprints == 0 && folds.len() == 14,
        format!(
            "{checked} intervened threads, {staff_left} keep staff content; \
             {} folds, {leaked} test ids in training structures",
            folds.len()
        ),
    )
}

fn unigrams() -> FeatureGroups {
    FeatureGroups::from_groups([FeatureGroup::Unigrams])
}

fn feature_ordering(shared: &mut Shared) -> Outcome {
    let base = shared.loo(unigrams()).weighted_macro.f1;
    let forum = shared
        .loo(unigrams().with(FeatureGroup::ForumType))
        .weighted_macro
        .f1;
    let all = shared.loo(FeatureGroups::all()).weighted_macro.f1;
    let (d_forum, d_all) = (100.0 * (forum - base), 100.0 * (all - base));
    outcome(
        d_forum >= 1.0 && d_all >= 3.0,
        format!(
            "weighted F1 unigrams {:.2}, + forum type {:.2} ({d_forum:+.2}), all {:.2} ({d_all:+.2})",
            100.0 * base,
            100.0 * forum,
            100.0 * all
        ),
    )
}

fn baseline_crossover(shared: &mut Shared) -> Outcome {
    let report = shared.loo(FeatureGroups::all()).clone();
    let table = eval::baseline_report(shared.courses(), Some(&report)).unwrap();
    let high: Vec<_> = table.rows.iter().filter(|r| r.intervention_ratio >= 0.7).collect();
    let wins: Vec<String> = high
        .iter()
        .filter(|r| r.baseline.f1 > r.learned_f1.unwrap())
        .map(|r| {
            format!(
                "{} ({:.2}: {:.2} > {:.2})",
                r.course_id,
                r.intervention_ratio,
                100.0 * r.baseline.f1,
                100.0 * r.learned_f1.unwrap()
            )
        })
        .collect();
    outcome(
        !wins.is_empty(),
        format!(
            "{} courses at ratio >= 0.7, baseline wins on {} (reuses the full-feature run)",
            high.len(),
            if wins.is_empty() { "none".into() } else { wins.join(", ") }
        ),
    )
}

fn reference_columns() -> (Vec<f64>, Vec<f64>) {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/reference_courses.csv"))
        .expect("fixture");
    text.lines()
        .skip(1)
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            (cols[2].parse::<f64>().unwrap(), cols[3].parse::<f64>().unwrap())
        })
        .unzip()
}

fn correlation(shared: &mut Shared) -> Outcome {
    let report = shared.loo(FeatureGroups::all());
    let (xs, ys): (Vec<f64>, Vec<f64>) = report
        .courses
        .iter()
        .map(|c| (c.intervention_ratio, c.summary.f1))
        .unzip();
    let synthetic = eval::pearson(&xs, &ys).unwrap();
    let (rx, ry) = reference_columns();
    let reference = eval::pearson(&rx, &ry).unwrap();
    outcome(
        synthetic > 0.0 && synthetic <= 1.0 && (reference - 0.93).abs() <= 0.02,
        format!("synthetic rho {synthetic:.4} (reuses the full-feature run), reference rho {reference:.4}"),
    )
}

fn kappa(_: &mut Shared) -> Outcome {
    let a = [true, false, true, true, false, false, true];
    let identical = eval::cohen_kappa(&a, &a);
    let checker = eval::cohen_kappa(&[true, true, false, false], &[true, false, true, false]);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut broken = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..40);
        let x: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let y: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let flip = |v: &[bool]| v.iter().map(|b| !b).collect::<Vec<_>>();
        let k = eval::cohen_kappa(&x, &y);
        let swapped = eval::cohen_kappa(&y, &x);
        let relabelled = eval::cohen_kappa(&flip(&x), &flip(&y));
        let same = |p: Option<f64>, q: Option<f64>| match (p, q) {
            (Some(p), Some(q)) => (p - q).abs() <= 1e-12,
            (None, None) => true,
            _ => false,
        };
        if k != swapped || !same(k, relabelled) {
            broken += 1;
        }
    }
    outcome(
        identical == Some(1.0) && checker == Some(0.0) && broken == 0,
        format!("identical {identical:?}, checkerboard {checker:?}, {broken} of 100 sets asymmetric or relabel-sensitive"),
    )
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_intervene"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn determinism(_: &mut Shared) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = syngen::default_d14_like_spec();
    spec.courses.truncate(4);
    for c in &mut spec.courses {
        c.threads = 60;
    }
    let spec_path = dir.path().join("spec.json");
    std::fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();
    let corpus_path = dir.path().join("corpus.jsonl");
    let (spec_arg, corpus_arg) = (spec_path.to_str().unwrap(), corpus_path.to_str().unwrap());
    let common = ["--seed", "42", "--fixed-clock", "--format", "json"];

    let run = |cmd: &[&str], jobs: &str| -> Result<(Vec<u8>, Vec<u8>), String> {
        let mut args: Vec<&str> = cmd.to_vec();
        args.extend(common);
        args.extend(["--jobs", jobs]);
        let report = cli(&args)?;
        let corpus = std::fs::read(&corpus_path).map_err(|e| e.to_string())?;
        Ok((report, corpus))
    };
    let synth = ["synth", "--spec", spec_arg, "--output", corpus_arg];
    let mut differing = Vec::new();
    let mut checked = Vec::new();
    let result = (|| -> Result<(), String> {
        let first = run(&synth, "1")?;
        let second = run(&synth, "2")?;
        if first != second {
            differing.push("synth");
        }
        checked.push("synth");
        for cmd in ["cv", "loocv", "ablate"] {
            let args = [cmd, "--corpus", corpus_arg];
            if run(&args, "1")?.0 != run(&args, "2")?.0 {
                differing.push(cmd);
            }
            checked.push(cmd);
        }
        Ok(())
    })();
    match result {
        Err(e) => outcome(false, format!("command failed: {e}")),
        Ok(()) => outcome(
            differing.is_empty(),
            format!(
                "{} rerun with 1 and 2 workers; differing: {}",
                checked.join(", "),
                if differing.is_empty() { "none".to_string() } else { differing.join(", ") }
            ),
        ),
    }
}
