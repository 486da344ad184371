//! Learned F1 next to the all-positive baseline, and how F1 tracks the
//! intervention ratio across courses.

use intervene::{eval, report, syngen, ExperimentConfig, TextProcessor};

fn main() -> intervene::Result<()> {
    let mut spec = syngen::default_d14_like_spec();
    for c in &mut spec.courses {
        c.threads = c.threads.div_ceil(8);
    }
    let corpus = syngen::generate(&spec)?;
    let courses = eval::prepare_corpus(&corpus, &TextProcessor::default());
    let learned = eval::loo_course_cv(&courses, &ExperimentConfig::default())?;
    let table = eval::baseline_report(&courses, Some(&learned))?;
    print!("{}", report::baseline_table(&table));

    let (ratios, f1s): (Vec<f64>, Vec<f64>) = learned
        .courses
        .iter()
        .map(|c| (c.intervention_ratio, c.summary.f1))
        .unzip();
    println!("pearson(ratio, F1) = {:.3}", eval::pearson(&ratios, &f1s)?);
    Ok(())
}
