//! Ten-fold cross validation inside each course, with W tuned per fold.

use intervene::{eval, report, syngen, ExperimentConfig, TextProcessor};

fn main() -> intervene::Result<()> {
    let mut spec = syngen::default_d14_like_spec();
    spec.courses.truncate(4);
    for c in &mut spec.courses {
        c.threads = 150;
    }
    let corpus = syngen::generate(&spec)?;
    let courses = eval::prepare_corpus(&corpus, &TextProcessor::default());
    let r = eval::cross_validate_corpus(&courses, &ExperimentConfig::default())?;
    print!("{}", report::experiment_table(&r));
    Ok(())
}
