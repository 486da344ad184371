//! The thirteen feature configurations under leave-one-course-out runs:
//! groups added one at a time, then each removed from the full set.

use intervene::{eval, report, syngen, ExperimentConfig, TextProcessor};

fn main() -> intervene::Result<()> {
    let mut spec = syngen::default_d14_like_spec();
    for c in &mut spec.courses {
        c.threads = c.threads.div_ceil(10);
    }
    let corpus = syngen::generate(&spec)?;
    let courses = eval::prepare_corpus(&corpus, &TextProcessor::default());
    let rows = eval::feature_study(&courses, &ExperimentConfig::default())?;
    print!("{}", report::study_table(&rows));
    Ok(())
}
