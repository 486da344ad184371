//! Leave-one-course-out cross validation over a scaled-down version of
//! the 14-course synthetic layout. Pass `full` to run the full 7408
//! threads.

use intervene::{eval, report, syngen, ExperimentConfig, TextProcessor};

fn main() -> intervene::Result<()> {
    let mut spec = syngen::default_d14_like_spec();
    if std::env::args().nth(1).as_deref() != Some("full") {
        for c in &mut spec.courses {
            c.threads = c.threads.div_ceil(8);
        }
    }
    let corpus = syngen::generate(&spec)?;
    let courses = eval::prepare_corpus(&corpus, &TextProcessor::default());
    let r = eval::loo_course_cv(&courses, &ExperimentConfig::default())?;
    print!("{}", report::experiment_table(&r));
    Ok(())
}
