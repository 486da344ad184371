//! Trains a model on two synthetic courses, saves it, loads it back and
//! ranks the threads of a third course.

use intervene::artifact::{self, ModelArtifact};
use intervene::{syngen, ExperimentConfig, TextProcessor};

fn main() -> intervene::Result<()> {
    let mut spec = syngen::default_d14_like_spec();
    spec.courses.truncate(3);
    for c in &mut spec.courses {
        c.threads = 200;
    }
    let mut corpus = syngen::generate(&spec)?;
    let held_out = intervene::Corpus {
        courses: vec![corpus.courses.pop().unwrap()],
    };

    let art = artifact::train_artifact(&corpus, &ExperimentConfig::default(), &TextProcessor::default())?;
    println!("W {:.3}, {} of {} weights nonzero", art.w, art.model.n_nonzero(), art.model.dim());

    let path = std::env::temp_dir().join("intervene-example-model.json");
    art.save(&path)?;
    let loaded = ModelArtifact::load(&path)?;

    let ranked = artifact::rank(artifact::score_corpus(&loaded, &held_out)?);
    for s in ranked.iter().take(5) {
        println!("{}/{}  p={:.3}  gold={}", s.course_id, s.thread_id, s.probability, s.gold);
    }
    Ok(())
}
