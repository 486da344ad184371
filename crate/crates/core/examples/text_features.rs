//! Canonicalizes forum text, then turns a handful of threads into
//! feature vectors.

use intervene::eval;
use intervene::features::{FeatureSpace, PreparedThread};
use intervene::{syngen, FeatureGroups, TextProcessor};

fn main() -> intervene::Result<()> {
    let prep = TextProcessor::default();
    let raw = "At 12:30 in lecture 4 the slide says $x^2 = 4$, see https://example.org/faq. Is that right?";
    let ct = prep.canonicalize(raw);
    println!("{}", ct.text);
    println!("urls {} timerefs {} math {}", ct.url_count, ct.timeref_count, ct.math_count);
    println!("tokens {:?}", prep.tokens(raw));
    println!("sentences {:?}", prep.split_sentences(&ct.text));
    println!("course refs {}", prep.count_course_refs(&ct.text));

    let mut spec = syngen::default_d14_like_spec();
    spec.courses.truncate(1);
    spec.courses[0].threads = 30;
    let corpus = syngen::generate(&spec)?;
    let threads: Vec<PreparedThread> = corpus.threads().map(|t| PreparedThread::new(t, &prep)).collect();
    let refs: Vec<&PreparedThread> = threads.iter().collect();
    let space = FeatureSpace::fit(&refs, FeatureGroups::all(), 1)?;
    println!("\nvocabulary {} terms, dimension {}", space.vocabulary.len(), space.dim());
    let v = space.encode(&threads[0]);
    println!("{} ({}): {} nonzero entries", threads[0].key(), threads[0].forum_type, v.to_sparse().len());
    println!("feature groups: {}", eval::ExperimentConfig::default().features);
    Ok(())
}
