//! Writes a synthetic corpus and the spec that produced it. Edit the spec
//! JSON and pass it to `intervene synth --spec` to vary the planted
//! signals.

use intervene::{corpus, syngen};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut spec = syngen::default_d14_like_spec();
    spec.seed = 7;
    spec.courses.truncate(2);
    let dir = std::env::temp_dir().join("intervene-synth");
    std::fs::create_dir_all(&dir)?;

    let spec_path = dir.join("spec.json");
    std::fs::write(&spec_path, serde_json::to_string_pretty(&spec)?)?;
    let corpus = syngen::generate(&spec)?;
    let corpus_path = dir.join("corpus.jsonl");
    corpus::save_corpus(&corpus, &corpus_path)?;

    for c in &corpus.courses {
        let rates = &spec.courses.iter().find(|s| s.id == c.id).unwrap().intervention_rate;
        println!(
            "{}: {} threads, ratio {:.2} (errata rate {:.2}, homework rate {:.2})",
            c.id,
            c.threads.len(),
            c.intervention_ratio(),
            rates.errata,
            rates.homework
        );
    }
    println!("wrote {} and {}", spec_path.display(), corpus_path.display());
    Ok(())
}
