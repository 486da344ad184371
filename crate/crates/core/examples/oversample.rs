//! Duplicates intervened threads of sparse courses up to a target density.

use intervene::corpus::{duplicates_needed, oversample_to_density};
use intervene::syngen;

fn main() -> intervene::Result<()> {
    println!("2 of 10 intervened, target 0.4: add {}", duplicates_needed(2, 10, 0.4));

    let mut spec = syngen::default_d14_like_spec();
    spec.courses.truncate(5);
    let corpus = syngen::generate(&spec)?;
    let target = 0.4;
    for (i, c) in corpus.courses.iter().enumerate() {
        match oversample_to_density(c, target, i as u64) {
            Ok(out) => println!(
                "{:<16} {:.3} -> {:.3} ({} duplicates)",
                c.id,
                c.intervention_ratio(),
                out.intervention_ratio(),
                out.threads.len() - c.threads.len()
            ),
            Err(e) => println!("{:<16} {e}", c.id),
        }
    }
    Ok(())
}
