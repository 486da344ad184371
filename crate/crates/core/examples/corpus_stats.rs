//! Generates a small synthetic corpus and prints its per-course and
//! per-forum counts.

use intervene::{corpus, report, syngen};

fn main() -> intervene::Result<()> {
    let mut spec = syngen::default_d14_like_spec();
    for c in &mut spec.courses {
        c.threads = c.threads.div_ceil(10);
    }
    let corpus = syngen::generate(&spec)?;
    print!("{}", report::stats_table(&corpus::compute_stats(&corpus)));
    Ok(())
}
