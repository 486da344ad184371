//! Pairwise Cohen's kappa between three annotators, over all items and
//! over a tagged subset.

use std::collections::BTreeMap;

use intervene::eval::{self, AnnotationItem, AnnotationSet};
use intervene::report;

fn main() -> intervene::Result<()> {
    let items = (0..8)
        .map(|i| AnnotationItem {
            id: format!("t{i}"),
            tags: if i < 4 { vec!["errata".into()] } else { vec![] },
        })
        .collect();
    let mut annotators = BTreeMap::new();
    annotators.insert("ann1".to_string(), vec![true, true, false, false, true, false, true, false]);
    annotators.insert("ann2".to_string(), vec![true, false, true, false, true, false, true, true]);
    annotators.insert("ann3".to_string(), vec![true, true, false, false, false, false, true, false]);
    let set = AnnotationSet { items, annotators };

    print!("{}", report::kappa_table(&eval::kappa(&set, None)?));
    println!();
    print!("{}", report::kappa_table(&eval::kappa(&set, Some("errata"))?));
    Ok(())
}
