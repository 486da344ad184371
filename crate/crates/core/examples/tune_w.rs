//! Sweeps the class weight W on a stratified split and shows the
//! validation F1 of every grid point.

use intervene::eval::{self, stratified_split};
use intervene::features::{FeatureSpace, PreparedThread};
use intervene::model::{self, Dataset, WGrid};
use intervene::{report, syngen, ExperimentConfig, TextProcessor};

fn main() -> intervene::Result<()> {
    let mut spec = syngen::default_d14_like_spec();
    spec.courses.truncate(3);
    let corpus = syngen::generate(&spec)?;
    let courses = eval::prepare_corpus(&corpus, &TextProcessor::default());
    let threads: Vec<&PreparedThread> = courses.iter().flat_map(|c| c.threads.iter()).collect();
    let labels: Vec<bool> = threads.iter().map(|t| t.label).collect();
    let (fit_idx, val_idx) = stratified_split(&labels, 0.25, 1);
    let fit: Vec<&PreparedThread> = fit_idx.iter().map(|&i| threads[i]).collect();

    let cfg = ExperimentConfig::default();
    let space = FeatureSpace::fit(&fit, cfg.features, cfg.df_min)?;
    let encode = |idx: &[usize]| -> intervene::Result<Dataset> {
        let mut d = Dataset::new(space.dim());
        for &i in idx {
            d.push(&space.encode(threads[i]).to_sparse(), threads[i].label)?;
        }
        Ok(d)
    };
    let (train, valid) = (encode(&fit_idx)?, encode(&val_idx)?);
    let tuning = model::tune_class_weight(&train, &valid, &cfg.train_config(train.len(), 1.0), &WGrid::default())?;
    print!("{}", report::tuning_table(&tuning));
    Ok(())
}
