//! Trained models as self-contained JSON documents, and scoring with them.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::eval::{self, Classifier, Decision, ExperimentConfig};
use crate::features::{FeatureGroups, FeatureSpace, MinMaxScaler, PreparedThread, Vocabulary};
use crate::model::{ModelParams, Prediction};
use crate::textprep::{TextConfig, TextProcessor};

/// Bumped whenever the artifact layout changes incompatibly.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format_version: u32,
    pub features: FeatureGroups,
    pub lambda: f64,
    pub w: f64,
    /// Set when the training data held a single class.
    pub constant: Option<bool>,
    pub model: ModelParams,
    pub vocabulary: Vocabulary,
    pub scaler: MinMaxScaler,
    pub text: TextConfig,
    pub notes: Vec<String>,
}

impl ModelArtifact {
    pub fn new(classifier: &Classifier, text: &TextConfig) -> Self {
        let (constant, model) = match &classifier.decision {
            Decision::Linear(p) => (None, p.clone()),
            Decision::Constant(label) => (Some(*label), ModelParams::zeros(classifier.space.dim())),
        };
        ModelArtifact {
            format_version: FORMAT_VERSION,
            features: classifier.space.groups,
            lambda: classifier.lambda,
            w: classifier.w,
            constant,
            model,
            vocabulary: classifier.space.vocabulary.clone(),
            scaler: classifier.space.scaler.clone(),
            text: text.clone(),
            notes: classifier.notes.clone(),
        }
    }

    pub fn classifier(&self) -> Classifier {
        Classifier {
            space: FeatureSpace {
                groups: self.features,
                vocabulary: self.vocabulary.clone(),
                scaler: self.scaler.clone(),
            },
            decision: match self.constant {
                Some(label) => Decision::Constant(label),
                None => Decision::Linear(self.model.clone()),
            },
            w: self.w,
            lambda: self.lambda,
            notes: self.notes.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses an artifact, rejecting other format versions before looking
    /// at the rest of the document.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("format_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::InvalidArgument("artifact has no format_version".into()))?;
        if found != u64::from(FORMAT_VERSION) {
            return Err(Error::ArtifactVersion {
                expected: FORMAT_VERSION,
                found: u32::try_from(found).unwrap_or(u32::MAX),
            });
        }
        let artifact: ModelArtifact = serde_json::from_value(value)?;
        let space_dim = artifact.classifier().space.dim();
        if artifact.model.dim() != space_dim {
            return Err(Error::DimensionMismatch {
                expected: space_dim,
                got: artifact.model.dim(),
            });
        }
        Ok(artifact)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Trains on every usable thread of `corpus`, tuning W on an inner split
/// unless `cfg.fixed_w` is set.
pub fn train_artifact(corpus: &Corpus, cfg: &ExperimentConfig, prep: &TextProcessor) -> Result<ModelArtifact> {
    let courses = eval::prepare_corpus(corpus, prep);
    let threads: Vec<&PreparedThread> = courses.iter().flat_map(|c| c.threads.iter()).collect();
    if threads.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let (classifier, _) = eval::fit_classifier(&threads, cfg, cfg.seed)?;
    Ok(ModelArtifact::new(&classifier, prep.config()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreadScore {
    pub course_id: String,
    pub thread_id: String,
    pub probability: f64,
    pub label: bool,
    /// Whether staff did intervene, as recorded in the corpus.
    pub gold: bool,
}

/// Scores every thread that has student content before any staff reply,
/// in corpus order.
pub fn score_corpus(artifact: &ModelArtifact, corpus: &Corpus) -> Result<Vec<ThreadScore>> {
    let prep = TextProcessor::new(artifact.text.clone())?;
    let classifier = artifact.classifier();
    Ok(eval::prepare_corpus(corpus, &prep)
        .iter()
        .flat_map(|c| c.threads.iter())
        .map(|t| {
            let Prediction { probability, label } = classifier.predict(t);
            ThreadScore {
                course_id: t.course_id.clone(),
                thread_id: t.thread_id.clone(),
                probability,
                label,
                gold: t.label,
            }
        })
        .collect())
}

/// Scores sorted by descending probability; ties keep corpus order.
pub fn rank(mut scores: Vec<ThreadScore>) -> Vec<ThreadScore> {
    scores.sort_by(|a, b| b.probability.total_cmp(&a.probability));
    scores
}
