//! Thread feature extraction.
//!
//! A thread becomes a sparse vector with three parts, laid out in this
//! order when the corresponding groups are enabled:
//!
//! 1. L2-normalized tf×itf unigram weights, one dimension per vocabulary
//!    term;
//! 2. four forum-type bits (errata, lecture, homework, exam);
//! 3. max-min scaled metadata counts.
//!
//! Vocabulary and scaler are fitted on training threads only.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{truncate_at_first_intervention, ForumType, Thread};
use crate::error::{Error, Result};
use crate::model::SparseVector;
use crate::textprep::TextProcessor;

/// Title, post and comment text of a thread, tokenized.
pub fn thread_tokens(t: &Thread, prep: &TextProcessor) -> Vec<String> {
    let mut tokens = prep.tokens(&t.title);
    for (_, _, text) in t.items() {
        tokens.extend(prep.tokens(text));
    }
    tokens
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    /// (term, thread_df), sorted by term; a term's index is its position.
    terms: Vec<(String, usize)>,
    index: HashMap<String, usize>,
    total_threads: usize,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    total_threads: usize,
    terms: Vec<(String, usize)>,
}

impl From<VocabularyRepr> for Vocabulary {
    fn from(r: VocabularyRepr) -> Self {
        Vocabulary::from_sorted(r.terms, r.total_threads)
    }
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        VocabularyRepr {
            total_threads: v.total_threads,
            terms: v.terms,
        }
    }
}

impl Vocabulary {
    fn from_sorted(terms: Vec<(String, usize)>, total_threads: usize) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.clone(), i))
            .collect();
        Vocabulary {
            terms,
            index,
            total_threads,
        }
    }

    /// Builds a vocabulary from already-tokenized threads. Terms seen in
    /// fewer than `df_min` threads are left out.
    pub fn from_token_lists<'a, I, T>(threads: I, df_min: usize) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[String]> + 'a,
    {
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        let mut total = 0;
        for tokens in threads {
            total += 1;
            let mut distinct: Vec<&String> = tokens.as_ref().iter().collect();
            distinct.sort_unstable();
            distinct.dedup();
            for term in distinct {
                *df.entry(term.clone()).or_insert(0) += 1;
            }
        }
        if total == 0 {
            return Err(Error::InvalidArgument("empty training set".into()));
        }
        let terms = df.into_iter().filter(|(_, n)| *n >= df_min.max(1)).collect();
        Ok(Vocabulary::from_sorted(terms, total))
    }

    /// Vocabulary over the given (already truncated) training threads.
    pub fn build(threads: &[Thread], prep: &TextProcessor, df_min: usize) -> Result<Self> {
        Vocabulary::from_token_lists(threads.iter().map(|t| thread_tokens(t, prep)), df_min)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_threads(&self) -> usize {
        self.total_threads
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn thread_df(&self, term: &str) -> Option<usize> {
        self.index_of(term).map(|i| self.terms[i].1)
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(|(t, _)| t.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.terms.iter().map(|(t, df)| (t.as_str(), *df))
    }

    /// ln(total_threads / thread_df) for the term at `index`.
    pub fn itf(&self, index: usize) -> f64 {
        (self.total_threads as f64 / self.terms[index].1 as f64).ln()
    }
}

/// L2-normalized tf×itf weights, sorted by term index. Out-of-vocabulary
/// tokens are ignored; a thread whose terms all have zero weight yields
/// the empty vector.
pub fn tf_itf_vector(tokens: &[String], vocab: &Vocabulary) -> SparseVector {
    let mut tf: BTreeMap<usize, usize> = BTreeMap::new();
    for tok in tokens {
        if let Some(i) = vocab.index_of(tok) {
            *tf.entry(i).or_insert(0) += 1;
        }
    }
    let raw: Vec<(usize, f64)> = tf
        .into_iter()
        .map(|(i, n)| (i, n as f64 * vocab.itf(i)))
        .filter(|(_, w)| *w != 0.0)
        .collect();
    let norm = raw.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Vec::new();
    }
    raw.into_iter().map(|(i, w)| (i, w / norm)).collect()
}

pub fn tf_itf_thread(t: &Thread, vocab: &Vocabulary, prep: &TextProcessor) -> SparseVector {
    tf_itf_vector(&thread_tokens(t, prep), vocab)
}

/// Metadata counts for one thread.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetaFeatures {
    pub course_refs: usize,
    pub affirmations: usize,
    pub n_posts: usize,
    pub n_comments: usize,
    pub n_items: usize,
    pub avg_comments_per_post: f64,
    pub n_sentences: usize,
    pub n_urls: usize,
    pub n_timerefs: usize,
}

pub const META_DIM: usize = 9;

impl MetaFeatures {
    pub fn to_array(&self) -> [f64; META_DIM] {
        [
            self.course_refs as f64,
            self.affirmations as f64,
            self.n_posts as f64,
            self.n_comments as f64,
            self.n_items as f64,
            self.avg_comments_per_post,
            self.n_sentences as f64,
            self.n_urls as f64,
            self.n_timerefs as f64,
        ]
    }
}

/// Counts over every retained post and comment. URL and time-reference
/// counts also include the title.
pub fn extract_meta(t: &Thread, prep: &TextProcessor) -> MetaFeatures {
    let title = prep.canonicalize(&t.title);
    let mut m = MetaFeatures {
        course_refs: prep.count_course_refs(&title.text),
        affirmations: prep.count_affirmations(t),
        n_posts: t.posts.len(),
        n_comments: t.n_comments(),
        n_urls: title.url_count,
        n_timerefs: title.timeref_count,
        ..Default::default()
    };
    m.n_items = m.n_posts + m.n_comments;
    m.avg_comments_per_post = if m.n_posts == 0 {
        0.0
    } else {
        m.n_comments as f64 / m.n_posts as f64
    };
    for (_, _, text) in t.items() {
        let ct = prep.canonicalize(text);
        m.n_urls += ct.url_count;
        m.n_timerefs += ct.timeref_count;
        m.course_refs += prep.count_course_refs(&ct.text);
        m.n_sentences += prep.split_sentences(&ct.text).len();
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: [f64; META_DIM],
    pub max: [f64; META_DIM],
}

impl MinMaxScaler {
    pub fn fit(metas: &[MetaFeatures]) -> Result<Self> {
        let first = metas
            .first()
            .ok_or_else(|| Error::InvalidArgument("cannot fit scaler on no instances".into()))?
            .to_array();
        let (mut min, mut max) = (first, first);
        for m in &metas[1..] {
            for (k, v) in m.to_array().into_iter().enumerate() {
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        Ok(MinMaxScaler { min, max })
    }

    /// Maps each feature to `(x - min) / (max - min)` clamped to `[0, 1]`.
    /// Features that were constant in training map to 0.
    pub fn apply(&self, meta: &MetaFeatures) -> [f64; META_DIM] {
        let mut out = meta.to_array();
        for (k, v) in out.iter_mut().enumerate() {
            let span = self.max[k] - self.min[k];
            *v = if span > 0.0 {
                ((*v - self.min[k]) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
        out
    }
}

/// One toggleable feature group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureGroup {
    Unigrams,
    ForumType,
    CourseRef,
    Affirmation,
    ThreadProps,
    NumSents,
    NonlexRef,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 7] = [
        FeatureGroup::Unigrams,
        FeatureGroup::ForumType,
        FeatureGroup::CourseRef,
        FeatureGroup::Affirmation,
        FeatureGroup::ThreadProps,
        FeatureGroup::NumSents,
        FeatureGroup::NonlexRef,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::Unigrams => "unigrams",
            FeatureGroup::ForumType => "forum_type",
            FeatureGroup::CourseRef => "course_ref",
            FeatureGroup::Affirmation => "affirmation",
            FeatureGroup::ThreadProps => "thread_props",
            FeatureGroup::NumSents => "num_sents",
            FeatureGroup::NonlexRef => "nonlex_ref",
        }
    }

    /// Positions in [`MetaFeatures::to_array`] this group contributes.
    fn meta_slots(self) -> &'static [usize] {
        match self {
            FeatureGroup::Unigrams | FeatureGroup::ForumType => &[],
            FeatureGroup::CourseRef => &[0],
            FeatureGroup::Affirmation => &[1],
            FeatureGroup::ThreadProps => &[2, 3, 4, 5],
            FeatureGroup::NumSents => &[6],
            FeatureGroup::NonlexRef => &[7, 8],
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl FromStr for FeatureGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureGroup::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown feature group {s:?}")))
    }
}

/// Set of enabled feature groups. Text form is a comma-separated list of
/// group names, or `all`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FeatureGroups(u8);

impl FeatureGroups {
    pub fn all() -> Self {
        FeatureGroups::from_groups(FeatureGroup::ALL)
    }

    pub fn none() -> Self {
        FeatureGroups(0)
    }

    pub fn from_groups(groups: impl IntoIterator<Item = FeatureGroup>) -> Self {
        FeatureGroups(groups.into_iter().fold(0, |acc, g| acc | g.bit()))
    }

    pub fn contains(self, g: FeatureGroup) -> bool {
        self.0 & g.bit() != 0
    }

    pub fn with(self, g: FeatureGroup) -> Self {
        FeatureGroups(self.0 | g.bit())
    }

    pub fn without(self, g: FeatureGroup) -> Self {
        FeatureGroups(self.0 & !g.bit())
    }

    pub fn iter(self) -> impl Iterator<Item = FeatureGroup> {
        FeatureGroup::ALL.into_iter().filter(move |g| self.contains(*g))
    }

    fn meta_slots(self) -> Vec<usize> {
        self.iter().flat_map(|g| g.meta_slots().iter().copied()).collect()
    }
}

impl fmt::Display for FeatureGroups {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.iter().map(|g| g.name()).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for FeatureGroups {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "all" {
            return Ok(FeatureGroups::all());
        }
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(FeatureGroup::from_str)
            .collect::<Result<Vec<_>>>()
            .map(FeatureGroups::from_groups)
    }
}

impl Serialize for FeatureGroups {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FeatureGroups {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    /// Number of term dimensions (vocabulary size when unigrams are on).
    pub term_dim: usize,
    pub terms: SparseVector,
    pub forum_bits: Option<[bool; 4]>,
    pub dense: Vec<f64>,
}

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.term_dim + if self.forum_bits.is_some() { 4 } else { 0 } + self.dense.len()
    }

    /// Flattens into a single sparse vector; zero entries are omitted.
    pub fn to_sparse(&self) -> SparseVector {
        let mut out = self.terms.clone();
        let mut offset = self.term_dim;
        if let Some(bits) = self.forum_bits {
            out.extend(
                bits.iter()
                    .enumerate()
                    .filter(|(_, b)| **b)
                    .map(|(k, _)| (offset + k, 1.0)),
            );
            offset += 4;
        }
        out.extend(
            self.dense
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(k, v)| (offset + k, *v)),
        );
        out
    }
}

pub fn forum_bits(f: ForumType) -> [bool; 4] {
    let mut bits = [false; 4];
    bits[f.index()] = true;
    bits
}

/// A thread reduced to what the feature extractor needs: its truncated
/// token stream, metadata and gold label.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedThread {
    pub course_id: String,
    pub thread_id: String,
    pub forum_type: ForumType,
    pub label: bool,
    /// Staff spoke first, so nothing is observable before intervention.
    pub degenerate: bool,
    pub tokens: Vec<String>,
    pub meta: MetaFeatures,
}

impl PreparedThread {
    /// Truncates at the first intervention and extracts tokens and counts.
    pub fn new(t: &Thread, prep: &TextProcessor) -> Self {
        let tr = truncate_at_first_intervention(t);
        PreparedThread {
            course_id: t.course_id.clone(),
            thread_id: t.id.clone(),
            forum_type: t.forum_type,
            label: tr.intervened,
            degenerate: tr.degenerate,
            tokens: thread_tokens(&tr.thread, prep),
            meta: extract_meta(&tr.thread, prep),
        }
    }

    /// `course_id/thread_id`, unique across a corpus.
    pub fn key(&self) -> String {
        format!("{}/{}", self.course_id, self.thread_id)
    }
}

/// Fitted vocabulary and scaler for a set of feature groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpace {
    pub groups: FeatureGroups,
    pub vocabulary: Vocabulary,
    pub scaler: MinMaxScaler,
}

impl FeatureSpace {
    pub fn fit(threads: &[&PreparedThread], groups: FeatureGroups, df_min: usize) -> Result<Self> {
        let vocabulary = if groups.contains(FeatureGroup::Unigrams) {
            Vocabulary::from_token_lists(threads.iter().map(|t| &t.tokens), df_min)?
        } else {
            Vocabulary::from_token_lists(threads.iter().map(|_| Vec::<String>::new()), 1)?
        };
        let metas: Vec<MetaFeatures> = threads.iter().map(|t| t.meta).collect();
        Ok(FeatureSpace {
            groups,
            vocabulary,
            scaler: MinMaxScaler::fit(&metas)?,
        })
    }

    pub fn dim(&self) -> usize {
        let terms = if self.groups.contains(FeatureGroup::Unigrams) {
            self.vocabulary.len()
        } else {
            0
        };
        let bits = if self.groups.contains(FeatureGroup::ForumType) { 4 } else { 0 };
        terms + bits + self.groups.meta_slots().len()
    }

    pub fn encode(&self, t: &PreparedThread) -> FeatureVector {
        self.encode_parts(&t.tokens, t.forum_type, &t.meta)
    }

    fn encode_parts(&self, tokens: &[String], forum: ForumType, meta: &MetaFeatures) -> FeatureVector {
        let (term_dim, terms) = if self.groups.contains(FeatureGroup::Unigrams) {
            (self.vocabulary.len(), tf_itf_vector(tokens, &self.vocabulary))
        } else {
            (0, Vec::new())
        };
        let scaled = self.scaler.apply(meta);
        FeatureVector {
            term_dim,
            terms,
            forum_bits: self
                .groups
                .contains(FeatureGroup::ForumType)
                .then(|| forum_bits(forum)),
            dense: self.groups.meta_slots().into_iter().map(|k| scaled[k]).collect(),
        }
    }
}

/// Feature vector of a raw thread (truncated first).
pub fn assemble(t: &Thread, space: &FeatureSpace, prep: &TextProcessor) -> FeatureVector {
    space.encode(&PreparedThread::new(t, prep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AuthorRole, Post};

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn document_frequencies() {
        let threads = [toks("gradient descent"), toks("gradient gradient"), toks("loss")];
        let v = Vocabulary::from_token_lists(&threads, 1).unwrap();
        assert_eq!(v.thread_df("gradient"), Some(2));
        assert_eq!(v.total_threads(), 3);
        assert_eq!(v.len(), 3);
        assert_eq!(v.index_of("descent"), Some(0));
        assert_eq!(v, Vocabulary::from_token_lists(&threads, 1).unwrap());
        let v2 = Vocabulary::from_token_lists(&threads, 2).unwrap();
        assert_eq!(v2.len(), 1);
        assert!(Vocabulary::from_token_lists(Vec::<Vec<String>>::new(), 1).is_err());
    }

    #[test]
    fn raw_weight_before_normalization() {
        let threads = [toks("gradient gradient loss"), toks("gradient"), toks("loss")];
        let v = Vocabulary::from_token_lists(&threads, 1).unwrap();
        let i = v.index_of("gradient").unwrap();
        let raw = 2.0 * v.itf(i);
        assert!((raw - 0.8109).abs() < 1e-4, "{raw}");
    }

    #[test]
    fn ubiquitous_term_has_zero_weight() {
        let threads = [toks("a b"), toks("a"), toks("a c")];
        let v = Vocabulary::from_token_lists(&threads, 1).unwrap();
        assert_eq!(v.itf(v.index_of("a").unwrap()), 0.0);
        assert!(tf_itf_vector(&toks("a a"), &v).is_empty());
    }

    #[test]
    fn single_term_normalizes_to_one() {
        let threads = [toks("a b"), toks("a"), toks("c")];
        let v = Vocabulary::from_token_lists(&threads, 1).unwrap();
        let w = tf_itf_vector(&toks("b b b zzz"), &v);
        assert_eq!(w, vec![(v.index_of("b").unwrap(), 1.0)]);
    }

    #[test]
    fn minmax() {
        let metas: Vec<MetaFeatures> = [2, 4, 10]
            .iter()
            .map(|&n| MetaFeatures {
                n_posts: n,
                n_comments: 3,
                ..Default::default()
            })
            .collect();
        let s = MinMaxScaler::fit(&metas).unwrap();
        let probe = |n| {
            s.apply(&MetaFeatures {
                n_posts: n,
                n_comments: 3,
                ..Default::default()
            })
        };
        assert_eq!(probe(4)[2], 0.25);
        assert_eq!(probe(20)[2], 1.0);
        assert_eq!(probe(0)[2], 0.0);
        assert_eq!(probe(4)[3], 0.0);
    }

    fn post(ts: i64, text: &str, comments: usize) -> Post {
        Post {
            id: format!("p{ts}"),
            author_role: AuthorRole::Student,
            timestamp: ts,
            text: text.into(),
            comments: (0..comments)
                .map(|k| crate::corpus::Comment {
                    id: format!("c{ts}-{k}"),
                    author_role: AuthorRole::Student,
                    timestamp: ts + 1 + k as i64,
                    text: "ok.".into(),
                })
                .collect(),
        }
    }

    fn thread(forum: ForumType, posts: Vec<Post>) -> Thread {
        Thread {
            course_id: "c".into(),
            id: "t".into(),
            forum_type: forum,
            title: "question".into(),
            posts,
        }
    }

    #[test]
    fn meta_counts() {
        let prep = TextProcessor::default();
        let t = thread(
            ForumType::Lecture,
            vec![
                post(1, "see https://a.org/x. Also 3:45! Why", 2),
                post(10, "slide 4 helps.", 1),
            ],
        );
        let m = extract_meta(&t, &prep);
        assert_eq!((m.n_posts, m.n_comments, m.n_items), (2, 3, 5));
        assert_eq!(m.avg_comments_per_post, 1.5);
        assert_eq!((m.n_urls, m.n_timerefs), (1, 1));
        assert_eq!(m.course_refs, 1);
        assert_eq!(m.n_sentences, 3 + 1 + 3);

        let m = extract_meta(&thread(ForumType::Exam, vec![post(1, "x", 0)]), &prep);
        assert_eq!(m.avg_comments_per_post, 0.0);
    }

    #[test]
    fn group_parsing() {
        let g: FeatureGroups = "unigrams,forum_type".parse().unwrap();
        assert!(g.contains(FeatureGroup::ForumType));
        assert!(!g.contains(FeatureGroup::NumSents));
        assert_eq!(g.to_string(), "unigrams,forum_type");
        assert_eq!("all".parse::<FeatureGroups>().unwrap(), FeatureGroups::all());
        assert!("unigrams,votes".parse::<FeatureGroups>().is_err());
    }

    fn space_for(groups: FeatureGroups) -> (FeatureSpace, PreparedThread) {
        let prep = TextProcessor::default();
        let a = PreparedThread::new(&thread(ForumType::Lecture, vec![post(1, "alpha beta.", 1)]), &prep);
        let b = PreparedThread::new(
            &thread(ForumType::Exam, vec![post(1, "beta gamma.", 0), post(5, "more", 0)]),
            &prep,
        );
        (FeatureSpace::fit(&[&a, &b], groups, 1).unwrap(), a)
    }

    #[test]
    fn assemble_layouts() {
        let (space, a) = space_for(FeatureGroups::all());
        let fv = space.encode(&a);
        assert_eq!(fv.forum_bits, Some([false, true, false, false]));
        assert_eq!(fv.dense.len(), META_DIM);
        assert_eq!(fv.dim(), space.dim());

        let (space, a) = space_for(FeatureGroups::from_groups([FeatureGroup::Unigrams]));
        let fv = space.encode(&a);
        assert!(fv.dense.is_empty());
        assert!(fv.forum_bits.is_none());
        assert_eq!(fv.dim(), space.vocabulary.len());
    }

    #[test]
    fn nonlex_toggle_changes_only_its_dims() {
        let full = FeatureGroups::all();
        let without = full.without(FeatureGroup::NonlexRef);
        let (s1, a) = space_for(full);
        let (s2, _) = space_for(without);
        let (v1, v2) = (s1.encode(&a), s2.encode(&a));
        assert_eq!(v1.dim() - v2.dim(), 2);
        assert_eq!(v1.terms, v2.terms);
        assert_eq!(&v1.dense[..v2.dense.len()], &v2.dense[..]);
    }

    #[test]
    fn sparse_layout_offsets() {
        let fv = FeatureVector {
            term_dim: 3,
            terms: vec![(1, 1.0)],
            forum_bits: Some([false, false, true, false]),
            dense: vec![0.0, 0.5],
        };
        assert_eq!(fv.to_sparse(), vec![(1, 1.0), (5, 1.0), (8, 0.5)]);
        assert_eq!(fv.dim(), 9);
    }
}
