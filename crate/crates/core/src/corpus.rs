//! Forum corpus data model.
//!
//! A corpus is a set of courses, each holding threads from one of four
//! forum types. Threads hold posts, and posts hold a single level of
//! comments. Everything is timestamped and attributed to either a student
//! or a staff member, which is what lets us label threads, cut them at the
//! first staff contribution, and replay the forum as of any instant.
//!
//! On disk a corpus is JSON Lines, one thread per line.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Subforum category a thread was posted in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForumType {
    Errata,
    Lecture,
    Homework,
    Exam,
}

impl ForumType {
    /// Fixed order used for bit encoding and tables.
    pub const ALL: [ForumType; 4] = [
        ForumType::Errata,
        ForumType::Lecture,
        ForumType::Homework,
        ForumType::Exam,
    ];

    pub fn index(self) -> usize {
        match self {
            ForumType::Errata => 0,
            ForumType::Lecture => 1,
            ForumType::Homework => 2,
            ForumType::Exam => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ForumType::Errata => "errata",
            ForumType::Lecture => "lecture",
            ForumType::Homework => "homework",
            ForumType::Exam => "exam",
        }
    }
}

impl fmt::Display for ForumType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ForumType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ForumType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Validation(format!("unknown forum type {s:?}")))
    }
}

/// Who wrote a post or comment. `Staff` covers instructors, TAs, community
/// TAs and technical staff alike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuthorRole {
    Student,
    Staff,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Comment {
    pub id: String,
    #[serde(rename = "role")]
    pub author_role: AuthorRole,
    #[serde(rename = "ts")]
    pub timestamp: i64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Post {
    pub id: String,
    #[serde(rename = "role")]
    pub author_role: AuthorRole,
    #[serde(rename = "ts")]
    pub timestamp: i64,
    pub text: String,
    #[serde(default)]
    pub comments: Vec<Comment>,
}

/// A forum thread. Serialized field order matches the corpus file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thread {
    pub course_id: String,
    #[serde(rename = "thread_id")]
    pub id: String,
    pub forum_type: ForumType,
    pub title: String,
    pub posts: Vec<Post>,
}

impl Thread {
    /// Iterates every post and comment as `(role, timestamp, text)`.
    pub fn items(&self) -> impl Iterator<Item = (AuthorRole, i64, &str)> + '_ {
        self.posts.iter().flat_map(|p| {
            std::iter::once((p.author_role, p.timestamp, p.text.as_str())).chain(
                p.comments
                    .iter()
                    .map(|c| (c.author_role, c.timestamp, c.text.as_str())),
            )
        })
    }

    pub fn n_comments(&self) -> usize {
        self.posts.iter().map(|p| p.comments.len()).sum()
    }

    /// Number of posts plus comments.
    pub fn n_items(&self) -> usize {
        self.posts.len() + self.n_comments()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    /// Restores the nondecreasing-timestamp ordering of posts and comments.
    /// Sorting is stable, so equal timestamps keep their file order.
    pub fn sort_by_time(&mut self) {
        self.posts.sort_by_key(|p| p.timestamp);
        for p in &mut self.posts {
            p.comments.sort_by_key(|c| c.timestamp);
        }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.posts.is_empty() {
            return Err(format!("thread {} has no posts", self.id));
        }
        if self.id.is_empty() {
            return Err("empty thread_id".into());
        }
        if self.course_id.is_empty() {
            return Err(format!("thread {} has an empty course_id", self.id));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Course {
    pub id: String,
    pub threads: Vec<Thread>,
}

impl Course {
    pub fn new(id: impl Into<String>) -> Self {
        Course {
            id: id.into(),
            threads: Vec::new(),
        }
    }

    pub fn n_intervened(&self) -> usize {
        self.threads.iter().filter(|t| label_thread(t)).count()
    }

    /// Fraction of threads that were intervened; 0 for an empty course.
    pub fn intervention_ratio(&self) -> f64 {
        ratio(self.n_intervened(), self.threads.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Corpus {
    pub courses: Vec<Course>,
}

impl Corpus {
    pub fn n_threads(&self) -> usize {
        self.courses.iter().map(|c| c.threads.len()).sum()
    }

    pub fn threads(&self) -> impl Iterator<Item = &Thread> {
        self.courses.iter().flat_map(|c| c.threads.iter())
    }

    pub fn course(&self, id: &str) -> Option<&Course> {
        self.courses.iter().find(|c| c.id == id)
    }

    /// Builds a corpus from loose threads, grouping them by course in
    /// order of first appearance, and checks every corpus invariant.
    pub fn from_threads(threads: impl IntoIterator<Item = Thread>) -> Result<Self> {
        let mut courses: Vec<Course> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        for mut t in threads {
            t.validate().map_err(Error::Validation)?;
            t.sort_by_time();
            let slot = *index.entry(t.course_id.clone()).or_insert_with(|| {
                courses.push(Course::new(t.course_id.clone()));
                courses.len() - 1
            });
            courses[slot].threads.push(t);
        }
        let corpus = Corpus { courses };
        corpus.validate()?;
        Ok(corpus)
    }

    /// Checks id uniqueness, course membership and the non-empty invariant.
    pub fn validate(&self) -> Result<()> {
        let mut seen_courses = HashSet::new();
        for c in &self.courses {
            if !seen_courses.insert(c.id.as_str()) {
                return Err(Error::Validation(format!("duplicate course id {}", c.id)));
            }
            let mut seen_threads = HashSet::new();
            for t in &c.threads {
                t.validate().map_err(Error::Validation)?;
                if t.course_id != c.id {
                    return Err(Error::Validation(format!(
                        "thread {} carries course_id {} inside course {}",
                        t.id, t.course_id, c.id
                    )));
                }
                if !seen_threads.insert(t.id.as_str()) {
                    return Err(Error::Validation(format!(
                        "duplicate thread id {} in course {}",
                        t.id, c.id
                    )));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn ratio(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

/// Reads a JSON Lines corpus. Blank lines are skipped; posts and comments
/// are re-sorted by timestamp.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn read_corpus(reader: impl BufRead) -> Result<Corpus> {
    let mut threads = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<reader>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let thread: Thread = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        thread.validate().map_err(|message| Error::Parse {
            line: i + 1,
            message,
        })?;
        threads.push(thread);
    }
    if threads.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Corpus::from_threads(threads)
}

pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_corpus(corpus, &mut w).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_corpus(corpus: &Corpus, mut w: impl Write) -> Result<()> {
    for t in corpus.threads() {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n").map_err(|e| Error::io("<writer>", e))?;
    }
    Ok(())
}

/// A thread is intervened iff any post or comment is staff-authored.
pub fn label_thread(t: &Thread) -> bool {
    t.items().any(|(role, _, _)| role == AuthorRole::Staff)
}

/// Timestamp of the earliest staff post or comment.
pub fn first_intervention(t: &Thread) -> Option<i64> {
    t.items()
        .filter(|(role, _, _)| *role == AuthorRole::Staff)
        .map(|(_, ts, _)| ts)
        .min()
}

/// Result of cutting a thread at its first staff contribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated {
    pub thread: Thread,
    /// Label of the original thread.
    pub intervened: bool,
    /// Nothing observable survived: staff spoke first.
    pub degenerate: bool,
}

/// Keeps only content strictly earlier than the first staff post or
/// comment. A staff item at time τ also removes student items stamped τ.
pub fn truncate_at_first_intervention(t: &Thread) -> Truncated {
    let Some(cutoff) = first_intervention(t) else {
        return Truncated {
            thread: t.clone(),
            intervened: false,
            degenerate: t.is_empty(),
        };
    };
    let posts: Vec<Post> = t
        .posts
        .iter()
        .filter(|p| p.timestamp < cutoff && p.author_role == AuthorRole::Student)
        .map(|p| Post {
            comments: p
                .comments
                .iter()
                .filter(|c| c.timestamp < cutoff && c.author_role == AuthorRole::Student)
                .cloned()
                .collect(),
            ..p.clone()
        })
        .collect();
    let degenerate = posts.is_empty();
    Truncated {
        thread: Thread {
            posts,
            ..t.clone()
        },
        intervened: true,
        degenerate,
    }
}

/// The thread as it stood at `cutoff`: posts and comments stamped at or
/// before it. Comments of a post that did not exist yet are dropped with it.
pub fn rewind(t: &Thread, cutoff: i64) -> Thread {
    let posts = t
        .posts
        .iter()
        .filter(|p| p.timestamp <= cutoff)
        .map(|p| Post {
            comments: p
                .comments
                .iter()
                .filter(|c| c.timestamp <= cutoff)
                .cloned()
                .collect(),
            ..p.clone()
        })
        .collect();
    Thread { posts, ..t.clone() }
}

/// Thread and item counts, overall and for intervened threads. `posts`
/// counts posts plus comments.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub threads: usize,
    pub posts: usize,
    pub intervened_threads: usize,
    pub intervened_posts: usize,
    pub ratio: f64,
}

impl Counts {
    fn add_thread(&mut self, t: &Thread) {
        let items = t.n_items();
        self.threads += 1;
        self.posts += items;
        if label_thread(t) {
            self.intervened_threads += 1;
            self.intervened_posts += items;
        }
        self.ratio = ratio(self.intervened_threads, self.threads);
    }

    fn merge(&mut self, other: &Counts) {
        self.threads += other.threads;
        self.posts += other.posts;
        self.intervened_threads += other.intervened_threads;
        self.intervened_posts += other.intervened_posts;
        self.ratio = ratio(self.intervened_threads, self.threads);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CourseStats {
    pub course_id: String,
    pub by_forum: BTreeMap<ForumType, Counts>,
    pub total: Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub courses: Vec<CourseStats>,
    pub by_forum: BTreeMap<ForumType, Counts>,
    pub total: Counts,
}

fn empty_forum_map() -> BTreeMap<ForumType, Counts> {
    ForumType::ALL.into_iter().map(|f| (f, Counts::default())).collect()
}

pub fn compute_stats(c: &Corpus) -> CorpusStats {
    let mut by_forum = empty_forum_map();
    let mut total = Counts::default();
    let mut courses = Vec::with_capacity(c.courses.len());
    for course in &c.courses {
        let mut cs = CourseStats {
            course_id: course.id.clone(),
            by_forum: empty_forum_map(),
            total: Counts::default(),
        };
        for t in &course.threads {
            cs.by_forum.get_mut(&t.forum_type).unwrap().add_thread(t);
            cs.total.add_thread(t);
        }
        for (f, counts) in &cs.by_forum {
            by_forum.get_mut(f).unwrap().merge(counts);
        }
        total.merge(&cs.total);
        courses.push(cs);
    }
    CorpusStats {
        courses,
        by_forum,
        total,
    }
}

/// Smallest number of extra intervened threads lifting `intervened/total`
/// to at least `target`.
pub fn duplicates_needed(intervened: usize, total: usize, target: f64) -> usize {
    if ratio(intervened, total) >= target {
        return 0;
    }
    let estimate = ((target * total as f64 - intervened as f64) / (1.0 - target)).ceil();
    let mut k = estimate.max(0.0) as usize;
    // float rounding can leave the estimate one off either way
    while k > 0 && ratio(intervened + k - 1, total + k - 1) >= target {
        k -= 1;
    }
    while ratio(intervened + k, total + k) < target {
        k += 1;
    }
    k
}

/// Randomly duplicates intervened threads until the course's intervention
/// density reaches `target_density`. Duplicates are appended with ids of
/// the form `<original>#dupN`.
pub fn oversample_to_density(course: &Course, target_density: f64, seed: u64) -> Result<Course> {
    if !(0.0..1.0).contains(&target_density) {
        return Err(Error::InvalidArgument(format!(
            "target density must lie in [0, 1), got {target_density}"
        )));
    }
    let positives: Vec<&Thread> = course.threads.iter().filter(|t| label_thread(t)).collect();
    let k = duplicates_needed(positives.len(), course.threads.len(), target_density);
    if k == 0 {
        return Ok(course.clone());
    }
    if positives.is_empty() {
        return Err(Error::UnreachableDensity(course.id.clone()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = course.clone();
    for n in 1..=k {
        let src = positives[rng.gen_range(0..positives.len())];
        let mut dup = src.clone();
        dup.id = format!("{}#dup{n}", src.id);
        out.threads.push(dup);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn post(id: &str, role: AuthorRole, ts: i64, comments: Vec<Comment>) -> Post {
        Post {
            id: id.into(),
            author_role: role,
            timestamp: ts,
            text: format!("text {id}"),
            comments,
        }
    }

    fn comment(id: &str, role: AuthorRole, ts: i64) -> Comment {
        Comment {
            id: id.into(),
            author_role: role,
            timestamp: ts,
            text: format!("comment {id}"),
        }
    }

    fn thread(id: &str, posts: Vec<Post>) -> Thread {
        Thread {
            course_id: "c1".into(),
            id: id.into(),
            forum_type: ForumType::Lecture,
            title: "title".into(),
            posts,
        }
    }

    use AuthorRole::{Staff, Student};

    #[test]
    fn labels() {
        assert!(!label_thread(&thread("a", vec![post("p1", Student, 1, vec![])])));
        let t = thread(
            "b",
            vec![
                post("p1", Student, 1, vec![]),
                post("p2", Student, 2, vec![comment("c1", Staff, 3)]),
            ],
        );
        assert!(label_thread(&t));
        assert!(label_thread(&thread("c", vec![post("p1", Staff, 1, vec![])])));
    }

    #[test]
    fn truncation_drops_staff_and_later_posts() {
        let t = thread(
            "t",
            vec![
                post("p1", Student, 1, vec![]),
                post("p2", Staff, 2, vec![]),
                post("p3", Student, 3, vec![]),
            ],
        );
        let tr = truncate_at_first_intervention(&t);
        assert!(tr.intervened);
        assert!(!tr.degenerate);
        assert_eq!(tr.thread.posts.len(), 1);
        assert_eq!(tr.thread.posts[0].id, "p1");
    }

    #[test]
    fn truncation_uses_staff_comments() {
        let t = thread(
            "t",
            vec![
                post("p1", Student, 1, vec![comment("c1", Staff, 4)]),
                post("p2", Student, 5, vec![]),
            ],
        );
        let tr = truncate_at_first_intervention(&t);
        assert_eq!(tr.thread.posts.len(), 1);
        assert!(tr.thread.posts[0].comments.is_empty());
        assert!(!label_thread(&tr.thread));
    }

    #[test]
    fn truncation_identity_without_staff() {
        let t = thread(
            "t",
            vec![post("p1", Student, 1, vec![comment("c", Student, 2)])],
        );
        let tr = truncate_at_first_intervention(&t);
        assert_eq!(tr.thread, t);
        assert!(!tr.intervened);
    }

    #[test]
    fn truncation_flags_staff_first() {
        let t = thread(
            "t",
            vec![post("p1", Staff, 1, vec![]), post("p2", Student, 2, vec![])],
        );
        let tr = truncate_at_first_intervention(&t);
        assert!(tr.degenerate);
        assert!(tr.thread.posts.is_empty());
    }

    #[test]
    fn truncation_tie_removes_same_timestamp_student_items() {
        let t = thread(
            "t",
            vec![
                post("p1", Student, 1, vec![comment("c1", Student, 3)]),
                post("p2", Staff, 3, vec![]),
            ],
        );
        let tr = truncate_at_first_intervention(&t);
        assert!(tr.thread.posts[0].comments.is_empty());
    }

    #[test]
    fn rewind_cases() {
        let t = thread(
            "t",
            vec![
                post("a", Student, 1, vec![]),
                post("b", Student, 5, vec![]),
                post("c", Student, 9, vec![]),
            ],
        );
        let ids: Vec<_> = rewind(&t, 6).posts.iter().map(|p| p.id.clone()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert!(rewind(&t, 0).is_empty());
        assert_eq!(rewind(&t, 9), t);
    }

    #[test]
    fn ratio_of_d14_totals() {
        let r = ratio(2932, 7408);
        assert!((r - 0.3958).abs() < 1e-4, "{r}");
    }

    #[test]
    fn stats_edge_cases() {
        let corpus = Corpus::from_threads(vec![thread(
            "t",
            vec![post("p", Student, 1, vec![])],
        )])
        .unwrap();
        let s = compute_stats(&corpus);
        assert_eq!(s.total.ratio, 0.0);
        assert!(s.by_forum.values().all(|c| c.ratio == 0.0));

        let corpus = Corpus::from_threads(vec![thread(
            "t",
            vec![post("p", Student, 1, vec![comment("c", Staff, 2)])],
        )])
        .unwrap();
        let s = compute_stats(&corpus);
        assert_eq!(s.courses[0].total.ratio, 1.0);
        assert_eq!(s.courses[0].total.posts, 2);
        assert_eq!(s.total.intervened_posts, 2);
    }

    #[test]
    fn duplicates_needed_matches_hand_solution() {
        // (2 + k) / (10 + k) >= 0.4  =>  k >= 4
        assert_eq!(duplicates_needed(2, 10, 0.4), 4);
        assert_eq!(duplicates_needed(5, 10, 0.4), 0);
        assert_eq!(duplicates_needed(0, 10, 0.0), 0);
    }

    fn course_with(n: usize, positives: usize) -> Course {
        let mut c = Course::new("c1");
        for i in 0..n {
            let mut posts = vec![post("p", Student, 1, vec![])];
            if i < positives {
                posts.push(post("s", Staff, 2, vec![]));
            }
            c.threads.push(thread(&format!("t{i}"), posts));
        }
        c
    }

    #[test]
    fn oversample_adds_minimal_duplicates() {
        let c = course_with(10, 2);
        let out = oversample_to_density(&c, 0.4, 7).unwrap();
        assert_eq!(out.threads.len(), 14);
        assert_eq!(out.n_intervened(), 6);
        assert_eq!(&out.threads[..10], &c.threads[..]);
        assert!(out.threads[10..].iter().all(|t| t.id.contains("#dup")));
        assert_eq!(out, oversample_to_density(&c, 0.4, 7).unwrap());
    }

    #[test]
    fn oversample_leaves_dense_course_alone() {
        let c = course_with(10, 5);
        assert_eq!(oversample_to_density(&c, 0.4, 1).unwrap(), c);
    }

    #[test]
    fn oversample_unreachable() {
        let c = course_with(10, 0);
        assert!(matches!(
            oversample_to_density(&c, 0.4, 1),
            Err(Error::UnreachableDensity(_))
        ));
    }

    #[test]
    fn rejects_unknown_forum_type() {
        let line = r#"{"course_id":"c","thread_id":"t","forum_type":"project","title":"x","posts":[{"id":"p","role":"student","ts":1,"text":"hi","comments":[]}]}"#;
        let err = read_corpus(line.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("project"), "{msg}");
        assert!(msg.starts_with("line 1"), "{msg}");
    }

    #[test]
    fn rejects_missing_field_and_empty_input() {
        let line = r#"{"course_id":"c","thread_id":"t","forum_type":"exam","posts":[]}"#;
        assert!(matches!(read_corpus(line.as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_corpus(&b"\n\n"[..]), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn rejects_nested_comments_and_votes() {
        let nested = r#"{"course_id":"c","thread_id":"t","forum_type":"exam","title":"x","posts":[{"id":"p","role":"student","ts":1,"text":"hi","comments":[{"id":"c","role":"student","ts":2,"text":"x","comments":[]}]}]}"#;
        assert!(read_corpus(nested.as_bytes()).is_err());
        let votes = r#"{"course_id":"c","thread_id":"t","forum_type":"exam","title":"x","votes":3,"posts":[{"id":"p","role":"student","ts":1,"text":"hi","comments":[]}]}"#;
        assert!(read_corpus(votes.as_bytes()).is_err());
    }

    #[test]
    fn load_sorts_and_groups() {
        let text = concat!(
            r#"{"course_id":"c","thread_id":"t1","forum_type":"exam","title":"x","posts":[{"id":"b","role":"student","ts":5,"text":"b","comments":[]},{"id":"a","role":"student","ts":1,"text":"a","comments":[]}]}"#,
            "\n",
            r#"{"course_id":"c","thread_id":"t2","forum_type":"errata","title":"y","posts":[{"id":"a","role":"staff","ts":1,"text":"a","comments":[]}]}"#,
            "\n"
        );
        let c = read_corpus(text.as_bytes()).unwrap();
        assert_eq!(c.courses.len(), 1);
        assert_eq!(c.courses[0].threads.len(), 2);
        assert_eq!(c.courses[0].threads[0].posts[0].id, "a");
    }

    #[test]
    fn duplicate_thread_ids_rejected() {
        let line = r#"{"course_id":"c","thread_id":"t","forum_type":"exam","title":"x","posts":[{"id":"p","role":"student","ts":1,"text":"hi","comments":[]}]}"#;
        let text = format!("{line}\n{line}\n");
        assert!(matches!(read_corpus(text.as_bytes()), Err(Error::Validation(_))));
    }
}
