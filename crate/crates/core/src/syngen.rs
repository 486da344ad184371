//! Seeded synthetic forum corpora with planted, recoverable signals.
//!
//! Real forum dumps are not redistributable, so experiments run on
//! generated courses instead. Labels are drawn per forum type, intervened
//! threads get a staff reply after the student content (followed by a few
//! more student posts, so truncation has work to do), and the student
//! content carries class-conditional word, structure and reference
//! signals whose strengths are all part of the [`CorpusSpec`].

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{AuthorRole, Comment, Corpus, Course, ForumType, Post, Thread};
use crate::error::{Error, Result};
use crate::eval::derive_seed;

/// One value per forum type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerForum<T> {
    pub errata: T,
    pub lecture: T,
    pub homework: T,
    pub exam: T,
}

impl<T: Copy> PerForum<T> {
    pub fn get(&self, f: ForumType) -> T {
        match f {
            ForumType::Errata => self.errata,
            ForumType::Lecture => self.lecture,
            ForumType::Homework => self.homework,
            ForumType::Exam => self.exam,
        }
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> PerForum<U> {
        PerForum {
            errata: f(self.errata),
            lecture: f(self.lecture),
            homework: f(self.homework),
            exam: f(self.exam),
        }
    }

    fn values(&self) -> [T; 4] {
        [self.errata, self.lecture, self.homework, self.exam]
    }
}

/// A parameter that differs between intervened and other threads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ByClass<T> {
    pub intervened: T,
    pub other: T,
}

impl<T: Copy> ByClass<T> {
    pub fn get(&self, intervened: bool) -> T {
        if intervened {
            self.intervened
        } else {
            self.other
        }
    }

    pub fn same(v: T) -> Self {
        ByClass {
            intervened: v,
            other: v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CourseSpec {
    pub id: String,
    pub threads: usize,
    /// Relative frequency of each forum type; normalized on use.
    pub forum_mix: PerForum<f64>,
    pub intervention_rate: PerForum<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabularySpec {
    pub background_terms: usize,
    /// Half lean towards intervention, half away from it.
    pub signal_terms: usize,
    /// Per-sentence chance, in the opening post, of a term from the
    /// matching signal half. Titles get half this rate.
    pub signal_rate: ByClass<f64>,
    /// Per-sentence chance, in the opening post, of a term from the
    /// opposite signal half.
    pub counter_signal_rate: ByClass<f64>,
    pub words_per_sentence: (usize, usize),
    pub stopword_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureSpec {
    /// Student posts after the opening post, inclusive range.
    pub extra_posts: ByClass<(usize, usize)>,
    pub comments_per_post: ByClass<(usize, usize)>,
    pub sentences_per_item: ByClass<(usize, usize)>,
    /// Per-item injection chances.
    pub url_rate: ByClass<f64>,
    pub timeref_rate: ByClass<f64>,
    pub course_ref_rate: ByClass<f64>,
    pub math_rate: ByClass<f64>,
    /// Per-reply chance that a student reply is an agreement.
    pub affirmation_rate: ByClass<f64>,
    /// Share of interventions delivered as a comment rather than a post.
    pub staff_comment_share: f64,
    /// Student posts after the intervention, inclusive range.
    pub posts_after_intervention: (usize, usize),
    /// Largest gap between consecutive timestamps, in seconds.
    pub max_gap: i64,
    /// Chance that a thread's content is drawn as if it had the other
    /// label: interventions are partly arbitrary. Drawn separately for the
    /// wording, length, references and agreement of a thread.
    pub arbitrary_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub courses: Vec<CourseSpec>,
    pub vocabulary: VocabularySpec,
    pub structure: StructureSpec,
}

impl Default for VocabularySpec {
    fn default() -> Self {
        VocabularySpec {
            background_terms: 400,
            signal_terms: 20,
            signal_rate: ByClass {
                intervened: 0.40,
                other: 0.20,
            },
            counter_signal_rate: ByClass {
                intervened: 0.20,
                other: 0.45,
            },
            words_per_sentence: (4, 9),
            stopword_rate: 0.3,
        }
    }
}

impl Default for StructureSpec {
    fn default() -> Self {
        StructureSpec {
            extra_posts: ByClass {
                intervened: (1, 5),
                other: (0, 2),
            },
            comments_per_post: ByClass {
                intervened: (1, 3),
                other: (0, 1),
            },
            sentences_per_item: ByClass::same((1, 3)),
            url_rate: ByClass {
                intervened: 0.14,
                other: 0.05,
            },
            timeref_rate: ByClass {
                intervened: 0.12,
                other: 0.04,
            },
            course_ref_rate: ByClass::same(0.10),
            math_rate: ByClass::same(0.05),
            affirmation_rate: ByClass {
                intervened: 0.30,
                other: 0.12,
            },
            staff_comment_share: 0.3,
            posts_after_intervention: (0, 2),
            max_gap: 3600,
            arbitrary_rate: 0.2,
        }
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} = {p} is not a probability")))
            }
        };
        let pair = |name: &str, p: ByClass<f64>| {
            prob(name, p.intervened)?;
            prob(name, p.other)
        };
        let range = |name: &str, r: ByClass<(usize, usize)>| {
            if r.intervened.0 > r.intervened.1 || r.other.0 > r.other.1 {
                Err(Error::InvalidArgument(format!("{name} has min > max")))
            } else {
                Ok(())
            }
        };
        if self.courses.is_empty() {
            return Err(Error::InvalidArgument("spec has no courses".into()));
        }
        for c in &self.courses {
            if c.threads == 0 {
                return Err(Error::InvalidArgument(format!("course {} has no threads", c.id)));
            }
            for r in c.intervention_rate.values() {
                prob(&format!("{} intervention rate", c.id), r)?;
            }
            let mix = c.forum_mix.values();
            if mix.iter().any(|m| *m < 0.0 || !m.is_finite()) || mix.iter().sum::<f64>() <= 0.0 {
                return Err(Error::InvalidArgument(format!("course {} has a bad forum mix", c.id)));
            }
        }
        let v = &self.vocabulary;
        pair("signal_rate", v.signal_rate)?;
        pair("counter_signal_rate", v.counter_signal_rate)?;
        prob("stopword_rate", v.stopword_rate)?;
        if v.background_terms == 0 || v.words_per_sentence.0 == 0 || v.words_per_sentence.0 > v.words_per_sentence.1 {
            return Err(Error::InvalidArgument("bad vocabulary spec".into()));
        }
        let s = &self.structure;
        pair("url_rate", s.url_rate)?;
        pair("timeref_rate", s.timeref_rate)?;
        pair("course_ref_rate", s.course_ref_rate)?;
        pair("math_rate", s.math_rate)?;
        pair("affirmation_rate", s.affirmation_rate)?;
        prob("staff_comment_share", s.staff_comment_share)?;
        prob("arbitrary_rate", s.arbitrary_rate)?;
        range("extra_posts", s.extra_posts)?;
        range("comments_per_post", s.comments_per_post)?;
        range("sentences_per_item", s.sentences_per_item)?;
        range("posts_after_intervention", ByClass::same(s.posts_after_intervention))?;
        if s.sentences_per_item.intervened.0 == 0 || s.sentences_per_item.other.0 == 0 || s.max_gap < 1 {
            return Err(Error::InvalidArgument("bad structure spec".into()));
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Thread counts per forum type in the reference 14-course collection
/// (errata, lecture, homework, exam).
pub const D14_FORUM_MIX: PerForum<f64> = PerForum {
    errata: 326.0,
    lecture: 2392.0,
    homework: 3868.0,
    exam: 822.0,
};

/// Log-odds shift of each forum type's intervention rate relative to the
/// course rate. Approximate: the reference figure is not numerically
/// legible, only its ordering.
pub const DEFAULT_FORUM_SHIFT: PerForum<f64> = PerForum {
    errata: 2.0,
    lecture: 0.0,
    homework: -1.2,
    exam: 1.2,
};

/// `(course id, threads, intervention ratio)` of the reference courses.
pub const D14_COURSES: [(&str, usize, f64); 14] = [
    ("ml-005", 2058, 0.45),
    ("rprog-003", 1123, 0.32),
    ("calc1-003", 965, 0.60),
    ("smac-001", 632, 0.17),
    ("compilers-004", 624, 0.02),
    ("maththink-004", 512, 0.49),
    ("medicalneuro-002", 323, 0.76),
    ("bioelectricity-002", 266, 0.76),
    ("bioinfomethods1-001", 235, 0.55),
    ("musicproduction-006", 232, 0.01),
    ("comparch-002", 132, 0.46),
    ("casebasedbiostat-002", 126, 0.20),
    ("gametheory2-001", 125, 0.19),
    ("biostats-005", 55, 0.00),
];

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Per-forum rates `σ(shift_f + a)` with `a` chosen so the mix-weighted
/// mean equals `course_rate`.
pub fn forum_rates(course_rate: f64, mix: &PerForum<f64>, shift: &PerForum<f64>) -> PerForum<f64> {
    if course_rate <= 0.0 {
        return mix.map(|_| 0.0);
    }
    if course_rate >= 1.0 {
        return mix.map(|_| 1.0);
    }
    let total: f64 = mix.values().iter().sum();
    let mean = |a: f64| -> f64 {
        ForumType::ALL
            .iter()
            .map(|&f| mix.get(f) / total * sigmoid(shift.get(f) + a))
            .sum()
    };
    let (mut lo, mut hi) = (-40.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < course_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    PerForum {
        errata: sigmoid(shift.errata + a),
        lecture: sigmoid(shift.lecture + a),
        homework: sigmoid(shift.homework + a),
        exam: sigmoid(shift.exam + a),
    }
}

/// Fourteen courses sized and labelled like the reference collection,
/// with default signal strengths.
pub fn default_d14_like_spec() -> CorpusSpec {
    CorpusSpec {
        seed: 42,
        courses: D14_COURSES
            .iter()
            .map(|&(id, threads, ratio)| CourseSpec {
                id: id.to_string(),
                threads,
                forum_mix: D14_FORUM_MIX,
                intervention_rate: forum_rates(ratio, &D14_FORUM_MIX, &DEFAULT_FORUM_SHIFT),
            })
            .collect(),
        vocabulary: VocabularySpec::default(),
        structure: StructureSpec::default(),
    }
}

const SYLLABLES: [&str; 16] = [
    "ba", "ko", "mi", "tu", "re", "sa", "no", "vi", "le", "pu", "da", "ge", "fo", "hy", "ja", "wu",
];

/// Deterministic pronounceable pseudo-word for `n < 65536`. The index is
/// scrambled by an odd multiplier (a bijection mod 2¹⁶) so neighbouring
/// indices do not share suffixes.
fn pseudo_word(n: usize) -> String {
    let mut m = n.wrapping_mul(40503) & 0xFFFF;
    let mut w = String::new();
    for _ in 0..4 {
        w.push_str(SYLLABLES[m & 0xF]);
        m >>= 4;
    }
    w
}

const FILLER: [&str; 10] = ["the", "is", "of", "to", "and", "a", "in", "it", "this", "for"];
const AFFIRMATIONS: [&str; 5] = ["I agree.", "+1", "Same here.", "Me too.", "Agreed, exactly."];
const STAFF_REPLIES: [&str; 3] = [
    "Thanks for flagging this, we will look into it.",
    "Good question. Please see the updated notes.",
    "This has been fixed now.",
];

struct Words {
    background: Vec<String>,
    towards: Vec<String>,
    away: Vec<String>,
}

impl Words {
    fn new(spec: &VocabularySpec) -> Self {
        let half = spec.signal_terms / 2;
        let offset = spec.background_terms;
        Words {
            background: (0..spec.background_terms).map(pseudo_word).collect(),
            towards: (0..half).map(|i| pseudo_word(offset + i)).collect(),
            away: (0..spec.signal_terms - half)
                .map(|i| pseudo_word(offset + half + i))
                .collect(),
        }
    }
}

struct ThreadWriter<'a> {
    rng: &'a mut ChaCha8Rng,
    spec: &'a CorpusSpec,
    words: &'a Words,
    looks: Looks,
}

impl ThreadWriter<'_> {
    fn range(&mut self, r: (usize, usize)) -> usize {
        self.rng.gen_range(r.0..=r.1)
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<'w>(&mut self, pool: &'w [String]) -> Option<&'w str> {
        if pool.is_empty() {
            None
        } else {
            Some(&pool[self.rng.gen_range(0..pool.len())])
        }
    }

    fn background(&mut self) -> &str {
        // skewed towards low indices, like natural word frequencies
        let u: f64 = self.rng.gen();
        let n = self.words.background.len();
        &self.words.background[((u * u) * n as f64) as usize % n]
    }

    fn sentence(&mut self, signal: bool) -> String {
        let v = &self.spec.vocabulary;
        let len = self.range(v.words_per_sentence);
        let mut words: Vec<String> = Vec::with_capacity(len + 4);
        for _ in 0..len {
            if self.chance(v.stopword_rate) {
                words.push(FILLER[self.rng.gen_range(0..FILLER.len())].to_string());
            }
            words.push(self.background().to_string());
        }
        let words_ref = self.words;
        if signal && self.chance(v.signal_rate.get(self.looks.wording)) {
            if let Some(w) = self.pick(&words_ref.towards) {
                let at = self.rng.gen_range(0..=words.len());
                words.insert(at, w.to_string());
            }
        }
        if signal && self.chance(v.counter_signal_rate.get(self.looks.wording)) {
            if let Some(w) = self.pick(&words_ref.away) {
                let at = self.rng.gen_range(0..=words.len());
                words.insert(at, w.to_string());
            }
        }
        let mut s = words.join(" ");
        if let Some(first) = s.get(0..1) {
            let upper = first.to_uppercase();
            s.replace_range(0..1, &upper);
        }
        s.push(if self.chance(0.3) { '?' } else { '.' });
        s
    }

    fn student_text(&mut self, reply: bool) -> String {
        let st = &self.spec.structure;
        let l = self.looks;
        let mut parts = Vec::new();
        if reply && self.chance(st.affirmation_rate.get(l.agreement)) {
            parts.push(AFFIRMATIONS[self.rng.gen_range(0..AFFIRMATIONS.len())].to_string());
        }
        let n = self.range(st.sentences_per_item.get(l.length));
        for _ in 0..n {
            parts.push(self.sentence(!reply));
        }
        if self.chance(st.url_rate.get(l.references)) {
            let k = self.rng.gen_range(1..500);
            parts.push(format!("See https://example.org/notes/{k} for details."));
        }
        if self.chance(st.timeref_rate.get(l.references)) {
            let (m, s) = (self.rng.gen_range(0..30), self.rng.gen_range(0..60));
            parts.push(format!("The video at {m}:{s:02} is confusing."));
        }
        if self.chance(st.course_ref_rate.get(l.references)) {
            let k = self.rng.gen_range(1..20);
            let r = match self.rng.gen_range(0..4) {
                0 => format!("Compare slide {k}."),
                1 => format!("As in lecture video {k}."),
                2 => format!("Quiz {k} asks this."),
                _ => "I read about it from wikipedia.".to_string(),
            };
            parts.push(r);
        }
        if self.chance(st.math_rate.get(l.references)) {
            let k = self.rng.gen_range(2..9);
            parts.push(format!("Is it $x^{k}+1$ here?"));
        }
        parts.join(" ")
    }

    fn title(&mut self) -> String {
        let n = self.rng.gen_range(3..=6);
        let mut words: Vec<String> = (0..n).map(|_| self.background().to_string()).collect();
        let words_ref = self.words;
        let rate = self.spec.vocabulary.signal_rate.get(self.looks.wording) / 2.0;
        if self.chance(rate) {
            if let Some(w) = self.pick(&words_ref.towards) {
                words.push(w.to_string());
            }
        }
        words.join(" ")
    }
}

/// Which class each aspect of a thread's content imitates.
#[derive(Debug, Clone, Copy)]
struct Looks {
    wording: bool,
    length: bool,
    references: bool,
    agreement: bool,
}

impl Looks {
    fn draw(intervened: bool, arbitrary_rate: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut aspect = || intervened ^ rng.gen_bool(arbitrary_rate);
        Looks {
            wording: aspect(),
            length: aspect(),
            references: aspect(),
            agreement: aspect(),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn generate_thread(
    spec: &CorpusSpec,
    words: &Words,
    course: &CourseSpec,
    forum_type: ForumType,
    intervened: bool,
    looks: Looks,
    index: usize,
    start: i64,
    rng: &mut ChaCha8Rng,
) -> Thread {
    let st = &spec.structure;
    let mut w = ThreadWriter {
        rng,
        spec,
        words,
        looks,
    };
    let mut ts = start;
    let mut next_ts = |w: &mut ThreadWriter<'_>| {
        ts += w.rng.gen_range(1..=st.max_gap);
        ts
    };
    let mut posts: Vec<Post> = Vec::new();
    let n_posts = 1 + w.range(st.extra_posts.get(looks.length));
    for k in 0..n_posts {
        let post_ts = next_ts(&mut w);
        let text = w.student_text(k > 0);
        let n_comments = w.range(st.comments_per_post.get(looks.length));
        let mut comments = Vec::with_capacity(n_comments);
        for m in 0..n_comments {
            let c_ts = next_ts(&mut w);
            comments.push(Comment {
                id: format!("p{k}c{m}"),
                author_role: AuthorRole::Student,
                timestamp: c_ts,
                text: w.student_text(true),
            });
        }
        posts.push(Post {
            id: format!("p{k}"),
            author_role: AuthorRole::Student,
            timestamp: post_ts,
            text,
            comments,
        });
    }
    if intervened {
        let staff_ts = next_ts(&mut w);
        let text = STAFF_REPLIES[w.rng.gen_range(0..STAFF_REPLIES.len())].to_string();
        if w.chance(st.staff_comment_share) {
            let last = posts.last_mut().expect("at least one student post");
            last.comments.push(Comment {
                id: format!("{}s", last.id),
                author_role: AuthorRole::Staff,
                timestamp: staff_ts,
                text,
            });
        } else {
            posts.push(Post {
                id: format!("p{}", posts.len()),
                author_role: AuthorRole::Staff,
                timestamp: staff_ts,
                text,
                comments: Vec::new(),
            });
        }
        let after = w.range(st.posts_after_intervention);
        for _ in 0..after {
            let post_ts = next_ts(&mut w);
            let text = format!("Thanks, that helps. {}", w.sentence(false));
            posts.push(Post {
                id: format!("p{}", posts.len()),
                author_role: AuthorRole::Student,
                timestamp: post_ts,
                text,
                comments: Vec::new(),
            });
        }
    }
    Thread {
        course_id: course.id.clone(),
        id: format!("t{index:05}"),
        forum_type,
        title: w.title(),
        posts,
    }
}

fn draw_forum(mix: &PerForum<f64>, rng: &mut ChaCha8Rng) -> ForumType {
    let total: f64 = mix.values().iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for f in ForumType::ALL {
        let m = mix.get(f);
        if u < m {
            return f;
        }
        u -= m;
    }
    *ForumType::ALL
        .iter()
        .rev()
        .find(|f| mix.get(**f) > 0.0)
        .unwrap()
}

pub fn generate_course(spec: &CorpusSpec, index: usize) -> Course {
    let cs = &spec.courses[index];
    let words = Words::new(&spec.vocabulary);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, index as u64));
    let base = 1_400_000_000 + index as i64 * 100_000_000;
    let threads = (0..cs.threads)
        .map(|i| {
            let forum = draw_forum(&cs.forum_mix, &mut rng);
            let intervened = rng.gen_bool(cs.intervention_rate.get(forum));
            let looks = Looks::draw(intervened, spec.structure.arbitrary_rate, &mut rng);
            let start = base + i as i64 * 20_000;
            generate_thread(spec, &words, cs, forum, intervened, looks, i, start, &mut rng)
        })
        .collect();
    Course {
        id: cs.id.clone(),
        threads,
    }
}

/// Generates every course of the spec. Output depends only on the spec.
pub fn generate(spec: &CorpusSpec) -> Result<Corpus> {
    spec.validate()?;
    let corpus = Corpus {
        courses: (0..spec.courses.len()).map(|i| generate_course(spec, i)).collect(),
    };
    corpus.validate()?;
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{label_thread, truncate_at_first_intervention};

    #[test]
    fn pseudo_words_are_distinct() {
        let words: std::collections::HashSet<String> = (0..2000).map(pseudo_word).collect();
        assert_eq!(words.len(), 2000);
    }

    #[test]
    fn forum_rates_hit_course_rate() {
        let r = forum_rates(0.45, &D14_FORUM_MIX, &DEFAULT_FORUM_SHIFT);
        let total: f64 = D14_FORUM_MIX.values().iter().sum();
        let mean: f64 = ForumType::ALL
            .iter()
            .map(|&f| D14_FORUM_MIX.get(f) / total * r.get(f))
            .sum();
        assert!((mean - 0.45).abs() < 1e-9);
        assert!(r.errata > r.exam && r.exam > r.lecture && r.lecture > r.homework);
        assert_eq!(forum_rates(0.0, &D14_FORUM_MIX, &DEFAULT_FORUM_SHIFT).errata, 0.0);
    }

    #[test]
    fn d14_like_shape() {
        let spec = default_d14_like_spec();
        assert_eq!(spec.courses.len(), 14);
        assert_eq!(spec.courses.iter().map(|c| c.threads).sum::<usize>(), 7408);
        let largest = spec.courses.iter().max_by_key(|c| c.threads).unwrap();
        assert_eq!((largest.id.as_str(), largest.threads), ("ml-005", 2058));
        let zero = spec.courses.iter().find(|c| c.id == "biostats-005").unwrap();
        assert!(zero.intervention_rate.values().iter().all(|r| *r == 0.0));
        spec.validate().unwrap();
    }

    fn small_spec(rates: PerForum<f64>, n: usize) -> CorpusSpec {
        CorpusSpec {
            seed: 7,
            courses: vec![CourseSpec {
                id: "c".into(),
                threads: n,
                forum_mix: PerForum {
                    errata: 1.0,
                    lecture: 1.0,
                    homework: 1.0,
                    exam: 1.0,
                },
                intervention_rate: rates,
            }],
            vocabulary: VocabularySpec::default(),
            structure: StructureSpec::default(),
        }
    }

    #[test]
    fn per_type_ratios_near_spec() {
        let mut spec = small_spec(
            PerForum {
                errata: 0.36,
                lecture: 0.0,
                homework: 0.27,
                exam: 0.0,
            },
            2000,
        );
        spec.courses[0].forum_mix = PerForum {
            errata: 1.0,
            lecture: 0.0,
            homework: 1.0,
            exam: 0.0,
        };
        let c = generate(&spec).unwrap();
        for (f, rate) in [(ForumType::Errata, 0.36), (ForumType::Homework, 0.27)] {
            let (mut pos, mut n) = (0, 0);
            for t in c.threads().filter(|t| t.forum_type == f) {
                n += 1;
                pos += usize::from(label_thread(t));
            }
            assert!(n > 900, "{f}: only {n} threads");
            let got = pos as f64 / n as f64;
            assert!((got - rate).abs() <= 0.05, "{f}: {got:.3} vs {rate}");
        }
    }

    #[test]
    fn same_spec_same_bytes() {
        let mut spec = default_d14_like_spec();
        spec.courses.truncate(3);
        let write = |c: &Corpus| {
            let mut buf = Vec::new();
            crate::corpus::write_corpus(c, &mut buf).unwrap();
            buf
        };
        let a = write(&generate(&spec).unwrap());
        assert_eq!(a, write(&generate(&spec).unwrap()));
        spec.seed += 1;
        assert_ne!(a, write(&generate(&spec).unwrap()));
    }

    #[test]
    fn zero_rate_type_has_no_interventions() {
        let spec = small_spec(
            PerForum {
                errata: 0.0,
                lecture: 0.5,
                homework: 0.5,
                exam: 0.5,
            },
            400,
        );
        let c = generate(&spec).unwrap();
        assert!(c
            .threads()
            .filter(|t| t.forum_type == ForumType::Errata)
            .all(|t| !label_thread(t)));
    }

    #[test]
    fn interventions_follow_student_content() {
        let spec = small_spec(
            PerForum {
                errata: 1.0,
                lecture: 1.0,
                homework: 1.0,
                exam: 1.0,
            },
            200,
        );
        for t in generate(&spec).unwrap().threads() {
            let tr = truncate_at_first_intervention(t);
            assert!(tr.intervened && !tr.degenerate);
            let stamps: Vec<i64> = t.items().map(|(_, ts, _)| ts).collect();
            let mut sorted = stamps.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), stamps.len(), "timestamps must be distinct");
        }
    }

    #[test]
    fn rejects_bad_probabilities() {
        let mut spec = small_spec(
            PerForum {
                errata: 1.5,
                lecture: 0.1,
                homework: 0.1,
                exam: 0.1,
            },
            10,
        );
        assert!(generate(&spec).is_err());
        spec.courses[0].intervention_rate.errata = 0.2;
        spec.structure.url_rate.other = -0.1;
        assert!(generate(&spec).is_err());
    }
}
