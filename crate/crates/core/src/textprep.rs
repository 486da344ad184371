//! Text canonicalization and the lexical counters used by the feature
//! extractor.
//!
//! All patterns and word lists come from a [`TextConfig`], normally the
//! versioned `data/default_config.json` shipped with the crate.

use std::collections::HashSet;
use std::path::Path;

use regex::{Regex, RegexBuilder};
use serde::{Deserialize, Serialize};

use crate::corpus::{AuthorRole, Thread};
use crate::error::{Error, Result};

pub const URL_PLACEHOLDER: &str = "<URLREF>";
pub const TIME_PLACEHOLDER: &str = "<TIMEREF>";
pub const MATH_PLACEHOLDER: &str = "<MATH>";
const PLACEHOLDERS: [&str; 3] = [URL_PLACEHOLDER, TIME_PLACEHOLDER, MATH_PLACEHOLDER];

const DEFAULT_CONFIG: &str = include_str!("../data/default_config.json");

/// Pattern and lexicon configuration. Serialized form is the on-disk
/// config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextConfig {
    pub version: u32,
    pub stopwords: Vec<String>,
    /// Matched case-insensitively, at most once per post or comment.
    pub affirmations: Vec<String>,
    /// Matched case-insensitively; combined into one alternation so
    /// overlapping phrasings ("lecture video 7") count once.
    pub course_ref_patterns: Vec<String>,
    pub url_pattern: String,
    pub time_pattern: String,
    pub math_pattern: String,
    /// Lowercase tokens, including their trailing period, that do not end
    /// a sentence.
    pub abbreviations: Vec<String>,
}

impl Default for TextConfig {
    fn default() -> Self {
        serde_json::from_str(DEFAULT_CONFIG).expect("shipped config is valid")
    }
}

impl TextConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Text with URLs, video time references and math replaced by placeholders.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CanonicalText {
    pub text: String,
    pub url_count: usize,
    pub timeref_count: usize,
    pub math_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream {
    pub tokens: Vec<String>,
}

fn compile(pattern: &str, case_insensitive: bool) -> Result<Regex> {
    RegexBuilder::new(pattern)
        .case_insensitive(case_insensitive)
        .build()
        .map_err(|source| Error::Pattern {
            pattern: pattern.to_string(),
            source,
        })
}

fn alternation(patterns: &[String]) -> String {
    if patterns.is_empty() {
        // matches nothing
        return r"[^\s\S]".to_string();
    }
    patterns
        .iter()
        .map(|p| format!("(?:{p})"))
        .collect::<Vec<_>>()
        .join("|")
}

/// Compiled form of a [`TextConfig`]. Cheap to share across threads.
#[derive(Debug, Clone)]
pub struct TextProcessor {
    config: TextConfig,
    stopwords: HashSet<String>,
    abbreviations: HashSet<String>,
    url: Regex,
    time: Regex,
    math: Regex,
    course_refs: Regex,
    affirmations: Vec<Regex>,
}

impl Default for TextProcessor {
    fn default() -> Self {
        TextProcessor::new(TextConfig::default()).expect("shipped patterns compile")
    }
}

impl TextProcessor {
    pub fn new(config: TextConfig) -> Result<Self> {
        Ok(TextProcessor {
            stopwords: config.stopwords.iter().map(|s| s.to_lowercase()).collect(),
            abbreviations: config
                .abbreviations
                .iter()
                .map(|s| s.to_lowercase())
                .collect(),
            url: compile(&config.url_pattern, false)?,
            time: compile(&config.time_pattern, false)?,
            math: compile(&config.math_pattern, false)?,
            course_refs: compile(&alternation(&config.course_ref_patterns), true)?,
            affirmations: config
                .affirmations
                .iter()
                .map(|p| compile(p, true))
                .collect::<Result<_>>()?,
            config,
        })
    }

    pub fn config(&self) -> &TextConfig {
        &self.config
    }

    pub fn stopwords(&self) -> &HashSet<String> {
        &self.stopwords
    }

    /// Replaces URLs, then time references, then math. URLs go first
    /// because they may contain colons and digits.
    pub fn canonicalize(&self, text: &str) -> CanonicalText {
        let (text, url_count) = substitute(&self.url, text, URL_PLACEHOLDER);
        let (text, timeref_count) = substitute(&self.time, &text, TIME_PLACEHOLDER);
        let (text, math_count) = substitute(&self.math, &text, MATH_PLACEHOLDER);
        CanonicalText {
            text,
            url_count,
            timeref_count,
            math_count,
        }
    }

    pub fn tokenize(&self, ct: &CanonicalText) -> TokenStream {
        tokenize(ct, &self.stopwords)
    }

    /// Canonicalizes then tokenizes.
    pub fn tokens(&self, text: &str) -> Vec<String> {
        self.tokenize(&self.canonicalize(text)).tokens
    }

    pub fn split_sentences<'a>(&self, text: &'a str) -> Vec<&'a str> {
        split_sentences(text, &self.abbreviations)
    }

    pub fn count_course_refs(&self, text: &str) -> usize {
        self.course_refs.find_iter(text).count()
    }

    pub fn is_affirmation(&self, text: &str) -> bool {
        self.affirmations.iter().any(|re| re.is_match(text))
    }

    /// Student replies agreeing with the thread. The first post is never
    /// counted: it receives agreement rather than giving it.
    pub fn count_affirmations(&self, t: &Thread) -> usize {
        let mut items = t.items();
        items.next();
        items
            .filter(|(role, _, text)| *role == AuthorRole::Student && self.is_affirmation(text))
            .count()
    }
}

fn substitute(re: &Regex, text: &str, placeholder: &str) -> (String, usize) {
    let mut count = 0;
    let out = re.replace_all(text, |_: &regex::Captures<'_>| {
        count += 1;
        placeholder
    });
    (out.into_owned(), count)
}

/// Splits on anything that is not alphanumeric, keeping placeholders whole,
/// then lowercases and drops stopwords.
pub fn tokenize(ct: &CanonicalText, stopwords: &HashSet<String>) -> TokenStream {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let text = ct.text.as_str();
    let mut i = 0;
    let flush = |current: &mut String, tokens: &mut Vec<String>| {
        if !current.is_empty() {
            let tok = std::mem::take(current);
            if !stopwords.contains(&tok) {
                tokens.push(tok);
            }
        }
    };
    while i < text.len() {
        let rest = &text[i..];
        if let Some(p) = PLACEHOLDERS.iter().find(|p| rest.starts_with(**p)) {
            flush(&mut current, &mut tokens);
            tokens.push(p.to_string());
            i += p.len();
            continue;
        }
        let ch = rest.chars().next().unwrap();
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else {
            flush(&mut current, &mut tokens);
        }
        i += ch.len_utf8();
    }
    flush(&mut current, &mut tokens);
    TokenStream { tokens }
}

/// Sentence boundaries are runs of `.`, `!` or `?` followed by whitespace
/// or end of text, unless the word carrying the period is a known
/// abbreviation. Returned sentences are trimmed and never empty.
pub fn split_sentences<'a>(text: &'a str, abbreviations: &HashSet<String>) -> Vec<&'a str> {
    let mut sentences = Vec::new();
    let mut start = 0;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut k = 0;
    while k < chars.len() {
        let ch = chars[k].1;
        if matches!(ch, '.' | '!' | '?') {
            let mut end = k;
            while end + 1 < chars.len() && matches!(chars[end + 1].1, '.' | '!' | '?') {
                end += 1;
            }
            let boundary = end + 1 == chars.len() || chars[end + 1].1.is_whitespace();
            let after = if end + 1 == chars.len() {
                text.len()
            } else {
                chars[end + 1].0
            };
            let abbreviated =
                ch == '.' && end == k && ends_with_abbreviation(&text[start..after], abbreviations);
            if boundary && !abbreviated {
                let s = text[start..after].trim();
                if !s.is_empty() {
                    sentences.push(s);
                }
                start = after;
            }
            k = end + 1;
            continue;
        }
        k += 1;
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        sentences.push(tail);
    }
    sentences
}

fn ends_with_abbreviation(segment: &str, abbreviations: &HashSet<String>) -> bool {
    segment
        .split_whitespace()
        .last()
        .map(|w| abbreviations.contains(&w.to_lowercase()))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Comment, ForumType, Post};

    fn tp() -> TextProcessor {
        TextProcessor::default()
    }

    #[test]
    fn replaces_urls() {
        let ct = tp().canonicalize("see https://x.example/a");
        assert_eq!(ct.text, "see <URLREF>");
        assert_eq!(ct.url_count, 1);
        let ct = tp().canonicalize("try www.example.com/page?x=1 too");
        assert_eq!(ct.text, "try <URLREF> too");
        assert_eq!(ct.math_count, 0);
    }

    #[test]
    fn replaces_time_refs() {
        let ct = tp().canonicalize("the step at 3:45 is wrong");
        assert_eq!(ct.text, "the step at <TIMEREF> is wrong");
        assert_eq!(ct.timeref_count, 1);
        let ct = tp().canonicalize("around 1:02:33 and minute 7");
        assert_eq!(ct.text, "around <TIMEREF> and <TIMEREF>");
        assert_eq!(ct.timeref_count, 2);
    }

    #[test]
    fn replaces_math() {
        let ct = tp().canonicalize("compute $x^2+1$ twice $y$");
        assert_eq!(ct.text, "compute <MATH> twice <MATH>");
        assert_eq!(ct.math_count, 2);
        let ct = tp().canonicalize(r"so \(a+b\) gives x=3 and 2^10");
        assert_eq!(ct.text, "so <MATH> gives <MATH> and <MATH>");
        assert_eq!(ct.math_count, 3);
    }

    #[test]
    fn url_colons_are_not_time_refs() {
        let ct = tp().canonicalize("http://host:8080/v 12:30");
        assert_eq!(ct.text, "<URLREF> <TIMEREF>");
    }

    #[test]
    fn tokenize_examples() {
        let sw: HashSet<String> = ["the", "is"].iter().map(|s| s.to_string()).collect();
        let ct = CanonicalText {
            text: "The Gradient IS here".into(),
            ..Default::default()
        };
        assert_eq!(tokenize(&ct, &sw).tokens, ["gradient", "here"]);
        let ct = CanonicalText {
            text: "<URLREF> helps".into(),
            ..Default::default()
        };
        assert_eq!(tokenize(&ct, &sw).tokens, ["<URLREF>", "helps"]);
        assert!(tokenize(&CanonicalText::default(), &sw).tokens.is_empty());
    }

    #[test]
    fn tokenize_splits_glued_placeholders() {
        let ct = CanonicalText {
            text: "x<MATH>y,z".into(),
            ..Default::default()
        };
        assert_eq!(tokenize(&ct, &HashSet::new()).tokens, ["x", "<MATH>", "y", "z"]);
    }

    #[test]
    fn sentences() {
        let p = tp();
        assert_eq!(p.split_sentences("This is one. And two."), ["This is one.", "And two."]);
        assert_eq!(p.split_sentences("No terminal punctuation"), ["No terminal punctuation"]);
        assert_eq!(
            p.split_sentences("Dr. Smith said hi. Bye."),
            ["Dr. Smith said hi.", "Bye."]
        );
        assert_eq!(p.split_sentences("What?! Really... ok"), ["What?!", "Really...", "ok"]);
        assert!(p.split_sentences("   ").is_empty());
        assert_eq!(p.split_sentences("version 1.5 is out"), ["version 1.5 is out"]);
    }

    #[test]
    fn course_refs() {
        let p = tp();
        assert_eq!(p.count_course_refs("see slide 4 and lecture video 7"), 2);
        assert_eq!(p.count_course_refs("I read it from wikipedia"), 1);
        assert_eq!(p.count_course_refs("no references here"), 0);
        assert_eq!(p.count_course_refs("Quiz 3, Problem Set 2 and Chapter 5"), 3);
    }

    fn item(role: AuthorRole, ts: i64, text: &str) -> Post {
        Post {
            id: format!("p{ts}"),
            author_role: role,
            timestamp: ts,
            text: text.into(),
            comments: vec![],
        }
    }

    fn thread(posts: Vec<Post>) -> Thread {
        Thread {
            course_id: "c".into(),
            id: "t".into(),
            forum_type: ForumType::Exam,
            title: "t".into(),
            posts,
        }
    }

    #[test]
    fn affirmations() {
        let p = tp();
        let t = thread(vec![
            item(AuthorRole::Student, 1, "question"),
            item(AuthorRole::Student, 2, "I agree, thanks!"),
        ]);
        assert_eq!(p.count_affirmations(&t), 1);

        let t = thread(vec![item(AuthorRole::Student, 1, "I agree with the textbook")]);
        assert_eq!(p.count_affirmations(&t), 0);

        let mut first = item(AuthorRole::Student, 1, "question");
        first.comments.push(Comment {
            id: "c".into(),
            author_role: AuthorRole::Student,
            timestamp: 3,
            text: "same here".into(),
        });
        let t = thread(vec![first, item(AuthorRole::Student, 2, "+1")]);
        assert_eq!(p.count_affirmations(&t), 2);

        let t = thread(vec![
            item(AuthorRole::Student, 1, "q"),
            item(AuthorRole::Staff, 2, "I agree"),
            item(AuthorRole::Student, 3, "agreed, exactly, +1"),
        ]);
        assert_eq!(p.count_affirmations(&t), 1);
    }

    #[test]
    fn shipped_config_has_expected_size() {
        let cfg = TextConfig::default();
        assert!(cfg.stopwords.len() >= 100);
        assert!(cfg.stopwords.iter().any(|s| s == "the"));
    }

    #[test]
    fn bad_pattern_is_reported() {
        let cfg = TextConfig {
            math_pattern: "(".into(),
            ..TextConfig::default()
        };
        assert!(matches!(TextProcessor::new(cfg), Err(Error::Pattern { .. })));
    }
}
