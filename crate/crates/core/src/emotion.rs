//! Word-emotion lexicon scoring over eight emotions and two sentiments.
//!
//! Lexicon files use the three-column NRC layout, one association per line:
//! `word<TAB>category<TAB>flag`, where flag 1 means the word carries the
//! category and 0 means it does not.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::ops::{Add, AddAssign};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AffectCategory {
    Anger,
    Anticipation,
    Disgust,
    Fear,
    Joy,
    Sadness,
    Surprise,
    Trust,
    Negative,
    Positive,
}

impl AffectCategory {
    /// Declaration order: the eight emotions, then the two sentiments.
    pub const ALL: [AffectCategory; 10] = [
        AffectCategory::Anger,
        AffectCategory::Anticipation,
        AffectCategory::Disgust,
        AffectCategory::Fear,
        AffectCategory::Joy,
        AffectCategory::Sadness,
        AffectCategory::Surprise,
        AffectCategory::Trust,
        AffectCategory::Negative,
        AffectCategory::Positive,
    ];

    pub const EMOTIONS: [AffectCategory; 8] = [
        AffectCategory::Anger,
        AffectCategory::Anticipation,
        AffectCategory::Disgust,
        AffectCategory::Fear,
        AffectCategory::Joy,
        AffectCategory::Sadness,
        AffectCategory::Surprise,
        AffectCategory::Trust,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AffectCategory::Anger => "anger",
            AffectCategory::Anticipation => "anticipation",
            AffectCategory::Disgust => "disgust",
            AffectCategory::Fear => "fear",
            AffectCategory::Joy => "joy",
            AffectCategory::Sadness => "sadness",
            AffectCategory::Surprise => "surprise",
            AffectCategory::Trust => "trust",
            AffectCategory::Negative => "negative",
            AffectCategory::Positive => "positive",
        }
    }

    pub fn is_emotion(self) -> bool {
        !matches!(self, AffectCategory::Negative | AffectCategory::Positive)
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for AffectCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AffectCategory {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        AffectCategory::ALL.into_iter().find(|c| c.name() == s).ok_or(())
    }
}

/// Set of categories, one bit per [`AffectCategory`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CategorySet(u16);

impl CategorySet {
    pub fn insert(&mut self, c: AffectCategory) {
        self.0 |= 1 << c.index();
    }

    pub fn contains(self, c: AffectCategory) -> bool {
        self.0 & (1 << c.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = AffectCategory> {
        AffectCategory::ALL.into_iter().filter(move |&c| self.contains(c))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmotionLexicon {
    entries: HashMap<String, CategorySet>,
}

impl EmotionLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, word: &str, category: AffectCategory) {
        self.entries.entry(word.to_lowercase()).or_default().insert(category);
    }

    pub fn categories(&self, word: &str) -> CategorySet {
        self.entries.get(word).copied().unwrap_or_default()
    }

    /// Parses the three-column layout. Flag-0 rows are validated but not
    /// stored.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut lex = Self::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| Error::Format {
                path: origin.to_path_buf(),
                line: lineno,
                message,
            };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [word, category, flag] = cols[..] else {
                return Err(bad(format!("expected 3 tab-separated columns, found {}", cols.len())));
            };
            if word.is_empty() {
                return Err(bad("empty word".into()));
            }
            let category: AffectCategory = category.parse().map_err(|()| Error::UnknownCategory {
                path: origin.to_path_buf(),
                line: lineno,
                name: category.to_string(),
            })?;
            match flag {
                "1" => lex.insert(word, category),
                "0" => {}
                other => return Err(bad(format!("association flag must be 0 or 1, got {other:?}"))),
            }
        }
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmotionProfile {
    counts: [u64; 10],
    /// Tokens found in the lexicon.
    pub matched_tokens: u64,
}

impl EmotionProfile {
    pub fn count(&self, c: AffectCategory) -> u64 {
        self.counts[c.index()]
    }

    pub fn counts(&self) -> &[u64; 10] {
        &self.counts
    }

    pub fn from_counts(counts: [u64; 10], matched_tokens: u64) -> Self {
        Self {
            counts,
            matched_tokens,
        }
    }
}

impl Add for EmotionProfile {
    type Output = EmotionProfile;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for EmotionProfile {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.counts.iter_mut().zip(rhs.counts) {
            *a += b;
        }
        self.matched_tokens += rhs.matched_tokens;
    }
}

/// Adds one to every category of every token found in the lexicon.
pub fn score_tokens<S: AsRef<str>>(tokens: &[S], lex: &EmotionLexicon) -> EmotionProfile {
    let mut p = EmotionProfile::default();
    for t in tokens {
        let cats = lex.categories(t.as_ref());
        if cats.is_empty() {
            continue;
        }
        p.matched_tokens += 1;
        for c in cats.iter() {
            p.counts[c.index()] += 1;
        }
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DominantLabel {
    Emotion(AffectCategory),
    Neutral,
}

impl DominantLabel {
    pub fn name(self) -> &'static str {
        match self {
            DominantLabel::Emotion(c) => c.name(),
            DominantLabel::Neutral => "neutral",
        }
    }
}

impl fmt::Display for DominantLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Most frequent of the eight emotions; earlier categories win ties and an
/// all-zero profile is neutral.
pub fn dominant_label(p: &EmotionProfile) -> DominantLabel {
    let mut best: Option<(AffectCategory, u64)> = None;
    for c in AffectCategory::EMOTIONS {
        let n = p.count(c);
        if n > 0 && best.is_none_or(|(_, m)| n > m) {
            best = Some((c, n));
        }
    }
    best.map_or(DominantLabel::Neutral, |(c, _)| DominantLabel::Emotion(c))
}

pub fn aggregate<'a>(profiles: impl IntoIterator<Item = &'a EmotionProfile>) -> EmotionProfile {
    profiles
        .into_iter()
        .fold(EmotionProfile::default(), |acc, p| acc + *p)
}

/// Number of tweets per dominant label, in declaration order followed by
/// neutral.
pub fn dominant_histogram<'a>(
    profiles: impl IntoIterator<Item = &'a EmotionProfile>,
) -> Vec<(DominantLabel, u64)> {
    let mut counts = [0u64; 9];
    for p in profiles {
        match dominant_label(p) {
            DominantLabel::Emotion(c) => counts[c.index()] += 1,
            DominantLabel::Neutral => counts[8] += 1,
        }
    }
    AffectCategory::EMOTIONS
        .into_iter()
        .map(DominantLabel::Emotion)
        .chain([DominantLabel::Neutral])
        .zip(counts)
        .collect()
}
