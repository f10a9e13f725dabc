//! Alphabets, words and the factor primitives everything else is built on.
//!
//! Letters are opaque tokens (`b1`, `c2`, `0`, ...). An [`Alphabet`] interns
//! them, and a [`Word`] is a sequence of [`Letter`] ids into one alphabet, so
//! words only make sense together with the alphabet that produced them.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("invalid letter token {0:?}")]
    InvalidToken(String),
    #[error("duplicate letter {0:?} in alphabet")]
    DuplicateLetter(String),
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("letter id {0} is outside the alphabet")]
    LetterOutOfRange(u32),
    #[error("empty factor")]
    EmptyFactor,
    #[error("splice window {start}..{end} exceeds word length {len}")]
    SpliceOutOfRange { start: usize, end: usize, len: usize },
}

/// Index of a letter inside its [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u32);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered set of letter tokens. Order is fixed at creation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    tokens: Vec<String>,
    lookup: HashMap<String, Letter>,
}

pub(crate) fn valid_token(token: &str) -> bool {
    !token.is_empty() && !token.chars().any(char::is_whitespace)
}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet::default();
        for token in tokens {
            alphabet.push(token.into())?;
        }
        Ok(alphabet)
    }

    /// Appends a new letter and returns its id.
    pub fn push(&mut self, token: String) -> Result<Letter, WordError> {
        if !valid_token(&token) {
            return Err(WordError::InvalidToken(token));
        }
        if self.lookup.contains_key(&token) {
            return Err(WordError::DuplicateLetter(token));
        }
        let letter = Letter(self.tokens.len() as u32);
        self.lookup.insert(token.clone(), letter);
        self.tokens.push(token);
        Ok(letter)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.tokens.len() as u32).map(Letter)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn get(&self, token: &str) -> Option<Letter> {
        self.lookup.get(token).copied()
    }

    pub fn contains_token(&self, token: &str) -> bool {
        self.lookup.contains_key(token)
    }

    pub fn token(&self, letter: Letter) -> &str {
        &self.tokens[letter.index()]
    }

    pub fn letter(&self, token: &str) -> Result<Letter, WordError> {
        self.get(token)
            .ok_or_else(|| WordError::UnknownLetter(token.to_string()))
    }

    /// Parses whitespace-separated tokens, e.g. `b1 a a c2`.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        text.split_whitespace()
            .map(|t| self.letter(t))
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn render(&self, word: &Word) -> String {
        let mut out = String::new();
        for (k, letter) in word.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            out.push_str(self.token(letter));
        }
        out
    }

    /// Checks that every letter of `word` belongs to this alphabet.
    pub fn check(&self, word: &Word) -> Result<(), WordError> {
        match word.iter().find(|l| l.index() >= self.len()) {
            Some(l) => Err(WordError::LetterOutOfRange(l.0)),
            None => Ok(()),
        }
    }

    /// `|w|_Y`: the number of positions of `w` holding a letter of `subset`.
    pub fn length_in(&self, word: &Word, subset: &LetterSet) -> Result<usize, WordError> {
        self.check(word)?;
        Ok(word.iter().filter(|&l| subset.contains(l)).count())
    }

    /// Rewrites `word` (over `self`) into the alphabet `target` by token.
    pub fn translate(&self, word: &Word, target: &Alphabet) -> Result<Word, WordError> {
        word.iter()
            .map(|l| target.letter(self.token(l)))
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    /// Every word of length `1..=max_len`, shortest first, each length in
    /// lexicographic order of letter ids.
    pub fn words_up_to(&self, max_len: usize) -> WordsUpTo {
        WordsUpTo {
            size: self.len() as u32,
            max_len,
            current: Vec::new(),
        }
    }
}

/// Iterator behind [`Alphabet::words_up_to`].
pub struct WordsUpTo {
    size: u32,
    max_len: usize,
    current: Vec<Letter>,
}

impl Iterator for WordsUpTo {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.size == 0 {
            return None;
        }
        // odometer increment, growing the length on wrap-around
        let mut k = self.current.len();
        loop {
            if k == 0 {
                let len = self.current.len() + 1;
                if len > self.max_len {
                    return None;
                }
                self.current = vec![Letter(0); len];
                break;
            }
            k -= 1;
            if self.current[k].0 + 1 < self.size {
                self.current[k].0 += 1;
                for slot in &mut self.current[k + 1..] {
                    *slot = Letter(0);
                }
                break;
            }
        }
        Some(Word(self.current.clone()))
    }
}

/// Subset of an alphabet, as a membership bitmap over letter ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LetterSet {
    member: Vec<bool>,
}

impl LetterSet {
    pub fn new(alphabet_len: usize) -> Self {
        LetterSet {
            member: vec![false; alphabet_len],
        }
    }

    pub fn from_letters(alphabet_len: usize, letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut set = LetterSet::new(alphabet_len);
        for l in letters {
            set.insert(l);
        }
        set
    }

    pub fn insert(&mut self, letter: Letter) {
        if letter.index() >= self.member.len() {
            self.member.resize(letter.index() + 1, false);
        }
        self.member[letter.index()] = true;
    }

    pub fn contains(&self, letter: Letter) -> bool {
        self.member.get(letter.index()).copied().unwrap_or(false)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(k, _)| Letter(k as u32))
    }

    pub fn len(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when every letter of `word` lies in the set.
    pub fn covers(&self, word: &Word) -> bool {
        word.iter().all(|l| self.contains(l))
    }
}

/// A finite sequence of letters. The empty word is a legal value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn single(letter: Letter) -> Self {
        Word(vec![letter])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Letter> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn factor(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    /// True when `f` occurs in `self` starting at `pos`.
    pub fn occurs_at(&self, f: &[Letter], pos: usize) -> bool {
        pos + f.len() <= self.len() && &self.0[pos..pos + f.len()] == f
    }

    /// All start positions of `f` in `self`, overlapping occurrences included.
    pub fn find_occurrences(&self, f: &Word) -> Result<Vec<usize>, WordError> {
        if f.is_empty() {
            return Err(WordError::EmptyFactor);
        }
        if f.len() > self.len() {
            return Ok(Vec::new());
        }
        Ok((0..=self.len() - f.len())
            .filter(|&i| self.occurs_at(&f.0, i))
            .collect())
    }

    pub fn contains_factor(&self, f: &[Letter]) -> bool {
        f.len() <= self.len() && self.0.windows(f.len()).any(|w| w == f)
    }

    /// Replaces `self[start..start + old_len]` by `replacement`.
    pub fn splice(&self, start: usize, old_len: usize, replacement: &Word) -> Result<Word, WordError> {
        let end = start + old_len;
        if end > self.len() {
            return Err(WordError::SpliceOutOfRange {
                start,
                end,
                len: self.len(),
            });
        }
        let mut v = Vec::with_capacity(self.len() - old_len + replacement.len());
        v.extend_from_slice(&self.0[..start]);
        v.extend_from_slice(&replacement.0);
        v.extend_from_slice(&self.0[end..]);
        Ok(Word(v))
    }

    /// Shortlex key: shorter words first, then lexicographic on letter ids.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abc() -> Alphabet {
        Alphabet::new(["a", "b", "c"]).unwrap()
    }

    #[test]
    fn length_in_counts_subset_letters() {
        let x = abc();
        let w = x.parse_word("b a a c").unwrap();
        let bc = LetterSet::from_letters(3, [x.letter("b").unwrap(), x.letter("c").unwrap()]);
        assert_eq!(x.length_in(&w, &bc).unwrap(), 2);

        let aaa = x.parse_word("a a a").unwrap();
        let b = LetterSet::from_letters(3, [x.letter("b").unwrap()]);
        assert_eq!(x.length_in(&aaa, &b).unwrap(), 0);

        let all = LetterSet::from_letters(3, x.letters());
        assert_eq!(x.length_in(&w, &all).unwrap(), w.len());
    }

    #[test]
    fn length_in_rejects_foreign_letters() {
        let x = abc();
        let w = Word(vec![Letter(7)]);
        assert_eq!(
            x.length_in(&w, &LetterSet::new(3)),
            Err(WordError::LetterOutOfRange(7))
        );
    }

    #[test]
    fn occurrences() {
        let x = abc();
        let p = |s| x.parse_word(s).unwrap();
        assert_eq!(p("a a a").find_occurrences(&p("a a")).unwrap(), vec![0, 1]);
        assert_eq!(p("a b a b").find_occurrences(&p("a b")).unwrap(), vec![0, 2]);
        assert!(p("a b").find_occurrences(&p("b a")).unwrap().is_empty());
        assert_eq!(
            p("a").find_occurrences(&Word::empty()),
            Err(WordError::EmptyFactor)
        );
    }

    #[test]
    fn splice_cases() {
        let x = abc();
        let p = |s| x.parse_word(s).unwrap();
        assert_eq!(p("a a a").splice(0, 3, &p("a")).unwrap(), p("a"));
        assert_eq!(p("b a c").splice(1, 1, &p("a a")).unwrap(), p("b a a c"));
        assert_eq!(p("a b").splice(2, 0, &p("c")).unwrap(), p("a b c"));
        assert!(matches!(
            p("a b").splice(1, 2, &p("c")),
            Err(WordError::SpliceOutOfRange { .. })
        ));
    }

    #[test]
    fn parse_and_render() {
        let x = Alphabet::new(["b1", "a", "c2", "0"]).unwrap();
        let w = x.parse_word("  b1 a a   c2 ").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(x.render(&w), "b1 a a c2");
        assert!(matches!(
            x.parse_word("a z"),
            Err(WordError::UnknownLetter(t)) if t == "z"
        ));
        assert!(matches!(
            Alphabet::new(["a", "a"]),
            Err(WordError::DuplicateLetter(_))
        ));
        assert!(matches!(
            Alphabet::new(["a b"]),
            Err(WordError::InvalidToken(_))
        ));
    }

    #[test]
    fn words_up_to_counts() {
        let x = abc();
        let words: Vec<Word> = x.words_up_to(3).collect();
        assert_eq!(words.len(), 3 + 9 + 27);
        assert!(words.windows(2).all(|p| p[0].shortlex_cmp(&p[1]).is_lt()));
        assert_eq!(Alphabet::default().words_up_to(3).count(), 0);
    }

    fn word_strategy() -> impl Strategy<Value = Word> {
        prop::collection::vec(0u32..3, 0..8).prop_map(|v| Word(v.into_iter().map(Letter).collect()))
    }

    proptest! {
        #[test]
        fn length_in_is_additive(w in word_strategy(), mask in 0u8..8) {
            let x = abc();
            let y1 = LetterSet::from_letters(3, x.letters().filter(|l| mask & (1 << l.0) != 0));
            let y2 = LetterSet::from_letters(3, x.letters().filter(|l| mask & (1 << l.0) == 0));
            let all = LetterSet::from_letters(3, x.letters());
            prop_assert_eq!(
                x.length_in(&w, &all).unwrap(),
                x.length_in(&w, &y1).unwrap() + x.length_in(&w, &y2).unwrap()
            );
        }

        #[test]
        fn spliced_replacement_is_found(w in word_strategy(), r in word_strategy(), i in 0usize..8, n in 0usize..4) {
            prop_assume!(!r.is_empty());
            let i = i.min(w.len());
            let n = n.min(w.len() - i);
            let spliced = w.splice(i, n, &r).unwrap();
            prop_assert!(spliced.find_occurrences(&r).unwrap().contains(&i));
        }

        #[test]
        fn occurrences_are_increasing_and_exact(w in word_strategy(), f in word_strategy()) {
            prop_assume!(!f.is_empty());
            let occ = w.find_occurrences(&f).unwrap();
            prop_assert!(occ.windows(2).all(|p| p[0] < p[1]));
            for &i in &occ {
                prop_assert_eq!(&w.0[i..i + f.len()], &f.0[..]);
            }
        }
    }
}
