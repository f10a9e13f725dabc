//! String rewriting systems: reduction, normal forms, irreducible words and
//! stretch.
//!
//! Reduction is deterministic: the redex with the leftmost start position
//! wins, and among rules matching at that position the lowest rule index.
//! Everything that may loop on a non-noetherian system takes a budget and
//! fails with [`RewriteError::BudgetExhausted`] or
//! [`RewriteError::NonTerminationSuspected`] instead.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::word::{Alphabet, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("rule {0} has an empty side")]
    EmptySide(usize),
    #[error("rule {0} has identical sides")]
    TrivialRule(usize),
    #[error("rule {0} duplicates an earlier rule")]
    DuplicateRule(usize),
    #[error("step budget of {budget} exhausted after {} steps", .partial.steps.len())]
    BudgetExhausted {
        budget: usize,
        partial: Box<ReductionTrace>,
    },
    #[error("non-termination suspected: {0}")]
    NonTerminationSuspected(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Word,
}

impl Rule {
    pub fn new(lhs: Word, rhs: Word) -> Self {
        Rule { lhs, rhs }
    }
}

/// One recorded single-step reduction: `word` rewritten by `rule` at `position`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub word: Word,
    pub rule: usize,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<Step>,
    pub final_word: Word,
}

/// A finite rewriting system over a fixed alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewritingSystem {
    alphabet: Alphabet,
    rules: Vec<Rule>,
    /// Rule ids grouped by the first letter of their left-hand side.
    by_first: Vec<Vec<usize>>,
    max_lhs: usize,
}

impl RewritingSystem {
    pub fn new(alphabet: Alphabet, rules: Vec<Rule>) -> Result<Self, RewriteError> {
        let mut seen = HashSet::new();
        for (k, rule) in rules.iter().enumerate() {
            alphabet.check(&rule.lhs)?;
            alphabet.check(&rule.rhs)?;
            if rule.lhs.is_empty() || rule.rhs.is_empty() {
                return Err(RewriteError::EmptySide(k));
            }
            if rule.lhs == rule.rhs {
                return Err(RewriteError::TrivialRule(k));
            }
            if !seen.insert(rule) {
                return Err(RewriteError::DuplicateRule(k));
            }
        }
        let mut by_first = vec![Vec::new(); alphabet.len()];
        for (k, rule) in rules.iter().enumerate() {
            by_first[rule.lhs.letters()[0].index()].push(k);
        }
        let max_lhs = rules.iter().map(|r| r.lhs.len()).max().unwrap_or(0);
        Ok(RewritingSystem {
            alphabet,
            rules,
            by_first,
            max_lhs,
        })
    }

    /// Like [`RewritingSystem::new`] but silently drops repeated rules,
    /// keeping the first occurrence.
    pub fn new_dedup(alphabet: Alphabet, rules: Vec<Rule>) -> Result<Self, RewriteError> {
        let mut seen = HashSet::new();
        let rules = rules
            .into_iter()
            .filter(|r| seen.insert(r.clone()))
            .collect();
        Self::new(alphabet, rules)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn max_lhs_len(&self) -> usize {
        self.max_lhs
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        self.alphabet.parse_word(text)
    }

    pub fn render(&self, w: &Word) -> String {
        self.alphabet.render(w)
    }

    pub fn render_rule(&self, k: usize) -> String {
        let r = &self.rules[k];
        format!("{} -> {}", self.render(&r.lhs), self.render(&r.rhs))
    }

    /// Lowest-index rule whose lhs occurs at `pos`.
    fn rule_at(&self, w: &Word, pos: usize) -> Option<usize> {
        self.by_first[w.letters()[pos].index()]
            .iter()
            .copied()
            .find(|&k| w.occurs_at(self.rules[k].lhs.letters(), pos))
    }

    fn leftmost_redex_from(&self, w: &Word, from: usize) -> Option<(usize, usize)> {
        (from..w.len()).find_map(|pos| self.rule_at(w, pos).map(|k| (k, pos)))
    }

    fn apply(&self, w: &Word, rule: usize, pos: usize) -> Word {
        let r = &self.rules[rule];
        // the redex was matched, so the window is in range
        w.splice(pos, r.lhs.len(), &r.rhs).expect("matched redex")
    }

    /// One reduction step under the leftmost strategy, with its provenance.
    pub fn single_step(&self, w: &Word) -> Result<Option<(Word, usize, usize)>, RewriteError> {
        self.alphabet.check(w)?;
        Ok(self
            .leftmost_redex_from(w, 0)
            .map(|(k, pos)| (self.apply(w, k, pos), k, pos)))
    }

    /// Every one-step reduct of `w`, ordered by position then rule index.
    pub fn all_single_steps(&self, w: &Word) -> Vec<(Word, usize, usize)> {
        let mut out = Vec::new();
        for pos in 0..w.len() {
            for &k in &self.by_first[w.letters()[pos].index()] {
                if w.occurs_at(self.rules[k].lhs.letters(), pos) {
                    out.push((self.apply(w, k, pos), k, pos));
                }
            }
        }
        out
    }

    pub fn is_irreducible(&self, w: &Word) -> bool {
        (0..w.len()).all(|pos| self.rule_at(w, pos).is_none())
    }

    /// Normal form with the full step record.
    pub fn normalize(&self, w: &Word, step_budget: usize) -> Result<ReductionTrace, RewriteError> {
        self.alphabet.check(w)?;
        let mut steps = Vec::new();
        let mut current = w.clone();
        let mut from = 0;
        while let Some((k, pos)) = self.leftmost_redex_from(&current, from) {
            if steps.len() == step_budget {
                return Err(RewriteError::BudgetExhausted {
                    budget: step_budget,
                    partial: Box::new(ReductionTrace {
                        steps,
                        final_word: current,
                    }),
                });
            }
            let next = self.apply(&current, k, pos);
            steps.push(Step {
                word: current,
                rule: k,
                position: pos,
            });
            current = next;
            // no redex lies entirely left of `pos`; new ones start within max_lhs of it
            from = pos.saturating_sub(self.max_lhs.saturating_sub(1));
        }
        Ok(ReductionTrace {
            steps,
            final_word: current,
        })
    }

    /// Normal form only; same strategy as [`RewritingSystem::normalize`].
    pub fn normal_form(&self, w: &Word, step_budget: usize) -> Result<Word, RewriteError> {
        let mut current = w.clone();
        let mut from = 0;
        let mut steps = 0;
        while let Some((k, pos)) = self.leftmost_redex_from(&current, from) {
            if steps == step_budget {
                // rerun with tracing to report the partial chain
                return self.normalize(w, step_budget).map(|t| t.final_word);
            }
            current = self.apply(&current, k, pos);
            steps += 1;
            from = pos.saturating_sub(self.max_lhs.saturating_sub(1));
        }
        Ok(current)
    }

    /// Decides `u = v` through normal forms. Only meaningful for complete systems.
    pub fn bounded_equivalence_check(
        &self,
        u: &Word,
        v: &Word,
        budget: usize,
    ) -> Result<bool, RewriteError> {
        Ok(self.normal_form(u, budget)? == self.normal_form(v, budget)?)
    }

    /// All irreducible words of length `1..=max_len`, by length, then
    /// lexicographically by letter id. Prefixes containing a redex are pruned.
    pub fn enumerate_irreducibles(&self, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut level = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for prefix in &level {
                for x in self.alphabet.letters() {
                    let mut v = prefix.letters().to_vec();
                    v.push(x);
                    let w = Word(v);
                    if !self.has_suffix_redex(&w) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend(next.iter().cloned());
            level = next;
        }
        out
    }

    /// Irr(R) when it is finite, detected by an empty length level at or
    /// below `cap`. Irreducible words are closed under factors, so an empty
    /// level means there are no longer ones either.
    pub fn finite_irreducibles(&self, cap: usize) -> Option<Vec<Word>> {
        let words = self.enumerate_irreducibles(cap + 1);
        match words.last() {
            Some(w) if w.len() > cap => None,
            _ => Some(words),
        }
    }

    fn has_suffix_redex(&self, w: &Word) -> bool {
        let n = w.len();
        let lo = n.saturating_sub(self.max_lhs);
        (lo..n).any(|pos| {
            self.by_first[w.letters()[pos].index()].iter().any(|&k| {
                let lhs = self.rules[k].lhs.letters();
                pos + lhs.len() == n && w.occurs_at(lhs, pos)
            })
        })
    }

    /// `st_R(w)`: the maximum length over all descendants of `w`, itself
    /// included, exploring every redex. `budget` bounds the number of
    /// distinct words visited.
    pub fn stretch(&self, w: &Word, budget: usize) -> Result<usize, RewriteError> {
        self.alphabet.check(w)?;
        let mut cache = StretchCache::default();
        cache.stretch(self, w, budget)
    }

    /// Renders the system in the presentation text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "letters: {}", self.alphabet.tokens().join(" "));
        for k in 0..self.rules.len() {
            let _ = writeln!(out, "rule: {}", self.render_rule(k));
        }
        out
    }

    /// Parses the presentation text format: a `letters:` line, then `rule:`
    /// lines. `#` starts a comment line; blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = PresentationLines::new(text);
        let sys = parse_presentation(&mut lines)?;
        if let Some((no, line)) = lines.next() {
            return Err(ParseError::new(no, format!("unexpected line {line:?}")));
        }
        Ok(sys)
    }

    /// Copy of the system with every letter token passed through `rename`.
    pub fn rename_letters(&self, rename: impl Fn(&str) -> String) -> Result<Self, RewriteError> {
        let alphabet = Alphabet::new(self.alphabet.tokens().iter().map(|t| rename(t)))?;
        Self::new(alphabet, self.rules.clone())
    }
}

/// Memo table for [`RewritingSystem::stretch`], reusable across many words
/// of the same system.
#[derive(Debug, Clone, Default)]
pub struct StretchCache {
    known: HashMap<Word, usize>,
}

impl StretchCache {
    pub fn stretch(
        &mut self,
        sys: &RewritingSystem,
        w: &Word,
        budget: usize,
    ) -> Result<usize, RewriteError> {
        if let Some(&s) = self.known.get(w) {
            return Ok(s);
        }
        struct Frame {
            word: Word,
            succ: Vec<Word>,
            next: usize,
            best: usize,
        }
        let mut explored = 0usize;
        let mut on_path: HashSet<Word> = HashSet::new();
        let frame = |word: Word| {
            let succ = sys.all_single_steps(&word).into_iter().map(|s| s.0).collect();
            Frame {
                best: word.len(),
                word,
                succ,
                next: 0,
            }
        };
        on_path.insert(w.clone());
        let mut stack = vec![frame(w.clone())];
        while let Some(top) = stack.last_mut() {
            if top.next < top.succ.len() {
                let child = top.succ[top.next].clone();
                top.next += 1;
                if let Some(&s) = self.known.get(&child) {
                    top.best = top.best.max(s);
                    continue;
                }
                if on_path.contains(&child) {
                    return Err(RewriteError::NonTerminationSuspected(format!(
                        "reduction cycle through {}",
                        sys.render(&child)
                    )));
                }
                explored += 1;
                if explored > budget {
                    return Err(RewriteError::NonTerminationSuspected(format!(
                        "stretch exploration exceeded {budget} words"
                    )));
                }
                on_path.insert(child.clone());
                stack.push(frame(child));
            } else {
                let done = stack.pop().expect("non-empty stack");
                on_path.remove(&done.word);
                self.known.insert(done.word, done.best);
                if let Some(parent) = stack.last_mut() {
                    parent.best = parent.best.max(done.best);
                } else {
                    return Ok(done.best);
                }
            }
        }
        unreachable!("stack emptied without a result")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

/// Significant lines of a presentation document (comments and blanks skipped),
/// with 1-based line numbers. Shared with the construction output parser.
pub(crate) struct PresentationLines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> PresentationLines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(k, l)| (k + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        PresentationLines {
            inner: it.peekable(),
        }
    }

    pub(crate) fn peek(&mut self) -> Option<(usize, &'a str)> {
        self.inner.peek().copied()
    }
}

impl<'a> Iterator for PresentationLines<'a> {
    type Item = (usize, &'a str);
    fn next(&mut self) -> Option<Self::Item> {
        self.inner.next()
    }
}

pub(crate) fn parse_presentation(lines: &mut PresentationLines<'_>) -> Result<RewritingSystem, ParseError> {
    let (no, first) = lines
        .next()
        .ok_or_else(|| ParseError::new(0, "missing `letters:` line"))?;
    let tokens = first
        .strip_prefix("letters:")
        .ok_or_else(|| ParseError::new(no, "first line must start with `letters:`"))?;
    let alphabet =
        Alphabet::new(tokens.split_whitespace()).map_err(|e| ParseError::new(no, e.to_string()))?;
    let mut rules = Vec::new();
    let mut rule_lines = Vec::new();
    while let Some((no, line)) = lines.peek() {
        let Some(body) = line.strip_prefix("rule:") else {
            break;
        };
        lines.next();
        let (lhs, rhs) = body
            .split_once("->")
            .ok_or_else(|| ParseError::new(no, "rule is missing `->`"))?;
        let lhs = alphabet
            .parse_word(lhs)
            .map_err(|e| ParseError::new(no, e.to_string()))?;
        let rhs = alphabet
            .parse_word(rhs)
            .map_err(|e| ParseError::new(no, e.to_string()))?;
        rules.push(Rule::new(lhs, rhs));
        rule_lines.push(no);
    }
    RewritingSystem::new(alphabet, rules).map_err(|e| {
        let line = match &e {
            RewriteError::EmptySide(k) | RewriteError::TrivialRule(k) | RewriteError::DuplicateRule(k) => {
                rule_lines[*k]
            }
            _ => 0,
        };
        ParseError::new(line, e.to_string())
    })
}

/// Convenience for tests and examples: builds a system from `lhs -> rhs`
/// strings over the given tokens.
pub fn system(letters: &[&str], rules: &[&str]) -> Result<RewritingSystem, RewriteError> {
    let alphabet = Alphabet::new(letters.iter().copied())?;
    let mut parsed = Vec::new();
    for r in rules {
        let (l, rr) = r
            .split_once("->")
            .ok_or_else(|| WordError::InvalidToken((*r).to_string()))?;
        parsed.push(Rule::new(alphabet.parse_word(l)?, alphabet.parse_word(rr)?));
    }
    RewritingSystem::new(alphabet, parsed)
}
