//! Well-founded orders used as termination certificates, and their bounded
//! verification.
//!
//! A [`Comparator`] decides whether one word is strictly below another in
//! the order attached to a construction. [`verify_decrease_on_ball`] then
//! checks every single-step reduction among short words against it.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::rewrite::{RewriteError, RewritingSystem, Rule, StretchCache};
use crate::word::{Letter, LetterSet, Word};

/// Default bound on distinct words explored per stretch computation.
pub const STRETCH_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("certificate {certificate} does not apply: {reason}")]
    Inapplicable {
        certificate: &'static str,
        reason: String,
    },
    #[error("unknown certificate {0:?}")]
    UnknownCertificate(String),
    #[error("malformed multiset {0:?}")]
    MalformedMultiset(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// Finite multiset of naturals, kept sorted ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NatMultiset(Vec<usize>);

impl NatMultiset {
    pub fn new(mut entries: Vec<usize>) -> Self {
        entries.sort_unstable();
        NatMultiset(entries)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Both multiset differences `(self - other, other - self)`.
    fn strip_common(&self, other: &NatMultiset) -> (Vec<usize>, Vec<usize>) {
        let (mut i, mut j) = (0, 0);
        let (mut left, mut right) = (Vec::new(), Vec::new());
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                Ordering::Less => {
                    left.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    right.push(other.0[j]);
                    j += 1;
                }
            }
        }
        left.extend_from_slice(&self.0[i..]);
        right.extend_from_slice(&other.0[j..]);
        (left, right)
    }
}

impl FromIterator<usize> for NatMultiset {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        NatMultiset::new(iter.into_iter().collect())
    }
}

impl fmt::Display for NatMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl FromStr for NatMultiset {
    type Err = OrderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || OrderError::MalformedMultiset(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        if inner.trim().is_empty() {
            return Ok(NatMultiset::default());
        }
        inner
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect()
    }
}

/// `m >_mult n`: after removing common elements, `m`'s remainder is non-empty
/// and each remaining element of `n` is below some remaining element of `m`.
pub fn multiset_greater(m: &NatMultiset, n: &NatMultiset) -> bool {
    let (m_rest, n_rest) = m.strip_common(n);
    match m_rest.iter().max() {
        None => false,
        Some(&top) => n_rest.iter().all(|&y| y < top),
    }
}

/// A word cut at its "large" letters: `w = s_n t_n ... s_1 t_1 s_0`.
///
/// `segments[k]` is `s_k` over the small alphabet (possibly empty), and
/// `separators[k - 1]` is `t_k`. Index 0 is the rightmost piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentDecomposition {
    pub segments: Vec<Word>,
    pub separators: Vec<Word>,
}

impl SegmentDecomposition {
    /// With `maximal_blocks`, runs of large letters form one separator;
    /// otherwise every large letter is its own separator.
    pub fn of(w: &Word, small: &LetterSet, maximal_blocks: bool) -> Self {
        let mut segments = vec![Vec::new()];
        let mut separators: Vec<Vec<Letter>> = Vec::new();
        let mut in_block = false;
        for l in w.iter().rev() {
            if small.contains(l) {
                segments.last_mut().expect("non-empty").push(l);
                in_block = false;
            } else if maximal_blocks && in_block {
                separators.last_mut().expect("open block").push(l);
            } else {
                separators.push(vec![l]);
                segments.push(Vec::new());
                in_block = true;
            }
        }
        let rev = |mut v: Vec<Letter>| {
            v.reverse();
            Word(v)
        };
        SegmentDecomposition {
            segments: segments.into_iter().map(rev).collect(),
            separators: separators.into_iter().map(rev).collect(),
        }
    }

    pub fn concat(&self) -> Word {
        let mut out = Vec::new();
        for k in (0..self.segments.len()).rev() {
            out.extend_from_slice(self.segments[k].letters());
            if k > 0 {
                out.extend_from_slice(self.separators[k - 1].letters());
            }
        }
        Word(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Decreases,
    Equal,
    Increases,
    Incomparable,
    /// A stretch or reachability budget ran out before a clause was decided.
    Undecided,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Decreases => "decreases",
            Relation::Equal => "equal",
            Relation::Increases => "increases",
            Relation::Incomparable => "incomparable",
            Relation::Undecided => "undecided",
        })
    }
}

/// How `w` relates to `w'` (the word it was reduced from), and which clause decided it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderVerdict {
    pub relation: Relation,
    pub witness: String,
}

impl OrderVerdict {
    fn new(relation: Relation, witness: impl Into<String>) -> Self {
        OrderVerdict {
            relation,
            witness: witness.into(),
        }
    }
}

/// Names the order attached to a construction, plus the letter partition it
/// needs. The subsystems each order consults are recovered from the
/// rewriting system itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Every rule shortens words.
    Length,
    /// Zero adjoined to a complete system: reductions project to reductions
    /// of the original system once `0` is read as the old zero word.
    AdjoinZero,
    /// Ideal extension; `small` is the ideal's alphabet.
    IdealExtension { small: Vec<String> },
    /// (0-)Rees matrix presentation; `small` is the group alphabet.
    Rees { small: Vec<String> },
}

impl Certificate {
    pub fn name(&self) -> &'static str {
        match self {
            Certificate::Length => "length",
            Certificate::AdjoinZero => "adjoin-zero",
            Certificate::IdealExtension { .. } => "ideal-extension",
            Certificate::Rees { .. } => "rees",
        }
    }

    /// `certificate:` line body, e.g. `rees small: e a`.
    pub fn to_text(&self) -> String {
        match self {
            Certificate::Length | Certificate::AdjoinZero => self.name().to_string(),
            Certificate::IdealExtension { small } | Certificate::Rees { small } => {
                format!("{} small: {}", self.name(), small.join(" "))
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, OrderError> {
        let text = text.trim();
        let (name, rest) = match text.split_once(char::is_whitespace) {
            Some((n, r)) => (n, r.trim()),
            None => (text, ""),
        };
        let small = || -> Vec<String> {
            rest.strip_prefix("small:")
                .unwrap_or(rest)
                .split_whitespace()
                .map(str::to_string)
                .collect()
        };
        match name {
            "length" => Ok(Certificate::Length),
            "adjoin-zero" => Ok(Certificate::AdjoinZero),
            "ideal-extension" => Ok(Certificate::IdealExtension { small: small() }),
            "rees" => Ok(Certificate::Rees { small: small() }),
            other => Err(OrderError::UnknownCertificate(other.to_string())),
        }
    }

    pub fn comparator(&self, sys: &RewritingSystem) -> Result<Comparator, OrderError> {
        let alphabet = sys.alphabet();
        let small_set = |small: &[String], cert: &'static str| -> Result<LetterSet, OrderError> {
            let mut set = LetterSet::new(alphabet.len());
            for t in small {
                let l = alphabet.get(t).ok_or_else(|| OrderError::Inapplicable {
                    certificate: cert,
                    reason: format!("letter {t:?} is not in the alphabet"),
                })?;
                set.insert(l);
            }
            Ok(set)
        };
        match self {
            Certificate::Length => Ok(Comparator::Length),
            Certificate::AdjoinZero => {
                let zero = alphabet.get("0").ok_or_else(|| OrderError::Inapplicable {
                    certificate: "adjoin-zero",
                    reason: "no letter 0".into(),
                })?;
                let nonzero =
                    LetterSet::from_letters(alphabet.len(), alphabet.letters().filter(|&l| l != zero));
                let zero_word = sys
                    .rules()
                    .iter()
                    .find(|r| r.rhs == Word::single(zero) && nonzero.covers(&r.lhs))
                    .map(|r| r.lhs.clone())
                    .ok_or_else(|| OrderError::Inapplicable {
                        certificate: "adjoin-zero",
                        reason: "no rule z -> 0 with z free of 0".into(),
                    })?;
                Ok(Comparator::AdjoinZero(AdjoinZeroOrder {
                    base: restrict(sys, |r| nonzero.covers(&r.lhs) && nonzero.covers(&r.rhs))?,
                    zero,
                    zero_word,
                    nonzero,
                }))
            }
            Certificate::IdealExtension { small } => {
                let a = small_set(small, "ideal-extension")?;
                let b = LetterSet::from_letters(
                    alphabet.len(),
                    alphabet.letters().filter(|&l| !a.contains(l)),
                );
                Ok(Comparator::IdealExtension(Box::new(IdealExtensionOrder {
                    ideal_rules: restrict(sys, |r| a.covers(&r.lhs) && a.covers(&r.rhs))?,
                    quotient_rules: restrict(sys, |r| b.covers(&r.lhs) && b.covers(&r.rhs))?,
                    small: a,
                    cache: StretchCache::default(),
                })))
            }
            Certificate::Rees { small } => {
                let a = small_set(small, "rees")?;
                let zero = alphabet.get("0").filter(|&z| !a.contains(z));
                Ok(Comparator::Rees(Box::new(ReesOrder {
                    group_rules: restrict(sys, |r| a.covers(&r.lhs) && a.covers(&r.rhs))?,
                    small: a,
                    zero,
                    cache: StretchCache::default(),
                })))
            }
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Same alphabet, only the rules satisfying `keep`.
fn restrict(sys: &RewritingSystem, keep: impl Fn(&Rule) -> bool) -> Result<RewritingSystem, RewriteError> {
    RewritingSystem::new(
        sys.alphabet().clone(),
        sys.rules().iter().filter(|r| keep(r)).cloned().collect(),
    )
}

fn one_step(sys: &RewritingSystem, from: &Word, to: &Word) -> bool {
    sys.all_single_steps(from).iter().any(|(v, _, _)| v == to)
}

#[derive(Debug, Clone)]
pub struct AdjoinZeroOrder {
    base: RewritingSystem,
    zero: Letter,
    zero_word: Word,
    nonzero: LetterSet,
}

impl AdjoinZeroOrder {
    fn project(&self, w: &Word) -> Word {
        let mut out = Vec::new();
        for l in w.iter() {
            if l == self.zero {
                out.extend_from_slice(self.zero_word.letters());
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// `from →⁺ to` in the base system, by breadth-first search.
    fn reaches(&self, from: &Word, to: &Word) -> Result<bool, RewriteError> {
        let mut seen = HashSet::new();
        let mut frontier = vec![from.clone()];
        while let Some(w) = frontier.pop() {
            for (v, _, _) in self.base.all_single_steps(&w) {
                if &v == to {
                    return Ok(true);
                }
                if seen.insert(v.clone()) {
                    if seen.len() > STRETCH_BUDGET {
                        return Err(RewriteError::NonTerminationSuspected(
                            "reachability search exceeded budget".into(),
                        ));
                    }
                    frontier.push(v);
                }
            }
        }
        Ok(false)
    }

    fn precedes(&mut self, w: &Word, w_prime: &Word) -> Result<Option<String>, RewriteError> {
        let (p, p_prime) = (self.project(w), self.project(w_prime));
        if p != p_prime {
            return Ok(self
                .reaches(&p_prime, &p)?
                .then(|| "projection reduces in the base system".to_string()));
        }
        let count = |x: &Word| x.iter().filter(|&l| self.nonzero.contains(l)).count();
        Ok((count(w) < count(w_prime)).then(|| {
            format!(
                "equal projections, non-zero letters {} > {}",
                count(w_prime),
                count(w)
            )
        }))
    }
}

#[derive(Debug, Clone)]
pub struct IdealExtensionOrder {
    ideal_rules: RewritingSystem,
    quotient_rules: RewritingSystem,
    small: LetterSet,
    cache: StretchCache,
}

impl IdealExtensionOrder {
    pub fn decompose(&self, w: &Word) -> SegmentDecomposition {
        SegmentDecomposition::of(w, &self.small, true)
    }

    fn block_multiset(&mut self, d: &SegmentDecomposition) -> Result<NatMultiset, RewriteError> {
        d.separators
            .iter()
            .map(|v| self.cache.stretch(&self.quotient_rules, v, STRETCH_BUDGET))
            .collect::<Result<Vec<_>, _>>()
            .map(NatMultiset::new)
    }

    fn precedes(&mut self, w: &Word, w_prime: &Word) -> Result<Option<String>, RewriteError> {
        let (d, dp) = (self.decompose(w), self.decompose(w_prime));
        let (m, mp) = (self.block_multiset(&d)?, self.block_multiset(&dp)?);
        if multiset_greater(&mp, &m) {
            return Ok(Some(format!("(i) block stretches {mp} >mult {m}")));
        }
        if m != mp {
            return Ok(None);
        }
        if let Some(k) = (0..d.separators.len()).find(|&k| d.separators[k] != dp.separators[k]) {
            return Ok(one_step(&self.quotient_rules, &dp.separators[k], &d.separators[k])
                .then(|| format!("(ii) block {} reduced by the quotient rules", k + 1)));
        }
        if let Some(k) = (0..d.segments.len()).find(|&k| d.segments[k] != dp.segments[k]) {
            return Ok(one_step(&self.ideal_rules, &dp.segments[k], &d.segments[k])
                .then(|| format!("(iii) segment {k} reduced by the ideal rules")));
        }
        Ok(None)
    }
}

#[derive(Debug, Clone)]
pub struct ReesOrder {
    group_rules: RewritingSystem,
    small: LetterSet,
    zero: Option<Letter>,
    cache: StretchCache,
}

impl ReesOrder {
    pub fn decompose(&self, w: &Word) -> SegmentDecomposition {
        SegmentDecomposition::of(w, &self.small, false)
    }

    fn counts(&self, w: &Word) -> (usize, usize) {
        let zeros = w.iter().filter(|&l| Some(l) == self.zero).count();
        let large = w.iter().filter(|&l| !self.small.contains(l)).count();
        (large - zeros, zeros)
    }

    fn segment_multiset(&mut self, d: &SegmentDecomposition) -> Result<NatMultiset, RewriteError> {
        d.segments
            .iter()
            .map(|x| self.cache.stretch(&self.group_rules, x, STRETCH_BUDGET))
            .collect::<Result<Vec<_>, _>>()
            .map(NatMultiset::new)
    }

    fn precedes(&mut self, w: &Word, w_prime: &Word) -> Result<Option<String>, RewriteError> {
        let ((bc, z), (bcp, zp)) = (self.counts(w), self.counts(w_prime));
        if bcp != bc {
            return Ok((bcp > bc).then(|| format!("(i) |w'|_BC = {bcp} > {bc}")));
        }
        if zp != z {
            return Ok((zp > z).then(|| format!("(ii) |w'|_0 = {zp} > {z}")));
        }
        let (d, dp) = (self.decompose(w), self.decompose(w_prime));
        let (m, mp) = (self.segment_multiset(&d)?, self.segment_multiset(&dp)?);
        if multiset_greater(&mp, &m) {
            return Ok(Some(format!("(iii) segment stretches {mp} >mult {m}")));
        }
        if m != mp {
            return Ok(None);
        }
        if let Some(k) = (0..d.segments.len()).find(|&k| d.segments[k] != dp.segments[k]) {
            return Ok(one_step(&self.group_rules, &dp.segments[k], &d.segments[k])
                .then(|| format!("(iv) segment {k} reduced by the group rules")));
        }
        Ok(None)
    }
}

/// A termination order, queried as `compare(w, w')` for a reduction `w' → w`.
#[derive(Debug, Clone)]
pub enum Comparator {
    Length,
    AdjoinZero(AdjoinZeroOrder),
    IdealExtension(Box<IdealExtensionOrder>),
    Rees(Box<ReesOrder>),
}

impl Comparator {
    fn precedes(&mut self, w: &Word, w_prime: &Word) -> Result<Option<String>, RewriteError> {
        match self {
            Comparator::Length => Ok((w.len() < w_prime.len())
                .then(|| format!("length {} > {}", w_prime.len(), w.len()))),
            Comparator::AdjoinZero(o) => o.precedes(w, w_prime),
            Comparator::IdealExtension(o) => o.precedes(w, w_prime),
            Comparator::Rees(o) => o.precedes(w, w_prime),
        }
    }

    /// Relation of `w` to `w_prime`; `Decreases` means `w ≺ w_prime`.
    pub fn compare(&mut self, w: &Word, w_prime: &Word) -> Result<OrderVerdict, RewriteError> {
        if w == w_prime {
            return Ok(OrderVerdict::new(Relation::Equal, "identical words"));
        }
        if let Some(why) = self.precedes(w, w_prime)? {
            return Ok(OrderVerdict::new(Relation::Decreases, why));
        }
        if let Some(why) = self.precedes(w_prime, w)? {
            return Ok(OrderVerdict::new(Relation::Increases, why));
        }
        Ok(OrderVerdict::new(Relation::Incomparable, "no clause applies"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub from: Word,
    pub to: Word,
    pub rule: usize,
    pub position: usize,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallReport {
    pub max_len: usize,
    /// Single-step reductions checked.
    pub checked: usize,
    pub violations: Vec<Violation>,
    /// The ball held more words than the limit; only a prefix was checked.
    pub truncated: bool,
}

impl BallReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && !self.truncated
    }

    pub fn render(&self, sys: &RewritingSystem) -> String {
        let mut out = String::new();
        for v in &self.violations {
            out.push_str(&format!(
                "VIOLATION {} -> {} rule={} pos={} verdict={}\n",
                sys.render(&v.from),
                sys.render(&v.to),
                v.rule,
                v.position,
                v.relation
            ));
        }
        if self.truncated {
            out.push_str("truncated=true\n");
        }
        out.push_str(&format!(
            "checked={} violations={}\n",
            self.checked,
            self.violations.len()
        ));
        out
    }

    pub fn to_json_lines(&self, sys: &RewritingSystem) -> String {
        let mut out = String::new();
        for v in &self.violations {
            let rec = serde_json::json!({
                "type": "violation",
                "from": sys.render(&v.from),
                "to": sys.render(&v.to),
                "rule": v.rule,
                "pos": v.position,
                "verdict": v.relation.to_string(),
            });
            out.push_str(&rec.to_string());
            out.push('\n');
        }
        let summary = serde_json::json!({
            "type": "ball-summary",
            "max_len": self.max_len,
            "checked": self.checked,
            "violations": self.violations.len(),
            "truncated": self.truncated,
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

/// Number of words of length `1..=max_len` over `k` letters, saturating.
pub fn ball_size(k: usize, max_len: usize) -> usize {
    let mut total = 0usize;
    let mut level = 1usize;
    for _ in 0..max_len {
        level = level.saturating_mul(k);
        total = total.saturating_add(level);
    }
    total
}

/// Largest `L ≤ max_len` whose ball fits within `word_limit` words (at least 1).
pub fn fitting_ball_len(k: usize, max_len: usize, word_limit: usize) -> usize {
    (1..=max_len)
        .rev()
        .find(|&l| ball_size(k, l) <= word_limit)
        .unwrap_or(1)
}

/// Checks that every single-step reduction `w' → w` with `|w'| ≤ max_len`
/// satisfies `w ≺ w'`. At most `word_limit` words are examined.
pub fn verify_decrease_on_ball(
    sys: &RewritingSystem,
    comparator: &Comparator,
    max_len: usize,
    word_limit: usize,
) -> BallReport {
    let words: Vec<Word> = sys.alphabet().words_up_to(max_len).take(word_limit).collect();
    let truncated = ball_size(sys.alphabet().len(), max_len) > words.len();
    let results: Vec<(usize, Vec<Violation>)> = words
        .par_chunks(256)
        .map_init(
            || comparator.clone(),
            |cmp, chunk| {
                let mut checked = 0;
                let mut bad = Vec::new();
                for w_prime in chunk {
                    for (w, rule, position) in sys.all_single_steps(w_prime) {
                        checked += 1;
                        let relation = match cmp.compare(&w, w_prime) {
                            Ok(v) => v.relation,
                            Err(_) => Relation::Undecided,
                        };
                        if relation != Relation::Decreases {
                            bad.push(Violation {
                                from: w_prime.clone(),
                                to: w,
                                rule,
                                position,
                                relation,
                            });
                        }
                    }
                }
                (checked, bad)
            },
        )
        .collect();
    let checked = results.iter().map(|r| r.0).sum();
    let mut violations: Vec<Violation> = results.into_iter().flat_map(|r| r.1).collect();
    violations.sort_by(|a, b| {
        a.from
            .shortlex_cmp(&b.from)
            .then(a.position.cmp(&b.position))
            .then(a.rule.cmp(&b.rule))
    });
    BallReport {
        max_len,
        checked,
        violations,
        truncated,
    }
}
