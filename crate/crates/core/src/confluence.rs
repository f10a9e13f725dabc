//! Critical pairs, local confluence, and the completeness verdict.
//!
//! For a noetherian system, local confluence (every critical pair joins)
//! implies confluence by Newman's lemma, so a passing critical-pair report
//! together with termination evidence certifies completeness.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;

use crate::order::BallReport;
use crate::rewrite::RewritingSystem;
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairKind {
    /// A proper suffix of one lhs is a proper prefix of the other.
    Overlap,
    /// One lhs occurs inside the other.
    Containment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalPair {
    pub source: Word,
    pub left: Word,
    pub right: Word,
    pub left_rule: usize,
    pub left_pos: usize,
    pub right_rule: usize,
    pub right_pos: usize,
    pub kind: PairKind,
}

/// All critical pairs of `sys`, without duplicates, ordered by source word
/// (shortlex) and then rule indices.
pub fn critical_pairs(sys: &RewritingSystem) -> Vec<CriticalPair> {
    let rules = sys.rules();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |pair: CriticalPair, out: &mut Vec<CriticalPair>| {
        let (a, b) = if pair.left <= pair.right {
            (pair.left.clone(), pair.right.clone())
        } else {
            (pair.right.clone(), pair.left.clone())
        };
        if seen.insert((pair.source.clone(), a, b)) {
            out.push(pair);
        }
    };
    for (i, r1) in rules.iter().enumerate() {
        let l1 = r1.lhs.letters();
        for (j, r2) in rules.iter().enumerate() {
            let l2 = r2.lhs.letters();
            // overlaps: l1 = x u, l2 = u y with u, x, y non-empty
            for k in 1..l1.len().min(l2.len()) {
                if l1[l1.len() - k..] != l2[..k] {
                    continue;
                }
                let tail = Word(l2[k..].to_vec());
                let source = r1.lhs.concat(&tail);
                let pos = l1.len() - k;
                let left = r1.rhs.concat(&tail);
                let right = Word(l1[..pos].to_vec()).concat(&r2.rhs);
                push(
                    CriticalPair {
                        source,
                        left,
                        right,
                        left_rule: i,
                        left_pos: 0,
                        right_rule: j,
                        right_pos: pos,
                        kind: PairKind::Overlap,
                    },
                    &mut out,
                );
            }
            // containment: l2 is a factor of l1
            if l2.len() > l1.len() {
                continue;
            }
            for pos in r1.lhs.find_occurrences(&r2.lhs).unwrap_or_default() {
                if i == j && pos == 0 {
                    continue;
                }
                let right = r1.lhs.splice(pos, l2.len(), &r2.rhs).expect("occurrence in range");
                push(
                    CriticalPair {
                        source: r1.lhs.clone(),
                        left: r1.rhs.clone(),
                        right,
                        left_rule: i,
                        left_pos: 0,
                        right_rule: j,
                        right_pos: pos,
                        kind: PairKind::Containment,
                    },
                    &mut out,
                );
            }
        }
    }
    out.sort_by(|a, b| {
        a.source
            .shortlex_cmp(&b.source)
            .then(a.left_rule.cmp(&b.left_rule))
            .then(a.right_rule.cmp(&b.right_rule))
            .then(a.right_pos.cmp(&b.right_pos))
    });
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairStatus {
    Resolved(Word),
    Unresolved(Word, Word),
    /// Normalization ran out of budget.
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairOutcome {
    pub pair: CriticalPair,
    pub status: PairStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfluenceReport {
    pub outcomes: Vec<PairOutcome>,
}

impl ConfluenceReport {
    pub fn unresolved(&self) -> impl Iterator<Item = &PairOutcome> {
        self.outcomes
            .iter()
            .filter(|o| matches!(o.status, PairStatus::Unresolved(..)))
    }

    pub fn undecided(&self) -> impl Iterator<Item = &PairOutcome> {
        self.outcomes
            .iter()
            .filter(|o| o.status == PairStatus::Undecided)
    }

    /// False when some pair could not be normalized within budget.
    pub fn is_complete(&self) -> bool {
        self.undecided().next().is_none()
    }

    pub fn all_resolved(&self) -> bool {
        self.outcomes
            .iter()
            .all(|o| matches!(o.status, PairStatus::Resolved(_)))
    }

    pub fn render(&self, sys: &RewritingSystem) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let p = &o.pair;
            let head = format!(
                "PAIR {} : {} [rule {} @ {}] | {} [rule {} @ {}]",
                sys.render(&p.source),
                sys.render(&p.left),
                p.left_rule,
                p.left_pos,
                sys.render(&p.right),
                p.right_rule,
                p.right_pos
            );
            match &o.status {
                PairStatus::Resolved(_) => {}
                PairStatus::Unresolved(a, b) => out.push_str(&format!(
                    "UNRESOLVED {head} => {} / {}\n",
                    sys.render(a),
                    sys.render(b)
                )),
                PairStatus::Undecided => out.push_str(&format!("UNDECIDED {head}\n")),
            }
        }
        out.push_str(&format!(
            "pairs={} unresolved={} undecided={}\n",
            self.outcomes.len(),
            self.unresolved().count(),
            self.undecided().count()
        ));
        out
    }

    /// One JSON record per pair plus a summary record.
    pub fn to_json_lines(&self, sys: &RewritingSystem) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let p = &o.pair;
            let (left_final, right_final) = match &o.status {
                PairStatus::Resolved(w) => (Some(sys.render(w)), Some(sys.render(w))),
                PairStatus::Unresolved(a, b) => (Some(sys.render(a)), Some(sys.render(b))),
                PairStatus::Undecided => (None, None),
            };
            let rec = serde_json::json!({
                "type": "critical-pair",
                "source": sys.render(&p.source),
                "left": sys.render(&p.left),
                "right": sys.render(&p.right),
                "left_rule": p.left_rule,
                "right_rule": p.right_rule,
                "left_final": left_final,
                "right_final": right_final,
                "resolved": matches!(o.status, PairStatus::Resolved(_)),
                "undecided": o.status == PairStatus::Undecided,
            });
            out.push_str(&rec.to_string());
            out.push('\n');
        }
        let summary = serde_json::json!({
            "type": "confluence-summary",
            "pairs": self.outcomes.len(),
            "unresolved": self.unresolved().count(),
            "undecided": self.undecided().count(),
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

/// Normalizes both sides of every critical pair; a pair is resolved when the
/// two normal forms coincide.
pub fn check_local_confluence(sys: &RewritingSystem, budget: usize) -> ConfluenceReport {
    let outcomes = critical_pairs(sys)
        .into_par_iter()
        .map(|pair| {
            let status = match (
                sys.normal_form(&pair.left, budget),
                sys.normal_form(&pair.right, budget),
            ) {
                (Ok(a), Ok(b)) if a == b => PairStatus::Resolved(a),
                (Ok(a), Ok(b)) => PairStatus::Unresolved(a, b),
                _ => PairStatus::Undecided,
            };
            PairOutcome { pair, status }
        })
        .collect();
    ConfluenceReport { outcomes }
}

/// Evidence that a system is noetherian.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TerminationEvidence {
    /// Result of checking that every rule strictly shortens words.
    LengthReducing(bool),
    /// A bounded order check.
    Ball(BallReport),
}

impl TerminationEvidence {
    pub fn length_reducing(sys: &RewritingSystem) -> Self {
        TerminationEvidence::LengthReducing(
            sys.rules().iter().all(|r| r.rhs.len() < r.lhs.len()),
        )
    }

    pub fn holds(&self) -> bool {
        match self {
            TerminationEvidence::LengthReducing(ok) => *ok,
            TerminationEvidence::Ball(report) => report.holds(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// No unresolved pair and the termination evidence holds.
    CompleteCertifiedAtScale,
    NotLocallyConfluent,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CompleteCertifiedAtScale => "complete-certified-at-scale",
            Verdict::NotLocallyConfluent => "not-locally-confluent",
            Verdict::Undecided => "undecided",
        })
    }
}

pub fn completeness_verdict(evidence: &TerminationEvidence, report: &ConfluenceReport) -> Verdict {
    if report.unresolved().next().is_some() {
        Verdict::NotLocallyConfluent
    } else if report.is_complete() && evidence.holds() {
        Verdict::CompleteCertifiedAtScale
    } else {
        Verdict::Undecided
    }
}
