//! Brute-force oracles and corpora shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use fcrs::semigroup::catalog::*;
use fcrs::semigroup::FiniteSemigroup;
use fcrs::{Alphabet, RewritingSystem, Rule, Word};

pub fn trivial() -> FiniteSemigroup {
    FiniteSemigroup::new(vec!["t".into()], vec![vec![0]]).unwrap()
}

/// `{0, a, e}` with `a a = 0` and `e` an identity on `{a, e}`.
pub fn zae() -> FiniteSemigroup {
    FiniteSemigroup::new(
        vec!["0".into(), "a".into(), "e".into()],
        vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 2]],
    )
    .unwrap()
}

/// Every group of order at most 6, up to isomorphism.
pub fn small_groups() -> Vec<(&'static str, FiniteSemigroup)> {
    vec![
        ("trivial", trivial()),
        ("Z2", cyclic_group(2)),
        ("Z3", cyclic_group(3)),
        ("Z4", cyclic_group(4)),
        ("V4", klein_four()),
        ("Z5", cyclic_group(5)),
        ("Z6", cyclic_group(6)),
        ("S3", symmetric_group(3)),
    ]
}

/// Named semigroups of order at most 6.
pub fn named_corpus() -> Vec<(&'static str, FiniteSemigroup)> {
    let mut out = small_groups();
    out.extend([
        ("B2", brandt_b2()),
        ("T2", full_transformations(2)),
        ("rect2x2", rectangular_band(2, 2)),
        ("rect1x3", rectangular_band(1, 3)),
        ("chain2", chain(2)),
        ("chain3", chain(3)),
        ("chain4", chain(4)),
        ("null2", null_semigroup(2)),
        ("null3", null_semigroup(3)),
        ("zae", zae()),
        ("left2", left_zero(2)),
        ("right3", right_zero(3)),
        ("Z2^0", with_zero(&cyclic_group(2))),
        ("Z3^0", with_zero(&cyclic_group(3))),
        ("rect2x2^0", with_zero(&rectangular_band(2, 2))),
        ("rect2x2^1", with_identity(&rectangular_band(2, 2))),
        ("B2^1", with_identity(&brandt_b2())),
        ("Z2xchain2", direct_product(&cyclic_group(2), &chain(2))),
        ("Z2xchain3", direct_product(&cyclic_group(2), &chain(3))),
        ("Z3xchain2", direct_product(&cyclic_group(3), &chain(2))),
        ("T2^0", with_zero(&full_transformations(2))),
        ("left2^1", with_identity(&left_zero(2))),
    ]);
    out
}

/// All associative tables on `n` elements (labelled, not up to isomorphism).
pub fn all_semigroups(n: usize) -> Vec<FiniteSemigroup> {
    let names: Vec<String> = (0..n).map(|k| format!("x{k}")).collect();
    let cells = n * n;
    let mut out = Vec::new();
    let mut digits = vec![0usize; cells];
    loop {
        let table: Vec<Vec<usize>> = digits.chunks(n).map(<[usize]>::to_vec).collect();
        let assoc = (0..n).all(|x| {
            (0..n).all(|y| (0..n).all(|z| table[table[x][y]][z] == table[x][table[y][z]]))
        });
        if assoc {
            out.push(FiniteSemigroup::new(names.clone(), table).unwrap());
        }
        let mut k = 0;
        loop {
            if k == cells {
                return out;
            }
            digits[k] += 1;
            if digits[k] < n {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Principal ideals computed as plain sets: `x S¹`, `S¹ x`, `S¹ x S¹`.
pub struct IdealOracle {
    pub right: Vec<BTreeSet<usize>>,
    pub left: Vec<BTreeSet<usize>>,
    pub two_sided: Vec<BTreeSet<usize>>,
}

impl IdealOracle {
    pub fn new(s: &FiniteSemigroup) -> Self {
        let n = s.len();
        let mut right = Vec::new();
        let mut left = Vec::new();
        let mut two_sided = Vec::new();
        for x in 0..n {
            let r: BTreeSet<usize> = std::iter::once(x).chain((0..n).map(|t| s.mul(x, t))).collect();
            let l: BTreeSet<usize> = std::iter::once(x).chain((0..n).map(|t| s.mul(t, x))).collect();
            let mut j = r.clone();
            j.extend(l.iter().copied());
            for a in 0..n {
                for b in 0..n {
                    j.insert(s.mul(s.mul(a, x), b));
                }
            }
            right.push(r);
            left.push(l);
            two_sided.push(j);
        }
        IdealOracle { right, left, two_sided }
    }

    fn partition_by(keys: &[BTreeSet<usize>]) -> BTreeSet<BTreeSet<usize>> {
        (0..keys.len())
            .map(|x| (0..keys.len()).filter(|&y| keys[y] == keys[x]).collect())
            .collect()
    }

    pub fn r(&self) -> BTreeSet<BTreeSet<usize>> {
        Self::partition_by(&self.right)
    }
    pub fn l(&self) -> BTreeSet<BTreeSet<usize>> {
        Self::partition_by(&self.left)
    }
    pub fn j(&self) -> BTreeSet<BTreeSet<usize>> {
        Self::partition_by(&self.two_sided)
    }
    pub fn h(&self) -> BTreeSet<BTreeSet<usize>> {
        let n = self.right.len();
        (0..n)
            .map(|x| {
                (0..n)
                    .filter(|&y| self.right[y] == self.right[x] && self.left[y] == self.left[x])
                    .collect()
            })
            .collect()
    }
    /// `x D y` iff some `z` has `x R z` and `z L y`.
    pub fn d(&self) -> BTreeSet<BTreeSet<usize>> {
        let n = self.right.len();
        (0..n)
            .map(|x| {
                (0..n)
                    .filter(|&y| (0..n).any(|z| self.right[x] == self.right[z] && self.left[z] == self.left[y]))
                    .collect()
            })
            .collect()
    }
}

pub fn as_partition(classes: Vec<Vec<usize>>) -> BTreeSet<BTreeSet<usize>> {
    classes.into_iter().map(|c| c.into_iter().collect()).collect()
}

/// Element of `M⁰[G; I, Λ; P]`; `None` is the zero.
pub type ReesElement = Option<(usize, usize, usize)>;

/// Product rule of a Rees matrix semigroup over the group table `g`, with
/// `p[λ][i]` a group element or zero.
pub fn rees_product(g: &FiniteSemigroup, p: &[Vec<Option<usize>>], a: ReesElement, b: ReesElement) -> ReesElement {
    let ((i, x, l), (j, y, m)) = (a?, b?);
    let s = p[l][j]?;
    Some((i, g.mul(g.mul(x, s), y), m))
}

pub fn rees_elements(g: &FiniteSemigroup, i_size: usize, lambda_size: usize) -> Vec<ReesElement> {
    let mut out = Vec::new();
    for i in 0..i_size {
        for x in 0..g.len() {
            for l in 0..lambda_size {
                out.push(Some((i, x, l)));
            }
        }
    }
    out
}

/// Words over `{a, b}` of length 1..=6 in shortlex order, packed for
/// bitset indexing.
pub struct TwoLetterWords {
    pub words: Vec<Vec<u8>>,
}

impl TwoLetterWords {
    pub fn new(max_len: usize) -> Self {
        let mut words = Vec::new();
        for len in 1..=max_len {
            for bits in 0..(1u32 << len) {
                words.push((0..len).rev().map(|k| ((bits >> k) & 1) as u8).collect());
            }
        }
        TwoLetterWords { words }
    }

    pub fn index(&self, w: &[u8]) -> usize {
        let len = w.len();
        let offset = (1usize << len) - 2;
        offset + w.iter().fold(0usize, |acc, &c| acc * 2 + c as usize)
    }
}

/// All one-step rewrites of `w` under `rules` (each a `(lhs, rhs)` pair).
pub fn one_step(rules: &[(Vec<u8>, Vec<u8>)], w: &[u8]) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for (lhs, rhs) in rules {
        if lhs.len() > w.len() {
            continue;
        }
        for pos in 0..=w.len() - lhs.len() {
            if &w[pos..pos + lhs.len()] == lhs.as_slice() {
                let mut v = w[..pos].to_vec();
                v.extend_from_slice(rhs);
                v.extend_from_slice(&w[pos + lhs.len()..]);
                out.push(v);
            }
        }
    }
    out
}

/// Joinability oracle for shortlex-decreasing systems over two letters with
/// left-hand sides of length at most 3: every fork `u ← w → v` with
/// `|w| ≤ 5` must have a common descendant. Descendant sets are bitsets over
/// the words of length at most 5, filled in shortlex order.
pub fn locally_confluent_by_joins(rules: &[(Vec<u8>, Vec<u8>)], words: &TwoLetterWords) -> bool {
    let n = words.words.len();
    let mut desc = vec![0u64; n];
    for (k, w) in words.words.iter().enumerate() {
        let mut set = 1u64 << k;
        for v in one_step(rules, w) {
            set |= desc[words.index(&v)];
        }
        desc[k] = set;
    }
    words.words.iter().all(|w| {
        let succ = one_step(rules, w);
        succ.iter().enumerate().all(|(x, u)| {
            succ[x + 1..]
                .iter()
                .all(|v| desc[words.index(u)] & desc[words.index(v)] != 0)
        })
    })
}

/// Rules over `{a, b}` with `|lhs| ≤ 3` oriented to shrink in shortlex order.
pub fn shortlex_rules() -> Vec<(Vec<u8>, Vec<u8>)> {
    let words = TwoLetterWords::new(3);
    let key = |w: &Vec<u8>| (w.len(), w.clone());
    let mut out = Vec::new();
    for l in &words.words {
        for r in &words.words {
            if key(r) < key(l) {
                out.push((l.clone(), r.clone()));
            }
        }
    }
    out
}

pub fn two_letter_system(rules: &[(Vec<u8>, Vec<u8>)]) -> RewritingSystem {
    let alphabet = Alphabet::new(["a", "b"]).unwrap();
    let to_word = |w: &[u8]| Word(w.iter().map(|&c| fcrs::Letter(c as u32)).collect());
    RewritingSystem::new(
        alphabet,
        rules.iter().map(|(l, r)| Rule::new(to_word(l), to_word(r))).collect(),
    )
    .unwrap()
}

/// Dershowitz–Manna order by search: `n` is reachable from `m` by replacing
/// one element with any number of strictly smaller ones, at least once.
/// Intermediate multisets never need more than `max(|m|, |n|)` elements.
pub fn multiset_greater_by_search(m: &[usize], n: &[usize]) -> bool {
    let cap = m.len().max(n.len());
    let sorted = |mut v: Vec<usize>| {
        v.sort_unstable();
        v
    };
    let target = sorted(n.to_vec());
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut frontier = vec![sorted(m.to_vec())];
    while let Some(cur) = frontier.pop() {
        for k in 0..cur.len() {
            let x = cur[k];
            let rest: Vec<usize> = cur.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &v)| v).collect();
            // replacements: multisets of values below x, size up to cap - |rest|
            let room = cap.saturating_sub(rest.len());
            for repl in multisets_below(x, room) {
                let mut next = rest.clone();
                next.extend(repl);
                let next = sorted(next);
                if next == target {
                    return true;
                }
                if seen.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
    }
    false
}

fn multisets_below(x: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut level = vec![vec![]];
    for _ in 0..max_size {
        let mut next = Vec::new();
        for m in &level {
            let start = m.last().copied().unwrap_or(0);
            for v in start..x {
                let mut mm: Vec<usize> = m.clone();
                mm.push(v);
                next.push(mm);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Multisets with entries in `0..=max_entry` and at most `max_size` elements.
pub fn small_multisets(max_entry: usize, max_size: usize) -> Vec<Vec<usize>> {
    multisets_below(max_entry + 1, max_size)
}
