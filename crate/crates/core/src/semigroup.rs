//! Finite semigroups given by Cayley tables.
//!
//! Covers Green's relations, regularity, maximal subgroups, principal
//! factors and the Rees coordinatization of completely (0-)simple
//! semigroups, plus the multiplication-table rewriting system.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rewrite::{RewriteError, RewritingSystem, Rule};
use crate::word::{valid_token, Alphabet, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("a semigroup needs at least one element")]
    Empty,
    #[error("invalid element name {0:?}")]
    InvalidName(String),
    #[error("duplicate element name {0:?}")]
    DuplicateName(String),
    #[error("table row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("table entry ({row}, {col}) = {value} is out of range")]
    IndexOutOfRange { row: usize, col: usize, value: usize },
    #[error("not associative: ({x} {y}) {z} != {x} ({y} {z})")]
    NonAssociative { x: String, y: String, z: String },
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("element {0:?} is not idempotent")]
    NotIdempotent(String),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("elements {0:?} are not closed under multiplication")]
    NotClosed(Vec<String>),
    #[error("not an ideal: {0} * {1} leaves the subset")]
    NotIdeal(String, String),
    #[error("not completely (0-)simple: {0}")]
    NotCompletelySimple(String),
    #[error("malformed document: {0}")]
    Document(String),
}

/// On-disk form of a Cayley table: `table[i][j]` is the index of `elements[i] * elements[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyDocument {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSemigroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl FiniteSemigroup {
    /// Validates shape, index range and associativity (all triples).
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, SemigroupError> {
        let n = names.len();
        if n == 0 {
            return Err(SemigroupError::Empty);
        }
        let mut index = HashMap::new();
        for (k, name) in names.iter().enumerate() {
            if !valid_token(name) || name.contains('=') {
                return Err(SemigroupError::InvalidName(name.clone()));
            }
            if index.insert(name.clone(), k).is_some() {
                return Err(SemigroupError::DuplicateName(name.clone()));
            }
        }
        if table.len() != n {
            return Err(SemigroupError::NotSquare {
                row: table.len(),
                len: 0,
                expected: n,
            });
        }
        for (row, entries) in table.iter().enumerate() {
            if entries.len() != n {
                return Err(SemigroupError::NotSquare {
                    row,
                    len: entries.len(),
                    expected: n,
                });
            }
            if let Some((col, &value)) = entries.iter().enumerate().find(|(_, &v)| v >= n) {
                return Err(SemigroupError::IndexOutOfRange { row, col, value });
            }
        }
        let s = FiniteSemigroup {
            names,
            table,
            index,
        };
        if let Some((x, y, z)) = s.associativity_violation() {
            return Err(SemigroupError::NonAssociative {
                x: s.names[x].clone(),
                y: s.names[y].clone(),
                z: s.names[z].clone(),
            });
        }
        Ok(s)
    }

    fn associativity_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for x in 0..n {
            for y in 0..n {
                let xy = self.table[x][y];
                for z in 0..n {
                    if self.table[xy][z] != self.table[x][self.table[y][z]] {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn from_document(doc: CayleyDocument) -> Result<Self, SemigroupError> {
        Self::new(doc.elements, doc.table)
    }

    pub fn from_json(text: &str) -> Result<Self, SemigroupError> {
        let doc: CayleyDocument =
            serde_json::from_str(text).map_err(|e| SemigroupError::Document(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn to_document(&self) -> CayleyDocument {
        CayleyDocument {
            elements: self.names.clone(),
            table: self.table.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn product(&self, elements: impl IntoIterator<Item = usize>) -> Option<usize> {
        elements.into_iter().reduce(|a, b| self.mul(a, b))
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize, SemigroupError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| SemigroupError::UnknownElement(name.to_string()))
    }

    pub fn is_idempotent(&self, x: usize) -> bool {
        self.mul(x, x) == x
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.is_idempotent(x)).collect()
    }

    pub fn zero(&self) -> Option<usize> {
        (0..self.len()).find(|&z| (0..self.len()).all(|x| self.mul(z, x) == z && self.mul(x, z) == z))
    }

    pub fn identity(&self) -> Option<usize> {
        (0..self.len()).find(|&e| (0..self.len()).all(|x| self.mul(e, x) == x && self.mul(x, e) == x))
    }

    pub fn is_group(&self) -> bool {
        match self.identity() {
            Some(e) => (0..self.len()).all(|x| (0..self.len()).any(|y| self.mul(x, y) == e && self.mul(y, x) == e)),
            None => false,
        }
    }

    /// Group inverse of `x`; `None` outside groups.
    pub fn inverse(&self, x: usize) -> Option<usize> {
        let e = self.identity()?;
        (0..self.len()).find(|&y| self.mul(x, y) == e && self.mul(y, x) == e)
    }

    /// Exhaustive: every `x` has some `y` with `x y x = x`.
    pub fn is_regular(&self) -> bool {
        (0..self.len()).all(|x| (0..self.len()).any(|y| self.mul(self.mul(x, y), x) == x))
    }

    /// The subsemigroup on `elements` (kept in the given order) and its
    /// embedding into `self`.
    pub fn subsemigroup(&self, elements: &[usize]) -> Result<(FiniteSemigroup, Vec<usize>), SemigroupError> {
        let pos: HashMap<usize, usize> = elements.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        let mut table = Vec::with_capacity(elements.len());
        for &x in elements {
            let mut row = Vec::with_capacity(elements.len());
            for &y in elements {
                let p = self.mul(x, y);
                row.push(*pos.get(&p).ok_or_else(|| {
                    SemigroupError::NotClosed(elements.iter().map(|&e| self.names[e].clone()).collect())
                })?);
            }
            table.push(row);
        }
        let names = elements.iter().map(|&x| self.names[x].clone()).collect();
        Ok((FiniteSemigroup::new(names, table)?, elements.to_vec()))
    }

    /// Checks that `subset` is a two-sided ideal.
    pub fn check_ideal(&self, subset: &[usize]) -> Result<(), SemigroupError> {
        let member: BTreeSet<usize> = subset.iter().copied().collect();
        for &t in subset {
            for s in 0..self.len() {
                if !member.contains(&self.mul(t, s)) {
                    return Err(SemigroupError::NotIdeal(self.names[t].clone(), self.names[s].clone()));
                }
                if !member.contains(&self.mul(s, t)) {
                    return Err(SemigroupError::NotIdeal(self.names[s].clone(), self.names[t].clone()));
                }
            }
        }
        Ok(())
    }

    /// Rees quotient `S / I`: the ideal collapses to one zero named
    /// `zero_name`. Returns the quotient and the map from `S` indices to
    /// quotient indices. Elements outside the ideal keep their names and order.
    pub fn rees_quotient(
        &self,
        ideal: &[usize],
        zero_name: &str,
    ) -> Result<(FiniteSemigroup, Vec<usize>), SemigroupError> {
        self.check_ideal(ideal)?;
        let member: BTreeSet<usize> = ideal.iter().copied().collect();
        let outside: Vec<usize> = (0..self.len()).filter(|x| !member.contains(x)).collect();
        let zero = outside.len();
        let mut map = vec![zero; self.len()];
        for (k, &x) in outside.iter().enumerate() {
            map[x] = k;
        }
        let mut names: Vec<String> = outside.iter().map(|&x| self.names[x].clone()).collect();
        names.push(zero_name.to_string());
        let mut table = vec![vec![zero; zero + 1]; zero + 1];
        for (i, &x) in outside.iter().enumerate() {
            for (j, &y) in outside.iter().enumerate() {
                table[i][j] = map[self.mul(x, y)];
            }
        }
        Ok((FiniteSemigroup::new(names, table)?, map))
    }

    /// A name not used by any element, derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.index.contains_key(&name) {
            name.push('\'');
        }
        name
    }

    fn right_ideal(&self, x: usize) -> Vec<bool> {
        let mut m = vec![false; self.len()];
        m[x] = true;
        for s in 0..self.len() {
            m[self.mul(x, s)] = true;
        }
        m
    }

    fn left_ideal(&self, x: usize) -> Vec<bool> {
        let mut m = vec![false; self.len()];
        m[x] = true;
        for s in 0..self.len() {
            m[self.mul(s, x)] = true;
        }
        m
    }

    fn two_sided_ideal(&self, x: usize) -> Vec<bool> {
        let mut m = self.left_ideal(x);
        let left: Vec<usize> = (0..self.len()).filter(|&k| m[k]).collect();
        for y in left {
            for s in 0..self.len() {
                m[self.mul(y, s)] = true;
            }
        }
        m
    }

    pub fn green_classes(&self) -> GreenClasses {
        let n = self.len();
        let right: Vec<Vec<bool>> = (0..n).map(|x| self.right_ideal(x)).collect();
        let left: Vec<Vec<bool>> = (0..n).map(|x| self.left_ideal(x)).collect();
        let two: Vec<Vec<bool>> = (0..n).map(|x| self.two_sided_ideal(x)).collect();
        let r = classes_by_key(&right);
        let l = classes_by_key(&left);
        let j = classes_by_key(&two);
        let h = classes_by_key(&(0..n).map(|x| (r[x], l[x])).collect::<Vec<_>>());
        // D as the join of R and L
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for x in 0..n {
            for y in x + 1..n {
                if r[x] == r[y] || l[x] == l[y] {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
        let d = classes_by_key(&roots);
        let j_count = j.iter().max().map_or(0, |m| m + 1);
        let mut reps = vec![usize::MAX; j_count];
        for x in (0..n).rev() {
            reps[j[x]] = x;
        }
        let j_leq = (0..j_count)
            .map(|a| {
                (0..j_count)
                    .map(|b| (0..n).all(|k| !two[reps[a]][k] || two[reps[b]][k]))
                    .collect()
            })
            .collect();
        GreenClasses { r, l, h, d, j, j_leq }
    }

    /// The H-class of idempotent `e` as a group, with its embedding.
    pub fn maximal_subgroup(&self, e: usize) -> Result<(FiniteSemigroup, Vec<usize>), SemigroupError> {
        if !self.is_idempotent(e) {
            return Err(SemigroupError::NotIdempotent(self.names[e].clone()));
        }
        let green = self.green_classes();
        let members: Vec<usize> = (0..self.len()).filter(|&x| green.h[x] == green.h[e]).collect();
        let (g, emb) = self.subsemigroup(&members)?;
        if !g.is_group() {
            return Err(SemigroupError::NotAGroup(format!("H-class of {}", self.names[e])));
        }
        Ok((g, emb))
    }

    /// `J⁰` for the J-class `class`: products leaving the class become a new zero.
    pub fn principal_factor(&self, class: usize) -> Result<PrincipalFactor, SemigroupError> {
        let green = self.green_classes();
        let members: Vec<usize> = (0..self.len()).filter(|&x| green.j[x] == class).collect();
        if members.is_empty() {
            return Err(SemigroupError::UnknownElement(format!("J-class {class}")));
        }
        let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        let zero = members.len();
        let mut table = vec![vec![zero; zero + 1]; zero + 1];
        for (i, &x) in members.iter().enumerate() {
            for (j, &y) in members.iter().enumerate() {
                table[i][j] = pos.get(&self.mul(x, y)).copied().unwrap_or(zero);
            }
        }
        let mut names: Vec<String> = members.iter().map(|&x| self.names[x].clone()).collect();
        names.push(self.fresh_name("0"));
        Ok(PrincipalFactor {
            semigroup: FiniteSemigroup::new(names, table)?,
            embedding: members,
            zero,
        })
    }
}

fn classes_by_key<K: Eq + std::hash::Hash + Clone>(keys: &[K]) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    keys.iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k.clone()).or_insert(next)
        })
        .collect()
}

/// Green's classes: per element class ids, numbered by first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreenClasses {
    pub r: Vec<usize>,
    pub l: Vec<usize>,
    pub h: Vec<usize>,
    pub d: Vec<usize>,
    pub j: Vec<usize>,
    /// `j_leq[a][b]` iff `S¹aS¹ ⊆ S¹bS¹` for J-classes `a`, `b`.
    pub j_leq: Vec<Vec<bool>>,
}

fn partition(ids: &[usize]) -> Vec<Vec<usize>> {
    let count = ids.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); count];
    for (x, &c) in ids.iter().enumerate() {
        out[c].push(x);
    }
    out
}

impl GreenClasses {
    pub fn r_classes(&self) -> Vec<Vec<usize>> {
        partition(&self.r)
    }
    pub fn l_classes(&self) -> Vec<Vec<usize>> {
        partition(&self.l)
    }
    pub fn h_classes(&self) -> Vec<Vec<usize>> {
        partition(&self.h)
    }
    pub fn d_classes(&self) -> Vec<Vec<usize>> {
        partition(&self.d)
    }
    pub fn j_classes(&self) -> Vec<Vec<usize>> {
        partition(&self.j)
    }

    /// J-classes with no other class strictly above them.
    pub fn maximal_j_classes(&self) -> Vec<usize> {
        let n = self.j_leq.len();
        (0..n)
            .filter(|&a| (0..n).all(|b| b == a || !self.j_leq[a][b]))
            .collect()
    }
}

/// `J⁰` of a J-class. `embedding[k]` is the `S` index of factor element `k`
/// for `k != zero`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalFactor {
    pub semigroup: FiniteSemigroup,
    pub embedding: Vec<usize>,
    pub zero: usize,
}

/// Element of a (0-)Rees matrix semigroup; indices are 0-based.
pub type Triple = (usize, usize, usize);

/// Rees coordinates of a completely (0-)simple semigroup.
///
/// Index 0 of `I` and `Λ` is the R- and L-class of the chosen idempotent, and
/// `matrix[0][0]` is the group identity. `matrix[λ][i]` is `None` for zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReesCoordinatization {
    pub group: FiniteSemigroup,
    /// `group` index → index in the coordinatized semigroup.
    pub group_embedding: Vec<usize>,
    pub identity: usize,
    pub i_size: usize,
    pub lambda_size: usize,
    pub matrix: Vec<Vec<Option<usize>>>,
    /// Per element: its triple, or `None` for the zero.
    pub triple_of: Vec<Option<Triple>>,
    pub zero: Option<usize>,
}

impl ReesCoordinatization {
    pub fn element_of(&self, t: Triple) -> Option<usize> {
        self.triple_of.iter().position(|x| *x == Some(t))
    }

    /// The product rule `(i,g,λ)(j,h,μ) = (i, g p_λj h, μ)`, zero when `p_λj` is.
    pub fn multiply(&self, a: Option<Triple>, b: Option<Triple>) -> Option<Triple> {
        let ((i, g, lambda), (j, h, mu)) = (a?, b?);
        let p = self.matrix[lambda][j]?;
        Some((i, self.group.mul(self.group.mul(g, p), h), mu))
    }
}

/// Rees coordinates for a completely simple semigroup, or a completely
/// 0-simple one (detected by the presence of a zero and more than one element).
pub fn coordinatize(f: &FiniteSemigroup) -> Result<ReesCoordinatization, SemigroupError> {
    let bad = |m: String| SemigroupError::NotCompletelySimple(m);
    let zero = f.zero().filter(|_| f.len() > 1);
    let nonzero: Vec<usize> = (0..f.len()).filter(|&x| Some(x) != zero).collect();
    let green = f.green_classes();
    if nonzero.iter().any(|&x| green.j[x] != green.j[nonzero[0]]) {
        return Err(bad("non-zero elements span several J-classes".into()));
    }
    let e = *nonzero
        .iter()
        .find(|&&x| f.is_idempotent(x))
        .ok_or_else(|| bad("no non-zero idempotent".into()))?;
    let order_classes = |ids: &[usize]| -> Vec<usize> {
        let mut seen = vec![ids[e]];
        for &x in &nonzero {
            if !seen.contains(&ids[x]) {
                seen.push(ids[x]);
            }
        }
        seen
    };
    let r_order = order_classes(&green.r);
    let l_order = order_classes(&green.l);
    let pick = |class_ids: &[usize], class: usize, other_ids: &[usize], other: usize| {
        nonzero
            .iter()
            .copied()
            .find(|&x| class_ids[x] == class && other_ids[x] == other)
    };
    let mut reps_r = vec![e];
    for &rc in &r_order[1..] {
        reps_r.push(pick(&green.r, rc, &green.l, green.l[e]).ok_or_else(|| bad("empty H-class in column 1".into()))?);
    }
    let mut reps_q = vec![e];
    for &lc in &l_order[1..] {
        reps_q.push(pick(&green.l, lc, &green.r, green.r[e]).ok_or_else(|| bad("empty H-class in row 1".into()))?);
    }
    let (group, group_embedding) = f.maximal_subgroup(e)?;
    let gpos: HashMap<usize, usize> = group_embedding.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let identity = gpos[&e];

    let mut triple_of: Vec<Option<Triple>> = vec![None; f.len()];
    for (i, &r) in reps_r.iter().enumerate() {
        for (g, &gx) in group_embedding.iter().enumerate() {
            for (lambda, &q) in reps_q.iter().enumerate() {
                let s = f.mul(f.mul(r, gx), q);
                if Some(s) == zero || triple_of[s].is_some() {
                    return Err(bad(format!("coordinates collide at {}", f.name(s))));
                }
                triple_of[s] = Some((i, g, lambda));
            }
        }
    }
    if let Some(x) = nonzero.iter().find(|&&x| triple_of[x].is_none()) {
        return Err(bad(format!("{} has no coordinates", f.name(*x))));
    }
    let mut matrix = vec![vec![None; reps_r.len()]; reps_q.len()];
    for (lambda, &q) in reps_q.iter().enumerate() {
        for (i, &r) in reps_r.iter().enumerate() {
            let p = f.mul(q, r);
            matrix[lambda][i] = if Some(p) == zero {
                None
            } else {
                Some(*gpos.get(&p).ok_or_else(|| bad(format!("sandwich entry {} outside the group", f.name(p))))?)
            };
        }
    }
    let coords = ReesCoordinatization {
        group,
        group_embedding,
        identity,
        i_size: reps_r.len(),
        lambda_size: reps_q.len(),
        matrix,
        triple_of,
        zero,
    };
    for x in 0..f.len() {
        for y in 0..f.len() {
            let expected = coords.triple_of[f.mul(x, y)];
            if coords.multiply(coords.triple_of[x], coords.triple_of[y]) != expected {
                return Err(bad(format!(
                    "product {} * {} does not follow the Rees rule",
                    f.name(x),
                    f.name(y)
                )));
            }
        }
    }
    Ok(coords)
}

/// The multiplication-table system: one letter per element (named as the
/// element), and `x y -> z` for every product. It is complete for any finite
/// semigroup; it is used for groups by default. Returns the system and the
/// letter of each element.
pub fn cayley_fcrs(g: &FiniteSemigroup) -> Result<(RewritingSystem, Vec<Letter>), RewriteError> {
    let alphabet = Alphabet::new(g.names().iter().cloned())?;
    let letters: Vec<Letter> = alphabet.letters().collect();
    let mut rules = Vec::with_capacity(g.len() * g.len());
    for x in 0..g.len() {
        for y in 0..g.len() {
            rules.push(Rule::new(
                Word(vec![letters[x], letters[y]]),
                Word::single(letters[g.mul(x, y)]),
            ));
        }
    }
    Ok((RewritingSystem::new(alphabet, rules)?, letters))
}

/// Standard small semigroups used by examples and tests.
pub mod catalog {
    use super::FiniteSemigroup;

    fn build(names: Vec<String>, mul: impl Fn(usize, usize) -> usize) -> FiniteSemigroup {
        let n = names.len();
        let table = (0..n).map(|x| (0..n).map(|y| mul(x, y)).collect()).collect();
        FiniteSemigroup::new(names, table).expect("catalog entries are semigroups")
    }

    /// Cyclic group of order `n` with elements `z0 .. z{n-1}`.
    pub fn cyclic_group(n: usize) -> FiniteSemigroup {
        build((0..n).map(|k| format!("z{k}")).collect(), |x, y| (x + y) % n)
    }

    /// Klein four-group.
    pub fn klein_four() -> FiniteSemigroup {
        build(["v0", "v1", "v2", "v3"].map(String::from).to_vec(), |x, y| x ^ y)
    }

    fn all_maps(n: usize) -> Vec<Vec<usize>> {
        let mut maps = vec![vec![]];
        for _ in 0..n {
            maps = maps
                .into_iter()
                .flat_map(|m| {
                    (0..n).map(move |v| {
                        let mut m = m.clone();
                        m.push(v);
                        m
                    })
                })
                .collect();
        }
        maps
    }

    fn map_name(prefix: &str, m: &[usize]) -> String {
        let digits: String = m.iter().map(|d| char::from(b'0' + *d as u8)).collect();
        format!("{prefix}{digits}")
    }

    /// Full transformation monoid on `n` points; `f g` applies `f` first.
    pub fn full_transformations(n: usize) -> FiniteSemigroup {
        transformations(all_maps(n), "t")
    }

    /// Symmetric group on `n` points, composed like [`full_transformations`].
    pub fn symmetric_group(n: usize) -> FiniteSemigroup {
        let perms = all_maps(n)
            .into_iter()
            .filter(|m| {
                let mut s = m.clone();
                s.sort_unstable();
                s.dedup();
                s.len() == n
            })
            .collect();
        transformations(perms, "p")
    }

    fn transformations(maps: Vec<Vec<usize>>, prefix: &str) -> FiniteSemigroup {
        let names = maps.iter().map(|m| map_name(prefix, m)).collect();
        build(names, |x, y| {
            let composed: Vec<usize> = maps[x].iter().map(|&p| maps[y][p]).collect();
            maps.iter().position(|m| *m == composed).expect("closed")
        })
    }

    /// Brandt semigroup `B₂`: zero and the four 2×2 matrix units.
    pub fn brandt_b2() -> FiniteSemigroup {
        let units = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let mut names = vec!["zero".to_string()];
        names.extend(units.iter().map(|(i, j)| format!("e{}{}", i + 1, j + 1)));
        build(names, |x, y| {
            if x == 0 || y == 0 {
                return 0;
            }
            let ((i, j), (k, l)) = (units[x - 1], units[y - 1]);
            if j == k {
                1 + units.iter().position(|&u| u == (i, l)).expect("unit")
            } else {
                0
            }
        })
    }

    /// Rectangular band `I × Λ` with `(i,λ)(j,μ) = (i,μ)`.
    pub fn rectangular_band(rows: usize, cols: usize) -> FiniteSemigroup {
        let names = (0..rows * cols)
            .map(|k| format!("r{}{}", k / cols + 1, k % cols + 1))
            .collect();
        build(names, |x, y| (x / cols) * cols + y % cols)
    }

    /// Chain semilattice `0 < 1 < ... < n-1` under minimum.
    pub fn chain(n: usize) -> FiniteSemigroup {
        build((0..n).map(|k| format!("c{k}")).collect(), |x, y| x.min(y))
    }

    /// Null semigroup: `z` and `n - 1` further elements, every product `z`.
    pub fn null_semigroup(n: usize) -> FiniteSemigroup {
        let mut names = vec!["z".to_string()];
        names.extend((1..n).map(|k| format!("n{k}")));
        build(names, |_, _| 0)
    }

    /// Left-zero band of size `n`: `x y = x`.
    pub fn left_zero(n: usize) -> FiniteSemigroup {
        build((0..n).map(|k| format!("l{k}")).collect(), |x, _| x)
    }

    /// Right-zero band of size `n`: `x y = y`.
    pub fn right_zero(n: usize) -> FiniteSemigroup {
        build((0..n).map(|k| format!("q{k}")).collect(), |_, y| y)
    }

    /// `S` with a new identity `one` adjoined.
    pub fn with_identity(s: &FiniteSemigroup) -> FiniteSemigroup {
        let n = s.len();
        let mut names = s.names().to_vec();
        names.push(s.fresh_name("one"));
        build(names, |x, y| {
            if x == n {
                y
            } else if y == n {
                x
            } else {
                s.mul(x, y)
            }
        })
    }

    /// `S` with a new zero adjoined.
    pub fn with_zero(s: &FiniteSemigroup) -> FiniteSemigroup {
        let n = s.len();
        let mut names = s.names().to_vec();
        names.push(s.fresh_name("zero"));
        build(names, |x, y| if x == n || y == n { n } else { s.mul(x, y) })
    }

    /// Direct product `S × T` with names `a.b`.
    pub fn direct_product(s: &FiniteSemigroup, t: &FiniteSemigroup) -> FiniteSemigroup {
        let m = t.len();
        let names = (0..s.len() * m)
            .map(|k| format!("{}.{}", s.name(k / m), t.name(k % m)))
            .collect();
        build(names, |x, y| s.mul(x / m, y / m) * m + t.mul(x % m, y % m))
    }
}
