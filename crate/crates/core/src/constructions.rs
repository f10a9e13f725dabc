//! Complete rewriting systems assembled from smaller ones.
//!
//! Every construction returns a [`ConstructionOutput`]: the system, the
//! normal form of each semigroup element (the witness), the order that
//! certifies termination, and a provenance record.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::confluence::{
    check_local_confluence, completeness_verdict, ConfluenceReport, TerminationEvidence, Verdict,
};
use crate::order::{fitting_ball_len, verify_decrease_on_ball, Certificate, OrderError};
use crate::rewrite::{parse_presentation, PresentationLines, RewriteError, RewritingSystem, Rule};
use crate::semigroup::{
    cayley_fcrs, coordinatize, CayleyDocument, FiniteSemigroup, ReesCoordinatization, SemigroupError,
};
use crate::word::{Alphabet, Letter, LetterSet, Word, WordError};

/// Step budget for the normalizations done while building and checking.
pub const STEP_BUDGET: usize = 1_000_000;
/// Longest normal form searched for when listing the elements of a group.
pub const GROUP_WORD_CAP: usize = 32;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("letter {0:?} occurs in both input alphabets")]
    LetterCollision(String),
    #[error("missing glue entry: {0}")]
    MissingGlue(String),
    #[error("invalid Rees datum: {0}")]
    Datum(String),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

type Result<T, E = ConstructionError> = std::result::Result<T, E>;

fn precondition(msg: impl Into<String>) -> ConstructionError {
    ConstructionError::Precondition(msg.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub construction: String,
    /// SHA-256 of the canonical text of the inputs.
    pub digest: String,
    pub notes: Vec<String>,
}

impl Provenance {
    fn new(construction: &str, inputs: &[&str]) -> Self {
        let mut hasher = Sha256::new();
        for part in inputs {
            hasher.update(part.as_bytes());
            hasher.update([0u8]);
        }
        let digest = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Provenance {
            construction: construction.to_string(),
            digest,
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionOutput {
    pub system: RewritingSystem,
    /// Element name and its irreducible word, in a fixed order.
    pub witness: Vec<(String, Word)>,
    pub certificate: Certificate,
    pub provenance: Provenance,
}

impl ConstructionOutput {
    /// The multiplication-table system of `s`, each element witnessed by its letter.
    pub fn from_table(s: &FiniteSemigroup) -> Result<Self> {
        let (system, letters) = cayley_fcrs(s)?;
        let witness = (0..s.len())
            .map(|x| (s.name(x).to_string(), Word::single(letters[x])))
            .collect();
        Ok(ConstructionOutput {
            system,
            witness,
            certificate: Certificate::Length,
            provenance: Provenance::new("multiplication-table", &[&s.to_json()]),
        })
    }

    pub fn witness_word(&self, name: &str) -> Option<&Word> {
        self.witness.iter().find(|(n, _)| n == name).map(|(_, w)| w)
    }

    /// Element named by the normal form of `w`, if any.
    pub fn element_of(&self, w: &Word) -> Result<Option<&str>> {
        let nf = self.system.normal_form(w, STEP_BUDGET)?;
        Ok(self.witness.iter().find(|(_, v)| *v == nf).map(|(n, _)| n.as_str()))
    }

    pub fn to_text(&self) -> String {
        let mut out = self.system.to_text();
        out.push_str("witness:\n");
        for (name, w) in &self.witness {
            let _ = writeln!(out, "{name} = {}", self.system.render(w));
        }
        let _ = writeln!(out, "certificate: {}", self.certificate.to_text());
        let _ = writeln!(
            out,
            "provenance: {} sha256={}",
            self.provenance.construction, self.provenance.digest
        );
        for note in &self.provenance.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let perr = |line: usize, message: String| ConstructionError::Parse { line, message };
        let mut lines = PresentationLines::new(text);
        let system = parse_presentation(&mut lines).map_err(|e| perr(e.line, e.message))?;
        match lines.next() {
            Some((_, "witness:")) => {}
            Some((no, l)) => return Err(perr(no, format!("expected `witness:`, found {l:?}"))),
            None => return Err(perr(0, "missing `witness:` section".into())),
        }
        let mut witness = Vec::new();
        let certificate = loop {
            let (no, line) = lines
                .next()
                .ok_or_else(|| perr(0, "missing `certificate:` line".into()))?;
            if let Some(body) = line.strip_prefix("certificate:") {
                break Certificate::parse(body).map_err(|e| perr(no, e.to_string()))?;
            }
            let (name, word) = line
                .split_once('=')
                .ok_or_else(|| perr(no, format!("witness line {line:?} lacks `=`")))?;
            let word = system.parse_word(word).map_err(|e| perr(no, e.to_string()))?;
            witness.push((name.trim().to_string(), word));
        };
        let mut provenance = Provenance {
            construction: String::new(),
            digest: String::new(),
            notes: Vec::new(),
        };
        for (no, line) in lines {
            if let Some(body) = line.strip_prefix("provenance:") {
                let mut parts = body.split_whitespace();
                provenance.construction = parts.next().unwrap_or_default().to_string();
                provenance.digest = parts
                    .next()
                    .and_then(|d| d.strip_prefix("sha256="))
                    .unwrap_or_default()
                    .to_string();
            } else if let Some(note) = line.strip_prefix("note:") {
                provenance.notes.push(note.trim().to_string());
            } else {
                return Err(perr(no, format!("unexpected line {line:?}")));
            }
        }
        Ok(ConstructionOutput {
            system,
            witness,
            certificate,
            provenance,
        })
    }

    /// Witness words that are reducible, and pairs of names sharing a word.
    pub fn witness_defects(&self) -> (Vec<String>, Vec<(String, String)>) {
        let reducible = self
            .witness
            .iter()
            .filter(|(_, w)| !self.system.is_irreducible(w))
            .map(|(n, _)| n.clone())
            .collect();
        let mut seen: HashMap<&Word, &str> = HashMap::new();
        let mut shared = Vec::new();
        for (n, w) in &self.witness {
            if let Some(prev) = seen.insert(w, n) {
                shared.push((prev.to_string(), n.clone()));
            }
        }
        (reducible, shared)
    }
}

/// The letter `l` with rules `x l -> l` and `l x -> l` for every letter `x`.
pub fn absorbing_letter(sys: &RewritingSystem) -> Option<Letter> {
    let rules: HashSet<&Rule> = sys.rules().iter().collect();
    sys.alphabet().letters().find(|&z| {
        let zw = Word::single(z);
        sys.alphabet().letters().all(|x| {
            rules.contains(&Rule::new(Word(vec![x, z]), zw.clone()))
                && rules.contains(&Rule::new(Word(vec![z, x]), zw.clone()))
        })
    })
}

/// Adjoins a letter `0` for the zero represented by the irreducible `z`.
///
/// Witness entries whose word normalizes to `z` are remapped to `0`; with an
/// empty `witness` the output witness is just the zero.
pub fn adjoin_zero(
    sys: &RewritingSystem,
    z: &Word,
    witness: &[(String, Word)],
) -> Result<ConstructionOutput> {
    if sys.alphabet().contains_token("0") {
        return Err(precondition("letter 0 is already in the alphabet; rename it first"));
    }
    sys.alphabet().check(z)?;
    if z.is_empty() || !sys.is_irreducible(z) {
        return Err(precondition(format!("{} is not irreducible", sys.render(z))));
    }
    for x in sys.alphabet().letters() {
        let x = Word::single(x);
        if sys.normal_form(&z.concat(&x), STEP_BUDGET)? != *z
            || sys.normal_form(&x.concat(z), STEP_BUDGET)? != *z
        {
            return Err(precondition(format!(
                "{} does not represent a zero: fails against {}",
                sys.render(z),
                sys.render(&x)
            )));
        }
    }
    let mut alphabet = sys.alphabet().clone();
    let zero = alphabet.push("0".into())?;
    let zw = Word::single(zero);
    let mut rules = sys.rules().to_vec();
    rules.push(Rule::new(z.clone(), zw.clone()));
    for x in alphabet.letters() {
        rules.push(Rule::new(Word(vec![zero, x]), zw.clone()));
        rules.push(Rule::new(Word(vec![x, zero]), zw.clone()));
    }
    let system = RewritingSystem::new_dedup(alphabet, rules)?;
    let mut out_witness = Vec::new();
    for (name, w) in witness {
        let nf = sys.normal_form(w, STEP_BUDGET)?;
        out_witness.push((name.clone(), if nf == *z { zw.clone() } else { nf }));
    }
    if !out_witness.iter().any(|(_, w)| *w == zw) {
        out_witness.push(("0".to_string(), zw));
    }
    let witness_text: String = witness.iter().map(|(n, w)| format!("{n}={};", sys.render(w))).collect();
    Ok(ConstructionOutput {
        system,
        witness: out_witness,
        certificate: Certificate::AdjoinZero,
        provenance: Provenance::new("adjoin-zero", &[&sys.to_text(), &sys.render(z), &witness_text]),
    })
}

/// Right-hand sides for the extra rules of an ideal extension. Keys use the
/// letters of the ideal system (`a`) and of the quotient system (`b`, `u`);
/// values are words over the ideal alphabet.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdealExtensionGlue {
    pub rho: HashMap<Word, Word>,
    pub sigma: HashMap<(Letter, Letter), Word>,
    pub pi: HashMap<(Letter, Letter), Word>,
}

/// Letters of the quotient system that normalize to its zero letter, the
/// zero letter itself, and the indices of rules whose sides represent zero.
struct QuotientZero {
    zero: Letter,
    zero_letters: LetterSet,
    zero_rules: Vec<usize>,
}

fn quotient_zero(u: &RewritingSystem) -> Result<QuotientZero> {
    let zero = absorbing_letter(u).ok_or_else(|| {
        precondition("quotient system has no absorbing zero letter; apply adjoin_zero first")
    })?;
    let zw = Word::single(zero);
    let mut zero_letters = LetterSet::new(u.alphabet().len());
    for x in u.alphabet().letters() {
        if u.normal_form(&Word::single(x), STEP_BUDGET)? == zw {
            zero_letters.insert(x);
        }
    }
    let mut zero_rules = Vec::new();
    for (k, r) in u.rules().iter().enumerate() {
        if u.normal_form(&r.lhs, STEP_BUDGET)? == zw {
            zero_rules.push(k);
        }
    }
    Ok(QuotientZero {
        zero,
        zero_letters,
        zero_rules,
    })
}

fn avoids(w: &Word, set: &LetterSet) -> bool {
    w.iter().all(|l| !set.contains(l))
}

/// Computes the glue from the multiplication table of `s`. `t` presents the
/// ideal `t_elements` and `u` the Rees quotient; witness names must be names
/// of `s` (the quotient's zero may carry any name).
pub fn derive_glue(
    s: &FiniteSemigroup,
    t_elements: &[usize],
    t: &ConstructionOutput,
    u: &ConstructionOutput,
) -> Result<IdealExtensionGlue> {
    s.check_ideal(t_elements)?;
    let in_t: HashSet<usize> = t_elements.iter().copied().collect();
    let mut t_word: HashMap<usize, Word> = HashMap::new();
    for (name, w) in &t.witness {
        t_word.insert(s.index_of(name)?, w.clone());
    }
    if let Some(&x) = t_elements.iter().find(|x| !t_word.contains_key(x)) {
        return Err(precondition(format!("ideal witness lacks {}", s.name(x))));
    }
    let t_value = |w: &Word| -> Result<usize> {
        let name = t
            .element_of(w)?
            .ok_or_else(|| precondition(format!("{} is not witnessed", t.system.render(w))))?;
        Ok(s.index_of(name)?)
    };
    let qz = quotient_zero(&u.system)?;
    let letter_value = |b: Letter| -> Result<usize> {
        let name = u
            .element_of(&Word::single(b))?
            .ok_or_else(|| precondition(format!("letter {} is not witnessed", u.system.alphabet().token(b))))?;
        Ok(s.index_of(name)?)
    };
    let ideal_word = |x: usize, what: &str| -> Result<Word> {
        if !in_t.contains(&x) {
            return Err(precondition(format!("{what} = {} lies outside the ideal", s.name(x))));
        }
        Ok(t_word[&x].clone())
    };
    let bs: Vec<Letter> = u
        .system
        .alphabet()
        .letters()
        .filter(|&b| !qz.zero_letters.contains(b))
        .collect();
    let mut b_value = HashMap::new();
    for &b in &bs {
        b_value.insert(b, letter_value(b)?);
    }
    let mut glue = IdealExtensionGlue::default();
    for &k in &qz.zero_rules {
        let rule = &u.system.rules()[k];
        for side in [&rule.lhs, &rule.rhs] {
            if avoids(side, &qz.zero_letters) && !glue.rho.contains_key(side) {
                let x = s.product(side.iter().map(|b| b_value[&b])).expect("non-empty side");
                let w = ideal_word(x, &u.system.render(side))?;
                glue.rho.insert(side.clone(), w);
            }
        }
    }
    for a in t.system.alphabet().letters() {
        let av = t_value(&Word::single(a))?;
        for &b in &bs {
            let bv = b_value[&b];
            let label = |l: &str, r: &str| format!("{l} {r}");
            let (ta, ub) = (t.system.alphabet().token(a), u.system.alphabet().token(b));
            glue.sigma.insert((a, b), ideal_word(s.mul(av, bv), &label(ta, ub))?);
            glue.pi.insert((b, a), ideal_word(s.mul(bv, av), &label(ub, ta))?);
        }
    }
    Ok(glue)
}

/// The presentation of an ideal extension: ideal rules, the non-zero
/// quotient rules, and `u -> ρ(u)`, `a b -> σ(a,b)`, `b a -> π(b,a)`.
/// The quotient system must have an absorbing zero letter.
pub fn ideal_extension(
    t: &ConstructionOutput,
    u: &ConstructionOutput,
    glue: &IdealExtensionGlue,
) -> Result<ConstructionOutput> {
    let qz = quotient_zero(&u.system)?;
    let (ta, ua) = (t.system.alphabet(), u.system.alphabet());
    let mut alphabet = ta.clone();
    let bs: Vec<Letter> = ua.letters().filter(|&b| !qz.zero_letters.contains(b)).collect();
    for &b in &bs {
        let token = ua.token(b);
        if ta.contains_token(token) {
            return Err(ConstructionError::LetterCollision(token.to_string()));
        }
        alphabet.push(token.to_string())?;
    }
    let lift = |w: &Word| ua.translate(w, &alphabet);
    let check_ideal_word = |w: &Word, what: &str| -> Result<()> {
        ta.check(w)?;
        if w.is_empty() || !t.system.is_irreducible(w) {
            return Err(precondition(format!("glue value for {what} is not an irreducible ideal word")));
        }
        Ok(())
    };
    let mut rules = t.system.rules().to_vec();
    let zero_rules: HashSet<usize> = qz.zero_rules.iter().copied().collect();
    for (k, r) in u.system.rules().iter().enumerate() {
        if !zero_rules.contains(&k) {
            rules.push(Rule::new(lift(&r.lhs)?, lift(&r.rhs)?));
        }
    }
    for &k in &qz.zero_rules {
        let rule = &u.system.rules()[k];
        for side in [&rule.lhs, &rule.rhs] {
            if avoids(side, &qz.zero_letters) {
                let what = ua.render(side);
                let rho = glue
                    .rho
                    .get(side)
                    .ok_or_else(|| ConstructionError::MissingGlue(format!("rho({what})")))?;
                check_ideal_word(rho, &what)?;
                rules.push(Rule::new(lift(side)?, rho.clone()));
            }
        }
    }
    for a in ta.letters() {
        for &b in &bs {
            let what = format!("{} {}", ta.token(a), ua.token(b));
            let sigma = glue
                .sigma
                .get(&(a, b))
                .ok_or_else(|| ConstructionError::MissingGlue(format!("sigma({what})")))?;
            check_ideal_word(sigma, &what)?;
            rules.push(Rule::new(Word(vec![a, lift(&Word::single(b))?.letters()[0]]), sigma.clone()));
        }
    }
    for &b in &bs {
        for a in ta.letters() {
            let what = format!("{} {}", ua.token(b), ta.token(a));
            let pi = glue
                .pi
                .get(&(b, a))
                .ok_or_else(|| ConstructionError::MissingGlue(format!("pi({what})")))?;
            check_ideal_word(pi, &what)?;
            rules.push(Rule::new(Word(vec![lift(&Word::single(b))?.letters()[0], a]), pi.clone()));
        }
    }
    let system = RewritingSystem::new_dedup(alphabet.clone(), rules)?;
    let mut witness = t.witness.clone();
    let zw = Word::single(qz.zero);
    for (name, w) in &u.witness {
        if u.system.normal_form(w, STEP_BUDGET)? != zw {
            witness.push((name.clone(), lift(w)?));
        }
    }
    Ok(ConstructionOutput {
        system,
        witness,
        certificate: Certificate::IdealExtension {
            small: ta.tokens().to_vec(),
        },
        provenance: Provenance::new("ideal-extension", &[&t.to_text(), &u.to_text()]),
    })
}

/// Table-driven ideal extension: multiplication-table systems for the ideal
/// and the Rees quotient (whose zero is named `0` unless taken), glued from
/// the table of `s`.
pub fn ideal_extension_from_table(s: &FiniteSemigroup, ideal: &[usize]) -> Result<ConstructionOutput> {
    let (t_sg, _) = s.subsemigroup(ideal)?;
    let (u_sg, _) = s.rees_quotient(ideal, &s.fresh_name("0"))?;
    let t = ConstructionOutput::from_table(&t_sg)?;
    let u = ConstructionOutput::from_table(&u_sg)?;
    let glue = derive_glue(s, ideal, &t, &u)?;
    let mut out = ideal_extension(&t, &u, &glue)?;
    out.provenance = Provenance::new("ideal-extension", &[&s.to_json(), &format!("{ideal:?}")]);
    Ok(out)
}

/// A (0-)Rees matrix semigroup over a group given by a complete system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReesDatum {
    pub group: RewritingSystem,
    pub identity: Word,
    pub i_size: usize,
    pub lambda_size: usize,
    /// `matrix[λ][i]`; `None` is the zero entry.
    pub matrix: Vec<Vec<Option<Word>>>,
    /// Letter names for the rows and columns (`b1..`, `c1..` by default);
    /// the first of each is never used.
    pub row_letters: Vec<String>,
    pub column_letters: Vec<String>,
    /// Optional names for group elements, keyed by any word for them.
    pub element_names: Vec<(String, Word)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroupSpec {
    Table(CayleyDocument),
    Path(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReesDocument {
    group: GroupSpec,
    identity_word: Option<String>,
    #[serde(rename = "I")]
    i_size: usize,
    #[serde(rename = "Lambda")]
    lambda_size: usize,
    matrix: Vec<Vec<Option<String>>>,
}

impl ReesDatum {
    pub fn new(
        group: RewritingSystem,
        identity: Word,
        i_size: usize,
        lambda_size: usize,
        matrix: Vec<Vec<Option<Word>>>,
    ) -> Self {
        ReesDatum {
            group,
            identity,
            i_size,
            lambda_size,
            matrix,
            row_letters: (1..=i_size).map(|i| format!("b{i}")).collect(),
            column_letters: (1..=lambda_size).map(|l| format!("c{l}")).collect(),
            element_names: Vec::new(),
        }
    }

    /// Group from a Cayley table (via its multiplication-table system) and a
    /// matrix of element names.
    pub fn from_table(group: &FiniteSemigroup, matrix: &[Vec<Option<&str>>]) -> Result<Self> {
        if !group.is_group() {
            return Err(ConstructionError::Datum("the table is not a group".into()));
        }
        let (sys, letters) = cayley_fcrs(group)?;
        let word = |name: &str| -> Result<Word> { Ok(Word::single(letters[group.index_of(name)?])) };
        let identity = Word::single(letters[group.identity().expect("group")]);
        let rows = matrix
            .iter()
            .map(|row| row.iter().map(|e| e.map(word).transpose()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let i_size = rows.first().map_or(0, Vec::len);
        let mut datum = ReesDatum::new(sys, identity, i_size, rows.len(), rows);
        datum.element_names = (0..group.len())
            .map(|g| (group.name(g).to_string(), Word::single(letters[g])))
            .collect();
        Ok(datum)
    }

    /// Rees datum document. A `group` given as a string is a path (relative
    /// to `base_dir`) to a Cayley table or a presentation.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let doc: ReesDocument =
            serde_json::from_str(text).map_err(|e| ConstructionError::Datum(e.to_string()))?;
        let (group, names) = match doc.group {
            GroupSpec::Table(t) => {
                let g = FiniteSemigroup::from_document(t)?;
                let (sys, letters) = cayley_fcrs(&g)?;
                let names = (0..g.len())
                    .map(|x| (g.name(x).to_string(), Word::single(letters[x])))
                    .collect();
                (sys, names)
            }
            GroupSpec::Path(p) => {
                let path = base_dir.join(p);
                let body = std::fs::read_to_string(&path)
                    .map_err(|e| ConstructionError::Datum(format!("{}: {e}", path.display())))?;
                if body.trim_start().starts_with('{') {
                    let g = FiniteSemigroup::from_json(&body)?;
                    let (sys, letters) = cayley_fcrs(&g)?;
                    let names = (0..g.len())
                        .map(|x| (g.name(x).to_string(), Word::single(letters[x])))
                        .collect();
                    (sys, names)
                } else {
                    let sys = RewritingSystem::parse(&body).map_err(|e| {
                        ConstructionError::Datum(format!("{}: {e}", path.display()))
                    })?;
                    (sys, Vec::new())
                }
            }
        };
        let identity = match doc.identity_word {
            Some(w) => group.parse_word(&w)?,
            None => unique_idempotent(&group)?,
        };
        let matrix = doc
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| e.as_deref().map(|w| group.parse_word(w)).transpose())
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut datum = ReesDatum::new(group, identity, doc.i_size, doc.lambda_size, matrix);
        datum.element_names = names;
        Ok(datum)
    }

    /// Canonical text, used for the provenance digest.
    pub fn to_text(&self) -> String {
        let mut out = self.group.to_text();
        let _ = writeln!(out, "identity: {}", self.group.render(&self.identity));
        let _ = writeln!(out, "size: {} {}", self.i_size, self.lambda_size);
        for row in &self.matrix {
            let cells: Vec<String> = row
                .iter()
                .map(|e| e.as_ref().map_or("null".to_string(), |w| self.group.render(w)))
                .collect();
            let _ = writeln!(out, "row: {}", cells.join(" | "));
        }
        out
    }
}

fn unique_idempotent(group: &RewritingSystem) -> Result<Word> {
    let elements = group
        .finite_irreducibles(GROUP_WORD_CAP)
        .ok_or_else(|| ConstructionError::Datum("group system has infinitely many normal forms".into()))?;
    let mut idempotents = Vec::new();
    for w in elements {
        if group.normal_form(&w.concat(&w), STEP_BUDGET)? == w {
            idempotents.push(w);
        }
    }
    match idempotents.len() {
        1 => Ok(idempotents.pop().expect("one")),
        n => Err(ConstructionError::Datum(format!("expected one idempotent, found {n}"))),
    }
}

/// Name of the Rees element with 1-based coordinates.
pub fn rees_element_name(i: usize, g: &str, lambda: usize) -> String {
    format!("({i},{g},{lambda})")
}

/// A datum brought to the shape the presentation needs: index 0 of both
/// sides meets at the identity.
struct NormalizedRees {
    elements: Vec<Word>,
    identity: usize,
    /// Normalized index → original index.
    rows: Vec<usize>,
    cols: Vec<usize>,
    /// `matrix[λ][i]` as element indices, normalized coordinates.
    matrix: Vec<Vec<Option<usize>>>,
    /// Group element multiplied on the right of `g` for column 0.
    rescale: usize,
    notes: Vec<String>,
}

fn normalize_datum(d: &ReesDatum) -> Result<NormalizedRees> {
    let bad = |m: String| ConstructionError::Datum(m);
    let g = &d.group;
    let elements = g
        .finite_irreducibles(GROUP_WORD_CAP)
        .ok_or_else(|| bad("group system has infinitely many normal forms".into()))?;
    let index: HashMap<Word, usize> = elements.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
    let nf = |w: &Word| -> Result<usize> {
        g.alphabet().check(w)?;
        let v = g.normal_form(w, STEP_BUDGET)?;
        Ok(index[&v])
    };
    let mul = |x: usize, y: usize| -> Result<usize> { nf(&elements[x].concat(&elements[y])) };
    if d.identity.is_empty() {
        return Err(bad("identity word is empty".into()));
    }
    let e = nf(&d.identity)?;
    if mul(e, e)? != e {
        return Err(bad(format!("identity word {} is not idempotent", g.render(&d.identity))));
    }
    for x in 0..elements.len() {
        if mul(e, x)? != x || mul(x, e)? != x {
            return Err(bad(format!("{} is not an identity", g.render(&d.identity))));
        }
        if !(0..elements.len()).any(|y| mul(x, y).ok() == Some(e)) {
            return Err(bad(format!("{} has no inverse", g.render(&elements[x]))));
        }
    }
    if d.i_size == 0 || d.lambda_size == 0 {
        return Err(bad("index sets must be non-empty".into()));
    }
    if d.matrix.len() != d.lambda_size || d.matrix.iter().any(|r| r.len() != d.i_size) {
        return Err(bad(format!("matrix must be {} rows by {} columns", d.lambda_size, d.i_size)));
    }
    if d.row_letters.len() != d.i_size || d.column_letters.len() != d.lambda_size {
        return Err(bad("letter name lists do not match the index sets".into()));
    }
    let mut p: Vec<Vec<Option<usize>>> = d
        .matrix
        .iter()
        .map(|row| row.iter().map(|x| x.as_ref().map(&nf).transpose()).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    for (l, row) in p.iter().enumerate() {
        if row.iter().all(Option::is_none) {
            return Err(bad(format!("matrix row {} is all zero", l + 1)));
        }
    }
    for i in 0..d.i_size {
        if p.iter().all(|row| row[i].is_none()) {
            return Err(bad(format!("matrix column {} is all zero", i + 1)));
        }
    }
    let mut notes = Vec::new();
    let mut rows: Vec<usize> = (0..d.i_size).collect();
    let mut cols: Vec<usize> = (0..d.lambda_size).collect();
    let (l0, i0) = (0..d.lambda_size)
        .flat_map(|l| (0..d.i_size).map(move |i| (l, i)))
        .find(|&(l, i)| p[l][i].is_some())
        .expect("regular matrix has a non-zero entry");
    if l0 != 0 {
        p.swap(0, l0);
        cols.swap(0, l0);
        notes.push(format!("swapped Lambda indices 1 and {}", l0 + 1));
    }
    if i0 != 0 {
        for row in p.iter_mut() {
            row.swap(0, i0);
        }
        rows.swap(0, i0);
        notes.push(format!("swapped I indices 1 and {}", i0 + 1));
    }
    let v = p[0][0].expect("non-zero after swap");
    let mut rescale = e;
    if v != e {
        let inv = (0..elements.len())
            .find(|&y| mul(y, v).ok() == Some(e))
            .expect("inverse exists");
        for i in 0..d.i_size {
            if let Some(x) = p[0][i] {
                p[0][i] = Some(mul(inv, x)?);
            }
        }
        rescale = v;
        notes.push(format!(
            "rescaled Lambda index {} by the inverse of {}",
            cols[0] + 1,
            g.render(&elements[v])
        ));
    }
    Ok(NormalizedRees {
        elements,
        identity: e,
        rows,
        cols,
        matrix: p,
        rescale,
        notes,
    })
}

/// The Cayley table of `M⁰[G; I, Λ; P]` straight from the product rule, with
/// elements named as in the [`rees_zero`] witness. The zero is left out
/// when `with_zero` is false, which needs every matrix entry non-zero.
pub fn rees_semigroup(datum: &ReesDatum, with_zero: bool) -> Result<FiniteSemigroup> {
    let n = normalize_datum(datum)?;
    let g = &datum.group;
    let index: HashMap<&Word, usize> = n.elements.iter().enumerate().map(|(k, w)| (w, k)).collect();
    let mul = |x: usize, y: usize| -> Result<usize> {
        Ok(index[&g.normal_form(&n.elements[x].concat(&n.elements[y]), STEP_BUDGET)?])
    };
    let entry = |l: usize, i: usize| -> Result<Option<usize>> {
        datum.matrix[l][i]
            .as_ref()
            .map(|w| Ok(index[&g.normal_form(w, STEP_BUDGET)?]))
            .transpose()
    };
    if !with_zero && datum.matrix.iter().flatten().any(Option::is_none) {
        return Err(precondition("the matrix has zero entries"));
    }
    let k = n.elements.len();
    let triples: Vec<(usize, usize, usize)> = (0..datum.i_size)
        .flat_map(|i| (0..k).flat_map(move |x| (0..datum.lambda_size).map(move |l| (i, x, l))))
        .collect();
    let pos: HashMap<(usize, usize, usize), usize> = triples.iter().enumerate().map(|(p, &t)| (t, p)).collect();
    let zero = triples.len();
    let size = if with_zero { zero + 1 } else { zero };
    let mut table = vec![vec![zero; size]; size];
    for (a, &(i, x, l)) in triples.iter().enumerate() {
        for (b, &(j, y, m)) in triples.iter().enumerate() {
            if let Some(p) = entry(l, j)? {
                table[a][b] = pos[&(i, mul(mul(x, p)?, y)?, m)];
            }
        }
    }
    let mut names = Vec::with_capacity(size);
    for &(i, x, l) in &triples {
        names.push(rees_element_name(i + 1, &group_element_name(datum, &n.elements[x])?, l + 1));
    }
    if with_zero {
        names.push("0".to_string());
    }
    Ok(FiniteSemigroup::new(names, table)?)
}

/// The presentation of a completely 0-simple semigroup `M⁰[G; I, Λ; P]`.
pub fn rees_zero(datum: &ReesDatum) -> Result<ConstructionOutput> {
    let n = normalize_datum(datum)?;
    let g = &datum.group;
    let ga = g.alphabet();
    if ga.contains_token("0") {
        return Err(ConstructionError::LetterCollision("0".into()));
    }
    let mut alphabet = ga.clone();
    let mut b = vec![None; datum.i_size];
    for (i, slot) in b.iter_mut().enumerate().skip(1) {
        let name = &datum.row_letters[n.rows[i]];
        *slot = Some(alphabet.push(name.clone()).map_err(|_| ConstructionError::LetterCollision(name.clone()))?);
    }
    let mut c = vec![None; datum.lambda_size];
    for (l, slot) in c.iter_mut().enumerate().skip(1) {
        let name = &datum.column_letters[n.cols[l]];
        *slot = Some(alphabet.push(name.clone()).map_err(|_| ConstructionError::LetterCollision(name.clone()))?);
    }
    let zero = alphabet.push("0".into())?;
    let zw = Word::single(zero);
    let e = n.elements[n.identity].clone();
    let p = |l: usize, i: usize| n.matrix[l][i].map(|x| n.elements[x].clone());
    // concatenation with a zero entry collapses to the letter 0
    let join = |parts: &[Option<Word>]| -> Word {
        if parts.iter().any(Option::is_none) {
            return zw.clone();
        }
        parts.iter().flatten().fold(Word::empty(), |acc, w| acc.concat(w))
    };
    let bw = |i: usize| Word::single(b[i].expect("i > 0"));
    let cw = |l: usize| Word::single(c[l].expect("l > 0"));
    let mut rules = g.rules().to_vec();
    let (is, ls) = (1..datum.i_size, 1..datum.lambda_size);
    for i in is.clone() {
        rules.push(Rule::new(bw(i).concat(&e), bw(i)));
    }
    for l in ls.clone() {
        rules.push(Rule::new(e.concat(&cw(l)), cw(l)));
    }
    for i in is.clone() {
        rules.push(Rule::new(e.concat(&bw(i)), join(&[p(0, i)])));
    }
    for l in ls.clone() {
        rules.push(Rule::new(cw(l).concat(&e), join(&[p(l, 0)])));
        for i in is.clone() {
            rules.push(Rule::new(cw(l).concat(&bw(i)), join(&[p(l, i)])));
        }
    }
    for a in ga.letters() {
        let aw = Word::single(a);
        for i in is.clone() {
            rules.push(Rule::new(aw.concat(&bw(i)), join(&[Some(aw.clone()), p(0, i)])));
        }
        for l in ls.clone() {
            rules.push(Rule::new(cw(l).concat(&aw), join(&[p(l, 0), Some(aw.clone())])));
        }
    }
    for l in ls.clone() {
        for m in ls.clone() {
            rules.push(Rule::new(cw(l).concat(&cw(m)), join(&[p(l, 0), Some(cw(m))])));
        }
    }
    for i in is.clone() {
        for j in is.clone() {
            rules.push(Rule::new(bw(i).concat(&bw(j)), join(&[Some(bw(i)), p(0, j)])));
        }
    }
    for x in alphabet.letters() {
        rules.push(Rule::new(Word(vec![x, zero]), zw.clone()));
        rules.push(Rule::new(Word(vec![zero, x]), zw.clone()));
    }
    let system = RewritingSystem::new_dedup(alphabet, rules)?;

    let mut witness = Vec::new();
    let inv_rows: HashMap<usize, usize> = n.rows.iter().enumerate().map(|(k, &o)| (o, k)).collect();
    let inv_cols: HashMap<usize, usize> = n.cols.iter().enumerate().map(|(k, &o)| (o, k)).collect();
    for i in 0..datum.i_size {
        for x in 0..n.elements.len() {
            for l in 0..datum.lambda_size {
                let (ni, nl) = (inv_rows[&i], inv_cols[&l]);
                let gx = if nl == 0 {
                    g.normal_form(&n.elements[x].concat(&n.elements[n.rescale]), STEP_BUDGET)?
                } else {
                    n.elements[x].clone()
                };
                let mut w = Word::empty();
                if ni > 0 {
                    w = w.concat(&bw(ni));
                }
                if gx != e || (ni == 0 && nl == 0) {
                    w = w.concat(&gx);
                }
                if nl > 0 {
                    w = w.concat(&cw(nl));
                }
                let name = rees_element_name(i + 1, &group_element_name(datum, &n.elements[x])?, l + 1);
                witness.push((name, system.normal_form(&w, STEP_BUDGET)?));
            }
        }
    }
    witness.push(("0".to_string(), zw));
    let mut provenance = Provenance::new("rees-zero", &[&datum.to_text()]);
    provenance.notes = n.notes;
    Ok(ConstructionOutput {
        system,
        witness,
        certificate: Certificate::Rees {
            small: ga.tokens().to_vec(),
        },
        provenance,
    })
}

fn group_element_name(datum: &ReesDatum, w: &Word) -> Result<String> {
    let g = &datum.group;
    for (name, v) in &datum.element_names {
        if g.normal_form(v, STEP_BUDGET)? == *w {
            return Ok(name.clone());
        }
    }
    Ok(g.render(w).replace(' ', "*"))
}

/// The completely simple variant: `rees_zero` without the zero letter and
/// its rules. Every matrix entry must be non-zero.
pub fn rees_simple(datum: &ReesDatum) -> Result<ConstructionOutput> {
    if datum.matrix.iter().flatten().any(Option::is_none) {
        return Err(precondition("the matrix has zero entries; use rees-zero instead"));
    }
    let full = rees_zero(datum)?;
    let zero = full.system.alphabet().letter("0")?;
    let tokens = full.system.alphabet().tokens();
    let alphabet = Alphabet::new(tokens[..tokens.len() - 1].iter().cloned())?;
    debug_assert_eq!(zero.index(), tokens.len() - 1);
    let rules = full
        .system
        .rules()
        .iter()
        .filter(|r| !r.lhs.iter().chain(r.rhs.iter()).any(|l| l == zero))
        .cloned()
        .collect();
    let system = RewritingSystem::new(alphabet, rules)?;
    let witness = full.witness.into_iter().filter(|(_, w)| !w.iter().any(|l| l == zero)).collect();
    let mut provenance = Provenance::new("rees-simple", &[&datum.to_text()]);
    provenance.notes = full.provenance.notes;
    Ok(ConstructionOutput {
        system,
        witness,
        certificate: full.certificate,
        provenance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Longest words in the termination ball.
    pub max_len: usize,
    /// Most words the ball may contain; the length shrinks to fit.
    pub word_limit: usize,
    /// Step budget per critical-pair normalization.
    pub step_budget: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_len: 6,
            word_limit: 1_000_000,
            step_budget: 100_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompletenessCheck {
    pub verdict: Verdict,
    pub confluence: ConfluenceReport,
    pub termination: TerminationEvidence,
}

/// Critical pairs plus termination evidence: exact when every rule
/// shortens words, otherwise the certificate's order on a word ball.
pub fn check_completeness(
    sys: &RewritingSystem,
    certificate: &Certificate,
    options: &VerifyOptions,
) -> Result<CompletenessCheck> {
    let confluence = check_local_confluence(sys, options.step_budget);
    let termination = match TerminationEvidence::length_reducing(sys) {
        TerminationEvidence::LengthReducing(true) => TerminationEvidence::LengthReducing(true),
        _ => {
            let comparator = certificate.comparator(sys)?;
            let len = fitting_ball_len(sys.alphabet().len(), options.max_len, options.word_limit);
            TerminationEvidence::Ball(verify_decrease_on_ball(sys, &comparator, len, options.word_limit))
        }
    };
    let verdict = completeness_verdict(&termination, &confluence);
    Ok(CompletenessCheck {
        verdict,
        confluence,
        termination,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableCheck {
    pub checked: usize,
    /// `(x, y, expected normal form, actual normal form)`.
    pub failures: Vec<(String, String, String, String)>,
    pub missing: Vec<String>,
    pub reducible: Vec<String>,
    pub shared: Vec<(String, String)>,
}

impl TableCheck {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.missing.is_empty() && self.reducible.is_empty() && self.shared.is_empty()
    }
}

/// Checks `normalize(w(x) w(y)) = w(xy)` for every pair of elements of `s`.
/// Products are skipped when an element lacks a witness.
pub fn verify_against_table(out: &ConstructionOutput, s: &FiniteSemigroup) -> Result<TableCheck> {
    let mut check = TableCheck::default();
    let words: Vec<Option<&Word>> = (0..s.len()).map(|x| out.witness_word(s.name(x))).collect();
    check.missing = (0..s.len()).filter(|&x| words[x].is_none()).map(|x| s.name(x).to_string()).collect();
    (check.reducible, check.shared) = out.witness_defects();
    if !check.missing.is_empty() {
        return Ok(check);
    }
    let words: Vec<&Word> = words.into_iter().map(|w| w.expect("present")).collect();
    for x in 0..s.len() {
        for y in 0..s.len() {
            check.checked += 1;
            let got = out.system.normal_form(&words[x].concat(words[y]), STEP_BUDGET)?;
            let expected = words[s.mul(x, y)];
            if got != *expected {
                check.failures.push((
                    s.name(x).to_string(),
                    s.name(y).to_string(),
                    out.system.render(expected),
                    out.system.render(&got),
                ));
            }
        }
    }
    Ok(check)
}

/// One system built and checked by [`regular_pipeline`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineStage {
    pub label: String,
    pub letters: usize,
    pub rules: usize,
    pub verdict: Verdict,
}

/// A user-supplied complete system for the maximal subgroup at an
/// idempotent, with a word for every group element.
#[derive(Debug, Clone)]
pub struct SubgroupSystem {
    pub system: RewritingSystem,
    pub words: Vec<(String, Word)>,
}

impl SubgroupSystem {
    /// A presentation followed by a `witness:` section of `name = word` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let perr = |line: usize, message: String| ConstructionError::Parse { line, message };
        let mut lines = PresentationLines::new(text);
        let system = parse_presentation(&mut lines).map_err(|e| perr(e.line, e.message))?;
        match lines.next() {
            Some((_, "witness:")) => {}
            Some((no, l)) => return Err(perr(no, format!("expected `witness:`, found {l:?}"))),
            None => return Err(perr(0, "missing `witness:` section".into())),
        }
        let mut words = Vec::new();
        for (no, line) in lines {
            let (name, word) = line
                .split_once('=')
                .ok_or_else(|| perr(no, format!("witness line {line:?} lacks `=`")))?;
            let word = system.parse_word(word).map_err(|e| perr(no, e.to_string()))?;
            words.push((name.trim().to_string(), word));
        }
        Ok(SubgroupSystem { system, words })
    }
}

#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    /// Keyed by the idempotent's element name.
    pub overrides: HashMap<String, SubgroupSystem>,
    pub verify: VerifyOptions,
}

/// Builds a complete system for a finite regular semigroup by peeling off
/// maximal J-classes: each class becomes a Rees presentation of its
/// principal factor, glued onto the system for the rest as an ideal
/// extension. Every intermediate system is checked; a failed check is
/// reported as [`ConstructionError::SelfCheck`].
pub fn regular_pipeline(
    s: &FiniteSemigroup,
    options: &PipelineOptions,
) -> Result<(ConstructionOutput, Vec<PipelineStage>)> {
    if !s.is_regular() {
        return Err(precondition("the semigroup is not regular"));
    }
    // work on names that cannot clash with letters introduced on the way
    let internal: Vec<String> = (0..s.len()).map(|k| format!("s{k}")).collect();
    let table = (0..s.len()).map(|x| (0..s.len()).map(|y| s.mul(x, y)).collect()).collect();
    let work = FiniteSemigroup::new(internal.clone(), table)?;
    let mut overrides = HashMap::new();
    for (name, sub) in &options.overrides {
        let e = s.index_of(name)?;
        let words = sub
            .words
            .iter()
            .map(|(n, w)| Ok((internal[s.index_of(n)?].clone(), w.clone())))
            .collect::<Result<Vec<_>>>()?;
        overrides.insert(
            internal[e].clone(),
            SubgroupSystem {
                system: sub.system.clone(),
                words,
            },
        );
    }
    let mut stages = Vec::new();
    let out = pipeline_step(&work, &overrides, &options.verify, &mut stages)?;
    let real: HashMap<&str, &str> = internal.iter().map(String::as_str).zip(s.names().iter().map(String::as_str)).collect();
    let rename = |t: &str| real.get(t).map_or_else(|| t.to_string(), |r| r.to_string());
    let system = out.system.rename_letters(rename)?;
    let certificate = match &out.certificate {
        Certificate::IdealExtension { small } => Certificate::IdealExtension {
            small: small.iter().map(|t| rename(t)).collect(),
        },
        Certificate::Rees { small } => Certificate::Rees {
            small: small.iter().map(|t| rename(t)).collect(),
        },
        other => other.clone(),
    };
    let mut witness: Vec<(usize, String, Word)> = out
        .witness
        .into_iter()
        .map(|(n, w)| {
            let k = work.index_of(&n)?;
            Ok((k, s.name(k).to_string(), w))
        })
        .collect::<Result<_>>()?;
    witness.sort_by_key(|(k, _, _)| *k);
    for st in &mut stages {
        st.label = st
            .label
            .split(' ')
            .map(|part| {
                let inner = part.trim_matches(|c| c == '{' || c == '}');
                part.replace(inner, &rename(inner))
            })
            .collect::<Vec<_>>()
            .join(" ");
    }
    let mut provenance = Provenance::new("regular", &[&s.to_json()]);
    provenance.notes = stages
        .iter()
        .map(|st| format!("{}: {} letters, {} rules, {}", st.label, st.letters, st.rules, st.verdict))
        .collect();
    let final_out = ConstructionOutput {
        system,
        witness: witness.into_iter().map(|(_, n, w)| (n, w)).collect(),
        certificate,
        provenance,
    };
    Ok((final_out, stages))
}

fn checked(
    out: ConstructionOutput,
    label: String,
    verify: &VerifyOptions,
    stages: &mut Vec<PipelineStage>,
) -> Result<ConstructionOutput> {
    let check = check_completeness(&out.system, &out.certificate, verify)?;
    stages.push(PipelineStage {
        label: label.clone(),
        letters: out.system.alphabet().len(),
        rules: out.system.rules().len(),
        verdict: check.verdict,
    });
    if check.verdict != Verdict::CompleteCertifiedAtScale {
        let mut report = check.confluence.render(&out.system);
        if let TerminationEvidence::Ball(ball) = &check.termination {
            report.push_str(&ball.render(&out.system));
        }
        return Err(ConstructionError::SelfCheck(format!("{label}: {}\n{report}", check.verdict)));
    }
    Ok(out)
}

/// Datum for a coordinatized principal factor, with letters named after the
/// elements they represent.
fn datum_for(
    f: &FiniteSemigroup,
    coords: &ReesCoordinatization,
    overrides: &HashMap<String, SubgroupSystem>,
) -> Result<ReesDatum> {
    let e_name = f.name(coords.group_embedding[coords.identity]);
    let (group, word_of): (RewritingSystem, Vec<Word>) = match overrides.get(e_name) {
        Some(sub) => {
            let mut words = Vec::with_capacity(coords.group.len());
            for g in 0..coords.group.len() {
                let name = coords.group.name(g);
                let w = sub
                    .words
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, w)| w.clone())
                    .ok_or_else(|| precondition(format!("subgroup system lacks a word for {name}")))?;
                words.push(sub.system.normal_form(&w, STEP_BUDGET)?);
            }
            (sub.system.clone(), words)
        }
        None => {
            let (sys, letters) = cayley_fcrs(&coords.group)?;
            (sys, letters.into_iter().map(Word::single).collect())
        }
    };
    let matrix = coords
        .matrix
        .iter()
        .map(|row| row.iter().map(|x| x.map(|g| word_of[g].clone())).collect())
        .collect();
    let mut datum = ReesDatum::new(
        group,
        word_of[coords.identity].clone(),
        coords.i_size,
        coords.lambda_size,
        matrix,
    );
    let element = |t| f.name(coords.element_of(t).expect("coordinates are onto")).to_string();
    datum.row_letters = (0..coords.i_size).map(|i| element((i, coords.identity, 0))).collect();
    datum.column_letters = (0..coords.lambda_size).map(|l| element((0, coords.identity, l))).collect();
    datum.element_names = (0..coords.group.len())
        .map(|g| (coords.group.name(g).to_string(), word_of[g].clone()))
        .collect();
    Ok(datum)
}

/// Renames `(i,g,λ)` witness entries to the element names of `f`.
fn rename_rees_witness(out: &mut ConstructionOutput, f: &FiniteSemigroup, coords: &ReesCoordinatization) {
    let mut names: HashMap<String, String> = HashMap::new();
    for x in 0..f.len() {
        match coords.triple_of[x] {
            Some((i, g, l)) => {
                names.insert(rees_element_name(i + 1, coords.group.name(g), l + 1), f.name(x).to_string());
            }
            None => {
                names.insert("0".into(), f.name(x).to_string());
            }
        }
    }
    for (n, _) in out.witness.iter_mut() {
        if let Some(real) = names.get(n) {
            *n = real.clone();
        }
    }
}

fn pipeline_step(
    s: &FiniteSemigroup,
    overrides: &HashMap<String, SubgroupSystem>,
    verify: &VerifyOptions,
    stages: &mut Vec<PipelineStage>,
) -> Result<ConstructionOutput> {
    let green = s.green_classes();
    let classes = green.j_classes();
    if classes.len() == 1 {
        let coords = coordinatize(s)?;
        let datum = datum_for(s, &coords, overrides)?;
        let mut out = rees_simple(&datum)?;
        rename_rees_witness(&mut out, s, &coords);
        let label = format!("completely simple {{{}}}", s.names().join(" "));
        return checked(out, label, verify, stages);
    }
    let top = green.maximal_j_classes()[0];
    let t_elements: Vec<usize> = (0..s.len()).filter(|&x| green.j[x] != top).collect();
    let (t_sg, _) = s.subsemigroup(&t_elements)?;
    let t_out = pipeline_step(&t_sg, overrides, verify, stages)?;
    let (u_sg, _) = s.rees_quotient(&t_elements, "0")?;
    let coords = coordinatize(&u_sg)?;
    let datum = datum_for(&u_sg, &coords, overrides)?;
    let mut u_out = rees_zero(&datum)?;
    rename_rees_witness(&mut u_out, &u_sg, &coords);
    let j_names: Vec<&str> = classes[top].iter().map(|&x| s.name(x)).collect();
    let u_out = checked(u_out, format!("principal factor {{{}}}", j_names.join(" ")), verify, stages)?;
    let glue = derive_glue(s, &t_elements, &t_out, &u_out)?;
    let out = ideal_extension(&t_out, &u_out, &glue)?;
    checked(out, format!("extension by {{{}}}", j_names.join(" ")), verify, stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::system;
    use crate::semigroup::catalog::*;

    fn rule_texts(sys: &RewritingSystem) -> Vec<String> {
        (0..sys.rules().len()).map(|k| sys.render_rule(k)).collect()
    }

    #[test]
    fn adjoin_zero_null_semigroup() {
        let sys = system(&["a"], &["a a a -> a a"]).unwrap();
        let z = sys.parse_word("a a").unwrap();
        let out = adjoin_zero(&sys, &z, &[]).unwrap();
        assert_eq!(
            rule_texts(&out.system),
            vec!["a a a -> a a", "a a -> 0", "0 a -> 0", "a 0 -> 0", "0 0 -> 0"]
        );
        assert_eq!(out.system.rules().len(), 1 + 1 + 2 * 2 - 1);
        let irr: Vec<String> = out.system.enumerate_irreducibles(3).iter().map(|w| out.system.render(w)).collect();
        assert_eq!(irr, vec!["a", "0"]);
    }

    #[test]
    fn adjoin_zero_preconditions() {
        let sys = system(&["a"], &["a a a -> a a"]).unwrap();
        let aaa = sys.parse_word("a a a").unwrap();
        assert!(matches!(adjoin_zero(&sys, &aaa, &[]), Err(ConstructionError::Precondition(_))));
        let a = sys.parse_word("a").unwrap();
        assert!(matches!(adjoin_zero(&sys, &a, &[]), Err(ConstructionError::Precondition(_))));
        let with_zero = system(&["a", "0"], &["a a -> 0", "0 a -> 0", "a 0 -> 0", "0 0 -> 0"]).unwrap();
        let zw = with_zero.parse_word("0").unwrap();
        assert!(adjoin_zero(&with_zero, &zw, &[]).is_err());
    }

    #[test]
    fn adjoin_zero_remaps_witness() {
        let sys = system(&["a"], &["a a a -> a a"]).unwrap();
        let z = sys.parse_word("a a").unwrap();
        let witness = vec![("x".to_string(), sys.parse_word("a").unwrap()), ("y".to_string(), sys.parse_word("a a a").unwrap())];
        let out = adjoin_zero(&sys, &z, &witness).unwrap();
        let rendered: Vec<String> = out.witness.iter().map(|(n, w)| format!("{n}={}", out.system.render(w))).collect();
        assert_eq!(rendered, vec!["x=a", "y=0"]);
    }

    fn zae() -> FiniteSemigroup {
        // a a = 0, e is an identity on {a, e}
        FiniteSemigroup::new(
            vec!["0".into(), "a".into(), "e".into()],
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn glue_from_table() {
        let s = zae();
        let ideal = [0, 1];
        let (t_sg, _) = s.subsemigroup(&ideal).unwrap();
        let (u_sg, _) = s.rees_quotient(&ideal, &s.fresh_name("0")).unwrap();
        let t = ConstructionOutput::from_table(&t_sg).unwrap();
        let u = ConstructionOutput::from_table(&u_sg).unwrap();
        let glue = derive_glue(&s, &ideal, &t, &u).unwrap();
        let e = u.system.parse_word("e").unwrap().letters()[0];
        let a = t.system.parse_word("a").unwrap().letters()[0];
        assert_eq!(t.system.render(&glue.sigma[&(a, e)]), "a");
        assert_eq!(t.system.render(&glue.pi[&(e, a)]), "a");
        // U = {e, 0'}: the only zero-valued rules mention the zero letter
        assert!(glue.rho.is_empty());
        let bad = derive_glue(&s, &[1], &t, &u).unwrap_err();
        assert!(matches!(bad, ConstructionError::Semigroup(SemigroupError::NotIdeal(..))));
    }

    #[test]
    fn ideal_extension_shape_and_table() {
        let s = zae();
        let out = ideal_extension_from_table(&s, &[0, 1]).unwrap();
        let rules = rule_texts(&out.system);
        for a in ["0", "a"] {
            assert!(rules.iter().any(|r| r.starts_with(&format!("{a} e ->"))), "{rules:?}");
            assert!(rules.iter().any(|r| r.starts_with(&format!("e {a} ->"))), "{rules:?}");
        }
        let check = check_completeness(&out.system, &out.certificate, &VerifyOptions::default()).unwrap();
        assert_eq!(check.verdict, Verdict::CompleteCertifiedAtScale);
        assert!(verify_against_table(&out, &s).unwrap().holds());
    }

    #[test]
    fn ideal_extension_whole_semigroup() {
        let s = zae();
        let out = ideal_extension_from_table(&s, &[0, 1, 2]).unwrap();
        assert_eq!(out.system.alphabet().len(), 3);
        assert!(verify_against_table(&out, &s).unwrap().holds());
    }

    #[test]
    fn ideal_extension_needs_zero_letter() {
        let t = ConstructionOutput::from_table(&cyclic_group(2)).unwrap();
        let u = ConstructionOutput::from_table(&chain(1)).unwrap();
        // the one-element chain absorbs itself, so it counts as a zero letter
        assert!(ideal_extension(&t, &u, &IdealExtensionGlue::default()).is_ok());
        let u = ConstructionOutput::from_table(&cyclic_group(3)).unwrap();
        assert!(matches!(
            ideal_extension(&t, &u, &IdealExtensionGlue::default()),
            Err(ConstructionError::Precondition(_))
        ));
    }

    fn z2_datum(matrix: &[Vec<Option<&str>>]) -> ReesDatum {
        ReesDatum::from_table(&cyclic_group(2), matrix).unwrap()
    }

    #[test]
    fn rees_zero_z2_counts() {
        let d = z2_datum(&[vec![Some("z0"), Some("z0")], vec![Some("z0"), None]]);
        let out = rees_zero(&d).unwrap();
        assert_eq!(out.witness.len(), 9);
        let irr = out.system.enumerate_irreducibles(4);
        assert_eq!(irr.len(), 9);
        let check = check_completeness(&out.system, &out.certificate, &VerifyOptions::default()).unwrap();
        assert_eq!(check.verdict, Verdict::CompleteCertifiedAtScale);
        let rules = rule_texts(&out.system);
        assert!(rules.contains(&"c2 b2 -> 0".to_string()), "{rules:?}");
    }

    #[test]
    fn rees_zero_rule_for_zero_column_entry() {
        // p_{λ1} = 0 for λ = 2: c2 e -> 0
        let d = z2_datum(&[vec![Some("z0"), Some("z1")], vec![None, Some("z0")]]);
        let out = rees_zero(&d).unwrap();
        assert!(rule_texts(&out.system).contains(&"c2 z0 -> 0".to_string()));
    }

    #[test]
    fn rees_zero_brandt() {
        let trivial = FiniteSemigroup::new(vec!["t".into()], vec![vec![0]]).unwrap();
        let d = ReesDatum::from_table(&trivial, &[vec![Some("t"), None], vec![None, Some("t")]]).unwrap();
        let out = rees_zero(&d).unwrap();
        assert_eq!(out.witness.len(), 5);
        let b2 = brandt_b2();
        let names = [("zero", "0"), ("e11", "(1,t,1)"), ("e12", "(1,t,2)"), ("e21", "(2,t,1)"), ("e22", "(2,t,2)")];
        let mut renamed = out.clone();
        for (n, _) in renamed.witness.iter_mut() {
            *n = names.iter().find(|(_, r)| r == n).unwrap().0.to_string();
        }
        let check = verify_against_table(&renamed, &b2).unwrap();
        assert!(check.holds(), "{check:?}");
        assert_eq!(check.checked, 25);
    }

    #[test]
    fn rees_datum_normalization() {
        // p11 = 0 forces a swap; the first non-zero entry is not the identity
        let d = z2_datum(&[vec![None, Some("z1")], vec![Some("z1"), Some("z0")]]);
        let out = rees_zero(&d).unwrap();
        assert_eq!(out.provenance.notes.len(), 2, "{:?}", out.provenance.notes);
        let check = check_completeness(&out.system, &out.certificate, &VerifyOptions::default()).unwrap();
        assert_eq!(check.verdict, Verdict::CompleteCertifiedAtScale);
        assert_rees_witness_sound(&d, &out);
    }

    fn assert_rees_witness_sound(d: &ReesDatum, out: &ConstructionOutput) {
        let g = cyclic_group(2);
        let entry = |l: usize, i: usize| d.matrix[l][i].as_ref().map(|w| g.index_of(d.group.render(w).as_str()).unwrap());
        let triples: Vec<(usize, usize, usize)> = (0..d.i_size)
            .flat_map(|i| (0..2).flat_map(move |x| (0..d.lambda_size).map(move |l| (i, x, l))))
            .collect();
        let word = |t: Option<(usize, usize, usize)>| match t {
            None => out.witness_word("0").unwrap().clone(),
            Some((i, x, l)) => out.witness_word(&rees_element_name(i + 1, g.name(x), l + 1)).unwrap().clone(),
        };
        for &a in &triples {
            for &b in &triples {
                let expected = entry(a.2, b.0).map(|p| (a.0, g.mul(g.mul(a.1, p), b.1), b.2));
                let got = out.system.normal_form(&word(Some(a)).concat(&word(Some(b))), STEP_BUDGET).unwrap();
                assert_eq!(got, word(expected), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn rees_table_matches_witness() {
        let d = z2_datum(&[vec![Some("z1"), Some("z0")], vec![Some("z0"), None]]);
        let out = rees_zero(&d).unwrap();
        let table = rees_semigroup(&d, true).unwrap();
        assert_eq!(table.len(), 9);
        assert!(verify_against_table(&out, &table).unwrap().holds());
        assert!(rees_semigroup(&d, false).is_err());
    }

    #[test]
    fn subgroup_system_text() {
        let sub = SubgroupSystem::parse("letters: x\nrule: x x -> x\nwitness:\ne = x\n").unwrap();
        assert_eq!(sub.words.len(), 1);
        assert!(SubgroupSystem::parse("letters: x\n").is_err());
    }

    #[test]
    fn rees_zero_rejects_bad_data() {
        let d = z2_datum(&[vec![None, None], vec![Some("z0"), Some("z0")]]);
        assert!(matches!(rees_zero(&d), Err(ConstructionError::Datum(_))));
        let mut d = z2_datum(&[vec![Some("z0")]]);
        d.identity = d.group.parse_word("z1").unwrap();
        assert!(matches!(rees_zero(&d), Err(ConstructionError::Datum(_))));
    }

    #[test]
    fn rees_simple_cases() {
        let trivial = FiniteSemigroup::new(vec!["t".into()], vec![vec![0]]).unwrap();
        let d = ReesDatum::from_table(&trivial, &[vec![Some("t"), Some("t")], vec![Some("t"), Some("t")]]).unwrap();
        let out = rees_simple(&d).unwrap();
        assert_eq!(out.witness.len(), 4);
        assert!(!out.system.alphabet().contains_token("0"));
        let z3 = z2_datum(&[vec![Some("z0")]]);
        let out = rees_simple(&z3).unwrap();
        assert_eq!(out.system.alphabet().tokens(), ["z0", "z1"]);
        let with_zero = z2_datum(&[vec![Some("z0"), None], vec![Some("z0"), Some("z0")]]);
        assert!(matches!(rees_simple(&with_zero), Err(ConstructionError::Precondition(_))));
    }

    #[test]
    fn output_round_trip() {
        let d = z2_datum(&[vec![Some("z0"), Some("z1")], vec![Some("z1"), None]]);
        let out = rees_zero(&d).unwrap();
        let text = out.to_text();
        let back = ConstructionOutput::parse(&text).unwrap();
        assert_eq!(back, out);
        assert!(ConstructionOutput::parse("letters: a\nrule: a a -> a\n").is_err());
    }

    #[test]
    fn rees_json_document() {
        let text = r#"{"group": {"elements": ["e", "a"], "table": [[0, 1], [1, 0]]},
                       "identity_word": "e", "I": 2, "Lambda": 2,
                       "matrix": [["e", "e"], ["e", null]]}"#;
        let d = ReesDatum::from_json(text, Path::new(".")).unwrap();
        assert_eq!((d.i_size, d.lambda_size), (2, 2));
        assert!(d.matrix[1][1].is_none());
        assert_eq!(rees_zero(&d).unwrap().witness.len(), 9);
    }

    #[test]
    fn pipeline_small_cases() {
        for s in [cyclic_group(3), brandt_b2(), full_transformations(2), rectangular_band(2, 2), chain(3)] {
            let (out, stages) = regular_pipeline(&s, &PipelineOptions::default()).unwrap();
            assert!(stages.iter().all(|st| st.verdict == Verdict::CompleteCertifiedAtScale));
            let check = verify_against_table(&out, &s).unwrap();
            assert!(check.holds(), "{check:?}");
            let back = ConstructionOutput::parse(&out.to_text()).unwrap();
            assert_eq!(back, out);
        }
    }

    #[test]
    fn pipeline_rejects_non_regular() {
        assert!(matches!(
            regular_pipeline(&null_semigroup(2), &PipelineOptions::default()),
            Err(ConstructionError::Precondition(_))
        ));
    }

    #[test]
    fn pipeline_with_subgroup_override() {
        // Z2 presented on one generator
        let sys = system(&["x", "y"], &["x x -> x", "y y -> x", "x y -> y", "y x -> y"]).unwrap();
        let z2 = cyclic_group(2);
        let words = vec![("z0".to_string(), sys.parse_word("x").unwrap()), ("z1".to_string(), sys.parse_word("y").unwrap())];
        let mut options = PipelineOptions::default();
        options.overrides.insert("z0".into(), SubgroupSystem { system: sys, words });
        let (out, _) = regular_pipeline(&z2, &options).unwrap();
        assert_eq!(out.system.alphabet().tokens(), ["x", "y"]);
        assert!(verify_against_table(&out, &z2).unwrap().holds());
    }
}
