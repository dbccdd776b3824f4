//! Z2-graded associative algebras presented by quadratic rewrite rules.
//!
//! A presentation holds a generator table (names + parities) and rules whose
//! left sides are two-letter words. Invariants enforced at construction: rule
//! left sides are pairwise distinct; every rule strictly decreases the
//! termination measure term by term; every rule preserves parity term by term.
//!
//! The termination measure of a term is bottom when its coefficient is
//! divisible by h, and otherwise (word length, inversion count, rank
//! sequence), compared lexicographically. Reduction uses the leftmost redex
//! and a step budget guards the loop; exceeding it is an error, never a hang.
//!
//! Since all left sides have length two, the only critical ambiguities are
//! overlaps on three-letter words; `check_confluence` reduces each both ways.
//! When all overlaps resolve and rewriting terminates, normal forms are
//! canonical and equality in the presented algebra is normal-form equality.
//! No completion is ever performed: a failed overlap is reported, not patched.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::Poly;

/// Which named presentation an element belongs to. Binary operations on
/// elements of different algebras are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgebraId {
    Superspace,
    Calculus,
    Group,
    Combined,
}

impl AlgebraId {
    pub fn name(self) -> &'static str {
        match self {
            AlgebraId::Superspace => "superspace",
            AlgebraId::Calculus => "calculus",
            AlgebraId::Group => "group",
            AlgebraId::Combined => "combined",
        }
    }

    pub fn from_name(name: &str) -> Option<AlgebraId> {
        match name {
            "superspace" => Some(AlgebraId::Superspace),
            "calculus" => Some(AlgebraId::Calculus),
            "group" => Some(AlgebraId::Group),
            "combined" => Some(AlgebraId::Combined),
            _ => None,
        }
    }
}

pub const ALGEBRA_IDS: [AlgebraId; 4] = [
    AlgebraId::Superspace,
    AlgebraId::Calculus,
    AlgebraId::Group,
    AlgebraId::Combined,
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    /// A reduction exceeded the step budget (set NCSUPER_STEP_BUDGET to raise).
    StepBudgetExceeded { budget: u64 },
    MixedAlgebras { left: AlgebraId, right: AlgebraId },
    InvalidRule { rule: String, reason: String },
    DuplicateRuleLhs { rule: String },
    UnknownGenerator { name: String },
    UnknownRule { rule: String },
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::StepBudgetExceeded { budget } => {
                write!(f, "reduction exceeded the step budget of {budget}")
            }
            AlgebraError::MixedAlgebras { left, right } => write!(
                f,
                "elements of different algebras: {} vs {}",
                left.name(),
                right.name()
            ),
            AlgebraError::InvalidRule { rule, reason } => {
                write!(f, "invalid rewrite rule {rule}: {reason}")
            }
            AlgebraError::DuplicateRuleLhs { rule } => {
                write!(f, "duplicate rule left side: {rule}")
            }
            AlgebraError::UnknownGenerator { name } => write!(f, "unknown generator: {name}"),
            AlgebraError::UnknownRule { rule } => write!(f, "unknown rule id: {rule}"),
        }
    }
}

impl std::error::Error for AlgebraError {}

/// Generator names and parities, indexed by rank (the normal-order position).
#[derive(Debug, Clone)]
pub struct GeneratorTable {
    names: Vec<&'static str>,
    parities: Vec<u8>,
}

impl GeneratorTable {
    pub fn new(entries: &[(&'static str, u8)]) -> GeneratorTable {
        GeneratorTable {
            names: entries.iter().map(|(n, _)| *n).collect(),
            parities: entries.iter().map(|(_, p)| p % 2).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, g: u8) -> &'static str {
        self.names[g as usize]
    }

    pub fn parity(&self, g: u8) -> u8 {
        self.parities[g as usize]
    }

    pub fn rank_of(&self, name: &str) -> Option<u8> {
        self.names.iter().position(|n| *n == name).map(|i| i as u8)
    }

    pub fn word_parity(&self, word: &[u8]) -> u8 {
        word.iter().map(|&g| self.parity(g) as u32).sum::<u32>() as u8 % 2
    }
}

/// Product of generators, stored by rank.
pub type Word = Vec<u8>;

fn inversions(word: &[u8]) -> u32 {
    let mut count = 0;
    for i in 0..word.len() {
        for j in (i + 1)..word.len() {
            if word[i] > word[j] {
                count += 1;
            }
        }
    }
    count
}

/// Strict comparison in the termination order for h-free terms.
fn word_measure_lt(a: &[u8], b: &[u8]) -> bool {
    (a.len(), inversions(a), a) < (b.len(), inversions(b), b)
}

/// One rewrite rule: a two-letter left side and its replacement.
#[derive(Debug, Clone)]
pub struct RewriteRule {
    pub id: String,
    pub lhs: [u8; 2],
    pub rhs: Vec<(Word, Poly)>,
}

impl RewriteRule {
    pub fn new(id: &str, lhs: [u8; 2], rhs: Vec<(Word, Poly)>) -> RewriteRule {
        RewriteRule {
            id: id.to_string(),
            lhs,
            rhs: rhs.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Flips the rule wrong: negates the replacement, or makes a zero
    /// replacement the unit. Keeps the rule well formed so the damage is
    /// caught by verification, not by construction.
    pub fn corrupted(&self) -> RewriteRule {
        let rhs = if self.rhs.is_empty() {
            vec![(Vec::new(), Poly::one())]
        } else {
            self.rhs
                .iter()
                .map(|(w, c)| (w.clone(), c.neg()))
                .collect()
        };
        RewriteRule {
            id: self.id.clone(),
            lhs: self.lhs,
            rhs,
        }
    }
}

/// Element of a presented algebra: a polynomial-weighted sum of words.
/// Stored words are always in normal form once produced by a presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub algebra: AlgebraId,
    pub terms: BTreeMap<Word, Poly>,
}

impl Element {
    pub fn zero(algebra: AlgebraId) -> Element {
        Element {
            algebra,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(algebra: AlgebraId) -> Element {
        Element::with_term(algebra, Vec::new(), Poly::one())
    }

    pub fn scalar(algebra: AlgebraId, c: Poly) -> Element {
        Element::with_term(algebra, Vec::new(), c)
    }

    pub fn generator(algebra: AlgebraId, g: u8) -> Element {
        Element::with_term(algebra, vec![g], Poly::one())
    }

    pub fn with_term(algebra: AlgebraId, word: Word, coeff: Poly) -> Element {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(word, coeff);
        }
        Element { algebra, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn merge_term(terms: &mut BTreeMap<Word, Poly>, word: Word, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match terms.entry(word) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&coeff);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element, AlgebraError> {
        if self.algebra != other.algebra {
            return Err(AlgebraError::MixedAlgebras {
                left: self.algebra,
                right: other.algebra,
            });
        }
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            Self::merge_term(&mut terms, w.clone(), c.clone());
        }
        Ok(Element {
            algebra: self.algebra,
            terms,
        })
    }

    pub fn neg(&self) -> Element {
        Element {
            algebra: self.algebra,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Poly) -> Element {
        if c.is_zero() {
            return Element::zero(self.algebra);
        }
        Element {
            algebra: self.algebra,
            terms: self
                .terms
                .iter()
                .map(|(w, k)| (w.clone(), k.mul(c)))
                .collect(),
        }
    }

    /// Substitutes coefficient symbols in every term.
    pub fn substitute(&self, bindings: &[(crate::coeff::Symbol, Poly)]) -> Element {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            Self::merge_term(&mut terms, w.clone(), c.substitute(bindings));
        }
        Element {
            algebra: self.algebra,
            terms,
        }
    }
}

/// A confluence probe: one three-letter overlap reduced both ways.
#[derive(Debug, Clone)]
pub struct Overlap {
    pub word: Word,
    pub left_rule: String,
    pub right_rule: String,
    pub left_nf: Element,
    pub right_nf: Element,
    pub resolves: bool,
}

fn default_step_budget() -> u64 {
    std::env::var("NCSUPER_STEP_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1_000_000)
}

/// A finitely presented graded algebra with validated rewrite rules.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub id: AlgebraId,
    pub table: GeneratorTable,
    pub rules: Vec<RewriteRule>,
    /// rule_index[a * n + b] locates the rule with left side (a, b).
    rule_index: Vec<Option<u16>>,
    budget: u64,
}

impl Presentation {
    pub fn new(
        id: AlgebraId,
        table: GeneratorTable,
        rules: Vec<RewriteRule>,
    ) -> Result<Presentation, AlgebraError> {
        let n = table.len();
        let mut rule_index = vec![None; n * n];
        for (k, rule) in rules.iter().enumerate() {
            let invalid = |reason: &str| AlgebraError::InvalidRule {
                rule: rule.id.clone(),
                reason: reason.to_string(),
            };
            let [a, b] = rule.lhs;
            if (a as usize) >= n || (b as usize) >= n {
                return Err(invalid("left side uses an unknown generator"));
            }
            let slot = a as usize * n + b as usize;
            if rule_index[slot].is_some() {
                return Err(AlgebraError::DuplicateRuleLhs {
                    rule: rule.id.clone(),
                });
            }
            let lhs_word = [a, b];
            let lhs_parity = table.word_parity(&lhs_word);
            for (word, coeff) in &rule.rhs {
                if word.iter().any(|&g| (g as usize) >= n) {
                    return Err(invalid("replacement uses an unknown generator"));
                }
                if table.word_parity(word) != lhs_parity {
                    return Err(invalid("replacement term changes parity"));
                }
                if !coeff.divisible_by_h() && !word_measure_lt(word, &lhs_word) {
                    return Err(invalid(
                        "h-free replacement term does not decrease the termination measure",
                    ));
                }
            }
            rule_index[slot] = Some(k as u16);
        }
        Ok(Presentation {
            id,
            table,
            rules,
            rule_index,
            budget: default_step_budget(),
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Presentation {
        self.budget = budget;
        self
    }

    /// Returns a copy with one rule deliberately damaged (see
    /// `RewriteRule::corrupted`). Used by the self-test that demonstrates the
    /// verification suites catch any single transcription error.
    pub fn with_corrupted_rule(&self, rule_id: &str) -> Result<Presentation, AlgebraError> {
        let mut rules = self.rules.clone();
        let rule = rules
            .iter_mut()
            .find(|r| r.id == rule_id)
            .ok_or_else(|| AlgebraError::UnknownRule {
                rule: rule_id.to_string(),
            })?;
        *rule = rule.corrupted();
        Presentation::new(self.id, self.table.clone(), rules)
            .map(|p| p.with_budget(self.budget))
    }

    fn rule_at(&self, a: u8, b: u8) -> Option<&RewriteRule> {
        let n = self.table.len();
        self.rule_index[a as usize * n + b as usize].map(|k| &self.rules[k as usize])
    }

    /// Reduces a raw term list to normal form. Leftmost redex first; the step
    /// budget turns any runaway reduction into an error.
    pub fn normalize_terms<I>(&self, raw: I) -> Result<Element, AlgebraError>
    where
        I: IntoIterator<Item = (Word, Poly)>,
    {
        let mut out: BTreeMap<Word, Poly> = BTreeMap::new();
        let mut work: Vec<(Word, Poly)> = raw
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let mut steps: u64 = 0;
        while let Some((word, coeff)) = work.pop() {
            let redex = (0..word.len().saturating_sub(1))
                .find_map(|i| self.rule_at(word[i], word[i + 1]).map(|r| (i, r)));
            match redex {
                None => Element::merge_term(&mut out, word, coeff),
                Some((i, rule)) => {
                    steps += 1;
                    if steps > self.budget {
                        return Err(AlgebraError::StepBudgetExceeded {
                            budget: self.budget,
                        });
                    }
                    for (rhs_word, rhs_coeff) in &rule.rhs {
                        let mut w = Vec::with_capacity(word.len() - 2 + rhs_word.len());
                        w.extend_from_slice(&word[..i]);
                        w.extend_from_slice(rhs_word);
                        w.extend_from_slice(&word[i + 2..]);
                        work.push((w, coeff.mul(rhs_coeff)));
                    }
                }
            }
        }
        Ok(Element {
            algebra: self.id,
            terms: out,
        })
    }

    pub fn normalize(&self, e: &Element) -> Result<Element, AlgebraError> {
        debug_assert_eq!(e.algebra, self.id);
        self.normalize_terms(e.terms.iter().map(|(w, c)| (w.clone(), c.clone())))
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element, AlgebraError> {
        if a.algebra != b.algebra {
            return Err(AlgebraError::MixedAlgebras {
                left: a.algebra,
                right: b.algebra,
            });
        }
        debug_assert_eq!(a.algebra, self.id);
        let mut raw = Vec::with_capacity(a.terms.len() * b.terms.len());
        for (w1, c1) in &a.terms {
            for (w2, c2) in &b.terms {
                let mut w = Vec::with_capacity(w1.len() + w2.len());
                w.extend_from_slice(w1);
                w.extend_from_slice(w2);
                raw.push((w, c1.mul(c2)));
            }
        }
        self.normalize_terms(raw)
    }

    pub fn power(&self, a: &Element, n: u32) -> Result<Element, AlgebraError> {
        let mut out = Element::one(self.id);
        for _ in 0..n {
            out = self.multiply(&out, a)?;
        }
        Ok(out)
    }

    /// Parses a product of generator names into an element; `1` is the unit.
    pub fn word_of(&self, names: &[&str]) -> Result<Element, AlgebraError> {
        let mut word = Vec::with_capacity(names.len());
        for name in names {
            word.push(
                self.table
                    .rank_of(name)
                    .ok_or_else(|| AlgebraError::UnknownGenerator {
                        name: name.to_string(),
                    })?,
            );
        }
        self.normalize_terms([(word, Poly::one())])
    }

    /// Parity of a homogeneous element; None when terms disagree or e = 0.
    pub fn parity(&self, e: &Element) -> Option<u8> {
        let mut parities = e.terms.keys().map(|w| self.table.word_parity(w));
        let first = parities.next()?;
        parities.all(|p| p == first).then_some(first)
    }

    /// Reduces every three-letter overlap of two rules both ways.
    ///
    /// All left sides have length two, so these overlaps are the complete set
    /// of critical ambiguities; if each resolves, normal forms are canonical.
    pub fn check_confluence(&self) -> Result<Vec<Overlap>, AlgebraError> {
        let mut reports = Vec::new();
        for r1 in &self.rules {
            for r2 in &self.rules {
                if r1.lhs[1] != r2.lhs[0] {
                    continue;
                }
                let word = vec![r1.lhs[0], r1.lhs[1], r2.lhs[1]];
                // r1 rewrites the prefix pair, r2 the suffix pair.
                let via_r1 = r1.rhs.iter().map(|(w, c)| {
                    let mut nw = w.clone();
                    nw.push(word[2]);
                    (nw, c.clone())
                });
                let via_r2 = r2.rhs.iter().map(|(w, c)| {
                    let mut nw = vec![word[0]];
                    nw.extend_from_slice(w);
                    (nw, c.clone())
                });
                let left_nf = self.normalize_terms(via_r1)?;
                let right_nf = self.normalize_terms(via_r2)?;
                let resolves = left_nf == right_nf;
                reports.push(Overlap {
                    word,
                    left_rule: r1.id.clone(),
                    right_rule: r2.id.clone(),
                    left_nf,
                    right_nf,
                    resolves,
                });
            }
        }
        Ok(reports)
    }

    pub fn failed_overlaps(&self) -> Result<Vec<Overlap>, AlgebraError> {
        Ok(self
            .check_confluence()?
            .into_iter()
            .filter(|o| !o.resolves)
            .collect())
    }

    pub fn format_word(&self, word: &[u8]) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        word.iter()
            .map(|&g| self.table.name(g))
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Canonical text form: terms in descending shortlex order (longest
    /// first), coefficients printed before the word, parenthesized when they
    /// have several terms.
    pub fn format_element(&self, e: &Element) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        let mut ordered: Vec<(&Word, &Poly)> = e.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| b.len().cmp(&a.len()).then_with(|| b.cmp(a)));
        let mut out = String::new();
        for (pos, (word, coeff)) in ordered.into_iter().enumerate() {
            let text = coeff.to_string();
            // A sum like "a + b" keeps its own signs and is re-parenthesized
            // when multiplying a word; pulling a minus out of it would flip
            // every term after the first.
            let needs_parens = text.contains(" + ") || text.contains(" - ");
            let (neg, mag) = if needs_parens {
                (false, text)
            } else {
                match text.strip_prefix('-') {
                    Some(rest) => (true, rest.to_string()),
                    None => (false, text),
                }
            };
            if pos == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if word.is_empty() {
                if needs_parens {
                    out.push_str(&format!("({mag})"));
                } else {
                    out.push_str(&mag);
                }
            } else if mag == "1" {
                out.push_str(&self.format_word(word));
            } else if needs_parens {
                out.push_str(&format!("({})*{}", mag, self.format_word(word)));
            } else {
                out.push_str(&format!("{}*{}", mag, self.format_word(word)));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, Poly};

    // Toy tables reuse the Superspace id; the id only guards against mixing.
    fn flip_table() -> GeneratorTable {
        GeneratorTable::new(&[("u", 0), ("v", 0)])
    }

    fn flip_presentation() -> Presentation {
        // v*u -> u*v + h*v*v: a minimal h-corrected reordering rule.
        let rule = RewriteRule::new(
            "v-u",
            [1, 0],
            vec![
                (vec![0, 1], Poly::one()),
                (vec![1, 1], Poly::h()),
            ],
        );
        Presentation::new(AlgebraId::Superspace, flip_table(), vec![rule]).unwrap()
    }

    #[test]
    fn normalizes_to_ordered_word() {
        let p = flip_presentation();
        let vu = p.word_of(&["v", "u"]).unwrap();
        assert_eq!(p.format_element(&vu), "h*v*v + u*v");
    }

    #[test]
    fn normalize_is_idempotent() {
        let p = flip_presentation();
        let e = p.word_of(&["v", "v", "u", "u"]).unwrap();
        assert_eq!(p.normalize(&e).unwrap(), e);
    }

    #[test]
    fn multiply_is_associative() {
        let p = flip_presentation();
        let x = p.word_of(&["v", "u"]).unwrap();
        let y = p.word_of(&["v"]).unwrap();
        let z = p.word_of(&["u", "v"]).unwrap();
        let xy_z = p
            .multiply(&p.multiply(&x, &y).unwrap(), &z)
            .unwrap();
        let x_yz = p
            .multiply(&x, &p.multiply(&y, &z).unwrap())
            .unwrap();
        assert_eq!(xy_z, x_yz);
    }

    #[test]
    fn rejects_measure_increasing_rule() {
        // u*v -> v*u raises the inversion count with an h-free coefficient.
        let rule = RewriteRule::new("u-v", [0, 1], vec![(vec![1, 0], Poly::one())]);
        let err = Presentation::new(AlgebraId::Superspace, flip_table(), vec![rule]);
        assert!(matches!(err, Err(AlgebraError::InvalidRule { .. })));
    }

    #[test]
    fn rejects_parity_changing_rule() {
        let table = GeneratorTable::new(&[("even", 0), ("odd", 1)]);
        // odd*even -> even*even flips parity.
        let rule = RewriteRule::new("swap", [1, 0], vec![(vec![0, 0], Poly::one())]);
        let err = Presentation::new(AlgebraId::Superspace, table, vec![rule]);
        assert!(matches!(err, Err(AlgebraError::InvalidRule { .. })));
    }

    #[test]
    fn rejects_duplicate_left_sides() {
        let r1 = RewriteRule::new("first", [1, 0], vec![(vec![0, 1], Poly::one())]);
        let r2 = RewriteRule::new("second", [1, 0], vec![]);
        let err = Presentation::new(AlgebraId::Superspace, flip_table(), vec![r1, r2]);
        assert!(matches!(err, Err(AlgebraError::DuplicateRuleLhs { .. })));
    }

    #[test]
    fn budget_exceeded_is_an_error() {
        let p = flip_presentation().with_budget(2);
        let e = Element::with_term(
            AlgebraId::Superspace,
            vec![1, 1, 0, 0],
            Poly::one(),
        );
        let err = p.normalize(&e);
        assert!(matches!(
            err,
            Err(AlgebraError::StepBudgetExceeded { budget: 2 })
        ));
    }

    fn chain_table() -> GeneratorTable {
        GeneratorTable::new(&[("a", 0), ("b", 0), ("c", 0)])
    }

    #[test]
    fn detects_confluence_failure() {
        // b*a -> a*a and c*b -> b*b disagree on the overlap c*b*a.
        let r1 = RewriteRule::new("b-a", [1, 0], vec![(vec![0, 0], Poly::one())]);
        let r2 = RewriteRule::new("c-b", [2, 1], vec![(vec![1, 1], Poly::one())]);
        let p = Presentation::new(AlgebraId::Superspace, chain_table(), vec![r1, r2]).unwrap();
        let failed = p.failed_overlaps().unwrap();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].word, vec![2, 1, 0]);
        assert_ne!(failed[0].left_nf, failed[0].right_nf);
    }

    #[test]
    fn self_overlap_of_a_square_rule_is_probed() {
        let table = GeneratorTable::new(&[("n", 1)]);
        // n*n -> 0 overlaps itself on n*n*n and resolves (both routes give 0).
        let rule = RewriteRule::new("n-sq", [0, 0], vec![]);
        let p = Presentation::new(AlgebraId::Superspace, table, vec![rule]).unwrap();
        let reports = p.check_confluence().unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].resolves);
    }

    #[test]
    fn corrupted_rule_flips_replacement() {
        let p = flip_presentation();
        let bad = p.with_corrupted_rule("v-u").unwrap();
        let vu = bad.word_of(&["v", "u"]).unwrap();
        assert_eq!(bad.format_element(&vu), "-h*v*v - u*v");
        // A zero replacement becomes the unit.
        let table = GeneratorTable::new(&[("n", 1)]);
        let rule = RewriteRule::new("n-sq", [0, 0], vec![]);
        let q = Presentation::new(AlgebraId::Superspace, table, vec![rule]).unwrap();
        let bad_q = q.with_corrupted_rule("n-sq").unwrap();
        let nn = bad_q.word_of(&["n", "n"]).unwrap();
        assert_eq!(bad_q.format_element(&nn), "1");
    }

    #[test]
    fn mixing_algebras_is_rejected() {
        let a = Element::one(AlgebraId::Superspace);
        let b = Element::one(AlgebraId::Group);
        assert!(matches!(
            a.add(&b),
            Err(AlgebraError::MixedAlgebras { .. })
        ));
    }

    #[test]
    fn scalar_coefficient_multiplication_commutes_with_normalize() {
        let p = flip_presentation();
        let raw = Element::with_term(AlgebraId::Superspace, vec![1, 0], Poly::h());
        let scaled_then_nf = p.normalize(&raw).unwrap();
        let nf_then_scaled = p
            .normalize(&Element::with_term(
                AlgebraId::Superspace,
                vec![1, 0],
                Poly::one(),
            ))
            .unwrap()
            .scale(&Poly::h());
        assert_eq!(scaled_then_nf, nf_then_scaled);
    }

    use proptest::prelude::*;

    fn arb_word() -> impl Strategy<Value = Word> {
        proptest::collection::vec(0u8..2, 0..4)
    }

    proptest! {
        #[test]
        fn normalize_idempotent_on_random_words(w in arb_word()) {
            let p = flip_presentation();
            let e = p.normalize_terms([(w, Poly::one())]).unwrap();
            prop_assert_eq!(p.normalize(&e).unwrap(), e);
        }

        #[test]
        fn multiply_associative_on_random_words(
            u in arb_word(),
            v in arb_word(),
            w in arb_word(),
        ) {
            let p = flip_presentation();
            let a = p.normalize_terms([(u, Poly::one())]).unwrap();
            let b = p.normalize_terms([(v, Poly::one())]).unwrap();
            let c = p.normalize_terms([(w, Poly::constant(rat(1, 3)))]).unwrap();
            let ab_c = p.multiply(&p.multiply(&a, &b).unwrap(), &c).unwrap();
            let a_bc = p.multiply(&a, &p.multiply(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
        }

        #[test]
        fn rewriting_preserves_parity(w in proptest::collection::vec(0u8..2, 1..6)) {
            let table = GeneratorTable::new(&[("x", 0), ("t", 1)]);
            // t*x -> x*t + h*x*x is parity-consistent (both sides odd).
            let rule = RewriteRule::new(
                "t-x",
                [1, 0],
                vec![(vec![0, 1], Poly::one())],
            );
            let p = Presentation::new(AlgebraId::Superspace, table, vec![rule]).unwrap();
            let before = p.table.word_parity(&w);
            let e = p.normalize_terms([(w, Poly::one())]).unwrap();
            if let Some(after) = p.parity(&e) {
                prop_assert_eq!(before, after);
            }
        }
    }
}
