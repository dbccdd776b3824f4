//! Differential forms over the quantum superspace in left-canonical shape.
//!
//! Every object is a finite sum f * Xi^{l1} ox ... ox Xi^{lk} with the
//! coefficient f in the function algebra and all one-form labels on the
//! right. Products and module actions concatenate raw words and restore
//! that shape with the coordinate/one-form exchange relations, so tensor
//! slots are glued over the function algebra, not over scalars. The
//! exchange table is read off the inverse braid matrix and cross-checked
//! against the stored rewrite rules; the wedge table is read off the
//! one-form sector of the calculus presentation.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{AlgebraError, AlgebraId, Element, Presentation, Word};
use crate::check::Check;
use crate::coeff::{rat, Poly, Symbol};
use crate::matrix::{b_inverse_signed, b_matrix, pidx, sigma_matrix, IHAT, XHAT};
use crate::presentations::{j_matrix, Algebras, CAL_SHIFT};

/// Display names for the one-form labels xi1, eta, xi2.
pub const FORM_NAMES: [&str; 3] = ["xi1", "eta", "xi2"];

/// Normally ordered label pairs spanning the two-form sector.
pub const WEDGE_BASIS: [(u8, u8); 5] = [(0, 0), (0, 1), (0, 2), (1, 2), (2, 2)];

/// Name of the k-th two-form basis element, e.g. "xi1/\eta".
pub fn wedge_basis_name(k: u8) -> String {
    let (a, b) = WEDGE_BASIS[k as usize];
    format!("{}/\\{}", FORM_NAMES[a as usize], FORM_NAMES[b as usize])
}

fn hp(k: u32, n: i64, d: i64) -> Poly {
    Poly::h().pow(k).scale(&rat(n, d))
}

// ---------------------------------------------------------------------------
// errors

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormError {
    Algebra(AlgebraError),
    /// The coefficient algebra must be the superspace or the combined one.
    UnsupportedAlgebra { id: AlgebraId },
    /// A letter that is neither a coefficient letter nor a one-form label.
    ForeignLetter { rank: u8 },
    SlotMismatch { expected: usize, found: usize },
    SlotRange { slot: usize, slots: usize },
}

impl fmt::Display for FormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormError::Algebra(e) => write!(f, "{e}"),
            FormError::UnsupportedAlgebra { id } => {
                write!(f, "forms are not defined over the {} algebra", id.name())
            }
            FormError::ForeignLetter { rank } => {
                write!(f, "letter of rank {rank} is not allowed in a form word")
            }
            FormError::SlotMismatch { expected, found } => {
                write!(f, "expected {expected} tensor slots, found {found}")
            }
            FormError::SlotRange { slot, slots } => {
                write!(f, "slot {slot} out of range for {slots} slots")
            }
        }
    }
}

impl std::error::Error for FormError {}

impl From<AlgebraError> for FormError {
    fn from(e: AlgebraError) -> FormError {
        FormError::Algebra(e)
    }
}

// ---------------------------------------------------------------------------
// tensors

/// A sum of terms f * Xi^{l1} ox ... ox Xi^{lk}, keyed by the label word.
/// Coefficients are normalized elements of the function algebra; zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor {
    pub algebra: AlgebraId,
    pub slots: usize,
    pub terms: BTreeMap<Vec<u8>, Element>,
}

impl Tensor {
    pub fn zero(algebra: AlgebraId, slots: usize) -> Tensor {
        Tensor {
            algebra,
            slots,
            terms: BTreeMap::new(),
        }
    }

    /// A single basis tensor with coefficient one.
    pub fn basis(algebra: AlgebraId, labels: &[u8]) -> Tensor {
        let mut terms = BTreeMap::new();
        terms.insert(labels.to_vec(), Element::one(algebra));
        Tensor {
            algebra,
            slots: labels.len(),
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, labels: Vec<u8>, e: Element) -> Result<(), FormError> {
        if e.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&labels) {
            None => {
                self.terms.insert(labels, e);
            }
            Some(old) => {
                let sum = old.add(&e)?;
                if !sum.is_zero() {
                    self.terms.insert(labels, sum);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor, FormError> {
        if self.slots != other.slots {
            return Err(FormError::SlotMismatch {
                expected: self.slots,
                found: other.slots,
            });
        }
        let mut out = self.clone();
        for (ls, e) in &other.terms {
            out.insert(ls.clone(), e.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Tensor {
        let mut out = Tensor::zero(self.algebra, self.slots);
        for (ls, e) in &self.terms {
            out.terms.insert(ls.clone(), e.neg());
        }
        out
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor, FormError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Poly) -> Tensor {
        let mut out = Tensor::zero(self.algebra, self.slots);
        for (ls, e) in &self.terms {
            let s = e.scale(c);
            if !s.is_zero() {
                out.terms.insert(ls.clone(), s);
            }
        }
        out
    }

    /// Applies a map to every coefficient, dropping terms that vanish.
    pub fn map_coeffs(&self, f: impl Fn(&Element) -> Element) -> Tensor {
        let mut out = Tensor::zero(self.algebra, self.slots);
        for (ls, e) in &self.terms {
            let m = f(e);
            if !m.is_zero() {
                out.terms.insert(ls.clone(), m);
            }
        }
        out
    }
}

/// A sum of terms f * (two-form basis element), keyed by the basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WedgeForm {
    pub algebra: AlgebraId,
    pub terms: BTreeMap<u8, Element>,
}

impl WedgeForm {
    pub fn zero(algebra: AlgebraId) -> WedgeForm {
        WedgeForm {
            algebra,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, k: u8, e: Element) -> Result<(), FormError> {
        if e.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&k) {
            None => {
                self.terms.insert(k, e);
            }
            Some(old) => {
                let sum = old.add(&e)?;
                if !sum.is_zero() {
                    self.terms.insert(k, sum);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &WedgeForm) -> Result<WedgeForm, FormError> {
        let mut out = self.clone();
        for (k, e) in &other.terms {
            out.insert(*k, e.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> WedgeForm {
        let mut out = WedgeForm::zero(self.algebra);
        for (k, e) in &self.terms {
            out.terms.insert(*k, e.neg());
        }
        out
    }

    pub fn sub(&self, other: &WedgeForm) -> Result<WedgeForm, FormError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Poly) -> WedgeForm {
        let mut out = WedgeForm::zero(self.algebra);
        for (k, e) in &self.terms {
            let s = e.scale(c);
            if !s.is_zero() {
                out.terms.insert(*k, s);
            }
        }
        out
    }
}

/// A sum of terms f * (two-form basis element) ox Xi^b.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WedgeTensor {
    pub algebra: AlgebraId,
    pub terms: BTreeMap<(u8, u8), Element>,
}

impl WedgeTensor {
    pub fn zero(algebra: AlgebraId) -> WedgeTensor {
        WedgeTensor {
            algebra,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, key: (u8, u8), e: Element) -> Result<(), FormError> {
        if e.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&key) {
            None => {
                self.terms.insert(key, e);
            }
            Some(old) => {
                let sum = old.add(&e)?;
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &WedgeTensor) -> Result<WedgeTensor, FormError> {
        let mut out = self.clone();
        for (k, e) in &other.terms {
            out.insert(*k, e.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> WedgeTensor {
        let mut out = WedgeTensor::zero(self.algebra);
        for (k, e) in &self.terms {
            out.terms.insert(*k, e.neg());
        }
        out
    }

    pub fn sub(&self, other: &WedgeTensor) -> Result<WedgeTensor, FormError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Poly) -> WedgeTensor {
        let mut out = WedgeTensor::zero(self.algebra);
        for (k, e) in &self.terms {
            let s = e.scale(c);
            if !s.is_zero() {
                out.terms.insert(*k, s);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// the form context

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RawLetter {
    /// A coefficient letter, by its rank in the coefficient algebra.
    C(u8),
    /// A one-form label 0..3.
    L(u8),
}

type RawChain = Vec<(Vec<RawLetter>, Poly)>;

/// Canonicalization context for one coefficient algebra. `coeff` is the
/// function algebra the coefficients live in; `source` is the presentation
/// whose words mix coefficients and one-form letters.
pub struct FormContext<'a> {
    pub coeff: &'a Presentation,
    pub source: &'a Presentation,
    coord_base: u8,
    group_count: u8,
    /// exchange[f][k]: Xi^f X^k = sum of coeff * X^i Xi^j entries (i, j, coeff).
    exchange: Vec<Vec<Vec<(u8, u8, Poly)>>>,
    /// wedge[a][b]: Xi^a /\ Xi^b on the normally ordered pair basis.
    wedge: Vec<Vec<Vec<(u8, Poly)>>>,
}

impl<'a> FormContext<'a> {
    /// Forms with superspace coefficients; mixed words live in the calculus.
    pub fn superspace(a: &'a Algebras) -> Result<FormContext<'a>, FormError> {
        FormContext::build(&a.superspace, &a.calculus, 0, 0)
    }

    /// Forms with combined group/superspace coefficients.
    pub fn combined(a: &'a Algebras) -> Result<FormContext<'a>, FormError> {
        FormContext::build(&a.combined, &a.combined, CAL_SHIFT + 3, CAL_SHIFT)
    }

    fn build(
        coeff: &'a Presentation,
        source: &'a Presentation,
        coord_base: u8,
        group_count: u8,
    ) -> Result<FormContext<'a>, FormError> {
        if coeff.id != AlgebraId::Superspace && coeff.id != AlgebraId::Combined {
            return Err(FormError::UnsupportedAlgebra { id: coeff.id });
        }
        let binv = b_inverse_signed();
        let mut exchange = Vec::with_capacity(3);
        for f in 0..3usize {
            let mut per_label = Vec::with_capacity(3);
            for k in 0..3usize {
                let mut entries = Vec::new();
                for i in 0..3usize {
                    for j in 0..3usize {
                        let mut c = binv.get(pidx(k, f), pidx(i, j)).clone();
                        if XHAT[i] == 1 {
                            c = c.neg();
                        }
                        if !c.is_zero() {
                            entries.push((i as u8, j as u8, c));
                        }
                    }
                }
                per_label.push(entries);
            }
            exchange.push(per_label);
        }

        let label_base = if source.id == AlgebraId::Combined {
            CAL_SHIFT
        } else {
            0
        };
        let mut wedge = Vec::with_capacity(3);
        for a in 0..3u8 {
            let mut row = Vec::with_capacity(3);
            for b in 0..3u8 {
                let word: Word = vec![label_base + a, label_base + b];
                let nf = source.normalize_terms([(word, Poly::one())])?;
                let mut entries = Vec::new();
                for (w, c) in &nf.terms {
                    if w.len() != 2 {
                        return Err(FormError::ForeignLetter { rank: w[0] });
                    }
                    let pair = (w[0] - label_base, w[1] - label_base);
                    let k = WEDGE_BASIS
                        .iter()
                        .position(|p| *p == pair)
                        .ok_or(FormError::ForeignLetter { rank: w[0] })?;
                    entries.push((k as u8, c.clone()));
                }
                row.push(entries);
            }
            wedge.push(row);
        }

        Ok(FormContext {
            coeff,
            source,
            coord_base,
            group_count,
            exchange,
            wedge,
        })
    }

    /// Rank of the a-th coordinate in the coefficient algebra.
    pub fn coordinate_rank(&self, a: usize) -> u8 {
        self.coord_base + a as u8
    }

    /// The a-th coordinate as a coefficient element.
    pub fn coordinate(&self, a: usize) -> Element {
        Element::generator(self.coeff.id, self.coordinate_rank(a))
    }

    /// The invariant scalar x^2 - 2 theta1 theta2 in the coefficient algebra.
    pub fn phi(&self) -> Element {
        let x = self.coordinate_rank(1);
        let t1 = self.coordinate_rank(0);
        let t2 = self.coordinate_rank(2);
        let mut e = Element::with_term(self.coeff.id, vec![x, x], Poly::one());
        e.terms.insert(vec![t1, t2], hp(0, -2, 1));
        e
    }

    fn basis(&self, labels: &[u8]) -> Tensor {
        Tensor::basis(self.coeff.id, labels)
    }

    // -- raw chains ---------------------------------------------------------

    fn coeff_letter(&self, rank: u8) -> Result<RawLetter, FormError> {
        let is_coord = rank >= self.coord_base && rank < self.coord_base + 3;
        if is_coord || rank < self.group_count {
            Ok(RawLetter::C(rank))
        } else {
            Err(FormError::ForeignLetter { rank })
        }
    }

    fn source_letter(&self, rank: u8) -> Result<RawLetter, FormError> {
        if self.source.id == AlgebraId::Combined {
            match rank {
                0..=5 => Ok(RawLetter::C(rank)),
                6..=8 => Ok(RawLetter::L(rank - CAL_SHIFT)),
                9..=11 => Ok(RawLetter::C(rank)),
                _ => Err(FormError::ForeignLetter { rank }),
            }
        } else {
            match rank {
                0..=2 => Ok(RawLetter::L(rank)),
                3..=5 => Ok(RawLetter::C(rank - 3)),
                _ => Err(FormError::ForeignLetter { rank }),
            }
        }
    }

    fn chain_of_tensor(&self, t: &Tensor, out: &mut RawChain) -> Result<(), FormError> {
        for (ls, e) in &t.terms {
            for (w, c) in &e.terms {
                let mut word = Vec::with_capacity(w.len() + ls.len());
                for r in w {
                    word.push(self.coeff_letter(*r)?);
                }
                for f in ls {
                    word.push(RawLetter::L(*f));
                }
                out.push((word, c.clone()));
            }
        }
        Ok(())
    }

    /// Restores the left-canonical shape of a raw mixed chain. Each exchange
    /// or graded swap moves one coefficient letter past one label, so the
    /// total number of such inversions strictly decreases.
    fn canonicalize(&self, slots: usize, mut work: RawChain) -> Result<Tensor, FormError> {
        let mut collected: BTreeMap<Vec<u8>, Vec<(Word, Poly)>> = BTreeMap::new();
        while let Some((word, coeff)) = work.pop() {
            if coeff.is_zero() {
                continue;
            }
            let window = (0..word.len().saturating_sub(1)).find(|&i| {
                matches!(
                    (word[i], word[i + 1]),
                    (RawLetter::L(_), RawLetter::C(_))
                )
            });
            match window {
                None => {
                    let mut cw: Word = Vec::new();
                    let mut ls: Vec<u8> = Vec::new();
                    for l in &word {
                        match *l {
                            RawLetter::C(r) => cw.push(r),
                            RawLetter::L(f) => ls.push(f),
                        }
                    }
                    if ls.len() != slots {
                        return Err(FormError::SlotMismatch {
                            expected: slots,
                            found: ls.len(),
                        });
                    }
                    collected.entry(ls).or_default().push((cw, coeff));
                }
                Some(i) => {
                    let (f, r) = match (word[i], word[i + 1]) {
                        (RawLetter::L(f), RawLetter::C(r)) => (f, r),
                        _ => unreachable!(),
                    };
                    if r >= self.coord_base && r < self.coord_base + 3 {
                        let k = (r - self.coord_base) as usize;
                        for (ci, fj, poly) in &self.exchange[f as usize][k] {
                            let mut w = word.clone();
                            w[i] = RawLetter::C(self.coord_base + ci);
                            w[i + 1] = RawLetter::L(*fj);
                            work.push((w, coeff.mul(poly)));
                        }
                    } else if r < self.group_count {
                        let mut w = word;
                        w[i] = RawLetter::C(r);
                        w[i + 1] = RawLetter::L(f);
                        let c = if IHAT[f as usize] == 1 && self.coeff.table.parity(r) == 1 {
                            coeff.neg()
                        } else {
                            coeff
                        };
                        work.push((w, c));
                    } else {
                        return Err(FormError::ForeignLetter { rank: r });
                    }
                }
            }
        }
        let mut out = Tensor::zero(self.coeff.id, slots);
        for (ls, raw) in collected {
            let e = self.coeff.normalize_terms(raw)?;
            if !e.is_zero() {
                out.terms.insert(ls, e);
            }
        }
        Ok(out)
    }

    // -- conversions ---------------------------------------------------------

    /// Reads a coefficient-algebra or source-algebra element as a tensor
    /// with the given slot count.
    pub fn elem_to_tensor(&self, e: &Element, slots: usize) -> Result<Tensor, FormError> {
        let mut chain = Vec::new();
        for (w, c) in &e.terms {
            let mut word = Vec::with_capacity(w.len());
            for r in w {
                let letter = if e.algebra == self.source.id {
                    self.source_letter(*r)?
                } else if e.algebra == self.coeff.id {
                    self.coeff_letter(*r)?
                } else {
                    return Err(FormError::UnsupportedAlgebra { id: e.algebra });
                };
                word.push(letter);
            }
            chain.push((word, c.clone()));
        }
        self.canonicalize(slots, chain)
    }

    /// Writes a tensor back as a source-algebra element and normalizes it.
    /// Faithful for at most one slot; higher slots collapse the tensor sign.
    pub fn tensor_to_source(&self, t: &Tensor) -> Result<Element, FormError> {
        let label_base = if self.source.id == AlgebraId::Combined {
            CAL_SHIFT
        } else {
            0
        };
        let mut raw: Vec<(Word, Poly)> = Vec::new();
        for (ls, e) in &t.terms {
            for (w, c) in &e.terms {
                let mut word: Word = Vec::with_capacity(w.len() + ls.len());
                for r in w {
                    let mapped = if self.source.id == self.coeff.id {
                        *r
                    } else {
                        // superspace coordinate into the calculus
                        r + 3
                    };
                    word.push(mapped);
                }
                for f in ls {
                    word.push(label_base + f);
                }
                raw.push((word, c.clone()));
            }
        }
        Ok(self.source.normalize_terms(raw)?)
    }

    /// Rebuilds a tensor from its own raw words; the result must be equal.
    pub fn recanonicalize(&self, t: &Tensor) -> Result<Tensor, FormError> {
        let mut chain = Vec::new();
        self.chain_of_tensor(t, &mut chain)?;
        self.canonicalize(t.slots, chain)
    }

    // -- products and module actions -----------------------------------------

    /// Tensor product over the function algebra; zero-slot factors act as
    /// plain coefficients.
    pub fn tensor(&self, a: &Tensor, b: &Tensor) -> Result<Tensor, FormError> {
        let slots = a.slots + b.slots;
        let mut chain = Vec::new();
        for (la, ea) in &a.terms {
            for (wa, ca) in &ea.terms {
                for (lb, eb) in &b.terms {
                    for (wb, cb) in &eb.terms {
                        let mut word =
                            Vec::with_capacity(wa.len() + la.len() + wb.len() + lb.len());
                        for r in wa {
                            word.push(self.coeff_letter(*r)?);
                        }
                        for f in la {
                            word.push(RawLetter::L(*f));
                        }
                        for r in wb {
                            word.push(self.coeff_letter(*r)?);
                        }
                        for f in lb {
                            word.push(RawLetter::L(*f));
                        }
                        chain.push((word, ca.mul(cb)));
                    }
                }
            }
        }
        self.canonicalize(slots, chain)
    }

    /// Left module action of a coefficient element.
    pub fn scale_left(&self, f: &Element, t: &Tensor) -> Result<Tensor, FormError> {
        let mut out = Tensor::zero(self.coeff.id, t.slots);
        for (ls, e) in &t.terms {
            let prod = self.coeff.multiply(f, e)?;
            out.insert(ls.clone(), prod)?;
        }
        Ok(out)
    }

    /// Right module action of a coefficient element.
    pub fn mul_right(&self, t: &Tensor, f: &Element) -> Result<Tensor, FormError> {
        let mut chain = Vec::new();
        for (ls, e) in &t.terms {
            for (w, c) in &e.terms {
                for (fw, fc) in &f.terms {
                    let mut word = Vec::with_capacity(w.len() + ls.len() + fw.len());
                    for r in w {
                        word.push(self.coeff_letter(*r)?);
                    }
                    for l in ls {
                        word.push(RawLetter::L(*l));
                    }
                    for r in fw {
                        word.push(self.coeff_letter(*r)?);
                    }
                    chain.push((word, c.mul(fc)));
                }
            }
        }
        self.canonicalize(t.slots, chain)
    }

    // -- the generalized permutation ------------------------------------------

    /// Applies the generalized permutation to slots (slot, slot + 1).
    pub fn sigma_at(&self, t: &Tensor, slot: usize) -> Result<Tensor, FormError> {
        if slot + 2 > t.slots {
            return Err(FormError::SlotRange {
                slot,
                slots: t.slots,
            });
        }
        let s = sigma_matrix();
        let mut out = Tensor::zero(self.coeff.id, t.slots);
        for (ls, e) in &t.terms {
            let i = ls[slot] as usize;
            let j = ls[slot + 1] as usize;
            for a in 0..3u8 {
                for b in 0..3u8 {
                    let c = s.get(pidx(a as usize, b as usize), pidx(i, j));
                    if c.is_zero() {
                        continue;
                    }
                    let mut nl = ls.clone();
                    nl[slot] = a;
                    nl[slot + 1] = b;
                    out.insert(nl, e.scale(c))?;
                }
            }
        }
        Ok(out)
    }

    // -- wedges ---------------------------------------------------------------

    /// Wedges two adjacent labels via the normally ordered pair basis.
    fn wedge_labels(&self, a: u8, b: u8) -> &[(u8, Poly)] {
        &self.wedge[a as usize][b as usize]
    }

    /// The product map on a two-slot tensor.
    pub fn wedge_from_pair(&self, t: &Tensor) -> Result<WedgeForm, FormError> {
        if t.slots != 2 {
            return Err(FormError::SlotMismatch {
                expected: 2,
                found: t.slots,
            });
        }
        let mut out = WedgeForm::zero(self.coeff.id);
        for (ls, e) in &t.terms {
            for (k, c) in self.wedge_labels(ls[0], ls[1]) {
                out.insert(*k, e.scale(c))?;
            }
        }
        Ok(out)
    }

    /// The product map on the first two slots of a three-slot tensor.
    pub fn pi12(&self, t: &Tensor) -> Result<WedgeTensor, FormError> {
        if t.slots != 3 {
            return Err(FormError::SlotMismatch {
                expected: 3,
                found: t.slots,
            });
        }
        let mut out = WedgeTensor::zero(self.coeff.id);
        for (ls, e) in &t.terms {
            for (k, c) in self.wedge_labels(ls[0], ls[1]) {
                out.insert((*k, ls[2]), e.scale(c))?;
            }
        }
        Ok(out)
    }

    /// Wedge of two one-forms.
    pub fn wedge(&self, a: &Tensor, b: &Tensor) -> Result<WedgeForm, FormError> {
        if a.slots != 1 {
            return Err(FormError::SlotMismatch {
                expected: 1,
                found: a.slots,
            });
        }
        if b.slots != 1 {
            return Err(FormError::SlotMismatch {
                expected: 1,
                found: b.slots,
            });
        }
        let prod = self.tensor(a, b)?;
        self.wedge_from_pair(&prod)
    }

    // -- the exterior derivative ----------------------------------------------

    fn d_word(&self, w: &Word, c: &Poly, chain: &mut RawChain) -> Result<(), FormError> {
        let mut prefix_parity = 0u8;
        for (i, r) in w.iter().enumerate() {
            let is_coord = *r >= self.coord_base && *r < self.coord_base + 3;
            if is_coord {
                let mut word = Vec::with_capacity(w.len() + 1);
                for s in &w[..i] {
                    word.push(self.coeff_letter(*s)?);
                }
                word.push(RawLetter::L(r - self.coord_base));
                for s in &w[i + 1..] {
                    word.push(self.coeff_letter(*s)?);
                }
                let signed = if prefix_parity == 1 { c.neg() } else { c.clone() };
                chain.push((word, signed));
            } else if *r >= self.group_count {
                return Err(FormError::ForeignLetter { rank: *r });
            }
            prefix_parity = (prefix_parity + self.coeff.table.parity(*r)) % 2;
        }
        Ok(())
    }

    /// The exterior derivative of a function, as a one-form. Group letters
    /// are constants for it but still count toward the passing sign.
    pub fn d_element(&self, f: &Element) -> Result<Tensor, FormError> {
        let mut chain = Vec::new();
        for (w, c) in &f.terms {
            self.d_word(w, c, &mut chain)?;
        }
        self.canonicalize(1, chain)
    }

    /// The exterior derivative of a one-form. Labels are closed, so only
    /// the coefficients differentiate, landing in the wedge of the label.
    pub fn d_one_form(&self, t: &Tensor) -> Result<WedgeForm, FormError> {
        if t.slots != 1 {
            return Err(FormError::SlotMismatch {
                expected: 1,
                found: t.slots,
            });
        }
        let mut out = WedgeForm::zero(self.coeff.id);
        for (ls, e) in &t.terms {
            let df = self.d_element(e)?;
            for (dl, g) in &df.terms {
                for (k, c) in self.wedge_labels(dl[0], ls[0]) {
                    out.insert(*k, g.scale(c))?;
                }
            }
        }
        Ok(out)
    }

    // -- invariant forms -------------------------------------------------------

    /// The invariant one-form rho = theta1 xi2 + x eta - theta2 xi1
    /// - (h/2) theta2 xi2.
    pub fn rho(&self) -> Result<Tensor, FormError> {
        let j = j_matrix();
        let mut chain = Vec::new();
        for (a, row) in j.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let word = vec![
                    RawLetter::C(self.coordinate_rank(a)),
                    RawLetter::L(b as u8),
                ];
                chain.push((word, c.clone()));
            }
        }
        self.canonicalize(1, chain)
    }

    /// The invariant two-slot tensor Lambda = sum J_ab Xi^a ox Xi^b.
    pub fn lambda(&self) -> Tensor {
        let j = j_matrix();
        let mut out = Tensor::zero(self.coeff.id, 2);
        for (a, row) in j.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                out.terms.insert(
                    vec![a as u8, b as u8],
                    Element::scalar(self.coeff.id, c.clone()),
                );
            }
        }
        out
    }

    /// rho ox rho, the invariant bilinear kernel of the connection family.
    pub fn varpi(&self) -> Result<Tensor, FormError> {
        let r = self.rho()?;
        self.tensor(&r, &r)
    }

    /// The invariant two-form sum J_ab Xi^a /\ Xi^b; it collapses to zero.
    pub fn chi(&self) -> Result<WedgeForm, FormError> {
        let j = j_matrix();
        let mut out = WedgeForm::zero(self.coeff.id);
        for (a, row) in j.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (k, w) in self.wedge_labels(a as u8, b as u8) {
                    out.insert(*k, Element::scalar(self.coeff.id, w.mul(c)))?;
                }
            }
        }
        Ok(out)
    }

    // -- formatting --------------------------------------------------------------

    fn coeff_prefix(&self, e: &Element) -> String {
        if e.terms.len() == 1 {
            let (w, c) = e.terms.iter().next().unwrap();
            if w.is_empty() && c.is_one() {
                return String::new();
            }
            if w.is_empty() && c.clone().neg().is_one() {
                return "-".to_string();
            }
            let s = self.coeff.format_element(e);
            if s.starts_with('-') {
                return format!("({s}) * ");
            }
            return format!("{s} * ");
        }
        format!("({}) * ", self.coeff.format_element(e))
    }

    pub fn format_tensor(&self, t: &Tensor) -> String {
        if t.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (ls, e) in &t.terms {
            let labels = ls
                .iter()
                .map(|f| FORM_NAMES[*f as usize])
                .collect::<Vec<_>>()
                .join(" ox ");
            parts.push(format!("{}{}", self.coeff_prefix(e), labels));
        }
        parts.join(" + ")
    }

    pub fn format_wedge(&self, wf: &WedgeForm) -> String {
        if wf.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, e) in &wf.terms {
            parts.push(format!("{}{}", self.coeff_prefix(e), wedge_basis_name(*k)));
        }
        parts.join(" + ")
    }

    pub fn format_wedge_tensor(&self, wt: &WedgeTensor) -> String {
        if wt.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for ((k, b), e) in &wt.terms {
            parts.push(format!(
                "{}{} ox {}",
                self.coeff_prefix(e),
                wedge_basis_name(*k),
                FORM_NAMES[*b as usize]
            ));
        }
        parts.join(" + ")
    }
}

// ---------------------------------------------------------------------------
// the forms check suite

fn tensor_residual(ctx: &FormContext, label: &str, diff: &Tensor) -> Option<String> {
    if diff.is_zero() {
        None
    } else {
        Some(format!("{label}: {}", ctx.format_tensor(diff)))
    }
}

fn wedge_residual(ctx: &FormContext, label: &str, diff: &WedgeForm) -> Option<String> {
    if diff.is_zero() {
        None
    } else {
        Some(format!("{label}: {}", ctx.format_wedge(diff)))
    }
}

fn check_from(id: &str, anchor: &str, residual: Option<String>) -> Check {
    Check::from_residual(id, anchor, residual.unwrap_or_else(|| "0".to_string()))
}

/// The expected action of the generalized permutation on label pairs,
/// stated explicitly: entries are (input pair, output terms).
#[allow(clippy::type_complexity)]
fn sigma_expected() -> Vec<((u8, u8), Vec<(u8, u8, Poly)>)> {
    vec![
        (
            (0, 0),
            vec![
                (0, 0, hp(0, 1, 1)),
                (0, 2, hp(1, -1, 1)),
                (1, 1, hp(1, -1, 1)),
                (2, 0, hp(1, 1, 1)),
                (2, 2, hp(2, 1, 2)),
            ],
        ),
        ((0, 1), vec![(1, 0, hp(0, 1, 1)), (2, 1, hp(1, 1, 1))]),
        ((0, 2), vec![(2, 0, hp(0, 1, 1)), (2, 2, hp(1, 1, 1))]),
        ((1, 0), vec![(0, 1, hp(0, 1, 1)), (1, 2, hp(1, -1, 1))]),
        ((1, 1), vec![(1, 1, hp(0, -1, 1)), (2, 2, hp(1, -1, 1))]),
        ((1, 2), vec![(2, 1, hp(0, 1, 1))]),
        ((2, 0), vec![(0, 2, hp(0, 1, 1)), (2, 2, hp(1, -1, 1))]),
        ((2, 1), vec![(1, 2, hp(0, 1, 1))]),
        ((2, 2), vec![(2, 2, hp(0, 1, 1))]),
    ]
}

/// Verifies the form-sector identities with superspace coefficients and
/// returns one check per identity family.
pub fn form_checks(algebras: &Algebras) -> Result<Vec<Check>, FormError> {
    let ctx = FormContext::superspace(algebras)?;
    let mut checks = Vec::new();
    let b = b_matrix();
    let rho = ctx.rho()?;
    let lambda = ctx.lambda();
    let phi = ctx.phi();

    // explicit action of the generalized permutation
    let mut residual = None;
    for ((i, j), rows) in sigma_expected() {
        let got = ctx.sigma_at(&ctx.basis(&[i, j]), 0)?;
        let mut want = Tensor::zero(ctx.coeff.id, 2);
        for (a, bb, c) in rows {
            want.insert(vec![a, bb], Element::scalar(ctx.coeff.id, c))?;
        }
        residual = tensor_residual(&ctx, &format!("pair ({i},{j})"), &got.sub(&want)?);
        if residual.is_some() {
            break;
        }
    }
    checks.push(check_from(
        "sigma-action",
        "sigma(xi1 ox xi1) = xi1 ox xi1 - h(xi1 ox xi2 + eta ox eta - xi2 ox xi1 - (h/2) xi2 ox xi2), and the eight companion lines",
        residual,
    ));

    // involution on pairs and on coefficient-carrying tensors
    let mut residual = None;
    'inv: for i in 0..3u8 {
        for j in 0..3u8 {
            let t = ctx.basis(&[i, j]);
            let twice = ctx.sigma_at(&ctx.sigma_at(&t, 0)?, 0)?;
            residual = tensor_residual(&ctx, &format!("pair ({i},{j})"), &twice.sub(&t)?);
            if residual.is_some() {
                break 'inv;
            }
        }
    }
    if residual.is_none() {
        for a in 0..3u8 {
            let t = ctx.tensor(&rho, &ctx.basis(&[a]))?;
            let twice = ctx.sigma_at(&ctx.sigma_at(&t, 0)?, 0)?;
            residual = tensor_residual(&ctx, &format!("rho ox xi{a}"), &twice.sub(&t)?);
            if residual.is_some() {
                break;
            }
        }
    }
    checks.push(check_from("sigma-involution-forms", "sigma^2 = 1", residual));

    // braid relation on label triples
    let mut residual = None;
    'braid: for i in 0..3u8 {
        for j in 0..3u8 {
            for k in 0..3u8 {
                let t = ctx.basis(&[i, j, k]);
                let lhs =
                    ctx.sigma_at(&ctx.sigma_at(&ctx.sigma_at(&t, 0)?, 1)?, 0)?;
                let rhs =
                    ctx.sigma_at(&ctx.sigma_at(&ctx.sigma_at(&t, 1)?, 0)?, 1)?;
                residual =
                    tensor_residual(&ctx, &format!("triple ({i},{j},{k})"), &lhs.sub(&rhs)?);
                if residual.is_some() {
                    break 'braid;
                }
            }
        }
    }
    checks.push(check_from(
        "sigma-braid-forms",
        "sigma_12 sigma_23 sigma_12 = sigma_23 sigma_12 sigma_23",
        residual,
    ));

    // the product map annihilates sigma - 1
    let mut residual = None;
    'pis: for i in 0..3u8 {
        for j in 0..3u8 {
            let t = ctx.basis(&[i, j]);
            let diff = ctx.sigma_at(&t, 0)?.sub(&t)?;
            let w = ctx.wedge_from_pair(&diff)?;
            residual = wedge_residual(&ctx, &format!("pair ({i},{j})"), &w);
            if residual.is_some() {
                break 'pis;
            }
        }
    }
    checks.push(check_from("wedge-after-sigma", "pi o (sigma - 1) = 0", residual));

    // sigma solves the braid-matrix exchange on tensored one-forms
    let mut residual = None;
    'det: for i in 0..3usize {
        for j in 0..3usize {
            let mut rhs = Tensor::zero(ctx.coeff.id, 2);
            for k in 0..3usize {
                for l in 0..3usize {
                    let c = b.get(pidx(i, j), pidx(k, l));
                    if c.is_zero() {
                        continue;
                    }
                    let mut c = c.clone();
                    if (XHAT[i] + IHAT[l]) % 2 == 1 {
                        c = c.neg();
                    }
                    let s = ctx.sigma_at(&ctx.basis(&[l as u8, k as u8]), 0)?;
                    rhs = rhs.add(&s.scale(&c))?;
                }
            }
            let lhs = ctx.basis(&[i as u8, j as u8]);
            residual = tensor_residual(&ctx, &format!("pair ({i},{j})"), &lhs.sub(&rhs)?);
            if residual.is_some() {
                break 'det;
            }
        }
    }
    checks.push(check_from(
        "sigma-exchange",
        "Xi^i ox Xi^j = sum_{k,l} (-1)^{Xhat^i + Xihat^l} B^{ij}_{kl} sigma(Xi^l ox Xi^k)",
        residual,
    ));

    // classical limit of sigma is the graded flip on one-form parities
    let h_zero = [(Symbol::H, Poly::zero())];
    let mut residual = None;
    'flip: for i in 0..3u8 {
        for j in 0..3u8 {
            let s = ctx.sigma_at(&ctx.basis(&[i, j]), 0)?;
            let limit = s.map_coeffs(|e| e.substitute(&h_zero));
            let mut want = ctx.basis(&[j, i]);
            if IHAT[i as usize] * IHAT[j as usize] == 1 {
                want = want.neg();
            }
            residual = tensor_residual(&ctx, &format!("pair ({i},{j})"), &limit.sub(&want)?);
            if residual.is_some() {
                break 'flip;
            }
        }
    }
    checks.push(check_from(
        "sigma-classical-limit",
        "sigma(Xi^a ox Xi^b) at h = 0 is (-1)^{Xihat^a Xihat^b} Xi^b ox Xi^a",
        residual,
    ));

    // the wedge exchange over the braid matrix
    let mut residual = None;
    'wex: for i in 0..3usize {
        for j in 0..3usize {
            let mut lhs = WedgeForm::zero(ctx.coeff.id);
            for (k, c) in ctx.wedge_labels(i as u8, j as u8) {
                lhs.insert(*k, Element::scalar(ctx.coeff.id, c.clone()))?;
            }
            let mut rhs = WedgeForm::zero(ctx.coeff.id);
            for k in 0..3usize {
                for l in 0..3usize {
                    let c = b.get(pidx(i, j), pidx(k, l));
                    if c.is_zero() {
                        continue;
                    }
                    let mut c = c.clone();
                    if (XHAT[i] + IHAT[l]) % 2 == 1 {
                        c = c.neg();
                    }
                    for (kk, w) in ctx.wedge_labels(l as u8, k as u8) {
                        rhs.insert(*kk, Element::scalar(ctx.coeff.id, w.mul(&c)))?;
                    }
                }
            }
            residual = wedge_residual(&ctx, &format!("pair ({i},{j})"), &lhs.sub(&rhs)?);
            if residual.is_some() {
                break 'wex;
            }
        }
    }
    checks.push(check_from(
        "wedge-exchange",
        "Xi^i /\\ Xi^j = sum_{k,l} (-1)^{Xhat^i + Xihat^l} B^{ij}_{kl} Xi^l /\\ Xi^k",
        residual,
    ));

    // the invariant two-form collapses
    let chi = ctx.chi()?;
    checks.push(check_from(
        "invariant-two-form-vanishes",
        "chi = sum_{a,b} J_ab Xi^a /\\ Xi^b = 0",
        wedge_residual(&ctx, "chi", &chi),
    ));

    // both orderings of the invariant one-form agree
    let mut explicit = Tensor::zero(ctx.coeff.id, 1);
    explicit.insert(
        vec![0],
        Element::with_term(ctx.coeff.id, vec![ctx.coordinate_rank(2)], hp(0, -1, 1)),
    )?;
    explicit.insert(
        vec![1],
        Element::with_term(ctx.coeff.id, vec![ctx.coordinate_rank(1)], hp(0, 1, 1)),
    )?;
    explicit.insert(
        vec![2],
        Element::with_term(ctx.coeff.id, vec![ctx.coordinate_rank(0)], hp(0, 1, 1)),
    )?;
    explicit.insert(
        vec![2],
        Element::with_term(ctx.coeff.id, vec![ctx.coordinate_rank(2)], hp(1, -1, 2)),
    )?;
    checks.push(check_from(
        "invariant-one-form-left",
        "rho = sum_{a,b} J_ab X^a Xi^b = theta1 xi2 + x eta - theta2 xi1 - (h/2) theta2 xi2",
        tensor_residual(&ctx, "rho", &rho.sub(&explicit)?),
    ));

    let j = j_matrix();
    let mut chain = Vec::new();
    for (a, row) in j.iter().enumerate() {
        for (bb, c) in row.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut c = c.clone();
            if XHAT[bb] == 1 {
                c = c.neg();
            }
            chain.push((
                vec![
                    RawLetter::L(a as u8),
                    RawLetter::C(ctx.coordinate_rank(bb)),
                ],
                c,
            ));
        }
    }
    let rho_right = ctx.canonicalize(1, chain)?;
    checks.push(check_from(
        "invariant-one-form-right",
        "rho = sum_{a,b} (-1)^{Xhat^b} J_ab Xi^a X^b = xi2 theta1 + eta x - xi1 theta2 + (h/2) xi2 theta2",
        tensor_residual(&ctx, "rho", &rho_right.sub(&rho)?),
    ));

    // the odd square collapses onto the invariant scalar
    let t1 = ctx.coordinate(0);
    let sq = ctx.coeff.multiply(&t1, &t1)?;
    let want = phi.scale(&hp(1, -1, 2));
    let diff = sq.sub(&want)?;
    checks.push(check_from(
        "scalar-square",
        "theta1^2 = -(h/2)(x^2 - 2 theta1 theta2)",
        if diff.is_zero() {
            None
        } else {
            Some(ctx.coeff.format_element(&diff))
        },
    ));

    // the invariant scalar is central among coordinates and one-forms
    let cal = ctx.source;
    let phi_cal = cal.normalize_terms([
        (vec![4u8, 4], Poly::one()),
        (vec![3u8, 5], hp(0, -2, 1)),
    ])?;
    let mut residual = None;
    for g in 0..6u8 {
        let ge = Element::generator(cal.id, g);
        let lhs = cal.multiply(&ge, &phi_cal)?;
        let rhs = cal.multiply(&phi_cal, &ge)?;
        let diff = lhs.sub(&rhs)?;
        let diff = cal.normalize(&diff)?;
        if !diff.is_zero() {
            residual = Some(format!(
                "[{}, phi] = {}",
                cal.table.name(g),
                cal.format_element(&diff)
            ));
            break;
        }
    }
    checks.push(check_from(
        "scalar-center",
        "X^a phi = phi X^a and Xi^a phi = phi Xi^a",
        residual,
    ));

    // coordinates pass the invariant one-form with a plain parity sign
    let mut residual = None;
    for a in 0..3usize {
        let xa = ctx.coordinate(a);
        let lhs = ctx.scale_left(&xa, &rho)?;
        let mut rhs = ctx.mul_right(&rho, &xa)?;
        if XHAT[a] == 1 {
            rhs = rhs.neg();
        }
        residual = tensor_residual(&ctx, &format!("coordinate {a}"), &lhs.sub(&rhs)?);
        if residual.is_some() {
            break;
        }
    }
    checks.push(check_from(
        "rho-coordinate-exchange",
        "X^a rho = (-1)^{Xhat^a} rho X^a",
        residual,
    ));

    // one-forms pass it inside the wedge with the one-form parity sign
    let mut residual = None;
    for a in 0..3u8 {
        let xi = ctx.basis(&[a]);
        let lhs = ctx.wedge(&xi, &rho)?;
        let mut rhs = ctx.wedge(&rho, &xi)?;
        if IHAT[a as usize] == 1 {
            rhs = rhs.neg();
        }
        residual = wedge_residual(&ctx, &format!("label {a}"), &lhs.sub(&rhs)?);
        if residual.is_some() {
            break;
        }
    }
    checks.push(check_from(
        "rho-wedge-exchange",
        "Xi^a /\\ rho = (-1)^{Xihat^a} rho /\\ Xi^a",
        residual,
    ));

    // the invariant one-form squares to zero in the wedge
    let rr = ctx.wedge(&rho, &rho)?;
    checks.push(check_from(
        "rho-wedge-square",
        "rho /\\ rho = 0",
        wedge_residual(&ctx, "rho /\\ rho", &rr),
    ));

    // sigma swaps the invariant one-form with a plain parity sign
    let mut residual = None;
    for a in 0..3u8 {
        let xi = ctx.basis(&[a]);
        let lhs = ctx.sigma_at(&ctx.tensor(&xi, &rho)?, 0)?;
        let mut rhs = ctx.tensor(&rho, &xi)?;
        if IHAT[a as usize] == 1 {
            rhs = rhs.neg();
        }
        residual = tensor_residual(&ctx, &format!("xi{a} ox rho"), &lhs.sub(&rhs)?);
        if residual.is_some() {
            break;
        }
    }
    if residual.is_none() {
        for a in 0..3u8 {
            let xi = ctx.basis(&[a]);
            let lhs = ctx.sigma_at(&ctx.tensor(&rho, &xi)?, 0)?;
            let mut rhs = ctx.tensor(&xi, &rho)?;
            if IHAT[a as usize] == 1 {
                rhs = rhs.neg();
            }
            residual = tensor_residual(&ctx, &format!("rho ox xi{a}"), &lhs.sub(&rhs)?);
            if residual.is_some() {
                break;
            }
        }
    }
    if residual.is_none() {
        let vp = ctx.varpi()?;
        let lhs = ctx.sigma_at(&vp, 0)?;
        residual = tensor_residual(&ctx, "rho ox rho", &lhs.add(&vp)?);
    }
    checks.push(check_from(
        "sigma-rho",
        "sigma(Xi^a ox rho) = (-1)^{Xihat^a} rho ox Xi^a, likewise flipped, and sigma(rho ox rho) = -rho ox rho",
        residual,
    ));

    // coordinates commute with the invariant two-slot tensor
    let mut residual = None;
    for a in 0..3usize {
        let xa = ctx.coordinate(a);
        let lhs = ctx.scale_left(&xa, &lambda)?;
        let rhs = ctx.mul_right(&lambda, &xa)?;
        residual = tensor_residual(&ctx, &format!("coordinate {a}"), &lhs.sub(&rhs)?);
        if residual.is_some() {
            break;
        }
    }
    checks.push(check_from("lambda-coordinate-exchange", "[X^a, Lambda] = 0", residual));

    // the product map annihilates the invariant two-slot tensor
    let pl = ctx.wedge_from_pair(&lambda)?;
    checks.push(check_from(
        "wedge-of-lambda",
        "pi(Lambda) = chi = 0",
        wedge_residual(&ctx, "pi(Lambda)", &pl),
    ));

    // the differential respects the defining coordinate relations
    let mut residual = None;
    for rule in &ctx.coeff.rules {
        let lhs_elem = Element::with_term(ctx.coeff.id, rule.lhs.to_vec(), Poly::one());
        let rhs_elem = Element {
            algebra: ctx.coeff.id,
            terms: rule.rhs.iter().cloned().collect(),
        };
        let dl = ctx.d_element(&lhs_elem)?;
        let dr = ctx.d_element(&rhs_elem)?;
        let diff = dl.sub(&dr)?;
        if !diff.is_zero() {
            residual = Some(format!("rule {}: {}", rule.id, ctx.format_tensor(&diff)));
            break;
        }
    }
    checks.push(check_from(
        "d-respects-relations",
        "d maps both sides of every defining coordinate relation to the same one-form",
        residual,
    ));

    // the differential squares to zero
    let mut samples: Vec<Element> = vec![
        ctx.coordinate(0),
        ctx.coordinate(1),
        ctx.coordinate(2),
        phi.clone(),
    ];
    let words: [&[usize]; 6] = [
        &[0, 1],
        &[1, 2],
        &[0, 2],
        &[1, 1, 2],
        &[2, 1, 0],
        &[0, 1, 2],
    ];
    for w in words {
        let word: Word = w.iter().map(|a| ctx.coordinate_rank(*a)).collect();
        samples.push(ctx.coeff.normalize_terms([(word, Poly::one())])?);
    }
    let mut residual = None;
    for (n, f) in samples.iter().enumerate() {
        let ddf = ctx.d_one_form(&ctx.d_element(f)?)?;
        residual = wedge_residual(&ctx, &format!("sample {n}"), &ddf);
        if residual.is_some() {
            break;
        }
    }
    checks.push(check_from("d-squared", "d^2 = 0", residual));

    // the differential of the invariant one-form collapses like chi
    let drho = ctx.d_one_form(&rho)?;
    checks.push(check_from(
        "d-rho-vanishes",
        "d rho = sum_{a,b} J_ab Xi^a /\\ Xi^b = 0",
        wedge_residual(&ctx, "d rho", &drho),
    ));

    // sigma is a two-sided module map
    let mut residual = None;
    'bilin: for f in [
        ctx.coordinate(0),
        ctx.coordinate(1),
        ctx.coordinate(2),
        phi.clone(),
    ] {
        for i in 0..3u8 {
            for j in 0..3u8 {
                let t = ctx.basis(&[i, j]);
                let lhs = ctx.sigma_at(&ctx.mul_right(&t, &f)?, 0)?;
                let rhs = ctx.mul_right(&ctx.sigma_at(&t, 0)?, &f)?;
                residual =
                    tensor_residual(&ctx, &format!("pair ({i},{j})"), &lhs.sub(&rhs)?);
                if residual.is_some() {
                    break 'bilin;
                }
            }
        }
    }
    checks.push(check_from(
        "sigma-module-bilinear",
        "sigma((Xi^i ox Xi^j) f) = sigma(Xi^i ox Xi^j) f",
        residual,
    ));

    // canonical shape is stable under rebuilding
    let mut residual = None;
    let varpi = ctx.varpi()?;
    for (name, t) in [
        ("rho", &rho),
        ("lambda", &lambda),
        ("rho ox rho", &varpi),
    ] {
        let again = ctx.recanonicalize(t)?;
        residual = tensor_residual(&ctx, name, &again.sub(t)?);
        if residual.is_some() {
            break;
        }
    }
    checks.push(check_from(
        "canonical-shape-stable",
        "rebuilding a left-canonical tensor from its raw words reproduces it",
        residual,
    ));

    Ok(checks)
}

// ---------------------------------------------------------------------------
