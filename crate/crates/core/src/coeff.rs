//! Commutative coefficient ring Q[h, c0, c1, c2].
//!
//! Invariants: polynomials never store a zero coefficient; monomials are kept
//! in graded-lex order (total degree first, then exponent vector); rationals
//! are always reduced with positive denominator (maintained by `BigRational`).

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, One, Signed, Zero};

/// Exact rational scalar.
pub type Rational = num::BigRational;

/// Builds the reduced rational p/q. Panics on q = 0.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// The four commuting coefficient symbols: the deformation parameter and the
/// three connection-family parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    H,
    C0,
    C1,
    C2,
}

pub const SYMBOLS: [Symbol; 4] = [Symbol::H, Symbol::C0, Symbol::C1, Symbol::C2];

impl Symbol {
    pub fn name(self) -> &'static str {
        match self {
            Symbol::H => "h",
            Symbol::C0 => "c0",
            Symbol::C1 => "c1",
            Symbol::C2 => "c2",
        }
    }

    /// Resolves a symbol by name; unknown names are an error, not a new symbol.
    pub fn from_name(name: &str) -> Result<Symbol, CoeffError> {
        match name {
            "h" => Ok(Symbol::H),
            "c0" => Ok(Symbol::C0),
            "c1" => Ok(Symbol::C1),
            "c2" => Ok(Symbol::C2),
            _ => Err(CoeffError::UnknownSymbol(name.to_string())),
        }
    }

    fn index(self) -> usize {
        match self {
            Symbol::H => 0,
            Symbol::C0 => 1,
            Symbol::C1 => 2,
            Symbol::C2 => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoeffError {
    UnknownSymbol(String),
}

impl fmt::Display for CoeffError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffError::UnknownSymbol(name) => write!(f, "unknown coefficient symbol: {name}"),
        }
    }
}

impl std::error::Error for CoeffError {}

/// Exponent vector over (h, c0, c1, c2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mono(pub [u16; 4]);

impl Mono {
    pub const ONE: Mono = Mono([0; 4]);

    pub fn total_degree(self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    fn mul(self, other: Mono) -> Mono {
        let mut out = [0u16; 4];
        for k in 0..4 {
            out[k] = self.0[k] + other.0[k];
        }
        Mono(out)
    }
}

impl Ord for Mono {
    /// Graded-lex: total degree first, then the exponent vector.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in Q[h, c0, c1, c2]. The term map never holds a zero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Rational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::ONE, c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(rat(n, 1))
    }

    pub fn sym(s: Symbol) -> Poly {
        let mut exps = [0u16; 4];
        exps[s.index()] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Mono(exps), Rational::one());
        Poly { terms }
    }

    /// The deformation parameter h.
    pub fn h() -> Poly {
        Poly::sym(Symbol::H)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Mono::ONE)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rational)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Mono::ONE) {
                return Some(c.clone());
            }
        }
        None
    }

    fn insert(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(*m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert(m1.mul(*m2), c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (*m, k.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// True when every term is divisible by h.
    pub fn divisible_by_h(&self) -> bool {
        self.terms.keys().all(|m| m.0[0] > 0)
    }

    /// Replaces each bound symbol by its polynomial value, all at once.
    pub fn substitute(&self, bindings: &[(Symbol, Poly)]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for s in SYMBOLS {
                let e = m.0[s.index()];
                if e == 0 {
                    continue;
                }
                let base = bindings
                    .iter()
                    .find(|(bs, _)| *bs == s)
                    .map(|(_, v)| v.clone())
                    .unwrap_or_else(|| Poly::sym(s));
                term = term.mul(&base.pow(u32::from(e)));
            }
            out = out.add(&term);
        }
        out
    }

    /// Name-keyed substitution; names outside the coefficient ring are errors.
    pub fn substitute_named(&self, bindings: &[(&str, Poly)]) -> Result<Poly, CoeffError> {
        let mut resolved = Vec::with_capacity(bindings.len());
        for (name, value) in bindings {
            resolved.push((Symbol::from_name(name)?, value.clone()));
        }
        Ok(self.substitute(&resolved))
    }

    /// The coefficient of `sym^power`, with that power divided out.
    pub fn coeff_of(&self, sym: Symbol, power: u16) -> Poly {
        let idx = sym.index();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m.0[idx] == power {
                let mut exps = m.0;
                exps[idx] = 0;
                out.insert(Mono(exps), c.clone());
            }
        }
        out
    }

    /// Largest exponent of `sym` across all terms.
    pub fn degree_in(&self, sym: Symbol) -> u16 {
        self.terms
            .keys()
            .map(|m| m.0[sym.index()])
            .max()
            .unwrap_or(0)
    }
}

fn fmt_rational(c: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "({}/{})", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    /// Canonical text: terms in descending graded-lex order, `*`-separated
    /// factors, rationals parenthesized, e.g. `-(1/2)*h`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (pos, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if pos == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let is_unit_mono = *m == Mono::ONE;
            if !mag.is_one() || is_unit_mono {
                fmt_rational(&mag, f)?;
                if !is_unit_mono {
                    write!(f, "*")?;
                }
            }
            let mut first = true;
            for s in SYMBOLS {
                let e = m.0[s.index()];
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                if e == 1 {
                    write!(f, "{}", s.name())?;
                } else {
                    write!(f, "{}^{}", s.name(), e)?;
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn h() -> Poly {
        Poly::h()
    }

    #[test]
    fn product_of_conjugates() {
        let lhs = h().add(&Poly::int(1)).mul(&h().sub(&Poly::int(1)));
        let rhs = h().mul(&h()).sub(&Poly::int(1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplication_by_zero_annihilates() {
        assert!(h().mul(&Poly::zero()).is_zero());
    }

    #[test]
    fn square_of_product() {
        let c0h = Poly::sym(Symbol::C0).mul(&h());
        let sq = c0h.pow(2);
        let expect = Poly::sym(Symbol::C0).pow(2).mul(&h().pow(2));
        assert_eq!(sq, expect);
    }

    #[test]
    fn substitute_cancels_parameter_sum() {
        let sum = Poly::sym(Symbol::C1).add(&Poly::sym(Symbol::C2));
        let bound = sum.substitute(&[(Symbol::C2, Poly::sym(Symbol::C1).neg())]);
        assert!(bound.is_zero());
    }

    #[test]
    fn substitute_polynomial_value() {
        // h := h + 1 in h^2 gives h^2 + 2h + 1.
        let p = h().pow(2).substitute(&[(Symbol::H, h().add(&Poly::int(1)))]);
        let expect = h().pow(2).add(&h().scale(&rat(2, 1))).add(&Poly::int(1));
        assert_eq!(p, expect);
    }

    #[test]
    fn unknown_symbol_is_an_error() {
        let err = h().substitute_named(&[("q", Poly::int(0))]);
        assert!(matches!(err, Err(CoeffError::UnknownSymbol(_))));
    }

    #[test]
    fn display_canonical_forms() {
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(h().scale(&rat(-1, 2)).to_string(), "-(1/2)*h");
        let p = h().pow(2).sub(&Poly::int(1));
        assert_eq!(p.to_string(), "h^2 - 1");
        let q = Poly::sym(Symbol::C0).mul(&h()).add(&Poly::sym(Symbol::C1));
        assert_eq!(q.to_string(), "h*c0 + c1");
    }

    #[test]
    fn graded_lex_orders_by_total_degree_first() {
        // c2 has lower degree than h^2, so h^2 is the leading monomial.
        let p = Poly::sym(Symbol::C2).add(&h().pow(2));
        assert_eq!(p.to_string(), "h^2 + c2");
    }

    #[test]
    fn h_divisibility() {
        assert!(h().mul(&Poly::sym(Symbol::C0)).divisible_by_h());
        assert!(!h().add(&Poly::int(1)).divisible_by_h());
        // The zero polynomial is vacuously h-divisible.
        assert!(Poly::zero().divisible_by_h());
    }

    #[test]
    fn coefficient_extraction_splits_by_power() {
        // c0*h + c1*c0 + 2: the c0-part is h + c1, the c0-free part is 2.
        let p = Poly::sym(Symbol::C0)
            .mul(&h())
            .add(&Poly::sym(Symbol::C1).mul(&Poly::sym(Symbol::C0)))
            .add(&Poly::int(2));
        assert_eq!(
            p.coeff_of(Symbol::C0, 1),
            h().add(&Poly::sym(Symbol::C1))
        );
        assert_eq!(p.coeff_of(Symbol::C0, 0), Poly::int(2));
        assert_eq!(p.degree_in(Symbol::C0), 1);
    }

    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec(
            (
                proptest::array::uniform4(0u16..3),
                -4i64..5,
                1i64..4,
            ),
            0..5,
        )
        .prop_map(|terms| {
            let mut p = Poly::zero();
            for (exps, num, den) in terms {
                p = p.add(&Poly {
                    terms: [(Mono(exps), rat(num, den))]
                        .into_iter()
                        .filter(|(_, c)| !c.is_zero())
                        .collect(),
                });
            }
            p
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert!(a.sub(&a).is_zero());
        }

        #[test]
        fn substitution_is_a_ring_map(a in arb_poly(), b in arb_poly()) {
            let v = Poly::h().add(&Poly::int(1));
            let bind = [(Symbol::C0, v)];
            prop_assert_eq!(
                a.mul(&b).substitute(&bind),
                a.substitute(&bind).mul(&b.substitute(&bind))
            );
            prop_assert_eq!(
                a.add(&b).substitute(&bind),
                a.substitute(&bind).add(&b.substitute(&bind))
            );
        }
    }
}
