//! The four named algebras and their rewrite rules.
//!
//! * `superspace`: coordinates theta1, x, theta2 (parities 1, 0, 1).
//! * `calculus`: one-forms xi1, eta, xi2, the coordinates, and the partial
//!   derivatives d1, dx, d2; the full first-order differential calculus.
//! * `group`: the quantum symmetry supergroup on alpha, delta, a, b, c, d,
//!   with e, beta, gamma eliminated and the quantum determinant as a rule.
//! * `combined`: group and calculus letters side by side; a calculus letter
//!   moves past a group letter with only the Koszul sign.
//!
//! Normal order is the rank order of each generator table. Every relation of
//! the presentation is solved for its descending pair, so normal words are
//! ascending (plus the determinant rule, whose left side b*c is ascending but
//! reducible). Construction validates the termination measure; the confluence
//! audit in `build` makes normal forms canonical.

use crate::algebra::{
    AlgebraError, AlgebraId, Element, GeneratorTable, Overlap, Presentation, RewriteRule, Word,
};
use crate::coeff::{rat, Poly, Symbol};
use std::fmt;

/// Superspace generator ranks.
pub mod sup {
    pub const THETA1: u8 = 0;
    pub const X: u8 = 1;
    pub const THETA2: u8 = 2;
}

/// Calculus generator ranks.
pub mod cal {
    pub const XI1: u8 = 0;
    pub const ETA: u8 = 1;
    pub const XI2: u8 = 2;
    pub const THETA1: u8 = 3;
    pub const X: u8 = 4;
    pub const THETA2: u8 = 5;
    pub const D1: u8 = 6;
    pub const DX: u8 = 7;
    pub const D2: u8 = 8;
}

/// Group generator ranks. Odd letters come first so that the quantum
/// determinant can be oriented as a valid rule (see `group_rules`).
pub mod grp {
    pub const ALPHA: u8 = 0;
    pub const DELTA: u8 = 1;
    pub const A: u8 = 2;
    pub const B: u8 = 3;
    pub const C: u8 = 4;
    pub const D: u8 = 5;
}

/// In the combined algebra, calculus ranks are shifted by this offset.
pub const CAL_SHIFT: u8 = 6;

/// (n/d) * h^k, the only coefficient shape the relation lists need.
fn hk(k: u32, n: i64, d: i64) -> Poly {
    Poly::constant(rat(n, d)).mul(&Poly::h().pow(k))
}

fn rule(id: &str, lhs: [u8; 2], rhs: &[(&[u8], Poly)]) -> RewriteRule {
    RewriteRule::new(
        id,
        lhs,
        rhs.iter().map(|(w, c)| (w.to_vec(), c.clone())).collect(),
    )
}

pub fn superspace_table() -> GeneratorTable {
    GeneratorTable::new(&[("theta1", 1), ("x", 0), ("theta2", 1)])
}

pub fn calculus_table() -> GeneratorTable {
    GeneratorTable::new(&[
        ("xi1", 0),
        ("eta", 1),
        ("xi2", 0),
        ("theta1", 1),
        ("x", 0),
        ("theta2", 1),
        ("d1", 1),
        ("dx", 0),
        ("d2", 1),
    ])
}

pub fn group_table() -> GeneratorTable {
    GeneratorTable::new(&[
        ("alpha", 1),
        ("delta", 1),
        ("a", 0),
        ("b", 0),
        ("c", 0),
        ("d", 0),
    ])
}

pub fn combined_table() -> GeneratorTable {
    GeneratorTable::new(&[
        ("alpha", 1),
        ("delta", 1),
        ("a", 0),
        ("b", 0),
        ("c", 0),
        ("d", 0),
        ("xi1", 0),
        ("eta", 1),
        ("xi2", 0),
        ("theta1", 1),
        ("x", 0),
        ("theta2", 1),
        ("d1", 1),
        ("dx", 0),
        ("d2", 1),
    ])
}

/// Coordinate relations, parameterized by the rank offset of theta1 so the
/// same five rules serve the superspace, calculus, and combined tables.
fn coordinate_rules(o: u8) -> Vec<RewriteRule> {
    let (t1, x, t2) = (o, o + 1, o + 2);
    vec![
        rule(
            "x-theta1",
            [x, t1],
            &[(&[t1, x], hk(0, 1, 1)), (&[x, t2], hk(1, 1, 1))],
        ),
        rule("theta2-theta1", [t2, t1], &[(&[t1, t2], hk(0, -1, 1))]),
        rule("theta2-x", [t2, x], &[(&[x, t2], hk(0, 1, 1))]),
        rule(
            "theta1-theta1",
            [t1, t1],
            &[(&[x, x], hk(1, -1, 2)), (&[t1, t2], hk(1, 1, 1))],
        ),
        rule("theta2-theta2", [t2, t2], &[]),
    ]
}

/// The full calculus rule set at rank offset `o` for xi1 (0 for the calculus
/// table, `CAL_SHIFT` for the combined table).
fn calculus_rules(o: u8) -> Vec<RewriteRule> {
    let (x1, et, x2) = (o, o + 1, o + 2);
    let (t1, x, t2) = (o + 3, o + 4, o + 5);
    let (d1, dx, d2) = (o + 6, o + 7, o + 8);
    let mut rules = vec![
        // One-form exchange relations.
        rule(
            "eta-xi1",
            [et, x1],
            &[(&[x1, et], hk(0, 1, 1)), (&[et, x2], hk(1, -1, 1))],
        ),
        rule(
            "xi2-xi1",
            [x2, x1],
            &[(&[x1, x2], hk(0, 1, 1)), (&[x2, x2], hk(1, -1, 1))],
        ),
        rule("xi2-eta", [x2, et], &[(&[et, x2], hk(0, 1, 1))]),
        rule("eta-eta", [et, et], &[(&[x2, x2], hk(1, -1, 2))]),
    ];
    rules.extend(coordinate_rules(t1));
    rules.extend([
        // Coordinate past one-form.
        rule(
            "theta1-xi1",
            [t1, x1],
            &[
                (&[x1, t1], hk(0, 1, 1)),
                (&[t1, x2], hk(1, 1, 1)),
                (&[x, et], hk(1, 1, 1)),
                (&[t2, x1], hk(1, -1, 1)),
                (&[t2, x2], hk(2, -1, 2)),
            ],
        ),
        rule(
            "theta1-eta",
            [t1, et],
            &[(&[et, t1], hk(0, -1, 1)), (&[x, x2], hk(1, 1, 1))],
        ),
        rule(
            "theta1-xi2",
            [t1, x2],
            &[(&[x2, t1], hk(0, 1, 1)), (&[t2, x2], hk(1, 1, 1))],
        ),
        rule(
            "x-xi1",
            [x, x1],
            &[(&[x1, x], hk(0, 1, 1)), (&[t2, et], hk(1, -1, 1))],
        ),
        rule(
            "x-eta",
            [x, et],
            &[(&[et, x], hk(0, 1, 1)), (&[t2, x2], hk(1, -1, 1))],
        ),
        rule("x-xi2", [x, x2], &[(&[x2, x], hk(0, 1, 1))]),
        rule(
            "theta2-xi1",
            [t2, x1],
            &[(&[x1, t2], hk(0, 1, 1)), (&[t2, x2], hk(1, -1, 1))],
        ),
        rule("theta2-eta", [t2, et], &[(&[et, t2], hk(0, -1, 1))]),
        rule("theta2-xi2", [t2, x2], &[(&[x2, t2], hk(0, 1, 1))]),
        // Derivative past coordinate.
        rule(
            "d1-theta1",
            [d1, t1],
            &[
                (&[], hk(0, 1, 1)),
                (&[t1, d1], hk(0, -1, 1)),
                (&[t2, d1], hk(1, 1, 1)),
            ],
        ),
        rule("d1-x", [d1, x], &[(&[x, d1], hk(0, 1, 1))]),
        rule("d1-theta2", [d1, t2], &[(&[t2, d1], hk(0, -1, 1))]),
        rule(
            "dx-theta1",
            [dx, t1],
            &[(&[t1, dx], hk(0, 1, 1)), (&[x, d1], hk(1, -1, 1))],
        ),
        rule(
            "dx-x",
            [dx, x],
            &[
                (&[], hk(0, 1, 1)),
                (&[x, dx], hk(0, 1, 1)),
                (&[t2, d1], hk(1, 1, 1)),
            ],
        ),
        rule("dx-theta2", [dx, t2], &[(&[t2, dx], hk(0, 1, 1))]),
        rule(
            "d2-theta1",
            [d2, t1],
            &[
                (&[t1, d2], hk(0, -1, 1)),
                (&[t1, d1], hk(1, -1, 1)),
                (&[x, dx], hk(1, -1, 1)),
                (&[t2, d2], hk(1, -1, 1)),
                (&[t2, d1], hk(2, -1, 2)),
            ],
        ),
        rule(
            "d2-x",
            [d2, x],
            &[(&[x, d2], hk(0, 1, 1)), (&[t2, dx], hk(1, -1, 1))],
        ),
        rule(
            "d2-theta2",
            [d2, t2],
            &[
                (&[], hk(0, 1, 1)),
                (&[t2, d2], hk(0, -1, 1)),
                (&[t2, d1], hk(1, 1, 1)),
            ],
        ),
        // Derivative past one-form.
        rule(
            "d1-xi1",
            [d1, x1],
            &[(&[x1, d1], hk(0, 1, 1)), (&[x2, d1], hk(1, -1, 1))],
        ),
        rule("d1-eta", [d1, et], &[(&[et, d1], hk(0, -1, 1))]),
        rule("d1-xi2", [d1, x2], &[(&[x2, d1], hk(0, 1, 1))]),
        rule(
            "dx-xi1",
            [dx, x1],
            &[(&[x1, dx], hk(0, 1, 1)), (&[et, d1], hk(1, -1, 1))],
        ),
        rule(
            "dx-eta",
            [dx, et],
            &[(&[et, dx], hk(0, 1, 1)), (&[x2, d1], hk(1, 1, 1))],
        ),
        rule("dx-xi2", [dx, x2], &[(&[x2, dx], hk(0, 1, 1))]),
        rule(
            "d2-xi1",
            [d2, x1],
            &[
                (&[x1, d2], hk(0, 1, 1)),
                (&[x1, d1], hk(1, 1, 1)),
                (&[et, dx], hk(1, 1, 1)),
                (&[x2, d2], hk(1, 1, 1)),
                (&[x2, d1], hk(2, 1, 2)),
            ],
        ),
        rule(
            "d2-eta",
            [d2, et],
            &[(&[et, d2], hk(0, -1, 1)), (&[x2, dx], hk(1, 1, 1))],
        ),
        rule(
            "d2-xi2",
            [d2, x2],
            &[(&[x2, d2], hk(0, 1, 1)), (&[x2, d1], hk(1, -1, 1))],
        ),
        // Derivative past derivative.
        rule("d1-d1", [d1, d1], &[]),
        rule("dx-d1", [dx, d1], &[(&[d1, dx], hk(0, 1, 1))]),
        rule("d2-d1", [d2, d1], &[(&[d1, d2], hk(0, -1, 1))]),
        rule(
            "d2-dx",
            [d2, dx],
            &[(&[dx, d2], hk(0, 1, 1)), (&[d1, dx], hk(1, 1, 1))],
        ),
        rule(
            "d2-d2",
            [d2, d2],
            &[(&[d1, d2], hk(1, 1, 1)), (&[dx, dx], hk(1, -1, 2))],
        ),
    ]);
    rules
}

/// The 17 supergroup commutation rules solved for the odd-first normal order,
/// plus the quantum determinant oriented as `b*c -> a*d + alpha*delta +
/// (h/2)*a*c - 1`. That orientation is the one the termination measure
/// accepts, and with it every overlap resolves, so the presented algebra is
/// the honest quotient including the determinant relation.
fn group_rules() -> Vec<RewriteRule> {
    use grp::*;
    vec![
        rule(
            "delta-alpha",
            [DELTA, ALPHA],
            &[
                (&[ALPHA, DELTA], hk(0, -1, 1)),
                (&[A, C], hk(1, 1, 1)),
                (&[C, C], hk(2, -1, 2)),
            ],
        ),
        rule(
            "alpha-alpha",
            [ALPHA, ALPHA],
            &[(&[A, A], hk(1, 1, 2)), (&[], hk(1, -1, 2))],
        ),
        rule("delta-delta", [DELTA, DELTA], &[(&[C, C], hk(1, 1, 2))]),
        rule("a-alpha", [A, ALPHA], &[(&[ALPHA, A], hk(0, 1, 1))]),
        rule(
            "a-delta",
            [A, DELTA],
            &[(&[DELTA, A], hk(0, 1, 1)), (&[DELTA, C], hk(1, 1, 1))],
        ),
        rule(
            "b-alpha",
            [B, ALPHA],
            &[(&[ALPHA, B], hk(0, 1, 1)), (&[ALPHA, A], hk(1, 1, 1))],
        ),
        rule(
            "b-delta",
            [B, DELTA],
            &[
                (&[DELTA, B], hk(0, 1, 1)),
                (&[ALPHA, C], hk(1, 1, 1)),
                (&[DELTA, D], hk(1, 1, 1)),
            ],
        ),
        rule(
            "c-alpha",
            [C, ALPHA],
            &[(&[ALPHA, C], hk(0, 1, 1)), (&[DELTA, C], hk(1, -1, 1))],
        ),
        rule("c-delta", [C, DELTA], &[(&[DELTA, C], hk(0, 1, 1))]),
        rule(
            "d-alpha",
            [D, ALPHA],
            &[
                (&[ALPHA, D], hk(0, 1, 1)),
                (&[DELTA, A], hk(1, 1, 1)),
                (&[DELTA, D], hk(1, -1, 1)),
            ],
        ),
        rule(
            "d-delta",
            [D, DELTA],
            &[(&[DELTA, D], hk(0, 1, 1)), (&[DELTA, C], hk(1, 1, 1))],
        ),
        rule(
            "b-a",
            [B, A],
            &[
                (&[A, B], hk(0, 1, 1)),
                (&[], hk(1, -1, 1)),
                (&[A, A], hk(1, 1, 1)),
            ],
        ),
        rule(
            "c-a",
            [C, A],
            &[(&[A, C], hk(0, 1, 1)), (&[C, C], hk(1, -1, 1))],
        ),
        rule(
            "d-a",
            [D, A],
            &[
                (&[A, D], hk(0, 1, 1)),
                (&[A, C], hk(1, 1, 1)),
                (&[C, D], hk(1, -1, 1)),
                (&[C, C], hk(2, -1, 1)),
            ],
        ),
        rule(
            "c-b",
            [C, B],
            &[
                (&[B, C], hk(0, 1, 1)),
                (&[A, C], hk(1, -1, 1)),
                (&[C, D], hk(1, -1, 1)),
            ],
        ),
        rule(
            "d-b",
            [D, B],
            &[
                (&[B, D], hk(0, 1, 1)),
                (&[], hk(1, 1, 1)),
                (&[D, D], hk(1, -1, 1)),
            ],
        ),
        rule(
            "d-c",
            [D, C],
            &[(&[C, D], hk(0, 1, 1)), (&[C, C], hk(1, 1, 1))],
        ),
        rule(
            "det",
            [B, C],
            &[
                (&[A, D], hk(0, 1, 1)),
                (&[ALPHA, DELTA], hk(0, 1, 1)),
                (&[A, C], hk(1, 1, 2)),
                (&[], hk(0, -1, 1)),
            ],
        ),
    ]
}

fn combined_rules() -> Vec<RewriteRule> {
    let table = combined_table();
    let mut rules = group_rules();
    for r in calculus_rules(CAL_SHIFT) {
        rules.push(RewriteRule::new(&format!("cal/{}", r.id), r.lhs, r.rhs));
    }
    // Calculus letters graded-commute with group letters.
    for y in CAL_SHIFT..(CAL_SHIFT + 9) {
        for g in 0..CAL_SHIFT {
            let sign = if table.parity(y) == 1 && table.parity(g) == 1 {
                -1
            } else {
                1
            };
            rules.push(rule(
                &format!("cross/{}-{}", table.name(y), table.name(g)),
                [y, g],
                &[(&[g, y], hk(0, sign, 1))],
            ));
        }
    }
    rules
}

// ---------------------------------------------------------------------------

#[derive(Debug)]
pub enum BuildError {
    Algebra(AlgebraError),
    /// The audit found overlaps that reduce to different normal forms.
    NotConfluent {
        algebra: AlgebraId,
        failures: Vec<Overlap>,
    },
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Algebra(e) => write!(f, "{e}"),
            BuildError::NotConfluent { algebra, failures } => write!(
                f,
                "{} presentation is not confluent: {} unresolved overlap(s)",
                algebra.name(),
                failures.len()
            ),
        }
    }
}

impl From<AlgebraError> for BuildError {
    fn from(e: AlgebraError) -> BuildError {
        BuildError::Algebra(e)
    }
}

impl std::error::Error for BuildError {}

/// The four presentations, built together and individually audited.
pub struct Algebras {
    pub superspace: Presentation,
    pub calculus: Presentation,
    pub group: Presentation,
    pub combined: Presentation,
}

impl Algebras {
    /// Builds all four presentations without the confluence audit.
    pub fn build_unaudited() -> Result<Algebras, AlgebraError> {
        Ok(Algebras {
            superspace: Presentation::new(
                AlgebraId::Superspace,
                superspace_table(),
                coordinate_rules(0),
            )?,
            calculus: Presentation::new(AlgebraId::Calculus, calculus_table(), calculus_rules(0))?,
            group: Presentation::new(AlgebraId::Group, group_table(), group_rules())?,
            combined: Presentation::new(AlgebraId::Combined, combined_table(), combined_rules())?,
        })
    }

    /// Builds and audits every overlap of every presentation.
    pub fn build() -> Result<Algebras, BuildError> {
        let algebras = Self::build_unaudited()?;
        for p in algebras.all() {
            let failures = p.failed_overlaps()?;
            if !failures.is_empty() {
                return Err(BuildError::NotConfluent {
                    algebra: p.id,
                    failures,
                });
            }
        }
        Ok(algebras)
    }

    /// Builds with one rule of one presentation damaged, then audits. The
    /// audit error is part of the expected behavior: a corruption may already
    /// be visible as a confluence failure.
    pub fn build_corrupted(algebra: AlgebraId, rule_id: &str) -> Result<Algebras, BuildError> {
        let mut algebras = Self::build_unaudited()?;
        let slot = match algebra {
            AlgebraId::Superspace => &mut algebras.superspace,
            AlgebraId::Calculus => &mut algebras.calculus,
            AlgebraId::Group => &mut algebras.group,
            AlgebraId::Combined => &mut algebras.combined,
        };
        *slot = slot.with_corrupted_rule(rule_id)?;
        for p in algebras.all() {
            let failures = p.failed_overlaps()?;
            if !failures.is_empty() {
                return Err(BuildError::NotConfluent {
                    algebra: p.id,
                    failures,
                });
            }
        }
        Ok(algebras)
    }

    pub fn all(&self) -> [&Presentation; 4] {
        [&self.superspace, &self.calculus, &self.group, &self.combined]
    }

    pub fn get(&self, id: AlgebraId) -> &Presentation {
        match id {
            AlgebraId::Superspace => &self.superspace,
            AlgebraId::Calculus => &self.calculus,
            AlgebraId::Group => &self.group,
            AlgebraId::Combined => &self.combined,
        }
    }
}

// ---------------------------------------------------------------------------
// Derived group elements and the coaction.

fn word(p: &Presentation, letters: &[u8], coeff: Poly) -> Element {
    Element::with_term(p.id, letters.to_vec(), coeff)
}

/// gamma = alpha*c - delta*a - h*delta*c, already in normal form.
pub fn gamma_elem(p: &Presentation) -> Element {
    use grp::*;
    word(p, &[ALPHA, C], hk(0, 1, 1))
        .add(&word(p, &[DELTA, A], hk(0, -1, 1)))
        .unwrap()
        .add(&word(p, &[DELTA, C], hk(1, -1, 1)))
        .unwrap()
}

/// beta = alpha*d - delta*b - h*delta*d - (h/2)*gamma, expanded and normal.
pub fn beta_elem(p: &Presentation) -> Element {
    use grp::*;
    word(p, &[ALPHA, D], hk(0, 1, 1))
        .add(&word(p, &[DELTA, B], hk(0, -1, 1)))
        .unwrap()
        .add(&word(p, &[DELTA, D], hk(1, -1, 1)))
        .unwrap()
        .add(&gamma_elem(p).scale(&hk(1, -1, 2)))
        .unwrap()
}

/// e = 1 + alpha*delta - (h/2)*a*c.
pub fn e_elem(p: &Presentation) -> Element {
    use grp::*;
    word(p, &[], hk(0, 1, 1))
        .add(&word(p, &[ALPHA, DELTA], hk(0, 1, 1)))
        .unwrap()
        .add(&word(p, &[A, C], hk(1, -1, 2)))
        .unwrap()
}

/// The supergroup matrix T with the eliminated entries expanded.
pub fn t_matrix(p: &Presentation) -> [[Element; 3]; 3] {
    use grp::*;
    let g = |r: u8| Element::generator(p.id, r);
    [
        [g(A), g(ALPHA), g(B)],
        [gamma_elem(p), e_elem(p), beta_elem(p)],
        [g(C), g(DELTA), g(D)],
    ]
}

/// Index parity of the T-convention: the middle index is odd.
pub fn idx_parity(i: usize) -> u8 {
    if i == 1 {
        1
    } else {
        0
    }
}

/// The invariant-form matrix J as numeric 3x3 data.
pub fn j_matrix() -> [[Poly; 3]; 3] {
    [
        [hk(0, 0, 1), hk(0, 0, 1), hk(0, 1, 1)],
        [hk(0, 0, 1), hk(0, 1, 1), hk(0, 0, 1)],
        [hk(0, -1, 1), hk(0, 0, 1), hk(1, -1, 2)],
    ]
}

/// The inverse of J, exact.
pub fn j_inv_matrix() -> [[Poly; 3]; 3] {
    [
        [hk(1, -1, 2), hk(0, 0, 1), hk(0, -1, 1)],
        [hk(0, 0, 1), hk(0, 1, 1), hk(0, 0, 1)],
        [hk(0, 1, 1), hk(0, 0, 1), hk(0, 0, 1)],
    ]
}

/// tau = J T J^{-1}, the inverse supertranspose, computed exactly.
pub fn tau_matrix(p: &Presentation) -> Result<[[Element; 3]; 3], AlgebraError> {
    let t = t_matrix(p);
    let j = j_matrix();
    let jinv = j_inv_matrix();
    let mut out: [[Element; 3]; 3] =
        std::array::from_fn(|_| std::array::from_fn(|_| Element::zero(p.id)));
    for i in 0..3 {
        for jj in 0..3 {
            let mut acc = Element::zero(p.id);
            for k in 0..3 {
                for l in 0..3 {
                    let scale = j[i][k].mul(&jinv[l][jj]);
                    acc = acc.add(&t[k][l].scale(&scale))?;
                }
            }
            out[i][jj] = p.normalize(&acc)?;
        }
    }
    Ok(out)
}

/// The left coaction on the calculus generators, with images in the combined
/// algebra: coordinates transform by T, one-forms by sign-twisted T, and
/// derivatives by sign-twisted tau.
pub struct Coaction {
    /// Image of each calculus generator, indexed by calculus rank.
    pub images: Vec<Element>,
}

impl Coaction {
    pub fn new(algebras: &Algebras) -> Result<Coaction, AlgebraError> {
        let p = &algebras.combined;
        let t = t_matrix(p);
        let tau = tau_matrix(p)?;
        let mut images = vec![Element::zero(p.id); 9];
        for i in 0..3 {
            let mut coord = Element::zero(p.id);
            let mut form = Element::zero(p.id);
            let mut der = Element::zero(p.id);
            for j in 0..3 {
                let sign = hk(0, if (idx_parity(i) + idx_parity(j)) % 2 == 1 { -1 } else { 1 }, 1);
                let coord_let = Element::generator(p.id, CAL_SHIFT + cal::THETA1 + j as u8);
                let form_let = Element::generator(p.id, CAL_SHIFT + cal::XI1 + j as u8);
                let der_let = Element::generator(p.id, CAL_SHIFT + cal::D1 + j as u8);
                coord = coord.add(&p.multiply(&t[i][j], &coord_let)?)?;
                form = form.add(&p.multiply(&t[i][j], &form_let)?.scale(&sign))?;
                der = der.add(&p.multiply(&tau[i][j], &der_let)?.scale(&sign))?;
            }
            images[(cal::THETA1 + i as u8) as usize] = coord;
            images[(cal::XI1 + i as u8) as usize] = form;
            images[(cal::D1 + i as u8) as usize] = der;
        }
        Ok(Coaction { images })
    }

    /// Extends the generator images multiplicatively to a calculus element.
    pub fn apply(
        &self,
        combined: &Presentation,
        e: &Element,
    ) -> Result<Element, AlgebraError> {
        debug_assert_eq!(e.algebra, AlgebraId::Calculus);
        let mut out = Element::zero(combined.id);
        for (w, c) in &e.terms {
            let mut prod = Element::scalar(combined.id, c.clone());
            for &g in w {
                prod = combined.multiply(&prod, &self.images[g as usize])?;
            }
            out = out.add(&prod)?;
        }
        Ok(out)
    }
}

/// Sets every group letter to its counit value (a, d -> 1; the rest -> 0) and
/// returns the surviving calculus element.
pub fn counit_collapse(e: &Element) -> Element {
    debug_assert_eq!(e.algebra, AlgebraId::Combined);
    let mut out = Element::zero(AlgebraId::Calculus);
    'term: for (w, c) in &e.terms {
        let mut word: Word = Vec::with_capacity(w.len());
        for &g in w {
            if g >= CAL_SHIFT {
                word.push(g - CAL_SHIFT);
            } else if g == grp::A || g == grp::D {
                // counit 1: the letter disappears from the word.
            } else {
                continue 'term;
            }
        }
        let add = Element::with_term(AlgebraId::Calculus, word, c.clone());
        out = out.add(&add).expect("same algebra");
    }
    out
}

// ---------------------------------------------------------------------------
// Theorem checks: identities that must normalize to zero.

/// One identity with its residual; zero residual means the theorem holds.
pub struct TheoremCheck {
    pub id: String,
    pub anchor: String,
    pub residual: Element,
}

fn comm(p: &Presentation, x: &Element, y: &Element) -> Result<Element, AlgebraError> {
    p.multiply(x, y)?.sub(&p.multiply(y, x)?)
}

fn anti(p: &Presentation, x: &Element, y: &Element) -> Result<Element, AlgebraError> {
    p.multiply(x, y)?.add(&p.multiply(y, x)?)
}

/// The 23 supplementary commutation relations for e, beta, gamma, checked
/// after eliminating them, plus the central identities.
pub fn group_theorems(p: &Presentation) -> Result<Vec<TheoremCheck>, AlgebraError> {
    use grp::*;
    let g = |r: u8| Element::generator(p.id, r);
    let (a, b, c, d) = (g(A), g(B), g(C), g(D));
    let (al, de) = (g(ALPHA), g(DELTA));
    let e = e_elem(p);
    let be = beta_elem(p);
    let ga = gamma_elem(p);
    let mul = |x: &Element, y: &Element| p.multiply(x, y);
    let mut checks: Vec<(String, String, Element)> = Vec::new();
    let mut push = |id: &str, anchor: &str, lhs: Element, rhs: Element| {
        checks.push((id.to_string(), anchor.to_string(), lhs.sub(&rhs).unwrap()));
    };

    // Central identities.
    push(
        "center/quantum-determinant",
        "a*d - b*c + alpha*delta + (h/2)*a*c = 1",
        mul(&a, &d)?
            .sub(&mul(&b, &c)?)?
            .add(&mul(&al, &de)?)?
            .add(&mul(&a, &c)?.scale(&hk(1, 1, 2)))?,
        Element::one(p.id),
    );
    let x_inv = Element::one(p.id)
        .sub(&mul(&al, &de)?)?
        .add(&mul(&a, &c)?.scale(&hk(1, 1, 2)))?;
    let rhs_inv = Element::one(p.id).sub(&mul(&c, &c)?.scale(&hk(2, 1, 4)))?;
    push(
        "center/e-inverse-left",
        "e*(1 - alpha*delta + (h/2)*a*c) = 1 - (h^2/4)*c^2",
        mul(&e, &x_inv)?,
        rhs_inv.clone(),
    );
    push(
        "center/e-inverse-right",
        "(1 - alpha*delta + (h/2)*a*c)*e = 1 - (h^2/4)*c^2",
        mul(&x_inv, &e)?,
        rhs_inv,
    );
    push(
        "center/odd-bilinear",
        "alpha*delta + beta*gamma = (h/2)*(a*c - d*c)",
        mul(&al, &de)?.add(&mul(&be, &ga)?)?,
        mul(&a, &c)?.sub(&mul(&d, &c)?)?.scale(&hk(1, 1, 2)),
    );

    // Supplementary commutation relations.
    push(
        "add/a-e",
        "[a,e] = h*gamma*delta",
        comm(p, &a, &e)?,
        mul(&ga, &de)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/b-e",
        "[b,e] = h*(beta*delta + gamma*alpha)",
        comm(p, &b, &e)?,
        mul(&be, &de)?.add(&mul(&ga, &al)?)?.scale(&hk(1, 1, 1)),
    );
    push("add/c-e", "[c,e] = 0", comm(p, &c, &e)?, Element::zero(p.id));
    push(
        "add/d-e",
        "[d,e] = h*gamma*delta",
        comm(p, &d, &e)?,
        mul(&ga, &de)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/e-alpha",
        "[e,alpha] = h*(e*delta + gamma*a)",
        comm(p, &e, &al)?,
        mul(&e, &de)?.add(&mul(&ga, &a)?)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/e-beta",
        "[e,beta] = h*(d*delta + gamma*e)",
        comm(p, &e, &be)?,
        mul(&d, &de)?.add(&mul(&ga, &e)?)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/e-gamma",
        "[e,gamma] = h*c*delta",
        comm(p, &e, &ga)?,
        mul(&c, &de)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/e-delta",
        "[e,delta] = h*c*gamma",
        comm(p, &e, &de)?,
        mul(&c, &ga)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/a-beta",
        "[a,beta] = h*(gamma*d - gamma*a)",
        comm(p, &a, &be)?,
        mul(&ga, &d)?.sub(&mul(&ga, &a)?)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/b-beta",
        "[b,beta] = h*beta*d",
        comm(p, &b, &be)?,
        mul(&be, &d)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/c-beta",
        "[c,beta] = -h*c*gamma",
        comm(p, &c, &be)?,
        mul(&c, &ga)?.scale(&hk(1, -1, 1)),
    );
    push(
        "add/d-beta",
        "[d,beta] = 0",
        comm(p, &d, &be)?,
        Element::zero(p.id),
    );
    push(
        "add/alpha-beta",
        "{alpha,beta} = h*(e*a - e*d)",
        anti(p, &al, &be)?,
        mul(&e, &a)?.sub(&mul(&e, &d)?)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/beta-gamma",
        "{beta,gamma} = -h*(d*c + gamma^2)",
        anti(p, &be, &ga)?,
        mul(&d, &c)?.add(&mul(&ga, &ga)?)?.scale(&hk(1, -1, 1)),
    );
    push(
        "add/beta-delta",
        "{beta,delta} = h*c*e",
        anti(p, &be, &de)?,
        mul(&c, &e)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/a-gamma",
        "[a,gamma] = h*gamma*c",
        comm(p, &a, &ga)?,
        mul(&ga, &c)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/b-gamma",
        "[b,gamma] = h*(beta*c + gamma*a)",
        comm(p, &b, &ga)?,
        mul(&be, &c)?.add(&mul(&ga, &a)?)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/c-gamma",
        "[c,gamma] = 0",
        comm(p, &c, &ga)?,
        Element::zero(p.id),
    );
    push(
        "add/d-gamma",
        "[d,gamma] = h*c*gamma",
        comm(p, &d, &ga)?,
        mul(&c, &ga)?.scale(&hk(1, 1, 1)),
    );
    push(
        "add/alpha-gamma",
        "{alpha,gamma} = -h*c*e",
        anti(p, &al, &ga)?,
        mul(&c, &e)?.scale(&hk(1, -1, 1)),
    );
    push(
        "add/gamma-delta",
        "{gamma,delta} = 0",
        anti(p, &ga, &de)?,
        Element::zero(p.id),
    );
    push(
        "add/beta-sq",
        "beta^2 = (h/2)*(1 - d^2)",
        mul(&be, &be)?,
        Element::one(p.id).sub(&mul(&d, &d)?)?.scale(&hk(1, 1, 2)),
    );
    push(
        "add/gamma-sq",
        "gamma^2 = -(h/2)*c^2",
        mul(&ga, &ga)?,
        mul(&c, &c)?.scale(&hk(1, -1, 2)),
    );

    Ok(checks
        .into_iter()
        .map(|(id, anchor, residual)| TheoremCheck {
            id: format!("group/{id}"),
            anchor,
            residual,
        })
        .collect())
}

/// Every defining relation re-checked in bracket form ([x,y] or {x,y} versus
/// its right side). These exercise each rule through products rather than
/// through direct rewriting, so a mistranscribed rule cannot pass.
pub fn relation_checks(p: &Presentation) -> Result<Vec<TheoremCheck>, AlgebraError> {
    let mut out = Vec::new();
    for r in &p.rules {
        let [l0, l1] = r.lhs;
        let lhs_word = Element::with_term(p.id, vec![l0, l1], Poly::one());
        let mut rhs = Element::zero(p.id);
        for (w, c) in &r.rhs {
            rhs = rhs.add(&Element::with_term(p.id, w.clone(), c.clone()))?;
        }
        let residual = p.normalize(&lhs_word.sub(&rhs)?)?;
        out.push(TheoremCheck {
            id: format!("{}/relation/{}", p.id.name(), r.id),
            anchor: format!(
                "{} = {}",
                p.format_word(&[l0, l1]),
                p.format_element(&p.normalize(&rhs).unwrap_or_else(|_| rhs.clone()))
            ),
            residual,
        });
    }
    Ok(out)
}

/// At h = 0 every rule must lose its deformation: a swap rule reduces to
/// the reversed word with only its Koszul sign, and a square of an odd
/// generator reduces to zero.
pub fn classical_limit_theorems(p: &Presentation) -> Vec<TheoremCheck> {
    let mut out = Vec::new();
    for r in &p.rules {
        let [l0, l1] = r.lhs;
        let mut rhs = Element::zero(p.id);
        for (w, c) in &r.rhs {
            rhs = rhs
                .add(&Element::with_term(p.id, w.clone(), c.clone()))
                .expect("same algebra");
        }
        let classical = rhs.substitute(&[(Symbol::H, Poly::zero())]);
        let expected = if l0 == l1 {
            Element::zero(p.id)
        } else {
            let sign = if p.table.parity(l0) == 1 && p.table.parity(l1) == 1 {
                hk(0, -1, 1)
            } else {
                hk(0, 1, 1)
            };
            Element::with_term(p.id, vec![l1, l0], sign)
        };
        out.push(TheoremCheck {
            id: format!("{}/classical/{}", p.id.name(), r.id),
            anchor: format!(
                "at h = 0: {} = graded flip",
                p.format_word(&[l0, l1])
            ),
            residual: classical.sub(&expected).expect("same algebra"),
        });
    }
    out
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_four_presentations_are_confluent() {
        let algebras = Algebras::build().expect("confluence audit");
        for p in algebras.all() {
            assert!(p.failed_overlaps().unwrap().is_empty(), "{}", p.id.name());
        }
    }

    #[test]
    fn reordering_examples() {
        let algebras = Algebras::build_unaudited().unwrap();
        let sup = &algebras.superspace;
        let xt = sup.word_of(&["x", "theta1"]).unwrap();
        assert_eq!(sup.format_element(&xt), "h*x*theta2 + theta1*x");
        let grp = &algebras.group;
        let ba = grp.word_of(&["b", "a"]).unwrap();
        assert_eq!(grp.format_element(&ba), "a*b + h*a*a - h");
        let aa = grp.word_of(&["alpha", "alpha"]).unwrap();
        assert_eq!(grp.format_element(&aa), "(1/2)*h*a*a - (1/2)*h");
    }

    #[test]
    fn quantum_determinant_is_a_theorem() {
        let algebras = Algebras::build_unaudited().unwrap();
        let checks = group_theorems(&algebras.group).unwrap();
        let det = checks
            .iter()
            .find(|c| c.id == "group/center/quantum-determinant")
            .unwrap();
        assert!(det.residual.is_zero());
    }

    #[test]
    fn central_and_supplementary_theorems_hold() {
        let algebras = Algebras::build_unaudited().unwrap();
        for check in group_theorems(&algebras.group).unwrap() {
            assert!(
                check.residual.is_zero(),
                "{}: residual {}",
                check.id,
                algebras.group.format_element(&check.residual)
            );
        }
    }

    #[test]
    fn defining_relations_hold_in_bracket_form() {
        let algebras = Algebras::build_unaudited().unwrap();
        for p in algebras.all() {
            for check in relation_checks(p).unwrap() {
                assert!(
                    check.residual.is_zero(),
                    "{}: residual {}",
                    check.id,
                    p.format_element(&check.residual)
                );
            }
        }
    }

    #[test]
    fn classical_limit_is_graded_commutative() {
        // At h = 0 every pair graded-commutes, except a derivative against
        // its own coordinate, which leaves the Leibniz delta term 1.
        use crate::coeff::Symbol;
        let delta_pairs = [("d1", "theta1"), ("dx", "x"), ("d2", "theta2")];
        let algebras = Algebras::build_unaudited().unwrap();
        for p in algebras.all() {
            let n = p.table.len() as u8;
            for i in 0..n {
                for j in 0..n {
                    let xy = p
                        .multiply(&Element::generator(p.id, i), &Element::generator(p.id, j))
                        .unwrap();
                    let sign = if p.table.parity(i) == 1 && p.table.parity(j) == 1 {
                        hk(0, -1, 1)
                    } else {
                        hk(0, 1, 1)
                    };
                    let yx = p
                        .multiply(&Element::generator(p.id, j), &Element::generator(p.id, i))
                        .unwrap()
                        .scale(&sign);
                    let (ni, nj) = (p.table.name(i), p.table.name(j));
                    // d*X order leaves +1; X*d order leaves -(Koszul sign).
                    let expect = if delta_pairs.contains(&(ni, nj)) {
                        Element::one(p.id)
                    } else if delta_pairs.contains(&(nj, ni)) {
                        Element::one(p.id).scale(&sign).neg()
                    } else {
                        Element::zero(p.id)
                    };
                    let residual = xy
                        .sub(&yx)
                        .unwrap()
                        .sub(&expect)
                        .unwrap()
                        .substitute(&[(Symbol::H, Poly::zero())]);
                    assert!(
                        residual.is_zero(),
                        "{}: {} vs {}",
                        p.id.name(),
                        ni,
                        nj
                    );
                }
            }
        }
    }

    #[test]
    fn tau_is_the_inverse_supertranspose() {
        // tau * T^st = T^st * tau = 1 with (T^st)^i_j = (-1)^{i(i+j)} t^j_i.
        let algebras = Algebras::build_unaudited().unwrap();
        let p = &algebras.group;
        let t = t_matrix(p);
        let tau = tau_matrix(p).unwrap();
        let st: [[Element; 3]; 3] = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let sign = idx_parity(i) * (idx_parity(i) + idx_parity(j)) % 2;
                let e = t[j][i].clone();
                if sign == 1 {
                    e.neg()
                } else {
                    e
                }
            })
        });
        for i in 0..3 {
            for j in 0..3 {
                let mut left = Element::zero(p.id);
                let mut right = Element::zero(p.id);
                for k in 0..3 {
                    left = left.add(&p.multiply(&tau[i][k], &st[k][j]).unwrap()).unwrap();
                    right = right.add(&p.multiply(&st[i][k], &tau[k][j]).unwrap()).unwrap();
                }
                let id = if i == j {
                    Element::one(p.id)
                } else {
                    Element::zero(p.id)
                };
                assert_eq!(p.normalize(&left).unwrap(), id, "tau*T^st at ({i},{j})");
                assert_eq!(p.normalize(&right).unwrap(), id, "T^st*tau at ({i},{j})");
            }
        }
    }

    #[test]
    fn coaction_images_and_counit() {
        let algebras = Algebras::build_unaudited().unwrap();
        let coact = Coaction::new(&algebras).unwrap();
        let cmb = &algebras.combined;
        // theta1 -> a (x) theta1 + alpha (x) x + b (x) theta2.
        let img = &coact.images[cal::THETA1 as usize];
        assert_eq!(cmb.format_element(img), "b*theta2 + a*theta1 + alpha*x");
        // The counit collapses every image back to its generator.
        for (g, img) in coact.images.iter().enumerate() {
            let back = counit_collapse(img);
            let expect = Element::generator(AlgebraId::Calculus, g as u8);
            assert_eq!(back, expect, "counit on generator {g}");
        }
    }

    #[test]
    fn corrupted_determinant_rule_breaks_a_theorem() {
        let algebras = Algebras::build_unaudited().unwrap();
        let bad = algebras.group.with_corrupted_rule("det").unwrap();
        let checks = group_theorems(&bad).unwrap();
        assert!(checks.iter().any(|c| !c.residual.is_zero()));
    }
}
