//! Exact structure matrices of the calculus and the supergroup.
//!
//! The deformation matrix B drives every exchange relation of the calculus;
//! R is its sign-twisted inverse; the permuted matrix built from R squares to
//! one and satisfies the braid relation; sigma (the generalized permutation
//! used by the geometry) is built from B instead and additionally respects
//! the wedge. J is the invariant form, with J^{-1} the metric. Everything is
//! exact arithmetic; inverses come from elimination with constant pivots.

use crate::algebra::{AlgebraError, Element, Presentation};
use crate::check::Check;
use crate::coeff::{rat, Poly, Symbol};
use crate::presentations::{
    beta_elem, e_elem, gamma_elem, idx_parity, j_inv_matrix, j_matrix, sup, t_matrix, tau_matrix,
    Algebras,
};

/// Coordinate parities (theta1, x, theta2).
pub const XHAT: [u8; 3] = [1, 0, 1];
/// Index parities of the matrix convention; also the one-form parities.
pub const IHAT: [u8; 3] = [0, 1, 0];

/// Pair index (i, j) -> 3i + j on the tensor-square basis.
pub fn pidx(i: usize, j: usize) -> usize {
    3 * i + j
}

/// Triple index (i, j, k) -> 9i + 3j + k on the tensor-cube basis.
pub fn tidx(i: usize, j: usize, k: usize) -> usize {
    9 * i + 3 * j + k
}

fn hp(k: u32, n: i64, d: i64) -> Poly {
    Poly::constant(rat(n, d)).mul(&Poly::h().pow(k))
}

// ---------------------------------------------------------------------------
// Square matrices over the coefficient ring.

#[derive(Clone, PartialEq)]
pub struct SqMat {
    pub n: usize,
    data: Vec<Poly>,
}

impl SqMat {
    pub fn zero(n: usize) -> SqMat {
        SqMat {
            n,
            data: vec![Poly::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> SqMat {
        let mut m = SqMat::zero(n);
        for i in 0..n {
            m.set(i, i, Poly::one());
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &Poly {
        &self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Poly) {
        self.data[r * self.n + c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Poly) {
        let cur = self.get(r, c).add(v);
        self.set(r, c, cur);
    }

    pub fn mul(&self, other: &SqMat) -> SqMat {
        assert_eq!(self.n, other.n);
        let mut out = SqMat::zero(self.n);
        for r in 0..self.n {
            for k in 0..self.n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..self.n {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.add_to(r, c, &a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &SqMat) -> SqMat {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for r in 0..self.n {
            for c in 0..self.n {
                out.set(r, c, self.get(r, c).sub(other.get(r, c)));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    pub fn first_nonzero(&self) -> Option<(usize, usize, &Poly)> {
        for r in 0..self.n {
            for c in 0..self.n {
                if !self.get(r, c).is_zero() {
                    return Some((r, c, self.get(r, c)));
                }
            }
        }
        None
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> SqMat {
        SqMat {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Substitutes h -> -h in every entry.
    pub fn flip_h(&self) -> SqMat {
        let neg_h = Poly::h().neg();
        self.map(|p| p.substitute(&[(Symbol::H, neg_h.clone())]))
    }

    /// Substitutes h -> 0 in every entry.
    pub fn at_h_zero(&self) -> SqMat {
        self.map(|p| p.substitute(&[(Symbol::H, Poly::zero())]))
    }

    /// Exact inverse by elimination. Pivots must be nonzero constants at
    /// every step (true for all matrices in this module); returns None when
    /// no constant pivot exists, which includes the singular case.
    pub fn inverse(&self) -> Option<SqMat> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = SqMat::identity(n);
        for col in 0..n {
            let pivot_row = (col..n).find(|&r| {
                a.get(r, col)
                    .as_constant()
                    .map(|c| !c.eq(&rat(0, 1)))
                    .unwrap_or(false)
            })?;
            if pivot_row != col {
                for c in 0..n {
                    a.data.swap(pivot_row * n + c, col * n + c);
                    inv.data.swap(pivot_row * n + c, col * n + c);
                }
            }
            let pivot = a.get(col, col).as_constant().unwrap();
            let inv_pivot = rat(1, 1) / pivot;
            for c in 0..n {
                a.set(col, c, a.get(col, c).scale(&inv_pivot));
                inv.set(col, c, inv.get(col, c).scale(&inv_pivot));
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for c in 0..n {
                    let na = a.get(r, c).sub(&factor.mul(a.get(col, c)));
                    a.set(r, c, na);
                    let ni = inv.get(r, c).sub(&factor.mul(inv.get(col, c)));
                    inv.set(r, c, ni);
                }
            }
        }
        Some(inv)
    }

    /// Determinant by Laplace expansion; intended for small n.
    pub fn det(&self) -> Poly {
        let n = self.n;
        if n == 1 {
            return self.get(0, 0).clone();
        }
        let mut acc = Poly::zero();
        for c in 0..n {
            let entry = self.get(0, c);
            if entry.is_zero() {
                continue;
            }
            let mut minor = SqMat::zero(n - 1);
            for r in 1..n {
                let mut cc = 0;
                for c2 in 0..n {
                    if c2 == c {
                        continue;
                    }
                    minor.set(r - 1, cc, self.get(r, c2).clone());
                    cc += 1;
                }
            }
            let mut term = entry.mul(&minor.det());
            if c % 2 == 1 {
                term = term.neg();
            }
            acc = acc.add(&term);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// The structure matrices, rows indexed by the target pair and columns by the
// source pair of the exchange relation they encode.

fn from_entries(entries: &[(usize, usize, usize, usize, Poly)]) -> SqMat {
    let mut m = SqMat::zero(9);
    for (k, l, x, y, v) in entries {
        m.set(pidx(*k, *l), pidx(*x, *y), v.clone());
    }
    m
}

pub fn r_matrix() -> SqMat {
    from_entries(&[
        (0, 0, 0, 0, hp(0, 1, 1)),
        (0, 0, 0, 2, hp(1, -1, 1)),
        (0, 0, 1, 1, hp(1, 1, 1)),
        (0, 0, 2, 0, hp(1, 1, 1)),
        (0, 0, 2, 2, hp(2, 1, 2)),
        (0, 1, 0, 1, hp(0, 1, 1)),
        (0, 1, 1, 2, hp(1, -1, 1)),
        (0, 2, 0, 2, hp(0, 1, 1)),
        (0, 2, 2, 2, hp(1, -1, 1)),
        (1, 0, 1, 0, hp(0, 1, 1)),
        (1, 0, 2, 1, hp(1, 1, 1)),
        (1, 1, 1, 1, hp(0, 1, 1)),
        (1, 1, 2, 2, hp(1, -1, 1)),
        (1, 2, 1, 2, hp(0, 1, 1)),
        (2, 0, 2, 0, hp(0, 1, 1)),
        (2, 0, 2, 2, hp(1, 1, 1)),
        (2, 1, 2, 1, hp(0, 1, 1)),
        (2, 2, 2, 2, hp(0, 1, 1)),
    ])
}

pub fn b_matrix() -> SqMat {
    from_entries(&[
        (0, 0, 0, 0, hp(0, -1, 1)),
        (0, 0, 0, 2, hp(1, -1, 1)),
        (0, 0, 1, 1, hp(1, -1, 1)),
        (0, 0, 2, 0, hp(1, 1, 1)),
        (0, 0, 2, 2, hp(2, -1, 2)),
        (0, 1, 0, 1, hp(0, 1, 1)),
        (0, 1, 1, 2, hp(1, -1, 1)),
        (0, 2, 0, 2, hp(0, -1, 1)),
        (0, 2, 2, 2, hp(1, -1, 1)),
        (1, 0, 1, 0, hp(0, 1, 1)),
        (1, 0, 2, 1, hp(1, 1, 1)),
        (1, 1, 1, 1, hp(0, 1, 1)),
        (1, 1, 2, 2, hp(1, -1, 1)),
        (1, 2, 1, 2, hp(0, 1, 1)),
        (2, 0, 2, 0, hp(0, -1, 1)),
        (2, 0, 2, 2, hp(1, 1, 1)),
        (2, 1, 2, 1, hp(0, 1, 1)),
        (2, 2, 2, 2, hp(0, -1, 1)),
    ])
}

/// The sign-rule inverse of B: entrywise (-1)^{Xk*Xl + Xx*Xy} B(-h).
pub fn b_inverse_signed() -> SqMat {
    let b_neg = b_matrix().flip_h();
    let mut m = SqMat::zero(9);
    for k in 0..3 {
        for l in 0..3 {
            for x in 0..3 {
                for y in 0..3 {
                    let s = (XHAT[k] * XHAT[l] + XHAT[x] * XHAT[y]) % 2;
                    let mut e = b_neg.get(pidx(k, l), pidx(x, y)).clone();
                    if s == 1 {
                        e = e.neg();
                    }
                    m.set(pidx(k, l), pidx(x, y), e);
                }
            }
        }
    }
    m
}

/// The permuted matrix: entry (kl),(ij) is (-1)^{i^ j^} R^{lk}_{ij}, hats
/// being the index parities. Squares to one and satisfies the braid relation.
pub fn permuted_r_matrix() -> SqMat {
    let r = r_matrix();
    let mut m = SqMat::zero(9);
    for k in 0..3 {
        for l in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut e = r.get(pidx(l, k), pidx(i, j)).clone();
                    if (IHAT[i] * IHAT[j]) % 2 == 1 {
                        e = e.neg();
                    }
                    m.set(pidx(k, l), pidx(i, j), e);
                }
            }
        }
    }
    m
}

/// The generalized permutation on one-forms, read off the wedge exchange:
/// sigma maps the source pair (i, j) to the target pair (a, b) with
/// coefficient (-1)^{X^i-hat + a-hat} B^{ij}_{ba}. It squares to one,
/// satisfies the braid relation, and is wedge-compatible.
pub fn sigma_matrix() -> SqMat {
    let b = b_matrix();
    let mut m = SqMat::zero(9);
    for i in 0..3 {
        for j in 0..3 {
            for a in 0..3 {
                for bb in 0..3 {
                    let mut e = b.get(pidx(i, j), pidx(bb, a)).clone();
                    if (XHAT[i] + IHAT[a]) % 2 == 1 {
                        e = e.neg();
                    }
                    m.set(pidx(a, bb), pidx(i, j), e);
                }
            }
        }
    }
    m
}

/// Koszul sign diagonal: the classical limit of B.
fn koszul_diagonal() -> SqMat {
    let mut m = SqMat::zero(9);
    for k in 0..3 {
        for l in 0..3 {
            let v = if (XHAT[k] * XHAT[l]) % 2 == 1 {
                hp(0, -1, 1)
            } else {
                hp(0, 1, 1)
            };
            m.set(pidx(k, l), pidx(k, l), v);
        }
    }
    m
}

/// Embeds a 9x9 matrix into slots 1,2 of the tensor cube.
pub fn emb12(m: &SqMat) -> SqMat {
    let mut out = SqMat::zero(27);
    for i in 0..3 {
        for j in 0..3 {
            for u in 0..3 {
                for v in 0..3 {
                    let e = m.get(pidx(i, j), pidx(u, v));
                    if e.is_zero() {
                        continue;
                    }
                    for k in 0..3 {
                        out.add_to(tidx(i, j, k), tidx(u, v, k), e);
                    }
                }
            }
        }
    }
    out
}

/// Embeds a 9x9 matrix into slots 2,3 of the tensor cube.
pub fn emb23(m: &SqMat) -> SqMat {
    let mut out = SqMat::zero(27);
    for j in 0..3 {
        for k in 0..3 {
            for v in 0..3 {
                for w in 0..3 {
                    let e = m.get(pidx(j, k), pidx(v, w));
                    if e.is_zero() {
                        continue;
                    }
                    for i in 0..3 {
                        out.add_to(tidx(i, j, k), tidx(i, v, w), e);
                    }
                }
            }
        }
    }
    out
}

/// Embeds a 9x9 matrix into slots 1,3 of the tensor cube (plain, no signs;
/// correct here because the matrices involved preserve parity).
pub fn emb13(m: &SqMat) -> SqMat {
    let mut out = SqMat::zero(27);
    for i in 0..3 {
        for k in 0..3 {
            for u in 0..3 {
                for w in 0..3 {
                    let e = m.get(pidx(i, k), pidx(u, w));
                    if e.is_zero() {
                        continue;
                    }
                    for j in 0..3 {
                        out.add_to(tidx(i, j, k), tidx(u, j, w), e);
                    }
                }
            }
        }
    }
    out
}

pub fn j_sqmat() -> SqMat {
    let j = j_matrix();
    let mut m = SqMat::zero(3);
    for r in 0..3 {
        for c in 0..3 {
            m.set(r, c, j[r][c].clone());
        }
    }
    m
}

pub fn j_inv_sqmat() -> SqMat {
    let j = j_inv_matrix();
    let mut m = SqMat::zero(3);
    for r in 0..3 {
        for c in 0..3 {
            m.set(r, c, j[r][c].clone());
        }
    }
    m
}

// ---------------------------------------------------------------------------
// 3x3 matrices over the supergroup algebra.

pub type EMat = [[Element; 3]; 3];

pub fn emat_identity(p: &Presentation) -> EMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if i == j {
                Element::one(p.id)
            } else {
                Element::zero(p.id)
            }
        })
    })
}

pub fn emat_mul(p: &Presentation, a: &EMat, b: &EMat) -> Result<EMat, AlgebraError> {
    let mut out: EMat = std::array::from_fn(|_| std::array::from_fn(|_| Element::zero(p.id)));
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = Element::zero(p.id);
            for k in 0..3 {
                acc = acc.add(&p.multiply(&a[i][k], &b[k][j])?)?;
            }
            out[i][j] = p.normalize(&acc)?;
        }
    }
    Ok(out)
}

/// Multiplies an element matrix by a numeric matrix on the right.
pub fn emat_mul_poly(p: &Presentation, a: &EMat, m: &[[Poly; 3]; 3]) -> EMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = Element::zero(p.id);
            for k in 0..3 {
                acc = acc.add(&a[i][k].scale(&m[k][j])).expect("same algebra");
            }
            acc
        })
    })
}

/// Multiplies a numeric matrix by an element matrix on the left.
pub fn poly_mul_emat(p: &Presentation, m: &[[Poly; 3]; 3], a: &EMat) -> EMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = Element::zero(p.id);
            for k in 0..3 {
                acc = acc.add(&a[k][j].scale(&m[i][k])).expect("same algebra");
            }
            acc
        })
    })
}

/// Supertranspose: entry (i, j) is (-1)^{i^ (i^ + j^)} times entry (j, i).
pub fn supertranspose(m: &EMat) -> EMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let s = (idx_parity(i) * ((idx_parity(i) + idx_parity(j)) % 2)) % 2;
            if s == 1 {
                m[j][i].neg()
            } else {
                m[j][i].clone()
            }
        })
    })
}

/// Parity conjugation: entry (i, j) scaled by (-1)^{i^ + j^}.
pub fn parity_conjugate(m: &EMat) -> EMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if (idx_parity(i) + idx_parity(j)) % 2 == 1 {
                m[i][j].neg()
            } else {
                m[i][j].clone()
            }
        })
    })
}

/// The antipode matrix in closed form.
pub fn s_matrix(p: &Presentation) -> EMat {
    use crate::presentations::grp::*;
    let g = |r: u8| Element::generator(p.id, r);
    let (a, b, c, d) = (g(A), g(B), g(C), g(D));
    let (al, de) = (g(ALPHA), g(DELTA));
    let e = e_elem(p);
    let be = beta_elem(p);
    let ga = gamma_elem(p);
    let half_h = hp(1, 1, 2);
    let s11 = d.add(&c.scale(&half_h)).unwrap();
    let s12 = be.neg().add(&ga.scale(&half_h).neg()).unwrap();
    let s13 = b
        .neg()
        .add(&a.sub(&d).unwrap().scale(&half_h).neg())
        .unwrap()
        .add(&c.scale(&hp(2, 1, 4)))
        .unwrap();
    let s21 = de.clone();
    let s22 = e;
    let s23 = al.neg().add(&de.scale(&half_h)).unwrap();
    let s31 = c.neg();
    let s32 = ga;
    let s33 = a.sub(&c.scale(&half_h)).unwrap();
    [[s11, s12, s13], [s21, s22, s23], [s31, s32, s33]]
}

// ---------------------------------------------------------------------------
// Checks.

fn sq_check(id: &str, anchor: &str, diff: &SqMat) -> Check {
    match diff.first_nonzero() {
        None => Check::new(id, anchor, true, "0"),
        Some((r, c, p)) => Check::new(id, anchor, false, format!("entry ({r},{c}): {p}")),
    }
}

fn emat_check(
    p: &Presentation,
    id: &str,
    anchor: &str,
    lhs: &EMat,
    rhs: &EMat,
) -> Result<Check, AlgebraError> {
    for i in 0..3 {
        for j in 0..3 {
            let diff = p.normalize(&lhs[i][j].sub(&rhs[i][j])?)?;
            if !diff.is_zero() {
                return Ok(Check::new(
                    id,
                    anchor,
                    false,
                    format!("entry ({i},{j}): {}", p.format_element(&diff)),
                ));
            }
        }
    }
    Ok(Check::new(id, anchor, true, "0"))
}

/// One of the four exchange relations between the supergroup matrices and B,
/// indexed 1 through 4, checked over all 81 index choices.
pub fn rtt_check(p: &Presentation, which: u8) -> Result<Check, AlgebraError> {
    let t = t_matrix(p);
    let tau = tau_matrix(p)?;
    let b = b_matrix();
    let binv = b_inverse_signed();
    let ih = |i: usize| IHAT[i];
    let (id, anchor): (&str, &str) = match which {
        1 => (
            "rtt-coordinates",
            "sum (-1)^{b^+j^+i^j^+b^i^} t^a_i t^b_j B^{ij}_{cd} = sum (-1)^{c^+i^+c^d^+d^i^} B^{ab}_{ij} t^j_d t^i_c",
        ),
        2 => (
            "rtt-derivatives",
            "sum (-1)^{i^+a^+i^j^+i^b^} tau^a_i tau^b_j B^{cd}_{ij} = sum (-1)^{d^+j^+d^i^+c^d^} B^{ij}_{ab} tau^j_d tau^i_c",
        ),
        3 => (
            "rtt-mixed",
            "sum (-1)^{i^+b^i^+c^i^+d^j^} tau^a_i t^b_j B^{jd}_{ci} = sum (-1)^{c^+i^+j^+i^c^} B^{bi}_{ja} t^j_c tau^i_d",
        ),
        4 => (
            "rtt-mixed-inverse",
            "sum (-1)^{c^+i^+j^+c^i^} Binv^{ib}_{aj} t^j_c tau^i_d = sum (-1)^{i^+b^i^+c^i^+j^d^} tau^a_i t^b_j Binv^{dj}_{ic}",
        ),
        _ => panic!("rtt_check index out of range"),
    };
    for a in 0..3 {
        for bb in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let mut lhs = Element::zero(p.id);
                    let mut rhs = Element::zero(p.id);
                    for i in 0..3 {
                        for j in 0..3 {
                            let (lc, ls, rc, rs): (Element, u8, Element, u8) = match which {
                                1 => (
                                    p.multiply(&t[a][i], &t[bb][j])?
                                        .scale(b.get(pidx(i, j), pidx(c, d))),
                                    ih(bb) + ih(j) + ih(i) * ih(j) + ih(bb) * ih(i),
                                    p.multiply(&t[j][d], &t[i][c])?
                                        .scale(b.get(pidx(a, bb), pidx(i, j))),
                                    ih(c) + ih(i) + ih(c) * ih(d) + ih(d) * ih(i),
                                ),
                                2 => (
                                    p.multiply(&tau[a][i], &tau[bb][j])?
                                        .scale(b.get(pidx(c, d), pidx(i, j))),
                                    ih(i) + ih(a) + ih(i) * ih(j) + ih(i) * ih(bb),
                                    p.multiply(&tau[j][d], &tau[i][c])?
                                        .scale(b.get(pidx(i, j), pidx(a, bb))),
                                    ih(d) + ih(j) + ih(d) * ih(i) + ih(c) * ih(d),
                                ),
                                3 => (
                                    p.multiply(&tau[a][i], &t[bb][j])?
                                        .scale(b.get(pidx(j, d), pidx(c, i))),
                                    ih(i) + ih(bb) * ih(i) + ih(c) * ih(i) + ih(d) * ih(j),
                                    p.multiply(&t[j][c], &tau[i][d])?
                                        .scale(b.get(pidx(bb, i), pidx(j, a))),
                                    ih(c) + ih(i) + ih(j) + ih(i) * ih(c),
                                ),
                                _ => (
                                    p.multiply(&t[j][c], &tau[i][d])?
                                        .scale(binv.get(pidx(i, bb), pidx(a, j))),
                                    ih(c) + ih(i) + ih(j) + ih(c) * ih(i),
                                    p.multiply(&tau[a][i], &t[bb][j])?
                                        .scale(binv.get(pidx(d, j), pidx(i, c))),
                                    ih(i) + ih(bb) * ih(i) + ih(c) * ih(i) + ih(j) * ih(d),
                                ),
                            };
                            lhs = lhs.add(&if ls % 2 == 1 { lc.neg() } else { lc })?;
                            rhs = rhs.add(&if rs % 2 == 1 { rc.neg() } else { rc })?;
                        }
                    }
                    let diff = p.normalize(&lhs.sub(&rhs)?)?;
                    if !diff.is_zero() {
                        return Ok(Check::new(
                            format!("matrices/{id}"),
                            anchor,
                            false,
                            format!(
                                "component ({a},{bb},{c},{d}): {}",
                                p.format_element(&diff)
                            ),
                        ));
                    }
                }
            }
        }
    }
    Ok(Check::new(format!("matrices/{id}"), anchor, true, "0"))
}

/// All structure-matrix identities, exact.
/// The defining exchange relation between the R matrix and the supergroup
/// matrix, with its grading signs, over all 81 index choices.
pub fn rtt_supergroup_check(p: &Presentation) -> Result<Check, AlgebraError> {
    let t = t_matrix(p);
    let r = r_matrix();
    let ih = |i: usize| IHAT[i];
    let id = "matrices/rtt-supergroup";
    let anchor = "sum (-1)^{y^(x^+i^)} R^{kl}_{xy} t^x_i t^y_j = sum (-1)^{y^(k^+x^)} t^l_y t^k_x R^{xy}_{ij}";
    for k in 0..3 {
        for l in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut lhs = Element::zero(p.id);
                    let mut rhs = Element::zero(p.id);
                    for x in 0..3 {
                        for y in 0..3 {
                            let rl = r.get(pidx(k, l), pidx(x, y));
                            if !rl.is_zero() {
                                let mut c = rl.clone();
                                if (ih(y) * (ih(x) + ih(i))) % 2 == 1 {
                                    c = c.neg();
                                }
                                lhs = lhs.add(&p.multiply(&t[x][i], &t[y][j])?.scale(&c))?;
                            }
                            let rr = r.get(pidx(x, y), pidx(i, j));
                            if !rr.is_zero() {
                                let mut c = rr.clone();
                                if (ih(y) * (ih(k) + ih(x))) % 2 == 1 {
                                    c = c.neg();
                                }
                                rhs = rhs.add(&p.multiply(&t[l][y], &t[k][x])?.scale(&c))?;
                            }
                        }
                    }
                    let diff = p.normalize(&lhs.sub(&rhs)?)?;
                    if !diff.is_zero() {
                        return Ok(Check::new(
                            id,
                            anchor,
                            false,
                            format!(
                                "component ({k},{l},{i},{j}): {}",
                                p.format_element(&diff)
                            ),
                        ));
                    }
                }
            }
        }
    }
    Ok(Check::new(id, anchor, true, "0"))
}

pub fn matrix_checks(algebras: &Algebras) -> Result<Vec<Check>, AlgebraError> {
    let mut out = Vec::new();
    let r = r_matrix();
    let b = b_matrix();
    let id9 = SqMat::identity(9);

    out.push(sq_check(
        "matrices/r-classical-limit",
        "R(0) = 1",
        &r.at_h_zero().sub(&id9),
    ));
    out.push(sq_check(
        "matrices/r-inverse",
        "R(h) R(-h) = 1",
        &r.mul(&r.flip_h()).sub(&id9),
    ));
    out.push(sq_check(
        "matrices/b-classical-limit",
        "B(0)^{kl}_{xy} = (-1)^{X^k-hat X^l-hat} delta^k_x delta^l_y",
        &b.at_h_zero().sub(&koszul_diagonal()),
    ));

    let binv = b.inverse().expect("B has constant pivots");
    out.push(sq_check(
        "matrices/b-inverse",
        "B Binv = Binv B = 1 (Binv by exact elimination)",
        &b.mul(&binv).sub(&id9),
    ));
    out.push(sq_check(
        "matrices/b-inverse-sign-rule",
        "Binv^{kl}_{xy} = (-1)^{X^k-hat X^l-hat + X^x-hat X^y-hat} B(-h)^{kl}_{xy}",
        &binv.sub(&b_inverse_signed()),
    ));

    let mut r_from_b = SqMat::zero(9);
    for k in 0..3 {
        for l in 0..3 {
            for x in 0..3 {
                for y in 0..3 {
                    let s = (1 + IHAT[k] + (1 + IHAT[x]) * IHAT[y]) % 2;
                    let mut e = binv.get(pidx(k, l), pidx(x, y)).clone();
                    if s == 1 {
                        e = e.neg();
                    }
                    r_from_b.set(pidx(k, l), pidx(x, y), e);
                }
            }
        }
    }
    out.push(sq_check(
        "matrices/r-from-b",
        "R^{kl}_{xy} = (-1)^{1 + k^ + (1 + x^) y^} Binv^{kl}_{xy}",
        &r.sub(&r_from_b),
    ));

    let (b12, b13, b23) = (emb12(&b), emb13(&b), emb23(&b));
    out.push(sq_check(
        "matrices/b-yang-baxter",
        "B12 B13 B23 = B23 B13 B12",
        &b12.mul(&b13).mul(&b23).sub(&b23.mul(&b13).mul(&b12)),
    ));

    let pr = permuted_r_matrix();
    out.push(sq_check(
        "matrices/permuted-r-involution",
        "Rp^2 = 1 with Rp^{kl}_{ij} = (-1)^{i^ j^} R^{lk}_{ij}",
        &pr.mul(&pr).sub(&id9),
    ));
    let (p12, p23) = (emb12(&pr), emb23(&pr));
    out.push(sq_check(
        "matrices/permuted-r-braid",
        "Rp12 Rp23 Rp12 = Rp23 Rp12 Rp23",
        &p12.mul(&p23).mul(&p12).sub(&p23.mul(&p12).mul(&p23)),
    ));

    let sg = sigma_matrix();
    out.push(sq_check(
        "matrices/sigma-involution",
        "sigma^2 = 1",
        &sg.mul(&sg).sub(&id9),
    ));
    let (s12, s23) = (emb12(&sg), emb23(&sg));
    out.push(sq_check(
        "matrices/sigma-braid",
        "sigma12 sigma23 sigma12 = sigma23 sigma12 sigma23",
        &s12.mul(&s23).mul(&s12).sub(&s23.mul(&s12).mul(&s23)),
    ));

    // J and the invariant length.
    let j = j_sqmat();
    let jinv_stored = j_inv_sqmat();
    out.push(sq_check(
        "matrices/j-determinant",
        "det J = 1",
        &{
            let mut m = SqMat::zero(1);
            m.set(0, 0, j.det().sub(&Poly::one()));
            m
        },
    ));
    out.push(sq_check(
        "matrices/j-inverse",
        "J Jinv = Jinv J = 1 and elimination reproduces Jinv",
        &{
            let mut diff = j.mul(&jinv_stored).sub(&SqMat::identity(3));
            let elim = j.inverse().expect("J has constant pivots").sub(&jinv_stored);
            for r in 0..3 {
                for c in 0..3 {
                    diff.add_to(r, c, elim.get(r, c));
                }
            }
            diff
        },
    ));

    let sup_alg = &algebras.superspace;
    let jm = j_matrix();
    let mut length = Element::zero(sup_alg.id);
    for a in 0..3 {
        for bb in 0..3 {
            if jm[a][bb].is_zero() {
                continue;
            }
            let prod = sup_alg.multiply(
                &Element::generator(sup_alg.id, a as u8),
                &Element::generator(sup_alg.id, bb as u8),
            )?;
            let mut term = prod.scale(&jm[a][bb]);
            if XHAT[a] == 1 {
                term = term.neg();
            }
            length = length.add(&term)?;
        }
    }
    let phi = Element::with_term(sup_alg.id, vec![sup::X, sup::X], Poly::one())
        .add(&Element::with_term(
            sup_alg.id,
            vec![sup::THETA1, sup::THETA2],
            hp(0, -2, 1),
        ))?;
    let length_diff = sup_alg.normalize(&length.sub(&phi)?)?;
    out.push(Check::new(
        "matrices/j-invariant-length",
        "sum_a,b (-1)^{X^a-hat} X^a J_ab X^b = x^2 - 2 theta1 theta2",
        length_diff.is_zero(),
        if length_diff.is_zero() {
            "0".to_string()
        } else {
            sup_alg.format_element(&length_diff)
        },
    ));

    // Supergroup matrix identities.
    let grp_alg = &algebras.group;
    let t = t_matrix(grp_alg);
    let tst = supertranspose(&t);
    let tau = tau_matrix(grp_alg)?;
    let s = s_matrix(grp_alg);
    let ident = emat_identity(grp_alg);
    let jm3 = j_matrix();
    let jinv3 = j_inv_matrix();

    out.push(rtt_check(grp_alg, 1)?);

    let tst_j_t = emat_mul(grp_alg, &emat_mul_poly(grp_alg, &tst, &jm3), &t)?;
    let j_as_emat: EMat = std::array::from_fn(|i| {
        std::array::from_fn(|jj| Element::scalar(grp_alg.id, jm3[i][jj].clone()))
    });
    out.push(emat_check(
        grp_alg,
        "matrices/orthosymplectic-form",
        "T^st J T = J",
        &tst_j_t,
        &j_as_emat,
    )?);

    let t_jinv_tst = emat_mul(grp_alg, &emat_mul_poly(grp_alg, &t, &jinv3), &tst)?;
    let jinv_as_emat: EMat = std::array::from_fn(|i| {
        std::array::from_fn(|jj| Element::scalar(grp_alg.id, jinv3[i][jj].clone()))
    });
    out.push(emat_check(
        grp_alg,
        "matrices/orthosymplectic-inverse-form",
        "T Jinv T^st = Jinv",
        &t_jinv_tst,
        &jinv_as_emat,
    )?);

    out.push(rtt_supergroup_check(grp_alg)?);

    out.push(emat_check(
        grp_alg,
        "matrices/antipode-left",
        "S(T) T = 1",
        &emat_mul(grp_alg, &s, &t)?,
        &ident,
    )?);
    out.push(emat_check(
        grp_alg,
        "matrices/antipode-right",
        "T S(T) = 1",
        &emat_mul(grp_alg, &t, &s)?,
        &ident,
    )?);

    let s_via_form = poly_mul_emat(grp_alg, &jinv3, &emat_mul_poly(grp_alg, &tst, &jm3));
    out.push(emat_check(
        grp_alg,
        "matrices/antipode-via-form",
        "S(T) = Jinv T^st J",
        &s_via_form,
        &s,
    )?);

    out.push(emat_check(
        grp_alg,
        "matrices/inverse-supertranspose-left",
        "tau T^st = 1",
        &emat_mul(grp_alg, &tau, &tst)?,
        &ident,
    )?);
    out.push(emat_check(
        grp_alg,
        "matrices/inverse-supertranspose-right",
        "T^st tau = 1",
        &emat_mul(grp_alg, &tst, &tau)?,
        &ident,
    )?);

    out.push(emat_check(
        grp_alg,
        "matrices/supertranspose-involution",
        "(T^st)^st = parity conjugate of T",
        &supertranspose(&tst),
        &parity_conjugate(&t),
    )?);

    // Over a noncommutative ring the supertranspose reverses products only
    // up to entry commutators, so the antihomomorphism law is exact in the
    // classical limit and h-divisible away from it.
    let ts = emat_mul(grp_alg, &t, &s)?;
    let ts_st = supertranspose(&ts);
    let sst_tst = emat_mul(grp_alg, &supertranspose(&s), &tst)?;
    let mut anti = Check::new(
        "matrices/supertranspose-antihomomorphism",
        "(T S)^st - S^st T^st = 0 at h = 0, and is divisible by h exactly",
        true,
        "0",
    );
    'anti: for i in 0..3 {
        for jj in 0..3 {
            let diff = grp_alg.normalize(&ts_st[i][jj].sub(&sst_tst[i][jj])?)?;
            let h_divisible = diff.terms.values().all(Poly::divisible_by_h);
            if !h_divisible {
                anti = Check::new(
                    anti.id.clone(),
                    anti.anchor.clone(),
                    false,
                    format!("entry ({i},{jj}): {}", grp_alg.format_element(&diff)),
                );
                break 'anti;
            }
        }
    }
    out.push(anti);

    Ok(out)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_matrix_checks_pass() {
        let algebras = Algebras::build_unaudited().unwrap();
        let checks = matrix_checks(&algebras).unwrap();
        assert!(!checks.is_empty());
        for c in &checks {
            assert!(c.pass, "{}: {}", c.id, c.residual);
        }
    }

    #[test]
    fn remaining_rtt_relations_hold() {
        let algebras = Algebras::build_unaudited().unwrap();
        for which in 2..=4 {
            let c = rtt_check(&algebras.group, which).unwrap();
            assert!(c.pass, "{}: {}", c.id, c.residual);
        }
    }

    #[test]
    fn sigma_table_spot_values() {
        let sg = sigma_matrix();
        // sigma(eta ox xi2) = xi2 ox eta, exactly.
        assert_eq!(*sg.get(pidx(2, 1), pidx(1, 2)), Poly::one());
        let mut others = 0;
        for a in 0..3 {
            for b in 0..3 {
                if (a, b) != (2, 1) && !sg.get(pidx(a, b), pidx(1, 2)).is_zero() {
                    others += 1;
                }
            }
        }
        assert_eq!(others, 0);
        // sigma(eta ox eta) = -eta ox eta - h xi2 ox xi2.
        assert_eq!(*sg.get(pidx(1, 1), pidx(1, 1)), hp(0, -1, 1));
        assert_eq!(*sg.get(pidx(2, 2), pidx(1, 1)), hp(1, -1, 1));
    }

    #[test]
    fn inverse_of_singular_matrix_is_none() {
        let mut m = SqMat::zero(2);
        m.set(0, 0, Poly::one());
        m.set(1, 0, Poly::one());
        assert!(m.inverse().is_none());
    }

    #[test]
    fn inverse_requires_constant_pivot() {
        // Invertible over the fraction field, but the pivot is h itself.
        let mut m = SqMat::zero(1);
        m.set(0, 0, Poly::h());
        assert!(m.inverse().is_none());
    }

    #[test]
    fn determinant_of_b_is_one() {
        // B is triangular with unit diagonal in the pair basis; elimination
        // confirms invertibility and the sign rule confirms the inverse, so
        // a direct determinant is only sanity here (9x9 Laplace is fine on
        // a sparse matrix).
        assert!(b_matrix().det().is_one());
    }
}
