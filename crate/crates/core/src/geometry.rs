//! The covariant derivative on the quantum superspace, its torsion and
//! curvature, and the invariant metric.
//!
//! The torsionless family is D Xi^a = c0 X^a rho ox rho
//! + c1 ((-1)^{ahat} Xi^a ox rho - rho ox Xi^a) with ahat the one-form
//! parity. D extends to coefficients by the graded Leibniz rule and to
//! higher tensors through the generalized permutation, so curvature is
//! pi12 o D o D. The metric pairs the last two slots with the inverse
//! orthosymplectic form; the connection family fails to preserve it for
//! every nontrivial parameter choice, and the checks pin down both
//! failure terms exactly.

use crate::algebra::{Element, Presentation};
use crate::check::Check;
use crate::coeff::{rat, Poly, Symbol};
use crate::forms::{FormContext, FormError, Tensor, WedgeForm, WedgeTensor, FORM_NAMES};
use crate::matrix::{b_matrix, pidx, IHAT, XHAT};
use crate::presentations::{j_inv_matrix, j_matrix, Algebras};

fn hp(k: u32, n: i64, d: i64) -> Poly {
    Poly::h().pow(k).scale(&rat(n, d))
}

/// The three parameters of the connection family; torsion freeness later
/// forces c2 = -c1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionParams {
    pub c0: Poly,
    pub c1: Poly,
    pub c2: Poly,
}

impl ConnectionParams {
    /// Keeps all three parameters as free symbols.
    pub fn symbolic() -> ConnectionParams {
        ConnectionParams {
            c0: Poly::sym(Symbol::C0),
            c1: Poly::sym(Symbol::C1),
            c2: Poly::sym(Symbol::C2),
        }
    }

    /// The torsionless cut c2 = -c1.
    pub fn torsionless(c0: Poly, c1: Poly) -> ConnectionParams {
        let c2 = c1.neg();
        ConnectionParams { c0, c1, c2 }
    }

    /// Torsionless with both remaining parameters symbolic.
    pub fn symbolic_torsionless() -> ConnectionParams {
        ConnectionParams::torsionless(Poly::sym(Symbol::C0), Poly::sym(Symbol::C1))
    }
}

impl Default for ConnectionParams {
    fn default() -> ConnectionParams {
        ConnectionParams::symbolic()
    }
}

/// Splits an element into its even and odd parts by word parity.
fn split_parity(p: &Presentation, e: &Element) -> (Element, Element) {
    let mut even = Element::zero(e.algebra);
    let mut odd = Element::zero(e.algebra);
    for (w, c) in &e.terms {
        if p.table.word_parity(w) == 0 {
            even.terms.insert(w.clone(), c.clone());
        } else {
            odd.terms.insert(w.clone(), c.clone());
        }
    }
    (even, odd)
}

/// The covariant derivative for one parameter choice, with the invariant
/// data it is built from cached.
pub struct Connection<'a, 'b> {
    pub ctx: &'b FormContext<'a>,
    pub params: ConnectionParams,
    pub rho: Tensor,
    pub varpi: Tensor,
    d_basis: Vec<Tensor>,
}

impl<'a, 'b> Connection<'a, 'b> {
    pub fn new(
        ctx: &'b FormContext<'a>,
        params: ConnectionParams,
    ) -> Result<Connection<'a, 'b>, FormError> {
        let rho = ctx.rho()?;
        let varpi = ctx.tensor(&rho, &rho)?;
        let mut d_basis = Vec::with_capacity(3);
        for a in 0..3u8 {
            d_basis.push(d_basis_general(
                ctx,
                &rho,
                &varpi,
                &params.c0,
                &params.c1,
                &params.c2,
                a,
            )?);
        }
        Ok(Connection {
            ctx,
            params,
            rho,
            varpi,
            d_basis,
        })
    }

    /// D Xi^a for the torsionless family.
    pub fn d_basis(&self, a: u8) -> &Tensor {
        &self.d_basis[a as usize]
    }

    /// D on a one-form: D(f Xi^a) = df ox Xi^a + (-1)^{fhat} f D Xi^a.
    pub fn d_one_form(&self, t: &Tensor) -> Result<Tensor, FormError> {
        if t.slots != 1 {
            return Err(FormError::SlotMismatch {
                expected: 1,
                found: t.slots,
            });
        }
        let ctx = self.ctx;
        let mut out = Tensor::zero(ctx.coeff.id, 2);
        for (ls, f) in &t.terms {
            let df = ctx.d_element(f)?;
            let xi = Tensor::basis(ctx.coeff.id, ls);
            out = out.add(&ctx.tensor(&df, &xi)?)?;
            let (even, odd) = split_parity(ctx.coeff, f);
            if !even.is_zero() {
                out = out.add(&ctx.scale_left(&even, self.d_basis(ls[0]))?)?;
            }
            if !odd.is_zero() {
                out = out.add(&ctx.scale_left(&odd, self.d_basis(ls[0]))?.neg())?;
            }
        }
        Ok(out)
    }

    /// D on a k-slot tensor: the head slot differentiates by the one-form
    /// rule and the tail passes underneath through the generalized
    /// permutation, with the sign of everything left of it.
    pub fn d_tensor(&self, t: &Tensor) -> Result<Tensor, FormError> {
        if t.slots == 1 {
            return self.d_one_form(t);
        }
        if t.slots < 1 {
            return Err(FormError::SlotMismatch {
                expected: 1,
                found: t.slots,
            });
        }
        let ctx = self.ctx;
        let mut out = Tensor::zero(ctx.coeff.id, t.slots + 1);
        for (ls, f) in &t.terms {
            let head = ls[0];
            let rest = Tensor::basis(ctx.coeff.id, &ls[1..]);
            let mut head_form = Tensor::zero(ctx.coeff.id, 1);
            head_form.terms.insert(vec![head], f.clone());

            let d_head = self.d_one_form(&head_form)?;
            out = out.add(&ctx.tensor(&d_head, &rest)?)?;

            let d_rest = self.d_tensor(&rest)?;
            let (even, odd) = split_parity(ctx.coeff, f);
            for (part, coeff_parity) in [(even, 0u8), (odd, 1u8)] {
                if part.is_zero() {
                    continue;
                }
                let mut head_part = Tensor::zero(ctx.coeff.id, 1);
                head_part.terms.insert(vec![head], part);
                let tail = ctx.tensor(&head_part, &d_rest)?;
                let swapped = ctx.sigma_at(&tail, 0)?;
                if (coeff_parity + IHAT[head as usize]) % 2 == 1 {
                    out = out.add(&swapped.neg())?;
                } else {
                    out = out.add(&swapped)?;
                }
            }
        }
        Ok(out)
    }

    /// The torsion d - pi o D on a one-form.
    pub fn torsion(&self, t: &Tensor) -> Result<WedgeForm, FormError> {
        let d = self.ctx.d_one_form(t)?;
        let pi_d = self.ctx.wedge_from_pair(&self.d_one_form(t)?)?;
        d.sub(&pi_d)
    }

    /// The curvature pi12 D^2 on a one-form.
    pub fn curvature_of(&self, t: &Tensor) -> Result<WedgeTensor, FormError> {
        let second = self.d_tensor(&self.d_one_form(t)?)?;
        self.ctx.pi12(&second)
    }

    /// The curvature on a basis one-form.
    pub fn curvature(&self, a: u8) -> Result<WedgeTensor, FormError> {
        self.curvature_of(&Tensor::basis(self.ctx.coeff.id, &[a]))
    }

    /// The curvature split into its matrix of two-forms: entry [a][b] is
    /// the coefficient of ox Xi^b in the curvature of Xi^a.
    pub fn curvature_components(&self) -> Result<[[WedgeForm; 3]; 3], FormError> {
        let mut out: [[WedgeForm; 3]; 3] =
            std::array::from_fn(|_| std::array::from_fn(|_| WedgeForm::zero(self.ctx.coeff.id)));
        for a in 0..3u8 {
            let curv = self.curvature(a)?;
            for ((k, b), e) in &curv.terms {
                out[a as usize][*b as usize]
                    .terms
                    .insert(*k, e.clone());
            }
        }
        Ok(out)
    }
}

/// D Xi^a for the three-parameter family, before the torsionless cut:
/// c0 X^a rho ox rho + c1 (-1)^{ahat} Xi^a ox rho + c2 rho ox Xi^a.
pub fn d_basis_general(
    ctx: &FormContext,
    rho: &Tensor,
    varpi: &Tensor,
    c0: &Poly,
    c1: &Poly,
    c2: &Poly,
    a: u8,
) -> Result<Tensor, FormError> {
    let xa = ctx.coordinate(a as usize);
    let mut out = ctx.scale_left(&xa, varpi)?.scale(c0);
    let xi = Tensor::basis(ctx.coeff.id, &[a]);
    let mut c1_signed = c1.clone();
    if IHAT[a as usize] == 1 {
        c1_signed = c1_signed.neg();
    }
    out = out.add(&ctx.tensor(&xi, rho)?.scale(&c1_signed))?;
    out = out.add(&ctx.tensor(rho, &xi)?.scale(c2))?;
    Ok(out)
}

/// Pairs the last two slots with the invariant metric (J^{-1})_{ab};
/// defined for two and three slots.
pub fn eval_metric_last2(ctx: &FormContext, t: &Tensor) -> Result<Tensor, FormError> {
    if t.slots != 2 && t.slots != 3 {
        return Err(FormError::SlotMismatch {
            expected: 2,
            found: t.slots,
        });
    }
    let jinv = j_inv_matrix();
    let mut out = Tensor::zero(ctx.coeff.id, t.slots - 2);
    for (ls, f) in &t.terms {
        let a = ls[t.slots - 2] as usize;
        let b = ls[t.slots - 1] as usize;
        let g = &jinv[a][b];
        if g.is_zero() {
            continue;
        }
        let mut kept = ls.clone();
        kept.truncate(t.slots - 2);
        let scaled = f.scale(g);
        if scaled.is_zero() {
            continue;
        }
        let mut single = Tensor::zero(ctx.coeff.id, t.slots - 2);
        single.terms.insert(kept, scaled);
        out = out.add(&single)?;
    }
    Ok(out)
}

/// The coefficient of a zero-slot tensor as a plain element.
pub fn tensor_scalar_part(t: &Tensor) -> Element {
    match t.terms.get(&Vec::new()) {
        Some(e) => e.clone(),
        None => Element::zero(t.algebra),
    }
}

fn check_from(id: &str, anchor: &str, residual: Option<String>) -> Check {
    Check::from_residual(id, anchor, residual.unwrap_or_else(|| "0".to_string()))
}

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

fn wedge_tensor_residual(ctx: &FormContext, label: &str, diff: &WedgeTensor) -> Option<String> {
    if diff.is_zero() {
        None
    } else {
        Some(format!("{label}: {}", ctx.format_wedge_tensor(diff)))
    }
}

/// Left-multiplies every coefficient of a wedge tensor.
fn wedge_tensor_scale_left(
    ctx: &FormContext,
    f: &Element,
    wt: &WedgeTensor,
) -> Result<WedgeTensor, FormError> {
    let mut out = WedgeTensor::zero(wt.algebra);
    for (k, e) in &wt.terms {
        let prod = ctx.coeff.multiply(f, e)?;
        if prod.is_zero() {
            continue;
        }
        let mut single = WedgeTensor::zero(wt.algebra);
        single.terms.insert(*k, prod);
        out = out.add(&single)?;
    }
    Ok(out)
}

/// The scalar c0 - c1^2 + c0 c1 phi that multiplies Xi^a /\ rho ox rho
/// in the curvature.
fn curvature_scalar(ctx: &FormContext, params: &ConnectionParams) -> Element {
    let c = params.c0.sub(&params.c1.mul(&params.c1));
    let mut e = Element::scalar(ctx.coeff.id, c);
    let phi = ctx.phi().scale(&params.c0.mul(&params.c1));
    for (w, p) in phi.terms {
        let entry = e.terms.entry(w).or_insert_with(Poly::zero);
        *entry = entry.add(&p);
    }
    e.terms.retain(|_, p| !p.is_zero());
    e
}

// ---------------------------------------------------------------------------
// connection checks

/// Verifies the connection-sector identities. Only c0 and c1 are read
/// from the parameters: the torsion-family check frees c2 on purpose,
/// and every other check runs at the torsionless cut c2 = -c1.
pub fn connection_checks(
    algebras: &Algebras,
    params: &ConnectionParams,
) -> Result<Vec<Check>, FormError> {
    let ctx = FormContext::superspace(algebras)?;
    let conn = Connection::new(
        &ctx,
        ConnectionParams::torsionless(params.c0.clone(), params.c1.clone()),
    )?;
    let mut checks = Vec::new();
    let b = b_matrix();
    let rho = &conn.rho;
    let varpi = &conn.varpi;
    let c0 = &params.c0;
    let c1 = &params.c1;

    // explicit images of the three basis one-forms
    let mut residual = None;
    for a in 0..3u8 {
        let xa = ctx.coordinate(a as usize);
        let xi = Tensor::basis(ctx.coeff.id, &[a]);
        let mut want = ctx.scale_left(&xa, varpi)?.scale(c0);
        let mut swap = ctx.tensor(&xi, rho)?;
        if IHAT[a as usize] == 1 {
            swap = swap.neg();
        }
        want = want.add(&swap.scale(c1))?;
        want = want.add(&ctx.tensor(rho, &xi)?.scale(&c1.neg()))?;
        residual = tensor_residual(&ctx, FORM_NAMES[a as usize], &conn.d_basis(a).sub(&want)?);
        if residual.is_some() {
            break;
        }
    }
    checks.push(check_from(
        "connection-explicit",
        "D xi1 = c0 theta1 rho ox rho + c1(xi1 ox rho - rho ox xi1), D eta = c0 x rho ox rho - c1(eta ox rho + rho ox eta), D xi2 = c0 theta2 rho ox rho + c1(xi2 ox rho - rho ox xi2)",
        residual,
    ));

    // the three-parameter torsion collapses onto -(c1 + c2) rho /\ Xi^a
    let c2 = Poly::sym(Symbol::C2);
    let general = Connection::new(
        &ctx,
        ConnectionParams {
            c0: c0.clone(),
            c1: c1.clone(),
            c2: c2.clone(),
        },
    )?;
    let mut residual = None;
    for a in 0..3u8 {
        let theta = general.torsion(&Tensor::basis(ctx.coeff.id, &[a]))?;
        let xi = Tensor::basis(ctx.coeff.id, &[a]);
        let want = ctx
            .wedge(rho, &xi)?
            .scale(&c1.add(&c2).neg());
        residual = wedge_residual(&ctx, FORM_NAMES[a as usize], &theta.sub(&want)?);
        if residual.is_some() {
            break;
        }
    }
    checks.push(check_from(
        "torsion-general-family",
        "Theta Xi^a = -pi(D Xi^a) = -(c1 + c2) rho /\\ Xi^a",
        residual,
    ));

    // the torsionless cut kills the torsion, also on coefficient one-forms
    let mut residual = None;
    let samples: Vec<Element> = vec![
        Element::one(ctx.coeff.id),
        ctx.coordinate(0),
        ctx.coordinate(1),
        ctx.coordinate(2),
        ctx.phi(),
    ];
    'torsion: for a in 0..3u8 {
        for (n, f) in samples.iter().enumerate() {
            let mut form = Tensor::zero(ctx.coeff.id, 1);
            form.terms.insert(vec![a], f.clone());
            let theta = conn.torsion(&form)?;
            residual = wedge_residual(
                &ctx,
                &format!("{} with coefficient {n}", FORM_NAMES[a as usize]),
                &theta,
            );
            if residual.is_some() {
                break 'torsion;
            }
        }
    }
    checks.push(check_from(
        "torsion-free",
        "Theta = d - pi o D = 0 on every one-form once c2 = -c1",
        residual,
    ));

    // the invariant one-form has an invariant derivative
    let d_rho = conn.d_one_form(rho)?;
    let mut scalar = Element::scalar(ctx.coeff.id, hp(0, -2, 1).mul(c1));
    for (w, p) in ctx.phi().scale(c0).terms {
        let entry = scalar.terms.entry(w).or_insert_with(Poly::zero);
        *entry = entry.add(&p);
    }
    scalar.terms.retain(|_, p| !p.is_zero());
    let want = ctx.lambda().add(&ctx.scale_left(&scalar, varpi)?)?;
    checks.push(check_from(
        "connection-invariant-one-form",
        "D rho = sum J_ab Xi^a ox Xi^b + (c0 phi - 2 c1) rho ox rho",
        tensor_residual(&ctx, "D rho", &d_rho.sub(&want)?),
    ));

    checks.push(check_from(
        "wedge-of-connection-rho",
        "pi(D rho) = 0",
        wedge_residual(&ctx, "pi(D rho)", &ctx.wedge_from_pair(&d_rho)?),
    ));

    // coordinates pass through D Xi via the braid matrix
    let mut residual = None;
    'detd: for i in 0..3usize {
        for j in 0..3usize {
            let xi_c = ctx.coordinate(i);
            let lhs = ctx.scale_left(&xi_c, conn.d_basis(j as u8))?;
            let mut rhs = Tensor::zero(ctx.coeff.id, 2);
            for k in 0..3usize {
                for l in 0..3usize {
                    let c = b.get(pidx(i, j), pidx(k, l));
                    if c.is_zero() {
                        continue;
                    }
                    let xk = ctx.coordinate(k);
                    let moved = ctx.mul_right(conn.d_basis(l as u8), &xk)?;
                    rhs = rhs.add(&moved.scale(c))?;
                }
            }
            residual = tensor_residual(&ctx, &format!("pair ({i},{j})"), &lhs.sub(&rhs)?);
            if residual.is_some() {
                break 'detd;
            }
        }
    }
    checks.push(check_from(
        "connection-exchange",
        "X^i D Xi^j = sum_{k,l} B^{ij}_{kl} (D Xi^l) X^k",
        residual,
    ));

    // the graded Leibniz rule against the product one-forms
    let mut residual = None;
    'leib: for i in 0..3usize {
        for j in 0..3u8 {
            let xi_c = ctx.coordinate(i);
            let mut form = Tensor::zero(ctx.coeff.id, 1);
            form.terms.insert(vec![j], xi_c.clone());
            let lhs = conn.d_one_form(&form)?;
            let mut rhs = ctx.tensor(
                &Tensor::basis(ctx.coeff.id, &[i as u8]),
                &Tensor::basis(ctx.coeff.id, &[j]),
            )?;
            let mut scaled = ctx.scale_left(&xi_c, conn.d_basis(j))?;
            if XHAT[i] == 1 {
                scaled = scaled.neg();
            }
            rhs = rhs.add(&scaled)?;
            residual = tensor_residual(&ctx, &format!("X^{i} Xi^{j}"), &lhs.sub(&rhs)?);
            if residual.is_some() {
                break 'leib;
            }
        }
    }
    checks.push(check_from(
        "connection-leibniz-products",
        "D(X^i Xi^j) = Xi^i ox Xi^j + (-1)^{Xhat^i} X^i D Xi^j",
        residual,
    ));

    // the right-sided Leibniz rule through the generalized permutation
    let mut residual = None;
    'rleib: for l in 0..3u8 {
        for k in 0..3usize {
            let xk = ctx.coordinate(k);
            let form = ctx.mul_right(&Tensor::basis(ctx.coeff.id, &[l]), &xk)?;
            let lhs = conn.d_one_form(&form)?;
            let pair = ctx.tensor(
                &Tensor::basis(ctx.coeff.id, &[l]),
                &Tensor::basis(ctx.coeff.id, &[k as u8]),
            )?;
            let mut swapped = ctx.sigma_at(&pair, 0)?;
            if IHAT[l as usize] == 1 {
                swapped = swapped.neg();
            }
            let rhs = swapped.add(&ctx.mul_right(conn.d_basis(l), &xk)?)?;
            residual = tensor_residual(&ctx, &format!("Xi^{l} X^{k}"), &lhs.sub(&rhs)?);
            if residual.is_some() {
                break 'rleib;
            }
        }
    }
    checks.push(check_from(
        "connection-right-leibniz",
        "D(Xi^l X^k) = (-1)^{Xihat^l} sigma(Xi^l ox Xi^k) + (D Xi^l) X^k",
        residual,
    ));

    // the tensor extension agrees with the two-slot Leibniz formula
    let mut residual = None;
    for a in 0..3u8 {
        let xi = Tensor::basis(ctx.coeff.id, &[a]);
        let t = ctx.tensor(rho, &xi)?;
        let lhs = conn.d_tensor(&t)?;
        // rho is odd, so the tail passes with a minus sign
        let mut rhs = ctx.tensor(&d_rho, &xi)?;
        let tail = ctx.tensor(rho, conn.d_basis(a))?;
        rhs = rhs.add(&ctx.sigma_at(&tail, 0)?.neg())?;
        residual = tensor_residual(&ctx, &format!("rho ox xi{a}"), &lhs.sub(&rhs)?);
        if residual.is_some() {
            break;
        }
    }
    checks.push(check_from(
        "connection-tensor-leibniz",
        "D(rho ox Xi^a) = D rho ox Xi^a - sigma_12(rho ox D Xi^a)",
        residual,
    ));

    // the coefficient Leibniz rule on two-slot tensors
    let mut residual = None;
    'coeff: for i in 0..3usize {
        for a in 0..3u8 {
            for bb in 0..3u8 {
                let f = ctx.coordinate(i);
                let pair = ctx.tensor(
                    &Tensor::basis(ctx.coeff.id, &[a]),
                    &Tensor::basis(ctx.coeff.id, &[bb]),
                )?;
                let lhs = conn.d_tensor(&ctx.scale_left(&f, &pair)?)?;
                let mut rhs = ctx.tensor(&ctx.d_element(&f)?, &pair)?;
                let mut scaled = ctx.scale_left(&f, &conn.d_tensor(&pair)?)?;
                if XHAT[i] == 1 {
                    scaled = scaled.neg();
                }
                rhs = rhs.add(&scaled)?;
                residual = tensor_residual(
                    &ctx,
                    &format!("X^{i} (Xi^{a} ox Xi^{bb})"),
                    &lhs.sub(&rhs)?,
                );
                if residual.is_some() {
                    break 'coeff;
                }
            }
        }
    }
    checks.push(check_from(
        "tensor-leibniz-coefficients",
        "D(f (Xi^a ox Xi^b)) = df ox Xi^a ox Xi^b + (-1)^{fhat} f D(Xi^a ox Xi^b)",
        residual,
    ));

    Ok(checks)
}

// ---------------------------------------------------------------------------
// curvature checks

/// Verifies the curvature-sector identities at the torsionless cut of
/// the given c0 and c1. The classical-limit check alone runs at symbolic
/// parameters: it substitutes c0 = 0 and needs c0 to still be a symbol.
pub fn curvature_checks(
    algebras: &Algebras,
    params: &ConnectionParams,
) -> Result<Vec<Check>, FormError> {
    let ctx = FormContext::superspace(algebras)?;
    let conn = Connection::new(
        &ctx,
        ConnectionParams::torsionless(params.c0.clone(), params.c1.clone()),
    )?;
    let mut checks = Vec::new();
    let rho = &conn.rho;
    let lambda = ctx.lambda();
    let c0 = &params.c0;
    let c1 = &params.c1;
    let scalar = curvature_scalar(&ctx, params);

    let curv: Vec<WedgeTensor> = (0..3u8)
        .map(|a| conn.curvature(a))
        .collect::<Result<_, _>>()?;

    // the closed curvature formula
    let mut residual = None;
    for a in 0..3u8 {
        let xi = Tensor::basis(ctx.coeff.id, &[a]);
        let first3 = ctx.tensor(&ctx.tensor(&xi, rho)?, rho)?;
        let first = ctx.pi12(&ctx.scale_left(&scalar, &first3)?)?;
        let xa = ctx.coordinate(a as usize);
        let mut c0s = c0.clone();
        if IHAT[a as usize] == 1 {
            c0s = c0s.neg();
        }
        let mut one_form = ctx.scale_left(&xa, rho)?.scale(&c0s);
        one_form = one_form.add(&xi.scale(c1))?;
        let second = ctx.pi12(&ctx.tensor(&one_form, &lambda)?)?;
        let want = first.add(&second)?;
        residual = wedge_tensor_residual(
            &ctx,
            FORM_NAMES[a as usize],
            &curv[a as usize].sub(&want)?,
        );
        if residual.is_some() {
            break;
        }
    }
    checks.push(check_from(
        "curvature-exact",
        "pi12 D^2 Xi^a = (c0 - c1^2 + c0 c1 phi) Xi^a /\\ rho ox rho + (c0 (-1)^{ahat} X^a rho + c1 Xi^a) /\\ Lambda",
        residual,
    ));

    // the curvature recombined through a matrix of two-forms
    let j = j_matrix();
    let mut residual = None;
    'two: for a in 0..3u8 {
        let xi = Tensor::basis(ctx.coeff.id, &[a]);
        let xa = ctx.coordinate(a as usize);
        let mut want = WedgeTensor::zero(ctx.coeff.id);
        for bb in 0..3u8 {
            for k in 0..3usize {
                let jkb = &j[k][bb as usize];
                if jkb.is_zero() {
                    continue;
                }
                let xk_form = Tensor::basis(ctx.coeff.id, &[k as u8]);
                let mut c0s = c0.clone();
                if IHAT[a as usize] == 1 {
                    c0s = c0s.neg();
                }
                let mut bracket = ctx.scale_left(&xa, &xk_form)?.scale(&c0s);
                let xk = ctx.coordinate(k);
                let moved = ctx.mul_right(&xi, &xk)?;
                bracket = bracket.add(&ctx.scale_left(&scalar, &moved)?.neg())?;
                let mut sign = jkb.clone();
                if IHAT[k] == 1 {
                    sign = sign.neg();
                }
                let with_rho = ctx.wedge(&bracket, rho)?.scale(&sign);
                for (kk, e) in &with_rho.terms {
                    let mut single = WedgeTensor::zero(ctx.coeff.id);
                    single.terms.insert((*kk, bb), e.clone());
                    want = want.add(&single)?;
                }
                let xi_wedge = ctx
                    .wedge(&xi, &xk_form)?
                    .scale(&c1.mul(jkb));
                for (kk, e) in &xi_wedge.terms {
                    let mut single = WedgeTensor::zero(ctx.coeff.id);
                    single.terms.insert((*kk, bb), e.clone());
                    want = want.add(&single)?;
                }
            }
        }
        residual = wedge_tensor_residual(
            &ctx,
            FORM_NAMES[a as usize],
            &curv[a as usize].sub(&want)?,
        );
        if residual.is_some() {
            break 'two;
        }
    }
    checks.push(check_from(
        "curvature-two-form",
        "pi12 D^2 Xi^a = sum_b omega^a_b ox Xi^b with omega^a_b = sum_k J_kb ((-1)^{khat} (c0 (-1)^{ahat} X^a Xi^k - (c0 - c1^2 + c0 c1 phi) Xi^a X^k) /\\ rho + c1 Xi^a /\\ Xi^k)",
        residual,
    ));

    // curvature is a left module map
    let mut residual = None;
    'left: for a in 0..3u8 {
        for (n, f) in [
            ctx.coordinate(0),
            ctx.coordinate(1),
            ctx.coordinate(2),
            ctx.phi(),
        ]
        .iter()
        .enumerate()
        {
            let mut form = Tensor::zero(ctx.coeff.id, 1);
            form.terms.insert(vec![a], f.clone());
            let lhs = conn.curvature_of(&form)?;
            let rhs = wedge_tensor_scale_left(&ctx, f, &curv[a as usize])?;
            residual = wedge_tensor_residual(
                &ctx,
                &format!("coefficient {n} on {}", FORM_NAMES[a as usize]),
                &lhs.sub(&rhs)?,
            );
            if residual.is_some() {
                break 'left;
            }
        }
    }
    checks.push(check_from(
        "curvature-left-linear",
        "pi12 D^2 (f Xi^a) = f pi12 D^2 Xi^a",
        residual,
    ));

    // curvature is also a right module map
    let mut residual = None;
    'right: for bb in 0..3u8 {
        for a in 0..3usize {
            let xa = ctx.coordinate(a);
            let form = ctx.mul_right(&Tensor::basis(ctx.coeff.id, &[bb]), &xa)?;
            let lhs = conn.curvature_of(&form)?;
            let second = conn.d_tensor(&conn.d_one_form(&Tensor::basis(ctx.coeff.id, &[bb]))?)?;
            let rhs = ctx.pi12(&ctx.mul_right(&second, &xa)?)?;
            residual = wedge_tensor_residual(
                &ctx,
                &format!("Xi^{bb} X^{a}"),
                &lhs.sub(&rhs)?,
            );
            if residual.is_some() {
                break 'right;
            }
        }
    }
    checks.push(check_from(
        "curvature-right-linear",
        "pi12 D^2 (Xi^b X^a) = (pi12 D^2 Xi^b) X^a",
        residual,
    ));

    // The classical limit keeps only the h = 0, c0 = 0 part. This is a
    // statement about the symbolic family, so it deliberately ignores any
    // pinned parameter point: substituting into a numeric c0 would be a
    // no-op and the comparison meaningless.
    let sym = Connection::new(&ctx, ConnectionParams::symbolic_torsionless())?;
    let limit = [(Symbol::H, Poly::zero()), (Symbol::C0, Poly::zero())];
    let mut residual = None;
    for a in 0..3u8 {
        let full = sym.curvature(a)?;
        let got = WedgeTensor {
            algebra: ctx.coeff.id,
            terms: full
                .terms
                .iter()
                .map(|(k, e)| (*k, e.substitute(&limit)))
                .filter(|(_, e)| !e.is_zero())
                .collect(),
        };
        let xi = Tensor::basis(ctx.coeff.id, &[a]);
        let c1l = Poly::sym(Symbol::C1);
        let first3 = ctx.tensor(&ctx.tensor(&xi, rho)?, rho)?;
        let first = ctx.pi12(&first3)?.scale(&c1l.mul(&c1l).neg());
        let second = ctx.pi12(&ctx.tensor(&xi, &lambda)?)?.scale(&c1l);
        let mut want = first.add(&second)?;
        want = WedgeTensor {
            algebra: ctx.coeff.id,
            terms: want
                .terms
                .iter()
                .map(|(k, e)| (*k, e.substitute(&limit)))
                .filter(|(_, e)| !e.is_zero())
                .collect(),
        };
        residual = wedge_tensor_residual(
            &ctx,
            FORM_NAMES[a as usize],
            &got.sub(&want)?,
        );
        if residual.is_some() {
            break;
        }
    }
    checks.push(check_from(
        "curvature-classical-limit",
        "at h = 0 and c0 = 0 the curvature is -c1^2 Xi^a /\\ rho ox rho + c1 Xi^a /\\ Lambda",
        residual,
    ));

    Ok(checks)
}

// ---------------------------------------------------------------------------
// metric checks

/// Builds the coefficient one-form Xi^l X^k as a canonical tensor.
fn label_coordinate(ctx: &FormContext, l: u8, k: usize) -> Result<Tensor, FormError> {
    ctx.mul_right(&Tensor::basis(ctx.coeff.id, &[l]), &ctx.coordinate(k))
}

/// The nine values of (1 ox g) o D on basis pairs for one parameter choice.
fn metric_defect(
    ctx: &FormContext,
    conn: &Connection,
    a: u8,
    b: u8,
) -> Result<Tensor, FormError> {
    let pair = ctx.tensor(
        &Tensor::basis(ctx.coeff.id, &[a]),
        &Tensor::basis(ctx.coeff.id, &[b]),
    )?;
    let d = conn.d_tensor(&pair)?;
    eval_metric_last2(ctx, &d)
}

/// Verifies the metric-sector identities: the invariant values, the closed
/// failure formulas for each parameter direction, and the fact that the
/// failure vanishes only for the trivial connection.
pub fn metric_theorem_checks(algebras: &Algebras) -> Result<Vec<Check>, FormError> {
    let ctx = FormContext::superspace(algebras)?;
    let mut checks = Vec::new();
    let rho = ctx.rho()?;
    let jinv = j_inv_matrix();

    // the metric matrix itself, entry by entry
    let printed: [[Poly; 3]; 3] = [
        [hp(1, -1, 2), Poly::zero(), hp(0, -1, 1)],
        [Poly::zero(), Poly::one(), Poly::zero()],
        [Poly::one(), Poly::zero(), Poly::zero()],
    ];
    let mut residual = None;
    'matrix: for a in 0..3usize {
        for b in 0..3usize {
            let diff = jinv[a][b].sub(&printed[a][b]);
            if !diff.is_zero() {
                residual = Some(format!("entry ({a},{b}): {diff}"));
                break 'matrix;
            }
        }
    }
    checks.push(check_from(
        "metric-matrix",
        "g^{ab} = (J^{-1})_{ab} = [[-h/2, 0, -1], [0, 1, 0], [1, 0, 0]]",
        residual,
    ));

    // non-degeneracy: the determinant is exactly one
    let det = {
        let m = &jinv;
        let minor = |r: [usize; 2], c: [usize; 2]| {
            m[r[0]][c[0]]
                .mul(&m[r[1]][c[1]])
                .sub(&m[r[0]][c[1]].mul(&m[r[1]][c[0]]))
        };
        m[0][0]
            .mul(&minor([1, 2], [1, 2]))
            .sub(&m[0][1].mul(&minor([1, 2], [0, 2])))
            .add(&m[0][2].mul(&minor([1, 2], [0, 1])))
    };
    let residual = if det == Poly::one() {
        None
    } else {
        Some(format!("det g = {det}"))
    };
    checks.push(check_from(
        "metric-nondegenerate",
        "det g^{ab} = 1, an exactly invertible Poly",
        residual,
    ));

    // metric values on the invariant one-form
    let mut residual = None;
    for a in 0..3u8 {
        let xi = Tensor::basis(ctx.coeff.id, &[a]);
        let left = eval_metric_last2(&ctx, &ctx.tensor(&rho, &xi)?)?;
        let want_left = ctx.coordinate(a as usize);
        let diff = tensor_scalar_part(&left).sub(&want_left)?;
        if !diff.is_zero() {
            residual = Some(format!(
                "g(rho ox xi{a}): {}",
                ctx.coeff.format_element(&diff)
            ));
            break;
        }
        let right = eval_metric_last2(&ctx, &ctx.tensor(&xi, &rho)?)?;
        let mut want_right = ctx.coordinate(a as usize);
        if XHAT[a as usize] == 1 {
            want_right = want_right.neg();
        }
        let diff = tensor_scalar_part(&right).sub(&want_right)?;
        if !diff.is_zero() {
            residual = Some(format!(
                "g(xi{a} ox rho): {}",
                ctx.coeff.format_element(&diff)
            ));
            break;
        }
    }
    checks.push(check_from(
        "metric-invariant-values",
        "g(rho ox Xi^a) = X^a and g(Xi^a ox rho) = (-1)^{Xhat^a} X^a",
        residual,
    ));

    // metric values are constants, so their differential vanishes
    let mut residual = None;
    'dg: for a in 0..3usize {
        for b in 0..3usize {
            let g = Element::scalar(ctx.coeff.id, jinv[a][b].clone());
            let dg = ctx.d_element(&g)?;
            residual = tensor_residual(&ctx, &format!("g({a},{b})"), &dg);
            if residual.is_some() {
                break 'dg;
            }
        }
    }
    checks.push(check_from(
        "metric-derivative-vanishes",
        "d g(Xi^a ox Xi^b) = 0",
        residual,
    ));

    // the c0 failure direction in closed form
    let c0 = Poly::sym(Symbol::C0);
    let conn0 = Connection::new(&ctx, ConnectionParams::torsionless(c0.clone(), Poly::zero()))?;
    let mut residual = None;
    'c0: for a in 0..3u8 {
        for b in 0..3u8 {
            let got = metric_defect(&ctx, &conn0, a, b)?;
            let prod = ctx.coeff.multiply(
                &ctx.coordinate(a as usize),
                &ctx.coordinate(b as usize),
            )?;
            let mut want = ctx.mul_right(&rho, &prod)?.scale(&c0.scale(&rat(2, 1)));
            if XHAT[a as usize] == 1 {
                want = want.neg();
            }
            residual = tensor_residual(&ctx, &format!("pair ({a},{b})"), &got.sub(&want)?);
            if residual.is_some() {
                break 'c0;
            }
        }
    }
    checks.push(check_from(
        "metric-c0-part",
        "for c1 = 0: (1 ox g) D(Xi^a ox Xi^b) = (-1)^{Xhat^a} 2 c0 rho X^a X^b",
        residual,
    ));

    // the c1 failure direction against its nine-line table
    let c1 = Poly::sym(Symbol::C1);
    let conn1 = Connection::new(&ctx, ConnectionParams::torsionless(Poly::zero(), c1.clone()))?;
    let mut table: Vec<((u8, u8), Tensor)> = Vec::new();
    {
        let zero = Tensor::zero(ctx.coeff.id, 1);
        let lx = |l: u8, k: usize| label_coordinate(&ctx, l, k);
        table.push(((0, 0), zero.clone()));
        table.push((
            (0, 1),
            lx(0, 1)?
                .add(&lx(1, 0)?)?
                .add(&lx(2, 1)?.scale(&hp(1, -1, 1)))?,
        ));
        table.push((
            (0, 2),
            lx(1, 1)?
                .add(&lx(2, 2)?.scale(&hp(1, -1, 2)))?
                .add(&rho)?,
        ));
        table.push((
            (1, 0),
            lx(0, 1)?
                .add(&lx(1, 0)?)?
                .add(&lx(1, 2)?.scale(&hp(1, 1, 1)))?
                .neg(),
        ));
        table.push((
            (1, 1),
            lx(1, 1)?
                .scale(&hp(0, 2, 1))
                .add(&lx(2, 2)?.scale(&hp(1, -1, 1)))?
                .add(&rho.scale(&hp(0, 2, 1)))?
                .neg(),
        ));
        table.push(((1, 2), lx(1, 2)?.add(&lx(2, 1)?)?.neg()));
        table.push((
            (2, 0),
            lx(1, 1)?
                .add(&lx(2, 2)?.scale(&hp(1, -1, 2)))?
                .add(&rho)?
                .neg(),
        ));
        table.push(((2, 1), lx(1, 2)?.add(&lx(2, 1)?)?));
        table.push(((2, 2), zero));
    }
    let mut residual = None;
    for ((a, b), want) in &table {
        let got = metric_defect(&ctx, &conn1, *a, *b)?;
        let want = want.scale(&c1);
        residual = tensor_residual(&ctx, &format!("pair ({a},{b})"), &got.sub(&want)?);
        if residual.is_some() {
            break;
        }
    }
    checks.push(check_from(
        "metric-c1-part",
        "for c0 = 0: (1 ox g) D(xi1 ox eta) = c1(xi1 x + eta theta1 - h xi2 x), and the eight companion lines",
        residual,
    ));

    // the two directions assemble the full failure, which vanishes only at
    // the trivial parameter point
    let symbolic = Connection::new(&ctx, ConnectionParams::symbolic_torsionless())?;
    let mut residual = None;
    let mut saw_c0_failure = false;
    let mut saw_c1_failure = false;
    'full: for a in 0..3u8 {
        for b in 0..3u8 {
            let full = metric_defect(&ctx, &symbolic, a, b)?;
            let part0 = metric_defect(&ctx, &conn0, a, b)?;
            let part1 = metric_defect(&ctx, &conn1, a, b)?;
            let split = full.sub(&part0.add(&part1)?)?;
            residual = tensor_residual(&ctx, &format!("split at ({a},{b})"), &split);
            if residual.is_some() {
                break 'full;
            }
            let at = |t: &Tensor, v0: i64, v1: i64| {
                t.map_coeffs(|e| {
                    e.substitute(&[
                        (Symbol::C0, Poly::int(v0)),
                        (Symbol::C1, Poly::int(v1)),
                    ])
                })
            };
            if !at(&full, 1, 0).is_zero() {
                saw_c0_failure = true;
            }
            if !at(&full, 0, 1).is_zero() {
                saw_c1_failure = true;
            }
            if !at(&full, 0, 0).is_zero() {
                residual = Some(format!(
                    "defect survives at c0 = c1 = 0 on pair ({a},{b})"
                ));
                break 'full;
            }
        }
    }
    if residual.is_none() && !saw_c0_failure {
        residual = Some("the c0 direction unexpectedly preserves the metric".to_string());
    }
    if residual.is_none() && !saw_c1_failure {
        residual = Some("the c1 direction unexpectedly preserves the metric".to_string());
    }
    checks.push(check_from(
        "metric-incompatibility",
        "(1 ox g) o D = 0 forces c0 = c1 = 0: both parameter directions leave a nonzero defect",
        residual,
    ));

    Ok(checks)
}

/// Metric compatibility at one pinned parameter point: passes only when
/// the defect vanishes there.
pub fn metric_compat_check(
    algebras: &Algebras,
    params: &ConnectionParams,
) -> Result<Check, FormError> {
    let ctx = FormContext::superspace(algebras)?;
    let conn = Connection::new(&ctx, params.clone())?;
    let mut residual = None;
    'outer: for a in 0..3u8 {
        for b in 0..3u8 {
            let defect = metric_defect(&ctx, &conn, a, b)?;
            residual = tensor_residual(
                &ctx,
                &format!(
                    "(1 ox g) D({} ox {})",
                    FORM_NAMES[a as usize], FORM_NAMES[b as usize]
                ),
                &defect,
            );
            if residual.is_some() {
                break 'outer;
            }
        }
    }
    Ok(check_from(
        "metric-compatibility",
        "(1 ox g) o D(Xi^a ox Xi^b) = 0 at the pinned parameters",
        residual,
    ))
}

/// Describes how the metric composes with the generalized permutation.
/// The answer is computed, not assumed, and reported as plain text.
pub fn sigma_metric_note(algebras: &Algebras) -> Result<String, FormError> {
    let ctx = FormContext::superspace(algebras)?;
    let jinv = j_inv_matrix();
    let mut plain = true;
    let mut minus = true;
    let mut graded = true;
    let mut minus_graded = true;
    for a in 0..3u8 {
        for b in 0..3u8 {
            let pair = ctx.tensor(
                &Tensor::basis(ctx.coeff.id, &[a]),
                &Tensor::basis(ctx.coeff.id, &[b]),
            )?;
            let swapped = ctx.sigma_at(&pair, 0)?;
            let g = tensor_scalar_part(&eval_metric_last2(&ctx, &swapped)?);
            let direct = Element::scalar(ctx.coeff.id, jinv[a as usize][b as usize].clone());
            let mut twisted = direct.clone();
            if IHAT[a as usize] * IHAT[b as usize] == 1 {
                twisted = twisted.neg();
            }
            if g != direct {
                plain = false;
            }
            if g != direct.neg() {
                minus = false;
            }
            if g != twisted {
                graded = false;
            }
            if g != twisted.neg() {
                minus_graded = false;
            }
        }
    }
    Ok(if plain {
        "g o sigma = g on the one-form pair basis: the metric is sigma-symmetric".to_string()
    } else if minus {
        "g o sigma = -g on the one-form pair basis: the metric is sigma-skew-symmetric".to_string()
    } else if graded {
        "g o sigma matches g up to the one-form parity sign (-1)^{Xihat^a Xihat^b}".to_string()
    } else if minus_graded {
        "g o sigma matches -g up to the one-form parity sign (-1)^{Xihat^a Xihat^b}".to_string()
    } else {
        "g o sigma agrees with neither g, -g, nor their graded twists on the pair basis".to_string()
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn algebras() -> Algebras {
        Algebras::build_unaudited().expect("presentations build")
    }

    fn assert_all_pass(checks: &[Check]) {
        let failed: Vec<String> = checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{}: {}", c.id, c.residual))
            .collect();
        assert!(failed.is_empty(), "failing checks: {failed:?}");
    }

    #[test]
    fn all_connection_checks_pass() {
        let a = algebras();
        let checks = connection_checks(&a, &ConnectionParams::symbolic()).unwrap();
        assert_all_pass(&checks);
        assert_eq!(checks.len(), 10);
    }

    #[test]
    fn all_curvature_checks_pass() {
        let a = algebras();
        let checks = curvature_checks(&a, &ConnectionParams::symbolic()).unwrap();
        assert_all_pass(&checks);
        assert_eq!(checks.len(), 5);
    }

    #[test]
    fn all_metric_theorem_checks_pass() {
        let a = algebras();
        let checks = metric_theorem_checks(&a).unwrap();
        assert_all_pass(&checks);
        assert_eq!(checks.len(), 7);
    }

    #[test]
    fn pinned_compatibility_fails_off_the_origin() {
        let a = algebras();
        let check = metric_compat_check(
            &a,
            &ConnectionParams::torsionless(Poly::one(), Poly::zero()),
        )
        .unwrap();
        assert!(!check.pass);
        assert!(check.residual.contains("xi1 ox xi1"));
        let trivial = metric_compat_check(
            &a,
            &ConnectionParams::torsionless(Poly::zero(), Poly::zero()),
        )
        .unwrap();
        assert!(trivial.pass);
    }

    #[test]
    fn curvature_specializes_consistently() {
        let a = algebras();
        let ctx = FormContext::superspace(&a).unwrap();
        let symbolic = Connection::new(&ctx, ConnectionParams::symbolic_torsionless()).unwrap();
        let pinned = Connection::new(
            &ctx,
            ConnectionParams::torsionless(Poly::int(2), Poly::int(-1)),
        )
        .unwrap();
        let pin = [
            (Symbol::C0, Poly::int(2)),
            (Symbol::C1, Poly::int(-1)),
        ];
        for a in 0..3u8 {
            let from_symbolic = WedgeTensor {
                algebra: ctx.coeff.id,
                terms: symbolic
                    .curvature(a)
                    .unwrap()
                    .terms
                    .iter()
                    .map(|(k, e)| (*k, e.substitute(&pin)))
                    .filter(|(_, e)| !e.is_zero())
                    .collect(),
            };
            let direct = pinned.curvature(a).unwrap();
            assert_eq!(from_symbolic, direct, "label {a}");
        }
    }

    #[test]
    fn zero_parameters_kill_the_derivative_of_forms() {
        let a = algebras();
        let ctx = FormContext::superspace(&a).unwrap();
        let conn = Connection::new(
            &ctx,
            ConnectionParams {
                c0: Poly::zero(),
                c1: Poly::zero(),
                c2: Poly::zero(),
            },
        )
        .unwrap();
        for l in 0..3u8 {
            assert!(conn.d_basis(l).is_zero());
            assert!(conn.curvature(l).unwrap().is_zero());
        }
        let pair = ctx
            .tensor(
                &Tensor::basis(ctx.coeff.id, &[0]),
                &Tensor::basis(ctx.coeff.id, &[1]),
            )
            .unwrap();
        assert!(conn.d_tensor(&pair).unwrap().is_zero());
        // coefficients still differentiate through the exterior part
        let form = ctx.scale_left(&ctx.coordinate(1), &Tensor::basis(ctx.coeff.id, &[0])).unwrap();
        assert!(!conn.d_one_form(&form).unwrap().is_zero());
    }

    #[test]
    fn sigma_metric_note_reports_a_classification() {
        let a = algebras();
        let note = sigma_metric_note(&a).unwrap();
        assert!(note.contains("g o sigma"));
    }
}
