//! A small exact expression language over the algebras and the form layer.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//!   sum    := tens (('+' | '-') tens)*
//!   tens   := prod (('ox' | '/\') prod)*      (one level, left-associative)
//!   prod   := unary ('*' unary)*
//!   unary  := '-' unary | power
//!   power  := atom ('^' INT)?
//!   atom   := IDENT | INT ('/' INT)? | '(' sum ')'
//! ```
//!
//! `/` occurs only inside a rational literal, directly after an integer.
//! Evaluation keeps every value in normal form, so `Scope::eval` composed
//! with `Scope::render` is the normalization pipeline of the command line.
//! `render` output parses back to the same value.

use crate::algebra::{AlgebraError, AlgebraId, Element, Presentation};
use crate::coeff::{rat, Poly, Symbol};
use crate::forms::{FormContext, FormError, Tensor, WedgeForm, WedgeTensor, WEDGE_BASIS};
use crate::presentations::{beta_elem, e_elem, gamma_elem, j_matrix, CAL_SHIFT};
use std::fmt;

/// Largest exponent accepted by `^`; generous for any sane input.
const MAX_EXPONENT: u32 = 512;

// ---------------------------------------------------------------------------
// errors

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprError {
    /// Lexing or parsing failed at a character offset of the input.
    Syntax { pos: usize, message: String },
    /// The expression parsed but does not make sense as written.
    Eval { message: String },
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::Syntax { pos, message } => {
                write!(f, "syntax error at offset {pos}: {message}")
            }
            ExprError::Eval { message } => write!(f, "{message}"),
        }
    }
}

impl From<AlgebraError> for ExprError {
    fn from(e: AlgebraError) -> ExprError {
        ExprError::Eval {
            message: e.to_string(),
        }
    }
}

impl From<FormError> for ExprError {
    fn from(e: FormError) -> ExprError {
        ExprError::Eval {
            message: e.to_string(),
        }
    }
}

fn eval_err(message: impl Into<String>) -> ExprError {
    ExprError::Eval {
        message: message.into(),
    }
}

// ---------------------------------------------------------------------------
// lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Ox,
    Wedge,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, i));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            '/' => {
                if chars.get(i + 1) == Some(&'\\') {
                    out.push((Tok::Wedge, i));
                    i += 2;
                } else {
                    out.push((Tok::Slash, i));
                    i += 1;
                }
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let n: i64 = digits.parse().map_err(|_| ExprError::Syntax {
                    pos: start,
                    message: "integer literal out of range".to_string(),
                })?;
                out.push((Tok::Int(n), start));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                if name == "ox" {
                    out.push((Tok::Ox, start));
                } else {
                    out.push((Tok::Ident(name), start));
                }
            }
            _ => {
                return Err(ExprError::Syntax {
                    pos: i,
                    message: format!("unexpected character '{c}'"),
                })
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// parser

#[derive(Debug, Clone, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Ox,
    Wedge,
}

#[derive(Debug, Clone, PartialEq)]
enum Ast {
    Num(Poly),
    Ident(String, usize),
    Neg(Box<Ast>),
    Pow(Box<Ast>, u32),
    Bin(Op, Box<Ast>, Box<Ast>),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            pos: self.pos(),
            message: message.into(),
        }
    }

    fn sum(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.tens()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.tens()?;
                    lhs = Ast::Bin(Op::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.tens()?;
                    lhs = Ast::Bin(Op::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn tens(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.prod()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Ox) => Op::Ox,
                Some(Tok::Wedge) => Op::Wedge,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.prod()?;
            lhs = Ast::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn prod(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            let rhs = self.unary()?;
            lhs = Ast::Bin(Op::Mul, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, ExprError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            let inner = self.unary()?;
            return Ok(Ast::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ExprError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        match self.peek().cloned() {
            Some(Tok::Int(n)) if n >= 0 && (n as u64) <= MAX_EXPONENT as u64 => {
                self.bump();
                Ok(Ast::Pow(Box::new(base), n as u32))
            }
            Some(Tok::Int(_)) => Err(self.err(format!(
                "exponent must be between 0 and {MAX_EXPONENT}"
            ))),
            _ => Err(self.err("expected a nonnegative integer exponent after '^'")),
        }
    }

    fn atom(&mut self) -> Result<Ast, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Int(p)) => {
                self.bump();
                if self.peek() != Some(&Tok::Slash) {
                    return Ok(Ast::Num(Poly::int(p)));
                }
                self.bump();
                match self.peek().cloned() {
                    Some(Tok::Int(0)) => Err(self.err("zero denominator in a rational literal")),
                    Some(Tok::Int(q)) => {
                        self.bump();
                        Ok(Ast::Num(Poly::one().scale(&rat(p, q))))
                    }
                    _ => Err(self.err("expected a denominator after '/'")),
                }
            }
            Some(Tok::Ident(name)) => {
                let pos = self.pos();
                self.bump();
                Ok(Ast::Ident(name, pos))
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.sum()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.bump();
                    Ok(inner)
                } else {
                    Err(self.err("missing closing ')'"))
                }
            }
            _ => Err(self.err("expected a name, a number, or '('")),
        }
    }
}

fn parse(text: &str) -> Result<Ast, ExprError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.chars().count(),
    };
    let ast = p.sum()?;
    match p.peek() {
        None => Ok(ast),
        Some(Tok::Slash) => Err(p.err("'/' only forms a rational literal directly after an integer")),
        Some(_) => Err(p.err("unexpected trailing input")),
    }
}

// ---------------------------------------------------------------------------
// values

/// Result of evaluating an expression: a parameter polynomial, an element of
/// the scope's algebra, or one of the graded form sectors over it.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(Poly),
    Elem(Element),
    Tens(Tensor),
    Wedge(WedgeForm),
    WedgeT(WedgeTensor),
}

impl Value {
    pub(crate) fn kind(&self) -> String {
        match self {
            Value::Scalar(_) => "a scalar".to_string(),
            Value::Elem(_) => "an algebra element".to_string(),
            Value::Tens(t) => format!("a {}-slot form tensor", t.slots),
            Value::Wedge(_) => "a two-form".to_string(),
            Value::WedgeT(_) => "a two-form ox one-form".to_string(),
        }
    }
}

/// Evaluation scope: an algebra for words, plus the form layer when the
/// algebra supports one-forms as first-class values.
pub struct Scope<'a, 'b> {
    pub algebra: &'a Presentation,
    pub forms: Option<&'b FormContext<'a>>,
}

impl<'a, 'b> Scope<'a, 'b> {
    /// Scope over the form layer; words live in the coefficient algebra.
    pub fn over_forms(ctx: &'b FormContext<'a>) -> Scope<'a, 'b> {
        Scope {
            algebra: ctx.coeff,
            forms: Some(ctx),
        }
    }

    /// Scope over a bare algebra; every name must be a generator or a
    /// derived element of it.
    pub fn plain(p: &'a Presentation) -> Scope<'a, 'b> {
        Scope {
            algebra: p,
            forms: None,
        }
    }

    pub fn eval(&self, text: &str) -> Result<Value, ExprError> {
        let ast = parse(text)?;
        self.eval_ast(&ast)
    }

    /// Canonical text of a value; parses back to the same value.
    pub fn render(&self, v: &Value) -> String {
        match v {
            Value::Scalar(p) => p.to_string(),
            Value::Elem(e) => self.algebra.format_element(e),
            Value::Tens(t) => self.ctx_for_render().format_tensor(t),
            Value::Wedge(w) => self.ctx_for_render().format_wedge(w),
            Value::WedgeT(wt) => self.ctx_for_render().format_wedge_tensor(wt),
        }
    }

    fn ctx_for_render(&self) -> &FormContext<'a> {
        // Form values can only be built by a scope that has the form layer.
        self.forms.expect("form value outside a form scope")
    }

    fn ctx(&self) -> Result<&'b FormContext<'a>, ExprError> {
        self.forms
            .ok_or_else(|| eval_err("form operations need the superspace form layer"))
    }

    fn eval_ast(&self, ast: &Ast) -> Result<Value, ExprError> {
        match ast {
            Ast::Num(p) => Ok(Value::Scalar(p.clone())),
            Ast::Ident(name, pos) => self.lookup(name, *pos),
            Ast::Neg(inner) => Ok(neg_value(&self.eval_ast(inner)?)),
            Ast::Pow(base, n) => self.pow_value(&self.eval_ast(base)?, *n),
            Ast::Bin(op, a, b) => {
                let lhs = self.eval_ast(a)?;
                let rhs = self.eval_ast(b)?;
                match op {
                    Op::Add => self.add_value(&lhs, &rhs),
                    Op::Sub => self.add_value(&lhs, &neg_value(&rhs)),
                    Op::Mul => self.mul_value(&lhs, &rhs),
                    Op::Ox => self.ox_value(&lhs, &rhs),
                    Op::Wedge => self.wedge_value(&lhs, &rhs),
                }
            }
        }
    }

    fn lookup(&self, name: &str, pos: usize) -> Result<Value, ExprError> {
        match name {
            "h" => return Ok(Value::Scalar(Poly::h())),
            "c0" => return Ok(Value::Scalar(Poly::sym(Symbol::C0))),
            "c1" => return Ok(Value::Scalar(Poly::sym(Symbol::C1))),
            "c2" => return Ok(Value::Scalar(Poly::sym(Symbol::C2))),
            _ => {}
        }
        if let Some(ctx) = self.forms {
            match name {
                "xi1" => return Ok(Value::Tens(Tensor::basis(ctx.coeff.id, &[0]))),
                "eta" => return Ok(Value::Tens(Tensor::basis(ctx.coeff.id, &[1]))),
                "xi2" => return Ok(Value::Tens(Tensor::basis(ctx.coeff.id, &[2]))),
                "rho" => return Ok(Value::Tens(ctx.rho()?)),
                "Lambda" => return Ok(Value::Tens(ctx.lambda())),
                "phi" => return Ok(Value::Elem(ctx.phi())),
                _ => {}
            }
        } else {
            let id = self.algebra.id;
            let grouplike = id == AlgebraId::Group || id == AlgebraId::Combined;
            let callike = id == AlgebraId::Calculus || id == AlgebraId::Combined;
            match name {
                "e" if grouplike => return Ok(Value::Elem(e_elem(self.algebra))),
                "beta" if grouplike => return Ok(Value::Elem(beta_elem(self.algebra))),
                "gamma" if grouplike => return Ok(Value::Elem(gamma_elem(self.algebra))),
                "rho" if callike => return Ok(Value::Elem(rho_element(self.algebra)?)),
                "phi" if callike => return Ok(Value::Elem(phi_element(self.algebra)?)),
                "Lambda" => {
                    return Err(eval_err(
                        "Lambda is a two-slot invariant tensor; it only exists over the \
                         superspace form layer",
                    ))
                }
                _ => {}
            }
        }
        if let Some(r) = self.algebra.table.rank_of(name) {
            return Ok(Value::Elem(Element::generator(self.algebra.id, r)));
        }
        Err(ExprError::Syntax {
            pos,
            message: format!(
                "unknown name '{name}' in the {} algebra",
                self.algebra.id.name()
            ),
        })
    }

    fn promote(&self, p: &Poly) -> Element {
        Element::scalar(self.algebra.id, p.clone())
    }

    fn add_value(&self, a: &Value, b: &Value) -> Result<Value, ExprError> {
        use Value::*;
        match (a, b) {
            (Scalar(p), Scalar(q)) => Ok(Scalar(p.add(q))),
            (Scalar(p), Elem(e)) => Ok(Elem(self.promote(p).add(e)?)),
            (Elem(e), Scalar(p)) => Ok(Elem(e.add(&self.promote(p))?)),
            (Elem(e), Elem(f)) => Ok(Elem(e.add(f)?)),
            (Tens(t), Tens(u)) => {
                if t.slots != u.slots {
                    return Err(eval_err(format!(
                        "cannot add a {}-slot and a {}-slot tensor",
                        t.slots, u.slots
                    )));
                }
                Ok(Tens(t.add(u)?))
            }
            (Wedge(w), Wedge(v)) => Ok(Wedge(w.add(v)?)),
            (WedgeT(w), WedgeT(v)) => Ok(WedgeT(w.add(v)?)),
            _ => Err(eval_err(format!(
                "cannot add {} and {}",
                a.kind(),
                b.kind()
            ))),
        }
    }

    fn mul_value(&self, a: &Value, b: &Value) -> Result<Value, ExprError> {
        use Value::*;
        match (a, b) {
            (Scalar(p), Scalar(q)) => Ok(Scalar(p.mul(q))),
            (Scalar(p), Elem(e)) => Ok(Elem(e.scale(p))),
            (Elem(e), Scalar(p)) => Ok(Elem(e.scale(p))),
            (Elem(e), Elem(f)) => Ok(Elem(self.algebra.multiply(e, f)?)),
            (Scalar(p), Tens(t)) => Ok(Tens(t.scale(p))),
            (Tens(t), Scalar(p)) => Ok(Tens(t.scale(p))),
            (Elem(f), Tens(t)) => Ok(Tens(self.ctx()?.scale_left(f, t)?)),
            (Tens(t), Elem(f)) => Ok(Tens(self.ctx()?.mul_right(t, f)?)),
            (Scalar(p), Wedge(w)) => Ok(Wedge(w.scale(p))),
            (Wedge(w), Scalar(p)) => Ok(Wedge(w.scale(p))),
            (Elem(f), Wedge(w)) => {
                let ctx = self.ctx()?;
                let s = wedge_section(ctx, w)?;
                Ok(Wedge(ctx.wedge_from_pair(&ctx.scale_left(f, &s)?)?))
            }
            (Wedge(w), Elem(f)) => {
                let ctx = self.ctx()?;
                let s = wedge_section(ctx, w)?;
                Ok(Wedge(ctx.wedge_from_pair(&ctx.mul_right(&s, f)?)?))
            }
            (Scalar(p), WedgeT(w)) => Ok(WedgeT(w.scale(p))),
            (WedgeT(w), Scalar(p)) => Ok(WedgeT(w.scale(p))),
            (Elem(f), WedgeT(w)) => {
                let ctx = self.ctx()?;
                let s = wedge_tensor_section(ctx, w)?;
                Ok(WedgeT(ctx.pi12(&ctx.scale_left(f, &s)?)?))
            }
            (WedgeT(w), Elem(f)) => {
                let ctx = self.ctx()?;
                let s = wedge_tensor_section(ctx, w)?;
                Ok(WedgeT(ctx.pi12(&ctx.mul_right(&s, f)?)?))
            }
            (Tens(_), Tens(_)) => Err(eval_err(
                "'*' does not combine form tensors; use 'ox' for the tensor product \
                 or '/\\' for the wedge",
            )),
            _ => Err(eval_err(format!(
                "cannot multiply {} by {}",
                a.kind(),
                b.kind()
            ))),
        }
    }

    fn pow_value(&self, a: &Value, n: u32) -> Result<Value, ExprError> {
        match a {
            Value::Scalar(p) => Ok(Value::Scalar(p.pow(n))),
            Value::Elem(e) => Ok(Value::Elem(self.algebra.power(e, n)?)),
            _ => Err(eval_err(format!(
                "'^' applies to scalars and algebra elements, not {}",
                a.kind()
            ))),
        }
    }

    fn ox_value(&self, a: &Value, b: &Value) -> Result<Value, ExprError> {
        use Value::*;
        match (a, b) {
            (Tens(t), Tens(u)) => Ok(Tens(self.ctx()?.tensor(t, u)?)),
            (Wedge(w), Tens(t)) if t.slots == 1 => {
                let ctx = self.ctx()?;
                let s = wedge_section(ctx, w)?;
                Ok(WedgeT(ctx.pi12(&ctx.tensor(&s, t)?)?))
            }
            (Wedge(_), Tens(t)) => Err(eval_err(format!(
                "a two-form pairs with a single one-form slot on the right, not {} slots",
                t.slots
            ))),
            _ => Err(eval_err(format!(
                "'ox' expects form tensors, got {} and {}",
                a.kind(),
                b.kind()
            ))),
        }
    }

    fn wedge_value(&self, a: &Value, b: &Value) -> Result<Value, ExprError> {
        use Value::*;
        match (a, b) {
            (Tens(t), Tens(u)) => {
                let ctx = self.ctx()?;
                let total = t.slots + u.slots;
                match total {
                    2 => Ok(Wedge(ctx.wedge_from_pair(&ctx.tensor(t, u)?)?)),
                    3 => Ok(WedgeT(ctx.pi12(&ctx.tensor(t, u)?)?)),
                    _ => Err(eval_err(format!(
                        "'/\\' of a {}-slot and a {}-slot tensor lands in degree {total}; \
                         only two and three total slots are defined",
                        t.slots, u.slots
                    ))),
                }
            }
            _ => Err(eval_err(format!(
                "'/\\' expects form tensors, got {} and {}",
                a.kind(),
                b.kind()
            ))),
        }
    }
}

fn neg_value(v: &Value) -> Value {
    match v {
        Value::Scalar(p) => Value::Scalar(p.neg()),
        Value::Elem(e) => Value::Elem(e.neg()),
        Value::Tens(t) => Value::Tens(t.neg()),
        Value::Wedge(w) => Value::Wedge(w.neg()),
        Value::WedgeT(w) => Value::WedgeT(w.neg()),
    }
}

// ---------------------------------------------------------------------------
// sections and derived elements

/// Embeds a two-form back into the two-slot tensors by sending each basis
/// element to its normally ordered pair. The projection restores the input,
/// so products and tensor extensions factor through this section soundly.
fn wedge_section(ctx: &FormContext, w: &WedgeForm) -> Result<Tensor, FormError> {
    let mut out = Tensor::zero(w.algebra, 2);
    for (k, e) in &w.terms {
        let (i, j) = WEDGE_BASIS[*k as usize];
        let t = ctx.scale_left(e, &Tensor::basis(w.algebra, &[i, j]))?;
        out = out.add(&t)?;
    }
    Ok(out)
}

/// Three-slot section of the two-form ox one-form sector.
fn wedge_tensor_section(ctx: &FormContext, wt: &WedgeTensor) -> Result<Tensor, FormError> {
    let mut out = Tensor::zero(wt.algebra, 3);
    for ((k, b), e) in &wt.terms {
        let (i, j) = WEDGE_BASIS[*k as usize];
        let t = ctx.scale_left(e, &Tensor::basis(wt.algebra, &[i, j, *b]))?;
        out = out.add(&t)?;
    }
    Ok(out)
}

/// The invariant one-form as an element of the calculus (or combined)
/// algebra: sum of J_ab X^a Xi^b over the nonzero entries of J.
fn rho_element(p: &Presentation) -> Result<Element, ExprError> {
    let base = if p.id == AlgebraId::Combined {
        CAL_SHIFT
    } else {
        0
    };
    let mut chain = Vec::new();
    for (a, row) in j_matrix().iter().enumerate() {
        for (b, c) in row.iter().enumerate() {
            if !c.is_zero() {
                chain.push((vec![base + 3 + a as u8, base + b as u8], c.clone()));
            }
        }
    }
    Ok(p.normalize_terms(chain)?)
}

/// The invariant length x^2 - 2 theta1 theta2 as an element.
fn phi_element(p: &Presentation) -> Result<Element, ExprError> {
    let xx = p.word_of(&["x", "x"])?;
    let tt = p.word_of(&["theta1", "theta2"])?;
    Ok(xx.sub(&tt.scale(&Poly::int(2)))?)
}

// ---------------------------------------------------------------------------
// scalar-only entry point

/// Parses a parameter expression over h, c0, c1, c2 and rationals.
pub fn scalar_expr(text: &str) -> Result<Poly, ExprError> {
    let ast = parse(text)?;
    eval_scalar(&ast)
}

fn eval_scalar(ast: &Ast) -> Result<Poly, ExprError> {
    match ast {
        Ast::Num(p) => Ok(p.clone()),
        Ast::Ident(name, pos) => match name.as_str() {
            "h" => Ok(Poly::h()),
            "c0" => Ok(Poly::sym(Symbol::C0)),
            "c1" => Ok(Poly::sym(Symbol::C1)),
            "c2" => Ok(Poly::sym(Symbol::C2)),
            _ => Err(ExprError::Syntax {
                pos: *pos,
                message: format!(
                    "'{name}' is not a scalar parameter; only h, c0, c1, c2 and \
                     rationals are allowed here"
                ),
            }),
        },
        Ast::Neg(inner) => Ok(eval_scalar(inner)?.neg()),
        Ast::Pow(base, n) => Ok(eval_scalar(base)?.pow(*n)),
        Ast::Bin(op, a, b) => {
            let p = eval_scalar(a)?;
            let q = eval_scalar(b)?;
            match op {
                Op::Add => Ok(p.add(&q)),
                Op::Sub => Ok(p.sub(&q)),
                Op::Mul => Ok(p.mul(&q)),
                Op::Ox | Op::Wedge => Err(eval_err(
                    "'ox' and '/\\' are not scalar operations",
                )),
            }
        }
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::Algebras;
    use proptest::prelude::*;

    fn algebras() -> Algebras {
        Algebras::build().expect("presentations build")
    }

    #[test]
    fn scalar_literals_and_precedence() {
        let half_h_plus_h2 = Poly::h().pow(2).add(&Poly::h().scale(&rat(1, 2)));
        assert_eq!(scalar_expr("1/2*h + h^2").unwrap(), half_h_plus_h2);
        assert_eq!(scalar_expr("2^3").unwrap(), Poly::int(8));
        assert_eq!(scalar_expr("1 - 2 - 3").unwrap(), Poly::int(-4));
        assert_eq!(
            scalar_expr("-h^2").unwrap(),
            Poly::h().pow(2).neg(),
            "unary minus binds looser than the power"
        );
        assert_eq!(
            scalar_expr("-(c0 - c1)^2").unwrap(),
            Poly::sym(Symbol::C0)
                .sub(&Poly::sym(Symbol::C1))
                .pow(2)
                .neg()
        );
    }

    #[test]
    fn scalar_position_rejects_algebra_words() {
        assert!(matches!(
            scalar_expr("theta1"),
            Err(ExprError::Syntax { .. })
        ));
        assert!(scalar_expr("h ox h").is_err());
    }

    #[test]
    fn words_normalize_in_each_algebra() {
        let a = algebras();
        let ctx = FormContext::superspace(&a).unwrap();
        let scope = Scope::over_forms(&ctx);
        let direct = a
            .superspace
            .normalize(&a.superspace.word_of(&["x", "theta1"]).unwrap())
            .unwrap();
        assert_eq!(scope.eval("x*theta1").unwrap(), Value::Elem(direct));

        let g = Scope::plain(&a.group);
        let cb = a.group.word_of(&["c", "b"]).unwrap();
        assert_eq!(g.eval("c*b").unwrap(), Value::Elem(cb));

        let s = Scope::over_forms(&ctx);
        let x = ctx.coordinate(1);
        let sq = a.superspace.multiply(&x, &x).unwrap();
        assert_eq!(s.eval("x^2").unwrap(), Value::Elem(sq));
    }

    #[test]
    fn form_names_build_tensors_and_wedges() {
        let a = algebras();
        let ctx = FormContext::superspace(&a).unwrap();
        let scope = Scope::over_forms(&ctx);

        assert_eq!(scope.eval("rho").unwrap(), Value::Tens(ctx.rho().unwrap()));
        assert_eq!(scope.eval("Lambda").unwrap(), Value::Tens(ctx.lambda()));

        let xi1 = Tensor::basis(ctx.coeff.id, &[0]);
        let eta = Tensor::basis(ctx.coeff.id, &[1]);
        let pair = ctx.tensor(&xi1, &eta).unwrap();
        let scaled = ctx.scale_left(&ctx.coordinate(1), &pair).unwrap();
        assert_eq!(scope.eval("x * (xi1 ox eta)").unwrap(), Value::Tens(scaled));

        let w = ctx.wedge_from_pair(&pair).unwrap();
        assert_eq!(scope.eval("xi1 /\\ eta").unwrap(), Value::Wedge(w));

        let rr = scope.eval("rho ox rho").unwrap();
        assert_eq!(rr, Value::Tens(ctx.varpi().unwrap()));

        let triple = ctx
            .pi12(&ctx.tensor(&xi1, &ctx.varpi().unwrap()).unwrap())
            .unwrap();
        assert_eq!(
            scope.eval("xi1 /\\ (rho ox rho)").unwrap(),
            Value::WedgeT(triple)
        );

        let shaped = ctx
            .pi12(&ctx.tensor(&pair, &Tensor::basis(ctx.coeff.id, &[2])).unwrap())
            .unwrap();
        assert_eq!(
            scope.eval("(xi1 /\\ eta) ox xi2").unwrap(),
            Value::WedgeT(shaped)
        );
    }

    #[test]
    fn group_macros_expand() {
        let a = algebras();
        let scope = Scope::plain(&a.group);
        assert_eq!(
            scope.eval("e").unwrap(),
            Value::Elem(e_elem(&a.group))
        );
        // e - 1 - alpha*delta + (1/2)*h*a*c must cancel exactly.
        let v = scope
            .eval("e - 1 - alpha*delta + (1/2)*h*a*c")
            .unwrap();
        assert_eq!(v, Value::Elem(Element::zero(a.group.id)));
    }

    #[test]
    fn calculus_invariants_match_the_form_layer() {
        let a = algebras();
        let ctx = FormContext::superspace(&a).unwrap();
        let from_forms = ctx.tensor_to_source(&ctx.rho().unwrap()).unwrap();
        let scope = Scope::plain(&a.calculus);
        assert_eq!(scope.eval("rho").unwrap(), Value::Elem(from_forms));

        let phi = scope.eval("phi").unwrap();
        let direct = a.calculus.word_of(&["x", "x"]).unwrap().sub(
            &a.calculus
                .word_of(&["theta1", "theta2"])
                .unwrap()
                .scale(&Poly::int(2)),
        );
        assert_eq!(phi, Value::Elem(direct.unwrap()));
    }

    #[test]
    fn mismatches_are_reported() {
        let a = algebras();
        let ctx = FormContext::superspace(&a).unwrap();
        let scope = Scope::over_forms(&ctx);

        let err = scope.eval("xi1 + x").unwrap_err();
        assert!(err.to_string().contains("cannot add"), "{err}");

        let err = scope.eval("xi1 * eta").unwrap_err();
        assert!(err.to_string().contains("ox"), "{err}");

        let err = scope.eval("xi1 ^ 2").unwrap_err();
        assert!(err.to_string().contains("'^'"), "{err}");

        let err = scope.eval("nosuch").unwrap_err();
        assert!(err.to_string().contains("nosuch"), "{err}");

        let err = scope.eval("x/2").unwrap_err();
        assert!(err.to_string().contains("rational literal"), "{err}");

        assert!(scope.eval("1/0").is_err());
        assert!(scope.eval("x +").is_err());
        assert!(scope.eval("(x").is_err());
        assert!(scope.eval(")").is_err());

        let plain = Scope::plain(&a.calculus);
        let err = plain.eval("xi1 ox eta").unwrap_err();
        assert!(err.to_string().contains("form"), "{err}");
    }

    /// A rendered scalar element reads back as a plain scalar; both denote
    /// the same object, so round trips compare modulo that embedding.
    fn lift(scope: &Scope, v: &Value) -> Value {
        match v {
            Value::Scalar(p) => Value::Elem(Element::scalar(scope.algebra.id, p.clone())),
            other => other.clone(),
        }
    }

    #[test]
    fn renders_parse_back() {
        let a = algebras();
        let ctx = FormContext::superspace(&a).unwrap();
        let scope = Scope::over_forms(&ctx);
        for text in [
            "x*theta1 + theta2",
            "rho ox rho",
            "x * (xi1 /\\ eta) - xi2 /\\ xi2",
            "(1 - h^2) * (xi1 /\\ (rho ox rho))",
            "phi^2 - 2*phi + 1",
        ] {
            let v = scope.eval(text).unwrap();
            let rendered = scope.render(&v);
            let back = scope.eval(&rendered).unwrap();
            assert_eq!(
                lift(&scope, &back),
                lift(&scope, &v),
                "render of '{text}' was '{rendered}'"
            );
        }
    }

    // ----- property: render/parse round trip over random values -----

    fn small_poly() -> impl Strategy<Value = Poly> {
        let mono = (
            -9i64..=9,
            1i64..=4,
            prop::sample::select(vec![
                None,
                Some(Symbol::H),
                Some(Symbol::C0),
                Some(Symbol::C1),
            ]),
            1u32..=2,
        )
            .prop_map(|(n, d, sym, e)| {
                if n == 0 {
                    return Poly::zero();
                }
                let base = match sym {
                    None => Poly::one(),
                    Some(s) => Poly::sym(s).pow(e),
                };
                base.scale(&rat(n, d))
            });
        prop::collection::vec(mono, 1..=3)
            .prop_map(|ms| ms.iter().fold(Poly::zero(), |acc, m| acc.add(m)))
    }

    fn superspace_element(a: &'static Algebras) -> impl Strategy<Value = Element> {
        let word = prop::collection::vec(0u8..3, 0..=3);
        let term = (word, small_poly());
        prop::collection::vec(term, 1..=2).prop_map(move |terms| {
            a.superspace
                .normalize_terms(terms)
                .expect("superspace words normalize")
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn element_round_trip(e in superspace_element(&ALGEBRAS)) {
            let ctx = FormContext::superspace(&ALGEBRAS).unwrap();
            let scope = Scope::over_forms(&ctx);
            let v = Value::Elem(e);
            let rendered = scope.render(&v);
            let back = scope.eval(&rendered).unwrap();
            prop_assert_eq!(lift(&scope, &back), lift(&scope, &v), "rendered: {}", rendered);
        }

        #[test]
        fn tensor_round_trip(
            coeffs in prop::collection::vec(superspace_element(&ALGEBRAS), 1..=2),
            labels in prop::collection::vec(prop::collection::vec(0u8..3, 2), 1..=2),
        ) {
            let ctx = FormContext::superspace(&ALGEBRAS).unwrap();
            let scope = Scope::over_forms(&ctx);
            let mut t = Tensor::zero(ctx.coeff.id, 2);
            for (e, ls) in coeffs.iter().zip(labels.iter()) {
                let basis = Tensor::basis(ctx.coeff.id, ls);
                t = t.add(&ctx.scale_left(e, &basis).unwrap()).unwrap();
            }
            let v = Value::Tens(t);
            let rendered = scope.render(&v);
            if rendered == "0" {
                // A zero two-slot tensor renders without slot data; skip.
                return Ok(());
            }
            let back = scope.eval(&rendered).unwrap();
            prop_assert_eq!(back, v, "rendered: {}", rendered);
        }

        #[test]
        fn wedge_round_trip(
            coeffs in prop::collection::vec(superspace_element(&ALGEBRAS), 1..=2),
            ks in prop::collection::vec(0u8..5, 1..=2),
        ) {
            let ctx = FormContext::superspace(&ALGEBRAS).unwrap();
            let scope = Scope::over_forms(&ctx);
            let mut w = WedgeForm::zero(ctx.coeff.id);
            for (e, k) in coeffs.iter().zip(ks.iter()) {
                let (i, j) = WEDGE_BASIS[*k as usize];
                let pair = Tensor::basis(ctx.coeff.id, &[i, j]);
                let scaled = ctx.scale_left(e, &pair).unwrap();
                w = w.add(&ctx.wedge_from_pair(&scaled).unwrap()).unwrap();
            }
            let v = Value::Wedge(w);
            let rendered = scope.render(&v);
            if rendered == "0" {
                return Ok(());
            }
            let back = scope.eval(&rendered).unwrap();
            prop_assert_eq!(back, v, "rendered: {}", rendered);
        }
    }

    // Built once: presentation construction is too heavy per proptest case.
    static ALGEBRAS: std::sync::LazyLock<Algebras> =
        std::sync::LazyLock::new(|| Algebras::build().expect("presentations build"));
}
