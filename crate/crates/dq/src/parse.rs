//! Text grammar shared by the library and the CLI.
//!
//! One lexer and one precedence-climbing parser serve all expression kinds;
//! the kind gates which atoms are legal, so wrong-kind constructs (a wedge
//! inside a polynomial, a derivative token outside operator slots) fail at
//! parse time with a position.
//!
//! Grammar sketch (whitespace-insensitive):
//!
//! ```text
//! polynomial:  rationals p/q, the imaginary unit i, variables x1..xN,
//!              + - * ** and parentheses
//! multivector: polynomial atoms plus d1..dN and the wedge ^
//!              (coefficients prefix-multiplied: x2*d2^d3)
//! operator:    sums of `coef [ D1 | D2 | ... ]` with each slot Dk a
//!              space-separated product of d<i> tokens; a bare polynomial
//!              is an arity-0 operator
//! series:      `k: expr` entries joined by `;` (missing orders are zero),
//!              or the single entry `0` for the zero series
//! ```

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{DqError, Result};
use crate::multidiff::MultiDiffOp;
use crate::poly::Polynomial;
use crate::polyvector::PolyVector;
use crate::scalar::{GaussianRational, Rational};
use crate::series::HbarSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseKind {
    Polynomial,
    Multivector,
    Operator,
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub node: ExprNode,
    pub pos: usize,
}

#[derive(Debug, Clone)]
pub enum ExprNode {
    Rational(Rational),
    ImaginaryUnit,
    /// 1-based variable `x_i`.
    Var(usize),
    /// 1-based coordinate field `d_i`.
    Partial(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Wedge(Box<Expr>, Box<Expr>),
    /// `coef [ D1 | D2 | ... ]`, slots as 1-based derivative multisets.
    OpTerm {
        coeff: Option<Box<Expr>>,
        slots: Vec<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Imaginary,
    Var(usize),
    Partial(usize),
    Plus,
    Minus,
    Star,
    DoubleStar,
    Caret,
    Slash,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Pipe,
    Colon,
    Semi,
}

fn err(pos: usize, msg: impl Into<String>) -> DqError {
    DqError::Parse { pos, msg: msg.into() }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                if bytes.get(i + 1) == Some(&b'*') {
                    toks.push((Tok::DoubleStar, i));
                    i += 2;
                } else {
                    toks.push((Tok::Star, i));
                    i += 1;
                }
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBracket, i));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBracket, i));
                i += 1;
            }
            '|' => {
                toks.push((Tok::Pipe, i));
                i += 1;
            }
            ':' => {
                toks.push((Tok::Colon, i));
                i += 1;
            }
            ';' => {
                toks.push((Tok::Semi, i));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = src[start..i]
                    .parse()
                    .map_err(|_| err(start, "invalid integer literal"))?;
                toks.push((Tok::Int(n), start));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &src[start..i];
                let tok = classify_ident(word, start)?;
                toks.push((tok, start));
            }
            _ => return Err(err(i, format!("unexpected character '{}'", c))),
        }
    }
    Ok(toks)
}

fn classify_ident(word: &str, pos: usize) -> Result<Tok> {
    if word == "i" {
        return Ok(Tok::Imaginary);
    }
    let (head, tail) = word.split_at(1);
    let index = || -> Result<usize> {
        let n: usize = tail
            .parse()
            .map_err(|_| err(pos, format!("bad index in '{}'", word)))?;
        if n == 0 {
            return Err(err(pos, format!("indices are 1-based ('{}')", word)));
        }
        Ok(n)
    };
    match head {
        "x" if !tail.is_empty() => Ok(Tok::Var(index()?)),
        "d" if !tail.is_empty() => Ok(Tok::Partial(index()?)),
        _ => Err(err(
            pos,
            format!("unknown identifier '{}' (expected x<k>, d<k> or i)", word),
        )),
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    kind: ParseKind,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_pos(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<usize> {
        let pos = self.peek_pos();
        if self.eat(&tok) {
            Ok(pos)
        } else {
            Err(err(pos, format!("expected {}", what)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        if self.kind == ParseKind::Operator {
            return self.operator_sum();
        }
        self.sum()
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.wedge()?;
        loop {
            let pos = self.peek_pos();
            if self.eat(&Tok::Plus) {
                let rhs = self.wedge()?;
                lhs = Expr { node: ExprNode::Add(Box::new(lhs), Box::new(rhs)), pos };
            } else if self.eat(&Tok::Minus) {
                let rhs = self.wedge()?;
                lhs = Expr { node: ExprNode::Sub(Box::new(lhs), Box::new(rhs)), pos };
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn wedge(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            let pos = self.peek_pos();
            if self.peek() == Some(&Tok::Caret) {
                if self.kind != ParseKind::Multivector {
                    return Err(err(
                        pos,
                        "the wedge '^' is only valid in multivector expressions",
                    ));
                }
                self.bump();
                let rhs = self.product()?;
                lhs = Expr { node: ExprNode::Wedge(Box::new(lhs), Box::new(rhs)), pos };
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.peek_pos();
            if self.eat(&Tok::Star) {
                let rhs = self.unary()?;
                lhs = Expr { node: ExprNode::Mul(Box::new(lhs), Box::new(rhs)), pos };
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        let pos = self.peek_pos();
        if self.eat(&Tok::Minus) {
            let inner = self.unary()?;
            return Ok(Expr { node: ExprNode::Neg(Box::new(inner)), pos });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::DoubleStar) {
            let pos = self.peek_pos();
            self.bump();
            let exp_pos = self.peek_pos();
            match self.bump() {
                Some((Tok::Int(n), _)) => {
                    let exp = n.to_u32().ok_or_else(|| {
                        err(exp_pos, "exponent does not fit in a machine integer")
                    })?;
                    Ok(Expr { node: ExprNode::Pow(Box::new(base), exp), pos })
                }
                _ => Err(err(exp_pos, "expected a non-negative integer exponent after '**'")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.peek_pos();
        match self.bump() {
            Some((Tok::Int(n), _)) => {
                // optional rational literal p/q
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    let qpos = self.peek_pos();
                    match self.bump() {
                        Some((Tok::Int(q), _)) => {
                            if q.is_zero() {
                                return Err(err(qpos, "zero denominator"));
                            }
                            Ok(Expr {
                                node: ExprNode::Rational(Rational::new(n, q)),
                                pos,
                            })
                        }
                        _ => Err(err(qpos, "expected a denominator after '/'")),
                    }
                } else {
                    Ok(Expr { node: ExprNode::Rational(Rational::from_integer(n)), pos })
                }
            }
            Some((Tok::Imaginary, _)) => Ok(Expr { node: ExprNode::ImaginaryUnit, pos }),
            Some((Tok::Var(k), _)) => Ok(Expr { node: ExprNode::Var(k), pos }),
            Some((Tok::Partial(k), _)) => {
                match self.kind {
                    ParseKind::Multivector => Ok(Expr { node: ExprNode::Partial(k), pos }),
                    ParseKind::Operator => Err(err(
                        pos,
                        "derivative tokens belong inside [ ... ] slots in operator expressions",
                    )),
                    ParseKind::Polynomial => Err(err(
                        pos,
                        "derivative tokens are not allowed in a polynomial",
                    )),
                }
            }
            Some((Tok::LParen, _)) => {
                let inner = if self.kind == ParseKind::Operator {
                    // parenthesized coefficients are polynomial sums
                    self.sum()?
                } else {
                    self.expr()?
                };
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some((Tok::LBracket, _)) => Err(err(
                pos,
                if self.kind == ParseKind::Operator {
                    "operator slot list cannot appear here"
                } else {
                    "operator slot lists are only valid in operator expressions"
                },
            )),
            Some((t, _)) => Err(err(pos, format!("unexpected token {:?}", t))),
            None => Err(err(pos, "unexpected end of input")),
        }
    }

    // operator grammar: sums of terms `[-] [coef] [ slots ]` or plain
    // polynomial terms (arity 0)
    fn operator_sum(&mut self) -> Result<Expr> {
        let mut lhs = self.operator_term()?;
        loop {
            let pos = self.peek_pos();
            if self.eat(&Tok::Plus) {
                let rhs = self.operator_term()?;
                lhs = Expr { node: ExprNode::Add(Box::new(lhs), Box::new(rhs)), pos };
            } else if self.eat(&Tok::Minus) {
                let rhs = self.operator_term()?;
                lhs = Expr { node: ExprNode::Sub(Box::new(lhs), Box::new(rhs)), pos };
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn operator_term(&mut self) -> Result<Expr> {
        let pos = self.peek_pos();
        if self.eat(&Tok::Minus) {
            let inner = self.operator_term()?;
            return Ok(Expr { node: ExprNode::Neg(Box::new(inner)), pos });
        }
        if self.peek() == Some(&Tok::LBracket) {
            let slots = self.bracket_group()?;
            return Ok(Expr { node: ExprNode::OpTerm { coeff: None, slots }, pos });
        }
        // a polynomial factor, optionally followed by a slot list
        let coeff = self.product()?;
        if self.peek() == Some(&Tok::LBracket) {
            let slots = self.bracket_group()?;
            Ok(Expr {
                node: ExprNode::OpTerm { coeff: Some(Box::new(coeff)), slots },
                pos,
            })
        } else {
            Ok(coeff)
        }
    }

    fn bracket_group(&mut self) -> Result<Vec<Vec<usize>>> {
        self.expect(Tok::LBracket, "'['")?;
        let mut slots = Vec::new();
        loop {
            let mut slot = Vec::new();
            while let Some(Tok::Partial(k)) = self.peek() {
                slot.push(*k);
                self.bump();
            }
            slot.sort_unstable();
            slots.push(slot);
            if self.eat(&Tok::Pipe) {
                continue;
            }
            self.expect(Tok::RBracket, "']' or '|' in operator slot list")?;
            break;
        }
        Ok(slots)
    }
}

/// Parse a single expression of the given kind.
pub fn parse_expr(src: &str, kind: ParseKind) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, kind, end: src.len() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err(p.peek_pos(), "trailing input after expression"));
    }
    Ok(e)
}

/// Parse `k: expr; k: expr; ...` series entries (a single `0` means the
/// zero series).
pub fn parse_series_entries(src: &str, kind: ParseKind) -> Result<Vec<(usize, Expr)>> {
    if src.trim() == "0" {
        return Ok(Vec::new());
    }
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, kind, end: src.len() };
    let mut entries = Vec::new();
    loop {
        let kpos = p.peek_pos();
        let order = match p.bump() {
            Some((Tok::Int(n), _)) => n
                .to_usize()
                .ok_or_else(|| err(kpos, "series order too large"))?,
            _ => return Err(err(kpos, "expected a series order like '0:'")),
        };
        p.expect(Tok::Colon, "':' after series order")?;
        // consume tokens up to the next top-level ';' by parsing an expr
        let e = p.expr()?;
        entries.push((order, e));
        if p.eat(&Tok::Semi) {
            continue;
        }
        if p.pos != p.toks.len() {
            return Err(err(p.peek_pos(), "expected ';' between series entries"));
        }
        break;
    }
    Ok(entries)
}

/// Largest 1-based variable or derivative index mentioned.
pub fn max_index(expr: &Expr) -> usize {
    match &expr.node {
        ExprNode::Rational(_) | ExprNode::ImaginaryUnit => 0,
        ExprNode::Var(k) | ExprNode::Partial(k) => *k,
        ExprNode::Neg(e) | ExprNode::Pow(e, _) => max_index(e),
        ExprNode::Add(a, b) | ExprNode::Sub(a, b) | ExprNode::Mul(a, b) | ExprNode::Wedge(a, b) => {
            max_index(a).max(max_index(b))
        }
        ExprNode::OpTerm { coeff, slots } => {
            let c = coeff.as_deref().map(max_index).unwrap_or(0);
            let s = slots
                .iter()
                .flat_map(|slot| slot.iter().copied())
                .max()
                .unwrap_or(0);
            c.max(s)
        }
    }
}

pub fn lower_polynomial(expr: &Expr, dim: usize) -> Result<Polynomial> {
    match &expr.node {
        ExprNode::Rational(r) => Ok(Polynomial::constant(
            dim,
            GaussianRational::from_rational(r.clone()),
        )),
        ExprNode::ImaginaryUnit => Ok(Polynomial::constant(dim, GaussianRational::i())),
        ExprNode::Var(k) => Polynomial::var(dim, *k),
        ExprNode::Neg(e) => Ok(lower_polynomial(e, dim)?.neg()),
        ExprNode::Add(a, b) => lower_polynomial(a, dim)?.add(&lower_polynomial(b, dim)?),
        ExprNode::Sub(a, b) => lower_polynomial(a, dim)?.sub(&lower_polynomial(b, dim)?),
        ExprNode::Mul(a, b) => lower_polynomial(a, dim)?.mul(&lower_polynomial(b, dim)?),
        ExprNode::Pow(e, n) => Ok(lower_polynomial(e, dim)?.pow(*n)),
        ExprNode::Partial(_) | ExprNode::Wedge(..) | ExprNode::OpTerm { .. } => Err(err(
            expr.pos,
            "not a polynomial expression",
        )),
    }
}

pub fn lower_multivector(expr: &Expr, dim: usize) -> Result<PolyVector> {
    match &expr.node {
        ExprNode::Partial(k) => PolyVector::basis_vector(dim, *k),
        ExprNode::Neg(e) => Ok(lower_multivector(e, dim)?.neg()),
        ExprNode::Add(a, b) => lower_multivector(a, dim)?.add(&lower_multivector(b, dim)?),
        ExprNode::Sub(a, b) => lower_multivector(a, dim)?.sub(&lower_multivector(b, dim)?),
        ExprNode::Wedge(a, b) => lower_multivector(a, dim)?.wedge(&lower_multivector(b, dim)?),
        ExprNode::Mul(a, b) => {
            let av = lower_multivector(a, dim)?;
            let bv = lower_multivector(b, dim)?;
            if av.degree() == 0 {
                bv.scale_poly(&av.as_polynomial()?)
            } else if bv.degree() == 0 {
                av.scale_poly(&bv.as_polynomial()?)
            } else {
                Err(err(
                    expr.pos,
                    "'*' needs a polynomial factor; use '^' to wedge multivectors",
                ))
            }
        }
        ExprNode::Pow(e, n) => {
            let v = lower_multivector(e, dim)?;
            let p = v.as_polynomial().map_err(|_| {
                err(expr.pos, "'**' applies to polynomial factors only")
            })?;
            Ok(PolyVector::from_polynomial(p.pow(*n)))
        }
        _ => Ok(PolyVector::from_polynomial(lower_polynomial(expr, dim)?)),
    }
}

pub fn lower_operator(expr: &Expr, dim: usize) -> Result<MultiDiffOp> {
    match &expr.node {
        ExprNode::OpTerm { coeff, slots } => {
            let c = match coeff {
                Some(e) => lower_polynomial(e, dim)?,
                None => Polynomial::one(dim),
            };
            for slot in slots {
                for &k in slot {
                    if k > dim {
                        return Err(DqError::IndexOutOfRange(k, dim));
                    }
                }
            }
            MultiDiffOp::from_terms(dim, slots.len(), vec![(slots.clone(), c)])
        }
        ExprNode::Neg(e) => Ok(lower_operator(e, dim)?.neg()),
        ExprNode::Add(a, b) => lower_operator(a, dim)?.add(&lower_operator(b, dim)?),
        ExprNode::Sub(a, b) => lower_operator(a, dim)?.sub(&lower_operator(b, dim)?),
        _ => Ok(MultiDiffOp::constant_cochain(lower_polynomial(expr, dim)?)),
    }
}

fn infer_dim(entries_max: usize, dim: Option<usize>) -> Result<usize> {
    match dim {
        Some(d) => {
            if entries_max > d {
                Err(DqError::IndexOutOfRange(entries_max, d))
            } else {
                Ok(d)
            }
        }
        None => Ok(entries_max.max(1)),
    }
}

/// One-shot parse helpers: dimension is taken from `dim` or inferred as the
/// largest index used.
pub fn polynomial(src: &str, dim: Option<usize>) -> Result<Polynomial> {
    let e = parse_expr(src, ParseKind::Polynomial)?;
    let d = infer_dim(max_index(&e), dim)?;
    lower_polynomial(&e, d)
}

pub fn multivector(src: &str, dim: Option<usize>) -> Result<PolyVector> {
    let e = parse_expr(src, ParseKind::Multivector)?;
    let d = infer_dim(max_index(&e), dim)?;
    lower_multivector(&e, d)
}

pub fn operator(src: &str, dim: Option<usize>) -> Result<MultiDiffOp> {
    let e = parse_expr(src, ParseKind::Operator)?;
    let d = infer_dim(max_index(&e), dim)?;
    lower_operator(&e, d)
}

/// Parse a series of polynomials into an [`HbarSeries`].
pub fn polynomial_series(
    src: &str,
    dim: usize,
    order: usize,
) -> Result<HbarSeries<Polynomial>> {
    let entries = parse_series_entries(src, ParseKind::Polynomial)?;
    let mut s = HbarSeries::zero(&Polynomial::zero(dim), order);
    for (k, e) in entries {
        if k > order {
            return Err(DqError::domain(format!(
                "series entry at order {} exceeds truncation order {}",
                k, order
            )));
        }
        s.set_coeff(k, lower_polynomial(&e, dim)?);
    }
    Ok(s)
}

/// Parse a series of multivectors, all of one geometric degree.
pub fn multivector_series(
    src: &str,
    dim: usize,
    order: usize,
    degree: usize,
) -> Result<HbarSeries<PolyVector>> {
    let entries = parse_series_entries(src, ParseKind::Multivector)?;
    let mut s = HbarSeries::zero(&PolyVector::zero(dim, degree), order);
    for (k, e) in entries {
        if k > order {
            return Err(DqError::domain(format!(
                "series entry at order {} exceeds truncation order {}",
                k, order
            )));
        }
        let v = lower_multivector(&e, dim)?;
        if !v.is_zero() && v.degree() != degree {
            return Err(DqError::DegreeMismatch { expected: degree, got: v.degree() });
        }
        let v = if v.is_zero() { PolyVector::zero(dim, degree) } else { v };
        s.set_coeff(k, v);
    }
    Ok(s)
}

/// Parse a series of operators, all of one arity.
pub fn operator_series(
    src: &str,
    dim: usize,
    order: usize,
    arity: usize,
) -> Result<HbarSeries<MultiDiffOp>> {
    let entries = parse_series_entries(src, ParseKind::Operator)?;
    let mut s = HbarSeries::zero(&MultiDiffOp::zero(dim, arity), order);
    for (k, e) in entries {
        if k > order {
            return Err(DqError::domain(format!(
                "series entry at order {} exceeds truncation order {}",
                k, order
            )));
        }
        let v = lower_operator(&e, dim)?;
        if !v.is_zero() && v.arity() != arity {
            return Err(DqError::ArityMismatch { arity, args: v.arity() });
        }
        let v = if v.is_zero() { MultiDiffOp::zero(dim, arity) } else { v };
        s.set_coeff(k, v);
    }
    Ok(s)
}

/// Largest index used across series entries, for dimension inference.
pub fn series_max_index(src: &str, kind: ParseKind) -> Result<usize> {
    Ok(parse_series_entries(src, kind)?
        .iter()
        .map(|(_, e)| max_index(e))
        .max()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_grammar() {
        let p = polynomial("x1**2 - 1/2", None).unwrap();
        assert_eq!(p.to_string(), "x1**2 - 1/2");
        let q = polynomial("(x1 + x2)**2", None).unwrap();
        assert_eq!(q.to_string(), "x1**2 + 2*x1*x2 + x2**2");
        let c = polynomial("1 - 2/3*i", None).unwrap();
        assert_eq!(c.to_string(), "1 - 2/3*i");
        // juxtaposition is not multiplication
        assert!(polynomial("x1 x2", None).is_err());
        // wedge is rejected with a position
        match polynomial("d1^d2", None) {
            Err(DqError::Parse { pos, .. }) => assert_eq!(pos, 0),
            other => panic!("expected parse error, got {:?}", other),
        }
    }

    #[test]
    fn multivector_grammar() {
        let v = multivector("d1^d2 + x2*d2^d3", None).unwrap();
        assert_eq!(v.dim(), 3);
        assert_eq!(v.degree(), 2);
        assert_eq!(v.to_string(), "d1^d2 + x2*d2^d3");
        // antisymmetry through the parser
        let w = multivector("d2^d1", Some(2)).unwrap();
        assert_eq!(w.to_string(), "-d1^d2");
        // explicit dim must cover the indices used
        assert!(multivector("d1^d3", Some(2)).is_err());
    }

    #[test]
    fn operator_grammar() {
        let op = operator("x1 [ d1 | d2 d2 ]", None).unwrap();
        assert_eq!(op.arity(), 2);
        assert_eq!(op.to_string(), "x1 [ d1 | d2 d2 ]");
        let id = operator("[ ]", Some(2)).unwrap();
        assert_eq!(id, MultiDiffOp::identity(2));
        let m = operator("[ | ]", Some(2)).unwrap();
        assert_eq!(m, MultiDiffOp::mult_op(2));
        // arity-0 operator is a bare polynomial
        let c = operator("x1**2 + x2", Some(2)).unwrap();
        assert_eq!(c.arity(), 0);
        // empty first slot
        let e = operator("[ | d2 ]", Some(2)).unwrap();
        assert_eq!(e.to_string(), "[ | d2 ]");
        // mixed arity is rejected
        assert!(operator("[ d1 ] + [ d1 | d2 ]", Some(2)).is_err());
    }

    #[test]
    fn series_grammar() {
        let s = polynomial_series("0: x1; 2: x2**2", 2, 3).unwrap();
        assert_eq!(s.coeff(0).to_string(), "x1");
        assert!(s.coeff(1).is_zero());
        assert_eq!(s.coeff(2).to_string(), "x2**2");
        assert!(s.coeff(3).is_zero());
        // zero series
        assert!(polynomial_series("0", 2, 2).unwrap().is_zero());
        // entry beyond the truncation order
        assert!(polynomial_series("4: x1", 2, 3).is_err());
        // multivector series of fixed degree
        let vf = multivector_series("0: x1*d1; 1: d2", 2, 2, 1).unwrap();
        assert_eq!(vf.coeff(0).to_string(), "x1*d1");
        assert_eq!(vf.coeff(1).to_string(), "d2");
        // degree clash
        assert!(multivector_series("0: d1^d2", 2, 2, 1).is_err());
    }

    #[test]
    fn roundtrip_on_printed_forms() {
        for src in [
            "x1**2 - 1/2",
            "x1 + i*x2",
            "-x1*x2 + 2/3",
            "(1 - 2/3*i)*x1",
        ] {
            let v = polynomial(src, Some(3)).unwrap();
            let reparsed = polynomial(&v.to_string(), Some(3)).unwrap();
            assert_eq!(v, reparsed);
        }
        for src in ["d1^d2 + x2*d2^d3", "-d1 + x1*d2", "x1*x2*d1^d2^d3"] {
            let v = multivector(src, Some(3)).unwrap();
            let reparsed = multivector(&v.to_string(), Some(3)).unwrap();
            assert_eq!(v, reparsed);
        }
        for src in [
            "x1 [ d1 | d2 d2 ]",
            "[ | ] - [ d1 | d2 ]",
            "(x1 + x2) [ d1 d1 ]",
        ] {
            let v = operator(src, Some(2)).unwrap();
            let reparsed = operator(&v.to_string(), Some(2)).unwrap();
            assert_eq!(v, reparsed);
        }
    }

    #[test]
    fn diagnostics_carry_positions() {
        match polynomial("x1 + ", None) {
            Err(DqError::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected parse error, got {:?}", other),
        }
        match polynomial("x1 @ x2", None) {
            Err(DqError::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("expected parse error, got {:?}", other),
        }
        match polynomial("1/0", None) {
            Err(DqError::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("expected parse error, got {:?}", other),
        }
    }
}
