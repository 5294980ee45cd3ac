//! Multivariate polynomials over the Gaussian rationals.
//!
//! These play the role of the function algebra on `R^n` at desk scale: they
//! are closed under products and partial derivatives, and equality is exact
//! and structural. Variables are `x1 .. xN` (1-based in all public
//! interfaces); exponent vectors are the `BTreeMap` keys, so term order is
//! canonical by construction and no zero coefficient is ever stored.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{DqError, Result};
use crate::scalar::GaussianRational;
use crate::series::Coeff;

#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Vec<u32>, GaussianRational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(vec![0; dim], c);
        }
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, GaussianRational::one())
    }

    /// The coordinate function `x_i`, `i` 1-based.
    pub fn var(dim: usize, i: usize) -> Result<Self> {
        if i == 0 || i > dim {
            return Err(DqError::IndexOutOfRange(i, dim));
        }
        let mut exps = vec![0; dim];
        exps[i - 1] = 1;
        Ok(Self::monomial(dim, exps, GaussianRational::one()))
    }

    pub fn monomial(dim: usize, exps: Vec<u32>, coeff: GaussianRational) -> Self {
        assert_eq!(exps.len(), dim, "exponent vector length must equal dim");
        let mut p = Self::zero(dim);
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&vec![0; self.dim])
                .map(GaussianRational::is_one)
                .unwrap_or(false)
    }

    /// True iff the polynomial is a constant (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_part(&self) -> GaussianRational {
        self.terms
            .get(&vec![0; self.dim])
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(DqError::DimMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    fn insert_term(&mut self, exps: Vec<u32>, coeff: GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> =
                    ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_term(exps, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.dim);
        for _ in 0..exp {
            acc = acc.mul(self).expect("same dim");
        }
        acc
    }

    /// Formal partial derivative with respect to `x_i`, `i` 1-based.
    pub fn partial(&self, i: usize) -> Result<Self> {
        if i == 0 || i > self.dim {
            return Err(DqError::IndexOutOfRange(i, self.dim));
        }
        let idx = i - 1;
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[idx] -= 1;
            let factor = GaussianRational::from_int(e[idx] as i64);
            out.insert_term(exps, c * &factor);
        }
        Ok(out)
    }

    /// Apply a derivative multi-index (a multiset of 1-based variable
    /// indices) by repeated differentiation.
    pub fn partial_multi(&self, indices: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        for &i in indices {
            if out.is_zero() {
                break;
            }
            out = out.partial(i)?;
        }
        Ok(out)
    }

    /// Exact evaluation at a point with Gaussian-rational coordinates.
    pub fn eval(&self, point: &[GaussianRational]) -> Result<GaussianRational> {
        if point.len() != self.dim {
            return Err(DqError::DimMismatch(self.dim, point.len()));
        }
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (coord, &exp) in point.iter().zip(e) {
                if exp > 0 {
                    term = &term * &coord.pow(exp);
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Terms sorted for display: total degree descending, then exponent
    /// vector lexicographically descending.
    fn display_terms(&self) -> Vec<(&Vec<u32>, &GaussianRational)> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|(ea, _), (eb, _)| {
            let da: u32 = ea.iter().sum();
            let db: u32 = eb.iter().sum();
            db.cmp(&da).then_with(|| eb.cmp(ea))
        });
        ts
    }

    /// True when the canonical string is a single product (safe to append
    /// `*...` without parentheses).
    pub fn is_single_term(&self) -> bool {
        self.terms.len() == 1
            && self.terms.values().next().is_none_or(|c| {
                c.re.is_zero() || c.im.is_zero()
            })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

fn monomial_string(exps: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in exps.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("x{}", i + 1)),
            _ => parts.push(format!("x{}**{}", i + 1, e)),
        }
    }
    parts.join("*")
}

/// One term as `(is_negative, body)`, where the printed term is `body`
/// preceded by `-` when negative; used to join sums as `a + b - c`.
fn term_string(exps: &[u32], coeff: &GaussianRational) -> (bool, String) {
    let mono = monomial_string(exps);
    if mono.is_empty() {
        // a constant with both parts nonzero is a sum; parenthesize instead
        // of extracting a sign that would only bind to the first part
        if !coeff.re.is_zero() && !coeff.im.is_zero() {
            return (false, coeff.expr_string(true));
        }
        let neg = coeff.is_negative_leaning();
        let c = if neg { -coeff } else { coeff.clone() };
        return (neg, c.expr_string(false));
    }
    if coeff.is_one() {
        return (false, mono);
    }
    if (-coeff).is_one() {
        return (true, mono);
    }
    let neg = coeff.is_negative_leaning();
    let c = if neg { -coeff } else { coeff.clone() };
    (neg, format!("{}*{}", c.expr_string(true), mono))
}

pub(crate) fn join_terms(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (neg, body)) in terms.into_iter().enumerate() {
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // a lone constant needs no parentheses
        if self.terms.len() == 1 && self.is_constant() {
            return write!(f, "{}", self.constant_part().expr_string(false));
        }
        let terms = self
            .display_terms()
            .into_iter()
            .map(|(e, c)| term_string(e, c))
            .collect();
        write!(f, "{}", join_terms(terms))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Coeff for Polynomial {
    fn zero_like(&self) -> Self {
        Polynomial::zero(self.dim)
    }
    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        Polynomial::add(self, other)
    }
    fn neg(&self) -> Self {
        Polynomial::neg(self)
    }
    fn scale(&self, s: &GaussianRational) -> Self {
        Polynomial::scale(self, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(dim: usize, i: usize) -> Polynomial {
        Polynomial::var(dim, i).unwrap()
    }

    #[test]
    fn ring_ops() {
        let x1 = x(2, 1);
        let x2 = x(2, 2);
        // x1 * x2 = x1x2
        let p = x1.mul(&x2).unwrap();
        assert_eq!(p.to_string(), "x1*x2");
        // (x1 + x2)^2 = x1^2 + 2 x1 x2 + x2^2
        let sq = x1.add(&x2).unwrap().pow(2);
        let expected = x1
            .pow(2)
            .add(&p.scale(&GaussianRational::from_int(2)))
            .unwrap()
            .add(&x2.pow(2))
            .unwrap();
        assert_eq!(sq, expected);
        // f * 1 = f
        assert_eq!(sq.mul(&Polynomial::one(2)).unwrap(), sq);
        // dim mismatch is an error
        assert!(x(2, 1).add(&x(3, 1)).is_err());
    }

    #[test]
    fn partial_derivatives() {
        let x1 = x(2, 1);
        // d1(x1^2) = 2 x1
        assert_eq!(
            x1.pow(2).partial(1).unwrap(),
            x1.scale(&GaussianRational::from_int(2))
        );
        // d2(x1) = 0
        assert!(x1.partial(2).unwrap().is_zero());
        // d1(x1 x2 + x1^3) = x2 + 3 x1^2
        let p = x1.mul(&x(2, 2)).unwrap().add(&x1.pow(3)).unwrap();
        let expected = x(2, 2)
            .add(&x1.pow(2).scale(&GaussianRational::from_int(3)))
            .unwrap();
        assert_eq!(p.partial(1).unwrap(), expected);
        // index out of range
        assert_eq!(x1.partial(3), Err(DqError::IndexOutOfRange(3, 2)));
    }

    #[test]
    fn evaluation() {
        let p = x(2, 1).mul(&x(2, 2)).unwrap();
        let pt = [GaussianRational::from_int(2), GaussianRational::from_int(3)];
        assert_eq!(p.eval(&pt).unwrap(), GaussianRational::from_int(6));

        let c = Polynomial::constant(2, GaussianRational::from_int(5));
        assert_eq!(c.eval(&pt).unwrap(), GaussianRational::from_int(5));

        // x1^2 - x2 at (1/2, 1/4) = 0
        let q = x(2, 1).pow(2).sub(&x(2, 2)).unwrap();
        let pt2 = [
            GaussianRational::from_ratio(1, 2),
            GaussianRational::from_ratio(1, 4),
        ];
        assert!(q.eval(&pt2).unwrap().is_zero());

        // dimension mismatch
        assert!(p.eval(&pt2[..1]).is_err());
    }

    #[test]
    fn display_canonical() {
        let p = x(2, 1)
            .pow(2)
            .sub(&Polynomial::constant(2, GaussianRational::from_ratio(1, 2)))
            .unwrap();
        assert_eq!(p.to_string(), "x1**2 - 1/2");
        let q = x(2, 2)
            .scale(&GaussianRational::i())
            .add(&x(2, 1))
            .unwrap();
        assert_eq!(q.to_string(), "x1 + i*x2");
        assert_eq!(Polynomial::zero(3).to_string(), "0");
    }
}
