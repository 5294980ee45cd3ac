//! Truncated formal power series in the deformation parameter ħ.
//!
//! A series of order `N` stores exactly `N + 1` coefficients `a_0 .. a_N`,
//! zeros included. The truncation order is fixed at construction; binary
//! operations demand equal orders and never promote silently — callers that
//! want to mix orders must call [`HbarSeries::truncate`] first.

use crate::error::{DqError, Result};
use crate::scalar::GaussianRational;

/// Coefficient space of an ħ-series: an abelian group with an exact scalar
/// action of the Gaussian rationals.
///
/// `zero_like` produces the zero of the same shape (dimension, degree,
/// arity, ...) as `self`; shapes are dynamic, so zero cannot be conjured
/// without a witness.
pub trait Coeff: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn scale(&self, s: &GaussianRational) -> Self;

    fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }
}

impl Coeff for GaussianRational {
    fn zero_like(&self) -> Self {
        GaussianRational::zero()
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, s: &GaussianRational) -> Self {
        self * s
    }
}

/// `a_0 + a_1 ħ + ... + a_N ħ^N`, truncated at a fixed order `N`.
#[derive(Clone, PartialEq, Debug)]
pub struct HbarSeries<C> {
    order: usize,
    coeffs: Vec<C>,
}

impl<C: Coeff> HbarSeries<C> {
    pub fn new(order: usize, coeffs: Vec<C>) -> Result<Self> {
        if coeffs.len() != order + 1 {
            return Err(DqError::domain(format!(
                "series of order {} needs {} coefficients, got {}",
                order,
                order + 1,
                coeffs.len()
            )));
        }
        Ok(HbarSeries { order, coeffs })
    }

    /// `c + 0ħ + ... + 0ħ^N`.
    pub fn constant(c: C, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let zero = c.zero_like();
        coeffs.push(c);
        for _ in 0..order {
            coeffs.push(zero.clone());
        }
        HbarSeries { order, coeffs }
    }

    pub fn zero(shape: &C, order: usize) -> Self {
        Self::constant(shape.zero_like(), order)
    }

    /// Series with a single nonzero coefficient `c` at `ħ^k`.
    pub fn single(c: C, k: usize, order: usize) -> Result<Self> {
        if k > order {
            return Err(DqError::domain(format!(
                "coefficient index {} exceeds truncation order {}",
                k, order
            )));
        }
        let mut s = Self::zero(&c, order);
        s.coeffs[k] = c;
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: C) {
        self.coeffs[k] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coeff::is_zero)
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(DqError::OrderMismatch(self.order, other.order));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(HbarSeries { order: self.order, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        HbarSeries {
            order: self.order,
            coeffs: self.coeffs.iter().map(Coeff::neg).collect(),
        }
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        HbarSeries {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn map<D, F>(&self, f: F) -> Result<HbarSeries<D>>
    where
        F: Fn(&C) -> Result<D>,
    {
        let coeffs = self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(HbarSeries { order: self.order, coeffs })
    }

    /// Explicit re-truncation to a lower (or equal) order.
    pub fn truncate(&self, new_order: usize) -> Result<Self> {
        if new_order > self.order {
            return Err(DqError::OrderMismatch(self.order, new_order));
        }
        Ok(HbarSeries {
            order: new_order,
            coeffs: self.coeffs[..=new_order].to_vec(),
        })
    }

    /// Multiplication by `ħ^k`: coefficients shift up, the top `k` drop.
    pub fn shift_up(&self, k: usize) -> Self {
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = vec![zero; self.order + 1];
        for (n, c) in self.coeffs.iter().enumerate() {
            if n + k <= self.order {
                coeffs[n + k] = c.clone();
            }
        }
        HbarSeries { order: self.order, coeffs }
    }

    /// Same coefficients re-truncated or zero-extended to order `new_order`.
    pub fn with_order(&self, new_order: usize) -> Self {
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = Vec::with_capacity(new_order + 1);
        for n in 0..=new_order {
            coeffs.push(self.coeffs.get(n).cloned().unwrap_or_else(|| zero.clone()));
        }
        HbarSeries { order: new_order, coeffs }
    }

    /// Cauchy product with a caller-supplied bilinear product on
    /// coefficients: `c_n = sum_{k} f(a_k, b_{n-k})`.
    pub fn mul_bilinear<D, E, F>(
        &self,
        other: &HbarSeries<D>,
        f: F,
    ) -> Result<HbarSeries<E>>
    where
        D: Coeff,
        E: Coeff,
        F: Fn(&C, &D) -> Result<E>,
    {
        if self.order != other.order {
            return Err(DqError::OrderMismatch(self.order, other.order));
        }
        let mut coeffs = Vec::with_capacity(self.order + 1);
        for n in 0..=self.order {
            let mut acc: Option<E> = None;
            for k in 0..=n {
                let term = f(&self.coeffs[k], &other.coeffs[n - k])?;
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term)?,
                });
            }
            coeffs.push(acc.expect("n + 1 >= 1 summands"));
        }
        Ok(HbarSeries { order: self.order, coeffs })
    }
}

/// Canonical text form of a series: the nonzero entries as
/// `"k: coeff"` joined by `"; "`, or `"0"` when every coefficient vanishes.
/// This is the same order-indexed syntax the parser accepts.
pub fn series_string<C: Coeff + std::fmt::Display>(s: &HbarSeries<C>) -> String {
    let entries: Vec<String> = s
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| format!("{}: {}", k, c))
        .collect();
    if entries.is_empty() {
        "0".to_string()
    } else {
        entries.join("; ")
    }
}

impl HbarSeries<GaussianRational> {
    pub fn one(order: usize) -> Self {
        Self::constant(GaussianRational::one(), order)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_bilinear(other, |a, b| Ok(a * b))
    }

    /// Multiplicative inverse up to the truncation order, by the usual
    /// order-by-order recursion. Requires an invertible constant term.
    pub fn invert(&self) -> Result<Self> {
        let a0_inv = self.coeffs[0].inv()?;
        let mut inv = vec![a0_inv.clone()];
        for n in 1..=self.order {
            let mut acc = GaussianRational::zero();
            for k in 1..=n {
                acc = &acc + &(&self.coeffs[k] * &inv[n - k]);
            }
            inv.push(-&(&a0_inv * &acc));
        }
        Ok(HbarSeries { order: self.order, coeffs: inv })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as G;

    fn s(vals: &[i64]) -> HbarSeries<G> {
        HbarSeries::new(
            vals.len() - 1,
            vals.iter().map(|&v| G::from_int(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn add_and_sub() {
        // (1 + h) + (2 - h) = 3
        assert_eq!(s(&[1, 1]).add(&s(&[2, -1])).unwrap(), s(&[3, 0]));
        // a + 0 = a
        let a = s(&[4, 5, 6]);
        assert_eq!(a.add(&HbarSeries::zero(&G::zero(), 2)).unwrap(), a);
        // (1 + 2h + 3h^2) - (1 + 2h) at N=2 -> 3h^2
        assert_eq!(s(&[1, 2, 3]).sub(&s(&[1, 2, 0])).unwrap(), s(&[0, 0, 3]));
    }

    #[test]
    fn cauchy_product() {
        // (1 + h)(1 - h) at N=2 -> 1 - h^2
        assert_eq!(s(&[1, 1, 0]).mul(&s(&[1, -1, 0])).unwrap(), s(&[1, 0, -1]));
        // a * 1 = a
        let a = s(&[2, -3, 5]);
        assert_eq!(a.mul(&HbarSeries::one(2)).unwrap(), a);
        // h * h at N=1 -> 0 (truncation kills order 2)
        assert!(s(&[0, 1]).mul(&s(&[0, 1])).unwrap().is_zero());
    }

    #[test]
    fn inversion() {
        // invert(1 + h) at N=3 -> 1 - h + h^2 - h^3
        assert_eq!(s(&[1, 1, 0, 0]).invert().unwrap(), s(&[1, -1, 1, -1]));
        // invert(1) = 1
        assert_eq!(HbarSeries::one(2).invert().unwrap(), HbarSeries::one(2));
        // invert(0 + h) -> error
        assert_eq!(s(&[0, 1]).invert(), Err(DqError::NonInvertibleSeries));
    }

    #[test]
    fn order_mismatch_is_an_error() {
        assert_eq!(
            s(&[1, 1]).add(&s(&[1, 1, 1])),
            Err(DqError::OrderMismatch(1, 2))
        );
        // explicit re-truncation fixes it
        let b = s(&[1, 1, 1]).truncate(1).unwrap();
        assert_eq!(s(&[1, 1]).add(&b).unwrap(), s(&[2, 2]));
    }

    #[test]
    fn shift_and_truncate() {
        let a = s(&[1, 2, 3]);
        assert_eq!(a.shift_up(1), s(&[0, 1, 2]));
        assert_eq!(a.truncate(0), Ok(s(&[1])));
        assert!(a.truncate(5).is_err());
        assert_eq!(a.with_order(4), s(&[1, 2, 3, 0, 0]));
    }
}
