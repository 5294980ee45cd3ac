//! Multidifferential operators on the polynomial algebra: application,
//! Gerstenhaber product and bracket, and the Hochschild differential.
//!
//! An arity-`n` operator is a sum of terms `coeff * d^{I_1} x ... x d^{I_n}`
//! where each `I_j` is a sorted multiset of variable indices and `coeff` is
//! a polynomial. Terms are kept in fully expanded canonical form (merged
//! keys, no zero coefficients) after every composition, so equality is
//! structural. An arity-0 operator is a polynomial-valued constant cochain.
//!
//! Degree bookkeeping is the shifted one: an arity-`n` operator has graded
//! Lie algebra degree `n - 1`, and every sign exponent below uses it.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{DqError, Result};
use crate::poly::{join_terms, Polynomial};
use crate::polyvector::coefficient_prefix;
use crate::scalar::GaussianRational;
use crate::series::Coeff;

/// Sorted multiset of 0-based variable indices.
pub type DerivIndex = Vec<usize>;

#[derive(Clone, PartialEq)]
pub struct MultiDiffOp {
    dim: usize,
    arity: usize,
    terms: BTreeMap<Vec<DerivIndex>, Polynomial>,
}

impl MultiDiffOp {
    pub fn zero(dim: usize, arity: usize) -> Self {
        MultiDiffOp { dim, arity, terms: BTreeMap::new() }
    }

    /// The arity-1 identity operator.
    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zero(dim, 1);
        op.terms.insert(vec![Vec::new()], Polynomial::one(dim));
        op
    }

    /// The pointwise multiplication `m(f, g) = f g`.
    pub fn mult_op(dim: usize) -> Self {
        let mut op = Self::zero(dim, 2);
        op.terms
            .insert(vec![Vec::new(), Vec::new()], Polynomial::one(dim));
        op
    }

    /// Arity-0 constant cochain.
    pub fn constant_cochain(p: Polynomial) -> Self {
        let dim = p.dim();
        let mut op = Self::zero(dim, 0);
        if !p.is_zero() {
            op.terms.insert(Vec::new(), p);
        }
        op
    }

    /// Build from terms with 1-based derivative indices.
    pub fn from_terms(
        dim: usize,
        arity: usize,
        terms: Vec<(Vec<Vec<usize>>, Polynomial)>,
    ) -> Result<Self> {
        let mut op = Self::zero(dim, arity);
        for (derivs, coeff) in terms {
            if derivs.len() != arity {
                return Err(DqError::ArityMismatch { arity, args: derivs.len() });
            }
            if coeff.dim() != dim {
                return Err(DqError::DimMismatch(dim, coeff.dim()));
            }
            let mut key = Vec::with_capacity(arity);
            for slot in derivs {
                let mut s = Vec::with_capacity(slot.len());
                for i in slot {
                    if i == 0 || i > dim {
                        return Err(DqError::IndexOutOfRange(i, dim));
                    }
                    s.push(i - 1);
                }
                s.sort_unstable();
                key.push(s);
            }
            op.insert_term(key, coeff);
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Shifted grading: arity minus one.
    pub fn dgla_degree(&self) -> i64 {
        self.arity as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<DerivIndex>, &Polynomial)> {
        self.terms.iter()
    }

    fn insert_term(&mut self, key: Vec<DerivIndex>, coeff: Polynomial) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff).expect("same dim");
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(DqError::DimMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.arity != other.arity {
            if self.is_zero() {
                return Ok(other.clone());
            }
            if other.is_zero() {
                return Ok(self.clone());
            }
            return Err(DqError::ArityMismatch { arity: self.arity, args: other.arity });
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MultiDiffOp {
            dim: self.dim,
            arity: self.arity,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim, self.arity);
        }
        MultiDiffOp {
            dim: self.dim,
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.scale(s)))
                .collect(),
        }
    }

    /// Apply to a tuple of polynomials:
    /// `sum_terms coeff * prod_j d^{I_j}(args_j)`.
    pub fn apply(&self, args: &[Polynomial]) -> Result<Polynomial> {
        if args.len() != self.arity {
            return Err(DqError::ArityMismatch { arity: self.arity, args: args.len() });
        }
        for a in args {
            if a.dim() != self.dim {
                return Err(DqError::DimMismatch(self.dim, a.dim()));
            }
        }
        let mut acc = Polynomial::zero(self.dim);
        for (key, coeff) in &self.terms {
            let mut prod = coeff.clone();
            for (slot, arg) in key.iter().zip(args) {
                if prod.is_zero() {
                    break;
                }
                let one_based: Vec<usize> = slot.iter().map(|&i| i + 1).collect();
                prod = prod.mul(&arg.partial_multi(&one_based)?)?;
            }
            acc = acc.add(&prod)?;
        }
        Ok(acc)
    }

    /// Insert `other` into argument slot `j` (0-based) and expand the
    /// composition into canonical terms by the Leibniz rule: the slot-`j`
    /// derivatives of `self` distribute over `other`'s coefficient and
    /// argument slots in all ways.
    pub fn insert_at(&self, j: usize, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if j >= self.arity {
            return Err(DqError::ArityMismatch { arity: self.arity, args: j + 1 });
        }
        let m = other.arity;
        let mut out = Self::zero(self.dim, self.arity + m - 1);
        for (key_d, coeff_d) in &self.terms {
            for (key_e, coeff_e) in &other.terms {
                let outer = &key_d[j];
                // every map from the positions of `outer` to {coeff, slot 1..m}
                let mut assignment = vec![0usize; outer.len()];
                loop {
                    // derivatives hitting other's coefficient
                    let to_coeff: Vec<usize> = outer
                        .iter()
                        .zip(&assignment)
                        .filter(|(_, &a)| a == 0)
                        .map(|(&i, _)| i + 1)
                        .collect();
                    let coeff_part = coeff_e.partial_multi(&to_coeff)?;
                    if !coeff_part.is_zero() {
                        let mut slots =
                            Vec::with_capacity(self.arity + m - 1);
                        slots.extend_from_slice(&key_d[..j]);
                        for (t, base) in key_e.iter().enumerate() {
                            let mut slot = base.clone();
                            slot.extend(
                                outer
                                    .iter()
                                    .zip(&assignment)
                                    .filter(|(_, &a)| a == t + 1)
                                    .map(|(&i, _)| i),
                            );
                            slot.sort_unstable();
                            slots.push(slot);
                        }
                        slots.extend_from_slice(&key_d[j + 1..]);
                        out.insert_term(slots, coeff_d.mul(&coeff_part)?);
                    }
                    // next assignment in base (m + 1)
                    let mut pos = 0;
                    loop {
                        if pos == assignment.len() {
                            break;
                        }
                        assignment[pos] += 1;
                        if assignment[pos] <= m {
                            break;
                        }
                        assignment[pos] = 0;
                        pos += 1;
                    }
                    if pos == assignment.len() {
                        break;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Gerstenhaber (insertion) product
    /// `D o E = sum_j (-1)^{(m-1) j} D o_j E`.
    pub fn gerst_product(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (n, m) = (self.arity, other.arity);
        let target = (n + m).saturating_sub(1);
        let mut out = Self::zero(self.dim, target);
        for j in 0..n {
            let inserted = self.insert_at(j, other)?;
            let exponent = (m as i64 - 1) * j as i64;
            let signed = if exponent.rem_euclid(2) == 1 {
                inserted.neg()
            } else {
                inserted
            };
            out = out.add(&signed)?;
        }
        Ok(out)
    }

    /// Gerstenhaber bracket
    /// `[D, E] = D o E - (-1)^{(n-1)(m-1)} E o D`.
    pub fn gerst_bracket(&self, other: &Self) -> Result<Self> {
        let de = self.gerst_product(other)?;
        let ed = other.gerst_product(self)?;
        let exponent = self.dgla_degree() * other.dgla_degree();
        if exponent.rem_euclid(2) == 1 {
            de.add(&ed)
        } else {
            de.sub(&ed)
        }
    }

    /// Hochschild differential, defined as `d = [m, .]` with `m` the
    /// pointwise multiplication.
    pub fn hochschild_d(&self) -> Result<Self> {
        Self::mult_op(self.dim).gerst_bracket(self)
    }

    /// True iff every term carries at least one derivative in every
    /// argument slot, so the operator vanishes whenever an argument is
    /// constant.
    pub fn is_normalized(&self) -> bool {
        self.terms
            .keys()
            .all(|key| key.iter().all(|slot| !slot.is_empty()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim,
            "arity": self.arity,
            "terms": self
                .terms
                .iter()
                .map(|(key, coeff)| {
                    serde_json::json!({
                        "coeff": coeff.to_string(),
                        "derivs": key
                            .iter()
                            .map(|slot| slot.iter().map(|&i| i + 1).collect::<Vec<_>>())
                            .collect::<Vec<_>>(),
                    })
                })
                .collect::<Vec<_>>(),
        })
    }
}

impl Coeff for MultiDiffOp {
    fn zero_like(&self) -> Self {
        MultiDiffOp::zero(self.dim, self.arity)
    }
    fn is_zero(&self) -> bool {
        MultiDiffOp::is_zero(self)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        MultiDiffOp::add(self, other)
    }
    fn neg(&self) -> Self {
        MultiDiffOp::neg(self)
    }
    fn scale(&self, s: &GaussianRational) -> Self {
        MultiDiffOp::scale(self, s)
    }
}

impl fmt::Display for MultiDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arity == 0 {
            let p = self
                .terms
                .get(&Vec::new())
                .cloned()
                .unwrap_or_else(|| Polynomial::zero(self.dim));
            return write!(f, "{}", p);
        }
        let mut rendered = Vec::new();
        for (key, coeff) in &self.terms {
            let slots = key
                .iter()
                .map(|slot| {
                    slot.iter()
                        .map(|&i| format!("d{}", i + 1))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect::<Vec<_>>()
                .join(" | ");
            // empty slots leave double spaces behind; collapse them
            let body = format!("[ {} ]", slots).replace("  ", " ");
            rendered.push(coefficient_prefix(coeff, &body, " "));
        }
        write!(f, "{}", join_terms(rendered))
    }
}

impl fmt::Debug for MultiDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(dim: usize, i: usize) -> Polynomial {
        Polynomial::var(dim, i).unwrap()
    }

    /// `coeff * d^{slots}` with 1-based indices.
    fn op(dim: usize, coeff: Polynomial, slots: &[&[usize]]) -> MultiDiffOp {
        MultiDiffOp::from_terms(
            dim,
            slots.len(),
            vec![(slots.iter().map(|s| s.to_vec()).collect(), coeff)],
        )
        .unwrap()
    }

    #[test]
    fn apply_examples() {
        // (d1 x d2) applied to (x1 x2, x2) = x2
        let d1d2 = op(2, Polynomial::one(2), &[&[1], &[2]]);
        let out = d1d2
            .apply(&[x(2, 1).mul(&x(2, 2)).unwrap(), x(2, 2)])
            .unwrap();
        assert_eq!(out, x(2, 2));
        // m applied to (f, g) = f g
        let m = MultiDiffOp::mult_op(2);
        let f = x(2, 1).pow(2);
        let g = x(2, 2);
        assert_eq!(m.apply(&[f.clone(), g.clone()]).unwrap(), f.mul(&g).unwrap());
        // identity
        let id = MultiDiffOp::identity(2);
        assert_eq!(id.apply(std::slice::from_ref(&f)).unwrap(), f);
        // arity mismatch
        assert!(id.apply(&[f.clone(), g]).is_err());
    }

    #[test]
    fn mult_op_examples() {
        let m = MultiDiffOp::mult_op(2);
        assert_eq!(
            m.apply(&[x(2, 1), x(2, 2)]).unwrap(),
            x(2, 1).mul(&x(2, 2)).unwrap()
        );
        assert_eq!(
            m.apply(&[Polynomial::one(2), x(2, 2)]).unwrap(),
            x(2, 2)
        );
        // [m, m] = 0 as a canonical operator
        assert!(m.gerst_bracket(&m).unwrap().is_zero());
    }

    #[test]
    fn gerst_product_examples() {
        let m = MultiDiffOp::mult_op(2);
        let id = MultiDiffOp::identity(2);
        // id o m = m
        assert_eq!(id.gerst_product(&m).unwrap(), m);
        // m o id = 2m
        assert_eq!(
            m.gerst_product(&id).unwrap(),
            m.scale(&GaussianRational::from_int(2))
        );
        // (x1 d1 x d2) o d1 = x1 (d1 d1 x d2) + x1 (d1 x d1 d2)
        let d = op(2, x(2, 1), &[&[1], &[2]]);
        let e = op(2, Polynomial::one(2), &[&[1]]);
        let expected = op(2, x(2, 1), &[&[1, 1], &[2]])
            .add(&op(2, x(2, 1), &[&[1], &[1, 2]]))
            .unwrap();
        assert_eq!(d.gerst_product(&e).unwrap(), expected);
        // zero-arity left factor gives the empty insertion sum
        let f0 = MultiDiffOp::constant_cochain(x(2, 1));
        assert!(f0.gerst_product(&e).unwrap().is_zero());
    }

    #[test]
    fn gerst_bracket_examples() {
        // [x1 d1 x d2, d1] = -(d1 x d2)
        let d = op(2, x(2, 1), &[&[1], &[2]]);
        let e = op(2, Polynomial::one(2), &[&[1]]);
        let expected = op(2, Polynomial::one(2), &[&[1], &[2]]).neg();
        assert_eq!(d.gerst_bracket(&e).unwrap(), expected);
        // [m, m] applied to (f, g, h) = 2 (associator of the pointwise
        // product) = 0
        let m = MultiDiffOp::mult_op(2);
        let bracket = m.gerst_bracket(&m).unwrap();
        let args = [x(2, 1), x(2, 2), x(2, 1).pow(2)];
        assert!(bracket.apply(&args).unwrap().is_zero());
        // [D, D] = 0 for arity-1 D (even DGLA degree)
        let d1 = op(2, x(2, 2), &[&[1, 1]]);
        assert!(d1.gerst_bracket(&d1).unwrap().is_zero());
    }

    #[test]
    fn hochschild_examples() {
        // d(d1) = 0: derivations are closed
        let deriv = op(2, Polynomial::one(2), &[&[1]]);
        assert!(deriv.hochschild_d().unwrap().is_zero());
        // d(id) = m
        let id = MultiDiffOp::identity(2);
        assert_eq!(id.hochschild_d().unwrap(), MultiDiffOp::mult_op(2));
        // d(f) = 0 for arity-0 cochains (commutativity)
        let f0 = MultiDiffOp::constant_cochain(x(2, 1).pow(2));
        assert!(f0.hochschild_d().unwrap().is_zero());
    }

    /// The cochain differential written as an alternating sum (the textbook
    /// form) agrees with `[m, .]` up to one global sign: `[m, D] = -d_alt D`
    /// at every arity. Frozen here as the measured relation.
    #[test]
    fn bracket_differential_vs_alternating_sum() {
        // d_alt via (-1)^n (df)(a_0..a_n) = a_0 f(a_1..a_n)
        //   - sum_i (-1)^i f(a_0,..., a_i a_{i+1}, ..., a_n)
        //   + (-1)^{n-1} f(a_0,...,a_{n-1}) a_n
        fn d_alt_apply(opr: &MultiDiffOp, args: &[Polynomial]) -> Polynomial {
            let n = opr.arity();
            assert_eq!(args.len(), n + 1);
            let sign = |e: i64| -> GaussianRational {
                if e.rem_euclid(2) == 1 {
                    GaussianRational::from_int(-1)
                } else {
                    GaussianRational::one()
                }
            };
            let mut acc = args[0]
                .mul(&opr.apply(&args[1..]).unwrap())
                .unwrap();
            for i in 0..n {
                let mut merged: Vec<Polynomial> = Vec::with_capacity(n);
                merged.extend_from_slice(&args[..i]);
                merged.push(args[i].mul(&args[i + 1]).unwrap());
                merged.extend_from_slice(&args[i + 2..]);
                acc = acc
                    .add(&opr.apply(&merged).unwrap().scale(&sign(i as i64 + 1)))
                    .unwrap();
            }
            acc = acc
                .add(
                    &opr.apply(&args[..n])
                        .unwrap()
                        .mul(&args[n])
                        .unwrap()
                        .scale(&sign(n as i64 - 1)),
                )
                .unwrap();
            // multiply by (-1)^n to solve for df
            acc.scale(&sign(n as i64))
        }

        let samples = [
            op(2, x(2, 1), &[&[1]]),
            op(2, Polynomial::one(2), &[&[1], &[2]]),
            op(2, x(2, 2), &[&[1, 1], &[2]]),
            MultiDiffOp::identity(2),
        ];
        let arg_pool = [x(2, 1), x(2, 2), x(2, 1).pow(2), x(2, 1).mul(&x(2, 2)).unwrap()];
        for s in &samples {
            let d_bracket = s.hochschild_d().unwrap();
            let args = &arg_pool[..s.arity() + 1];
            let via_bracket = d_bracket.apply(args).unwrap();
            let via_alt = d_alt_apply(s, args);
            assert_eq!(via_bracket, via_alt.neg());
        }
    }

    #[test]
    fn normalization() {
        assert!(op(2, Polynomial::one(2), &[&[1], &[2]]).is_normalized());
        assert!(!MultiDiffOp::mult_op(2).is_normalized());
        assert!(op(2, x(2, 1), &[&[1], &[1, 2]]).is_normalized());
    }

    #[test]
    fn display_shapes() {
        let d = op(2, x(2, 1), &[&[1], &[2, 2]]);
        assert_eq!(d.to_string(), "x1 [ d1 | d2 d2 ]");
        assert_eq!(MultiDiffOp::mult_op(2).to_string(), "[ | ]");
        assert_eq!(MultiDiffOp::identity(2).to_string(), "[ ]");
        assert_eq!(MultiDiffOp::zero(2, 2).to_string(), "0");
        let c = MultiDiffOp::constant_cochain(x(2, 1));
        assert_eq!(c.to_string(), "x1");
    }
}
