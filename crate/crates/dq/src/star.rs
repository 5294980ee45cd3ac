//! Star products as ħ-series of bidifferential operators.
//!
//! A [`StarProduct`] stores explicit operator coefficients `P_0 = m, P_1,
//! ..., P_N` up to a truncation order fixed at construction; the Moyal
//! exponential is expanded eagerly, never kept symbolic. Construction
//! validates the star-product shape: the order-0 term is exactly the
//! pointwise multiplication and every higher `P_k` is normalized (kills
//! constant arguments), which is what the unit axiom `f * 1 = 1 * f = f`
//! amounts to for operators in canonical form.

use std::fmt;

use num_traits::Zero;

use crate::error::{DqError, Result};
use crate::multidiff::MultiDiffOp;
use crate::poly::Polynomial;
use crate::polyvector::PolyVector;
use crate::scalar::{GaussianRational, Rational};
use crate::series::HbarSeries;

/// A function with formal ħ-dependence: a truncated series of polynomials.
pub type FormalFunction = HbarSeries<Polynomial>;

#[derive(Clone, PartialEq, Debug)]
pub struct StarProduct {
    dim: usize,
    terms: HbarSeries<MultiDiffOp>,
}

impl StarProduct {
    /// Wrap a series of bidifferential operators, validating the star
    /// product shape.
    pub fn new(dim: usize, terms: HbarSeries<MultiDiffOp>) -> Result<Self> {
        for (k, op) in terms.coeffs().iter().enumerate() {
            if op.dim() != dim {
                return Err(DqError::DimMismatch(dim, op.dim()));
            }
            if op.arity() != 2 && !op.is_zero() {
                return Err(DqError::ArityMismatch { arity: 2, args: op.arity() });
            }
            if k == 0 {
                if *op != MultiDiffOp::mult_op(dim) {
                    return Err(DqError::domain(
                        "star product must start with the pointwise multiplication at order 0",
                    ));
                }
            } else if !op.is_normalized() {
                return Err(DqError::domain(format!(
                    "P_{} is not normalized: it does not vanish on constant arguments",
                    k
                )));
            }
        }
        Ok(StarProduct { dim, terms })
    }

    /// The Moyal star product of a constant-coefficient bivector:
    /// `P_k = (1/k!) (i/2)^k a^{i1 j1} ... a^{ik jk} d_{i1..ik} x d_{j1..jk}`.
    ///
    /// Computed by the recursion `P_k = (i/2)/k * sum_{ij} a^{ij}
    /// (P_{k-1} with i, j adjoined)`, which is the eager expansion of the
    /// exponential.
    pub fn moyal(alpha: &PolyVector, order: usize) -> Result<Self> {
        if alpha.degree() != 2 {
            return Err(DqError::DegreeMismatch { expected: 2, got: alpha.degree() });
        }
        let dim = alpha.dim();
        // signed entry list (i, j, a^{ij}) over the full antisymmetric matrix
        let mut entries: Vec<(usize, usize, GaussianRational)> = Vec::new();
        for (idx, p) in alpha.components() {
            if !p.is_constant() {
                return Err(DqError::domain(format!(
                    "Moyal requires constant coefficients; component d{}^d{} has {}",
                    idx[0] + 1,
                    idx[1] + 1,
                    p
                )));
            }
            let c = p.constant_part();
            entries.push((idx[0], idx[1], c.clone()));
            entries.push((idx[1], idx[0], -&c));
        }
        // i/2, the factor in the Moyal exponential
        let half_i = GaussianRational::new(Rational::zero(), Rational::new(1.into(), 2.into()));
        let mut coeffs = vec![MultiDiffOp::mult_op(dim)];
        let mut prev: Vec<(Vec<usize>, Vec<usize>, GaussianRational)> =
            vec![(Vec::new(), Vec::new(), GaussianRational::one())];
        for k in 1..=order {
            // adjoin one alpha factor to every term of P_{k-1}; the 1/k
            // builds up 1/k! across the recursion
            let step = &half_i * &GaussianRational::from_ratio(1, k as i64);
            let step = &step;
            let mut next: std::collections::BTreeMap<(Vec<usize>, Vec<usize>), GaussianRational> =
                std::collections::BTreeMap::new();
            for (left, right, c) in &prev {
                for (i, j, a) in &entries {
                    let mut l = left.clone();
                    l.push(*i);
                    l.sort_unstable();
                    let mut r = right.clone();
                    r.push(*j);
                    r.sort_unstable();
                    let add = &(c * a) * step;
                    let slot = next
                        .entry((l, r))
                        .or_insert_with(GaussianRational::zero);
                    *slot = &*slot + &add;
                }
            }
            prev = next
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|((l, r), c)| (l, r, c))
                .collect();
            let mut op = MultiDiffOp::zero(dim, 2);
            for (l, r, c) in &prev {
                let term = MultiDiffOp::from_terms(
                    dim,
                    2,
                    vec![(
                        vec![
                            l.iter().map(|&i| i + 1).collect(),
                            r.iter().map(|&i| i + 1).collect(),
                        ],
                        Polynomial::constant(dim, c.clone()),
                    )],
                )?;
                op = op.add(&term)?;
            }
            coeffs.push(op);
        }
        StarProduct::new(dim, HbarSeries::new(order, coeffs)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.terms.order()
    }

    pub fn series(&self) -> &HbarSeries<MultiDiffOp> {
        &self.terms
    }

    pub fn p_k(&self, k: usize) -> &MultiDiffOp {
        self.terms.coeff(k)
    }

    /// The deformation part `S - m`, vanishing at ħ^0.
    pub fn deformation_part(&self) -> HbarSeries<MultiDiffOp> {
        let mut s = self.terms.clone();
        s.set_coeff(0, MultiDiffOp::zero(self.dim, 2));
        s
    }

    /// Bilinear extension of the star product to formal functions:
    /// the Cauchy double sum `sum_n h^n sum_{a+b+c=n} P_a(f_b, g_c)`.
    pub fn apply(&self, f: &FormalFunction, g: &FormalFunction) -> Result<FormalFunction> {
        let order = self.order();
        if f.order() != order {
            return Err(DqError::OrderMismatch(order, f.order()));
        }
        if g.order() != order {
            return Err(DqError::OrderMismatch(order, g.order()));
        }
        let zero = Polynomial::zero(self.dim);
        let mut coeffs = vec![zero; order + 1];
        for a in 0..=order {
            let p = self.p_k(a);
            if p.is_zero() {
                continue;
            }
            for b in 0..=order - a {
                for c in 0..=order - a - b {
                    let term = p.apply(&[f.coeff(b).clone(), g.coeff(c).clone()])?;
                    coeffs[a + b + c] = coeffs[a + b + c].add(&term)?;
                }
            }
        }
        HbarSeries::new(order, coeffs)
    }

    /// Star product of two plain polynomials, lifted as ħ-constants.
    pub fn apply_polys(&self, f: &Polynomial, g: &Polynomial) -> Result<FormalFunction> {
        self.apply(
            &HbarSeries::constant(f.clone(), self.order()),
            &HbarSeries::constant(g.clone(), self.order()),
        )
    }

    /// `(f * g) * h - f * (g * h)`, truncated; identically zero for an
    /// associative star product.
    pub fn associator_residual(
        &self,
        f: &Polynomial,
        g: &Polynomial,
        h: &Polynomial,
    ) -> Result<FormalFunction> {
        let order = self.order();
        let fs = HbarSeries::constant(f.clone(), order);
        let gs = HbarSeries::constant(g.clone(), order);
        let hs = HbarSeries::constant(h.clone(), order);
        let left = self.apply(&self.apply(&fs, &gs)?, &hs)?;
        let right = self.apply(&fs, &self.apply(&gs, &hs)?)?;
        left.sub(&right)
    }

    /// The bivector `b` with `b(df, dg) = P_1(f, g) - P_1(g, f)`.
    ///
    /// Refuses (rather than truncates) when `P_1` has derivative order > 1
    /// in some slot, reporting the offending term.
    pub fn first_order_skew(&self) -> Result<PolyVector> {
        if self.order() < 1 {
            return Ok(PolyVector::zero(self.dim, 2));
        }
        bivector_from_skew_part(self.p_k(1))
    }
}

/// Extract the bivector whose determinant pairing equals the antisymmetric
/// part of an order-(1,1) bidifferential operator.
#[allow(clippy::needless_range_loop)]
pub fn bivector_from_skew_part(p1: &MultiDiffOp) -> Result<PolyVector> {
    let dim = p1.dim();
    if p1.arity() != 2 && !p1.is_zero() {
        return Err(DqError::ArityMismatch { arity: 2, args: p1.arity() });
    }
    // full coefficient matrix c[i][j] of d_i x d_j terms
    let mut c = vec![vec![Polynomial::zero(dim); dim]; dim];
    for (key, coeff) in p1.terms() {
        if key[0].len() > 1 || key[1].len() > 1 {
            return Err(DqError::domain(format!(
                "first-order skew extraction failed: term {} [ {} ] has derivative order > 1",
                coeff,
                key.iter()
                    .map(|slot| slot
                        .iter()
                        .map(|&i| format!("d{}", i + 1))
                        .collect::<Vec<_>>()
                        .join(" "))
                    .collect::<Vec<_>>()
                    .join(" | ")
            )));
        }
        if key[0].len() != 1 || key[1].len() != 1 {
            // a normalized P_1 cannot carry these; tolerate and skip the
            // symmetric-in-constants part, which cancels in the skew part
            continue;
        }
        c[key[0][0]][key[1][0]] = c[key[0][0]][key[1][0]].add(coeff)?;
    }
    let mut comps = Vec::new();
    for i in 0..dim {
        for j in i + 1..dim {
            let skew = c[i][j].sub(&c[j][i])?;
            if !skew.is_zero() {
                comps.push((vec![i + 1, j + 1], skew));
            }
        }
    }
    PolyVector::from_components(dim, 2, comps)
}

/// Maurer-Cartan residual on the operator side: `dP + (1/2)[P, P]` for a
/// normalized deformation series `P` with `P_0 = 0`; the result is a series
/// of arity-3 operators, zero exactly when `m + P` is associative to the
/// truncation order.
pub fn mc_residual_star(p: &HbarSeries<MultiDiffOp>) -> Result<HbarSeries<MultiDiffOp>> {
    if !p.coeff(0).is_zero() {
        return Err(DqError::domain(
            "maurer-cartan residual needs a deformation series vanishing at order 0",
        ));
    }
    let half = GaussianRational::from_ratio(1, 2);
    let d_part = p.map(|op| op.hochschild_d())?;
    let bracket_part = p.mul_bilinear(p, |a, b| a.gerst_bracket(b))?;
    d_part.add(&bracket_part.scale(&half))
}

/// An invertible formal operator `T = id + sum_{m>=1} h^m T_m` with
/// normalized higher terms (`T(1) = 1`).
#[derive(Clone, PartialEq, Debug)]
pub struct EquivalenceOp {
    dim: usize,
    terms: HbarSeries<MultiDiffOp>,
}

impl EquivalenceOp {
    pub fn new(dim: usize, terms: HbarSeries<MultiDiffOp>) -> Result<Self> {
        for (k, op) in terms.coeffs().iter().enumerate() {
            if op.dim() != dim {
                return Err(DqError::DimMismatch(dim, op.dim()));
            }
            if op.arity() != 1 && !op.is_zero() {
                return Err(DqError::ArityMismatch { arity: 1, args: op.arity() });
            }
            if k == 0 {
                if *op != MultiDiffOp::identity(dim) {
                    return Err(DqError::domain(
                        "equivalence operator must be the identity at order 0",
                    ));
                }
            } else if !op.is_normalized() {
                return Err(DqError::domain(format!(
                    "T_{} is not normalized: T(1) = 1 fails",
                    k
                )));
            }
        }
        Ok(EquivalenceOp { dim, terms })
    }

    pub fn identity(dim: usize, order: usize) -> Self {
        EquivalenceOp {
            dim,
            terms: HbarSeries::constant(MultiDiffOp::identity(dim), order),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.terms.order()
    }

    pub fn series(&self) -> &HbarSeries<MultiDiffOp> {
        &self.terms
    }

    /// Formal inverse, order by order; always exists because the order-0
    /// term is the identity.
    pub fn invert(&self) -> Result<HbarSeries<MultiDiffOp>> {
        let order = self.order();
        let id = MultiDiffOp::identity(self.dim);
        let mut inv: Vec<MultiDiffOp> = vec![id];
        for n in 1..=order {
            let mut acc = MultiDiffOp::zero(self.dim, 1);
            for k in 1..=n {
                acc = acc.add(&compose(self.terms.coeff(k), &inv[n - k])?)?;
            }
            inv.push(acc.neg());
        }
        HbarSeries::new(order, inv)
    }

    /// Apply the operator series to a formal function (Cauchy sum).
    pub fn apply(&self, f: &FormalFunction) -> Result<FormalFunction> {
        self.terms
            .mul_bilinear(f, |op, poly| op.apply(std::slice::from_ref(poly)))
    }

    /// Transport a star product along this equivalence:
    /// `a *' b = T(T^{-1} a * T^{-1} b)`.
    pub fn conjugate(&self, star: &StarProduct) -> Result<StarProduct> {
        if star.dim() != self.dim {
            return Err(DqError::DimMismatch(self.dim, star.dim()));
        }
        let order = star.order();
        if self.order() != order {
            return Err(DqError::OrderMismatch(order, self.order()));
        }
        let u = self.invert()?;
        let zero = MultiDiffOp::zero(self.dim, 2);
        let mut coeffs = vec![zero; order + 1];
        for p in 0..=order {
            let t_p = self.terms.coeff(p);
            if t_p.is_zero() {
                continue;
            }
            for a in 0..=order - p {
                let p_a = star.p_k(a);
                if p_a.is_zero() {
                    continue;
                }
                for q in 0..=order - p - a {
                    let left = p_a.insert_at(0, u.coeff(q))?;
                    if left.is_zero() {
                        continue;
                    }
                    for r in 0..=order - p - a - q {
                        let inner = left.insert_at(1, u.coeff(r))?;
                        let full = compose(t_p, &inner)?;
                        let n = p + a + q + r;
                        coeffs[n] = coeffs[n].add(&full)?;
                    }
                }
            }
        }
        StarProduct::new(self.dim, HbarSeries::new(order, coeffs)?)
    }
}

/// Composition `U o D` of a unary operator after a multidifferential one.
fn compose(u: &MultiDiffOp, d: &MultiDiffOp) -> Result<MultiDiffOp> {
    if u.is_zero() || d.is_zero() {
        return Ok(MultiDiffOp::zero(u.dim(), d.arity()));
    }
    u.insert_at(0, d)
}

impl fmt::Display for StarProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::series::series_string(&self.terms))
    }
}
