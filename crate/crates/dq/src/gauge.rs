//! Formal Poisson structures, the Baker-Campbell-Hausdorff product of
//! formal vector fields, and the gauge action of a differential graded Lie
//! algebra on its degree-one formal elements.
//!
//! One generic action routine serves both sides — Schouten (zero
//! differential) and Gerstenhaber (Hochschild differential) — so the two
//! instances cannot drift apart in conventions:
//!
//! `exp(g) a = sum_n (ad g)^n / n! (a) - sum_n (ad g)^n / (n+1)! (dg)`
//!
//! for a gauge element `g` carrying an overall factor ħ.

use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{DqError, Result};
use crate::multidiff::MultiDiffOp;
use crate::poly::Polynomial;
use crate::polyvector::PolyVector;
use crate::scalar::{factorial, GaussianRational, Rational};
use crate::series::{Coeff, HbarSeries};

/// A truncated ħ-series of vector fields (degree-1 multivectors).
pub type FormalVectorField = HbarSeries<PolyVector>;

/// A truncated ħ-series of bivectors.
pub type FormalBivector = HbarSeries<PolyVector>;

/// A differential graded Lie algebra presented by its bracket and
/// differential; elements keep their own grading (multivector degree or
/// operator arity), so one element type serves all degrees.
pub trait Dgla {
    type Elem: Coeff;
    fn bracket(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn differential(&self, a: &Self::Elem) -> Result<Self::Elem>;
}

/// Multivector fields with the Schouten bracket and zero differential.
pub struct SchoutenDgla;

impl Dgla for SchoutenDgla {
    type Elem = PolyVector;
    fn bracket(&self, a: &PolyVector, b: &PolyVector) -> Result<PolyVector> {
        a.schouten(b)
    }
    fn differential(&self, a: &PolyVector) -> Result<PolyVector> {
        Ok(PolyVector::zero(a.dim(), a.degree() + 1))
    }
}

/// Multidifferential operators with the Gerstenhaber bracket and the
/// Hochschild differential.
pub struct GerstenhaberDgla;

impl Dgla for GerstenhaberDgla {
    type Elem = MultiDiffOp;
    fn bracket(&self, a: &MultiDiffOp, b: &MultiDiffOp) -> Result<MultiDiffOp> {
        a.gerst_bracket(b)
    }
    fn differential(&self, a: &MultiDiffOp) -> Result<MultiDiffOp> {
        a.hochschild_d()
    }
}

/// Formal Poisson bracket
/// `{f, g}_h = sum_n h^n sum_{i+j+k=n} pi_i(df_j, dg_k)`.
pub fn formal_poisson_bracket(
    pi: &FormalBivector,
    f: &HbarSeries<Polynomial>,
    g: &HbarSeries<Polynomial>,
) -> Result<HbarSeries<Polynomial>> {
    let order = pi.order();
    if f.order() != order {
        return Err(DqError::OrderMismatch(order, f.order()));
    }
    if g.order() != order {
        return Err(DqError::OrderMismatch(order, g.order()));
    }
    let dim = f.coeff(0).dim();
    let mut coeffs = vec![Polynomial::zero(dim); order + 1];
    for i in 0..=order {
        let p = pi.coeff(i);
        if p.is_zero() {
            continue;
        }
        for j in 0..=order - i {
            for k in 0..=order - i - j {
                let term = p.poisson_bracket(f.coeff(j), g.coeff(k))?;
                coeffs[i + j + k] = coeffs[i + j + k].add(&term)?;
            }
        }
    }
    HbarSeries::new(order, coeffs)
}

/// Maurer-Cartan residual on the Schouten side: since the differential
/// vanishes, `(1/2) sum_n h^n sum_{a+b=n} [pi_a, pi_b]_S` (a series of
/// trivectors).
pub fn mc_residual_poisson(pi: &FormalBivector) -> Result<HbarSeries<PolyVector>> {
    let half = GaussianRational::from_ratio(1, 2);
    Ok(pi
        .mul_bilinear(pi, |a, b| a.schouten(b))?
        .scale(&half))
}

/// The convolution bracket on formal elements:
/// `(ad g x)_n = sum_{p+q=n} [g_p, x_q]`.
fn ad_series<D: Dgla>(
    ctx: &D,
    g: &HbarSeries<D::Elem>,
    x: &HbarSeries<D::Elem>,
) -> Result<HbarSeries<D::Elem>> {
    g.mul_bilinear(x, |a, b| ctx.bracket(a, b))
}

/// Gauge action of `exp(g)` on a degree-one formal element `a`:
///
/// `exp(g) a = sum_n (ad g)^n/n! (a) - sum_n (ad g)^n/(n+1)! (dg)`.
///
/// `g` must vanish at ħ^0 (it lives in `h g^0 [[h]]`), which makes `ad g`
/// nilpotent at any truncation order.
pub fn gauge_act<D: Dgla>(
    ctx: &D,
    g: &HbarSeries<D::Elem>,
    a: &HbarSeries<D::Elem>,
) -> Result<HbarSeries<D::Elem>> {
    if !g.coeff(0).is_zero() {
        return Err(DqError::domain(
            "gauge element must carry an overall factor of h (vanish at order 0)",
        ));
    }
    let order = a.order();
    if g.order() != order {
        return Err(DqError::OrderMismatch(order, g.order()));
    }
    // sum (ad g)^n / n! (a)
    let mut result = a.clone();
    let mut power = a.clone();
    for n in 1..=order {
        power = ad_series(ctx, g, &power)?;
        if power.is_zero() {
            break;
        }
        let inv_fact = GaussianRational::from_rational(
            Rational::one() / factorial(n),
        );
        result = result.add(&power.scale(&inv_fact))?;
    }
    // - sum (ad g)^n / (n+1)! (dg)
    let dg = g.map(|e| ctx.differential(e))?;
    if !dg.is_zero() {
        let mut power = dg.clone();
        result = result.sub(&power)?; // n = 0 term, 1/1!
        for n in 1..=order {
            power = ad_series(ctx, g, &power)?;
            if power.is_zero() {
                break;
            }
            let inv_fact = GaussianRational::from_rational(
                Rational::one() / factorial(n + 1),
            );
            result = result.sub(&power.scale(&inv_fact))?;
        }
    }
    Ok(result)
}

/// Push a formal bivector along the flow of a formal vector field:
/// the exponential of the derivation `L = sum_k h^{k+1} [X_k, .]_S`,
/// i.e. the Schouten gauge action with gauge element `h X`.
pub fn gauge_apply_bivector(
    x: &FormalVectorField,
    pi: &FormalBivector,
) -> Result<FormalBivector> {
    let g = x.shift_up(1);
    gauge_act(&SchoutenDgla, &g, pi)
}

/// Baker-Campbell-Hausdorff product of formal vector fields: the `Z` with
/// `exp(h Z) = exp(h X) exp(h Y)` up to order `N`, computed from the Dynkin
/// nested-commutator series truncated in total ħ-degree.
pub fn bch(
    x: &FormalVectorField,
    y: &FormalVectorField,
    order: usize,
) -> Result<FormalVectorField> {
    for s in [x, y] {
        for c in s.coeffs() {
            if !c.is_zero() && c.degree() != 1 {
                return Err(DqError::DegreeMismatch { expected: 1, got: c.degree() });
            }
        }
    }
    let dim = x.coeff(0).dim();
    let shape = PolyVector::zero(dim, 1);
    // group-algebra elements: series of order N+1 with zero constant term
    let inner = order + 1;
    let a = x.with_order(inner).shift_up(1);
    let b = y.with_order(inner).shift_up(1);

    let lie = |u: &HbarSeries<PolyVector>, v: &HbarSeries<PolyVector>| {
        u.mul_bilinear(v, |p, q| p.schouten(q))
    };

    let mut acc = HbarSeries::zero(&shape, inner);
    // blocks (r_i, s_i) with r_i + s_i > 0 and total letter count <= N + 1
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    enumerate_dynkin(&mut blocks, 0, inner, &mut |blocks| {
        let letters: usize = blocks.iter().map(|(r, s)| r + s).sum();
        let word: Vec<bool> = blocks
            .iter()
            .flat_map(|&(r, s)| {
                std::iter::repeat_n(false, r).chain(std::iter::repeat_n(true, s))
            })
            .collect();
        // innermost [c, c] vanishes
        if word.len() >= 2 && word[word.len() - 1] == word[word.len() - 2] {
            return Ok(());
        }
        // right-nested commutator [w1, [w2, [... [w_{L-1}, w_L]]]]
        let pick = |is_b: bool| if is_b { &b } else { &a };
        let mut nested = pick(word[letters - 1]).clone();
        for &l in word[..letters - 1].iter().rev() {
            nested = lie(pick(l), &nested)?;
            if nested.is_zero() {
                break;
            }
        }
        if nested.is_zero() {
            return Ok(());
        }
        // (-1)^(n-1) / (n * L * prod r_i! s_i!)
        let n = blocks.len();
        let mut denom = Rational::from_integer((n as i64 * letters as i64).into());
        for &(r, s) in blocks {
            denom *= factorial(r) * factorial(s);
        }
        let mut coeff = Rational::one() / denom;
        if (n - 1) % 2 == 1 {
            coeff = -coeff;
        }
        acc = acc.add(&nested.scale(&GaussianRational::from_rational(coeff)))?;
        Ok(())
    })?;

    if !acc.coeff(0).is_zero() {
        return Err(DqError::domain("BCH series acquired a constant term"));
    }
    // h Z -> Z: drop the overall h
    let mut coeffs = acc.coeffs()[1..].to_vec();
    debug_assert_eq!(coeffs.len(), order + 1);
    for c in coeffs.iter_mut() {
        if c.is_zero() {
            *c = PolyVector::zero(dim, 1);
        }
    }
    HbarSeries::new(order, coeffs)
}

/// Enumerate Dynkin block sequences `(r_1, s_1) ... (r_n, s_n)` with
/// `r_i + s_i >= 1` and total letter count in `1..=max_letters`.
fn enumerate_dynkin(
    blocks: &mut Vec<(usize, usize)>,
    used: usize,
    max_letters: usize,
    f: &mut impl FnMut(&[(usize, usize)]) -> Result<()>,
) -> Result<()> {
    if !blocks.is_empty() {
        f(blocks)?;
    }
    if used == max_letters {
        return Ok(());
    }
    let budget = max_letters - used;
    for total in 1..=budget {
        for r in 0..=total {
            let s = total - r;
            blocks.push((r, s));
            enumerate_dynkin(blocks, used + total, max_letters, f)?;
            blocks.pop();
        }
    }
    Ok(())
}

/// Logarithm of an equivalence-style operator series `id + X` (with `X`
/// vanishing at ħ^0), under Cauchy composition of arity-1 operators.
/// Used to cross the bridge between equivalence transforms and the
/// Gerstenhaber gauge action.
pub fn log_unary_series(
    t: &HbarSeries<MultiDiffOp>,
) -> Result<HbarSeries<MultiDiffOp>> {
    let dim = t.coeff(0).dim();
    let id = MultiDiffOp::identity(dim);
    if *t.coeff(0) != id {
        return Err(DqError::domain(
            "logarithm needs an operator series with identity at order 0",
        ));
    }
    let order = t.order();
    let mut x = t.clone();
    x.set_coeff(0, MultiDiffOp::zero(dim, 1));
    let compose = |u: &HbarSeries<MultiDiffOp>, v: &HbarSeries<MultiDiffOp>| {
        u.mul_bilinear(v, |a, b| {
            if a.is_zero() || b.is_zero() {
                Ok(MultiDiffOp::zero(dim, 1))
            } else {
                a.insert_at(0, b)
            }
        })
    };
    // log(1 + X) = X - X^2/2 + X^3/3 - ...
    let mut acc = x.clone();
    let mut power = x.clone();
    for k in 2..=order {
        power = compose(&power, &x)?;
        if power.is_zero() {
            break;
        }
        let mut c = Rational::one() / Rational::from_integer((k as i64).into());
        if k % 2 == 0 {
            c = -c;
        }
        acc = acc.add(&power.scale(&GaussianRational::from_rational(c)))?;
    }
    Ok(acc)
}

/// Convenience: build a formal series of multivectors from `(order, value)`
/// entries, everything else zero.
pub fn series_from_entries<C: Coeff>(
    shape: &C,
    order: usize,
    entries: Vec<(usize, C)>,
) -> Result<HbarSeries<C>> {
    let mut s = HbarSeries::zero(shape, order);
    let mut seen = BTreeMap::new();
    for (k, v) in entries {
        if k > order {
            return Err(DqError::domain(format!(
                "series entry at order {} exceeds truncation order {}",
                k, order
            )));
        }
        if seen.insert(k, ()).is_some() {
            return Err(DqError::domain(format!("duplicate series entry at order {}", k)));
        }
        s.set_coeff(k, v);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::StarProduct;

    fn x(dim: usize, i: usize) -> Polynomial {
        Polynomial::var(dim, i).unwrap()
    }

    fn d(dim: usize, i: usize) -> PolyVector {
        PolyVector::basis_vector(dim, i).unwrap()
    }

    #[test]
    fn formal_poisson_bracket_examples() {
        let dim = 2;
        let pi = series_from_entries(
            &PolyVector::zero(dim, 2),
            2,
            vec![(1, d(2, 1).wedge(&d(2, 2)).unwrap())],
        )
        .unwrap();
        let f = HbarSeries::constant(x(2, 1), 2);
        let g = HbarSeries::constant(x(2, 2), 2);
        // {x1, x2}_h = h
        let out = formal_poisson_bracket(&pi, &f, &g).unwrap();
        assert!(out.coeff(0).is_zero());
        assert!(out.coeff(1).is_one());
        assert!(out.coeff(2).is_zero());
        // antisymmetry: {f, f} = 0
        assert!(formal_poisson_bracket(&pi, &f, &f).unwrap().is_zero());
        // two orders expand degreewise
        let pi2 = series_from_entries(
            &PolyVector::zero(3, 2),
            2,
            vec![
                (1, d(3, 1).wedge(&d(3, 2)).unwrap()),
                (2, d(3, 2).wedge(&d(3, 3)).unwrap().scale_poly(&x(3, 3)).unwrap()),
            ],
        )
        .unwrap();
        let f3 = HbarSeries::constant(x(3, 1), 2);
        let g3 = HbarSeries::constant(x(3, 2), 2);
        let out = formal_poisson_bracket(&pi2, &f3, &g3).unwrap();
        assert!(out.coeff(0).is_zero());
        assert!(out.coeff(1).is_one());
        assert_eq!(
            out.coeff(2),
            &pi2.coeff(2).poisson_bracket(&x(3, 1), &x(3, 2)).unwrap()
        );
    }

    #[test]
    fn mc_residual_poisson_examples() {
        // constant bivector: residual vanishes
        let pi = series_from_entries(
            &PolyVector::zero(2, 2),
            2,
            vec![(1, d(2, 1).wedge(&d(2, 2)).unwrap())],
        )
        .unwrap();
        assert!(mc_residual_poisson(&pi).unwrap().is_zero());
        // the non-Poisson bivector shows up at h^2
        let bad = d(3, 1)
            .wedge(&d(3, 2))
            .unwrap()
            .add(&d(3, 2).wedge(&d(3, 3)).unwrap().scale_poly(&x(3, 2)).unwrap())
            .unwrap();
        let pi_bad =
            series_from_entries(&PolyVector::zero(3, 2), 2, vec![(1, bad.clone())]).unwrap();
        let res = mc_residual_poisson(&pi_bad).unwrap();
        assert!(res.coeff(0).is_zero());
        assert!(res.coeff(1).is_zero());
        assert_eq!(
            res.coeff(2),
            &bad.schouten(&bad)
                .unwrap()
                .scale(&GaussianRational::from_ratio(1, 2))
        );
        // zero input
        let z: FormalBivector = HbarSeries::zero(&PolyVector::zero(3, 2), 2);
        assert!(mc_residual_poisson(&z).unwrap().is_zero());
    }

    #[test]
    fn bch_commuting_and_leading_term() {
        // commuting constant fields: exactly X + Y
        let xf = HbarSeries::constant(d(2, 1), 3);
        let yf = HbarSeries::constant(d(2, 2), 3);
        assert_eq!(bch(&xf, &yf, 3).unwrap(), xf.add(&yf).unwrap());

        // leading correction: Z_1 = (X_1 + Y_1) + [X_0, Y_0]/2
        let x0 = d(2, 1).scale_poly(&x(2, 2)).unwrap();
        let y0 = d(2, 2);
        let xs = HbarSeries::constant(x0.clone(), 2);
        let ys = HbarSeries::constant(y0.clone(), 2);
        let z = bch(&xs, &ys, 2).unwrap();
        assert_eq!(z.coeff(0), &x0.add(&y0).unwrap());
        assert_eq!(
            z.coeff(1),
            &x0.schouten(&y0)
                .unwrap()
                .scale(&GaussianRational::from_ratio(1, 2))
        );
    }

    #[test]
    fn bch_group_associativity() {
        let xs = HbarSeries::constant(d(2, 1).scale_poly(&x(2, 2)).unwrap(), 3);
        let ys = HbarSeries::constant(d(2, 2).scale_poly(&x(2, 1)).unwrap(), 3);
        let ws = HbarSeries::constant(d(2, 1), 3);
        let left = bch(&bch(&xs, &ys, 3).unwrap(), &ws, 3).unwrap();
        let right = bch(&xs, &bch(&ys, &ws, 3).unwrap(), 3).unwrap();
        assert_eq!(left, right);
    }

    /// Oracle: exp(hX) exp(hY) composed as arity-1 operator series equals
    /// exp(h bch(X, Y)); the operator exponential is an independent route
    /// through the Gerstenhaber machinery. Order 4 reaches the weight-4
    /// nested commutators (the 1/24 coefficients).
    #[test]
    fn bch_matches_operator_exponential() {
        let dim = 2;
        let order = 4;
        let to_op = |pv: &PolyVector| -> MultiDiffOp {
            let mut acc = MultiDiffOp::zero(dim, 1);
            for (idx, p) in pv.components() {
                let t = MultiDiffOp::from_terms(
                    dim,
                    1,
                    vec![(vec![vec![idx[0] + 1]], p.clone())],
                )
                .unwrap();
                acc = acc.add(&t).unwrap();
            }
            acc
        };
        let compose_series = |u: &HbarSeries<MultiDiffOp>, v: &HbarSeries<MultiDiffOp>| {
            u.mul_bilinear(v, |a, b| {
                if a.is_zero() || b.is_zero() {
                    Ok(MultiDiffOp::zero(dim, 1))
                } else {
                    a.insert_at(0, b)
                }
            })
            .unwrap()
        };
        let expm = |vf: &FormalVectorField| -> HbarSeries<MultiDiffOp> {
            let ops = vf.map(|pv| Ok(to_op(pv))).unwrap().shift_up(1);
            let mut acc = HbarSeries::constant(MultiDiffOp::identity(dim), order);
            let mut power = HbarSeries::constant(MultiDiffOp::identity(dim), order);
            for k in 1..=order {
                power = compose_series(&power, &ops);
                let c = GaussianRational::from_rational(Rational::one() / factorial(k));
                acc = acc.add(&power.scale(&c)).unwrap();
            }
            acc
        };

        let xs = HbarSeries::constant(d(2, 1).scale_poly(&x(2, 2)).unwrap(), order);
        let ys = HbarSeries::constant(d(2, 2).scale_poly(&x(2, 1).pow(2)).unwrap(), order);
        let z = bch(&xs, &ys, order).unwrap();
        let lhs = compose_series(&expm(&xs), &expm(&ys));
        let rhs = expm(&z);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gauge_act_closed_form() {
        // g = h x1 d1, a = h (d1 ^ d2):
        // coefficients (-1)^k / k! at h^(k+1)
        let order = 5;
        let pi = d(2, 1).wedge(&d(2, 2)).unwrap();
        let a = series_from_entries(&PolyVector::zero(2, 2), order, vec![(1, pi.clone())])
            .unwrap();
        let xf = HbarSeries::constant(d(2, 1).scale_poly(&x(2, 1)).unwrap(), order);
        let out = gauge_apply_bivector(&xf, &a).unwrap();
        assert!(out.coeff(0).is_zero());
        for k in 0..order {
            let mut c = Rational::one() / factorial(k);
            if k % 2 == 1 {
                c = -c;
            }
            assert_eq!(
                out.coeff(k + 1),
                &pi.scale(&GaussianRational::from_rational(c)),
                "coefficient at h^{}",
                k + 1
            );
        }
        // g = 0 returns a unchanged
        let zero_g = HbarSeries::zero(&PolyVector::zero(2, 1), order);
        assert_eq!(gauge_act(&SchoutenDgla, &zero_g, &a).unwrap(), a);
        // constant X leaves constant bivectors alone
        let const_x = HbarSeries::constant(d(2, 1), order);
        assert_eq!(gauge_apply_bivector(&const_x, &a).unwrap(), a);
    }

    #[test]
    fn gauge_act_rejects_order_zero_element() {
        let a = HbarSeries::constant(d(2, 1).wedge(&d(2, 2)).unwrap(), 2);
        let g = HbarSeries::constant(d(2, 1), 2);
        assert!(gauge_act(&SchoutenDgla, &g, &a).is_err());
    }

    #[test]
    fn gauge_inverse_restores() {
        let order = 3;
        let pi = d(2, 1)
            .wedge(&d(2, 2))
            .unwrap()
            .scale_poly(&x(2, 1))
            .unwrap();
        let a = series_from_entries(&PolyVector::zero(2, 2), order, vec![(1, pi)]).unwrap();
        let g = HbarSeries::constant(d(2, 1).scale_poly(&x(2, 2)).unwrap(), order)
            .shift_up(1);
        let there = gauge_act(&SchoutenDgla, &g, &a).unwrap();
        let back = gauge_act(&SchoutenDgla, &g.neg(), &there).unwrap();
        assert_eq!(back, a);
    }

    /// The Gerstenhaber gauge action through log(T) agrees with the
    /// equivalence transform of the star product, through order h^2.
    #[test]
    fn gauge_matches_equivalence_transform() {
        use crate::star::EquivalenceOp;
        let order = 2;
        let alpha = d(2, 1).wedge(&d(2, 2)).unwrap();
        let star = StarProduct::moyal(&alpha, order).unwrap();
        let t1 = MultiDiffOp::from_terms(
            2,
            1,
            vec![(vec![vec![1, 1]], Polynomial::one(2))],
        )
        .unwrap();
        let mut t_series = HbarSeries::constant(MultiDiffOp::identity(2), order);
        t_series.set_coeff(1, t1);
        let t = EquivalenceOp::new(2, t_series.clone()).unwrap();

        let via_equiv = t.conjugate(&star).unwrap().deformation_part();
        let g = log_unary_series(&t_series).unwrap();
        let via_gauge =
            gauge_act(&GerstenhaberDgla, &g, &star.deformation_part()).unwrap();
        assert_eq!(via_equiv, via_gauge);
    }

    /// Gauge transforms preserve the Maurer-Cartan set on the Schouten side.
    #[test]
    fn gauge_preserves_mc() {
        let order = 3;
        let pi = d(3, 1).wedge(&d(3, 2)).unwrap();
        let a = series_from_entries(&PolyVector::zero(3, 2), order, vec![(1, pi)]).unwrap();
        assert!(mc_residual_poisson(&a).unwrap().is_zero());
        let xf = HbarSeries::constant(
            d(3, 1)
                .scale_poly(&x(3, 2).mul(&x(3, 3)).unwrap())
                .unwrap(),
            order,
        );
        let moved = gauge_apply_bivector(&xf, &a).unwrap();
        assert!(mc_residual_poisson(&moved).unwrap().is_zero());
    }
}
