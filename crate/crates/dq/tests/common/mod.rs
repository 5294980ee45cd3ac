//! Seeded random generators shared by the integration suites.

#![allow(dead_code)]

use dq::multidiff::MultiDiffOp;
use dq::poly::Polynomial;
use dq::polyvector::PolyVector;
use dq::scalar::{GaussianRational, Rational};
use dq::series::HbarSeries;
use dq::star::EquivalenceOp;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn rand_rational(rng: &mut StdRng) -> Rational {
    let num: i64 = rng.gen_range(-4..=4);
    let den: i64 = rng.gen_range(1..=3);
    Rational::new(num.into(), den.into())
}

pub fn rand_scalar(rng: &mut StdRng) -> GaussianRational {
    GaussianRational::new(rand_rational(rng), rand_rational(rng))
}

pub fn rand_nonzero_scalar(rng: &mut StdRng) -> GaussianRational {
    loop {
        let s = rand_scalar(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

/// A single monomial of total degree at most `max_deg`.
pub fn rand_monomial(rng: &mut StdRng, dim: usize, max_deg: u32) -> Polynomial {
    let deg = rng.gen_range(0..=max_deg);
    let mut exps = vec![0u32; dim];
    for _ in 0..deg {
        let i = rng.gen_range(0..dim);
        exps[i] += 1;
    }
    Polynomial::monomial(dim, exps, GaussianRational::one())
}

/// A polynomial with up to `max_terms` monomials of total degree at most
/// `max_deg` and small rational coefficients.
pub fn rand_poly(rng: &mut StdRng, dim: usize, max_deg: u32, max_terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(dim);
    let terms = rng.gen_range(0..=max_terms);
    for _ in 0..terms {
        let mono = rand_monomial(rng, dim, max_deg);
        p = p.add(&mono.scale(&rand_scalar(rng))).unwrap();
    }
    p
}

/// Strictly increasing index tuple of the given length.
fn rand_tuple(rng: &mut StdRng, dim: usize, len: usize) -> Vec<usize> {
    debug_assert!(len <= dim);
    let mut all: Vec<usize> = (1..=dim).collect();
    for i in (1..all.len()).rev() {
        let j = rng.gen_range(0..=i);
        all.swap(i, j);
    }
    let mut tuple = all[..len].to_vec();
    tuple.sort_unstable();
    tuple
}

pub fn rand_multivector(
    rng: &mut StdRng,
    dim: usize,
    degree: usize,
    coeff_deg: u32,
) -> PolyVector {
    if degree > dim {
        return PolyVector::zero(dim, degree);
    }
    let mut comps = Vec::new();
    let n_comps = rng.gen_range(1..=2);
    for _ in 0..n_comps {
        comps.push((
            rand_tuple(rng, dim, degree),
            rand_poly(rng, dim, coeff_deg, 2),
        ));
    }
    PolyVector::from_components(dim, degree, comps).unwrap()
}

/// Multivector of a random degree in `1..=max_degree`.
pub fn rand_multivector_any(
    rng: &mut StdRng,
    dim: usize,
    max_degree: usize,
    coeff_deg: u32,
) -> PolyVector {
    let degree = rng.gen_range(1..=max_degree.min(dim));
    rand_multivector(rng, dim, degree, coeff_deg)
}

/// Sorted derivative multiset of size `1..=max_order`.
fn rand_deriv(rng: &mut StdRng, dim: usize, max_order: usize, allow_empty: bool) -> Vec<usize> {
    let lo = if allow_empty { 0 } else { 1 };
    let size = rng.gen_range(lo..=max_order);
    let mut slot: Vec<usize> = (0..size).map(|_| rng.gen_range(1..=dim)).collect();
    slot.sort_unstable();
    slot
}

pub fn rand_op(
    rng: &mut StdRng,
    dim: usize,
    arity: usize,
    max_order: usize,
    coeff_deg: u32,
) -> MultiDiffOp {
    let mut terms = Vec::new();
    let n_terms = rng.gen_range(1..=2);
    for _ in 0..n_terms {
        let slots: Vec<Vec<usize>> = (0..arity)
            .map(|_| rand_deriv(rng, dim, max_order, true))
            .collect();
        terms.push((slots, rand_poly(rng, dim, coeff_deg, 2)));
    }
    MultiDiffOp::from_terms(dim, arity, terms).unwrap()
}

/// Normalized arity-1 operator (nonempty derivative slot in every term).
pub fn rand_normalized_unary(
    rng: &mut StdRng,
    dim: usize,
    max_order: usize,
    coeff_deg: u32,
) -> MultiDiffOp {
    let mut terms = Vec::new();
    let n_terms = rng.gen_range(1..=2);
    for _ in 0..n_terms {
        let slot = rand_deriv(rng, dim, max_order, false);
        terms.push((vec![slot], rand_poly(rng, dim, coeff_deg, 2)));
    }
    MultiDiffOp::from_terms(dim, 1, terms).unwrap()
}

/// A random `T = id + h T_1 + h^2 T_2 + ...` with normalized terms of
/// differential order at most `max_order`.
pub fn rand_equivalence(
    rng: &mut StdRng,
    dim: usize,
    order: usize,
    max_order: usize,
) -> EquivalenceOp {
    let mut series = HbarSeries::constant(MultiDiffOp::identity(dim), order);
    for k in 1..=order {
        series.set_coeff(k, rand_normalized_unary(rng, dim, max_order, 1));
    }
    EquivalenceOp::new(dim, series).unwrap()
}

/// Constant antisymmetric bivector with nonzero upper-triangle entries.
pub fn rand_constant_bivector(rng: &mut StdRng, dim: usize) -> PolyVector {
    let mut comps = Vec::new();
    for i in 1..=dim {
        for j in i + 1..=dim {
            let c = rand_scalar(rng);
            if !c.is_zero() {
                comps.push((vec![i, j], Polynomial::constant(dim, c)));
            }
        }
    }
    PolyVector::from_components(dim, 2, comps).unwrap()
}

/// Constant antisymmetric bivector with rational (real) entries only.
pub fn rand_rational_bivector(rng: &mut StdRng, dim: usize) -> PolyVector {
    let mut comps = Vec::new();
    for i in 1..=dim {
        for j in i + 1..=dim {
            let c = rand_rational(rng);
            if !num_traits::Zero::is_zero(&c) {
                comps.push((
                    vec![i, j],
                    Polynomial::constant(dim, GaussianRational::from_rational(c)),
                ));
            }
        }
    }
    PolyVector::from_components(dim, 2, comps).unwrap()
}

/// The standard symplectic bivector on R^(2n):
/// `sum_i d_i ^ d_{n+i}`.
pub fn standard_symplectic(n: usize) -> PolyVector {
    let dim = 2 * n;
    let comps = (1..=n)
        .map(|i| (vec![i, n + i], Polynomial::one(dim)))
        .collect();
    PolyVector::from_components(dim, 2, comps).unwrap()
}
