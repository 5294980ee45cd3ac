//! The Hochschild-Kostant-Rosenberg map from multivector fields to
//! multidifferential operators, with its chain-map and bracket
//! compatibility checks, and the low-arity L-infinity morphism conditions.
//!
//! `hkr` sends a degree-k multivector to the arity-k operator acting by the
//! determinant pairing `D_X(a_1..a_k) = <X, da_1 x ... x da_k>` (no `1/k!`,
//! matching the pairing convention used for bivectors). Vector fields map
//! to themselves, and the map lands in Hochschild cocycles.

use crate::error::Result;
use crate::multidiff::MultiDiffOp;
use crate::polyvector::PolyVector;

/// The antisymmetrized multiderivation of a multivector: each component
/// `X^{i1..ik} d_{i1} ^ ... ^ d_{ik}` contributes one first-order
/// derivative per argument slot, summed over permutations with sign.
pub fn hkr_map(x: &PolyVector) -> Result<MultiDiffOp> {
    let dim = x.dim();
    let k = x.degree();
    if k == 0 {
        return Ok(MultiDiffOp::constant_cochain(x.as_polynomial()?));
    }
    let mut out = MultiDiffOp::zero(dim, k);
    for (idx, coeff) in x.components() {
        let mut perm: Vec<usize> = (0..k).collect();
        loop {
            let slots: Vec<Vec<usize>> =
                perm.iter().map(|&a| vec![idx[a] + 1]).collect();
            let signed = if permutation_parity(&perm) {
                coeff.neg()
            } else {
                coeff.clone()
            };
            let term = MultiDiffOp::from_terms(dim, k, vec![(slots, signed)])?;
            out = out.add(&term)?;
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }
    Ok(out)
}

/// `d(hkr(X))`; the source complex has zero differential, so the chain-map
/// condition is that this vanishes identically.
pub fn hkr_chain_check(x: &PolyVector) -> Result<MultiDiffOp> {
    hkr_map(x)?.hochschild_d()
}

/// `hkr([X,Y]_S) - [hkr X, hkr Y]_G` together with whether the defect is a
/// Hochschild cocycle. It vanishes for vector fields; in higher degrees it
/// is generally nonzero but closed, which is the computable shadow of
/// "equal in cohomology".
pub struct BracketDefect {
    pub defect: MultiDiffOp,
    pub closed: bool,
}

pub fn hkr_bracket_defect(x: &PolyVector, y: &PolyVector) -> Result<BracketDefect> {
    let lhs = hkr_map(&x.schouten(y)?)?;
    let rhs = hkr_map(x)?.gerst_bracket(&hkr_map(y)?)?;
    let defect = lhs.sub(&rhs)?;
    let closed = defect.hochschild_d()?.is_zero();
    Ok(BracketDefect { defect, closed })
}

/// Unary component of a map family.
pub type MapF1 = Box<dyn Fn(&PolyVector) -> Result<MultiDiffOp>>;
/// Binary component of a map family.
pub type MapF2 = Box<dyn Fn(&PolyVector, &PolyVector) -> Result<MultiDiffOp>>;

/// The first two components of a map family between the two graded Lie
/// algebras; higher components are absent.
pub struct LInftyMapFamily {
    pub f1: MapF1,
    pub f2: MapF2,
}

impl LInftyMapFamily {
    /// The HKR family: `f1 = hkr`, `f2 = 0`.
    pub fn hkr() -> Self {
        LInftyMapFamily {
            f1: Box::new(hkr_map),
            f2: Box::new(|x, y| {
                let arity = (x.degree() + y.degree()).saturating_sub(2);
                Ok(MultiDiffOp::zero(x.dim(), arity))
            }),
        }
    }

    /// The zero family.
    pub fn zero() -> Self {
        LInftyMapFamily {
            f1: Box::new(|x| Ok(MultiDiffOp::zero(x.dim(), x.degree()))),
            f2: Box::new(|x, y| {
                let arity = (x.degree() + y.degree()).saturating_sub(2);
                Ok(MultiDiffOp::zero(x.dim(), arity))
            }),
        }
    }
}

/// Per-sample verdicts for the three checkable morphism conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LInftySampleReport {
    /// `f2(x, y) = -(-1)^{|x||y|} f2(y, x)` in the shifted grading.
    pub antisymmetry: bool,
    /// `d(f1(x)) = 0` and `d(f1(y)) = 0` (the source differential is zero).
    pub chain_map: bool,
    /// `f1([x,y]_S) - [f1 x, f1 y]_G = d(f2(x, y))`.
    pub bracket_compat: bool,
}

impl LInftySampleReport {
    pub fn all_pass(&self) -> bool {
        self.antisymmetry && self.chain_map && self.bracket_compat
    }
}

pub fn linfty_check(
    family: &LInftyMapFamily,
    samples: &[(PolyVector, PolyVector)],
) -> Result<Vec<LInftySampleReport>> {
    let mut reports = Vec::with_capacity(samples.len());
    for (x, y) in samples {
        let f2xy = (family.f2)(x, y)?;
        let f2yx = (family.f2)(y, x)?;
        // shifted degrees
        let sx = x.degree() as i64 - 1;
        let sy = y.degree() as i64 - 1;
        let swapped = if (sx * sy).rem_euclid(2) == 1 {
            f2yx
        } else {
            f2yx.neg()
        };
        let antisymmetry = f2xy == swapped;

        let f1x = (family.f1)(x)?;
        let f1y = (family.f1)(y)?;
        let chain_map =
            f1x.hochschild_d()?.is_zero() && f1y.hochschild_d()?.is_zero();

        let lhs = (family.f1)(&x.schouten(y)?)?;
        let bracket = f1x.gerst_bracket(&f1y)?;
        let defect = lhs.sub(&bracket)?;
        let homotopy = f2xy.hochschild_d()?;
        let bracket_compat = defect == homotopy
            || (defect.is_zero() && homotopy.is_zero());

        reports.push(LInftySampleReport { antisymmetry, chain_map, bracket_compat });
    }
    Ok(reports)
}

fn permutation_parity(perm: &[usize]) -> bool {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn x(dim: usize, i: usize) -> Polynomial {
        Polynomial::var(dim, i).unwrap()
    }

    fn d(dim: usize, i: usize) -> PolyVector {
        PolyVector::basis_vector(dim, i).unwrap()
    }

    #[test]
    fn hkr_examples() {
        // vector fields map to themselves
        let d1 = hkr_map(&d(2, 1)).unwrap();
        let expected = MultiDiffOp::from_terms(
            2,
            1,
            vec![(vec![vec![1]], Polynomial::one(2))],
        )
        .unwrap();
        assert_eq!(d1, expected);
        // hkr(d1 ^ d2) = d1 x d2 - d2 x d1
        let biv = d(2, 1).wedge(&d(2, 2)).unwrap();
        let op = hkr_map(&biv).unwrap();
        let expected = MultiDiffOp::from_terms(
            2,
            2,
            vec![
                (vec![vec![1], vec![2]], Polynomial::one(2)),
                (
                    vec![vec![2], vec![1]],
                    Polynomial::one(2).neg(),
                ),
            ],
        )
        .unwrap();
        assert_eq!(op, expected);
        // hkr(x3 d1 ^ d2) applied to (x1, x2) = x3
        let scaled = d(3, 1)
            .wedge(&d(3, 2))
            .unwrap()
            .scale_poly(&x(3, 3))
            .unwrap();
        let out = hkr_map(&scaled)
            .unwrap()
            .apply(&[x(3, 1), x(3, 2)])
            .unwrap();
        assert_eq!(out, x(3, 3));
    }

    #[test]
    fn chain_check_vanishes() {
        for sample in [
            d(3, 1),
            d(3, 1)
                .wedge(&d(3, 2))
                .unwrap()
                .scale_poly(&x(3, 3))
                .unwrap(),
            PolyVector::zero(3, 2),
        ] {
            assert!(hkr_chain_check(&sample).unwrap().is_zero());
        }
    }

    #[test]
    fn bracket_defect_cases() {
        // vector fields: both sides are the commutator
        let a = d(3, 1).scale_poly(&x(3, 2)).unwrap();
        let b = d(3, 2).scale_poly(&x(3, 1).pow(2)).unwrap();
        let r = hkr_bracket_defect(&a, &b).unwrap();
        assert!(r.defect.is_zero());
        assert!(r.closed);
        // mixed degrees: closed (here even zero, the bivector is constant)
        let biv = d(3, 1).wedge(&d(3, 2)).unwrap();
        let vf = d(3, 3).scale_poly(&x(3, 1)).unwrap();
        let r = hkr_bracket_defect(&biv, &vf).unwrap();
        assert!(r.closed);
        // two polynomial-coefficient bivectors: nonzero defect, still closed
        let p1 = d(3, 1)
            .wedge(&d(3, 2))
            .unwrap()
            .scale_poly(&x(3, 1))
            .unwrap();
        let p2 = d(3, 2)
            .wedge(&d(3, 3))
            .unwrap()
            .scale_poly(&x(3, 2))
            .unwrap();
        let r = hkr_bracket_defect(&p1, &p2).unwrap();
        assert!(!r.defect.is_zero());
        assert!(r.closed);
        // even-degree self bracket: defect need not vanish but is closed
        let pi = d(3, 1)
            .wedge(&d(3, 2))
            .unwrap()
            .scale_poly(&x(3, 2))
            .unwrap();
        let r = hkr_bracket_defect(&pi, &pi).unwrap();
        assert!(!r.defect.is_zero());
        assert!(r.closed);
    }

    #[test]
    fn linfty_reports() {
        let fam = LInftyMapFamily::hkr();
        // vector-field pairs: everything passes with f2 = 0
        let samples = vec![(
            d(3, 1).scale_poly(&x(3, 2)).unwrap(),
            d(3, 2).scale_poly(&x(3, 3)).unwrap(),
        )];
        let reports = linfty_check(&fam, &samples).unwrap();
        assert!(reports[0].all_pass());

        // a constant bivector against x1 d3 still has zero defect; the map
        // only stops respecting brackets when two polynomial-coefficient
        // bivectors meet
        let samples = vec![(
            d(3, 1).wedge(&d(3, 2)).unwrap(),
            d(3, 3).scale_poly(&x(3, 1)).unwrap(),
        )];
        let reports = linfty_check(&fam, &samples).unwrap();
        assert!(reports[0].all_pass());

        // nonzero defect with zero homotopy fails condition 3 but passes
        // conditions 1 and 2
        let samples = vec![(
            d(3, 1)
                .wedge(&d(3, 2))
                .unwrap()
                .scale_poly(&x(3, 1))
                .unwrap(),
            d(3, 2)
                .wedge(&d(3, 3))
                .unwrap()
                .scale_poly(&x(3, 2))
                .unwrap(),
        )];
        let reports = linfty_check(&fam, &samples).unwrap();
        assert!(reports[0].antisymmetry);
        assert!(reports[0].chain_map);
        assert!(!reports[0].bracket_compat);

        // the zero family trivially passes on any sample
        let fam0 = LInftyMapFamily::zero();
        let reports = linfty_check(&fam0, &samples).unwrap();
        assert!(reports[0].all_pass());
    }
}
