//! Multivector fields with polynomial components: wedge product,
//! Schouten-Nijenhuis bracket, and the Poisson machinery built on bivectors
//! (sharp map, brackets, Hamiltonian fields, Jacobiator).
//!
//! A degree-`k` multivector stores one polynomial component per strictly
//! increasing index tuple `i1 < ... < ik`; antisymmetry is representational,
//! so equality is structural. Degree 0 is a plain polynomial (stored under
//! the empty tuple). Index tuples are 0-based internally, 1-based in every
//! public printing/parsing surface.
//!
//! The pairing convention throughout the crate is the determinant pairing
//! `<d_{i1} ^ ... ^ d_{ik}, df1 x ... x dfk> = det [d_{ia} f_b]`, with no
//! `1/k!` factor.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{DqError, Result};
use crate::poly::{join_terms, Polynomial};
use crate::scalar::GaussianRational;
use crate::series::Coeff;

#[derive(Clone, PartialEq)]
pub struct PolyVector {
    dim: usize,
    degree: usize,
    components: BTreeMap<Vec<usize>, Polynomial>,
}

/// A differential 1-form `sum_i a_i dx_i` with polynomial coefficients.
#[derive(Clone, PartialEq)]
pub struct CovectorField {
    dim: usize,
    components: Vec<Polynomial>,
}

impl CovectorField {
    pub fn new(dim: usize, components: Vec<Polynomial>) -> Result<Self> {
        if components.len() != dim {
            return Err(DqError::DimMismatch(dim, components.len()));
        }
        for c in &components {
            if c.dim() != dim {
                return Err(DqError::DimMismatch(dim, c.dim()));
            }
        }
        Ok(CovectorField { dim, components })
    }

    pub fn zero(dim: usize) -> Self {
        CovectorField {
            dim,
            components: vec![Polynomial::zero(dim); dim],
        }
    }

    /// The differential `df`.
    pub fn differential(f: &Polynomial) -> Result<Self> {
        let dim = f.dim();
        let components = (1..=dim)
            .map(|i| f.partial(i))
            .collect::<Result<Vec<_>>>()?;
        CovectorField::new(dim, components)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficient of `dx_i`, `i` 1-based.
    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }
}

impl PolyVector {
    pub fn zero(dim: usize, degree: usize) -> Self {
        PolyVector { dim, degree, components: BTreeMap::new() }
    }

    /// Degree-0 multivector wrapping a polynomial.
    pub fn from_polynomial(p: Polynomial) -> Self {
        let dim = p.dim();
        let mut pv = PolyVector::zero(dim, 0);
        if !p.is_zero() {
            pv.components.insert(Vec::new(), p);
        }
        pv
    }

    /// The coordinate field `d_i`, `i` 1-based.
    pub fn basis_vector(dim: usize, i: usize) -> Result<Self> {
        if i == 0 || i > dim {
            return Err(DqError::IndexOutOfRange(i, dim));
        }
        let mut pv = PolyVector::zero(dim, 1);
        pv.components.insert(vec![i - 1], Polynomial::one(dim));
        Ok(pv)
    }

    /// Build from 1-based strictly increasing index tuples.
    pub fn from_components(
        dim: usize,
        degree: usize,
        comps: Vec<(Vec<usize>, Polynomial)>,
    ) -> Result<Self> {
        let mut pv = PolyVector::zero(dim, degree);
        for (idx, p) in comps {
            if idx.len() != degree {
                return Err(DqError::DegreeMismatch { expected: degree, got: idx.len() });
            }
            if p.dim() != dim {
                return Err(DqError::DimMismatch(dim, p.dim()));
            }
            let mut internal = Vec::with_capacity(idx.len());
            for &i in &idx {
                if i == 0 || i > dim {
                    return Err(DqError::IndexOutOfRange(i, dim));
                }
                internal.push(i - 1);
            }
            if internal.windows(2).any(|w| w[0] >= w[1]) {
                return Err(DqError::domain(
                    "component index tuples must be strictly increasing",
                ));
            }
            pv.insert_component(internal, p);
        }
        Ok(pv)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Component polynomials keyed by 0-based increasing tuples.
    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Polynomial)> {
        self.components.iter()
    }

    /// Component at a 1-based strictly increasing tuple.
    pub fn component(&self, indices: &[usize]) -> Polynomial {
        let internal: Vec<usize> = indices.iter().map(|&i| i - 1).collect();
        self.components
            .get(&internal)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.dim))
    }

    pub fn as_polynomial(&self) -> Result<Polynomial> {
        if self.degree != 0 {
            return Err(DqError::DegreeMismatch { expected: 0, got: self.degree });
        }
        Ok(self
            .components
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.dim)))
    }

    fn insert_component(&mut self, idx: Vec<usize>, p: Polynomial) {
        if p.is_zero() {
            return;
        }
        match self.components.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&p).expect("same dim");
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Add `sign * p` at an arbitrary (possibly unsorted) index tuple,
    /// sorting it and folding the permutation sign in; repeated indices give
    /// zero.
    fn insert_unsorted(&mut self, idx: &[usize], p: Polynomial, negate: bool) {
        if p.is_zero() {
            return;
        }
        let mut sorted: Vec<usize> = idx.to_vec();
        let mut sign = false;
        // insertion sort, counting transpositions
        for i in 1..sorted.len() {
            let mut j = i;
            while j > 0 && sorted[j - 1] > sorted[j] {
                sorted.swap(j - 1, j);
                sign = !sign;
                j -= 1;
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return;
        }
        let value = if sign != negate { p.neg() } else { p };
        self.insert_component(sorted, value);
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(DqError::DimMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        if self.degree != other.degree {
            // adding zero across degrees is fine; anything else is not
            if self.is_zero() {
                return Ok(other.clone());
            }
            if other.is_zero() {
                return Ok(self.clone());
            }
            return Err(DqError::DegreeMismatch {
                expected: self.degree,
                got: other.degree,
            });
        }
        let mut out = self.clone();
        for (idx, p) in &other.components {
            out.insert_component(idx.clone(), p.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PolyVector {
            dim: self.dim,
            degree: self.degree,
            components: self
                .components
                .iter()
                .map(|(i, p)| (i.clone(), p.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        if s.is_zero() {
            return PolyVector::zero(self.dim, self.degree);
        }
        PolyVector {
            dim: self.dim,
            degree: self.degree,
            components: self
                .components
                .iter()
                .map(|(i, p)| (i.clone(), p.scale(s)))
                .collect(),
        }
    }

    pub fn scale_poly(&self, f: &Polynomial) -> Result<Self> {
        let mut out = PolyVector::zero(self.dim, self.degree);
        for (idx, p) in &self.components {
            out.insert_component(idx.clone(), p.mul(f)?);
        }
        Ok(out)
    }

    /// Wedge product; the sign comes from sorting the concatenated index
    /// tuples, and repeated indices vanish.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = PolyVector::zero(self.dim, self.degree + other.degree);
        for (ia, pa) in &self.components {
            for (ib, pb) in &other.components {
                let mut idx = ia.clone();
                idx.extend_from_slice(ib);
                out.insert_unsorted(&idx, pa.mul(pb)?, false);
            }
        }
        Ok(out)
    }

    /// The Schouten-Nijenhuis bracket.
    ///
    /// Positive-degree components are handled as decomposables
    /// `(p d_{i1}) ^ d_{i2} ^ ... ^ d_{ik}` via the double sum
    /// `sum_{a,b} (-1)^{a+b} [X_a, Y_b] ^ rest`; a degree-0 argument `f`
    /// enters through `[X, f] = (-1)^(k-1) i_{df} X` (and `[f, X] =
    /// -i_{df} X`), the unique extension for which the graded Leibniz rule
    /// keeps holding. For two vector fields this is the Lie bracket.
    pub fn schouten(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let (k, l) = (self.degree, other.degree);
        if k == 0 && l == 0 {
            return Ok(PolyVector::zero(self.dim, 0));
        }
        if l == 0 {
            // [X, f] = (-1)^(k-1) i_df X
            let f = other.as_polynomial()?;
            let contraction = self.contract_differential(&f)?;
            return Ok(if k % 2 == 0 { contraction.neg() } else { contraction });
        }
        if k == 0 {
            // [f, Y] = -i_df Y
            let f = self.as_polynomial()?;
            return Ok(other.contract_differential(&f)?.neg());
        }

        let mut out = PolyVector::zero(self.dim, k + l - 1);
        for (ia, pa) in &self.components {
            for (ib, pb) in &other.components {
                self.schouten_component_pair(ia, pa, ib, pb, &mut out)?;
            }
        }
        Ok(out)
    }

    /// One `(component, component)` contribution to the Schouten bracket.
    ///
    /// The term `p d_I` is read as the decomposable `(p d_{I[0]}) ^ d_{I[1]}
    /// ^ ...`, and similarly for `q d_J`; the coefficient rides on the first
    /// factor only, which is exact, and the double sum is bilinear.
    fn schouten_component_pair(
        &self,
        ia: &[usize],
        pa: &Polynomial,
        ib: &[usize],
        pb: &Polynomial,
        out: &mut PolyVector,
    ) -> Result<()> {
        let one = Polynomial::one(self.dim);
        for (apos, &u) in ia.iter().enumerate() {
            let cf_a = if apos == 0 { pa } else { &one };
            for (bpos, &v) in ib.iter().enumerate() {
                let cf_b = if bpos == 0 { pb } else { &one };
                // [cf_a d_u, cf_b d_v] = cf_a (d_u cf_b) d_v - cf_b (d_v cf_a) d_u
                let mut bracket_terms: Vec<(Polynomial, usize)> = Vec::new();
                let t1 = cf_a.mul(&cf_b.partial(u + 1)?)?;
                if !t1.is_zero() {
                    bracket_terms.push((t1, v));
                }
                let t2 = cf_b.mul(&cf_a.partial(v + 1)?)?;
                if !t2.is_zero() {
                    bracket_terms.push((t2.neg(), u));
                }
                if bracket_terms.is_empty() {
                    continue;
                }
                // (-1)^(a+b) with 1-based positions
                let negate = (apos + bpos) % 2 != 0;
                // coefficient of the remaining wedge factors
                let mut rest_coeff = Polynomial::one(self.dim);
                if apos != 0 {
                    rest_coeff = rest_coeff.mul(pa)?;
                }
                if bpos != 0 {
                    rest_coeff = rest_coeff.mul(pb)?;
                }
                let mut rest_idx: Vec<usize> = Vec::with_capacity(ia.len() + ib.len() - 1);
                rest_idx.extend(ia.iter().enumerate().filter(|(p, _)| *p != apos).map(|(_, &i)| i));
                rest_idx.extend(ib.iter().enumerate().filter(|(p, _)| *p != bpos).map(|(_, &i)| i));
                for (coeff, w) in bracket_terms {
                    let mut idx = Vec::with_capacity(rest_idx.len() + 1);
                    idx.push(w);
                    idx.extend_from_slice(&rest_idx);
                    out.insert_unsorted(&idx, coeff.mul(&rest_coeff)?, negate);
                }
            }
        }
        Ok(())
    }

    /// Contraction of `df` into the first slot, summed with alternating
    /// signs: `i_df (d_{i1} ^ ... ^ d_{ik}) = sum_a (-1)^(a-1)
    /// (d_{ia} f) d_{i1} ^ ... (omit a) ... ^ d_{ik}`.
    pub fn contract_differential(&self, f: &Polynomial) -> Result<Self> {
        if self.degree == 0 {
            return Ok(PolyVector::zero(self.dim, 0));
        }
        let mut out = PolyVector::zero(self.dim, self.degree - 1);
        for (idx, p) in &self.components {
            for (a, &i) in idx.iter().enumerate() {
                let df = f.partial(i + 1)?;
                if df.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .filter(|(pos, _)| *pos != a)
                    .map(|(_, &j)| j)
                    .collect();
                out.insert_unsorted(&rest, p.mul(&df)?, a % 2 != 0);
            }
        }
        Ok(out)
    }

    /// Determinant pairing with differentials: `<X, df_1 x ... x df_k>`.
    pub fn pair_with_differentials(&self, fs: &[Polynomial]) -> Result<Polynomial> {
        if fs.len() != self.degree {
            return Err(DqError::DegreeMismatch { expected: self.degree, got: fs.len() });
        }
        if self.degree == 0 {
            return self.as_polynomial();
        }
        let mut acc = Polynomial::zero(self.dim);
        for (idx, p) in &self.components {
            let det = determinant_of_partials(idx, fs)?;
            acc = acc.add(&p.mul(&det)?)?;
        }
        Ok(acc)
    }

    /// Apply a vector field (degree 1) to a function.
    pub fn apply_to(&self, f: &Polynomial) -> Result<Polynomial> {
        if self.degree != 1 {
            return Err(DqError::DegreeMismatch { expected: 1, got: self.degree });
        }
        let mut acc = Polynomial::zero(self.dim);
        for (idx, p) in &self.components {
            acc = acc.add(&p.mul(&f.partial(idx[0] + 1)?)?)?;
        }
        Ok(acc)
    }

    fn check_bivector(&self) -> Result<()> {
        if self.degree != 2 {
            return Err(DqError::DegreeMismatch { expected: 2, got: self.degree });
        }
        Ok(())
    }

    /// Full antisymmetric coefficient matrix of a bivector (0-based).
    pub fn bivector_matrix(&self) -> Result<Vec<Vec<Polynomial>>> {
        self.check_bivector()?;
        let mut m = vec![vec![Polynomial::zero(self.dim); self.dim]; self.dim];
        for (idx, p) in &self.components {
            m[idx[0]][idx[1]] = p.clone();
            m[idx[1]][idx[0]] = p.neg();
        }
        Ok(m)
    }

    /// The induced map `alpha -> pi#(alpha)` with
    /// `pi(alpha, beta) = <pi#(alpha), beta>`.
    #[allow(clippy::needless_range_loop)]
    pub fn sharp(&self, alpha: &CovectorField) -> Result<PolyVector> {
        self.check_bivector()?;
        if alpha.dim() != self.dim {
            return Err(DqError::DimMismatch(self.dim, alpha.dim()));
        }
        let m = self.bivector_matrix()?;
        let mut out = PolyVector::zero(self.dim, 1);
        for j in 0..self.dim {
            let mut comp = Polynomial::zero(self.dim);
            for i in 0..self.dim {
                comp = comp.add(&m[i][j].mul(alpha.component(i + 1))?)?;
            }
            out.insert_component(vec![j], comp);
        }
        Ok(out)
    }

    /// `{f, g} = pi(df, dg) = sum_{i<j} pi^{ij} (d_i f d_j g - d_j f d_i g)`.
    pub fn poisson_bracket(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        self.check_bivector()?;
        if f.dim() != self.dim {
            return Err(DqError::DimMismatch(self.dim, f.dim()));
        }
        if g.dim() != self.dim {
            return Err(DqError::DimMismatch(self.dim, g.dim()));
        }
        let mut acc = Polynomial::zero(self.dim);
        for (idx, p) in &self.components {
            let (i, j) = (idx[0] + 1, idx[1] + 1);
            let skew = f
                .partial(i)?
                .mul(&g.partial(j)?)?
                .sub(&f.partial(j)?.mul(&g.partial(i)?)?)?;
            acc = acc.add(&p.mul(&skew)?)?;
        }
        Ok(acc)
    }

    /// Hamiltonian vector field `X_f = pi#(df)`, so `X_f(g) = {f, g}`.
    pub fn hamiltonian_vf(&self, f: &Polynomial) -> Result<PolyVector> {
        self.sharp(&CovectorField::differential(f)?)
    }

    /// Cyclic sum `{f,{g,h}} + {g,{h,f}} + {h,{f,g}}`.
    pub fn jacobiator(
        &self,
        f: &Polynomial,
        g: &Polynomial,
        h: &Polynomial,
    ) -> Result<Polynomial> {
        let t1 = self.poisson_bracket(f, &self.poisson_bracket(g, h)?)?;
        let t2 = self.poisson_bracket(g, &self.poisson_bracket(h, f)?)?;
        let t3 = self.poisson_bracket(h, &self.poisson_bracket(f, g)?)?;
        t1.add(&t2)?.add(&t3)
    }

    /// Poisson test: `[pi, pi]_S = 0`. Returns the verdict together with the
    /// self-bracket as witness trivector.
    pub fn is_poisson(&self) -> Result<(bool, PolyVector)> {
        self.check_bivector()?;
        let witness = self.schouten(self)?;
        Ok((witness.is_zero(), witness))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim,
            "degree": self.degree,
            "components": self
                .components
                .iter()
                .map(|(idx, p)| {
                    serde_json::json!({
                        "indices": idx.iter().map(|&i| i + 1).collect::<Vec<_>>(),
                        "poly": p.to_string(),
                    })
                })
                .collect::<Vec<_>>(),
        })
    }
}

fn determinant_of_partials(idx: &[usize], fs: &[Polynomial]) -> Result<Polynomial> {
    let k = idx.len();
    let dim = fs[0].dim();
    // entries[a][b] = d_{idx[a]} f_b
    let mut entries = vec![vec![Polynomial::zero(dim); k]; k];
    for a in 0..k {
        for b in 0..k {
            entries[a][b] = fs[b].partial(idx[a] + 1)?;
        }
    }
    // Leibniz expansion over permutations; k stays small at desk scale.
    let mut acc = Polynomial::zero(dim);
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let mut prod = Polynomial::one(dim);
        for (a, &pa) in perm.iter().enumerate() {
            prod = prod.mul(&entries[a][pa])?;
            if prod.is_zero() {
                break;
            }
        }
        if permutation_parity(&perm) {
            prod = prod.neg();
        }
        acc = acc.add(&prod)?;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(acc)
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

impl Coeff for PolyVector {
    fn zero_like(&self) -> Self {
        PolyVector::zero(self.dim, self.degree)
    }
    fn is_zero(&self) -> bool {
        PolyVector::is_zero(self)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        PolyVector::add(self, other)
    }
    fn neg(&self) -> Self {
        PolyVector::neg(self)
    }
    fn scale(&self, s: &GaussianRational) -> Self {
        PolyVector::scale(self, s)
    }
}

impl fmt::Display for PolyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 0 {
            let p = self
                .components
                .get(&Vec::new())
                .cloned()
                .unwrap_or_else(|| Polynomial::zero(self.dim));
            return write!(f, "{}", p);
        }
        let mut terms = Vec::new();
        for (idx, p) in &self.components {
            let dstr = idx
                .iter()
                .map(|&i| format!("d{}", i + 1))
                .collect::<Vec<_>>()
                .join("^");
            let (neg, body) = coefficient_prefix(p, &dstr, "*");
            terms.push((neg, body));
        }
        write!(f, "{}", join_terms(terms))
    }
}

impl fmt::Debug for PolyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Render `p * tail` with the usual shortcuts for `1`, `-1`, single-term and
/// general polynomial coefficients; returns `(is_negative, body)`.
pub(crate) fn coefficient_prefix(p: &Polynomial, tail: &str, sep: &str) -> (bool, String) {
    if p.is_one() {
        return (false, tail.to_string());
    }
    if p.neg().is_one() {
        return (true, tail.to_string());
    }
    if p.is_single_term() {
        let s = p.to_string();
        if let Some(stripped) = s.strip_prefix('-') {
            (true, format!("{}{}{}", stripped, sep, tail))
        } else {
            (false, format!("{}{}{}", s, sep, tail))
        }
    } else {
        (false, format!("({}){}{}", p, sep, tail))
    }
}
