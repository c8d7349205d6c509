//! Linear differential operators `sum_alpha a_alpha(y) d^alpha` with exact
//! function coefficients.
//!
//! Operators are always stored in normal form (coefficients to the left of
//! derivatives), so two operators are equal iff their coefficient maps agree,
//! and all non-commutativity is handled in [`DiffOp::compose`] via the
//! generalized Leibniz rule.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_integer::binomial;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactfn::{FnElem, Polynomial, RadicalBase, Rational, RationalFunction};

/// Default cap on the total monomial count of a composed operator.
pub const DEFAULT_TERM_CAP: usize = 200_000;

/// Exponent tuple of a mixed partial `d^alpha`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn new(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn sub(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Every `gamma <= self` componentwise, with `prod binom(alpha_i, gamma_i)`.
    fn sub_indices(&self) -> Vec<(MultiIndex, u64)> {
        let mut out = vec![(Vec::with_capacity(self.0.len()), 1u64)];
        for &a in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
            for (prefix, w) in &out {
                for g in 0..=a {
                    let mut p = prefix.clone();
                    p.push(g);
                    next.push((p, w * binomial(a as u64, g as u64)));
                }
            }
            out = next;
        }
        out.into_iter().map(|(v, w)| (MultiIndex(v), w)).collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "d[{}]", parts.join(","))
    }
}

/// Generators understood by [`make_generator`].
#[derive(Clone, Debug)]
pub enum Generator {
    /// `sum_i d_i^2`.
    Laplacian,
    /// `X = sum_i y_i d_i`.
    Euler,
    /// Multiplication by a function.
    Mult(FnElem),
    /// `M_w = 2^w (1 + |y|^2)^(-w)`; `w` must be an integer.
    MWeight(Rational),
    /// Multiplication by `|y|^2`.
    RadialSq,
}

pub fn make_generator(kind: Generator, n: usize) -> Result<DiffOp> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    match kind {
        Generator::Laplacian => Ok(DiffOp::laplacian(n)),
        Generator::Euler => Ok(DiffOp::euler(n)),
        Generator::Mult(f) => {
            if f.var_count() != n {
                return Err(Error::VarCountMismatch(n, f.var_count()));
            }
            Ok(DiffOp::mult(f))
        }
        Generator::MWeight(w) => {
            if !w.is_integer() {
                return Err(Error::NonIntegerWeight(w.to_string()));
            }
            let w: i32 = w
                .to_integer()
                .try_into()
                .map_err(|_| Error::InvalidArgument("weight out of range".into()))?;
            Ok(DiffOp::m_weight(n, w))
        }
        Generator::RadialSq => Ok(DiffOp::radial_sq(n)),
    }
}

/// The function `2^w (1 + |y|^2)^(-w)` on `R^n`.
pub fn m_weight_function(n: usize, w: i32) -> FnElem {
    let a = &Polynomial::one(n) + &Polynomial::sum_of_squares(n, n);
    let two_w = crate::exactfn::rational_powi(&Rational::from_integer(2.into()), w);
    FnElem::from(RationalFunction::atom_power(a, -w).expect("1+|y|^2 is nonzero").scale(&two_w))
}

#[derive(Clone, Debug)]
pub struct DiffOp {
    var_count: usize,
    radical: Option<Arc<RadicalBase>>,
    terms: BTreeMap<MultiIndex, FnElem>,
}

impl DiffOp {
    pub fn zero(n: usize) -> Self {
        DiffOp {
            var_count: n,
            radical: None,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::mult(FnElem::one(n))
    }

    pub fn scalar(c: Rational, n: usize) -> Self {
        Self::mult(FnElem::constant(c, n))
    }

    pub fn mult(f: FnElem) -> Self {
        let n = f.var_count();
        let mut op = DiffOp {
            var_count: n,
            radical: f.radical_base().cloned(),
            terms: BTreeMap::new(),
        };
        if !f.is_zero() {
            op.terms.insert(MultiIndex::zero(n), f);
        }
        op
    }

    /// `d_i` (0-based).
    pub fn partial(n: usize, i: usize) -> Self {
        let mut op = Self::zero(n);
        op.terms.insert(MultiIndex::unit(n, i), FnElem::one(n));
        op
    }

    pub fn laplacian(n: usize) -> Self {
        let mut op = Self::zero(n);
        for i in 0..n {
            let mut a = vec![0; n];
            a[i] = 2;
            op.terms.insert(MultiIndex(a), FnElem::one(n));
        }
        op
    }

    pub fn euler(n: usize) -> Self {
        let mut op = Self::zero(n);
        for i in 0..n {
            op.terms.insert(MultiIndex::unit(n, i), FnElem::var(n, i));
        }
        op
    }

    pub fn m_weight(n: usize, w: i32) -> Self {
        Self::mult(m_weight_function(n, w))
    }

    pub fn radial_sq(n: usize) -> Self {
        Self::mult(FnElem::Poly(Polynomial::sum_of_squares(n, n)))
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn radical_base(&self) -> Option<&Arc<RadicalBase>> {
        self.radical.as_ref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &FnElem)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Option<&FnElem> {
        self.terms.get(alpha)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    pub fn term_count(&self) -> usize {
        self.terms.values().map(FnElem::term_count).sum()
    }

    fn check_context(&self, other: &DiffOp) -> Result<Option<Arc<RadicalBase>>> {
        if self.var_count != other.var_count {
            return Err(Error::VarCountMismatch(self.var_count, other.var_count));
        }
        match (&self.radical, &other.radical) {
            (Some(a), Some(b)) if a.polynomial() != b.polynomial() => Err(Error::RadicalMismatch),
            (Some(a), _) => Ok(Some(a.clone())),
            (None, b) => Ok(b.clone()),
        }
    }

    fn check_fn(&self, f: &FnElem) -> Result<()> {
        if f.var_count() != self.var_count {
            return Err(Error::VarCountMismatch(self.var_count, f.var_count()));
        }
        if let (Some(a), Some(b)) = (&self.radical, f.radical_base()) {
            if a.polynomial() != b.polynomial() {
                return Err(Error::RadicalMismatch);
            }
        }
        Ok(())
    }

    fn from_buckets(n: usize, radical: Option<Arc<RadicalBase>>, buckets: BTreeMap<MultiIndex, Vec<FnElem>>) -> Self {
        let terms = buckets
            .into_iter()
            .filter_map(|(k, v)| {
                let s = sum_elems(n, v);
                (!s.is_zero()).then_some((k, s))
            })
            .collect();
        DiffOp {
            var_count: n,
            radical,
            terms,
        }
    }

    /// `self o other` in normal form, with the default term cap.
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        self.compose_capped(other, DEFAULT_TERM_CAP)
    }

    /// `d^alpha (b d^beta) = sum_{gamma <= alpha} binom(alpha, gamma) (d^gamma b) d^(alpha - gamma + beta)`.
    pub fn compose_capped(&self, other: &DiffOp, cap: usize) -> Result<DiffOp> {
        let radical = self.check_context(other)?;
        let n = self.var_count;
        let mut buckets: BTreeMap<MultiIndex, Vec<FnElem>> = BTreeMap::new();
        let mut caches: Vec<DerivativeCache> = other.terms.values().map(|b| DerivativeCache::new(b.clone())).collect();
        for (alpha, a) in &self.terms {
            let subs = alpha.sub_indices();
            for ((beta, _), cache) in other.terms.iter().zip(caches.iter_mut()) {
                for (gamma, w) in &subs {
                    let db = cache.get(gamma);
                    if db.is_zero() {
                        continue;
                    }
                    let mut t = a * db;
                    if *w != 1 {
                        t = t.scale(&Rational::from_integer((*w).into()));
                    }
                    buckets.entry(alpha.sub(gamma).add(beta)).or_default().push(t);
                }
            }
        }
        let op = Self::from_buckets(n, radical, buckets);
        let terms = op.term_count();
        if terms > cap {
            return Err(Error::LimitExceeded { terms, cap });
        }
        Ok(op)
    }

    /// `P^k` by repeated left composition; `P^0` is the identity.
    pub fn power(&self, k: u32, cap: usize) -> Result<DiffOp> {
        let mut out = DiffOp::identity(self.var_count);
        out.radical = self.radical.clone();
        for _ in 0..k {
            out = self.compose_capped(&out, cap)?;
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &DiffOp) -> Result<DiffOp> {
        self.commutator_capped(other, DEFAULT_TERM_CAP)
    }

    pub fn commutator_capped(&self, other: &DiffOp, cap: usize) -> Result<DiffOp> {
        let pq = self.compose_capped(other, cap)?;
        let qp = other.compose_capped(self, cap)?;
        Ok(&pq - &qp)
    }

    pub fn scale(&self, c: &Rational) -> DiffOp {
        if c.is_zero() {
            let mut z = DiffOp::zero(self.var_count);
            z.radical = self.radical.clone();
            return z;
        }
        DiffOp {
            var_count: self.var_count,
            radical: self.radical.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.scale(c))).collect(),
        }
    }

    /// Multiplies every coefficient on the left by `f` (i.e. `mult(f) o self`).
    pub fn left_mult(&self, f: &FnElem) -> Result<DiffOp> {
        self.check_fn(f)?;
        let n = self.var_count;
        let buckets = self.terms.iter().map(|(k, v)| (k.clone(), vec![f * v])).collect();
        let radical = self.radical.clone().or_else(|| f.radical_base().cloned());
        Ok(Self::from_buckets(n, radical, buckets))
    }

    /// `sum_i c_i P_i` in normal form.
    pub fn linear_combine(coeffs: &[Rational], ops: &[DiffOp]) -> Result<DiffOp> {
        if coeffs.len() != ops.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} operators",
                coeffs.len(),
                ops.len()
            )));
        }
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
        let n = first.var_count;
        let mut radical = first.radical.clone();
        for op in ops {
            let mut probe = DiffOp::zero(n);
            probe.radical = radical.clone();
            radical = probe.check_context(op)?;
        }
        let mut buckets: BTreeMap<MultiIndex, Vec<FnElem>> = BTreeMap::new();
        for (c, op) in coeffs.iter().zip(ops) {
            if c.is_zero() {
                continue;
            }
            for (k, v) in &op.terms {
                let t = if c.is_one() { v.clone() } else { v.scale(c) };
                buckets.entry(k.clone()).or_default().push(t);
            }
        }
        Ok(Self::from_buckets(n, radical, buckets))
    }

    pub fn apply(&self, f: &FnElem) -> Result<FnElem> {
        self.check_fn(f)?;
        let mut cache = DerivativeCache::new(f.clone());
        let mut parts = Vec::with_capacity(self.terms.len());
        for (alpha, a) in &self.terms {
            let d = cache.get(alpha);
            if !d.is_zero() {
                parts.push(a * d);
            }
        }
        Ok(sum_elems(self.var_count, parts))
    }

    /// First nonzero term rendered as `coeff * d[alpha]`, for failure witnesses.
    pub fn first_term_witness(&self, var: char) -> Option<String> {
        self.terms
            .iter()
            .next()
            .map(|(k, v)| format!("({}) * {}", v.fmt_with(var), k))
    }

    pub fn fmt_with(&self, var: char) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .rev()
            .map(|(k, v)| format!("({}) * {}", v.fmt_with(var), k))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with('y'))
    }
}

impl PartialEq for DiffOp {
    fn eq(&self, other: &Self) -> bool {
        self.check_context(other).is_ok() && (self - other).is_zero()
    }
}

impl std::ops::Add for &DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: &DiffOp) -> DiffOp {
        DiffOp::linear_combine(&[Rational::one(), Rational::one()], &[self.clone(), rhs.clone()])
            .expect("operator context mismatch")
    }
}

impl std::ops::Sub for &DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: &DiffOp) -> DiffOp {
        DiffOp::linear_combine(&[Rational::one(), -Rational::one()], &[self.clone(), rhs.clone()])
            .expect("operator context mismatch")
    }
}

/// Memoized mixed partials `d^gamma f`.
struct DerivativeCache {
    n: usize,
    cache: HashMap<MultiIndex, FnElem>,
}

impl DerivativeCache {
    fn new(f: FnElem) -> Self {
        let n = f.var_count();
        let mut cache = HashMap::new();
        cache.insert(MultiIndex::zero(n), f);
        DerivativeCache { n, cache }
    }

    fn get(&mut self, gamma: &MultiIndex) -> &FnElem {
        if !self.cache.contains_key(gamma) {
            let i = (0..self.n).find(|&i| gamma.0[i] > 0).unwrap();
            let mut prev = gamma.clone();
            prev.0[i] -= 1;
            let d = self.get(&prev).derivative_unchecked(i);
            self.cache.insert(gamma.clone(), d);
        }
        &self.cache[gamma]
    }
}

/// Sums function elements, batching rational functions so shared atom
/// powers are factored out once.
pub(crate) fn sum_elems(n: usize, items: Vec<FnElem>) -> FnElem {
    if items.is_empty() {
        return FnElem::zero(n);
    }
    if items.len() == 1 {
        return items.into_iter().next().unwrap();
    }
    if items.iter().any(|f| matches!(f, FnElem::Rad(_))) {
        let mut it = items.into_iter();
        let first = it.next().unwrap();
        return it.fold(first, |acc, f| &acc + &f);
    }
    if items.iter().all(|f| matches!(f, FnElem::Poly(_))) {
        let mut acc = Polynomial::zero(n);
        for f in items {
            if let FnElem::Poly(p) = f {
                acc = &acc + &p;
            }
        }
        return FnElem::Poly(acc);
    }
    let rfs = items
        .into_iter()
        .map(|f| f.to_rational_function().unwrap())
        .collect();
    FnElem::from(RationalFunction::sum_all(n, rfs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfn::{int, rational};

    fn poly_fn(p: Polynomial) -> FnElem {
        FnElem::Poly(p)
    }

    #[test]
    fn euler_homogeneity() {
        let f = poly_fn(&Polynomial::var(2, 0) * &Polynomial::var(2, 1));
        let out = DiffOp::euler(2).apply(&f).unwrap();
        assert_eq!(out, f.scale(&int(2)));
    }

    #[test]
    fn laplacian_of_radial_square() {
        let f = poly_fn(Polynomial::sum_of_squares(3, 3));
        assert_eq!(DiffOp::laplacian(3).apply(&f).unwrap(), FnElem::constant(int(6), 3));
        let g = poly_fn(Polynomial::sum_of_squares(2, 2));
        assert_eq!(DiffOp::laplacian(2).apply(&g).unwrap(), FnElem::constant(int(4), 2));
    }

    #[test]
    fn m_weight_examples() {
        // M_{-2} on R^1 is multiplication by (1 + y^2)^2 / 4
        let a = &Polynomial::one(1) + &Polynomial::var(1, 0).pow(2);
        let m = DiffOp::m_weight(1, -2);
        let expected = poly_fn(a.pow(2).scale(&rational(1, 4)));
        assert_eq!(m.coefficient(&MultiIndex::zero(1)).unwrap(), &expected);
        // M_2 applied to 1 is 4 / (1 + y^2)^2
        let v = DiffOp::m_weight(1, 2).apply(&FnElem::one(1)).unwrap();
        let expected = FnElem::from(RationalFunction::new(Polynomial::from_int(4, 1), a.pow(2)).unwrap());
        assert_eq!(v, expected);
    }

    #[test]
    fn non_integer_weight_rejected() {
        assert!(matches!(
            make_generator(Generator::MWeight(rational(1, 2)), 2),
            Err(Error::NonIntegerWeight(_))
        ));
        assert!(matches!(make_generator(Generator::Laplacian, 0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn leibniz_on_multiplication() {
        // d o y = y d + 1
        let d = DiffOp::partial(1, 0);
        let y = DiffOp::mult(FnElem::var(1, 0));
        let c = d.compose(&y).unwrap();
        let expected = &DiffOp::mult(FnElem::var(1, 0)).compose(&d).unwrap() + &DiffOp::identity(1);
        assert_eq!(c, expected);
    }

    #[test]
    fn laplacian_euler_commutator() {
        for n in 1..=3 {
            let c = DiffOp::laplacian(n).commutator(&DiffOp::euler(n)).unwrap();
            assert_eq!(c, DiffOp::laplacian(n).scale(&int(2)));
        }
    }

    #[test]
    fn euler_weight_commutator_n1() {
        // [X, M_1] = -|y|^2 M_2 = -4 y^2 / (1 + y^2)^2
        let c = DiffOp::euler(1).commutator(&DiffOp::m_weight(1, 1)).unwrap();
        let a = &Polynomial::one(1) + &Polynomial::var(1, 0).pow(2);
        let expected = FnElem::from(RationalFunction::new(Polynomial::var(1, 0).pow(2).scale(&int(-4)), a.pow(2)).unwrap());
        assert_eq!(c, DiffOp::mult(expected));
    }

    #[test]
    fn identity_and_self_commutator() {
        let p = &DiffOp::laplacian(2) + &DiffOp::m_weight(2, 2);
        assert_eq!(p.compose(&DiffOp::identity(2)).unwrap(), p);
        assert!(p.commutator(&p).unwrap().is_zero());
        assert!(!(&DiffOp::laplacian(1) - &DiffOp::euler(1)).is_zero());
        assert!(DiffOp::zero(3).is_zero());
    }

    #[test]
    fn linear_combinations() {
        let p = DiffOp::laplacian(2);
        let z = DiffOp::linear_combine(&[int(1), int(-1)], &[p.clone(), p.clone()]).unwrap();
        assert!(z.is_zero());
        assert!(DiffOp::linear_combine(&[int(0)], &[p.clone()]).unwrap().is_zero());
        let f = DiffOp::linear_combine(&[int(1), int(2)], &[p.clone(), DiffOp::m_weight(2, 2)]).unwrap();
        assert_eq!(f.order(), 2);
        assert_eq!(f.terms().count(), 3);
        assert!(DiffOp::linear_combine(&[int(1)], &[]).is_err());
    }

    #[test]
    fn two_x_plus_n_on_y1() {
        let op = &DiffOp::euler(2).scale(&int(2)) + &DiffOp::scalar(int(2), 2);
        assert_eq!(op.apply(&FnElem::var(2, 0)).unwrap(), FnElem::var(2, 0).scale(&int(4)));
    }

    #[test]
    fn term_cap_enforced() {
        let p = DiffOp::laplacian(3).power(2, DEFAULT_TERM_CAP).unwrap();
        let m = DiffOp::m_weight(3, -3);
        assert!(matches!(p.compose_capped(&m, 5), Err(Error::LimitExceeded { cap: 5, .. })));
    }

    #[test]
    fn display_format() {
        let s = DiffOp::laplacian(2).to_string();
        assert_eq!(s, "(1) * d[2,0] + (1) * d[0,2]");
    }
}
