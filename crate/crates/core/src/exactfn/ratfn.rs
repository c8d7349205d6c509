//! Rational functions kept as `num * prod(atom^e)` with signed exponents.
//!
//! Atoms are monic non-constant polynomials. Keeping the denominator factored
//! lets `M_w * M_{-w}` and `|y|^2 / |y|^2` cancel by exponent arithmetic, so no
//! multivariate gcd is needed. The representation is not canonical; equality
//! is decided by the zero test on the difference, which is exactly the
//! cross-multiplication test `n1*d2 - n2*d1 == 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Polynomial, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    factors: BTreeMap<Polynomial, i32>,
}

impl RationalFunction {
    pub fn zero(var_count: usize) -> Self {
        Self::from_poly(Polynomial::zero(var_count))
    }

    pub fn one(var_count: usize) -> Self {
        Self::from_poly(Polynomial::one(var_count))
    }

    pub fn constant(c: Rational, var_count: usize) -> Self {
        Self::from_poly(Polynomial::constant(c, var_count))
    }

    pub fn from_poly(num: Polynomial) -> Self {
        RationalFunction {
            num,
            factors: BTreeMap::new(),
        }
    }

    /// `num / den`, with trivial common factors cancelled.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.var_count() != num.var_count() {
            return Err(Error::VarCountMismatch(num.var_count(), den.var_count()));
        }
        let mut f = Self::from_parts(num, vec![(den, -1)])?;
        f.cancel();
        Ok(f)
    }

    /// `p^e` with `p` kept as a factor.
    pub fn atom_power(p: Polynomial, e: i32) -> Result<Self> {
        let n = p.var_count();
        Self::from_parts(Polynomial::one(n), vec![(p, e)])
    }

    /// Builds `num * prod(p^e)`, normalizing every factor to a monic atom.
    /// Constant factors fold into the numerator.
    pub fn from_parts(num: Polynomial, parts: Vec<(Polynomial, i32)>) -> Result<Self> {
        let mut num = num;
        let mut factors: BTreeMap<Polynomial, i32> = BTreeMap::new();
        for (p, e) in parts {
            if e == 0 {
                continue;
            }
            if p.is_zero() {
                if e < 0 {
                    return Err(Error::DivisionByZero);
                }
                return Ok(Self::zero(num.var_count()));
            }
            let (lc, monic) = p.monic();
            num = num.scale(&rational_powi(&lc, e));
            if monic.as_constant().is_some() {
                continue;
            }
            *factors.entry(monic).or_insert(0) += e;
        }
        factors.retain(|_, e| *e != 0);
        if num.is_zero() {
            factors.clear();
        }
        Ok(RationalFunction { num, factors })
    }

    pub fn var_count(&self) -> usize {
        self.num.var_count()
    }

    /// The unfactored part of the numerator.
    pub fn num_part(&self) -> &Polynomial {
        &self.num
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Polynomial, i32)> {
        self.factors.iter().map(|(p, e)| (p, *e))
    }

    /// Expanded numerator polynomial.
    pub fn numerator(&self) -> Polynomial {
        let mut out = self.num.clone();
        for (a, &e) in &self.factors {
            if e > 0 {
                out = &out * &a.pow(e as u32);
            }
        }
        out
    }

    /// Expanded denominator polynomial.
    pub fn denominator(&self) -> Polynomial {
        let mut out = Polynomial::one(self.var_count());
        for (a, &e) in &self.factors {
            if e < 0 {
                out = &out * &a.pow((-e) as u32);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.factors.is_empty().then_some(&self.num)
    }

    pub fn into_polynomial(self) -> std::result::Result<Polynomial, Self> {
        if self.factors.is_empty() {
            Ok(self.num)
        } else {
            Err(self)
        }
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.factors.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Monomial count of the numerator and all atoms.
    pub fn term_count(&self) -> usize {
        self.num.len() + self.factors.keys().map(Polynomial::len).sum::<usize>()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.var_count());
        }
        RationalFunction {
            num: self.num.scale(c),
            factors: self.factors.clone(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let parts = self
            .factors
            .iter()
            .map(|(a, &e)| (a.clone(), -e))
            .chain(std::iter::once((self.num.clone(), -1)))
            .collect();
        Self::from_parts(Polynomial::one(self.var_count()), parts)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inverse()?)
    }

    pub fn powi(&self, e: i32) -> Result<Self> {
        if e < 0 {
            return self.inverse()?.powi(-e);
        }
        let e = e as u32;
        if e == 0 {
            return Ok(Self::one(self.var_count()));
        }
        Ok(RationalFunction {
            num: self.num.pow(e),
            factors: self.factors.iter().map(|(a, &x)| (a.clone(), x * e as i32)).collect(),
        })
    }

    pub fn derivative(&self, i: usize) -> Self {
        let n = self.var_count();
        let moving: Vec<(&Polynomial, i32)> = self
            .factors
            .iter()
            .filter(|(a, _)| a.degree_in(i) > 0)
            .map(|(a, &e)| (a, e))
            .collect();
        if moving.is_empty() {
            let num = self.num.derivative(i);
            if num.is_zero() {
                return Self::zero(n);
            }
            return RationalFunction {
                num,
                factors: self.factors.clone(),
            };
        }
        // d(N prod A^e) = [dN prod A + N sum e_a dA_a prod_{b != a} A_b] prod A^(e-1)
        let full: Polynomial = moving.iter().fold(Polynomial::one(n), |acc, (a, _)| &acc * a);
        let mut num = &self.num.derivative(i) * &full;
        for (idx, (a, e)) in moving.iter().enumerate() {
            let mut others = a.derivative(i).scale(&Rational::from_integer((*e).into()));
            for (jdx, (b, _)) in moving.iter().enumerate() {
                if jdx != idx {
                    others = &others * b;
                }
            }
            num = &num + &(&self.num * &others);
        }
        if num.is_zero() {
            return Self::zero(n);
        }
        let mut factors = self.factors.clone();
        for (a, _) in &moving {
            let slot = factors.get_mut(*a).unwrap();
            *slot -= 1;
            if *slot == 0 {
                factors.remove(*a);
            }
        }
        RationalFunction { num, factors }
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.var_count() {
            return Err(Error::VarCountMismatch(self.var_count(), point.len()));
        }
        let mut val = self.num.evaluate(point);
        let mut pole = false;
        for (a, &e) in &self.factors {
            let v = a.evaluate(point);
            if v.is_zero() {
                if e < 0 {
                    pole = true;
                } else {
                    val = Rational::zero();
                }
            } else {
                val *= rational_powi(&v, e);
            }
        }
        if pole {
            return Err(Error::Pole);
        }
        Ok(val)
    }

    /// Floating-point value; infinite or NaN at poles.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut val = self.num.eval_f64(point);
        for (a, &e) in &self.factors {
            val *= a.eval_f64(point).powi(e);
        }
        val
    }

    /// Smallest absolute value over the denominator atoms at `point`.
    pub fn min_denominator_f64(&self, point: &[f64]) -> f64 {
        self.factors
            .iter()
            .filter(|(_, &e)| e < 0)
            .map(|(a, _)| a.eval_f64(point).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Divides the numerator by denominator atoms wherever that is exact.
    pub fn cancel(&mut self) {
        if self.num.is_zero() {
            self.factors.clear();
            return;
        }
        let keys: Vec<Polynomial> = self
            .factors
            .iter()
            .filter(|(_, &e)| e < 0)
            .map(|(a, _)| a.clone())
            .collect();
        for a in keys {
            while let Some(&e) = self.factors.get(&a) {
                if e >= 0 {
                    break;
                }
                match self.num.exact_div(&a) {
                    Some(q) => {
                        self.num = q;
                        if e + 1 == 0 {
                            self.factors.remove(&a);
                        } else {
                            self.factors.insert(a.clone(), e + 1);
                        }
                    }
                    None => break,
                }
            }
        }
    }

    /// Applies `f` to the numerator and every atom, then renormalizes.
    /// Used for ideal reduction, where atoms may collapse to constants or merge.
    pub fn map_polys<F: FnMut(&Polynomial) -> Polynomial>(&self, mut f: F) -> Result<Self> {
        let num = f(&self.num);
        let parts = self.factors.iter().map(|(a, &e)| (f(a), e)).collect();
        Self::from_parts(num, parts)
    }

    /// Sum of many rational functions, pulling out the common atom powers once.
    pub fn sum_all(var_count: usize, items: Vec<RationalFunction>) -> Self {
        let items: Vec<RationalFunction> = items.into_iter().filter(|f| !f.is_zero()).collect();
        if items.is_empty() {
            return Self::zero(var_count);
        }
        let mut mins: BTreeMap<Polynomial, i32> = BTreeMap::new();
        for f in &items {
            for a in f.factors.keys() {
                mins.entry(a.clone()).or_insert(0);
            }
        }
        for (a, m) in mins.iter_mut() {
            *m = items
                .iter()
                .map(|f| f.factors.get(a).copied().unwrap_or(0))
                .min()
                .unwrap_or(0);
        }
        let mut pow_cache: BTreeMap<(Polynomial, u32), Polynomial> = BTreeMap::new();
        let mut num = Polynomial::zero(var_count);
        for f in &items {
            let mut t = f.num.clone();
            for (a, &m) in &mins {
                let diff = (f.factors.get(a).copied().unwrap_or(0) - m) as u32;
                if diff > 0 {
                    let p = pow_cache
                        .entry((a.clone(), diff))
                        .or_insert_with(|| a.pow(diff));
                    t = &t * p;
                }
            }
            num = &num + &t;
        }
        mins.retain(|_, m| *m != 0);
        if num.is_zero() {
            return Self::zero(var_count);
        }
        RationalFunction { num, factors: mins }
    }

    /// Substitutes `v_i -> args[i]`; the result lives in the ring of the args.
    pub fn substitute(&self, args: &[RationalFunction]) -> Result<Self> {
        if args.len() != self.var_count() {
            return Err(Error::VarCountMismatch(self.var_count(), args.len()));
        }
        let target = args.first().map(|a| a.var_count()).unwrap_or(0);
        if args.iter().any(|a| a.var_count() != target) {
            return Err(Error::InvalidArgument("substitution arguments disagree on variable count".into()));
        }
        let mut result = substitute_poly(&self.num, args, target)?;
        for (a, &e) in &self.factors {
            let sub = substitute_poly(a, args, target)?;
            result = &result * &sub.powi(e)?;
        }
        result.cancel();
        Ok(result)
    }

    pub fn fmt_with(&self, var: char) -> String {
        if self.factors.is_empty() || self.num.is_zero() {
            return self.num.fmt_with(var);
        }
        let mut s = if self.num.as_constant() == Some(Rational::one()) {
            String::new()
        } else {
            format!("({})", self.num.fmt_with(var))
        };
        for (a, &e) in &self.factors {
            if !s.is_empty() {
                s.push_str(" * ");
            }
            if e == 1 {
                s.push_str(&format!("({})", a.fmt_with(var)));
            } else {
                s.push_str(&format!("({})^{}", a.fmt_with(var), e));
            }
        }
        s
    }
}

fn substitute_poly(p: &Polynomial, args: &[RationalFunction], target: usize) -> Result<RationalFunction> {
    let mut cache: Vec<Vec<RationalFunction>> = args
        .iter()
        .map(|a| vec![RationalFunction::one(target), a.clone()])
        .collect();
    let mut items = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let mut t = RationalFunction::constant(c.clone(), target);
        for (i, &e) in m.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let e = e as usize;
            while cache[i].len() <= e {
                let next = &cache[i][cache[i].len() - 1] * &args[i];
                cache[i].push(next);
            }
            t = &t * &cache[i][e];
        }
        items.push(t);
    }
    Ok(RationalFunction::sum_all(target, items))
}

pub(crate) fn rational_powi(c: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow(c.clone(), e as usize)
    } else {
        num_traits::pow(c.recip(), (-e) as usize)
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.var_count() == other.var_count() && (self - other).is_zero()
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with('y'))
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        assert_eq!(self.var_count(), rhs.var_count(), "variable count mismatch");
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.factors == rhs.factors {
            let num = &self.num + &rhs.num;
            if num.is_zero() {
                return RationalFunction::zero(self.var_count());
            }
            return RationalFunction {
                num,
                factors: self.factors.clone(),
            };
        }
        RationalFunction::sum_all(self.var_count(), vec![self.clone(), rhs.clone()])
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            factors: self.factors.clone(),
        }
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        assert_eq!(self.var_count(), rhs.var_count(), "variable count mismatch");
        let num = &self.num * &rhs.num;
        if num.is_zero() {
            return RationalFunction::zero(self.var_count());
        }
        let mut factors = self.factors.clone();
        for (a, &e) in &rhs.factors {
            let slot = factors.entry(a.clone()).or_insert(0);
            *slot += e;
            if *slot == 0 {
                factors.remove(a);
            }
        }
        RationalFunction { num, factors }
    }
}
