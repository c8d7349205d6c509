use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::radical::same_base;
use super::{Polynomial, RadicalBase, RadicalElement, Rational, RationalFunction};
use crate::error::{Error, Result};

/// A function element: polynomial, rational function, or an element of the
/// single radical extension. Binary operations promote to the wider kind.
///
/// The `std::ops` impls panic on context mismatch; use [`ring_op`] or
/// [`FnElem::check_compatible`] first when operands come from outside.
#[derive(Clone, Debug)]
pub enum FnElem {
    Poly(Polynomial),
    Rat(RationalFunction),
    Rad(RadicalElement),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    IntPow(i32),
}

/// Checked ring operation. `g` is ignored for the unary `Neg` and `IntPow`.
pub fn ring_op(f: &FnElem, g: &FnElem, op: RingOp) -> Result<FnElem> {
    match op {
        RingOp::Neg => return Ok(-f),
        RingOp::IntPow(e) => return f.powi(e),
        _ => {}
    }
    f.check_compatible(g)?;
    match op {
        RingOp::Add => Ok(f + g),
        RingOp::Sub => Ok(f - g),
        RingOp::Mul => Ok(f * g),
        RingOp::Div => f.checked_div(g),
        RingOp::Neg | RingOp::IntPow(_) => unreachable!(),
    }
}

impl FnElem {
    pub fn zero(var_count: usize) -> Self {
        FnElem::Poly(Polynomial::zero(var_count))
    }

    pub fn one(var_count: usize) -> Self {
        FnElem::Poly(Polynomial::one(var_count))
    }

    pub fn constant(c: Rational, var_count: usize) -> Self {
        FnElem::Poly(Polynomial::constant(c, var_count))
    }

    pub fn var(var_count: usize, i: usize) -> Self {
        FnElem::Poly(Polynomial::var(var_count, i))
    }

    pub fn var_count(&self) -> usize {
        match self {
            FnElem::Poly(p) => p.var_count(),
            FnElem::Rat(r) => r.var_count(),
            FnElem::Rad(r) => r.var_count(),
        }
    }

    pub fn radical_base(&self) -> Option<&Arc<RadicalBase>> {
        match self {
            FnElem::Rad(r) => Some(r.base()),
            _ => None,
        }
    }

    pub fn check_compatible(&self, other: &FnElem) -> Result<()> {
        if self.var_count() != other.var_count() {
            return Err(Error::VarCountMismatch(self.var_count(), other.var_count()));
        }
        if let (Some(a), Some(b)) = (self.radical_base(), other.radical_base()) {
            if !same_base(a, b) {
                return Err(Error::RadicalMismatch);
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FnElem::Poly(p) => p.is_zero(),
            FnElem::Rat(r) => r.is_zero(),
            FnElem::Rad(r) => r.is_zero(),
        }
    }

    /// Zero test after reducing every polynomial through `reduce`, which must
    /// be the normal-form map of a prime ideal not containing any denominator.
    pub fn is_zero_modulo(&self, reduce: &dyn Fn(&Polynomial) -> Polynomial) -> bool {
        fn rat_zero(r: &RationalFunction, reduce: &dyn Fn(&Polynomial) -> Polynomial) -> bool {
            reduce(r.num_part()).is_zero() || r.factors().any(|(a, e)| e > 0 && reduce(a).is_zero())
        }
        match self {
            FnElem::Poly(p) => reduce(p).is_zero(),
            FnElem::Rat(r) => rat_zero(r, reduce),
            FnElem::Rad(r) => rat_zero(r.rational_part(), reduce) && rat_zero(r.radical_part(), reduce),
        }
    }

    pub fn equals(&self, other: &FnElem) -> Result<bool> {
        self.check_compatible(other)?;
        Ok((self - other).is_zero())
    }

    pub fn to_rational_function(&self) -> Option<RationalFunction> {
        match self {
            FnElem::Poly(p) => Some(RationalFunction::from_poly(p.clone())),
            FnElem::Rat(r) => Some(r.clone()),
            FnElem::Rad(r) if r.is_rational() => Some(r.rational_part().clone()),
            FnElem::Rad(_) => None,
        }
    }

    pub fn to_radical(&self, base: &Arc<RadicalBase>) -> RadicalElement {
        match self {
            FnElem::Rad(r) => r.clone(),
            other => RadicalElement::from_rational(base.clone(), other.to_rational_function().unwrap()),
        }
    }

    /// Demotes a rational function without denominator factors to a polynomial.
    pub fn normalize(self) -> Self {
        match self {
            FnElem::Rat(r) => match r.into_polynomial() {
                Ok(p) => FnElem::Poly(p),
                Err(r) => FnElem::Rat(r),
            },
            other => other,
        }
    }

    pub fn term_count(&self) -> usize {
        match self {
            FnElem::Poly(p) => p.len(),
            FnElem::Rat(r) => r.term_count(),
            FnElem::Rad(r) => r.term_count(),
        }
    }

    pub fn scale(&self, c: &Rational) -> FnElem {
        match self {
            FnElem::Poly(p) => FnElem::Poly(p.scale(c)),
            FnElem::Rat(r) => FnElem::Rat(r.scale(c)),
            FnElem::Rad(r) => FnElem::Rad(r.scale(c)),
        }
    }

    pub fn checked_div(&self, other: &FnElem) -> Result<FnElem> {
        self.check_compatible(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = other.powi(-1)?;
        Ok(self * &inv)
    }

    pub fn powi(&self, e: i32) -> Result<FnElem> {
        Ok(match self {
            FnElem::Poly(p) if e >= 0 => FnElem::Poly(p.pow(e as u32)),
            FnElem::Poly(p) => FnElem::Rat(RationalFunction::from_poly(p.clone()).powi(e)?).normalize(),
            FnElem::Rat(r) => FnElem::Rat(r.powi(e)?).normalize(),
            FnElem::Rad(r) => FnElem::Rad(r.powi(e)?),
        })
    }

    pub fn derivative(&self, i: usize) -> Result<FnElem> {
        if i >= self.var_count() {
            return Err(Error::IndexOutOfRange {
                index: i,
                var_count: self.var_count(),
            });
        }
        Ok(self.derivative_unchecked(i))
    }

    pub(crate) fn derivative_unchecked(&self, i: usize) -> FnElem {
        match self {
            FnElem::Poly(p) => FnElem::Poly(p.derivative(i)),
            FnElem::Rat(r) => FnElem::Rat(r.derivative(i)).normalize(),
            FnElem::Rad(r) => FnElem::Rad(r.derivative(i)),
        }
    }

    pub fn evaluate(&self, point: &[Rational], radical_value: Option<&Rational>) -> Result<Rational> {
        if point.len() != self.var_count() {
            return Err(Error::VarCountMismatch(self.var_count(), point.len()));
        }
        match self {
            FnElem::Poly(p) => Ok(p.evaluate(point)),
            FnElem::Rat(r) => r.evaluate(point),
            FnElem::Rad(r) => r.evaluate(point, radical_value),
        }
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        match self {
            FnElem::Poly(p) => p.eval_f64(point),
            FnElem::Rat(r) => r.eval_f64(point),
            FnElem::Rad(r) => r.eval_f64(point),
        }
    }

    /// Smallest |denominator atom| (and radicand) at `point`; infinity if none.
    pub fn min_denominator_f64(&self, point: &[f64]) -> f64 {
        match self {
            FnElem::Poly(_) => f64::INFINITY,
            FnElem::Rat(r) => r.min_denominator_f64(point),
            FnElem::Rad(r) => r.min_denominator_f64(point),
        }
    }

    pub fn fmt_with(&self, var: char) -> String {
        match self {
            FnElem::Poly(p) => p.fmt_with(var),
            FnElem::Rat(r) => r.fmt_with(var),
            FnElem::Rad(r) => r.fmt_with(var),
        }
    }

    fn binary(
        &self,
        rhs: &FnElem,
        poly: fn(&Polynomial, &Polynomial) -> Polynomial,
        rat: fn(&RationalFunction, &RationalFunction) -> RationalFunction,
        rad: fn(&RadicalElement, &RadicalElement) -> RadicalElement,
    ) -> FnElem {
        match (self, rhs) {
            (FnElem::Poly(a), FnElem::Poly(b)) => FnElem::Poly(poly(a, b)),
            (FnElem::Rad(a), FnElem::Rad(b)) => FnElem::Rad(rad(a, b)),
            (FnElem::Rad(a), b) => FnElem::Rad(rad(a, &b.to_radical(a.base()))),
            (a, FnElem::Rad(b)) => FnElem::Rad(rad(&a.to_radical(b.base()), b)),
            (a, b) => {
                let a = a.to_rational_function().unwrap();
                let b = b.to_rational_function().unwrap();
                FnElem::Rat(rat(&a, &b)).normalize()
            }
        }
    }
}

impl PartialEq for FnElem {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other).unwrap_or(false)
    }
}

impl From<Polynomial> for FnElem {
    fn from(p: Polynomial) -> Self {
        FnElem::Poly(p)
    }
}

impl From<RationalFunction> for FnElem {
    fn from(r: RationalFunction) -> Self {
        FnElem::Rat(r).normalize()
    }
}

impl From<RadicalElement> for FnElem {
    fn from(r: RadicalElement) -> Self {
        FnElem::Rad(r)
    }
}

impl fmt::Display for FnElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with('y'))
    }
}

impl Add for &FnElem {
    type Output = FnElem;
    fn add(self, rhs: &FnElem) -> FnElem {
        self.binary(rhs, |a, b| a + b, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for &FnElem {
    type Output = FnElem;
    fn sub(self, rhs: &FnElem) -> FnElem {
        self.binary(rhs, |a, b| a - b, |a, b| a - b, |a, b| a - b)
    }
}

impl Mul for &FnElem {
    type Output = FnElem;
    fn mul(self, rhs: &FnElem) -> FnElem {
        self.binary(rhs, |a, b| a * b, |a, b| a * b, |a, b| a * b)
    }
}

impl Neg for &FnElem {
    type Output = FnElem;
    fn neg(self) -> FnElem {
        match self {
            FnElem::Poly(p) => FnElem::Poly(-p),
            FnElem::Rat(r) => FnElem::Rat(-r),
            FnElem::Rad(r) => FnElem::Rad(-r),
        }
    }
}
