//! Quadratic extension by a single square root `s = sqrt(u)`.
//!
//! An element is `a + b*s` with rational-function components. Zero testing is
//! componentwise, which is sound as long as `u` is not a square in the
//! coefficient field; callers only build bases for which that holds
//! (`|y|^2` with n >= 2, `1 + x_{n+1}`, non-square constants, ...).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{Polynomial, Rational, RationalFunction};
use crate::error::{Error, Result};

/// The radicand `u` together with the cached derivation data `du/(2u)`.
#[derive(Debug)]
pub struct RadicalBase {
    u: Polynomial,
    u_rf: RationalFunction,
    half_log_derivs: Vec<RationalFunction>,
}

impl RadicalBase {
    pub fn new(u: Polynomial) -> Result<Arc<Self>> {
        if u.is_zero() {
            return Err(Error::InvalidArgument("radical base must be nonzero".into()));
        }
        let n = u.var_count();
        let u_rf = RationalFunction::atom_power(u.clone(), 1)?;
        let inv = RationalFunction::atom_power(u.clone(), -1)?;
        let half = Rational::new(1.into(), 2.into());
        let half_log_derivs = (0..n)
            .map(|i| (&RationalFunction::from_poly(u.derivative(i)) * &inv).scale(&half))
            .collect();
        Ok(Arc::new(RadicalBase {
            u,
            u_rf,
            half_log_derivs,
        }))
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.u
    }

    pub fn var_count(&self) -> usize {
        self.u.var_count()
    }
}

impl PartialEq for RadicalBase {
    fn eq(&self, other: &Self) -> bool {
        self.u == other.u
    }
}

pub fn same_base(a: &Arc<RadicalBase>, b: &Arc<RadicalBase>) -> bool {
    Arc::ptr_eq(a, b) || a.u == b.u
}

#[derive(Clone, Debug)]
pub struct RadicalElement {
    base: Arc<RadicalBase>,
    a: RationalFunction,
    b: RationalFunction,
}

impl RadicalElement {
    pub fn new(base: Arc<RadicalBase>, a: RationalFunction, b: RationalFunction) -> Result<Self> {
        let n = base.var_count();
        for part in [&a, &b] {
            if part.var_count() != n {
                return Err(Error::VarCountMismatch(n, part.var_count()));
            }
        }
        Ok(RadicalElement { base, a, b })
    }

    pub fn from_rational(base: Arc<RadicalBase>, a: RationalFunction) -> Self {
        let n = base.var_count();
        RadicalElement {
            base,
            a,
            b: RationalFunction::zero(n),
        }
    }

    /// The generator `s` itself.
    pub fn sqrt(base: Arc<RadicalBase>) -> Self {
        let n = base.var_count();
        RadicalElement {
            base,
            a: RationalFunction::zero(n),
            b: RationalFunction::one(n),
        }
    }

    /// `s^e` for any integer `e`, as `u^(e div 2) * s^(e mod 2)`.
    pub fn sqrt_power(base: Arc<RadicalBase>, e: i32) -> Result<Self> {
        let half = e.div_euclid(2);
        let odd = e.rem_euclid(2) == 1;
        let p = RationalFunction::atom_power(base.u.clone(), half)?;
        let n = base.var_count();
        Ok(if odd {
            RadicalElement {
                base,
                a: RationalFunction::zero(n),
                b: p,
            }
        } else {
            RadicalElement {
                base,
                a: p,
                b: RationalFunction::zero(n),
            }
        })
    }

    pub fn base(&self) -> &Arc<RadicalBase> {
        &self.base
    }

    pub fn rational_part(&self) -> &RationalFunction {
        &self.a
    }

    pub fn radical_part(&self) -> &RationalFunction {
        &self.b
    }

    pub fn var_count(&self) -> usize {
        self.base.var_count()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn term_count(&self) -> usize {
        self.a.term_count() + self.b.term_count()
    }

    fn check(&self, other: &Self) {
        assert!(same_base(&self.base, &other.base), "radical base mismatch");
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RadicalElement {
            base: self.base.clone(),
            a: self.a.scale(c),
            b: self.b.scale(c),
        }
    }

    /// `(a - b s) / (a^2 - b^2 u)`.
    pub fn inverse(&self) -> Result<Self> {
        let norm = &(&self.a * &self.a) - &(&(&self.b * &self.b) * &self.base.u_rf);
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = norm.inverse()?;
        Ok(RadicalElement {
            base: self.base.clone(),
            a: &self.a * &inv,
            b: -&(&self.b * &inv),
        })
    }

    pub fn powi(&self, e: i32) -> Result<Self> {
        if e < 0 {
            return self.inverse()?.powi(-e);
        }
        let mut result = RadicalElement::from_rational(self.base.clone(), RationalFunction::one(self.var_count()));
        let mut base = self.clone();
        let mut e = e as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// `d(a + b s) = da + (db + b du/(2u)) s`.
    pub fn derivative(&self, i: usize) -> Self {
        let db = &self.b.derivative(i) + &(&self.b * &self.base.half_log_derivs[i]);
        RadicalElement {
            base: self.base.clone(),
            a: self.a.derivative(i),
            b: db,
        }
    }

    pub fn evaluate(&self, point: &[Rational], radical_value: Option<&Rational>) -> Result<Rational> {
        let a = self.a.evaluate(point)?;
        if self.b.is_zero() && radical_value.is_none() {
            return Ok(a);
        }
        let r = radical_value.ok_or(Error::MissingRadicalValue)?;
        if &(r * r) != &self.base.u.evaluate(point) {
            return Err(Error::InconsistentRadical);
        }
        let b = self.b.evaluate(point)?;
        Ok(a + b * r)
    }

    /// Uses the positive square root of `u(point)`.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let s = self.base.u.eval_f64(point).sqrt();
        self.a.eval_f64(point) + self.b.eval_f64(point) * s
    }

    pub fn min_denominator_f64(&self, point: &[f64]) -> f64 {
        self.a
            .min_denominator_f64(point)
            .min(self.b.min_denominator_f64(point))
            .min(self.base.u.eval_f64(point).abs())
    }

    pub fn map_parts<F: FnMut(&RationalFunction) -> Result<RationalFunction>>(&self, mut f: F) -> Result<Self> {
        Ok(RadicalElement {
            base: self.base.clone(),
            a: f(&self.a)?,
            b: f(&self.b)?,
        })
    }

    pub fn fmt_with(&self, var: char) -> String {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => self.a.fmt_with(var),
            (true, false) => format!("[{}]*s", self.b.fmt_with(var)),
            (false, false) => format!("{} + [{}]*s", self.a.fmt_with(var), self.b.fmt_with(var)),
        }
    }
}

impl PartialEq for RadicalElement {
    fn eq(&self, other: &Self) -> bool {
        same_base(&self.base, &other.base) && (self - other).is_zero()
    }
}

impl fmt::Display for RadicalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (s^2 = {})", self.fmt_with('y'), self.base.u)
    }
}

impl Add for &RadicalElement {
    type Output = RadicalElement;
    fn add(self, rhs: &RadicalElement) -> RadicalElement {
        self.check(rhs);
        RadicalElement {
            base: self.base.clone(),
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Sub for &RadicalElement {
    type Output = RadicalElement;
    fn sub(self, rhs: &RadicalElement) -> RadicalElement {
        self.check(rhs);
        RadicalElement {
            base: self.base.clone(),
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Neg for &RadicalElement {
    type Output = RadicalElement;
    fn neg(self) -> RadicalElement {
        RadicalElement {
            base: self.base.clone(),
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl Mul for &RadicalElement {
    type Output = RadicalElement;
    fn mul(self, rhs: &RadicalElement) -> RadicalElement {
        self.check(rhs);
        let bb = &self.b * &rhs.b;
        let a = if bb.is_zero() {
            &self.a * &rhs.a
        } else {
            &(&self.a * &rhs.a) + &(&bb * &self.base.u_rf)
        };
        let b = &(&self.a * &rhs.b) + &(&rhs.a * &self.b);
        RadicalElement {
            base: self.base.clone(),
            a,
            b,
        }
    }
}

impl RadicalElement {
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn into_rational(self) -> std::result::Result<RationalFunction, Self> {
        if self.b.is_zero() {
            Ok(self.a)
        } else {
            Err(self)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn base_1_plus_x3() -> Arc<RadicalBase> {
        RadicalBase::new(&Polynomial::one(3) + &Polynomial::var(3, 2)).unwrap()
    }

    #[test]
    fn defining_relation() {
        let base = base_1_plus_x3();
        let s = RadicalElement::sqrt(base.clone());
        let ss = &s * &s;
        let u = RadicalElement::from_rational(base.clone(), RationalFunction::from_poly(base.polynomial().clone()));
        assert_eq!(ss, u);
    }

    #[test]
    fn inverse_of_s() {
        let base = base_1_plus_x3();
        let s = RadicalElement::sqrt(base.clone());
        let inv = s.powi(-1).unwrap();
        assert!(inv.rational_part().is_zero());
        let expected = RationalFunction::atom_power(base.polynomial().clone(), -1).unwrap();
        assert_eq!(inv.radical_part(), &expected);
    }

    #[test]
    fn implicit_derivative() {
        // d/dx4 sqrt(1 + x4) = s / (2 (1 + x4))
        let base = RadicalBase::new(&Polynomial::one(4) + &Polynomial::var(4, 3)).unwrap();
        let ds = RadicalElement::sqrt(base.clone()).derivative(3);
        let expected = RationalFunction::atom_power(base.polynomial().clone(), -1)
            .unwrap()
            .scale(&Rational::new(1.into(), 2.into()));
        assert!(ds.rational_part().is_zero());
        assert_eq!(ds.radical_part(), &expected);
    }

    #[test]
    fn evaluate_with_radical_value() {
        let base = base_1_plus_x3();
        let e = RadicalElement::new(
            base,
            RationalFunction::constant(super::super::int(2), 3),
            RationalFunction::constant(super::super::int(3), 3),
        )
        .unwrap();
        let origin = vec![Rational::zero(); 3];
        assert_eq!(e.evaluate(&origin, Some(&Rational::one())).unwrap(), Rational::from_integer(5.into()));
        assert_eq!(
            e.evaluate(&origin, Some(&Rational::from_integer(2.into()))),
            Err(Error::InconsistentRadical)
        );
    }

    #[test]
    fn nonzero_radical_component() {
        let base = base_1_plus_x3();
        let s = RadicalElement::sqrt(base.clone());
        let zero = RadicalElement::from_rational(base, RationalFunction::zero(3));
        assert_ne!(s, zero);
    }
}
