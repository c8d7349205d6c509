//! Function calculus on `S^n` in ambient coordinates `x_1..x_{n+1}` modulo the
//! ideal `(|x|^2 - 1)`, the sphere Laplacian, the factored operator
//! `prod (Delta_S - c_j)`, and stereographic pullback.
//!
//! Reduction rewrites `x_{n+1}^2 -> 1 - |x'|^2`. Since `x_{n+1}^2` is the
//! leading term of the relation under the engine's lex order, every
//! polynomial has a unique remainder of degree at most one in `x_{n+1}`, and
//! the ideal is prime for `n >= 1`; so a rational function vanishes on the
//! sphere iff its reduced numerator is zero.
//!
//! Half-integer weights use the single radical `s = sqrt(1 + x_{n+1})`.
//! `1 + x_{n+1}` is not a square in the coordinate ring of the sphere, so an
//! element `a + b s` vanishes iff `a` and `b` both do.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_traits::One;
use rayon::prelude::*;

use crate::diffop::{m_weight_function, DiffOp};
use crate::error::{Error, Result};
use crate::exactfn::{
    int, monomials_up_to, rational, FnElem, Monomial, Polynomial, RadicalBase, RadicalElement, Rational,
    RationalFunction,
};
use crate::flat::{laplacian_power_apply, monomial_family};
use crate::options::{RadicalMode, VerifyOptions};
use crate::report::{Case, Report};

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        Err(Error::InvalidDimension(n))
    } else {
        Ok(())
    }
}

fn sphere_dim_of(f: &FnElem) -> Result<usize> {
    match f.var_count() {
        0 | 1 => Err(Error::InvalidDimension(0)),
        v => Ok(v - 1),
    }
}

/// Remainder of `p` modulo `|x|^2 - 1`, of degree at most one in the last variable.
pub fn reduce_polynomial(p: &Polynomial) -> Polynomial {
    let vars = p.var_count();
    let last = vars - 1;
    if p.degree_in(last) < 2 {
        return p.clone();
    }
    let rest = &Polynomial::one(vars) - &Polynomial::sum_of_squares(vars, last);
    let x = Polynomial::var(vars, last);
    let mut powers = vec![Polynomial::one(vars)];
    let mut out = Polynomial::zero(vars);
    for (d, coeff) in p.coefficients_in(last) {
        let half = (d / 2) as usize;
        while powers.len() <= half {
            let next = &powers[powers.len() - 1] * &rest;
            powers.push(next);
        }
        let mut t = &coeff * &powers[half];
        if d % 2 == 1 {
            t = &t * &x;
        }
        out = &out + &t;
    }
    out
}

fn reduce_rf(f: &RationalFunction) -> Result<RationalFunction> {
    f.map_polys(reduce_polynomial).map_err(|e| match e {
        Error::DivisionByZero => Error::VanishesOnSphere,
        other => other,
    })
}

fn reduce_elem(f: &FnElem) -> Result<FnElem> {
    Ok(match f {
        FnElem::Poly(p) => FnElem::Poly(reduce_polynomial(p)),
        FnElem::Rat(r) => FnElem::Rat(reduce_rf(r)?).normalize(),
        FnElem::Rad(r) => FnElem::Rad(r.map_parts(reduce_rf)?),
    })
}

/// A function on `S^n`, held as any ambient representative.
#[derive(Clone, Debug)]
pub struct SphereFunction {
    n: usize,
    value: FnElem,
}

impl SphereFunction {
    /// Wraps an ambient representative without reducing it.
    pub fn new(value: FnElem) -> Result<Self> {
        let n = sphere_dim_of(&value)?;
        if let Some(base) = value.radical_base() {
            if base.polynomial() != &sqrt_base_polynomial(n) {
                return Err(Error::RadicalMismatch);
            }
        }
        Ok(SphereFunction { n, value })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> &FnElem {
        &self.value
    }

    pub fn into_value(self) -> FnElem {
        self.value
    }

    /// Canonical representative.
    pub fn reduce(&self) -> Result<Self> {
        Ok(SphereFunction {
            n: self.n,
            value: reduce_elem(&self.value)?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero_modulo(&reduce_polynomial)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        SphereFunction {
            n: self.n,
            value: self.value.scale(c),
        }
    }

    pub fn fmt_with(&self, var: char) -> String {
        self.value.fmt_with(var)
    }
}

impl PartialEq for SphereFunction {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.value.check_compatible(&other.value).is_ok() && (&self.value - &other.value).is_zero_modulo(&reduce_polynomial)
    }
}

impl fmt::Display for SphereFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value.fmt_with('x'))
    }
}

impl std::ops::Add for &SphereFunction {
    type Output = SphereFunction;
    fn add(self, rhs: &SphereFunction) -> SphereFunction {
        SphereFunction {
            n: self.n,
            value: &self.value + &rhs.value,
        }
    }
}

impl std::ops::Sub for &SphereFunction {
    type Output = SphereFunction;
    fn sub(self, rhs: &SphereFunction) -> SphereFunction {
        SphereFunction {
            n: self.n,
            value: &self.value - &rhs.value,
        }
    }
}

impl std::ops::Mul for &SphereFunction {
    type Output = SphereFunction;
    fn mul(self, rhs: &SphereFunction) -> SphereFunction {
        SphereFunction {
            n: self.n,
            value: &self.value * &rhs.value,
        }
    }
}

/// Reduces an ambient function in `n + 1` variables to its canonical representative.
pub fn reduce_mod_sphere(f: &FnElem) -> Result<SphereFunction> {
    SphereFunction::new(f.clone())?.reduce()
}

fn sqrt_base_polynomial(n: usize) -> Polynomial {
    &Polynomial::one(n + 1) + &Polynomial::var(n + 1, n)
}

/// The radical base `1 + x_{n+1}`.
pub fn sqrt_base(n: usize) -> Arc<RadicalBase> {
    RadicalBase::new(sqrt_base_polynomial(n)).expect("nonzero base")
}

/// `Delta - E^2 - (n-1) E` on `R^{n+1}`, which restricts to `Delta_S`.
pub fn ambient_sphere_operator(n: usize) -> DiffOp {
    let vars = n + 1;
    let euler = DiffOp::euler(vars);
    let euler_sq = euler.compose(&euler).expect("shared context");
    DiffOp::linear_combine(
        &[Rational::one(), -Rational::one(), int(1 - n as i64)],
        &[DiffOp::laplacian(vars), euler_sq, euler],
    )
    .expect("shared context")
}

pub fn sphere_laplacian(u: &SphereFunction) -> Result<SphereFunction> {
    sphere_laplacian_with(&ambient_sphere_operator(u.n), u)
}

fn sphere_laplacian_with(op: &DiffOp, u: &SphereFunction) -> Result<SphereFunction> {
    SphereFunction {
        n: u.n,
        value: op.apply(&u.value)?,
    }
    .reduce()
}

/// `c_j = (n/2 + j - 1)(n/2 - j)` for `j = 1..=k`.
pub fn c_constants(n: usize, k: usize) -> Vec<Rational> {
    let half = rational(n as i64, 2);
    (1..=k as i64)
        .map(|j| (&half + int(j - 1)) * (&half - int(j)))
        .collect()
}

/// `c_1 - c_j = j(j - 1)`, independent of `n`.
pub fn c_differences(k: usize) -> Vec<Rational> {
    (1..=k as i64).map(|j| int(j * (j - 1))).collect()
}

/// Parameters of `prod_{j=1}^k (Delta_S - c_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereOpSpec {
    pub n: usize,
    pub k: usize,
    pub constants: Vec<Rational>,
}

impl SphereOpSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        check_n(n)?;
        if k < 1 {
            return Err(Error::InvalidOrder(k));
        }
        Ok(SphereOpSpec {
            n,
            k,
            constants: c_constants(n, k),
        })
    }

    /// Eigenvalue on spherical harmonics of degree `l`.
    pub fn eigenvalue(&self, l: usize) -> Rational {
        let base = int(-((l * (l + self.n - 1)) as i64));
        self.constants.iter().map(|c| &base - c).product()
    }
}

/// Applies `(Delta_S - c_k) ... (Delta_S - c_1)` factor by factor.
pub fn sphere_power_apply(spec: &SphereOpSpec, u: &SphereFunction) -> Result<SphereFunction> {
    sphere_power_apply_capped(spec, u, usize::MAX)
}

pub fn sphere_power_apply_capped(spec: &SphereOpSpec, u: &SphereFunction, cap: usize) -> Result<SphereFunction> {
    if u.n != spec.n {
        return Err(Error::VarCountMismatch(spec.n + 1, u.n + 1));
    }
    let op = ambient_sphere_operator(spec.n);
    let mut cur = u.reduce()?;
    for c in &spec.constants {
        let lap = sphere_laplacian_with(&op, &cur)?;
        cur = (&lap - &cur.scale(c)).reduce()?;
        let terms = cur.value.term_count();
        if terms > cap {
            return Err(Error::LimitExceeded { terms, cap });
        }
    }
    Ok(cur)
}

/// Stereographic coordinates `y_i = x_i / (1 + x_{n+1})` as functions on the sphere.
fn stereographic_coordinates(n: usize) -> Vec<RationalFunction> {
    let inv = RationalFunction::atom_power(sqrt_base_polynomial(n), -1).expect("nonzero atom");
    (0..n)
        .map(|i| &RationalFunction::from_poly(Polynomial::var(n + 1, i)) * &inv)
        .collect()
}

/// `f o Phi` for a rational `f` on `R^n`, reduced on `S^n`.
pub fn stereographic_pullback(f: &FnElem) -> Result<SphereFunction> {
    let n = f.var_count();
    check_n(n)?;
    let rf = f
        .to_rational_function()
        .ok_or_else(|| Error::NotRepresentable("stereographic pullback needs a rational function".into()))?;
    let pulled = rf.substitute(&stereographic_coordinates(n))?;
    reduce_mod_sphere(&FnElem::Rat(pulled).normalize())
}

/// Multiplication by `(1 + x_{n+1})^w`. Half-integer `w` needs the radical,
/// and `force_radical` represents integer weights through it as well.
pub fn weight_mult(w: &Rational, u: &SphereFunction, radical: bool, force_radical: bool) -> Result<SphereFunction> {
    let twice = w * int(2);
    if !twice.is_integer() {
        return Err(Error::InvalidArgument(format!("weight {w} is not a half-integer")));
    }
    let twice: i32 = twice
        .to_integer()
        .try_into()
        .map_err(|_| Error::InvalidArgument("weight out of range".into()))?;
    let n = u.n;
    let factor = if twice % 2 == 0 && !force_radical {
        FnElem::from(RationalFunction::atom_power(sqrt_base_polynomial(n), twice / 2)?).normalize()
    } else {
        if !radical {
            return Err(Error::RadicalRequired);
        }
        FnElem::Rad(RadicalElement::sqrt_power(sqrt_base(n), twice)?)
    };
    if factor.radical_base().is_some() && u.value.radical_base().is_none() {
        let base = factor.radical_base().unwrap().clone();
        let lifted = FnElem::Rad(u.value.to_radical(&base));
        return SphereFunction::new(&factor * &lifted)?.reduce();
    }
    SphereFunction::new(&factor * &u.value)?.reduce()
}

fn radical_flags(mode: RadicalMode, n: usize) -> Result<(bool, bool)> {
    let needed = n % 2 == 1;
    match mode {
        RadicalMode::Off if needed => Err(Error::RadicalRequired),
        RadicalMode::Off => Ok((false, false)),
        RadicalMode::Auto => Ok((needed, false)),
        RadicalMode::On => Ok((true, true)),
    }
}

/// `sigma(y) = (2y, 1 - |y|^2) / (1 + |y|^2)`, the inverse of stereographic projection.
pub fn inverse_stereographic(n: usize) -> Vec<RationalFunction> {
    let r2 = Polynomial::sum_of_squares(n, n);
    let inv = RationalFunction::atom_power(&Polynomial::one(n) + &r2, -1).expect("nonzero atom");
    let mut comps: Vec<RationalFunction> = (0..n)
        .map(|i| &RationalFunction::from_poly(Polynomial::var(n, i).scale(&int(2))) * &inv)
        .collect();
    comps.push(&RationalFunction::from_poly(&Polynomial::one(n) - &r2) * &inv);
    comps
}

pub fn verify_conformality(n: usize) -> Result<Report> {
    check_n(n)?;
    let mut report = Report::new("verify conformality").with_param("n", n);
    let sigma = inverse_stereographic(n);
    let factor = m_weight_function(n, 1).to_rational_function().expect("rational");
    let factor_sq = &factor * &factor;

    let jac: Vec<Vec<RationalFunction>> = sigma.iter().map(|c| (0..n).map(|j| c.derivative(j)).collect()).collect();
    let mut witness = None;
    'outer: for a in 0..n {
        for b in a..n {
            let gram = RationalFunction::sum_all(n, (0..=n).map(|i| &jac[i][a] * &jac[i][b]).collect());
            let expected = if a == b { factor_sq.clone() } else { RationalFunction::zero(n) };
            if gram != expected {
                witness = Some(format!("Gram entry ({},{}) = {}", a + 1, b + 1, gram));
                break 'outer;
            }
        }
    }
    let id = format!("conformality.n{}.gram", n);
    let desc = "D sigma^T D sigma = (2/(1+|y|^2))^2 I";
    report.push(match witness {
        None => Case::pass(id, desc),
        Some(w) => Case::fail(id, desc, w),
    });

    let height = RationalFunction::from_poly(sqrt_base_polynomial(n)).substitute(&sigma)?;
    report.push(Case::check(
        format!("conformality.n{}.conformal-factor", n),
        "sigma^*(1 + x_{n+1}) = 2/(1+|y|^2)",
        height == factor,
        || format!("sigma^*(1 + x_(n+1)) = {}", height),
    ));

    let norm = RationalFunction::from_poly(Polynomial::sum_of_squares(n + 1, n + 1)).substitute(&sigma)?;
    report.push(Case::check(
        format!("conformality.n{}.on-sphere", n),
        "|sigma(y)|^2 = 1",
        norm == RationalFunction::one(n),
        || format!("|sigma|^2 = {}", norm),
    ));

    let coords = stereographic_coordinates(n);
    let mut round_trip = None;
    for (i, c) in coords.iter().enumerate() {
        let back = c.substitute(&sigma)?;
        if back != RationalFunction::from_poly(Polynomial::var(n, i)) {
            round_trip = Some(format!("Phi(sigma(y))_{} = {}", i + 1, back));
            break;
        }
    }
    let id = format!("conformality.n{}.round-trip", n);
    report.push(match round_trip {
        None => Case::pass(id, "Phi o sigma = id"),
        Some(w) => Case::fail(id, "Phi o sigma = id", w),
    });
    Ok(report.finalize())
}

/// Both sides of `Phi^*(M_w f) = (1 + x_{n+1})^w Phi^* f`.
pub fn intertwining_weight_sides(w: i32, f: &FnElem) -> Result<(SphereFunction, SphereFunction)> {
    let n = f.var_count();
    check_n(n)?;
    let lhs = stereographic_pullback(&(&m_weight_function(n, w) * f))?;
    let rhs = weight_mult(&int(w as i64), &stereographic_pullback(f)?, false, false)?;
    Ok((lhs, rhs))
}

pub fn verify_intertwining_weight(w: i32, f: &FnElem) -> Result<Report> {
    let n = f.var_count();
    let mut report = Report::new("verify weight")
        .with_param("n", n)
        .with_param("w", w)
        .with_param("f", f.fmt_with('y'));
    let id = format!("weight.n{}.w{}", n, w);
    let desc = format!("Phi^*(M_{w} f) = (1+x_{{n+1}})^{w} Phi^* f");
    report.push(match intertwining_weight_sides(w, f) {
        Ok((l, r)) => Case::check(id, desc, l == r, || format!("lhs = {}, rhs = {}", l, r)),
        Err(e) => Case::from_error(id, desc, &e),
    });
    Ok(report.finalize())
}

/// Both sides of the intertwining identity for one flat test function:
/// `prod (Delta_S - c_j) (1+x_{n+1})^{k-n/2} Phi^* f` and
/// `(1+x_{n+1})^{-k-n/2} Phi^* (Delta^k f)`.
pub fn main_sides(n: usize, k: usize, f: &FnElem, opts: &VerifyOptions) -> Result<(SphereFunction, SphereFunction)> {
    let spec = SphereOpSpec::new(n, k)?;
    if f.var_count() != n {
        return Err(Error::VarCountMismatch(n, f.var_count()));
    }
    let (radical, force) = radical_flags(opts.radical, n)?;
    let half_n = rational(n as i64, 2);
    let pulled = stereographic_pullback(f)?;
    let weighted = weight_mult(&(int(k as i64) - &half_n), &pulled, radical, force)?;
    let lhs = sphere_power_apply_capped(&spec, &weighted, opts.term_cap)?;
    let flat = laplacian_power_apply(f, k, opts.term_cap)?;
    let mut rhs = weight_mult(&(-int(k as i64) - &half_n), &stereographic_pullback(&flat)?, radical, force)?;
    if opts.inject_bug {
        rhs = SphereFunction::new(&rhs.value + &FnElem::one(n + 1))?;
    }
    Ok((lhs, rhs))
}

pub fn default_main_degree(k: usize) -> u32 {
    2 * k as u32 + 1
}

fn family_case(id: String, description: String, n: usize, k: usize, family: &[FnElem], opts: &VerifyOptions) -> Case {
    let outcomes: Vec<Result<Option<String>>> = family
        .par_iter()
        .map(|f| {
            let (l, r) = main_sides(n, k, f, opts)?;
            Ok((l != r).then(|| format!("f = {}: lhs = {}, rhs = {}", f.fmt_with('y'), l, r)))
        })
        .collect();
    for o in outcomes {
        match o {
            Err(e) => return Case::from_error(id, description, &e),
            Ok(Some(w)) => return Case::fail(id, description, w),
            Ok(None) => {}
        }
    }
    Case::pass(id, description)
}

fn radical_param(mode: RadicalMode, n: usize) -> &'static str {
    match radical_flags(mode, n) {
        Ok((true, _)) => "on",
        _ => "off",
    }
}

/// The `k = 1` case, plus its two witness identities.
pub fn verify_yamabe(n: usize, max_degree: u32, tests: Option<Vec<FnElem>>, opts: &VerifyOptions) -> Result<Report> {
    check_n(n)?;
    radical_flags(opts.radical, n)?;
    let family = tests.unwrap_or_else(|| monomial_family(n, max_degree));
    let mut report = Report::new("verify yamabe")
        .with_param("n", n)
        .with_param("max_degree", max_degree)
        .with_param("radical", radical_param(opts.radical, n));
    report.push(family_case(
        format!("yamabe.n{}.family", n),
        format!("(Delta_S - c_1) M^(1-n/2) Phi^* f = M^(-1-n/2) Phi^* Delta f on {} test functions", family.len()),
        n,
        1,
        &family,
        opts,
    ));

    // (Delta_S - c_1)(1 + x_{n+1})^{1-n/2} = 0
    let id = format!("yamabe.n{}.constant-witness", n);
    let desc = "(Delta_S - c_1)(1 + x_{n+1})^(1-n/2) = 0";
    let (radical, force) = radical_flags(opts.radical, n)?;
    let witness = SphereFunction::new(FnElem::one(n + 1))
        .and_then(|one| weight_mult(&(int(1) - rational(n as i64, 2)), &one, radical, force))
        .and_then(|u| sphere_power_apply_capped(&SphereOpSpec::new(n, 1)?, &u, opts.term_cap));
    report.push(match witness {
        Ok(v) => Case::check(id, desc, v.is_zero(), || format!("result = {}", v)),
        Err(e) => Case::from_error(id, desc, &e),
    });

    if n == 2 {
        let id = "yamabe.n2.harmonic-witness".to_string();
        let desc = "Delta_S (x_1 / (1 + x_3)) = 0";
        let r = stereographic_pullback(&FnElem::var(2, 0)).and_then(|u| sphere_laplacian(&u));
        report.push(match r {
            Ok(v) => Case::check(id, desc, v.is_zero(), || format!("result = {}", v)),
            Err(e) => Case::from_error(id, desc, &e),
        });
    }
    Ok(report.finalize())
}

pub fn verify_main(n: usize, k: usize, max_degree: Option<u32>, tests: Option<Vec<FnElem>>, opts: &VerifyOptions) -> Result<Report> {
    SphereOpSpec::new(n, k)?;
    radical_flags(opts.radical, n)?;
    let degree = max_degree.unwrap_or_else(|| default_main_degree(k));
    let family = tests.unwrap_or_else(|| monomial_family(n, degree));
    let mut report = Report::new("verify main")
        .with_param("n", n)
        .with_param("k", k)
        .with_param("max_degree", degree)
        .with_param("radical", radical_param(opts.radical, n));
    report.push(family_case(
        format!("main.n{}.k{}", n, k),
        format!(
            "prod (Delta_S - c_j) M^(k-n/2) Phi^* f = M^(-k-n/2) Phi^* Delta^k f on {} test functions",
            family.len()
        ),
        n,
        k,
        &family,
        opts,
    ));
    Ok(report.finalize())
}

/// Projection of a homogeneous polynomial of degree `l` in `N` variables onto
/// its harmonic component:
/// `sum_j (-1)^j |x|^{2j} Delta^j p / (2^j j! prod_{i=1}^j (N + 2l - 2i - 2))`.
pub fn harmonic_projection(p: &Polynomial, l: usize) -> Polynomial {
    let vars = p.var_count();
    let r2 = Polynomial::sum_of_squares(vars, vars);
    let mut out = p.clone();
    let mut lap = p.clone();
    let mut r_pow = Polynomial::one(vars);
    let mut denom = Rational::one();
    for j in 1..=l / 2 {
        lap = lap.laplacian(vars);
        if lap.is_zero() {
            break;
        }
        r_pow = &r_pow * &r2;
        denom *= int(2 * j as i64) * int(vars as i64 + 2 * l as i64 - 2 * j as i64 - 2);
        let sign = if j % 2 == 1 { -Rational::one() } else { Rational::one() };
        out = &out + &(&r_pow * &lap).scale(&(sign / &denom));
    }
    out
}

/// Harmonic projections of every monomial of degree `l` in `x_1` and `x_{n+1}`.
pub fn harmonic_basis(n: usize, l: usize) -> Vec<Polynomial> {
    let vars = n + 1;
    let mut out = Vec::new();
    for a in 0..=l {
        let mut exps = vec![0u32; vars];
        exps[0] += a as u32;
        exps[n] += (l - a) as u32;
        let h = harmonic_projection(&Polynomial::term(Rational::one(), Monomial::from_exponents(exps)), l);
        if !h.is_zero() && !out.contains(&h) {
            out.push(h);
        }
    }
    out
}

pub fn verify_spectrum(n: usize, k: usize, l_max: usize) -> Result<Report> {
    let spec = SphereOpSpec::new(n, k)?;
    let mus: Vec<Rational> = (0..=l_max).map(|l| spec.eigenvalue(l)).collect();
    let fmt_list = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
    let mut report = Report::new("spectrum")
        .with_param("n", n)
        .with_param("k", k)
        .with_param("l_max", l_max)
        .with_param("constants", format!("[{}]", fmt_list(&spec.constants)))
        .with_param("mu", format!("[{}]", fmt_list(&mus)));

    let diffs: Vec<Rational> = spec.constants.iter().map(|c| &spec.constants[0] - c).collect();
    report.push(Case::check(
        format!("spectrum.n{}.k{}.constant-differences", n, k),
        "c_1 - c_j = j(j-1)",
        diffs == c_differences(k),
        || format!("differences [{}]", fmt_list(&diffs)),
    ));

    let cases: Vec<Case> = (0..=l_max)
        .into_par_iter()
        .map(|l| {
            let id = format!("spectrum.n{}.k{}.l{}", n, k, l);
            let basis = harmonic_basis(n, l);
            let desc = format!("mu_{} = {} on {} harmonics of degree {}", l, mus[l], basis.len(), l);
            for h in &basis {
                let lap = h.laplacian(n + 1);
                if !lap.is_zero() {
                    return Case::fail(id, desc, format!("ambient Laplacian of {} is {}", h.fmt_with('x'), lap.fmt_with('x')));
                }
                let u = match reduce_mod_sphere(&FnElem::from(h.clone())) {
                    Ok(u) => u,
                    Err(e) => return Case::from_error(id, desc, &e),
                };
                match sphere_power_apply(&spec, &u) {
                    Ok(v) if v == u.scale(&mus[l]) => {}
                    Ok(v) => {
                        return Case::fail(id, desc, format!("h = {}: operator gives {}", h.fmt_with('x'), v))
                    }
                    Err(e) => return Case::from_error(id, desc, &e),
                }
            }
            Case::pass(id, desc)
        })
        .collect();
    report.extend(cases);
    Ok(report.finalize())
}

/// Distinct reduced monomials up to `max_degree` on the sphere, used by property tests.
pub fn sphere_monomials(n: usize, max_degree: u32) -> Vec<Polynomial> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for m in monomials_up_to(n + 1, max_degree) {
        let p = reduce_polynomial(&Polynomial::term(Rational::one(), m));
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}
