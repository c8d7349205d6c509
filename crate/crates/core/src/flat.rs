//! Identities on `R^n`: the factored product identity for `Delta^k`, the
//! commutator relations between `Delta`, the Euler field `X` and the weights
//! `M_w`, and conformal covariance of `Delta^k` under generators of the
//! conformal group (checked on monomial test families).

use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::diffop::{m_weight_function, DiffOp};
use crate::error::{Error, Result};
use crate::exactfn::{
    int, monomials_up_to, rational, FnElem, Polynomial, RadicalBase, RadicalElement, Rational, RationalFunction,
};
use crate::options::{RadicalMode, VerifyOptions};
use crate::report::{Case, Report};

fn check_dims(n: usize, k: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    if k < 1 {
        return Err(Error::InvalidOrder(k));
    }
    Ok(())
}

fn check_cap(op: DiffOp, cap: usize) -> Result<DiffOp> {
    let terms = op.term_count();
    if terms > cap {
        return Err(Error::LimitExceeded { terms, cap });
    }
    Ok(op)
}

/// `Delta^k f` by repeated application, aborting past `cap` monomials.
pub fn laplacian_power_apply(f: &FnElem, k: usize, cap: usize) -> Result<FnElem> {
    let lap = DiffOp::laplacian(f.var_count());
    let mut g = f.clone();
    for _ in 0..k {
        g = lap.apply(&g)?;
        let terms = g.term_count();
        if terms > cap {
            return Err(Error::LimitExceeded { terms, cap });
        }
    }
    Ok(g)
}

/// Both sides of the product identity
/// `[D + k(k-1)M_2] M_{-2} ... [D + 2M_2] M_{-2} D = M_{1-k} D^k M_{1-k}`.
///
/// The left side is accumulated right to left so each step composes a
/// second-order operator with the running product.
pub fn build_rn_sides(n: usize, k: usize, cap: usize) -> Result<(DiffOp, DiffOp)> {
    check_dims(n, k)?;
    let lap = DiffOp::laplacian(n);
    let m2 = m_weight_function(n, 2);
    let m_minus2 = m_weight_function(n, -2);
    let mut lhs = lap.clone();
    for j in 2..=k {
        let shifted = lhs.left_mult(&m_minus2)?;
        let j = j as i64;
        let weighted = shifted.left_mult(&m2.scale(&int(j * (j - 1))))?;
        lhs = check_cap(&lap.compose_capped(&shifted, cap)? + &weighted, cap)?;
    }
    let w = 1 - k as i32;
    let outer = m_weight_function(n, w);
    let lap_k = lap.power(k as u32, cap)?;
    let rhs = lap_k.compose_capped(&DiffOp::mult(outer.clone()), cap)?.left_mult(&outer)?;
    Ok((lhs, check_cap(rhs, cap)?))
}

fn op_case(id: String, description: String, sides: Result<(DiffOp, DiffOp)>, inject_bug: bool) -> Case {
    match sides {
        Ok((lhs, mut rhs)) => {
            if inject_bug {
                rhs = &rhs + &DiffOp::identity(rhs.var_count());
            }
            let diff = &lhs - &rhs;
            Case::check(id, description, diff.is_zero(), || {
                format!("lhs - rhs has term {}", diff.first_term_witness('y').unwrap_or_default())
            })
        }
        Err(e) => Case::from_error(id, description, &e),
    }
}

pub fn verify_rn(n: usize, k: usize, opts: &VerifyOptions) -> Result<Report> {
    check_dims(n, k)?;
    let mut report = Report::new("verify rn").with_param("n", n).with_param("k", k);
    let description = if k == 1 {
        "k = 1: both sides reduce to the Laplacian".to_string()
    } else {
        format!("factored product of {} Laplacian factors equals M_{} D^{} M_{}", k, 1 - k as i64, k, 1 - k as i64)
    };
    report.push(op_case(
        format!("rn.n{}.k{}", n, k),
        description,
        build_rn_sides(n, k, opts.term_cap),
        opts.inject_bug,
    ));
    Ok(report.finalize())
}

/// A claimed operator identity together with its computed sides.
pub struct OpIdentity {
    pub id: String,
    pub description: String,
    pub sides: Result<(DiffOp, DiffOp)>,
}

/// `2X + n + c * M_1 |y|^2`.
fn euler_shift(n: usize, c: &Rational) -> DiffOp {
    let q_m1 = &FnElem::from(Polynomial::sum_of_squares(n, n)) * &m_weight_function(n, 1);
    DiffOp::linear_combine(
        &[int(2), int(n as i64), c.clone()],
        &[DiffOp::euler(n), DiffOp::identity(n), DiffOp::mult(q_m1)],
    )
    .expect("shared context")
}

/// `-w M_w (2X + n - (w-1) M_1 |y|^2) M_1`.
fn laplacian_weight_rhs(n: usize, w: i32, cap: usize) -> Result<DiffOp> {
    let inner = euler_shift(n, &int(-(w as i64 - 1)));
    let op = inner
        .compose_capped(&DiffOp::m_weight(n, 1), cap)?
        .left_mult(&m_weight_function(n, w))?;
    Ok(op.scale(&int(-(w as i64))))
}

/// `-w M_{w+1} (2X + n - (w+1) M_1 |y|^2)`.
fn laplacian_weight_rhs_alt(n: usize, w: i32) -> Result<DiffOp> {
    let inner = euler_shift(n, &int(-(w as i64 + 1)));
    Ok(inner.left_mult(&m_weight_function(n, w + 1))?.scale(&int(-(w as i64))))
}

/// `k (2X + n + 2(k-1)) D^{k-1}`.
fn power_inverse_weight_rhs(n: usize, k: usize, cap: usize) -> Result<DiffOp> {
    let shift = DiffOp::linear_combine(
        &[int(2), int(n as i64 + 2 * (k as i64 - 1))],
        &[DiffOp::euler(n), DiffOp::identity(n)],
    )?;
    let lap_pow = DiffOp::laplacian(n).power(k as u32 - 1, cap)?;
    Ok(shift.compose_capped(&lap_pow, cap)?.scale(&int(k as i64)))
}

pub fn commutator_identities(
    n: usize,
    w_range: RangeInclusive<i32>,
    k_max: usize,
    cap: usize,
) -> Result<Vec<OpIdentity>> {
    check_dims(n, k_max.max(1))?;
    let lap = DiffOp::laplacian(n);
    let euler = DiffOp::euler(n);
    let mut out = Vec::new();

    out.push(OpIdentity {
        id: format!("comm.n{}.laplacian-euler", n),
        description: "[D, X] = 2D".into(),
        sides: lap.commutator_capped(&euler, cap).map(|c| (c, lap.scale(&int(2)))),
    });

    for w in w_range {
        let mw = DiffOp::m_weight(n, w);
        let q_next = &FnElem::from(Polynomial::sum_of_squares(n, n)) * &m_weight_function(n, w + 1);
        out.push(OpIdentity {
            id: format!("comm.n{}.euler-weight.w{}", n, w),
            description: format!("[X, M_{w}] = -({w}) |y|^2 M_{}", w + 1),
            sides: euler
                .commutator_capped(&mw, cap)
                .map(|c| (c, DiffOp::mult(q_next.scale(&int(-(w as i64)))))),
        });

        let lhs = lap.commutator_capped(&mw, cap);
        let rhs = laplacian_weight_rhs(n, w, cap);
        let rhs_alt = laplacian_weight_rhs_alt(n, w);
        out.push(OpIdentity {
            id: format!("comm.n{}.laplacian-weight.w{}", n, w),
            description: format!("[D, M_{w}] = -({w}) M_{w} (2X + n - ({w}-1) M_1 |y|^2) M_1"),
            sides: lhs.clone().and_then(|l| rhs.clone().map(|r| (l, r))),
        });
        out.push(OpIdentity {
            id: format!("comm.n{}.laplacian-weight-alt.w{}", n, w),
            description: format!("[D, M_{w}] = -({w}) M_{} (2X + n - ({w}+1) M_1 |y|^2)", w + 1),
            sides: lhs.and_then(|l| rhs_alt.clone().map(|r| (l, r))),
        });
        out.push(OpIdentity {
            id: format!("comm.n{}.laplacian-weight-forms.w{}", n, w),
            description: "the two right-hand forms for [D, M_w] agree".into(),
            sides: rhs.and_then(|a| rhs_alt.map(|b| (a, b))),
        });
    }

    let m_inv = DiffOp::m_weight(n, -1);
    for k in 1..=k_max {
        let sides = DiffOp::laplacian(n)
            .power(k as u32, cap)
            .and_then(|p| p.commutator_capped(&m_inv, cap))
            .and_then(|c| power_inverse_weight_rhs(n, k, cap).map(|r| (c, r)));
        out.push(OpIdentity {
            id: format!("comm.n{}.power-inverse-weight.k{}", n, k),
            description: format!("[D^{k}, M_-1] = {k} (2X + n + 2({k}-1)) D^{}", k - 1),
            sides,
        });
    }

    // The k = 1 power identity and the w = -1 alternative form both give 2X + n.
    let plain = euler_shift(n, &Rational::zero());
    let power_form = power_inverse_weight_rhs(n, 1, cap);
    let alt_form = laplacian_weight_rhs_alt(n, -1);
    out.push(OpIdentity {
        id: format!("comm.n{}.power-weight-coincidence", n),
        description: "k = 1 power form equals the w = -1 alternative form".into(),
        sides: power_form.clone().and_then(|a| alt_form.map(|b| (a, b))),
    });
    out.push(OpIdentity {
        id: format!("comm.n{}.power-weight-coincidence-value", n),
        description: "k = 1 power form equals 2X + n".into(),
        sides: power_form.map(|a| (a, plain)),
    });
    Ok(out)
}

pub fn verify_commutators(n: usize, w_range: RangeInclusive<i32>, k_max: usize, opts: &VerifyOptions) -> Result<Report> {
    let mut report = Report::new("verify comm")
        .with_param("n", n)
        .with_param("w_range", format!("{}..{}", w_range.start(), w_range.end()))
        .with_param("k_max", k_max);
    let identities = commutator_identities(n, w_range, k_max, opts.term_cap)?;
    let cases: Vec<Case> = identities
        .into_par_iter()
        .map(|ident| op_case(ident.id, ident.description, ident.sides, opts.inject_bug))
        .collect();
    report.extend(cases);
    Ok(report.finalize())
}

/// One generator of the conformal group of `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub enum MotionKind {
    /// `y -> y + v`.
    Translation(Vec<Rational>),
    /// `y -> y R` (row-vector convention); `R` must be exactly orthogonal.
    Rotation(Vec<Vec<Rational>>),
    /// `y -> lambda y`, `lambda > 0`.
    Dilation(Rational),
    /// `y -> y / |y|^2`.
    Inversion,
}

impl MotionKind {
    pub fn name(&self) -> &'static str {
        match self {
            MotionKind::Translation(_) => "translation",
            MotionKind::Rotation(_) => "rotation",
            MotionKind::Dilation(_) => "dilation",
            MotionKind::Inversion => "inversion",
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            MotionKind::Translation(v) if v.len() != n => Err(Error::VarCountMismatch(n, v.len())),
            MotionKind::Rotation(r) => {
                if r.len() != n || r.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidArgument(format!("rotation matrix must be {n}x{n}")));
                }
                for i in 0..n {
                    for j in 0..n {
                        let dot: Rational = (0..n).map(|l| &r[l][i] * &r[l][j]).sum();
                        let expected = if i == j { Rational::one() } else { Rational::zero() };
                        if dot != expected {
                            return Err(Error::InvalidArgument("rotation matrix is not orthogonal".into()));
                        }
                    }
                }
                Ok(())
            }
            MotionKind::Dilation(l) if !l.is_positive() => {
                Err(Error::InvalidArgument("dilation factor must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    /// Components of the map as rational functions of `y`.
    fn components(&self, n: usize) -> Vec<RationalFunction> {
        let y = |i: usize| RationalFunction::from_poly(Polynomial::var(n, i));
        match self {
            MotionKind::Translation(v) => (0..n)
                .map(|i| RationalFunction::from_poly(&Polynomial::var(n, i) + &Polynomial::constant(v[i].clone(), n)))
                .collect(),
            MotionKind::Rotation(r) => (0..n)
                .map(|i| {
                    let p = (0..n).fold(Polynomial::zero(n), |acc, j| {
                        &acc + &Polynomial::var(n, j).scale(&r[j][i])
                    });
                    RationalFunction::from_poly(p)
                })
                .collect(),
            MotionKind::Dilation(l) => (0..n).map(|i| y(i).scale(l)).collect(),
            MotionKind::Inversion => {
                let inv = inverse_radius_sq(n);
                (0..n).map(|i| &y(i) * &inv).collect()
            }
        }
    }

    fn inverse(&self) -> MotionKind {
        match self {
            MotionKind::Translation(v) => MotionKind::Translation(v.iter().map(|c| -c).collect()),
            MotionKind::Rotation(r) => {
                let n = r.len();
                MotionKind::Rotation((0..n).map(|i| (0..n).map(|j| r[j][i].clone()).collect()).collect())
            }
            MotionKind::Dilation(l) => MotionKind::Dilation(l.recip()),
            MotionKind::Inversion => MotionKind::Inversion,
        }
    }

    /// Conformal factor `Omega` with `C^* g = Omega^2 g`.
    fn omega(&self, n: usize) -> RationalFunction {
        match self {
            MotionKind::Translation(_) | MotionKind::Rotation(_) => RationalFunction::one(n),
            MotionKind::Dilation(l) => RationalFunction::constant(l.clone(), n),
            MotionKind::Inversion => inverse_radius_sq(n),
        }
    }
}

/// `|y|^{-2}`; for `n = 1` the atom is `y_1` so that no square atom arises.
fn inverse_radius_sq(n: usize) -> RationalFunction {
    if n == 1 {
        RationalFunction::atom_power(Polynomial::var(1, 0), -2).expect("nonzero atom")
    } else {
        RationalFunction::atom_power(Polynomial::sum_of_squares(n, n), -1).expect("nonzero atom")
    }
}

/// A word in the generators, applied left to right: `steps[0]` acts first.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMotion {
    n: usize,
    steps: Vec<MotionKind>,
}

pub const GENERATOR_NAMES: [&str; 4] = ["translation", "rotation", "dilation", "inversion"];

impl ConformalMotion {
    pub fn new(n: usize, steps: Vec<MotionKind>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidDimension(n));
        }
        if steps.is_empty() {
            return Err(Error::InvalidArgument("a motion needs at least one generator".into()));
        }
        for s in &steps {
            s.validate(n)?;
        }
        Ok(ConformalMotion { n, steps })
    }

    /// The standard generator with the given name: translation by `e_1`, the
    /// 3-4-5 rotation in the first coordinate plane, dilation by 2, inversion.
    pub fn generator(name: &str, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidDimension(n));
        }
        let kind = match name {
            "translation" => {
                let mut v = vec![Rational::zero(); n];
                v[0] = Rational::one();
                MotionKind::Translation(v)
            }
            "rotation" => {
                if n < 2 {
                    return Err(Error::InvalidArgument("rotation needs n >= 2".into()));
                }
                let mut r: Vec<Vec<Rational>> = (0..n)
                    .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
                    .collect();
                r[0][0] = rational(3, 5);
                r[0][1] = rational(4, 5);
                r[1][0] = rational(-4, 5);
                r[1][1] = rational(3, 5);
                MotionKind::Rotation(r)
            }
            "dilation" => MotionKind::Dilation(int(2)),
            "inversion" => MotionKind::Inversion,
            other => return Err(Error::InvalidArgument(format!("unknown motion '{other}'"))),
        };
        Self::new(n, vec![kind])
    }

    /// Parses `name` or `name,name,...` (applied left to right).
    pub fn parse(word: &str, n: usize) -> Result<Self> {
        let mut steps = Vec::new();
        for part in word.split(',') {
            steps.extend(Self::generator(part.trim(), n)?.steps);
        }
        Self::new(n, steps)
    }

    /// Generators valid in dimension `n` followed by all ordered pairs of them.
    pub fn test_family(n: usize) -> Vec<Self> {
        let gens: Vec<Self> = GENERATOR_NAMES
            .iter()
            .filter_map(|g| Self::generator(g, n).ok())
            .collect();
        let mut out = gens.clone();
        for a in &gens {
            for b in &gens {
                out.push(a.then(b));
            }
        }
        out
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Self) -> Self {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        ConformalMotion { n: self.n, steps }
    }

    pub fn inverse(&self) -> Self {
        ConformalMotion {
            n: self.n,
            steps: self.steps.iter().rev().map(MotionKind::inverse).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> &[MotionKind] {
        &self.steps
    }

    pub fn name(&self) -> String {
        self.steps.iter().map(MotionKind::name).collect::<Vec<_>>().join("-")
    }

    /// `f o C`, substituting one generator at a time.
    pub fn pullback(&self, f: &RationalFunction) -> Result<RationalFunction> {
        let mut g = f.clone();
        for step in self.steps.iter().rev() {
            g = g.substitute(&step.components(self.n))?;
        }
        Ok(g)
    }

    /// Components of `C` as rational functions of `y`.
    pub fn components(&self) -> Result<Vec<RationalFunction>> {
        (0..self.n)
            .map(|i| self.pullback(&RationalFunction::from_poly(Polynomial::var(self.n, i))))
            .collect()
    }

    /// `Omega_C` by the chain rule `Omega_{B o A} = (Omega_B o A) Omega_A`.
    pub fn omega(&self) -> Result<RationalFunction> {
        let n = self.n;
        let mut acc = RationalFunction::one(n);
        let mut prefix: Vec<RationalFunction> = (0..n).map(|i| RationalFunction::from_poly(Polynomial::var(n, i))).collect();
        for step in &self.steps {
            acc = &acc * &step.omega(n).substitute(&prefix)?;
            acc.cancel();
            prefix = step
                .components(n)
                .iter()
                .map(|c| c.substitute(&prefix))
                .collect::<Result<_>>()?;
        }
        Ok(acc)
    }

    /// Checks `J^T J = Omega^2 I` for the Jacobian `J` of the motion.
    pub fn check_jacobian(&self) -> Result<Option<String>> {
        let n = self.n;
        let comps = self.components()?;
        let omega = self.omega()?;
        let omega_sq = &omega * &omega;
        let jac: Vec<Vec<RationalFunction>> = comps
            .iter()
            .map(|c| (0..n).map(|j| c.derivative(j)).collect())
            .collect();
        for a in 0..n {
            for b in a..n {
                let gram = RationalFunction::sum_all(n, (0..n).map(|i| &jac[i][a] * &jac[i][b]).collect());
                let expected = if a == b { omega_sq.clone() } else { RationalFunction::zero(n) };
                if gram != expected {
                    return Ok(Some(format!("Gram entry ({},{}) = {}", a + 1, b + 1, gram)));
                }
            }
        }
        Ok(None)
    }
}

impl fmt::Display for ConformalMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `f o C` for a polynomial or rational `f`.
pub fn motion_pullback(motion: &ConformalMotion, f: &FnElem) -> Result<FnElem> {
    if f.var_count() != motion.n {
        return Err(Error::VarCountMismatch(motion.n, f.var_count()));
    }
    let rf = f.to_rational_function().ok_or_else(|| {
        Error::NotRepresentable("pullback of a radical element changes its radical base".into())
    })?;
    Ok(FnElem::Rat(motion.pullback(&rf)?).normalize())
}

fn rational_sqrt(c: &Rational) -> Option<Rational> {
    if c.is_negative() {
        return None;
    }
    let exact = |x: &BigInt| {
        let r = x.sqrt();
        (&r * &r == *x).then_some(r)
    };
    Some(Rational::new(exact(c.numer())?, exact(c.denom())?))
}

/// `sqrt(Omega) = rational * sqrt(u)`, with `u` free of square atoms.
pub struct OmegaRoot {
    n: usize,
    rational: RationalFunction,
    base: Option<Arc<RadicalBase>>,
}

impl OmegaRoot {
    pub fn new(omega: &RationalFunction) -> Result<Self> {
        let n = omega.var_count();
        let mut radicand = Polynomial::one(n);
        let mut parts = Vec::new();
        let num = omega.num_part();
        let mut lead = Polynomial::one(n);
        match num.as_constant() {
            Some(c) => match rational_sqrt(&c) {
                Some(r) => lead = Polynomial::constant(r, n),
                None => radicand = radicand.scale(&c),
            },
            None => radicand = &radicand * num,
        }
        for (atom, e) in omega.factors() {
            parts.push((atom.clone(), e.div_euclid(2)));
            if e.rem_euclid(2) == 1 {
                radicand = &radicand * atom;
            }
        }
        let rational = RationalFunction::from_parts(lead, parts)?;
        let base = if radicand.as_constant() == Some(Rational::one()) {
            None
        } else {
            Some(RadicalBase::new(radicand)?)
        };
        Ok(OmegaRoot { n, rational, base })
    }

    pub fn needs_radical(&self) -> bool {
        self.base.is_some()
    }

    /// `Omega^{m/2}`. With `use_radical` false, `m` must be even or the root rational.
    pub fn power(&self, m: i32, use_radical: bool) -> Result<FnElem> {
        let r = self.rational.powi(m)?;
        match &self.base {
            None => Ok(FnElem::Rat(r).normalize()),
            Some(base) if use_radical => {
                let s = RadicalElement::sqrt_power(base.clone(), m)?;
                Ok(FnElem::Rad(&s * &RadicalElement::from_rational(base.clone(), r)))
            }
            Some(base) => {
                if m % 2 != 0 {
                    return Err(Error::RadicalRequired);
                }
                let u = RationalFunction::atom_power(base.polynomial().clone(), m / 2)?;
                Ok(FnElem::Rat(&r * &u).normalize())
            }
        }
    }

    pub fn var_count(&self) -> usize {
        self.n
    }
}

fn use_radical(mode: RadicalMode, root: &OmegaRoot, n: usize) -> Result<bool> {
    let needed = root.needs_radical() && n % 2 == 1;
    match mode {
        RadicalMode::Off if needed => Err(Error::RadicalRequired),
        RadicalMode::Off => Ok(false),
        RadicalMode::Auto => Ok(needed),
        RadicalMode::On => Ok(root.needs_radical()),
    }
}

/// Both sides of covariance for one test function:
/// `Delta^k f` and `(C^{-1})^* Omega^{-n/2-k} Delta^k Omega^{n/2-k} C^* f`.
pub fn translaw_sides(motion: &ConformalMotion, k: usize, f: &FnElem, opts: &VerifyOptions) -> Result<(FnElem, FnElem)> {
    let n = motion.n;
    check_dims(n, k)?;
    let lhs = laplacian_power_apply(f, k, opts.term_cap)?;
    let root = OmegaRoot::new(&motion.omega()?)?;
    let radical = use_radical(opts.radical, &root, n)?;
    let pulled = motion_pullback(motion, f)?;
    let inner = &root.power(n as i32 - 2 * k as i32, radical)? * &pulled;
    let transformed = laplacian_power_apply(&inner, k, opts.term_cap)?;
    let outer = &root.power(-(n as i32) - 2 * k as i32, radical)? * &transformed;
    let outer = match outer {
        FnElem::Rad(r) => r
            .into_rational()
            .map_err(|r| Error::NotRepresentable(format!("radical part survives: {}", r.fmt_with('y'))))?,
        other => other.to_rational_function().expect("rational"),
    };
    let mut rhs = FnElem::Rat(motion.inverse().pullback(&outer)?).normalize();
    if opts.inject_bug {
        rhs = &rhs + &FnElem::one(n);
    }
    Ok((lhs, rhs))
}

/// `Delta^k (f o C)` against `(Delta^k f) o C`, for motions with `Omega = 1`.
pub fn rigid_sides(motion: &ConformalMotion, k: usize, f: &FnElem, cap: usize) -> Result<(FnElem, FnElem)> {
    let lhs = laplacian_power_apply(&motion_pullback(motion, f)?, k, cap)?;
    let rhs = motion_pullback(motion, &laplacian_power_apply(f, k, cap)?)?;
    Ok((lhs, rhs))
}

/// Monomial test functions of degree at most `max_degree`.
pub fn monomial_family(n: usize, max_degree: u32) -> Vec<FnElem> {
    monomials_up_to(n, max_degree)
        .into_iter()
        .map(|m| FnElem::from(Polynomial::term(Rational::one(), m)))
        .collect()
}

pub fn default_translaw_degree(k: usize) -> u32 {
    2 * k as u32 + 2
}

fn family_case<F>(id: String, description: String, family: &[FnElem], check: F) -> Case
where
    F: Fn(&FnElem) -> Result<(FnElem, FnElem)> + Sync,
{
    let outcomes: Vec<Result<Option<String>>> = family
        .par_iter()
        .map(|f| {
            let (lhs, rhs) = check(f)?;
            Ok((lhs != rhs).then(|| format!("f = {}: lhs = {}, rhs = {}", f.fmt_with('y'), lhs.fmt_with('y'), rhs.fmt_with('y'))))
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

/// Covariance of `Delta^k` under `motion`, on all monomials up to `max_degree`
/// (or on the supplied test functions).
pub fn verify_translaw(
    k: usize,
    motion: &ConformalMotion,
    max_degree: Option<u32>,
    tests: Option<Vec<FnElem>>,
    opts: &VerifyOptions,
) -> Result<Report> {
    let n = motion.n;
    check_dims(n, k)?;
    let degree = max_degree.unwrap_or_else(|| default_translaw_degree(k));
    let family = tests.unwrap_or_else(|| monomial_family(n, degree));
    let root = OmegaRoot::new(&motion.omega()?)?;
    let radical = use_radical(opts.radical, &root, n)?;
    let name = motion.name();
    let mut report = Report::new("verify covariance")
        .with_param("n", n)
        .with_param("k", k)
        .with_param("motion", &name)
        .with_param("max_degree", degree)
        .with_param("radical", if radical { "on" } else { "off" });

    let jac_id = format!("covariance.n{}.{}.jacobian", n, name);
    let jac_desc = "J^T J = Omega^2 I".to_string();
    report.push(match motion.check_jacobian() {
        Ok(None) => Case::pass(jac_id, jac_desc),
        Ok(Some(w)) => Case::fail(jac_id, jac_desc, w),
        Err(e) => Case::from_error(jac_id, jac_desc, &e),
    });

    report.push(family_case(
        format!("covariance.n{}.{}.k{}", n, name, k),
        format!("covariance of D^{} on {} test functions", k, family.len()),
        &family,
        |f| translaw_sides(motion, k, f, opts),
    ));

    let omega = motion.omega()?;
    if omega.as_constant() == Some(Rational::one()) {
        report.push(family_case(
            format!("covariance.n{}.{}.k{}.rigid", n, name, k),
            format!("D^{k} (f o C) = (D^{k} f) o C"),
            &family,
            |f| {
                let (l, mut r) = rigid_sides(motion, k, f, opts.term_cap)?;
                if opts.inject_bug {
                    r = &r + &FnElem::one(n);
                }
                Ok((l, r))
            },
        ));
    }
    Ok(report.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfn::parse_polynomial;

    fn poly(s: &str, n: usize) -> FnElem {
        FnElem::from(parse_polynomial(s, n).unwrap())
    }

    #[test]
    fn rn_small_cases() {
        let opts = VerifyOptions::default();
        for (n, k) in [(1, 1), (2, 2), (3, 2), (1, 3)] {
            let r = verify_rn(n, k, &opts).unwrap();
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn rn_k1_is_laplacian() {
        let (l, r) = build_rn_sides(3, 1, 1000).unwrap();
        assert_eq!(l, DiffOp::laplacian(3));
        assert_eq!(r, DiffOp::laplacian(3));
    }

    #[test]
    fn rn_rejects_bad_order() {
        assert_eq!(build_rn_sides(2, 0, 1000).unwrap_err(), Error::InvalidOrder(0));
    }

    #[test]
    fn rn_cap_is_reported_as_limit() {
        let opts = VerifyOptions {
            term_cap: 5,
            ..VerifyOptions::default()
        };
        let r = verify_rn(2, 3, &opts).unwrap();
        assert_eq!(r.overall, crate::CaseStatus::Limit);
    }

    #[test]
    fn injected_bug_fails_with_witness() {
        let opts = VerifyOptions {
            inject_bug: true,
            ..VerifyOptions::default()
        };
        let r = verify_rn(2, 2, &opts).unwrap();
        assert!(!r.passed());
        assert!(r.cases[0].witness.as_ref().unwrap().contains("d["));
    }

    #[test]
    fn commutators_small() {
        let r = verify_commutators(2, -2..=2, 3, &VerifyOptions::default()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn euler_weight_zero_is_trivial() {
        let c = DiffOp::euler(3).commutator(&DiffOp::m_weight(3, 0)).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn pullback_examples() {
        let dil = ConformalMotion::generator("dilation", 1).unwrap();
        assert_eq!(motion_pullback(&dil, &poly("y1^2", 1)).unwrap(), poly("4*y1^2", 1));

        let inv = ConformalMotion::generator("inversion", 2).unwrap();
        let expected = FnElem::Rat(
            RationalFunction::new(Polynomial::var(2, 0), Polynomial::sum_of_squares(2, 2)).unwrap(),
        );
        assert_eq!(motion_pullback(&inv, &poly("y1", 2)).unwrap(), expected);

        let rot = ConformalMotion::generator("rotation", 2).unwrap();
        assert_eq!(motion_pullback(&rot, &poly("y1", 2)).unwrap(), poly("3/5*y1 - 4/5*y2", 2));
    }

    #[test]
    fn inverse_undoes_motion() {
        for m in ConformalMotion::test_family(3) {
            let f = RationalFunction::from_poly(parse_polynomial("y1^2*y3 + y2", 3).unwrap());
            let back = m.inverse().pullback(&m.pullback(&f).unwrap()).unwrap();
            assert_eq!(back, f, "{}", m);
        }
    }

    #[test]
    fn omega_of_inversion_pair_is_one() {
        let m = ConformalMotion::parse("inversion,inversion", 3).unwrap();
        assert_eq!(m.omega().unwrap().as_constant(), Some(Rational::one()));
    }

    #[test]
    fn jacobians_are_conformal() {
        for m in ConformalMotion::test_family(2) {
            assert_eq!(m.check_jacobian().unwrap(), None, "{}", m);
        }
    }

    #[test]
    fn omega_root_splits_square_part() {
        let root = OmegaRoot::new(&RationalFunction::constant(int(4), 2)).unwrap();
        assert!(!root.needs_radical());
        let root = OmegaRoot::new(&inverse_radius_sq(3)).unwrap();
        assert!(root.needs_radical());
        // |y|^{-1} squared is |y|^{-2}
        let half = root.power(-1, true).unwrap();
        let full = root.power(-2, true).unwrap();
        assert_eq!(&half * &half, full);
    }

    #[test]
    fn kelvin_image_of_y1_is_harmonic() {
        let inv = ConformalMotion::generator("inversion", 2).unwrap();
        let (l, r) = translaw_sides(&inv, 1, &poly("y1", 2), &VerifyOptions::default()).unwrap();
        assert!(l.is_zero() && r.is_zero());
    }

    #[test]
    fn covariance_odd_dimension_needs_radical() {
        let inv = ConformalMotion::generator("inversion", 3).unwrap();
        let off = VerifyOptions {
            radical: RadicalMode::Off,
            ..VerifyOptions::default()
        };
        assert_eq!(verify_translaw(1, &inv, Some(1), None, &off).unwrap_err(), Error::RadicalRequired);
        let r = verify_translaw(1, &inv, Some(3), None, &VerifyOptions::default()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn covariance_generators_n2() {
        for name in GENERATOR_NAMES {
            let m = ConformalMotion::generator(name, 2).unwrap();
            let r = verify_translaw(1, &m, None, None, &VerifyOptions::default()).unwrap();
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn unknown_motion_rejected() {
        assert!(ConformalMotion::parse("shear", 2).is_err());
        assert!(ConformalMotion::generator("rotation", 1).is_err());
    }
}
