//! Floating-point shadows of the exact engine.
//!
//! Sampling uses ChaCha8 (`rand_chacha`) seeded from the configured seed
//! (default 42), so reports are reproducible. Errors are relative, with an
//! absolute fallback when both sides are below `1e-10` in magnitude.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::diffop::{DiffOp, MultiIndex};
use crate::error::{Error, Result};
use crate::exactfn::{int, FnElem, Rational, RationalFunction};
use crate::flat::{build_rn_sides, commutator_identities, monomial_family, translaw_sides, ConformalMotion};
use crate::options::VerifyOptions;
use crate::properties::{random_rational_function, rng_for};
use crate::report::{Case, Report};
use crate::sphere::{
    harmonic_basis, inverse_stereographic, main_sides, reduce_mod_sphere, sphere_power_apply, SphereFunction,
    SphereOpSpec,
};

pub const DEFAULT_SAMPLES: usize = 20;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_POLE_MARGIN: f64 = 1e-3;
pub const DEFAULT_STEP: f64 = 1e-5;
/// Magnitude below which the error is measured absolutely.
pub const ABSOLUTE_FLOOR: f64 = 1e-10;
/// Sphere samples with `1 + x_{n+1}` below this are redrawn (neighborhood of the south pole).
pub const SOUTH_POLE_EXCLUSION: f64 = 0.05;
const MAX_RETRIES_PER_SAMPLE: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct SampleConfig {
    pub samples: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Per-variable sampling interval; the last entry is reused for extra variables.
    pub domain: Vec<(Rational, Rational)>,
    pub pole_margin: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            samples: DEFAULT_SAMPLES,
            tolerance: DEFAULT_TOLERANCE,
            seed: DEFAULT_SEED,
            domain: vec![(int(-2), int(2))],
            pole_margin: DEFAULT_POLE_MARGIN,
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidArgument("sample count must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.domain.is_empty() || self.domain.iter().any(|(a, b)| a >= b) {
            return Err(Error::InvalidArgument("domain intervals must be nonempty".into()));
        }
        Ok(())
    }

    fn interval(&self, i: usize) -> (f64, f64) {
        let (a, b) = &self.domain[i.min(self.domain.len() - 1)];
        (to_f64(a), to_f64(b))
    }

    fn box_point(&self, rng: &mut ChaCha8Rng, vars: usize) -> Vec<f64> {
        (0..vars)
            .map(|i| {
                let (a, b) = self.interval(i);
                rng.gen_range(a..b)
            })
            .collect()
    }

    /// Uniform direction from the box, normalized; avoids the south pole.
    fn sphere_point(&self, rng: &mut ChaCha8Rng, vars: usize) -> Option<Vec<f64>> {
        let p = self.box_point(rng, vars);
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-3 {
            return None;
        }
        let p: Vec<f64> = p.iter().map(|v| v / norm).collect();
        (1.0 + p[vars - 1] >= SOUTH_POLE_EXCLUSION.max(self.pole_margin)).then_some(p)
    }
}

fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < ABSOLUTE_FLOOR {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

/// Largest error seen and the point where it occurred.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleStats {
    pub max_error: f64,
    pub worst_point: Vec<f64>,
    pub samples: usize,
}

fn admissible(f: &FnElem, p: &[f64], margin: f64) -> Option<f64> {
    if f.min_denominator_f64(p) < margin {
        return None;
    }
    let v = f.eval_f64(p);
    v.is_finite().then_some(v)
}

fn sample_pairs<D>(pairs: &[(FnElem, FnElem)], cfg: &SampleConfig, mut draw: D) -> Result<SampleStats>
where
    D: FnMut(&mut ChaCha8Rng) -> Option<Vec<f64>>,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut stats = SampleStats {
        max_error: 0.0,
        worst_point: Vec::new(),
        samples: 0,
    };
    for _ in 0..cfg.samples {
        let mut found = false;
        for _ in 0..MAX_RETRIES_PER_SAMPLE {
            let Some(p) = draw(&mut rng) else { continue };
            let values: Option<Vec<(f64, f64)>> = pairs
                .iter()
                .map(|(l, r)| Some((admissible(l, &p, cfg.pole_margin)?, admissible(r, &p, cfg.pole_margin)?)))
                .collect();
            let Some(values) = values else { continue };
            for (a, b) in values {
                let e = relative_error(a, b);
                if e >= stats.max_error {
                    stats.max_error = e;
                    stats.worst_point = p.clone();
                }
            }
            stats.samples += 1;
            found = true;
            break;
        }
        if !found {
            return Err(Error::NoSamples(MAX_RETRIES_PER_SAMPLE));
        }
    }
    Ok(stats)
}

/// Samples `lhs - rhs` on the configured box.
pub fn sample_flat(lhs: &FnElem, rhs: &FnElem, cfg: &SampleConfig) -> Result<SampleStats> {
    lhs.check_compatible(rhs)?;
    let vars = lhs.var_count();
    sample_pairs(&[(lhs.clone(), rhs.clone())], cfg, |rng| Some(cfg.box_point(rng, vars)))
}

/// Samples two sphere functions at points of the unit sphere away from the south pole.
pub fn sample_sphere(lhs: &SphereFunction, rhs: &SphereFunction, cfg: &SampleConfig) -> Result<SampleStats> {
    lhs.value().check_compatible(rhs.value())?;
    let vars = lhs.dim() + 1;
    sample_pairs(&[(lhs.value().clone(), rhs.value().clone())], cfg, |rng| cfg.sphere_point(rng, vars))
}

/// Samples every coefficient of two operators (missing coefficients are zero).
pub fn sample_ops(lhs: &DiffOp, rhs: &DiffOp, cfg: &SampleConfig) -> Result<SampleStats> {
    let n = lhs.var_count();
    if rhs.var_count() != n {
        return Err(Error::VarCountMismatch(n, rhs.var_count()));
    }
    let keys: BTreeSet<MultiIndex> = lhs.terms().chain(rhs.terms()).map(|(k, _)| k.clone()).collect();
    let zero = FnElem::zero(n);
    let pairs: Vec<(FnElem, FnElem)> = keys
        .iter()
        .map(|k| {
            (
                lhs.coefficient(k).unwrap_or(&zero).clone(),
                rhs.coefficient(k).unwrap_or(&zero).clone(),
            )
        })
        .collect();
    sample_pairs(&pairs, cfg, |rng| Some(cfg.box_point(rng, n)))
}

fn stats_case(id: String, description: String, stats: Result<SampleStats>, tol: f64) -> Case {
    match stats {
        Ok(s) => Case::check(
            id,
            format!("{} (max error {:.3e} over {} samples)", description, s.max_error, s.samples),
            s.max_error <= tol,
            || format!("error {:.3e} at {:?}", s.max_error, s.worst_point),
        ),
        Err(e) => Case::from_error(id, description, &e),
    }
}

pub enum Side<'a> {
    Flat(&'a FnElem),
    Sphere(&'a SphereFunction),
}

/// Numeric comparison of two sides of an identity; pass iff the max error is within tolerance.
pub fn sample_compare(lhs: Side<'_>, rhs: Side<'_>, cfg: &SampleConfig) -> Result<Report> {
    let stats = match (lhs, rhs) {
        (Side::Flat(a), Side::Flat(b)) => sample_flat(a, b, cfg)?,
        (Side::Sphere(a), Side::Sphere(b)) => sample_sphere(a, b, cfg)?,
        _ => return Err(Error::InvalidArgument("cannot compare flat and sphere functions".into())),
    };
    let mut report = Report::new("sample")
        .with_param("samples", cfg.samples)
        .with_param("tolerance", cfg.tolerance)
        .with_param("max_error", format!("{:.3e}", stats.max_error));
    report.seed = Some(cfg.seed);
    report.push(stats_case("sample".into(), "lhs = rhs at sampled points".into(), Ok(stats), cfg.tolerance));
    Ok(report)
}

/// Central difference of `f` in direction `i` against the exact partial derivative.
pub fn fd_check(f: &FnElem, i: usize, point: &[f64], h: f64) -> Result<(f64, f64)> {
    if point.len() != f.var_count() {
        return Err(Error::VarCountMismatch(f.var_count(), point.len()));
    }
    let exact = f.derivative(i)?;
    let mut plus = point.to_vec();
    let mut minus = point.to_vec();
    plus[i] += h;
    minus[i] -= h;
    let margin = 1e-9;
    let eval = |p: &[f64]| admissible(f, p, margin).ok_or(Error::Pole);
    let fd = (eval(&plus)? - eval(&minus)?) / (2.0 * h);
    eval(point)?;
    let e = exact.eval_f64(point);
    if !e.is_finite() {
        return Err(Error::Pole);
    }
    Ok((e, fd))
}

pub fn fd_within_tolerance(exact: f64, fd: f64) -> bool {
    (exact - fd).abs() <= 1e-6_f64.max(1e-6 * exact.abs())
}

pub fn fd_crosscheck(f: &FnElem, i: usize, point: &[f64], h: f64) -> Result<Report> {
    let (exact, fd) = fd_check(f, i, point, h)?;
    let mut report = Report::new("fd")
        .with_param("f", f.fmt_with('y'))
        .with_param("i", i + 1)
        .with_param("h", h);
    report.push(Case::check(
        "fd",
        format!("d_{} f: exact {:.10e}, difference quotient {:.10e}", i + 1, exact, fd),
        fd_within_tolerance(exact, fd),
        || format!("|exact - fd| = {:.3e}", (exact - fd).abs()),
    ));
    Ok(report)
}

/// Finite-difference check of `functions` random rational functions (degree <= 3,
/// n <= 3) at `points` random points each.
pub fn fd_suite(seed: u64, functions: usize, points: usize) -> Case {
    let id = "numcheck.fd-suite";
    let desc = format!("{} random rational functions x {} points", functions, points);
    let mut rng = rng_for(seed, 101);
    for fi in 0..functions {
        let n = rng.gen_range(1..=3);
        let f = FnElem::Rat(random_rational_function(&mut rng, n, 3)).normalize();
        let mut done = 0;
        let mut attempts = 0;
        while done < points {
            attempts += 1;
            if attempts > MAX_RETRIES_PER_SAMPLE {
                return Case::fail(id, desc, format!("function {}: no admissible points for {}", fi, f.fmt_with('y')));
            }
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            if f.min_denominator_f64(&p) < 0.1 {
                continue;
            }
            let i = rng.gen_range(0..n);
            match fd_check(&f, i, &p, DEFAULT_STEP) {
                Ok((e, d)) if fd_within_tolerance(e, d) => done += 1,
                Ok((e, d)) => {
                    return Case::fail(
                        id,
                        desc,
                        format!("f = {}, i = {}, point {:?}: exact {:e}, fd {:e}", f.fmt_with('y'), i + 1, p, e, d),
                    )
                }
                Err(Error::Pole) => continue,
                Err(e) => return Case::from_error(id, desc, &e),
            }
        }
    }
    Case::pass(id, desc)
}

/// Ranges covered by the numeric shadow of the exact verifiers.
#[derive(Clone, Debug)]
pub struct ShadowPlan {
    pub rn: Vec<(usize, usize)>,
    pub comm_n: Vec<usize>,
    pub w_range: RangeInclusive<i32>,
    pub comm_k_max: usize,
    pub covariance: Vec<(usize, usize)>,
    pub conformality_n: Vec<usize>,
    pub yamabe_n: Vec<usize>,
    pub yamabe_degree: u32,
    pub main: Vec<(usize, usize)>,
    pub spectrum: Vec<(usize, usize)>,
    pub l_max: usize,
}

fn shadow_family<F>(id: String, desc: String, family: &[FnElem], cfg: &SampleConfig, sides: F) -> Case
where
    F: Fn(&FnElem) -> Result<SampleStats> + Sync,
{
    let all: Vec<Result<SampleStats>> = family.par_iter().map(&sides).collect();
    let mut worst: Option<SampleStats> = None;
    let mut samples = 0;
    for s in all {
        match s {
            Err(e) => return Case::from_error(id, desc, &e),
            Ok(s) => {
                samples += s.samples;
                if worst.as_ref().map_or(true, |w| s.max_error > w.max_error) {
                    worst = Some(s);
                }
            }
        }
    }
    let mut w = worst.unwrap_or(SampleStats {
        max_error: 0.0,
        worst_point: Vec::new(),
        samples: 0,
    });
    w.samples = samples;
    stats_case(id, desc, Ok(w), cfg.tolerance)
}

fn shadow_ops(id: String, desc: String, sides: Result<(DiffOp, DiffOp)>, cfg: &SampleConfig) -> Case {
    stats_case(id, desc, sides.and_then(|(l, r)| sample_ops(&l, &r, cfg)), cfg.tolerance)
}

pub fn shadow_rn(n: usize, k: usize, cfg: &SampleConfig, opts: &VerifyOptions) -> Case {
    shadow_ops(
        format!("shadow.rn.n{}.k{}", n, k),
        "product identity coefficients".into(),
        build_rn_sides(n, k, opts.term_cap),
        cfg,
    )
}

pub fn shadow_commutators(n: usize, w_range: RangeInclusive<i32>, k_max: usize, cfg: &SampleConfig, opts: &VerifyOptions) -> Vec<Case> {
    match commutator_identities(n, w_range, k_max, opts.term_cap) {
        Ok(ids) => ids
            .into_par_iter()
            .map(|i| shadow_ops(format!("shadow.{}", i.id), i.description, i.sides, cfg))
            .collect(),
        Err(e) => vec![Case::from_error(format!("shadow.comm.n{}", n), "commutator identities", &e)],
    }
}

pub fn shadow_covariance(n: usize, k: usize, motion: &ConformalMotion, cfg: &SampleConfig, opts: &VerifyOptions) -> Case {
    let family = monomial_family(n, crate::flat::default_translaw_degree(k));
    shadow_family(
        format!("shadow.covariance.n{}.{}.k{}", n, motion.name(), k),
        format!("covariance of D^{} on {} monomials", k, family.len()),
        &family,
        cfg,
        |f| {
            let (l, r) = translaw_sides(motion, k, f, opts)?;
            sample_flat(&l, &r, cfg)
        },
    )
}

pub fn shadow_conformality(n: usize, cfg: &SampleConfig) -> Case {
    let sigma = inverse_stereographic(n);
    let factor = crate::diffop::m_weight_function(n, 1).to_rational_function().expect("rational");
    let factor_sq = &factor * &factor;
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a..n {
            let gram = RationalFunction::sum_all(
                n,
                sigma.iter().map(|c| &c.derivative(a) * &c.derivative(b)).collect(),
            );
            let expected = if a == b { factor_sq.clone() } else { RationalFunction::zero(n) };
            pairs.push((FnElem::Rat(gram), FnElem::Rat(expected)));
        }
    }
    let stats = sample_pairs(&pairs, cfg, |rng| Some(cfg.box_point(rng, n)));
    stats_case(format!("shadow.conformality.n{}", n), "Gram matrix of sigma".into(), stats, cfg.tolerance)
}

pub fn shadow_main(n: usize, k: usize, max_degree: u32, cfg: &SampleConfig, opts: &VerifyOptions) -> Case {
    let family = monomial_family(n, max_degree);
    shadow_family(
        format!("shadow.main.n{}.k{}.d{}", n, k, max_degree),
        format!("sphere intertwining of order {} on {} monomials", k, family.len()),
        &family,
        cfg,
        |f| {
            let (l, r) = main_sides(n, k, f, opts)?;
            sample_sphere(&l, &r, cfg)
        },
    )
}

pub fn shadow_spectrum(n: usize, k: usize, l_max: usize, cfg: &SampleConfig) -> Case {
    let id = format!("shadow.spectrum.n{}.k{}", n, k);
    let spec = match SphereOpSpec::new(n, k) {
        Ok(s) => s,
        Err(e) => return Case::from_error(id, "spectrum", &e),
    };
    let mut family = Vec::new();
    for l in 0..=l_max {
        for h in harmonic_basis(n, l) {
            family.push((l, FnElem::from(h)));
        }
    }
    let results: Vec<Result<SampleStats>> = family
        .par_iter()
        .map(|(l, h)| {
            let u = reduce_mod_sphere(h)?;
            let v = sphere_power_apply(&spec, &u)?;
            sample_sphere(&v, &u.scale(&spec.eigenvalue(*l)), cfg)
        })
        .collect();
    let mut worst = SampleStats {
        max_error: 0.0,
        worst_point: Vec::new(),
        samples: 0,
    };
    let mut samples = 0;
    for r in results {
        match r {
            Ok(s) => {
                samples += s.samples;
                if s.max_error >= worst.max_error {
                    worst = s;
                }
            }
            Err(e) => return Case::from_error(id, "spectrum", &e),
        }
    }
    worst.samples = samples;
    stats_case(id, format!("eigenvalues on {} harmonics", family.len()), Ok(worst), cfg.tolerance)
}

/// Shadows every exact verifier over `plan`, plus the finite-difference suite.
pub fn shadow_suite(plan: &ShadowPlan, cfg: &SampleConfig, opts: &VerifyOptions) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new("numcheck")
        .with_param("samples", cfg.samples)
        .with_param("tolerance", cfg.tolerance);
    report.seed = Some(cfg.seed);
    for &(n, k) in &plan.rn {
        report.push(shadow_rn(n, k, cfg, opts));
    }
    for &n in &plan.comm_n {
        report.extend(shadow_commutators(n, plan.w_range.clone(), plan.comm_k_max, cfg, opts));
    }
    for &(n, k) in &plan.covariance {
        let family = ConformalMotion::test_family(n);
        let cases: Vec<Case> = family.par_iter().map(|m| shadow_covariance(n, k, m, cfg, opts)).collect();
        report.extend(cases);
    }
    for &n in &plan.conformality_n {
        report.push(shadow_conformality(n, cfg));
    }
    for &n in &plan.yamabe_n {
        report.push(shadow_main(n, 1, plan.yamabe_degree, cfg, opts));
    }
    for &(n, k) in &plan.main {
        report.push(shadow_main(n, k, crate::sphere::default_main_degree(k), cfg, opts));
    }
    for &(n, k) in &plan.spectrum {
        report.push(shadow_spectrum(n, k, plan.l_max, cfg));
    }
    report.push(fd_suite(cfg.seed, 100, 5));
    Ok(report.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfn::{parse_polynomial, Polynomial, RadicalBase, RadicalElement};

    fn poly(s: &str, n: usize) -> FnElem {
        FnElem::from(parse_polynomial(s, n).unwrap())
    }

    #[test]
    fn identical_sides_have_zero_error() {
        let f = poly("y1^2*y2 - 3*y2", 2);
        let s = sample_flat(&f, &f, &SampleConfig::default()).unwrap();
        assert_eq!(s.max_error, 0.0);
        assert_eq!(s.samples, DEFAULT_SAMPLES);
    }

    #[test]
    fn planted_discrepancy_fails() {
        let f = poly("y1", 1);
        let g = &f + &FnElem::constant(crate::exactfn::rational(1, 1000), 1);
        let r = sample_compare(Side::Flat(&f), Side::Flat(&g), &SampleConfig::default()).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn sampling_is_reproducible() {
        let f = poly("y1^3 - y2", 2);
        let g = poly("y1^3 - y2 + 1/100000000000", 2);
        let cfg = SampleConfig::default();
        assert_eq!(sample_flat(&f, &g, &cfg).unwrap(), sample_flat(&f, &g, &cfg).unwrap());
    }

    #[test]
    fn relative_error_floor() {
        assert_eq!(relative_error(0.0, 1e-12), 1e-12);
        assert!((relative_error(1.0, 1.0 + 1e-9) - 1e-9).abs() < 1e-15);
    }

    #[test]
    fn fd_examples() {
        let sq = poly("y1^2", 1);
        let (e, d) = fd_check(&sq, 0, &[1.0], 1e-5).unwrap();
        assert_eq!(e, 2.0);
        assert!(fd_within_tolerance(e, d));

        let q = FnElem::Rat(RationalFunction::new(Polynomial::one(1), parse_polynomial("1 + y1^2", 1).unwrap()).unwrap());
        let (e, d) = fd_check(&q, 0, &[1.0], 1e-5).unwrap();
        assert!((e + 0.5).abs() < 1e-15);
        assert!(fd_within_tolerance(e, d));

        let base = RadicalBase::new(parse_polynomial("1 + x3", 3).unwrap()).unwrap();
        let s = FnElem::Rad(RadicalElement::sqrt(base));
        let r = fd_crosscheck(&s, 2, &[0.0, 0.0, 0.0], 1e-5).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        let (e, _) = fd_check(&s, 2, &[0.0, 0.0, 0.0], 1e-5).unwrap();
        assert!((e - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fd_pole_in_stencil() {
        let f = FnElem::Rat(RationalFunction::new(Polynomial::one(1), Polynomial::var(1, 0)).unwrap());
        assert_eq!(fd_check(&f, 0, &[0.0], 1e-5).unwrap_err(), Error::Pole);
    }

    #[test]
    fn fd_suite_small() {
        let c = fd_suite(DEFAULT_SEED, 20, 5);
        assert_eq!(c.status, crate::CaseStatus::Pass, "{:?}", c.witness);
    }

    #[test]
    fn shadow_of_sphere_identity() {
        let opts = VerifyOptions::default();
        let f = FnElem::var(3, 0);
        let (l, r) = main_sides(3, 1, &f, &opts).unwrap();
        let r = sample_compare(Side::Sphere(&l), Side::Sphere(&r), &SampleConfig::default()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn shadow_ops_detects_difference() {
        let cfg = SampleConfig::default();
        let s = sample_ops(&DiffOp::laplacian(2), &DiffOp::euler(2), &cfg).unwrap();
        assert!(s.max_error > 0.5);
        let c = shadow_rn(2, 2, &cfg, &VerifyOptions::default());
        assert_eq!(c.status, crate::CaseStatus::Pass, "{:?}", c.witness);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = SampleConfig {
            samples: 0,
            ..SampleConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
