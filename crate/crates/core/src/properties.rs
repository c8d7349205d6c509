//! Seeded randomized property suites for the algebraic core, and the random
//! generators they share with the numeric layer.
//!
//! Every suite draws its instances from a ChaCha8 stream seeded with the
//! suite seed mixed with a per-suite salt, so runs are reproducible.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diffop::{DiffOp, MultiIndex};
use crate::error::Result;
use crate::exactfn::{monomials_up_to, rational, FnElem, Polynomial, Rational, RationalFunction};
use crate::report::{Case, Report};
use crate::sphere::{reduce_mod_sphere, reduce_polynomial, sphere_laplacian, SphereFunction};

pub const DEFAULT_INSTANCES: usize = 200;
pub const DEFAULT_SEED: u64 = 42;

pub fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num = loop {
        let v = rng.gen_range(-5i64..=5);
        if v != 0 {
            break v;
        }
    };
    let den = if rng.gen_bool(0.25) { rng.gen_range(2i64..=4) } else { 1 };
    rational(num, den)
}

/// Up to `max_terms` random monomials of degree at most `max_degree`.
pub fn random_polynomial(rng: &mut ChaCha8Rng, n: usize, max_degree: u32, max_terms: usize) -> Polynomial {
    let monomials = monomials_up_to(n, max_degree);
    let count = rng.gen_range(1..=max_terms);
    let mut p = Polynomial::zero(n);
    for _ in 0..count {
        let m = monomials[rng.gen_range(0..monomials.len())].clone();
        p.add_term(m, random_rational(rng));
    }
    p
}

/// `p / q` with `q` a random nonzero polynomial.
pub fn random_rational_function(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> RationalFunction {
    let num = random_polynomial(rng, n, max_degree, 4);
    let den = loop {
        let q = random_polynomial(rng, n, max_degree, 3);
        if !q.is_zero() {
            break q;
        }
    };
    RationalFunction::new(num, den).expect("nonzero denominator")
}

/// A random element: polynomial or rational function, half the time each.
pub fn random_elem(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> FnElem {
    if rng.gen_bool(0.5) {
        FnElem::from(random_polynomial(rng, n, max_degree, 5))
    } else {
        FnElem::Rat(random_rational_function(rng, n, max_degree)).normalize()
    }
}

/// Random operator of order `<= max_order` with polynomial coefficients.
pub fn random_diffop(rng: &mut ChaCha8Rng, n: usize, max_order: u32, coeff_degree: u32) -> DiffOp {
    let indices = monomials_up_to(n, max_order);
    let count = rng.gen_range(1..=3);
    let mut ops = Vec::with_capacity(count);
    for _ in 0..count {
        let alpha = MultiIndex::new(indices[rng.gen_range(0..indices.len())].exponents().to_vec());
        let coeff = FnElem::from(random_polynomial(rng, n, coeff_degree, 2));
        let mut d = DiffOp::identity(n);
        for (i, &a) in alpha.as_slice().iter().enumerate() {
            for _ in 0..a {
                d = DiffOp::partial(n, i).compose(&d).expect("shared context");
            }
        }
        ops.push(d.left_mult(&coeff).expect("shared context"));
    }
    let ones = vec![Rational::from_integer(1.into()); ops.len()];
    DiffOp::linear_combine(&ones, &ops).expect("shared context")
}

/// Runs `instances` trials; the first failure (or error) becomes the witness.
fn run_suite<F>(id: &str, description: &str, seed: u64, salt: u64, instances: usize, mut trial: F) -> Case
where
    F: FnMut(&mut ChaCha8Rng) -> Result<Option<String>>,
{
    let mut rng = rng_for(seed, salt);
    for i in 0..instances {
        match trial(&mut rng) {
            Ok(None) => {}
            Ok(Some(w)) => return Case::fail(id, description, format!("instance {}: {}", i, w)),
            Err(e) => return Case::fail(id, description, format!("instance {}: error {}", i, e)),
        }
    }
    Case::pass(id, format!("{} ({} instances)", description, instances))
}

pub fn leibniz(seed: u64, instances: usize) -> Case {
    run_suite("property.leibniz", "d_i(fg) = (d_i f) g + f d_i g", seed, 1, instances, |rng| {
        let n = rng.gen_range(1..=3);
        let f = random_elem(rng, n, 4);
        let g = random_elem(rng, n, 4);
        let i = rng.gen_range(0..n);
        let lhs = (&f * &g).derivative(i)?;
        let rhs = &(&f.derivative(i)? * &g) + &(&f * &g.derivative(i)?);
        Ok((lhs != rhs).then(|| format!("f = {}, g = {}, i = {}", f.fmt_with('y'), g.fmt_with('y'), i + 1)))
    })
}

pub fn commuting_partials(seed: u64, instances: usize) -> Case {
    run_suite("property.commuting-partials", "d_i d_j f = d_j d_i f", seed, 2, instances, |rng| {
        let n = rng.gen_range(1..=3);
        let f = random_elem(rng, n, 4);
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let a = f.derivative(i)?.derivative(j)?;
        let b = f.derivative(j)?.derivative(i)?;
        Ok((a != b).then(|| format!("f = {}, i = {}, j = {}", f.fmt_with('y'), i + 1, j + 1)))
    })
}

pub fn compose_associativity(seed: u64, instances: usize) -> Case {
    run_suite("property.compose-associativity", "P(QR) = (PQ)R", seed, 3, instances, |rng| {
        let n = rng.gen_range(1..=3);
        let p = random_diffop(rng, n, 2, 2);
        let q = random_diffop(rng, n, 2, 2);
        let r = random_diffop(rng, n, 2, 2);
        let left = p.compose(&q.compose(&r)?)?;
        let right = p.compose(&q)?.compose(&r)?;
        Ok((left != right).then(|| format!("P = {}, Q = {}, R = {}", p, q, r)))
    })
}

pub fn apply_homomorphism(seed: u64, instances: usize) -> Case {
    run_suite("property.apply-homomorphism", "apply(PQ, f) = apply(P, apply(Q, f))", seed, 4, instances, |rng| {
        let n = rng.gen_range(1..=3);
        let p = random_diffop(rng, n, 2, 2);
        let q = random_diffop(rng, n, 2, 2);
        let f = FnElem::from(random_polynomial(rng, n, 4, 5));
        let a = p.compose(&q)?.apply(&f)?;
        let b = p.apply(&q.apply(&f)?)?;
        Ok((a != b).then(|| format!("P = {}, Q = {}, f = {}", p, q, f.fmt_with('y'))))
    })
}

pub fn commutator_laws(seed: u64, instances: usize) -> Case {
    run_suite(
        "property.commutator-laws",
        "[P,Q] = -[Q,P] and [P,[Q,R]] + [Q,[R,P]] + [R,[P,Q]] = 0",
        seed,
        5,
        instances,
        |rng| {
            let n = rng.gen_range(1..=3);
            let p = random_diffop(rng, n, 2, 2);
            let q = random_diffop(rng, n, 2, 2);
            let r = random_diffop(rng, n, 2, 2);
            let pq = p.commutator(&q)?;
            if pq != q.commutator(&p)?.scale(&rational(-1, 1)) {
                return Ok(Some(format!("antisymmetry: P = {}, Q = {}", p, q)));
            }
            let jacobi = &(&p.commutator(&q.commutator(&r)?)? + &q.commutator(&r.commutator(&p)?)?)
                + &r.commutator(&pq)?;
            Ok((!jacobi.is_zero()).then(|| format!("Jacobi: P = {}, Q = {}, R = {}", p, q, r)))
        },
    )
}

/// A random function on the sphere whose denominator does not vanish there.
fn random_sphere_elem(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> FnElem {
    loop {
        let f = random_elem(rng, n + 1, max_degree);
        if reduce_mod_sphere(&f).is_ok() {
            return f;
        }
    }
}

pub fn reduce_idempotence(seed: u64, instances: usize) -> Case {
    run_suite(
        "property.reduce-idempotence",
        "reduce(reduce F) = reduce F, and reduce is multiplicative",
        seed,
        6,
        instances,
        |rng| {
            let n = rng.gen_range(1..=3);
            let f = random_sphere_elem(rng, n, 4);
            let once = reduce_mod_sphere(&f)?;
            let twice = once.reduce()?;
            if format!("{:?}", once.value()) != format!("{:?}", twice.value()) {
                return Ok(Some(format!("not idempotent on {}", f.fmt_with('x'))));
            }
            let p = random_polynomial(rng, n + 1, 4, 4);
            let q = random_polynomial(rng, n + 1, 4, 4);
            let direct = reduce_polynomial(&(&p * &q));
            let staged = reduce_polynomial(&(&reduce_polynomial(&p) * &reduce_polynomial(&q)));
            Ok((direct != staged).then(|| format!("not multiplicative on {} and {}", p.fmt_with('x'), q.fmt_with('x'))))
        },
    )
}

pub fn extension_independence(seed: u64, instances: usize) -> Case {
    run_suite(
        "property.extension-independence",
        "Delta_S(F + (|x|^2 - 1) G) = Delta_S F",
        seed,
        7,
        instances,
        |rng| {
            let n = rng.gen_range(1..=3);
            let vars = n + 1;
            let f = random_sphere_elem(rng, n, 3);
            let g = FnElem::from(random_polynomial(rng, vars, 3, 3));
            let rel = FnElem::from(&Polynomial::sum_of_squares(vars, vars) - &Polynomial::one(vars));
            let shifted = SphereFunction::new(&f + &(&rel * &g))?;
            let plain = SphereFunction::new(f.clone())?;
            let a = sphere_laplacian(&shifted)?;
            let b = sphere_laplacian(&plain)?;
            Ok((a != b).then(|| format!("F = {}, G = {}", f.fmt_with('x'), g.fmt_with('x'))))
        },
    )
}

/// All property suites, one case each.
pub fn run_all(seed: u64, instances: usize) -> Report {
    let mut report = Report::new("properties")
        .with_param("instances", instances)
        .with_param("seed", seed);
    report.seed = Some(seed);
    let suites: [fn(u64, usize) -> Case; 7] = [
        leibniz,
        commuting_partials,
        compose_associativity,
        apply_homomorphism,
        commutator_laws,
        reduce_idempotence,
        extension_independence,
    ];
    let cases: Vec<Case> = {
        use rayon::prelude::*;
        suites.par_iter().map(|s| s(seed, instances)).collect()
    };
    report.extend(cases);
    report.finalize()
}
