//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use conflap::{run_captured, SuitePlan, EXIT_FAIL, EXIT_LIMIT, EXIT_PASS, EXIT_USAGE};
use conflap_core::exactfn::{int, rational, FnElem, Polynomial, Rational};
use conflap_core::flat::{self, ConformalMotion};
use conflap_core::numcheck::{self, SampleConfig, ShadowPlan};
use conflap_core::sphere::{self, SphereFunction, SphereOpSpec};
use conflap_core::{diffop::DiffOp, properties, CaseStatus, Report, VerifyOptions};

/// Relative tolerance of the numeric shadow.
const SHADOW_TOLERANCE: f64 = 1e-8;
/// Samples per numeric comparison.
const SHADOW_SAMPLES: usize = 20;
/// Random instances per property suite.
const PROPERTY_INSTANCES: usize = 200;
const SEED: u64 = 42;
/// Per-case runtime budget for the flat product identity, in seconds.
const RN_CASE_BUDGET_SECS: f64 = 60.0;

type Outcome = Result<String, String>;

fn require(report: &Report) -> Result<(), String> {
    match report.first_problem() {
        None => Ok(()),
        Some(c) => Err(format!("{} [{}] {}", c.id, c.status.as_str(), c.witness.clone().unwrap_or_default())),
    }
}

fn has_passing(report: &Report, id: &str) -> Result<(), String> {
    match report.cases.iter().find(|c| c.id == id) {
        Some(c) if c.status == CaseStatus::Pass => Ok(()),
        Some(c) => Err(format!("{id} is {}", c.status.as_str())),
        None => Err(format!("{id} missing")),
    }
}

fn err(e: conflap_core::Error) -> String {
    e.to_string()
}

fn product_identity() -> Outcome {
    let opts = VerifyOptions::default();
    let mut slowest = 0.0f64;
    for n in 1..=4 {
        for k in 1..=4 {
            let t = Instant::now();
            require(&flat::verify_rn(n, k, &opts).map_err(err)?)?;
            let secs = t.elapsed().as_secs_f64();
            if secs > RN_CASE_BUDGET_SECS {
                return Err(format!("n={n} k={k} took {secs:.1}s"));
            }
            slowest = slowest.max(secs);
        }
        let (lhs, rhs) = flat::build_rn_sides(n, 1, opts.term_cap).map_err(err)?;
        if lhs != DiffOp::laplacian(n) || rhs != DiffOp::laplacian(n) {
            return Err(format!("k=1 sides differ from the Laplacian at n={n}"));
        }
    }
    Ok(format!("16 (n,k) pairs, slowest {slowest:.2}s"))
}

fn commutators() -> Outcome {
    let mut cases = 0;
    for n in 1..=4 {
        let r = flat::verify_commutators(n, -3..=3, 5, &VerifyOptions::default()).map_err(err)?;
        require(&r)?;
        for w in -3..=3 {
            has_passing(&r, &format!("comm.n{n}.laplacian-weight-forms.w{w}"))?;
        }
        has_passing(&r, &format!("comm.n{n}.power-weight-coincidence"))?;
        has_passing(&r, &format!("comm.n{n}.power-weight-coincidence-value"))?;
        cases += r.cases.len();
    }
    Ok(format!("{cases} operator identities"))
}

fn covariance() -> Outcome {
    let opts = VerifyOptions::default();
    let mut runs = 0;
    for n in 2..=4 {
        let family = ConformalMotion::test_family(n);
        if family.len() != 20 {
            return Err(format!("expected 20 motions at n={n}, got {}", family.len()));
        }
        for k in 1..=2 {
            for m in &family {
                let r = flat::verify_translaw(k, m, None, None, &opts).map_err(err)?;
                require(&r)?;
                if n % 2 == 1 && m.name() == "inversion" && r.params["radical"] != "on" {
                    return Err(format!("odd inversion at n={n} ran without the radical"));
                }
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} motion/order runs, monomials of degree <= 2k+2"))
}

fn conformality() -> Outcome {
    for n in 1..=4 {
        let r = sphere::verify_conformality(n).map_err(err)?;
        require(&r)?;
        has_passing(&r, &format!("conformality.n{n}.gram"))?;
        has_passing(&r, &format!("conformality.n{n}.conformal-factor"))?;
    }
    Ok("n = 1..4".into())
}

fn yamabe() -> Outcome {
    let opts = VerifyOptions::default();
    for (n, radical) in [(2, "off"), (4, "off"), (3, "on")] {
        let r = sphere::verify_yamabe(n, 3, None, &opts).map_err(err)?;
        require(&r)?;
        if r.params["radical"] != radical {
            return Err(format!("n={n} ran with radical {}", r.params["radical"]));
        }
    }
    let r2 = sphere::verify_yamabe(2, 3, None, &opts).map_err(err)?;
    has_passing(&r2, "yamabe.n2.harmonic-witness")?;
    let r4 = sphere::verify_yamabe(4, 3, None, &opts).map_err(err)?;
    has_passing(&r4, "yamabe.n4.constant-witness")?;

    // Independent witnesses, built by hand.
    let x1_over = &FnElem::from(Polynomial::var(3, 0)) * &FnElem::from(&Polynomial::one(3) + &Polynomial::var(3, 2)).powi(-1).map_err(err)?;
    let harmonic = sphere::sphere_laplacian(&SphereFunction::new(x1_over).map_err(err)?).map_err(err)?;
    if !harmonic.is_zero() {
        return Err(format!("Delta_S(x1/(1+x3)) = {harmonic}"));
    }
    let inv = FnElem::from(&Polynomial::one(5) + &Polynomial::var(5, 4)).powi(-1).map_err(err)?;
    let u = SphereFunction::new(inv).map_err(err)?;
    let shifted = (&sphere::sphere_laplacian(&u).map_err(err)? - &u.scale(&int(2))).reduce().map_err(err)?;
    if !shifted.is_zero() {
        return Err(format!("(Delta_S - 2)(1+x5)^-1 = {shifted}"));
    }
    Ok("n = 2, 4 rational; n = 3 radical; both witnesses vanish".into())
}

fn main_identity() -> Outcome {
    let opts = VerifyOptions::default();
    for (n, k) in [(2, 1), (2, 2), (2, 3), (4, 1), (4, 2), (3, 1), (3, 2)] {
        let r = sphere::verify_main(n, k, None, None, &opts).map_err(err)?;
        require(&r)?;
        if r.params["max_degree"] != (2 * k + 1).to_string() {
            return Err(format!("degree {} at n={n} k={k}", r.params["max_degree"]));
        }
    }
    // (n, k) = (2, 1) on the Yamabe family
    let family = flat::monomial_family(2, 3);
    for f in &family {
        let (a, b) = sphere::main_sides(2, 1, f, &opts).map_err(err)?;
        if a != b {
            return Err(format!("k=1 mismatch on {}", f.fmt_with('y')));
        }
    }
    Ok("7 (n,k) pairs, monomials of degree <= 2k+1".into())
}

/// `c_j = (n/2 + j - 1)(n/2 - j)` evaluated by hand.
fn constants_oracle(n: i64, k: i64) -> Vec<Rational> {
    (1..=k).map(|j| rational(n + 2 * j - 2, 2) * rational(n - 2 * j, 2)).collect()
}

fn spectrum() -> Outcome {
    if sphere::c_constants(4, 3) != vec![int(2), int(0), int(-4)] {
        return Err(format!("c-table at n=4: {:?}", sphere::c_constants(4, 3)));
    }
    for n in 1..=6 {
        for k in 1..=4 {
            if sphere::c_constants(n, k) != constants_oracle(n as i64, k as i64) {
                return Err(format!("c-table mismatch at n={n} k={k}"));
            }
        }
    }
    for n in 2..=4 {
        for k in 1..=2 {
            let r = sphere::verify_spectrum(n, k, 4).map_err(err)?;
            require(&r)?;
            for l in 0..=4 {
                has_passing(&r, &format!("spectrum.n{n}.k{k}.l{l}"))?;
            }
        }
    }
    if SphereOpSpec::new(2, 2).map_err(err)?.eigenvalue(1) != int(0) || SphereOpSpec::new(4, 2).map_err(err)?.eigenvalue(0) != int(0) {
        return Err("expected zero eigenvalues are nonzero".into());
    }
    // direct application: x1 on S^2 and 1 on S^4 are annihilated
    let x1 = SphereFunction::new(FnElem::var(3, 0)).map_err(err)?;
    let one = SphereFunction::new(FnElem::one(5)).map_err(err)?;
    if !sphere::sphere_power_apply(&SphereOpSpec::new(2, 2).map_err(err)?, &x1).map_err(err)?.is_zero()
        || !sphere::sphere_power_apply(&SphereOpSpec::new(4, 2).map_err(err)?, &one).map_err(err)?.is_zero()
    {
        return Err("kernel elements not annihilated".into());
    }
    Ok("n = 2..4, k <= 2, l <= 4; c = (2, 0, -4) at n = 4".into())
}

fn property_suites() -> Outcome {
    let r = properties::run_all(SEED, PROPERTY_INSTANCES);
    require(&r)?;
    if r.cases.len() != 7 {
        return Err(format!("{} suites", r.cases.len()));
    }
    Ok(format!("7 suites x {PROPERTY_INSTANCES} instances"))
}

fn numeric_shadow() -> Outcome {
    let cfg = SampleConfig {
        samples: SHADOW_SAMPLES,
        tolerance: SHADOW_TOLERANCE,
        seed: SEED,
        ..SampleConfig::default()
    };
    let plan = SuitePlan::acceptance(4, 3).map_err(err)?;
    let r = numcheck::shadow_suite(&ShadowPlan::from(&plan), &cfg, &VerifyOptions::default()).map_err(err)?;
    require(&r)?;
    has_passing(&r, "numcheck.fd-suite")?;
    Ok(format!("{} shadow cases at tol {SHADOW_TOLERANCE:e}", r.cases.len()))
}

fn cli_contract() -> Outcome {
    for (name, args, code) in common::GOLDEN {
        let out = common::check_golden(name, args, *code)?;
        if name.ends_with(".json") {
            let report: Report = serde_json::from_str(&out.stdout).map_err(|e| format!("{name}: {e}"))?;
            if serde_json::to_string_pretty(&report).map_err(|e| e.to_string())? + "\n" != out.stdout {
                return Err(format!("{name}: JSON does not round-trip"));
            }
            if report.passed() != (out.code == EXIT_PASS) {
                return Err(format!("{name}: exit {} with status {}", out.code, report.overall.as_str()));
            }
        }
    }
    let codes = [
        (run_captured(&["verify", "rn", "--n", "2", "--k", "3", "--format", "json"]).code, EXIT_PASS),
        (run_captured(&["verify", "comm", "--n", "9", "--w-range", "-3..3", "--inject-bug"]).code, EXIT_FAIL),
        (run_captured(&["verify", "main", "--k", "0"]).code, EXIT_USAGE),
        (run_captured(&["verify", "rn", "--n", "4", "--k", "4", "--term-cap", "10"]).code, EXIT_LIMIT),
    ];
    for (got, want) in codes {
        if got != want {
            return Err(format!("exit code {got}, expected {want}"));
        }
    }
    let args = ["all", "--n-max", "2", "--k-max", "1", "--instances", "10", "--samples", "3", "--format", "json"];
    let (a, b) = (run_captured(&args), run_captured(&args));
    if a.stdout != b.stdout || a.code != EXIT_PASS {
        return Err("all is not deterministic".into());
    }
    Ok(format!("{} golden files, exit codes 0/1/2/3", common::GOLDEN.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("flat product identity", product_identity),
        ("commutator identities", commutators),
        ("conformal covariance", covariance),
        ("stereographic conformality", conformality),
        ("conformal Laplacian intertwining", yamabe),
        ("sphere operator intertwining", main_identity),
        ("spectrum oracle", spectrum),
        ("property suites", property_suites),
        ("numeric shadow", numeric_shadow),
        ("CLI contract", cli_contract),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
