use conflap_core::exactfn::FnElem;
use conflap_core::flat::{translaw_sides, ConformalMotion};
use conflap_core::numcheck::*;
use conflap_core::VerifyOptions;

#[test]
fn fd_suite_full_size() {
    let c = fd_suite(DEFAULT_SEED, 100, 5);
    assert_eq!(c.status, conflap_core::CaseStatus::Pass, "{:?}", c.witness);
}

#[test]
fn shadow_of_odd_inversion() {
    let m = ConformalMotion::generator("inversion", 3).unwrap();
    let (l, r) = translaw_sides(&m, 1, &FnElem::var(3, 0), &VerifyOptions::default()).unwrap();
    let rep = sample_compare(Side::Flat(&l), Side::Flat(&r), &SampleConfig::default()).unwrap();
    assert!(rep.passed(), "{}", rep.to_text());
}

#[test]
fn shadow_small_plan() {
    let plan = ShadowPlan {
        rn: vec![(2, 2), (3, 3)],
        comm_n: vec![2],
        w_range: -2..=2,
        comm_k_max: 3,
        covariance: vec![(2, 1)],
        conformality_n: vec![2],
        yamabe_n: vec![3],
        yamabe_degree: 2,
        main: vec![(2, 2)],
        spectrum: vec![(2, 2)],
        l_max: 3,
    };
    let r = shadow_suite(&plan, &SampleConfig::default(), &VerifyOptions::default()).unwrap();
    assert!(r.passed(), "{}", r.to_text());
    let again = shadow_suite(&plan, &SampleConfig::default(), &VerifyOptions::default()).unwrap();
    assert_eq!(r, again);
}

#[test]
fn injected_bug_is_seen_numerically() {
    let opts = VerifyOptions { inject_bug: true, ..VerifyOptions::default() };
    let m = ConformalMotion::generator("dilation", 2).unwrap();
    let (l, r) = translaw_sides(&m, 1, &FnElem::var(2, 0), &opts).unwrap();
    assert!(!sample_compare(Side::Flat(&l), Side::Flat(&r), &SampleConfig::default()).unwrap().passed());
}
