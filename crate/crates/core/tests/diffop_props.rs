use conflap_core::diffop::{make_generator, DiffOp, Generator};
use conflap_core::exactfn::{int, parse_polynomial, rational, FnElem};
use conflap_core::properties::{random_diffop, random_polynomial, rng_for};
use proptest::prelude::*;

fn ops(seed: u64, count: usize) -> (usize, Vec<DiffOp>, FnElem) {
    let mut rng = rng_for(seed, 17);
    let n = 1 + (seed % 3) as usize;
    let v = (0..count).map(|_| random_diffop(&mut rng, n, 2, 2)).collect();
    let f = FnElem::from(random_polynomial(&mut rng, n, 4, 5));
    (n, v, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn composition_is_a_homomorphism(seed in any::<u64>()) {
        let (_, v, f) = ops(seed, 2);
        prop_assert_eq!(v[0].compose(&v[1]).unwrap().apply(&f).unwrap(), v[0].apply(&v[1].apply(&f).unwrap()).unwrap());
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let (_, v, _) = ops(seed, 3);
        let a = v[0].compose(&v[1].compose(&v[2]).unwrap()).unwrap();
        let b = v[0].compose(&v[1]).unwrap().compose(&v[2]).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn commutator_is_bilinear_antisymmetric_and_jacobi(seed in any::<u64>(), c in -3i64..=3) {
        let (_, v, _) = ops(seed, 3);
        let (p, q, r) = (&v[0], &v[1], &v[2]);
        prop_assert_eq!(p.commutator(q).unwrap(), q.commutator(p).unwrap().scale(&int(-1)));
        let combo = &p.scale(&int(c)) + r;
        let lhs = combo.commutator(q).unwrap();
        let rhs = &p.commutator(q).unwrap().scale(&int(c)) + &r.commutator(q).unwrap();
        prop_assert_eq!(lhs, rhs);
        let jac = &(&p.commutator(&q.commutator(r).unwrap()).unwrap() + &q.commutator(&r.commutator(p).unwrap()).unwrap())
            + &r.commutator(&p.commutator(q).unwrap()).unwrap();
        prop_assert!(jac.is_zero());
    }

    #[test]
    fn laplacian_powers_are_coherent(seed in any::<u64>(), k in 1u32..=3) {
        let (n, _, f) = ops(seed, 0);
        let lap = DiffOp::laplacian(n);
        let power = lap.power(k, 1_000_000).unwrap();
        prop_assert_eq!(lap.compose(&lap.power(k - 1, 1_000_000).unwrap()).unwrap(), power.clone());
        let mut g = f.clone();
        for _ in 0..k { g = lap.apply(&g).unwrap(); }
        prop_assert_eq!(power.apply(&f).unwrap(), g);
    }
}

#[test]
fn spec_examples() {
    let p = |s: &str, n| FnElem::from(parse_polynomial(s, n).unwrap());
    assert_eq!(DiffOp::euler(2).apply(&p("y1*y2", 2)).unwrap(), p("2*y1*y2", 2));
    assert_eq!(DiffOp::laplacian(3).apply(&p("y1^2 + y2^2 + y3^2", 3)).unwrap(), p("6", 3));
    assert_eq!(DiffOp::laplacian(2).apply(&p("y1^2 + y2^2", 2)).unwrap(), p("4", 2));

    // M_{-2}, n = 1: (1 + y1^2)^2 / 4
    let m = make_generator(Generator::MWeight(int(-2)), 1).unwrap();
    assert_eq!(m.apply(&FnElem::one(1)).unwrap(), p("1/4 + 1/2*y1^2 + 1/4*y1^4", 1));
    assert!(make_generator(Generator::MWeight(rational(1, 2)), 1).is_err());
    assert!(make_generator(Generator::Laplacian, 0).is_err());

    // d1 o y1 = y1 d1 + 1
    let d1 = DiffOp::partial(1, 0);
    let y1 = DiffOp::mult(FnElem::var(1, 0));
    let expected = &y1.compose(&d1).unwrap() + &DiffOp::identity(1);
    assert_eq!(d1.compose(&y1).unwrap(), expected);

    // (2X + n) y1 = 4 y1 for n = 2
    let shift = DiffOp::linear_combine(&[int(2), int(2)], &[DiffOp::euler(2), DiffOp::identity(2)]).unwrap();
    assert_eq!(shift.apply(&p("y1", 2)).unwrap(), p("4*y1", 2));

    // [Delta, X] = 2 Delta, n = 3
    let lap = DiffOp::laplacian(3);
    assert_eq!(lap.commutator(&DiffOp::euler(3)).unwrap(), lap.scale(&int(2)));

    // [X, M_1] = -4 y1^2 / (1 + y1^2)^2, n = 1
    let c = DiffOp::euler(1).commutator(&DiffOp::m_weight(1, 1)).unwrap();
    let expected = &FnElem::from(parse_polynomial("-y1^2", 1).unwrap()) * &conflap_core::diffop::m_weight_function(1, 2);
    assert_eq!(c, DiffOp::mult(expected));

    assert!((&lap - &lap).is_zero());
    assert!(!(&DiffOp::laplacian(1) - &DiffOp::euler(1)).is_zero());
    assert!(DiffOp::zero(2).is_zero());
    assert!(DiffOp::linear_combine(&[int(0)], &[lap.clone()]).unwrap().is_zero());
}
