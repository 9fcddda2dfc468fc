use proptest::prelude::*;
use schroedsym::action::act;
use schroedsym::algebra::{generators_linear, generators_quadratic, DiffOp, LaurentPoly2};
use schroedsym::group::{
    cocycle_linear, cocycle_quadratic, disk_parametrize, is_disk_shaped, symplectic_defect,
    DiskParams, QuadraticCocycle,
};
use schroedsym::multiplier::cocycle_product_defect;
use schroedsym::{compose, inverse, make_element, re, FamilySpec, GroupElement, Mat2, Point, C64};

fn real_element() -> impl Strategy<Value = GroupElement> {
    (
        0.5f64..1.5,
        -0.3f64..0.5,
        -0.5f64..0.5,
        -1.0f64..1.0,
        -1.0f64..1.0,
    )
        .prop_map(|(c, a, d, mu, nu)| {
            make_element(Mat2::real(c, d, a, (1.0 + a * d) / c), re(mu), re(nu)).unwrap()
        })
}

fn admissible() -> impl Strategy<Value = GroupElement> {
    (
        0.5f64..1.5,
        0.0f64..0.5,
        0.0f64..0.5,
        -1.0f64..1.0,
        -1.0f64..1.0,
    )
        .prop_map(|(c, a, d, mu, nu)| {
            make_element(Mat2::real(c, d, a, (1.0 + a * d) / c), re(mu), re(nu)).unwrap()
        })
}

fn cplx(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

fn complex_element() -> impl Strategy<Value = GroupElement> {
    (cplx(0.4), cplx(0.5), cplx(0.5), cplx(1.0), cplx(1.0)).prop_map(|(c, a, d, mu, nu)| {
        let c = c + 1.0;
        make_element(Mat2::new(c, d, a, (1.0 + a * d) / c), mu, nu).unwrap()
    })
}

fn any_element() -> impl Strategy<Value = GroupElement> {
    prop_oneof![real_element(), complex_element()]
}

fn disk_element() -> impl Strategy<Value = GroupElement> {
    (-1.0f64..1.0, 0.0f64..0.6, 0.0f64..std::f64::consts::TAU, cplx(0.5)).prop_map(|(theta, r, phi, mu)| {
        let g = disk_parametrize(DiskParams {
            theta,
            lam: C64::from_polar(r, phi),
        })
        .unwrap();
        GroupElement {
            mu,
            nu: -mu.conj(),
            ..g
        }
    })
}

fn poly() -> impl Strategy<Value = LaurentPoly2> {
    prop::collection::vec((-2.0f64..2.0, -2i32..3, 0i32..3), 0..5).prop_map(|terms| {
        LaurentPoly2::from_terms(
            &terms
                .into_iter()
                .map(|(c, i, j)| (re(c), i, j))
                .collect::<Vec<_>>(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn associativity(a in any_element(), b in any_element(), c in any_element()) {
        prop_assert!(compose(&compose(&a, &b), &c).max_abs_diff(&compose(&a, &compose(&b, &c))) < 1e-12);
    }

    #[test]
    fn inverse_is_two_sided(a in any_element()) {
        let id = GroupElement::identity();
        prop_assert!(compose(&a, &inverse(&a)).max_abs_diff(&id) < 1e-12);
        prop_assert!(compose(&inverse(&a), &a).max_abs_diff(&id) < 1e-12);
    }

    #[test]
    fn symplectic_invariance(a in any_element(), b in any_element()) {
        prop_assert!(symplectic_defect(&a.m) < 1e-12);
        prop_assert!(symplectic_defect(&a.m.mul(&b.m)) < 1e-12);
    }

    #[test]
    fn cycle_condition(a in any_element(), b in any_element(), c in any_element()) {
        let k = re(1.3);
        let w = |x: &GroupElement, y: &GroupElement| cocycle_linear(x, y, k).unwrap().value();
        let lhs = w(&a, &b) + w(&compose(&a, &b), &c);
        let rhs = w(&b, &c) + w(&a, &compose(&b, &c));
        prop_assert!((lhs - rhs).norm() < 1e-12);
        let q = |x: &GroupElement, y: &GroupElement| {
            cocycle_quadratic(x, y, re(0.8), QuadraticCocycle::Corrected).unwrap().value()
        };
        prop_assert!((q(&a, &b) + q(&compose(&a, &b), &c) - q(&b, &c) - q(&a, &compose(&b, &c))).norm() < 1e-12);
    }

    #[test]
    fn antisymmetry(a in any_element(), b in any_element()) {
        let k = C64::new(0.0, 0.7);
        let lhs = cocycle_linear(&inverse(&b), &inverse(&a), k).unwrap().value();
        prop_assert!((lhs + cocycle_linear(&a, &b, k).unwrap().value()).norm() < 1e-12);
    }

    #[test]
    fn disk_closure(a in disk_element(), b in disk_element()) {
        let c = compose(&a, &b);
        prop_assert!(is_disk_shaped(&c.m, 1e-12));
        prop_assert!((c.nu + c.mu.conj()).norm() < 1e-12);
    }

    #[test]
    fn linear_homomorphism(a in real_element(), b in real_element(), t in 0.1f64..1.0, x in -1.0f64..1.0) {
        let spec = FamilySpec::linear(re(1.0), 0.3, 0.7);
        let z = Point::tx(t, x);
        let zb = act(&b, &z, &spec).unwrap();
        prop_assume!((b.a() * z.t + b.b()).norm() > 0.1 && (a.a() * zb.t + a.b()).norm() > 0.1);
        let lhs = act(&a, &zb, &spec).unwrap();
        let rhs = act(&compose(&a, &b), &z, &spec).unwrap();
        prop_assert!((lhs.t - rhs.t).norm() < 1e-10 * (1.0 + rhs.t.norm()));
        prop_assert!((lhs.x[0] - rhs.x[0]).norm() < 1e-10 * (1.0 + rhs.x[0].norm()));
    }

    #[test]
    fn quadratic_homomorphism(a in admissible(), b in admissible(), t in -1.0f64..1.0, x in -1.0f64..1.0) {
        let spec = FamilySpec::quadratic(re(1.0), 0.3, re(0.8));
        let z = Point::tx(t, x);
        let lhs = act(&a, &act(&b, &z, &spec).unwrap(), &spec).unwrap();
        let rhs = act(&compose(&a, &b), &z, &spec).unwrap();
        prop_assert!((lhs.t - rhs.t).norm() < 1e-11 && (lhs.x[0] - rhs.x[0]).norm() < 1e-11);
    }

    #[test]
    fn multiplier_cocycle(a in admissible(), b in admissible(), t in 0.1f64..1.0, x in -1.0f64..1.0) {
        let z = Point::tx(t, x);
        for spec in [FamilySpec::linear(re(1.0), 0.3, 0.7), FamilySpec::quadratic(re(1.0), 0.3, re(0.8))] {
            prop_assert!(cocycle_product_defect(&a, &b, &z, &spec, QuadraticCocycle::Corrected).unwrap() < 1e-10);
        }
    }

    #[test]
    fn laurent_ring_laws(p in poly(), q in poly(), r in poly()) {
        let close = |a: &LaurentPoly2, b: &LaurentPoly2| (a - b).max_abs() < 1e-12;
        prop_assert!(close(&(&(&p * &q) * &r), &(&p * &(&q * &r))));
        prop_assert!(close(&(&p * &(&q + &r)), &(&(&p * &q) + &(&p * &r))));
        prop_assert!(close(&(&p * &q), &(&q * &p)));
        // Leibniz rule for the derivative
        let lhs = (&p * &q).derive(0);
        let rhs = &(&p.derive(0) * &q) + &(&p * &q.derive(0));
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn commutators(cs in prop::collection::vec(-1.0f64..1.0, 18)) {
        for g in [generators_linear(re(1.0), 0.3, 0.7).unwrap(), generators_quadratic(re(1.0), 0.3, re(0.8)).unwrap()] {
            let basis = [&g.l3, &g.lplus, &g.lminus, &g.t1, &g.t2, &g.unit];
            let combo = |w: &[f64]| basis.iter().zip(w).try_fold(DiffOp::zero(g.family), |acc, (op, c)| acc.add(&op.scale(re(*c)))).unwrap();
            let (a, b, c) = (combo(&cs[0..6]), combo(&cs[6..12]), combo(&cs[12..18]));
            let ab = a.commutator(&b).unwrap();
            prop_assert!(ab.add(&b.commutator(&a).unwrap()).unwrap().is_zero());
            let jacobi = a.commutator(&b.commutator(&c).unwrap()).unwrap()
                .add(&b.commutator(&c.commutator(&a).unwrap()).unwrap()).unwrap()
                .add(&c.commutator(&ab).unwrap()).unwrap();
            prop_assert!(jacobi.distance(&DiffOp::zero(g.family)).unwrap() < 1e-12);
        }
    }
}
