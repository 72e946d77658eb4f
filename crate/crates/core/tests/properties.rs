use jetred::algebra::{rational, LaurentPolynomial, PolyRing, Rational, TruncatedSeries};
use jetred::conformal::{boost_matrix, rotation_matrix};
use jetred::minkowski::{lorentz_action, ScalarJet2};
use jetred::mobius::{canonical_projection, stabilizer_action, MobiusStabilizer};
use jetred::reduction::trace_invariants;
use proptest::prelude::*;

fn ring() -> PolyRing {
    PolyRing::new([("x", true), ("y", false)])
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| rational(p, q))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (prop_oneof![-6i64..=-1, 1i64..=6], 1i64..=4).prop_map(|(p, q)| rational(p, q))
}

fn laurent() -> impl Strategy<Value = LaurentPolynomial> {
    prop::collection::vec((small_rational(), -3i32..=3, 0i32..=3), 0..5).prop_map(|terms| {
        let r = ring();
        terms.into_iter().fold(r.zero(), |acc, (c, ex, ey)| acc + r.monomial(c, &[ex, ey]).unwrap())
    })
}

fn series(order: usize) -> impl Strategy<Value = TruncatedSeries<Rational>> {
    prop::collection::vec(small_rational(), order).prop_map(|c| TruncatedSeries::new(c).unwrap())
}

fn stabilizer() -> impl Strategy<Value = MobiusStabilizer<Rational>> {
    (nonzero_rational(), small_rational()).prop_map(|(a, c)| MobiusStabilizer::new(a, c).unwrap())
}

fn timelike_jet() -> impl Strategy<Value = ScalarJet2> {
    (prop::collection::vec(-1.0f64..1.0, 3), 0.5f64..2.0, prop::collection::vec(-1.0f64..1.0, 10)).prop_map(
        |(space, margin, upper)| {
            let u0 = (space.iter().map(|s| s * s).sum::<f64>() + margin).sqrt();
            let u = [u0, space[0], space[1], space[2]];
            let mut m = [[0.0; 4]; 4];
            let pairs = (0..4).flat_map(|i| (i..4).map(move |j| (i, j)));
            for ((i, j), v) in pairs.zip(upper) {
                m[i][j] = v;
                m[j][i] = v;
            }
            let rows: Vec<&[f64]> = m.iter().map(|r| r.as_slice()).collect();
            ScalarJet2::from_slices(&u, &rows).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn addition_is_commutative_and_associative(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a - &a, ring().zero());
    }

    #[test]
    fn multiplication_is_commutative_and_associative(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &ring().constant(rational(1, 1)), a.clone());
    }

    #[test]
    fn multiplication_distributes(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn monomials_invert(c in nonzero_rational(), ex in -3i32..=3) {
        let m = ring().monomial(c, &[ex, 0]).unwrap();
        prop_assert_eq!(&m * &m.inverse().unwrap(), ring().constant(rational(1, 1)));
    }

    #[test]
    fn composition_is_associative(f in series(5), g in series(5), h in series(5)) {
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn truncation_commutes_with_products(f in series(6), g in series(6)) {
        let full = f.mul(&g).unwrap().truncate(4).unwrap();
        let early = f.truncate(4).unwrap().mul(&g.truncate(4).unwrap()).unwrap();
        prop_assert_eq!(full, early);
        let full = f.compose(&g).unwrap().truncate(4).unwrap();
        let early = f.truncate(4).unwrap().compose(&g.truncate(4).unwrap()).unwrap();
        prop_assert_eq!(full, early);
    }

    #[test]
    fn stabilizer_action_is_a_group_action(u in series(5), h1 in stabilizer(), h2 in stabilizer()) {
        // (a1 z/(c1 z + 1)) after (a2 z/(c2 z + 1)) is (a1 a2, c1 a2 + c2).
        let product = MobiusStabilizer::new(h1.a() * h2.a(), h1.c() * h2.a() + h2.c()).unwrap();
        let stepwise = stabilizer_action(&stabilizer_action(&u, &h1).unwrap(), &h2).unwrap();
        prop_assert_eq!(stepwise, stabilizer_action(&u, &product).unwrap());
    }

    #[test]
    fn projection_is_exactly_invariant(u in series(6), h in stabilizer()) {
        prop_assume!(*u.coefficient(1) != rational(0, 1));
        let moved = stabilizer_action(&u, &h).unwrap();
        prop_assert_eq!(canonical_projection(&moved).unwrap(), canonical_projection(&u).unwrap());
    }

    #[test]
    fn lorentz_action_is_a_right_action(jet in timelike_jet(), eta in -1.5f64..1.5, theta in -3.0f64..3.0) {
        let boost = boost_matrix(4, 1, eta);
        let rot = rotation_matrix(4, 2, 3, theta);
        let stepwise = lorentz_action(&lorentz_action(&jet, &boost).unwrap(), &rot).unwrap();
        let once = lorentz_action(&jet, &(&boost * &rot)).unwrap();
        prop_assert!((stepwise.u() - once.u()).amax() < 1e-12 * once.u().amax().max(1.0));
        prop_assert!((stepwise.u2() - once.u2()).amax() < 1e-12 * once.u2().amax().max(1.0));
    }

    #[test]
    fn traces_are_lorentz_invariant(jet in timelike_jet(), eta in -1.5f64..1.5, theta in -3.0f64..3.0) {
        let lambda = boost_matrix(4, 2, eta) * rotation_matrix(4, 1, 3, theta);
        let before = trace_invariants(&jet).unwrap();
        let after = trace_invariants(&lorentz_action(&jet, &lambda).unwrap()).unwrap();
        for (a, b) in after.iter().zip(&before) {
            prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{} vs {}", a, b);
        }
    }
}
