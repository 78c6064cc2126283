use super::*;
use crate::rational::{q, qf};

fn p2(s: &str) -> MPoly {
    parse_poly(s, 2).unwrap()
}

#[test]
fn eval_examples() {
    let circle = p2("x^2 + y^2 - 1");
    assert_eq!(circle.eval(&[q(1), q(0)]).unwrap(), q(0));
    assert_eq!(circle.eval(&[q(0), q(0)]).unwrap(), q(-1));
    assert_eq!(p2("x*y - 1").eval(&[q(2), qf(1, 2)]).unwrap(), q(0));
    assert!(circle.eval(&[q(1)]).is_err());
}

#[test]
fn eval_box_examples() {
    let unit = RInterval::new(q(0), q(1));
    let iv = eval_box(&parse_poly("x", 1).unwrap(), std::slice::from_ref(&unit));
    assert!(iv.lo <= q(0) && iv.hi >= q(1));

    let iv = eval_box(&p2("x^2 + y^2 - 1"), &[RInterval::new(q(2), q(3)), unit.clone()]);
    // x² ∈ [4,9], y² ∈ [0,1]  ⇒  [3, 9]
    assert_eq!(iv, RInterval::new(q(3), q(9)));
    assert_eq!(iv.strict_sign(), Some(Sign::Pos));

    let iv = eval_box(&parse_poly("x^2 - x", 1).unwrap(), &[unit]);
    assert!(iv.contains_zero());
}

#[test]
fn shear_examples() {
    let s = shear(&p2("x*y - 1"), 1, &[q(1)]);
    assert_eq!(s, p2("y^2 + x*y - 1"));
    assert_eq!(s.coeff(&Monomial::new(vec![0, 2])), q(1));

    let c = p2("x^2 + y^2 - 1");
    assert_eq!(shear(&c, 1, &[q(0)]), c);
    assert_eq!(shear(&p2("x"), 1, &[q(3)]), p2("x + 3*y"));
}

#[test]
fn pullback_examples() {
    let y1 = parse_poly("x1", 1).unwrap();
    let drop = LinearMap::drop_to(2, 1);
    assert_eq!(pullback(&y1, &drop).unwrap(), p2("x1"));

    let sum = LinearMap::new(MapKind::Projection, vec![vec![q(1), q(1)]], 2);
    let g = pullback(&parse_poly("x1^2 - 1", 1).unwrap(), &sum).unwrap();
    assert_eq!(g, p2("x1^2 + 2*x1*x2 + x2^2 - 1"));
    assert_eq!(g.total_degree(), 2);

    let five = parse_poly("5", 1).unwrap();
    assert_eq!(pullback(&five, &drop).unwrap(), MPoly::constant(2, q(5)));

    let degenerate = LinearMap::new(MapKind::Projection, vec![vec![q(0), q(0)]], 2);
    assert!(matches!(
        pullback(&y1, &degenerate),
        Err(crate::Error::NotSurjective { .. })
    ));
}

#[test]
fn lex_order_has_last_variable_heaviest() {
    let p = p2("x^5 + y");
    assert_eq!(p.leading_monomial().unwrap().exps(), &[0, 1]);
    let p = p2("x*y + x^3");
    assert_eq!(p.leading_monomial().unwrap().exps(), &[1, 1]);
}

#[test]
fn text_round_trip() {
    let p = parse_poly("3/2*x1^2*x2 - 1", 2).unwrap();
    assert_eq!(p.to_string(), "3/2*x1^2*x2 - 1");
    assert_eq!(parse_poly(&p.to_string(), 2).unwrap(), p);
    let p = parse_poly("-x3 + 0.5*x1*x1 - 2*x2^3", 3).unwrap();
    assert_eq!(p.to_string(), "-x3 - 2*x2^3 + 1/2*x1^2");
    assert_eq!(MPoly::zero(2).to_string(), "0");
    assert!(parse_poly("x3", 2).is_err());
    assert!(parse_poly("x1 +", 2).is_err());
    assert!(parse_poly("", 2).is_err());
    assert!(parse_poly("x1 x2", 2).is_err());
}

#[test]
fn primitive_and_monic() {
    let p = p2("-2/3*x^2 + 4/9");
    assert_eq!(p.primitive(), p2("3*x^2 - 2"));
    assert_eq!(p.monic(), p2("x^2 - 2/3"));
}

#[test]
fn derivative_and_degree() {
    let p = p2("x^3*y + 2*y^2 - x");
    assert_eq!(p.derivative(0), p2("3*x^2*y - 1"));
    assert_eq!(p.derivative(1), p2("x^3 + 4*y"));
    assert_eq!(p.total_degree(), 4);
}

#[test]
fn float_sign_falls_back_to_exact() {
    let p = p2("x^2 + y^2 - 1");
    let on = [qf(3, 5), qf(4, 5)];
    assert_eq!(sign_at(&p, &on), Sign::Zero);
    assert_eq!(sign_at(&p, &[qf(3, 5), qf(4, 5) + qf(1, 1 << 40)]), Sign::Pos);
    assert_eq!(sign_at(&p, &[q(0), q(0)]), Sign::Neg);
}

#[test]
fn serde_round_trip() {
    let p = p2("3/2*x1^2*x2 - 1");
    let js = serde_json::to_string(&p).unwrap();
    let back: MPoly = serde_json::from_str(&js).unwrap();
    assert_eq!(back, p);
    let m = LinearMap::shear(3, 2, &[q(2), qf(-1, 3)]);
    let back: LinearMap = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(back, m);
}

#[test]
fn linear_map_algebra() {
    let s = LinearMap::shear(3, 2, &[q(2), q(5)]);
    let inv = s.inverse().unwrap();
    let id = s.compose(&inv, MapKind::Identity);
    assert!(id.is_identity());
    assert_eq!(s.apply(&[q(1), q(1), q(1)]), vec![q(3), q(6), q(1)]);
    assert_eq!(LinearMap::drop_to(3, 2).rank(), 2);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn small_q() -> impl Strategy<Value = Q> {
        (-20i64..=20, 1i64..=6).prop_map(|(n, d)| qf(n, d))
    }

    fn poly(nvars: usize) -> impl Strategy<Value = MPoly> {
        proptest::collection::vec((proptest::collection::vec(0u32..=3, nvars), small_q()), 0..6)
            .prop_map(move |ts| MPoly::from_terms(nvars, ts.into_iter().map(|(e, c)| (Monomial::new(e), c))))
    }

    fn point(nvars: usize) -> impl Strategy<Value = Vec<Q>> {
        proptest::collection::vec(small_q(), nvars)
    }

    proptest! {
        #[test]
        fn ring_laws(p in poly(2), r in poly(2), x in point(2)) {
            let px = p.eval(&x).unwrap();
            let rx = r.eval(&x).unwrap();
            prop_assert_eq!((&p + &r).eval(&x).unwrap(), &px + &rx);
            prop_assert_eq!((&p - &r).eval(&x).unwrap(), &px - &rx);
            prop_assert_eq!((&p * &r).eval(&x).unwrap(), &px * &rx);
        }

        #[test]
        fn degree_is_additive(p in poly(3), r in poly(3)) {
            prop_assume!(!p.is_zero() && !r.is_zero());
            prop_assert_eq!((&p * &r).total_degree(), p.total_degree() + r.total_degree());
        }

        #[test]
        fn shear_preserves_degree(p in poly(3), l1 in -9i64..9, l2 in -9i64..9) {
            prop_assume!(!p.is_zero());
            let s = shear(&p, 2, &[q(l1), q(l2)]);
            prop_assert_eq!(s.total_degree(), p.total_degree());
        }

        #[test]
        fn shear_is_substitution(p in poly(2), l in -9i64..9, x in point(2)) {
            let s = shear(&p, 1, &[q(l)]);
            let moved = vec![&x[0] + q(l) * &x[1], x[1].clone()];
            prop_assert_eq!(s.eval(&x).unwrap(), p.eval(&moved).unwrap());
        }

        #[test]
        fn pullback_preserves_degree(p in poly(2), a in proptest::collection::vec(-5i64..5, 6)) {
            let rows = vec![
                vec![q(a[0]), q(a[1]), q(a[2])],
                vec![q(a[3]), q(a[4]), q(a[5])],
            ];
            let pi = LinearMap::new(MapKind::Projection, rows, 3);
            prop_assume!(pi.is_surjective() && !p.is_zero());
            let g = pullback(&p, &pi).unwrap();
            prop_assert_eq!(g.total_degree(), p.total_degree());
        }

        #[test]
        fn text_round_trips(p in poly(3)) {
            prop_assert_eq!(parse_poly(&p.to_string(), 3).unwrap(), p);
        }
    }

    #[test]
    fn eval_box_soundness() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let rq = |rng: &mut rand_chacha::ChaCha8Rng| qf(rng.random_range(-40..=40), rng.random_range(1..=8));
        for _ in 0..1000 {
            let n = rng.random_range(1..=3);
            let nt = rng.random_range(1..=5);
            let p = MPoly::from_terms(
                n,
                (0..nt).map(|_| {
                    let e = (0..n).map(|_| rng.random_range(0..=3)).collect();
                    (Monomial::new(e), rq(&mut rng))
                }),
            );
            let mut bx = Vec::new();
            let mut x = Vec::new();
            for _ in 0..n {
                let a = rq(&mut rng);
                let b = rq(&mut rng);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let t = qf(rng.random_range(0..=16), 16);
                x.push(&lo + (&hi - &lo) * t);
                bx.push(RInterval::new(lo, hi));
            }
            let v = p.eval(&x).unwrap();
            assert!(eval_box(&p, &bx).contains(&v));
            if let Some(s) = sign_on_box(&p, &bx) {
                assert_eq!(s, Sign::of(&v));
            }
        }
    }
}
