use polypart::groebner::{buchberger, ideal_dimension, reduce_by, Budget, IdealGens};
use polypart::poly::{parse_poly, MPoly};

mod common;
use common::load;

fn sorted(mut v: Vec<MPoly>) -> Vec<MPoly> {
    v.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
    v
}

#[test]
fn golden_set_is_large_enough() {
    assert!(load().len() >= 5);
}

#[test]
fn reduced_bases_match() {
    for g in load() {
        let gb = buchberger(&IdealGens::new(g.nvars, g.gens.clone()), &Budget::default()).unwrap();
        assert_eq!(sorted(gb.basis().to_vec()), sorted(g.basis.clone()), "{}", g.name);
        assert!(gb.all_s_polys_reduce(), "{}", g.name);
        assert_eq!(ideal_dimension(&gb), g.dim, "{}", g.name);
    }
}

#[test]
fn expected_bases_generate_the_same_ideal() {
    // Independent of the solver: each generator reduces to zero modulo the
    // expected basis, and the expected basis is itself a Gröbner basis.
    for g in load() {
        let refs: Vec<&MPoly> = g.basis.iter().collect();
        for f in &g.gens {
            assert!(reduce_by(f, &refs).is_zero(), "{}: {f}", g.name);
        }
        for (i, a) in g.basis.iter().enumerate() {
            for b in &g.basis[i + 1..] {
                let s = polypart::groebner::s_polynomial(a, b);
                assert!(reduce_by(&s, &refs).is_zero(), "{}", g.name);
            }
        }
    }
}

#[test]
fn circle_meets_diagonal() {
    let g = load().into_iter().find(|g| g.name == "circle-line").unwrap();
    let gb = buchberger(&IdealGens::new(2, g.gens), &Budget::default()).unwrap();
    let two_x2 = parse_poly("2*x1^2 - 1", 2).unwrap();
    assert!(gb.basis().iter().any(|p| *p == two_x2.monic()));
}
