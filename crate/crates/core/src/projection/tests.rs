use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::poly::parse_poly;
use crate::rational::q;

fn variety(nvars: usize, gens: &[&str]) -> VarietyHandle {
    let polys = gens.iter().map(|g| parse_poly(g, nvars).unwrap()).collect();
    VarietyHandle::from_polys(nvars, polys, &Budget::default()).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn certify(v: &VarietyHandle, k: usize, seed: u64) -> (LinearMap, ProjectionCertificate) {
    let cfg = ProjectionConfig::default();
    let (pi, cert) = build_projection(v, k, &cfg, &mut rng(seed)).unwrap();
    assert!(verify_certificate(v, &pi, &cert, &cfg.budget).unwrap());
    (pi, cert)
}

#[test]
fn shear_coefficients() {
    let a = random_shear_coeffs(2, 1 << 16, &mut rng(5));
    assert_eq!(a.len(), 1);
    assert!(a[0] >= q(1) && a[0] <= q(65536));
    let b = random_shear_coeffs(4, 1 << 16, &mut rng(5));
    assert_eq!(b.len(), 3);
    assert_eq!(b[0], a[0]);
    assert_eq!(b, random_shear_coeffs(4, 1 << 16, &mut rng(5)));
    let small: Vec<Q> = (0..200).flat_map(|s| random_shear_coeffs(3, 3, &mut rng(s))).collect();
    for v in 1..=3 {
        assert!(small.contains(&q(v)));
    }
    assert!(small.iter().all(|v| *v >= q(1) && *v <= q(3)));
}

#[test]
fn hyperbola_needs_a_shear() {
    let v = variety(2, &["x*y - 1"]);
    assert_eq!(pure_power_leader(&v.gb, 1), PurePower::Absent);
    let (shear, next, rec) = project_once(&v, &ProjectionConfig::default(), &mut rng(1)).unwrap();
    assert!(rec.retries >= 1);
    assert_eq!(rec.leader_degree, 2);
    assert!(next.gb.is_zero_ideal());
    assert_eq!(next.nvars(), 1);
    assert_eq!((rec.dim_before, rec.dim_after), (1, 1));
    // λ y² + x y − 1 after x ↦ x + λ y.
    let lam = &rec.lambdas[0];
    let g = crate::poly::pullback(&v.gens.gens()[0], &shear).unwrap();
    let expect = parse_poly("x*y - 1", 2).unwrap() + parse_poly("y^2", 2).unwrap().scale(lam);
    assert_eq!(g, expect);
}

#[test]
fn hyperbola_with_unit_shear() {
    let g = crate::poly::shear(&parse_poly("x*y - 1", 2).unwrap(), 1, &[q(1)]);
    assert_eq!(g, parse_poly("y^2 + x*y - 1", 2).unwrap());
    let gb = buchberger(&IdealGens::new(2, vec![g]), &Budget::default()).unwrap();
    assert_eq!(pure_power_leader(&gb, 1), PurePower::Found(2));
    assert!(elimination_gens(&gb, 1).is_empty());
}

#[test]
fn circle_needs_no_shear() {
    let v = variety(2, &["x^2 + y^2 - 1"]);
    let (pi, cert) = certify(&v, 1, 0);
    assert_eq!(cert.stages.len(), 1);
    assert_eq!(cert.stages[0].retries, 0);
    assert_eq!(cert.stages[0].lambdas, vec![q(0)]);
    assert_eq!(cert.stages[0].leader_degree, 2);
    assert_eq!(pi, LinearMap::drop_to(2, 1));
}

#[test]
fn zero_dimensional_rejected() {
    let v = variety(2, &["x^2 + y^2 - 1", "x - y"]);
    assert_eq!(v.claimed_dim, 0);
    let err = project_once(&v, &ProjectionConfig::default(), &mut rng(0));
    assert!(matches!(err, Err(Error::Precondition(_))));
    assert!(build_projection(&v, 1, &ProjectionConfig::default(), &mut rng(0)).is_err());
}

#[test]
fn full_space_rejected() {
    let v = VarietyHandle::ambient(3);
    assert_eq!(v.claimed_dim, 3);
    assert!(build_projection(&v, 2, &ProjectionConfig::default(), &mut rng(0)).is_err());
}

#[test]
fn parallel_lines_project_without_shear() {
    let v = variety(2, &["y^2 - y"]);
    let (_, cert) = certify(&v, 1, 3);
    assert_eq!(cert.stages[0].retries, 0);
    assert_eq!(cert.stages[0].leader_degree, 2);
}

#[test]
fn twisted_cubic_two_stages() {
    let v = variety(3, &["y - x^2", "z - x^3"]);
    assert_eq!(v.claimed_dim, 1);
    let (pi, cert) = certify(&v, 1, 9);
    assert_eq!(cert.stages.len(), 2);
    assert_eq!(cert.stages.iter().map(|s| s.vars).collect::<Vec<_>>(), vec![3, 2]);
    assert_eq!((pi.nrows(), pi.ncols()), (1, 3));
    assert!(pi.is_surjective());
}

#[test]
fn sheared_curve_in_space() {
    // x·z = 1 on the plane y = x: needs a genuine shear at the first stage.
    let v = variety(3, &["x*z - 1", "y - x"]);
    let (_, cert) = certify(&v, 1, 4);
    assert!(cert.total_retries() >= 1);
    assert!(cert.max_stage_retries() <= 5);
}

#[test]
fn tampered_certificates_fail() {
    let v = variety(2, &["x*y - 1"]);
    let cfg = ProjectionConfig::default();
    let (pi, cert) = build_projection(&v, 1, &cfg, &mut rng(2)).unwrap();
    let mut bad = cert.clone();
    bad.stages[0].lambdas = vec![q(0)];
    assert!(!verify_certificate(&v, &bad.projection(), &bad, &cfg.budget).unwrap());
    assert!(!verify_certificate(&v, &LinearMap::drop_to(2, 1), &cert, &cfg.budget).unwrap());
    let mut bad = cert;
    bad.final_elimination = vec![parse_poly("x", 1).unwrap()];
    assert!(!verify_certificate(&v, &pi, &bad, &cfg.budget).unwrap());
}

#[test]
fn certificate_round_trips_through_json() {
    let v = variety(2, &["x*y - 1"]);
    let (_, cert) = certify(&v, 1, 8);
    let s = serde_json::to_string(&cert).unwrap();
    let back: ProjectionCertificate = serde_json::from_str(&s).unwrap();
    assert_eq!(back, cert);
}

#[test]
fn points_of_the_variety_map_consistently() {
    // π = drop ∘ shear⁻¹: for (t, 1/t) on the hyperbola the image is t − λ/t.
    let v = variety(2, &["x*y - 1"]);
    let (pi, cert) = certify(&v, 1, 6);
    let lam = cert.stages[0].lambdas[0].clone();
    for t in 1..20 {
        let x = Q::new(t.into(), 7.into());
        let y = x.recip();
        assert_eq!(pi.apply(&[x.clone(), y.clone()]), vec![&x - &lam * &y]);
    }
}

#[test]
fn retries_are_rare() {
    let v = variety(2, &["x*y - 1"]);
    let cfg = ProjectionConfig::default();
    let total: usize = (0..100)
        .map(|s| build_projection(&v, 1, &cfg, &mut rng(s)).unwrap().1.total_retries())
        .sum();
    assert!(total < 200, "{total}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn certificates_verify_and_preserve_dimension(seed in any::<u64>(), which in 0usize..4) {
        let (v, k) = match which {
            0 => (variety(2, &["x*y - 1"]), 1),
            1 => (variety(2, &["x^2 + y^2 - 1"]), 1),
            2 => (variety(3, &["x*z - 1", "y - x"]), 1),
            _ => (variety(3, &["x*y*z - 1"]), 2),
        };
        let cfg = ProjectionConfig::default();
        let (pi, cert) = build_projection(&v, k, &cfg, &mut rng(seed)).unwrap();
        prop_assert!(verify_certificate(&v, &pi, &cert, &cfg.budget).unwrap());
        for s in &cert.stages {
            prop_assert_eq!(s.dim_before, s.dim_after);
        }
        prop_assert!(pi.is_surjective());
    }
}
