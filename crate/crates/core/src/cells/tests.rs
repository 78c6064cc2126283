use num_traits::Zero;
use proptest::prelude::*;

use super::*;
use crate::partition::Cut;
use crate::rational::{q, qf};

fn p2(s: &str) -> MPoly {
    parse_poly(s, 2).unwrap()
}

fn range(s: &str) -> RangeEval {
    Range::parse(s, 2).unwrap().evaluator()
}

fn region(points: &[Vec<Q>], boxes: usize) -> Region {
    let refs: Vec<&[Q]> = points.iter().map(|p| p.as_slice()).collect();
    Region {
        level: 1,
        index: 0,
        sign_id: vec![],
        component: None,
        witness: points[0].clone(),
        count: points.len() as u64,
        weight: Q::from_integer((points.len() as i64).into()),
        members: (0..points.len()).collect(),
        cover: BoxCover::from_points(&refs, boxes),
    }
}

fn grid_points(x0: Q, x1: Q, y0: Q, y1: Q, n: i64) -> Vec<Vec<Q>> {
    let mut v = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            let t = Q::new(i.into(), n.into());
            let s = Q::new(j.into(), n.into());
            v.push(vec![&x0 + (&x1 - &x0) * &t, &y0 + (&y1 - &y0) * &s]);
        }
    }
    v
}

#[test]
fn range_text_round_trips() {
    for s in [
        "(x1 - 1/2 >= 0)",
        "(x2^2 + x1^2 - 1 >= 0) & (-x2^2 - x1^2 + 4 >= 0)",
        "!(x1 >= 0) | ((x2 >= 0) & (x2 + x1 >= 0))",
        "((x1 >= 0) | (x2 >= 0)) & !((-x2 + x1 >= 0) & (x2 - 3 >= 0))",
    ] {
        let r = Range::parse(s, 2).unwrap();
        assert_eq!(r.to_string(), s);
        assert_eq!(Range::parse(&r.to_string(), 2).unwrap(), r);
    }
    let r = Range::parse("(x^2 + y^2 - 1 >= 0) & (4 - x^2 - y^2 >= 0)", 2).unwrap();
    assert_eq!((r.atom_count(), r.max_degree()), (2, 2));
    assert!(matches!(r.formula(), Formula::And(v) if v.len() == 2));
}

#[test]
fn range_parse_errors() {
    for bad in ["", "(x >= 1)", "(x >= 0", "x >= 0", "(x >= 0) &", "(0 >= 0)", "(x3 >= 0)", "(x >= 0) (y >= 0)"] {
        assert!(Range::parse(bad, 2).is_err(), "{bad:?}");
    }
}

#[test]
fn exact_membership() {
    let annulus = Range::parse("(x^2 + y^2 - 1 >= 0) & (4 - x^2 - y^2 >= 0)", 2).unwrap();
    assert!(annulus.contains(&[q(1), q(0)]));
    assert!(annulus.contains(&[q(0), q(2)]));
    assert!(!annulus.contains(&[qf(1, 2), q(0)]));
    assert!(!annulus.contains(&[q(2), q(1)]));
    let ev = annulus.evaluator();
    for x in [[q(1), q(0)], [qf(3, 2), qf(1, 3)], [q(0), q(0)]] {
        assert_eq!(ev.contains(&x), annulus.contains(&x));
    }
    let not = Range::parse("!(x >= 0)", 2).unwrap();
    assert!(not.contains(&[q(-1), q(0)]) && !not.contains(&[q(0), q(0)]));
}

#[test]
fn classify_examples() {
    let unit = region(&grid_points(q(0), q(1), q(0), q(1), 6), 16);
    assert_eq!(classify(&unit, &range("(x - 10 >= 0)")), Verdict::Outside);
    assert_eq!(classify(&unit, &range("(1 >= 0)")), Verdict::Inside);
    assert_eq!(classify(&unit, &range("(-1 >= 0)")), Verdict::Outside);
    // A disk through the corner (1,1) of the region's extent.
    let disk = Range::atom(p2("1 - x^2 + 4*x - 4 - y^2 + 2*y - 1")).unwrap();
    assert!(disk.contains(&[q(1), q(1)]));
    assert!(!disk.contains(&[q(0), q(0)]));
    assert_eq!(classify(&unit, &disk.evaluator()), Verdict::Crosses);
    // Disk containing the whole square.
    let big = Range::atom(p2("9 - x^2 - y^2")).unwrap().evaluator();
    assert_eq!(classify(&unit, &big), Verdict::Inside);
}

#[test]
fn crossing_count_of_slabs() {
    // Z(x(x−1)(x−2)) splits the plane into four vertical slabs.
    let slabs: Vec<Region> = [(-1, 0), (0, 1), (1, 2), (2, 3)]
        .iter()
        .map(|&(a, b)| {
            let pts = grid_points(q(a) + qf(1, 10), q(b) - qf(1, 10), q(0), q(1), 5);
            region(&pts, 16)
        })
        .collect();
    assert_eq!(count_crossed_by_zero_set(&slabs, &p2("y - 37/73")), 4);
    assert_eq!(count_crossed_by_zero_set(&slabs, &p2("y - 5")), 0);
    assert_eq!(count_crossed_by_zero_set(&slabs, &p2("x - 1/2")), 1);
    // As a range, the line holds none of the (off-line) points.
    let line = Range::zero_set(p2("y - 37/73")).unwrap().evaluator();
    assert_eq!(count_crossed(&slabs, &line), 0);
    let band = Range::parse("(y - 1/3 >= 0) & (2/3 - y >= 0)", 2).unwrap().evaluator();
    assert_eq!(count_crossed(&slabs, &band), 4);
}

#[test]
fn cover_is_tight_and_bounded() {
    let pts = grid_points(q(0), q(1), q(0), q(1), 9);
    let refs: Vec<&[Q]> = pts.iter().map(|p| p.as_slice()).collect();
    for m in [1, 2, 7, 16, 200] {
        let c = BoxCover::from_points(&refs, m);
        assert!(c.len() <= m.max(1));
        assert!(pts.iter().all(|p| c.contains(p)));
    }
    let same = vec![vec![q(1), q(2)]; 5];
    let refs: Vec<&[Q]> = same.iter().map(|p| p.as_slice()).collect();
    assert_eq!(BoxCover::from_points(&refs, 16).len(), 1);
    assert!(BoxCover::from_points(&[], 4).is_empty());
}

fn grid_for_all(cuts: &[&str]) -> GridLabels {
    let evals: Vec<CutEval> = cuts
        .iter()
        .map(|c| {
            Cut {
                round: 0,
                degree: 2,
                beta: qf(1, 2),
                form: crate::partition::CutForm::Poly(p2(c)),
            }
            .evaluator()
        })
        .collect();
    GridLabels::new(2, &evals, &GridSpec::default()).unwrap()
}

fn grid_for(cut: &str) -> GridLabels {
    grid_for_all(&[cut])
}

#[test]
fn refine_disk_interior_is_one_piece() {
    let g = grid_for("4*x^2 + 4*y^2 - 1");
    let pts = vec![
        vec![q(0), q(0)],
        vec![qf(1, 5), qf(-1, 5)],
        vec![qf(-1, 4), qf(1, 8)],
    ];
    assert_eq!(refine_components(&g, &[Sign::Neg], &pts), vec![vec![0, 1, 2]]);
}

#[test]
fn refine_splits_across_a_strip() {
    // {16x² − 1 > 0} inside the disk 4x² + 4y² < 1: two pieces split by |x| ≤ 1/4.
    let g = grid_for_all(&["16*x^2 - 1", "1 - 4*x^2 - 4*y^2"]);
    let pts = vec![
        vec![qf(3, 8), q(0)],
        vec![qf(-3, 8), qf(1, 16)],
        vec![qf(5, 16), qf(-1, 8)],
    ];
    let groups = refine_components(&g, &[Sign::Pos, Sign::Pos], &pts);
    assert_eq!(groups, vec![vec![0, 2], vec![1]]);
    assert!(refine_components(&g, &[Sign::Pos, Sign::Pos], &[]).is_empty());
}

#[test]
fn refine_merges_pieces_that_leave_the_frame() {
    // {16x² − 1 > 0} is two half-planes, but both reach the frame boundary
    // and the grid cannot certify what happens beyond it.
    let g = grid_for("16*x^2 - 1");
    let pts = vec![vec![qf(1, 2), q(0)], vec![qf(-1, 2), qf(1, 3)]];
    assert_eq!(refine_components(&g, &[Sign::Pos], &pts), vec![vec![0, 1]]);
}

fn arb_region() -> impl Strategy<Value = Vec<Vec<Q>>> {
    prop::collection::vec((-64i64..64, -64i64..64), 1..40).prop_map(|v| {
        v.into_iter().map(|(a, b)| vec![qf(a, 16), qf(b, 16)]).collect()
    })
}

fn arb_range() -> impl Strategy<Value = Range> {
    prop_oneof![
        (-8i64..8, -8i64..8, -32i64..32)
            .prop_filter("nonzero", |(a, b, _)| *a != 0 || *b != 0)
            .prop_map(|(a, b, c)| Range::atom(MPoly::affine(qf(c, 8), &[q(a), q(b)])).unwrap()),
        (-4i64..4, -4i64..4, 1i64..6).prop_map(|(cx, cy, r)| {
            let h = MPoly::constant(2, Q::from_integer((r * r).into()))
                - (MPoly::affine(q(-cx), &[q(1), q(0)]).pow(2) + MPoly::affine(q(-cy), &[q(0), q(1)]).pow(2));
            Range::atom(h).unwrap()
        }),
        (0i64..4, 1i64..4).prop_map(|(a, b)| {
            let rr = MPoly::affine(q(0), &[q(1), q(0)]).pow(2) + MPoly::affine(q(0), &[q(0), q(1)]).pow(2);
            Range::all_of(2, vec![
                &rr - &MPoly::constant(2, Q::from_integer((a * a).into())),
                MPoly::constant(2, Q::from_integer(((a + b) * (a + b)).into())) - rr,
            ]).unwrap()
        }),
    ]
}

fn arb_formula(depth: u32) -> BoxedStrategy<Formula> {
    let leaf = (0usize..3).prop_map(Formula::Atom).boxed();
    if depth == 0 {
        return leaf;
    }
    prop_oneof![
        leaf,
        arb_formula(depth - 1).prop_map(|f| Formula::Not(Box::new(f))),
        prop::collection::vec(arb_formula(depth - 1), 2..4).prop_map(Formula::And),
        prop::collection::vec(arb_formula(depth - 1), 2..4).prop_map(Formula::Or),
    ]
    .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn classification_is_sound(pts in arb_region(), gamma in arb_range(), boxes in 1usize..20) {
        let reg = region(&pts, boxes);
        let ev = gamma.evaluator();
        match classify(&reg, &ev) {
            Verdict::Inside => prop_assert!(pts.iter().all(|p| gamma.contains(p))),
            Verdict::Outside => prop_assert!(pts.iter().all(|p| !gamma.contains(p))),
            Verdict::Crosses => {}
        }
    }

    #[test]
    fn more_boxes_never_flip(pts in arb_region(), gamma in arb_range()) {
        let ev = gamma.evaluator();
        let coarse = classify(&region(&pts, 1), &ev);
        let fine = classify(&region(&pts, 32), &ev);
        if coarse != Verdict::Crosses {
            prop_assert_eq!(coarse, fine);
        }
    }

    #[test]
    fn formula_text_round_trips(f in arb_formula(3)) {
        let atoms = vec![p2("x - 1"), p2("x^2 + y^2 - 4"), p2("-3/2*y + 7")];
        let r = Range::new(2, atoms, f).unwrap();
        let back = Range::parse(&r.to_string(), 2).unwrap();
        prop_assert_eq!(back.to_string(), r.to_string());
        prop_assert_eq!(Range::parse(&back.to_string(), 2).unwrap(), back);
    }

    #[test]
    fn kleene_box_truth_matches_points(pts in arb_region(), gamma in arb_range()) {
        let ev = gamma.evaluator();
        let reg = region(&pts, 4);
        for b in &reg.cover.boxes {
            let fb: Vec<Fi> = b.iter().map(Fi::enclose_interval).collect();
            if let Some(t) = ev.on_box(&fb, b) {
                for p in &pts {
                    if b.iter().zip(p).all(|(iv, v)| iv.contains(v)) {
                        prop_assert_eq!(gamma.contains(p), t);
                    }
                }
            }
        }
        let _ = Q::zero();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn refinement_partitions_its_input(pts in arb_region(), c in -8i64..8) {
        let h = p2("x^2 - y^2 - 1/9") + p2("x*y").scale(&qf(c, 8));
        let g = grid_for(&h.to_string());
        let ys: Vec<Vec<Q>> = pts.iter().map(|p| p.iter().map(|v| v / Q::from_integer(4.into())).collect()).collect();
        let signs: Vec<Sign> = ys.iter().map(|y| crate::poly::sign_at(&h, y)).collect();
        let keep: Vec<Vec<Q>> = ys.iter().zip(&signs).filter(|(_, s)| **s == Sign::Pos).map(|(y, _)| y.clone()).collect();
        let groups = refine_components(&g, &[Sign::Pos], &keep);
        let mut all: Vec<usize> = groups.iter().flatten().cloned().collect();
        all.sort();
        prop_assert_eq!(all, (0..keep.len()).collect::<Vec<_>>());
        prop_assert!(groups.iter().all(|g| !g.is_empty()));
    }
}
