use nehari_core::bump::{assemble_phi_hat, BumpProfile, BumpSpec};
use nehari_core::classify::{decompose, HullRaysRep};
use nehari_core::domain::{
    exposed_points, extreme_points, supporting_hyperplane, ConvexBody, Hyperplane, Location,
};
use nehari_core::hankel::{build_hankel, op_norm, HankelOptions};
use nehari_core::math::{dist, dot, equiangular, norm, unit2};
use nehari_core::region::{
    check_pairwise_disjoint, d_region, find_witness, outer_polygon, PolygonOutcome, RegionSpec, WitnessBudget,
    WitnessOutcome,
};
use proptest::prelude::*;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn coord() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn point2() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(coord(), 2)
}

fn direction() -> impl Strategy<Value = Vec<f64>> {
    (0.0..std::f64::consts::TAU, 0.1..5.0f64).prop_map(|(t, s)| vec![s * t.cos(), s * t.sin()])
}

fn leaf() -> impl Strategy<Value = ConvexBody> {
    prop_oneof![
        (point2(), 0.0..2.0f64).prop_map(|(c, r)| ConvexBody::ball(c, r).unwrap()),
        prop::collection::vec(point2(), 1..7).prop_map(|v| ConvexBody::vpolytope(v).unwrap()),
        (point2(), 0.1..2.0f64, 0.1..2.0f64).prop_map(|(c, w, h)| {
            ConvexBody::axis_box(&[c[0] - w, c[1] - h], &[c[0] + w, c[1] + h]).unwrap()
        }),
    ]
}

fn body() -> impl Strategy<Value = ConvexBody> {
    leaf().prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ConvexBody::sum(a, b).unwrap()),
            inner.clone().prop_map(ConvexBody::negate),
            (inner.clone(), 0.1..3.0f64).prop_map(|(a, c)| ConvexBody::scale(a, c).unwrap()),
            prop::collection::vec(inner, 1..3).prop_map(|m| ConvexBody::hull(m).unwrap()),
        ]
    })
}

fn unbounded() -> impl Strategy<Value = ConvexBody> {
    prop_oneof![
        (0.2..3.0f64).prop_map(|c| ConvexBody::paraboloid(2, c).unwrap()),
        (prop::collection::vec(point2(), 1..4), prop::collection::vec(direction(), 1..3))
            .prop_map(|(p, r)| ConvexBody::hull_rays(p, r).unwrap()),
        (direction(), coord()).prop_map(|(a, t)| ConvexBody::hpolyhedron(vec![Hyperplane::new(a, t).unwrap()]).unwrap()),
    ]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn support_is_homogeneous(k in prop_oneof![body(), unbounded()], a in direction()) {
        let h = k.h(&a);
        for lambda in [0.5, 2.0] {
            let scaled: Vec<f64> = a.iter().map(|x| lambda * x).collect();
            prop_assert!(close(k.h(&scaled), lambda * h, 1e-12));
        }
    }

    #[test]
    fn support_is_subadditive(k in prop_oneof![body(), unbounded()], a in direction(), b in direction()) {
        let s = [a[0] + b[0], a[1] + b[1]];
        if norm(&s) > 1e-6 {
            let lhs = k.h(&s);
            let rhs = k.h(&a) + k.h(&b);
            prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs.abs()) || rhs.is_infinite());
        }
    }

    #[test]
    fn composite_support_identities(x in body(), y in body(), c in 0.1..4.0f64, a in direction()) {
        let sum = ConvexBody::sum(x.clone(), y.clone()).unwrap();
        prop_assert!(close(sum.h(&a), x.h(&a) + y.h(&a), 1e-13));
        let neg = ConvexBody::negate(x.clone());
        prop_assert_eq!(neg.h(&a), x.h(&[-a[0], -a[1]]));
        let sc = ConvexBody::scale(x.clone(), c).unwrap();
        prop_assert!(close(sc.h(&a), c * x.h(&a), 1e-13));
    }

    #[test]
    fn exposed_points_lie_on_the_boundary(k in body()) {
        let dirs = equiangular(64, 0.013);
        let e = exposed_points(&k, &dirs).unwrap();
        let tol = k.boundary_tolerance();
        for p in &e.set.points {
            prop_assert_eq!(k.locate_with(p, tol).unwrap(), Location::Boundary);
        }
    }

    #[test]
    fn polytope_exposed_equals_extreme(v in prop::collection::vec(point2(), 3..9)) {
        let k = ConvexBody::vpolytope(v).unwrap();
        let ext = extreme_points(&k).unwrap();
        let exp = exposed_points(&k, &equiangular(2048, 0.0007)).unwrap();
        let tol = k.point_tolerance();
        prop_assert_eq!(ext.points.len(), exp.set.points.len());
        for p in &ext.points {
            prop_assert!(exp.set.points.iter().any(|q| dist(p, q) <= tol));
        }
    }

    #[test]
    fn supporting_hyperplane_dominates(k in body(), t in 0.0..std::f64::consts::TAU) {
        let a = unit2(t);
        if let Some(f) = k.face(&a) {
            let h = supporting_hyperplane(&k, &f.point).unwrap();
            let tol = 1e-9 * (1.0 + k.extent());
            prop_assert!(k.h(h.normal()) <= h.offset() + tol);
            prop_assert!((dot(&f.point, h.normal()) - h.offset()).abs() <= tol);
        }
    }

    #[test]
    fn decomposition_support_matches(
        pts in prop::collection::vec(point2(), 1..6),
        rays in prop::collection::vec((0.0..std::f64::consts::PI * 0.95).prop_map(|t| unit2(t + 0.1).to_vec()), 0..4),
        origins in prop::collection::vec(0usize..6, 4),
    ) {
        let rays: Vec<(usize, Vec<f64>)> = rays.into_iter().zip(origins).map(|(u, o)| (o % pts.len(), u)).collect();
        let rep = HullRaysRep::new(pts, rays).unwrap();
        prop_assume!(!rep.line_flag);
        let dec = decompose(&rep).unwrap();
        for a in equiangular(256, 0.0123) {
            let (hr, hd) = (rep.h(&a), dec.h(&a));
            prop_assert_eq!(hr.is_finite(), hd.is_finite());
            if hr.is_finite() {
                prop_assert!((hr - hd).abs() <= 1e-9 * (1.0 + hr.abs()));
            }
        }
    }

    #[test]
    fn decomposition_combinations_lie_in_the_set(
        pts in prop::collection::vec(point2(), 1..6),
        seed in any::<u64>(),
    ) {
        let rep = HullRaysRep::new(pts, vec![(0, vec![1.0, 0.0]), (0, vec![0.0, 1.0])]).unwrap();
        let dec = decompose(&rep).unwrap();
        let body = rep.to_body().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..16 {
            let w: Vec<f64> = dec.polytope_vertices.iter().map(|_| uniform(&mut rng, 0.0, 1.0) + 1e-3).collect();
            let mu: Vec<f64> = dec.cone_generators.iter().map(|_| uniform(&mut rng, 0.0, 5.0)).collect();
            let x = dec.combination(&w, &mu).unwrap();
            prop_assert!(body.signed_gap(&x).unwrap() >= -1e-9 * (1.0 + norm(&x)));
        }
    }

    #[test]
    fn shrinking_radius_keeps_certificates(t1 in 0.0..std::f64::consts::TAU, gap in 1.0..3.0f64, r in 0.01..0.3f64) {
        let omega = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap().with_open(true);
        let centers = vec![
            unit2(t1).iter().map(|c| 1.6 * c).collect::<Vec<f64>>(),
            unit2(t1 + gap).iter().map(|c| 1.6 * c).collect(),
        ];
        let wide = check_pairwise_disjoint(&omega, &centers, r, 256).unwrap();
        if wide.is_certified() {
            for f in [0.5, 0.25] {
                prop_assert!(check_pairwise_disjoint(&omega, &centers, r * f, 256).unwrap().is_certified());
            }
        }
    }

    #[test]
    fn bump_samples_vanish_off_support(cx in -1.0..1.0f64, cy in -1.0..1.0f64, r in 0.2..0.6f64) {
        let profile = BumpProfile::new(2).unwrap();
        let b = BumpSpec::new(vec![cx, cy], r).unwrap();
        let g = assemble_phi_hat(&profile, &[b], vec![-2.0, -2.0], vec![2.0, 2.0], vec![256, 256]).unwrap();
        for i in 0..g.samples().len() {
            let x = g.node(i);
            if dist(&x, &[cx, cy]) > r {
                prop_assert_eq!(g.samples()[i].norm(), 0.0);
            }
        }
    }
}

#[test]
fn empty_certificates_survive_sampling() {
    let omega = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let cases = [
        d_region(&omega, &ConvexBody::ball(vec![3.5, 0.0], 0.1).unwrap()).unwrap(),
        RegionSpec::new(
            vec![
                ConvexBody::sum(ConvexBody::ball(vec![1.8, 0.0], 0.1).unwrap(), ConvexBody::negate(omega.clone())).unwrap(),
                ConvexBody::sum(ConvexBody::ball(vec![-1.8, 0.0], 0.1).unwrap(), ConvexBody::negate(omega.clone())).unwrap(),
                omega.clone(),
            ],
            "pair",
        )
        .unwrap(),
    ];
    for region in &cases {
        let poly = outer_polygon(region, 128).unwrap();
        assert!(matches!(poly.outcome, PolygonOutcome::Empty(_)));
        let (lo, hi) = omega.bounding_box().unwrap();
        for _ in 0..100_000 {
            let x = [uniform(&mut rng, lo[0], hi[0]), uniform(&mut rng, lo[1], hi[1])];
            assert!(!region.contains(&x).unwrap(), "sample {x:?} lies in a certified-empty region");
        }
    }
}

#[test]
fn witness_regions_stay_within_rho() {
    let omega = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap().with_open(true);
    let WitnessOutcome::Found(c) = find_witness(&omega, &[1.0, 0.0], 0.5, WitnessBudget::default()).unwrap() else {
        panic!("witness expected");
    };
    let center: Vec<f64> = c.z.iter().map(|v| 2.0 * v).collect();
    let region = d_region(&omega, &ConvexBody::ball(center, c.s).unwrap()).unwrap();
    let xs: Vec<f64> = c.polygon.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = c.polygon.iter().map(|p| p[1]).collect();
    let (x0, x1) = (xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let (y0, y1) = (ys.iter().cloned().fold(f64::INFINITY, f64::min), ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut hits = 0;
    while hits < 100_000 {
        let x = [uniform(&mut rng, x0, x1), uniform(&mut rng, y0, y1)];
        if region.contains(&x).unwrap() {
            hits += 1;
            assert!(dist(&x, &c.y) <= c.rho);
            assert!(dist(&x, &c.y) <= c.max_dist + 1e-12);
        }
    }
}

#[test]
fn hankel_blocks_are_symmetric_and_dominated() {
    let omega = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap().with_open(true);
    let profile = BumpProfile::new(2).unwrap();
    for (c, r) in [([1.5, 0.0], 0.3), ([0.0, -1.2], 0.5), ([0.8, 0.8], 0.4)] {
        let b = BumpSpec::new(c.to_vec(), r).unwrap();
        let lo = vec![c[0] - r, c[1] - r];
        let hi = vec![c[0] + r + 2.0 * r / 32.0, c[1] + r + 2.0 * r / 32.0];
        let g = assemble_phi_hat(&profile, &[b], lo, hi, vec![66, 66]).unwrap();
        let m = build_hankel(&g, &omega, None, HankelOptions::new(r / 8.0)).unwrap();
        assert!(m.matrix.is_symmetric());
        let e = op_norm(&m.matrix, 1e-10, 5000).unwrap();
        assert!(e.sigma_max <= e.hs_norm);
        assert!(e.sigma_max <= g.l1() * (1.0 + 1e-9));
    }
}

fn rigid(theta: f64, shift: [f64; 2]) -> impl Fn(ConvexBody) -> ConvexBody {
    move |k| {
        let (c, s) = (theta.cos(), theta.sin());
        let rotated = ConvexBody::linear(k, vec![c, -s, s, c]).unwrap();
        ConvexBody::sum(rotated, ConvexBody::ball(shift.to_vec(), 0.0).unwrap()).unwrap()
    }
}

#[test]
fn classification_is_invariant_under_rigid_motion() {
    use nehari_core::classify::classify;
    let motion = rigid(0.7, [0.3, -1.1]);
    let fixtures = [
        ConvexBody::axis_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap(),
        ConvexBody::hpolyhedron(vec![
            Hyperplane::new(vec![0.0, 1.0], 2.0).unwrap(),
            Hyperplane::new(vec![0.0, -1.0], 1.0).unwrap(),
        ])
        .unwrap(),
        ConvexBody::hull_rays(vec![vec![0.0, 0.0]], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap(),
        ConvexBody::paraboloid(2, 1.0).unwrap(),
    ];
    for k in fixtures {
        let before = classify(&k).unwrap().name();
        let after = classify(&motion(k)).unwrap().name();
        assert_eq!(before, after);
    }
}

#[test]
fn decomposition_is_idempotent() {
    let rep = HullRaysRep::new(
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.1], vec![0.2, 0.05]],
        vec![(1, vec![1.0, 1.0]), (0, vec![0.0, 1.0]), (2, vec![0.5, 1.0])],
    )
    .unwrap();
    let d1 = decompose(&rep).unwrap();
    let rep2 = HullRaysRep::new(
        d1.polytope_vertices.clone(),
        d1.cone_generators.iter().map(|u| (0, u.clone())).collect(),
    )
    .unwrap();
    let d2 = decompose(&rep2).unwrap();
    assert_eq!(d1.polytope_vertices.len(), d2.polytope_vertices.len());
    assert_eq!(d1.cone_generators.len(), d2.cone_generators.len());
    for p in &d1.polytope_vertices {
        assert!(d2.polytope_vertices.iter().any(|q| dist(p, q) <= 1e-7));
    }
    for u in &d1.cone_generators {
        assert!(d2.cone_generators.iter().any(|v| dist(u, v) <= 1e-12));
    }
}

#[test]
fn only_reported_halflines_matter() {
    use nehari_core::classify::extreme_halflines;
    let rep = HullRaysRep::new(
        vec![vec![0.0, 0.0]],
        vec![(0, vec![1.0, 0.0]), (0, vec![1.0, 1.0]), (0, vec![0.0, 1.0])],
    )
    .unwrap();
    let lines = extreme_halflines(&rep).unwrap();
    assert_eq!(lines.len(), 2);
    let dirs = equiangular(256, 0.0123);
    for drop in 0..3 {
        let kept: Vec<(usize, Vec<f64>)> =
            rep.rays.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, r)| (r.origin, r.dir.clone())).collect();
        let smaller = HullRaysRep::new(rep.points.clone(), kept).unwrap();
        let changed = dirs.iter().any(|a| smaller.h(a) != rep.h(a));
        let reported = lines.iter().any(|l| l.ray == Some(drop));
        assert_eq!(changed, reported, "ray {drop}");
    }
}
