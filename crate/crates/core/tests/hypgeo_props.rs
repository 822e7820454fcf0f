use proptest::prelude::*;
use treeloc::hypgeo::*;

fn point() -> impl Strategy<Value = UpperHalfPoint<f64>> {
    (-4.0..4.0f64, -2.5..1.5f64).prop_map(|(re, l)| UpperHalfPoint::new(re, l.exp()))
}

fn mobius() -> impl Strategy<Value = MobiusMap<f64>> {
    (0.3..3.0f64, -2.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(a, b, c)| MobiusMap::new(a, b, c, (1.0 + b * c) / a).unwrap())
}

fn weighted(n: usize) -> impl Strategy<Value = WeightedPointSet<f64>> {
    (prop::collection::vec(point(), n), prop::collection::vec(0.05..1.0f64, n))
        .prop_map(|(p, w)| WeightedPointSet::normalized(p, w).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn isometry(m in mobius(), z in point(), w in point()) {
        let d = hyp_dist(z, w).unwrap();
        let dm = hyp_dist(mobius_apply(&m, z), mobius_apply(&m, w)).unwrap();
        prop_assert!((d - dm).abs() <= 1e-10 * d.max(1.0), "{d} vs {dm}");
    }

    #[test]
    fn barycenter_equivariance(m in mobius(), x in weighted(5)) {
        let b = barycenter(&x, 1e-12).unwrap();
        let bm = barycenter(&x.map(&m), 1e-12).unwrap();
        let mb = mobius_apply(&m, b);
        prop_assert!(hyp_dist(bm, mb).unwrap() <= 1e-7, "{bm:?} vs {mb:?}");
    }

    #[test]
    fn jensen(x in weighted(5)) {
        let b = double_barycenter(&x, 1e-12).unwrap();
        let mean: f64 = x.iter().map(|(p, w)| w * f_energy(*p).unwrap()).sum();
        prop_assert!(f_energy(b).unwrap() <= mean + 1e-8);
    }

    #[test]
    fn f_is_geodesically_convex(z0 in point(), z1 in point(), t in 0.0..0.9f64, h1 in 0.05..0.5f64, h2 in 0.05..0.5f64) {
        let (t1, t2) = (t * (1.0 - h1 - h2).max(0.0), t * (1.0 - h1 - h2).max(0.0) + h1);
        let t3 = t2 + h2;
        let f = |s: f64| f_energy(geodesic_combine(z0, z1, s).unwrap()).unwrap();
        let dd = ((f(t3) - f(t2)) / (t3 - t2) - (f(t2) - f(t1)) / (t2 - t1)) / (t3 - t1);
        prop_assert!(dd >= -1e-9, "second divided difference {dd}");
    }

    #[test]
    fn midpoint_halves_distance(z0 in point(), z1 in point()) {
        let m = midpoint(z0, z1).unwrap();
        let d = hyp_dist(z0, z1).unwrap();
        prop_assert!((hyp_dist(m, z0).unwrap() - d / 2.0).abs() <= 1e-10 * d.max(1.0));
        prop_assert!((hyp_dist(m, z1).unwrap() - d / 2.0).abs() <= 1e-10 * d.max(1.0));
    }

    #[test]
    fn convex_hull_confinement(x in weighted(6)) {
        let b = barycenter(&x, 1e-12).unwrap();
        let a0 = x.points().iter().fold(0.0f64, |a, p| a.max(p.re.abs()));
        let t = x.points().iter().fold(f64::INFINITY, |a, p| a.min(p.im));
        prop_assert!(b.re.abs() < a0 + 1e-9);
        prop_assert!(b.im >= t - 1e-9);
    }

    #[test]
    fn exp_inverts_log(z in point(), x in point()) {
        let v = log_map(z, x).unwrap();
        prop_assert!((tangent_norm(z, v) - hyp_dist(z, x).unwrap()).abs() <= 1e-10 * tangent_norm(z, v).max(1.0));
        prop_assert!(hyp_dist(exp_map(z, v).unwrap(), x).unwrap() <= 1e-9);
    }
}
