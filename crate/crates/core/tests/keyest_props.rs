use proptest::prelude::*;
use treeloc::disorder::ScalarDisorder;
use treeloc::grid::WGrid;
use treeloc::hypgeo::{hyp_dist, UpperHalfPoint};
use treeloc::keyest::*;

fn pair(c: f64) -> ScalarDisorder<f64> {
    ScalarDisorder::uniform(&[-c, c]).unwrap()
}

#[test]
fn symmetric_alpha_formula() {
    let q = pair(1.0);
    let c = find_zeta_symmetric(&q, 0.0, 1e-12).unwrap();
    let z = c.zeta;
    assert!((z.re + (z.re / z.abs().powi(2))).abs() < 1e-12);
    for &qv in &[-1.0, 1.0] {
        let a = alpha_map(z, qv).unwrap();
        assert!((a.re + qv / z.im).abs() < 1e-12);
        assert!((a.im - 1.0 / z.abs().powi(2)).abs() < 1e-12);
    }
}

#[test]
fn finders_land_on_g_equals_i() {
    for (q, e) in [(pair(1.0), 0.0), (pair(1.0), 0.8), (pair(0.5), -0.3)] {
        let c = find_zeta_symmetric(&q, e, 1e-10).unwrap();
        assert!(c.abs_zeta > 1.0);
        let shifted = q.shifted(-e);
        let g = g_map(c.zeta, &shifted, 1e-12).unwrap();
        assert!(hyp_dist(g, UpperHalfPoint::i()).unwrap() <= 1e-8, "E = {e}: g = {g:?}");
    }
    let q3 = ScalarDisorder::uniform(&[-1.0, 0.0, 1.0]).unwrap();
    let c = find_zeta_general(&q3, 1e-9).unwrap();
    assert!(c.abs_zeta > 1.0);
    assert!(hyp_dist(g_map(c.zeta, &q3, 1e-12).unwrap(), UpperHalfPoint::i()).unwrap() <= 1e-8);
}

#[test]
fn jensen_chain_on_grid() {
    let q = ScalarDisorder::uniform(&[-1.0, 0.0, 1.0]).unwrap();
    let c = find_zeta_general(&q, 1e-9).unwrap();
    let grid = WGrid::new(256).unwrap();
    for &u in grid.ws() {
        let (lhs, mid, rhs) = jensen_chain(c.zeta, u, &q).unwrap();
        assert!(lhs <= mid + 1e-9 && mid <= rhs + 1e-9, "u = {u}: {lhs} {mid} {rhs}");
    }
}

#[test]
fn tail_limit() {
    let q = pair(1.0);
    let z = UpperHalfPoint::new(0.2, 1.4);
    let tail = key_functional(z, f64::INFINITY, &q);
    assert!((tail - z.abs().powi(2).ln()).abs() < 1e-14);
    for w in [1e6, -1e6] {
        assert!((key_functional(z, w, &q) - tail).abs() < 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn coordinate_forms_agree(a in -1.0..1.0f64, b in 1.1..3.0f64, u in -5.0..5.0f64, c in 0.1..2.0f64) {
        let q = ScalarDisorder::uniform(&[-c, 0.3 * c, c]).unwrap();
        let z = UpperHalfPoint::new(a, b);
        let w = b * u + a;
        let x = key_functional(z, w, &q);
        let y = key_functional_u(z, u, &q);
        prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{x} vs {y}");
    }
}
