use floer_core::barcode::barcode;
use floer_core::PrimeField;
use floer_dynamics::crofton::{crofton_check, curve_suite, TomographSpec};
use floer_dynamics::curves::Polyline;
use floer_dynamics::horseshoe::{horseshoe_orbit_table, SymbolicHorseshoe};
use floer_dynamics::orbits::{action_gap_scan, find_periodic_orbits, OrbitData, SearchConfig, Stability};
use floer_dynamics::packages::{build_package_from_orbits, CouplingRule};
use floer_dynamics::twist::{Domain, TwistMapModel};

/// Σ sign(2 - tr) over the points of Fix(φ^k); the Lefschetz number of a map homotopic to a shear is 0.
fn index_sum(t: &floer_dynamics::OrbitTable) -> i64 {
    t.records
        .iter()
        .map(|r| if r.trace < 2.0 { r.minimal_period as i64 } else { -(r.minimal_period as i64) })
        .sum()
}

#[test]
fn periodic_point_indices_sum_to_the_lefschetz_number() {
    for k_strength in [6.0, 8.0] {
        let m = TwistMapModel::standard(k_strength);
        for k in 1..=6 {
            let t = find_periodic_orbits(&m, k, &SearchConfig::default());
            assert_eq!(index_sum(&t), 0, "K={k_strength} k={k}");
            assert!(!t.partial);
        }
    }
}

#[test]
fn periodic_points_are_distinct_and_closed() {
    let m = TwistMapModel::standard(6.0);
    let t = find_periodic_orbits(&m, 5, &SearchConfig::default());
    let mut all = Vec::new();
    for r in &t.records {
        let OrbitData::Twist { points, .. } = &r.data else { unreachable!() };
        for &(x, y) in points {
            let (mut a, mut b) = (x, y);
            for _ in 0..5 {
                (a, b) = m.step(a, b);
            }
            let dx = (a - x) - (a - x).round();
            let dy = (b - y) - (b - y).round();
            assert!(dx.abs() < 1e-8 && dy.abs() < 1e-8);
            all.push(((x * 1e6).round() as i64, (y * 1e6).round() as i64));
        }
    }
    let n = all.len();
    all.sort();
    all.dedup();
    assert_eq!(all.len(), n);
    assert_eq!(n, t.point_count());
}

#[test]
fn domain_restricts_winding() {
    let m = TwistMapModel::standard(6.0);
    let torus = find_periodic_orbits(&m, 3, &SearchConfig::default());
    let cyl = find_periodic_orbits(&m.with_domain(Domain::Cylinder), 3, &SearchConfig::default());
    let zero = torus.records.iter().filter(|r| r.class.ends_with("n0")).map(|r| r.minimal_period).sum::<usize>();
    assert_eq!(cyl.point_count(), zero);
}

#[test]
fn horseshoe_counts_up_to_sixteen() {
    let h = SymbolicHorseshoe::new(2);
    for k in 1..=16 {
        assert_eq!(horseshoe_orbit_table(&h, k).point_count(), 1usize << k);
    }
    assert_eq!(horseshoe_orbit_table(&SymbolicHorseshoe::new(3), 2).point_count(), 9);
    assert_eq!(horseshoe_orbit_table(&h, 1).records.len(), 2);
}

#[test]
fn horseshoe_zero_differential_keeps_every_bar() {
    let h = SymbolicHorseshoe::new(2);
    for k in 1..=8 {
        let t = horseshoe_orbit_table(&h, k);
        let b = build_package_from_orbits(&t, &CouplingRule::Zero, PrimeField::f2()).unwrap();
        let bc = barcode(&b.package).unwrap();
        assert_eq!(bc.infinite_count(), 1 << k);
        assert_eq!(bc.b_eps(&floer_core::Q::from_integer(5)), 1 << k);
    }
}

#[test]
fn horseshoe_action_gap_is_bounded_below() {
    // actions depend only on the symbol counts, so the gap is exactly φ - 1
    let h = SymbolicHorseshoe::new(2);
    let tables: Vec<_> = (1..=10).map(|k| horseshoe_orbit_table(&h, k)).collect();
    let r = action_gap_scan(&tables, false, 0.5);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    for (k, g) in &r.per_k {
        if *k == 1 {
            assert!((g.unwrap() - (phi - 1.0)).abs() < 1e-12);
        } else {
            assert!((g.unwrap() - (phi - 1.0)).abs() < 1e-9, "{k} {g:?}");
        }
    }
    assert!(r.bounded_away);
}

#[test]
fn standard_map_hyperbolic_gap_is_positive() {
    let m = TwistMapModel::standard(6.0);
    let tables: Vec<_> = (1..=5).map(|k| find_periodic_orbits(&m, k, &SearchConfig::default())).collect();
    let r = action_gap_scan(&tables, true, 0.0);
    assert!(r.floor.unwrap() > 0.0);
    assert!(tables.iter().all(|t| t.records.iter().all(|r| r.stability != Stability::Parabolic)));
}

#[test]
fn morse_packages_validate_and_pair_within_classes() {
    for k_strength in [2.0, 6.0] {
        let m = TwistMapModel::standard(k_strength);
        for k in 1..=5 {
            let t = find_periodic_orbits(&m, k, &SearchConfig::default());
            let b = build_package_from_orbits(&t, &CouplingRule::Morse(m), PrimeField::new(3).unwrap()).unwrap();
            let v = b.package.validate();
            assert!(v.is_valid(), "{:?}", v.violations);
            assert_eq!(b.package.len(), t.point_count());
        }
    }
}

#[test]
fn far_pairs_respect_actions() {
    let h = SymbolicHorseshoe::new(2);
    let t = horseshoe_orbit_table(&h, 6);
    let b = build_package_from_orbits(&t, &CouplingRule::FarPairs(10), PrimeField::f2()).unwrap();
    assert!(b.package.validate().is_valid());
    assert_eq!(barcode(&b.package).unwrap().finite_count(), 10);
}

fn spec() -> TomographSpec {
    TomographSpec::from_text("translate 2\nradius 0.5\nbasis cos 1\nbasis sin 1\nbasis cos 2\n").unwrap()
}

#[test]
fn crofton_ratio_is_constant_for_horizontal_circles() {
    let s = spec();
    let ratios: Vec<f64> =
        [-0.5, 0.0, 0.5].iter().map(|y| crofton_check(&s, &Polyline::horizontal(*y), 4000, 3).unwrap().ratio).collect();
    for r in &ratios {
        assert!((r / ratios[1] - 1.0).abs() < 0.05, "{ratios:?}");
    }
}

#[test]
fn crofton_integral_doubles_with_a_doubled_curve() {
    let s = spec();
    let (_, c) = curve_suite().into_iter().find(|(n, _)| n == "circle_0.4").unwrap();
    let mut twice = c.points.clone();
    twice.extend(c.points.iter().skip(1));
    let a = crofton_check(&s, &c, 4000, 5).unwrap();
    let b = crofton_check(&s, &Polyline::new(twice), 4000, 5).unwrap();
    assert!((b.integral / a.integral - 2.0).abs() < 0.05);
    assert!((b.length / a.length - 2.0).abs() < 1e-9);
}

#[test]
fn crofton_suite_is_bounded_by_the_family_constant() {
    let s = spec();
    for (name, c) in curve_suite() {
        let r = crofton_check(&s, &c, 4000, 11).unwrap();
        assert!(r.ratio <= 1.1 * r.constant, "{name}: {} > {}", r.ratio, r.constant);
    }
}
