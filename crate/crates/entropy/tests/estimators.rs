use floer_core::complex::Generator;
use floer_core::novikov::{NovikovScalar, PeriodGroup};
use floer_core::rational::to_f64;
use floer_core::{FloerPackage, PrimeField, Q};
use floer_dynamics::horseshoe::{horseshoe_orbit_table, SymbolicHorseshoe};
use floer_dynamics::packages::{build_package_from_orbits, CouplingRule};
use floer_dynamics::{find_periodic_orbits, SearchConfig, TwistMapModel};
use floer_entropy::*;
use proptest::prelude::*;

fn horseshoe_packages(rule: &CouplingRule, kmax: usize) -> Vec<(usize, FloerPackage)> {
    let h = SymbolicHorseshoe::new(2);
    (1..=kmax)
        .map(|k| (k, build_package_from_orbits(&horseshoe_orbit_table(&h, k), rule, PrimeField::f2()).unwrap().package))
        .collect()
}

fn zero() -> Q {
    Q::from_integer(0)
}

#[test]
fn horseshoe_barcode_entropy_is_one_below_the_gap() {
    let pk = horseshoe_packages(&CouplingRule::Zero, 10);
    let grid = log_eps_grid(0.6, 1e-3, 6);
    let r = barcode_entropy(&pk, &grid, &zero(), Window::TrailingHalf).unwrap();
    for (_, h) in r.h_eps() {
        assert_eq!(h, 1.0);
    }
    assert_eq!(r.value, 1.0);
}

#[test]
fn uncertified_eps_are_excluded() {
    let pk = horseshoe_packages(&CouplingRule::Zero, 4);
    let grid = vec![Q::new(1, 2), Q::new(1, 100)];
    let r = barcode_entropy(&pk, &grid, &Q::new(1, 10), Window::TrailingHalf).unwrap();
    assert_eq!(r.rows.len(), 1);
    assert_eq!(r.excluded, vec![Q::new(1, 100)]);
    assert_eq!(
        barcode_entropy(&pk, &[Q::new(1, 100)], &Q::new(1, 10), Window::TrailingHalf).unwrap_err(),
        EntropyError::NoCertifiedEpsilon
    );
}

#[test]
fn integrable_maps_have_zero_barcode_entropy() {
    for m in [TwistMapModel::shear(), TwistMapModel::identity()] {
        let pk: Vec<(usize, FloerPackage)> = (1..=6)
            .map(|k| {
                let t = find_periodic_orbits(&m, k, &SearchConfig::default());
                (k, build_package_from_orbits(&t, &CouplingRule::Zero, PrimeField::f2()).unwrap().package)
            })
            .collect();
        let r = barcode_entropy(&pk, &[Q::new(1, 10)], &zero(), Window::TrailingHalf).unwrap();
        assert_eq!(r.value, 0.0);
    }
}

#[test]
fn dual_sequences_give_equal_reports() {
    let m = TwistMapModel::standard(6.0);
    let pk: Vec<(usize, FloerPackage)> = (1..=5)
        .map(|k| {
            let t = find_periodic_orbits(&m, k, &SearchConfig::default());
            (k, build_package_from_orbits(&t, &CouplingRule::Morse(m), PrimeField::f2()).unwrap().package)
        })
        .collect();
    let dual: Vec<(usize, FloerPackage)> = pk.iter().map(|(k, p)| (*k, p.dualize())).collect();
    let grid = log_eps_grid(1.0, 1e-3, 5);
    let a = barcode_entropy(&pk, &grid, &zero(), Window::TrailingHalf).unwrap();
    let b = barcode_entropy(&dual, &grid, &zero(), Window::TrailingHalf).unwrap();
    assert_eq!(a, b);
}

#[test]
fn horseshoe_orbit_entropy() {
    for (s, rate) in [(2usize, 1.0), (4, 2.0)] {
        let h = SymbolicHorseshoe::new(s);
        let tables: Vec<_> = (1..=6).map(|k| horseshoe_orbit_table(&h, k)).collect();
        let f = orbit_entropy(&tables, false, Window::TrailingHalf).unwrap();
        assert_eq!(f.rate(), rate);
        assert_eq!(f.max_rate, rate);
    }
}

#[test]
fn gamma_floor_of_planted_pairs() {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let bars = barcodes(&horseshoe_packages(&CouplingRule::PlantedPair, 8)).unwrap();
    let g = gamma_lower_bound(&bars, &Q::new(1, 2));
    assert!(g.bounded_away);
    assert!((to_f64(&g.floor) - (phi - 1.0)).abs() < 1e-9);
    let bars = barcodes(&horseshoe_packages(&CouplingRule::Zero, 6)).unwrap();
    let g = gamma_lower_bound(&bars, &zero());
    assert_eq!(g.floor, zero());
    assert!(!g.bounded_away);
}

#[test]
fn displaced_circle_has_one_bar_of_length_a() {
    // two intersection points at actions a and 0 joined by one strip
    let a = Q::new(3, 4);
    let f = PrimeField::f2();
    let p = FloerPackage::new(
        f,
        PeriodGroup::trivial(),
        vec![Generator::new("x", a, "c"), Generator::new("y", zero(), "c")],
        vec![(0, 1, NovikovScalar::one(f))],
    )
    .unwrap();
    let bars = barcodes(&[(1, p)]).unwrap();
    assert_eq!(gamma_lower_bound(&bars, &zero()).floor, a);
}

#[test]
fn chain_verdict_for_the_shear() {
    let v = compare_theorems(&TheoremInputs { barcode: Some(0.0), volume: Some(0.0), orbit: None, hyperbolic: None }, &Tolerance::exact());
    assert!(v.upper.passed() && v.chain.passed());
}

#[test]
fn report_outputs() {
    let pk = horseshoe_packages(&CouplingRule::PlantedPair, 4);
    let be = barcode_entropy(&pk, &[Q::new(1, 2), Q::new(1, 10)], &zero(), Window::TrailingHalf).unwrap();
    let report = EntropyReport {
        label: "horseshoe".into(),
        point_counts: (1..=4).map(|k| (k, 1 << k)).collect(),
        lengths: vec![],
        barcode: Some(be),
        orbit: None,
        hyperbolic: None,
        volume: None,
        gamma: None,
        verdicts: compare_theorems(&TheoremInputs::default(), &Tolerance::default()),
        subsampling: vec![],
        warnings: vec![],
    };
    let csv = report.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,b_eps=1/2,b_eps=1/10,p,length,beta_max"));
    assert!(lines.next().unwrap().starts_with("1,1,1,2,,0.618"));
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["barcode"]["rows"][0]["eps"], "1/2");
    assert!(report.to_svg().starts_with("<svg"));
}

proptest! {
    #[test]
    fn envelope_is_monotone(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let h = SymbolicHorseshoe::new(2);
        let pk: Vec<(usize, FloerPackage)> = (1..=6)
            .map(|k| {
                let rule = CouplingRule::FarPairs(rng.gen_range(0..(1 << (k - 1)) + 1));
                (k, build_package_from_orbits(&horseshoe_orbit_table(&h, k), &rule, PrimeField::f2()).unwrap().package)
            })
            .collect();
        let grid = log_eps_grid(4.0, 1e-3, 12);
        let r = barcode_entropy(&pk, &grid, &zero(), Window::TrailingHalf).unwrap();
        let hs: Vec<f64> = r.h_eps().into_iter().map(|p| p.1).collect();
        prop_assert!(hs.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn subsampling_of_exact_growth(rate in 1u32..4) {
        let s = GrowthSequence::new(SeriesKind::Bars, (1..=12usize).map(|k| (k, 2f64.powi((rate as usize * k) as i32))).collect()).unwrap();
        for (_, r) in subsampling_ratios(&s, &[2, 3]) {
            prop_assert!((r.unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
