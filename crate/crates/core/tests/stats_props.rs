mod common;

use common::oracle::*;
use proptest::prelude::*;
use siex_core::stats::special::log10_normal_two_tailed;
use siex_core::stats::{
    efficiency_curve, paired_test, two_prop_z, PairedOptions, TestMethod, ZTestOptions, EPSILON_COUNT,
};
use siex_core::SignificanceResultF64;

#[test]
fn normal_tail_matches_table() {
    for (i, &want) in LOG10_P_Z_GRID.iter().enumerate() {
        let z = (i + 1) as f64;
        let got = log10_normal_two_tailed(z);
        assert!((got - want).abs() < 1e-6, "z={z}: {got} vs {want}");
        assert!((log10_normal_two_tailed(-z) - want).abs() < 1e-6);
    }
}

#[test]
fn two_proportion_cases() {
    for (k1, n1, k2, n2, z, lp) in TWO_PROP_CASES {
        let r: SignificanceResultF64 = two_prop_z(k1, n1, k2, n2, &ZTestOptions::default()).unwrap();
        assert!((r.statistic - z).abs() < 1e-9);
        assert!((r.log10_p - lp).abs() < 1e-6);
        assert!(r.significant);
    }
}

#[test]
fn paired_cases() {
    let opts = PairedOptions::default();
    let r = paired_test(&PAIRED_A, &PAIRED_B, TestMethod::PairedT, &opts).unwrap();
    assert!((r.statistic - PAIRED_T).abs() < 1e-9);
    assert!((r.p_two_tailed - PAIRED_P).abs() / PAIRED_P < 1e-8);
    let (a, b) = extreme_pairs();
    let r = paired_test(&a, &b, TestMethod::PairedT, &opts).unwrap();
    assert!((r.statistic - EXTREME_T).abs() / EXTREME_T < 1e-9);
    assert!((r.log10_p - EXTREME_LOG10_P).abs() < 1e-6);
    assert_eq!(r.p_two_tailed, 0.0);
    let w = paired_test(&WILCOXON_A, &WILCOXON_B, TestMethod::Wilcoxon, &opts).unwrap();
    assert!((w.p_two_tailed - WILCOXON_P).abs() < 1e-12);
}

#[test]
fn bootstrap_ignores_thread_count() {
    let (a, b) = (&WILCOXON_A, &WILCOXON_B);
    let opts = PairedOptions { resamples: 2000, seed: 11, ..PairedOptions::default() };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| paired_test(a, b, TestMethod::Bootstrap, &opts).unwrap())
    };
    let one: SignificanceResultF64 = run(1);
    assert_eq!(one, run(4));
}

proptest! {
    #[test]
    fn z_is_antisymmetric(n1 in 1usize..400, n2 in 1usize..400, f1 in 0.0f64..=1.0, f2 in 0.0f64..=1.0) {
        let (k1, k2) = ((f1 * n1 as f64) as usize, (f2 * n2 as f64) as usize);
        let o = ZTestOptions::default();
        let ab: SignificanceResultF64 = two_prop_z(k1, n1, k2, n2, &o).unwrap();
        let ba: SignificanceResultF64 = two_prop_z(k2, n2, k1, n1, &o).unwrap();
        prop_assert!((ab.statistic + ba.statistic).abs() <= 1e-12 * ab.statistic.abs().max(1.0));
        prop_assert!((ab.log10_p - ba.log10_p).abs() <= 1e-12 * ab.log10_p.abs().max(1.0));
        prop_assert!(ab.log10_p <= 0.0);
    }

    #[test]
    fn tail_decreases_with_z(z in 0.0f64..60.0, dz in 0.01f64..5.0) {
        prop_assert!(log10_normal_two_tailed(z + dz) < log10_normal_two_tailed(z));
    }

    #[test]
    fn more_successes_never_raise_p(k in 151usize..299) {
        let o = ZTestOptions::default();
        let lo: SignificanceResultF64 = two_prop_z(k, 300, 150, 300, &o).unwrap();
        let hi: SignificanceResultF64 = two_prop_z(k + 1, 300, 150, 300, &o).unwrap();
        prop_assert!(hi.log10_p < lo.log10_p);
    }

    /// Appending a size whose value stays within epsilon of the plateau
    /// value, with a sub-epsilon step from the last point, keeps the plateau.
    #[test]
    fn plateau_is_stable_under_small_extensions(extra in prop::collection::vec(-19.0f64..19.0, 1..5)) {
        let mut pts = vec![(100u32, 144.0), (300, 267.0), (500, 282.0), (1000, 288.0)];
        let plateau_value = 267.0;
        for (i, offset) in extra.iter().enumerate() {
            let last = pts.last().unwrap().1;
            let v = plateau_value + offset;
            prop_assume!(v - last < EPSILON_COUNT);
            pts.push((2000 + 1000 * i as u32, v));
        }
        let c = efficiency_curve("parse-count", &pts, EPSILON_COUNT).unwrap();
        prop_assert_eq!(c.plateau_size, Some(300));
    }
}
