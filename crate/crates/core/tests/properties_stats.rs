use helpcom_core::stats::{
    PValueMode, RatingMatrix, TestMethod, cochran_sample_size, fleiss_kappa, mann_whitney_u,
    mann_whitney_u_with, wilcoxon_signed_rank, wilcoxon_signed_rank_with,
};
use proptest::prelude::*;

fn distinct(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(-10_000i32..10_000, n)
        .prop_map(|s| s.into_iter().map(f64::from).collect::<Vec<_>>())
        .prop_shuffle()
}

proptest! {
    #[test]
    fn mann_whitney_is_symmetric(
        xs in prop::collection::vec(-20i32..20, 1..25),
        ys in prop::collection::vec(-20i32..20, 1..25),
    ) {
        let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
        let ys: Vec<f64> = ys.into_iter().map(f64::from).collect();
        let a = mann_whitney_u(&xs, &ys).unwrap();
        let b = mann_whitney_u(&ys, &xs).unwrap();
        prop_assert_eq!(a.statistic, b.statistic);
        prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a.p_value));
    }

    #[test]
    fn wilcoxon_shift_invariance(
        pairs in prop::collection::vec((-1000i64..1000, -1000i64..1000), 1..30),
        c in -100_000i64..100_000,
    ) {
        prop_assume!(pairs.iter().any(|(a, b)| a != b));
        let base: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
        let shifted: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| ((a + c) as f64, (b + c) as f64)).collect();
        let r0 = wilcoxon_signed_rank(&base).unwrap();
        let r1 = wilcoxon_signed_rank(&shifted).unwrap();
        prop_assert_eq!(r0, r1);
        prop_assert!((0.0..=1.0).contains(&r0.p_value));
    }

    #[test]
    fn exact_and_normal_agree_for_mid_sized_samples(xs in distinct(20..25), n1 in 10usize..=12, n2 in 10usize..=12) {
        prop_assume!(xs.len() >= n1 + n2);
        let (a, b) = (&xs[..n1], &xs[n1..n1 + n2]);
        let exact = mann_whitney_u_with(a, b, PValueMode::Exact).unwrap();
        let normal = mann_whitney_u_with(a, b, PValueMode::Normal).unwrap();
        prop_assert_eq!(exact.method, TestMethod::Exact);
        prop_assert!((exact.p_value - normal.p_value).abs() <= 0.02);

        let pairs: Vec<(f64, f64)> = a.iter().map(|&x| (x, 0.0)).collect();
        prop_assume!(a.iter().all(|x| *x != 0.0));
        let mags: std::collections::BTreeSet<i64> = a.iter().map(|x| x.abs() as i64).collect();
        prop_assume!(mags.len() == a.len());
        let exact = wilcoxon_signed_rank_with(&pairs, PValueMode::Exact).unwrap();
        let normal = wilcoxon_signed_rank_with(&pairs, PValueMode::Normal).unwrap();
        prop_assert!((exact.p_value - normal.p_value).abs() <= 0.02);
    }

    #[test]
    fn unanimous_ratings_give_kappa_one(
        labels in prop::collection::vec(0usize..4, 2..20),
        raters in 2u64..8,
    ) {
        prop_assume!(labels.iter().any(|&l| l != labels[0]));
        let rows = labels
            .iter()
            .map(|&l| (0..4).map(|j| if j == l { raters } else { 0 }).collect())
            .collect();
        let m = RatingMatrix::new(rows).unwrap();
        prop_assert_eq!(fleiss_kappa(&m).unwrap(), 1.0);
    }

    #[test]
    fn kappa_at_most_one(rows in prop::collection::vec(prop::collection::vec(0u64..4, 3), 2..10)) {
        let n: u64 = 6;
        let rows: Vec<Vec<u64>> = rows
            .into_iter()
            .map(|r| {
                let a = r[0].min(n);
                let b = r[1].min(n - a);
                vec![a, b, n - a - b]
            })
            .collect();
        let m = RatingMatrix::new(rows).unwrap();
        if let Ok(k) = fleiss_kappa(&m) {
            prop_assert!(k <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn cochran_is_monotone_and_capped(pop in 1u64..1_000_000, step in 0u64..10_000) {
        for conf in [0.90, 0.95, 0.99] {
            let a = cochran_sample_size(pop, conf, 0.05).unwrap();
            let b = cochran_sample_size(pop + step, conf, 0.05).unwrap();
            prop_assert!(a <= b);
            prop_assert!(a <= pop);
            prop_assert!(a >= 1);
        }
    }
}
