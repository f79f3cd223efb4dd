use partmatch_core::matching::{build_dataset, Phase, SurveyRecord};
use partmatch_core::special::t_cdf;
use partmatch_core::{
    correlated_t, matched_paired_t, pearson_cor, pearson_t, quantile_cor, quantile_t, two_sample_t,
    PartiallyMatchedDataset,
};
use proptest::prelude::*;

/// Datasets with 4 to 40 pairs, a random matched count of at least 4, and
/// enough spread that every test is defined.
fn dataset() -> impl Strategy<Value = PartiallyMatchedDataset> {
    (4usize..=40)
        .prop_flat_map(|n| (prop::collection::vec(-50.0..50.0f64, n), prop::collection::vec(-50.0..50.0f64, n), 4..=n))
        .prop_filter_map("degenerate", |(x, y, m)| {
            let ds = PartiallyMatchedDataset::from_columns(x, y, m).ok()?;
            let defined = two_sample_t(&ds).is_ok()
                && matched_paired_t(&ds).is_ok()
                && quantile_t(&ds, 0.3).is_ok()
                && pearson_t(&ds).is_ok();
            defined.then_some(ds)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn two_sample_is_correlated_at_zero(ds in dataset()) {
        let a = two_sample_t(&ds).unwrap();
        let b = correlated_t(&ds, 0.0).unwrap();
        prop_assert_eq!(a.statistic.to_bits(), b.statistic.to_bits());
        prop_assert_eq!(a.p_value.to_bits(), b.p_value.to_bits());
        prop_assert_eq!(a.df, b.df);
    }
}

proptest! {
    #[test]
    fn fisher_round_trip(r in -0.999_999..0.999_999f64) {
        prop_assert!((r.atanh().tanh() - r).abs() < 1e-12);
    }

    #[test]
    fn t_cdf_symmetric_and_monotone(x in -30.0..30.0f64, dx in 1e-3..5.0f64, df in 1.0..1000.0f64) {
        let lo = t_cdf(x, df).unwrap();
        let hi = t_cdf(x + dx, df).unwrap();
        prop_assert!(hi >= lo);
        prop_assert!((lo + t_cdf(-x, df).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_correlation_increases_with_q(ds in dataset(), q1 in 0.01..0.98f64, gap in 0.005..0.5f64) {
        let q2 = (q1 + gap).min(0.99);
        let view = ds.view();
        let a = quantile_cor(view.matched_pre(), view.matched_post(), q1).unwrap();
        let b = quantile_cor(view.matched_pre(), view.matched_post(), q2).unwrap();
        prop_assert!(b.r_q > a.r_q);
        // below the median the quantile sits under the point estimate
        if q1 < 0.5 {
            prop_assert!(a.r_q < a.r);
        } else if q1 > 0.5 {
            prop_assert!(a.r_q > a.r);
        }
    }

    #[test]
    fn median_quantile_is_pearson(ds in dataset()) {
        let view = ds.view();
        let est = quantile_cor(view.matched_pre(), view.matched_post(), 0.5).unwrap();
        let r = pearson_cor(view.matched_pre(), view.matched_post()).unwrap();
        prop_assert!((est.r_q - r).abs() < 1e-12);
    }

    #[test]
    fn p_value_falls_as_rho_rises(ds in dataset(), r1 in -0.95..0.9f64, gap in 0.01..0.5f64) {
        let r2 = (r1 + gap).min(0.98);
        let a = correlated_t(&ds, r1).unwrap();
        let b = correlated_t(&ds, r2).unwrap();
        prop_assume!(a.statistic.abs() > 1e-9);
        prop_assert!(b.p_value <= a.p_value);
        prop_assert!(b.statistic.abs() > a.statistic.abs());
    }

    #[test]
    fn tests_are_scale_invariant(ds in dataset(), k in 0.01..100.0f64) {
        let scaled = ds.scaled(k).unwrap();
        let pairs = [
            (two_sample_t(&ds).unwrap(), two_sample_t(&scaled).unwrap()),
            (matched_paired_t(&ds).unwrap(), matched_paired_t(&scaled).unwrap()),
            (quantile_t(&ds, 0.3).unwrap(), quantile_t(&scaled, 0.3).unwrap()),
            (pearson_t(&ds).unwrap(), pearson_t(&scaled).unwrap()),
            (correlated_t(&ds, 0.4).unwrap(), correlated_t(&scaled, 0.4).unwrap()),
        ];
        for (a, b) in pairs {
            prop_assert!((a.statistic - b.statistic).abs() <= 1e-9 * (1.0 + a.statistic.abs()));
            prop_assert!((a.p_value - b.p_value).abs() <= 1e-9);
            prop_assert_eq!(a.df, b.df);
        }
    }

    #[test]
    fn matching_ignores_record_order(
        values in prop::collection::vec((0usize..12, any::<bool>(), -10.0..10.0f64), 4..40),
        seed in any::<u64>(),
    ) {
        let mut recs: Vec<SurveyRecord> = values
            .iter()
            .map(|&(id, pre, v)| {
                let id = (id < 10).then(|| format!("id{id}"));
                SurveyRecord { id, phase: if pre { Phase::Pre } else { Phase::Post }, value: v }
            })
            .collect();
        let first = build_dataset(&recs);
        // deterministic Fisher-Yates driven by a xorshift stream
        let mut s = seed | 1;
        for i in (1..recs.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            recs.swap(i, (s % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(first, build_dataset(&recs));
    }
}
