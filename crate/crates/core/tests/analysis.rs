use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regret_core::analysis::{
    cumulative_curve, curve_intercept, curve_quantile, decision_map, marginal_regret_profile, pearson_correlation,
    summarise, top_influential_params, value_at_risk, AnalysisError,
};

/// Smallest sample value whose share of values at or below it reaches `alpha` %, by scanning.
fn var_by_scan(r: &[f64], alpha: f64) -> f64 {
    let n = r.len() as f64;
    let mut candidates = r.to_vec();
    candidates.sort_by(f64::total_cmp);
    *candidates
        .iter()
        .find(|&&v| r.iter().filter(|&&x| x <= v).count() as f64 * 100.0 >= alpha * n)
        .unwrap()
}

/// Correlation from raw sums, done in a different order from the library.
fn pearson_by_sums(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - sx / n) * (b - sy / n)).sum::<f64>() / n;
    let vx: f64 = x.iter().map(|a| (a - sx / n).powi(2)).sum::<f64>() / n;
    let vy: f64 = y.iter().map(|b| (b - sy / n).powi(2)).sum::<f64>() / n;
    cov / (vx * vy).sqrt()
}

#[test]
fn curve_starts_at_the_zero_share() {
    let c = cumulative_curve(&[10.0, 0.0, 5.0, 0.0]).unwrap();
    assert_eq!(c, vec![(0.0, 25.0), (0.0, 50.0), (5.0, 75.0), (10.0, 100.0)]);
    assert_eq!(curve_intercept(&c), 50.0);
    let zeros = cumulative_curve(&[0.0; 5]).unwrap();
    assert!(zeros.iter().all(|p| p.0 == 0.0));
    assert_eq!(curve_intercept(&zeros), 100.0);
    assert_eq!(cumulative_curve(&[]), Err(AnalysisError::EmptyInput));
}

#[test]
fn var_follows_the_lower_quantile() {
    let r: Vec<f64> = (1..=100).map(f64::from).collect();
    assert_eq!(value_at_risk(&r, 50.0).unwrap(), 50.0);
    assert_eq!(value_at_risk(&r, 100.0).unwrap(), 100.0);
    assert_eq!(value_at_risk(&r, 0.0).unwrap(), 1.0);
    let mut nine_zero = vec![0.0; 9];
    nine_zero.push(100.0);
    assert_eq!(value_at_risk(&nine_zero, 90.0).unwrap(), 0.0);
    assert_eq!(value_at_risk(&nine_zero, 90.1).unwrap(), 100.0);
    assert!(matches!(value_at_risk(&r, 100.5), Err(AnalysisError::Domain(_))));
    assert!(matches!(value_at_risk(&r, -1.0), Err(AnalysisError::Domain(_))));
    assert_eq!(value_at_risk(&[], 50.0), Err(AnalysisError::EmptyInput));
}

#[test]
fn summary_rows_describe_their_regrets() {
    let zeros = summarise("z", &[0.0; 4], &[true; 4], &[50.0, 90.0]).unwrap();
    assert_eq!(zeros.optimal_share, 100.0);
    assert_eq!((zeros.min, zeros.mean, zeros.max), (0.0, 0.0, 0.0));
    assert_eq!(zeros.var, vec![(50.0, 0.0), (90.0, 0.0)]);
    let positive = summarise("p", &[3.0, 1.0, 2.0, 4.0], &[false; 4], &[50.0, 90.0]).unwrap();
    assert_eq!(positive.optimal_share, 0.0);
    assert_eq!((positive.min, positive.mean, positive.max), (1.0, 2.5, 4.0));
    assert_eq!(positive.var, vec![(50.0, 2.0), (90.0, 4.0)]);
}

#[test]
fn pearson_handles_lines_and_constants() {
    let x: Vec<f64> = (0..10).map(f64::from).collect();
    let up: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
    let down: Vec<f64> = x.iter().map(|v| -v).collect();
    assert!((pearson_correlation(&x, &up).unwrap().unwrap() - 1.0).abs() < 1e-15);
    assert!((pearson_correlation(&x, &down).unwrap().unwrap() + 1.0).abs() < 1e-15);
    assert_eq!(pearson_correlation(&[3.0; 10], &x).unwrap(), None);
    assert_eq!(pearson_correlation(&x, &x[..4]), Err(AnalysisError::LengthMismatch(10, 4)));
}

#[test]
fn influential_parameters_rank_by_mean_absolute_correlation() {
    assert_eq!(top_influential_params(&[vec![Some(0.2)]], 5), vec![0]);
    let corr = vec![
        vec![Some(0.0), Some(1.0), None, Some(0.0)],
        vec![Some(0.0), Some(-1.0), Some(0.0), None],
    ];
    assert_eq!(top_influential_params(&corr, 1), vec![1]);
    assert_eq!(top_influential_params(&corr, 4), vec![1, 0, 2, 3]);
}

#[test]
fn decision_map_picks_the_cheapest_strategy_per_cell() {
    // Scenario k sits at (k, k): the diagonal cells only.
    let params = vec![vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 2.0, 3.0]];
    let regrets = vec![vec![1.0, 5.0, 1.0, 5.0], vec![2.0, 2.0, 2.0, 2.0], vec![1.0, 9.0, 9.0, 9.0]];
    let g = decision_map(&regrets, &params, 0, 1, 4).unwrap();
    assert_eq!(g.cell(0, 0).winner, Some(0), "tie goes to the lower index");
    assert_eq!(g.cell(1, 1).winner, Some(1));
    assert_eq!(g.cell(2, 2).winner, Some(0));
    assert_eq!(g.cell(0, 1).winner, None);
    assert_eq!(g.cell(0, 1).count, 0);
    assert_eq!(g.cells.iter().map(|c| c.count).sum::<usize>(), 4);
    let uniform = decision_map(&[vec![0.0; 4], vec![1.0; 4]], &params, 0, 1, 2).unwrap();
    assert!(uniform.cells.iter().filter(|c| c.count > 0).all(|c| c.winner == Some(0)));
    assert!(matches!(decision_map(&regrets, &params, 1, 1, 7), Err(AnalysisError::Domain(_))));
    assert!(matches!(decision_map(&regrets, &params, 0, 1, 0), Err(AnalysisError::Domain(_))));
}

#[test]
fn thousand_scenarios_average_about_twenty_per_cell() {
    let s = regret_core::scenarios::lhs_sample(2, 1000, 3).unwrap();
    let params = vec![s.column(0), s.column(1)];
    let g = decision_map(&[vec![0.0; 1000]], &params, 0, 1, 7).unwrap();
    let counts: Vec<usize> = g.cells.iter().map(|c| c.count).collect();
    assert_eq!(counts.iter().sum::<usize>(), 1000);
    let mean = 1000.0 / counts.len() as f64;
    assert!((mean - 1000.0 / 49.0).abs() < 1e-12 && (mean - 20.4).abs() < 0.01);
    let profile = marginal_regret_profile(&vec![0.0; 1000], &params[0], 7).unwrap();
    let average = profile.iter().map(|b| b.count).sum::<usize>() as f64 / 7.0;
    assert!((average - 142.857).abs() < 1e-3);
    // An LHS column fills equal-width bins almost evenly.
    assert!(profile.iter().all(|b| (142..=144).contains(&b.count)), "{profile:?}");
}

#[test]
fn marginal_profile_reports_mean_and_sem() {
    let param = [0.0, 0.1, 0.9, 1.0, 2.0];
    let p = marginal_regret_profile(&[4.0; 5], &param, 2).unwrap();
    assert!(p.iter().all(|b| b.mean == 4.0 && b.sem == 0.0));
    let p = marginal_regret_profile(&[1.0, 3.0, 10.0], &[0.0, 0.0, 3.0], 3).unwrap();
    assert_eq!((p[0].count, p[0].mean, p[0].sem), (2, 2.0, 1.0 / 2f64.sqrt()));
    assert!(p[1].count == 0 && p[1].mean.is_nan() && p[1].low_count);
    assert!(p[2].low_count && p[2].sem == 0.0 && p[2].mean == 10.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn var_is_monotone_and_inverts_the_curve(r in prop::collection::vec(0.0f64..1e3, 1..60), a in 0.0f64..100.0, b in 0.0f64..100.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        let min = r.iter().copied().fold(f64::INFINITY, f64::min);
        let max = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(value_at_risk(&r, 0.0).unwrap(), min);
        prop_assert_eq!(value_at_risk(&r, 100.0).unwrap(), max);
        prop_assert!(value_at_risk(&r, lo).unwrap() <= value_at_risk(&r, hi).unwrap());
        let curve = cumulative_curve(&r).unwrap();
        prop_assert_eq!(curve_quantile(&curve, a), Some(value_at_risk(&r, a).unwrap()));
        prop_assert_eq!(value_at_risk(&r, a).unwrap(), var_by_scan(&r, a));
    }

    #[test]
    fn pearson_is_affine_invariant(
        pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..50),
        scale in 0.1f64..10.0,
        offset in -5.0f64..5.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let Some(r) = pearson_correlation(&x, &y).unwrap() else { return Ok(()) };
        prop_assert!((r - pearson_by_sums(&x, &y)).abs() <= 1e-12);
        let moved: Vec<f64> = x.iter().map(|v| scale * v + offset).collect();
        prop_assert!((pearson_correlation(&moved, &y).unwrap().unwrap() - r).abs() <= 1e-9);
        let flipped: Vec<f64> = y.iter().map(|v| -v).collect();
        prop_assert!((pearson_correlation(&x, &flipped).unwrap().unwrap() + r).abs() <= 1e-12);
    }

    #[test]
    fn map_winners_ignore_a_common_shift(seed in any::<u64>(), shift in -50.0f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 60;
        let params: Vec<Vec<f64>> = (0..3).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
        let regrets: Vec<Vec<f64>> = (0..4).map(|_| (0..n).map(|_| rng.random_range(0..5) as f64).collect()).collect();
        let g = decision_map(&regrets, &params, 0, 2, 5).unwrap();
        prop_assert_eq!(g.cells.iter().map(|c| c.count).sum::<usize>(), n);
        // The same constant added to every strategy in every scenario.
        let shifted: Vec<Vec<f64>> = regrets.iter().map(|r| r.iter().map(|v| v + shift.round()).collect()).collect();
        let h = decision_map(&shifted, &params, 0, 2, 5).unwrap();
        let winners = |m: &regret_core::analysis::DecisionMapGrid| m.cells.iter().map(|c| c.winner).collect::<Vec<_>>();
        prop_assert_eq!(winners(&g), winners(&h));
    }

    #[test]
    fn ranking_matches_a_brute_force_sort(seed in any::<u64>(), m in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corr: Vec<Vec<Option<f64>>> = (0..4)
            .map(|_| (0..6).map(|_| if rng.random::<f64>() < 0.1 { None } else { Some(rng.random_range(-1.0..1.0)) }).collect())
            .collect();
        let top = top_influential_params(&corr, m);
        let score = |p: usize| corr.iter().map(|r| r[p].map_or(0.0, f64::abs)).sum::<f64>() / 4.0;
        let mut expected: Vec<usize> = (0..6).collect();
        // Stable sort keeps declaration order among ties.
        expected.sort_by(|&a, &b| score(b).partial_cmp(&score(a)).unwrap());
        expected.truncate(m);
        prop_assert_eq!(top, expected);
    }
}
