use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regret_lp::mps::{read_mps, write_mps};
use regret_lp::{
    duality_gap, solve_lp, solve_with, vertex_enumeration_oracle, LinearProgram, Sense, SimplexOptions,
    Status,
};

fn one_var(upper_row: Option<f64>) -> LinearProgram {
    let mut lp = LinearProgram::new("one");
    let x = lp.add_col("x", -1.0, 0.0, f64::INFINITY);
    if let Some(b) = upper_row {
        lp.add_row("cap", [(x, 1.0)], Sense::Le, b);
    }
    lp
}

fn random_lp(rng: &mut ChaCha8Rng, max_cols: usize, max_rows: usize) -> LinearProgram {
    let n = rng.random_range(1..=max_cols);
    let m = rng.random_range(1..=max_rows);
    let mut lp = LinearProgram::new("rand");
    let cols: Vec<_> = (0..n)
        .map(|j| {
            let lower = if rng.random_bool(0.8) { 0.0 } else { -(rng.random_range(1..=3) as f64) };
            let upper = if rng.random_bool(0.5) { f64::INFINITY } else { rng.random_range(1..=10) as f64 };
            let cost = rng.random_range(-5..=5) as f64;
            lp.add_col(format!("x{j}"), cost, lower, upper)
        })
        .collect();
    for i in 0..m {
        let mut coeffs = Vec::new();
        for &c in &cols {
            if rng.random_bool(0.6) {
                coeffs.push((c, rng.random_range(-5..=5) as f64));
            }
        }
        let sense = match rng.random_range(0..6) {
            0 => Sense::Eq,
            1 | 2 => Sense::Ge,
            _ => Sense::Le,
        };
        let rhs = rng.random_range(-10..=20) as f64;
        lp.add_row(format!("r{i}"), coeffs, sense, rhs);
    }
    lp
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

#[test]
fn bounded_maximisation_of_one_variable() {
    let lp = one_var(Some(3.0));
    let sol = solve_lp(&lp).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert!((sol.primal[0] - 3.0).abs() < 1e-12);
    assert!((sol.objective + 3.0).abs() < 1e-12);
    let oracle = vertex_enumeration_oracle(&lp).unwrap();
    assert_eq!(oracle.status, sol.status);
    assert_eq!(oracle.objective, -3.0);
}

#[test]
fn unbounded_ray_is_detected() {
    let lp = one_var(None);
    assert_eq!(solve_lp(&lp).unwrap().status, Status::Unbounded);
    assert_eq!(vertex_enumeration_oracle(&lp).unwrap().status, Status::Unbounded);
}

#[test]
fn contradictory_bounds_are_infeasible() {
    let mut lp = LinearProgram::new("inf");
    let x = lp.add_col("x", 1.0, 0.0, f64::INFINITY);
    lp.add_row("neg", [(x, 1.0)], Sense::Le, -1.0);
    assert_eq!(solve_lp(&lp).unwrap().status, Status::Infeasible);
    assert_eq!(vertex_enumeration_oracle(&lp).unwrap().status, Status::Infeasible);
}

#[test]
fn assignment_lp_matches_oracle() {
    // 3 workers x 2 jobs, each job covered once, each worker at most once.
    let cost = [[4.0, 2.0], [3.0, 7.0], [5.0, 1.0]];
    let mut lp = LinearProgram::new("assign");
    let mut x = Vec::new();
    for (w, row) in cost.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            x.push(((w, j), lp.add_col(format!("x{w}{j}"), c, 0.0, 1.0)));
        }
    }
    for j in 0..2 {
        let coeffs: Vec<_> = x.iter().filter(|((_, jj), _)| *jj == j).map(|(_, c)| (*c, 1.0)).collect();
        lp.add_row(format!("job{j}"), coeffs, Sense::Eq, 1.0);
    }
    for w in 0..3 {
        let coeffs: Vec<_> = x.iter().filter(|((ww, _), _)| *ww == w).map(|(_, c)| (*c, 1.0)).collect();
        lp.add_row(format!("worker{w}"), coeffs, Sense::Le, 1.0);
    }
    let sol = solve_lp(&lp).unwrap();
    let oracle = vertex_enumeration_oracle(&lp).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert_eq!(oracle.status, Status::Optimal);
    assert!(rel_close(sol.objective, oracle.objective, 1e-10));
    assert!((sol.objective - 4.0).abs() < 1e-10);
}

#[test]
fn random_small_lps_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut statuses = [0usize; 3];
    for _ in 0..300 {
        let lp = random_lp(&mut rng, 5, 8);
        let sol = solve_lp(&lp).unwrap();
        let oracle = vertex_enumeration_oracle(&lp).unwrap();
        assert_eq!(sol.status, oracle.status, "{lp:?}");
        statuses[sol.status as usize] += 1;
        if sol.is_optimal() {
            assert!(rel_close(sol.objective, oracle.objective, 1e-8), "{} vs {}", sol.objective, oracle.objective);
            let gap = duality_gap(&lp, &sol).unwrap();
            assert!(gap <= 1e-7 * (1.0 + sol.objective.abs()));
        }
    }
    assert!(statuses.iter().all(|&c| c > 10), "status mix {statuses:?}");
}

#[test]
fn warm_start_reaches_the_same_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = SimplexOptions::default();
    let mut checked = 0;
    while checked < 50 {
        let lp = random_lp(&mut rng, 6, 10);
        let first = solve_lp(&lp).unwrap();
        let Some(basis) = first.basis.clone() else { continue };
        let mut tighter = lp.clone();
        let cols: Vec<_> = (0..lp.num_cols()).map(regret_lp::Col).collect();
        tighter.add_row("extra", cols.iter().map(|&c| (c, 1.0)), Sense::Le, 3.0);
        let cold = solve_lp(&tighter).unwrap();
        let warm = solve_with(&tighter, &opts, Some(&basis.with_extra_rows(1))).unwrap();
        assert_eq!(cold.status, warm.status);
        if cold.is_optimal() {
            assert!(rel_close(cold.objective, warm.objective, 1e-9));
            assert!(cold.objective >= first.objective - 1e-9 * (1.0 + first.objective.abs()));
        }
        checked += 1;
    }
}

#[test]
fn solves_are_bitwise_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let lp = random_lp(&mut rng, 6, 12);
        assert_eq!(solve_lp(&lp).unwrap(), solve_lp(&lp).unwrap());
    }
}

#[test]
fn mps_round_trip_preserves_the_problem() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let lp = random_lp(&mut rng, 6, 12);
        let mut buf = Vec::new();
        write_mps(&lp, &mut buf).unwrap();
        let back = read_mps(buf.as_slice()).unwrap();
        assert_eq!(back.col_names(), lp.col_names());
        assert_eq!(back.row_names(), lp.row_names());
        assert_eq!(back.cost(), lp.cost());
        assert_eq!(back.rhs(), lp.rhs());
        assert_eq!(back.lower(), lp.lower());
        assert_eq!(back.upper(), lp.upper());
        for i in 0..lp.num_rows() {
            assert_eq!(back.row(i), lp.row(i));
        }
    }
}

/// Transportation-style LP larger than the oracle can handle; checked through
/// its closed-form optimum (cheapest source per sink when supply is ample).
#[test]
fn medium_transport_problem_has_greedy_optimum() {
    let sources = 30;
    let sinks = 40;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut lp = LinearProgram::new("transport");
    let mut cost = vec![vec![0.0; sinks]; sources];
    let mut x = vec![Vec::new(); sources];
    for s in 0..sources {
        for t in 0..sinks {
            cost[s][t] = rng.random_range(1.0..10.0);
            x[s].push(lp.add_col(format!("x_{s}_{t}"), cost[s][t], 0.0, f64::INFINITY));
        }
    }
    let demand: Vec<f64> = (0..sinks).map(|_| rng.random_range(1.0..5.0)).collect();
    for s in 0..sources {
        lp.add_row(format!("supply{s}"), x[s].iter().map(|&c| (c, 1.0)), Sense::Le, 1e3);
    }
    for t in 0..sinks {
        lp.add_row(format!("demand{t}"), (0..sources).map(|s| (x[s][t], 1.0)), Sense::Ge, demand[t]);
    }
    let sol = solve_lp(&lp).unwrap();
    let expected: f64 = (0..sinks)
        .map(|t| demand[t] * (0..sources).map(|s| cost[s][t]).fold(f64::INFINITY, f64::min))
        .sum();
    assert!(rel_close(sol.objective, expected, 1e-10));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objective_scaling_scales_the_optimum(seed in 0u64..10_000, lambda in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lp = random_lp(&mut rng, 5, 8);
        let mut scaled = lp.clone();
        scaled.scale_objective(lambda);
        let a = vertex_enumeration_oracle(&lp).unwrap();
        let b = solve_lp(&scaled).unwrap();
        prop_assert_eq!(a.status, b.status);
        if a.is_optimal() {
            prop_assert!(rel_close(lambda * a.objective, b.objective, 1e-8));
            // The solver's argmin for the scaled problem is optimal for the original.
            prop_assert!(rel_close(lp.objective_value(&b.primal), a.objective, 1e-8));
        }
    }

    #[test]
    fn adding_a_constraint_never_lowers_the_optimum(seed in 0u64..10_000, rhs in -5i32..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lp = random_lp(&mut rng, 5, 7);
        let base = solve_lp(&lp).unwrap();
        prop_assume!(base.is_optimal());
        let mut more = lp.clone();
        let coeffs: Vec<_> = (0..lp.num_cols()).map(|j| (regret_lp::Col(j), rng.random_range(-3..=3) as f64)).collect();
        more.add_row("added", coeffs, Sense::Le, rhs as f64);
        let sol = solve_lp(&more).unwrap();
        let oracle = vertex_enumeration_oracle(&more).unwrap();
        prop_assert_eq!(sol.status, oracle.status);
        prop_assert!(sol.status != Status::Unbounded);
        if sol.is_optimal() {
            prop_assert!(sol.objective >= base.objective - 1e-9 * (1.0 + base.objective.abs()));
        }
    }
}
