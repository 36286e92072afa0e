//! Small end-to-end run on a model: explore, identify, evaluate, print.
//! Usage: calibrate MODEL N [SEED]

use std::time::Instant;

use regret_core::model::load_model;
use regret_core::regret::{evaluate_regret, explore, reference_basis};
use regret_core::scenarios::lhs_sample;
use regret_core::strategies::{builtin_strategies, identify_strategies};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    let model = load_model(&args[1])?;
    let n: usize = args.get(2).map_or(Ok(20), |s| s.parse())?;
    let seed: u64 = args.get(3).map_or(Ok(42), |s| s.parse())?;
    let t = Instant::now();
    let sc = lhs_sample(model.uncertain_order.len(), n, seed)?;
    let basis = reference_basis(&model)?;
    let ex = explore(&model, &sc, basis.as_ref(), 1)?;
    println!("explore {:.1}s all_optimal={}", t.elapsed().as_secs_f64(), ex.all_optimal());
    let full = ex.optima.iter().filter(|o| o.biomass_used >= 0.95 * o.biomass_available).count();
    println!("biomass >=95%: {full}/{n}");
    for o in &ex.optima {
        println!("  c={:.1} bio {:.2}/{:.2} y={:?}", o.cost, o.biomass_used, o.biomass_available,
            o.outputs.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>());
    }
    let (_, y) = ex.output_matrix();
    let id = identify_strategies(&y, &ex.output_names, 5, 5, seed)?;
    let mut strategies = id.strategies.clone();
    strategies.extend(builtin_strategies(&ex.output_names)?);
    for s in &strategies {
        println!("{} {:?}", s.name, s.kind);
    }
    let t = Instant::now();
    let rm = evaluate_regret(&model, &sc, &ex, &strategies, 1)?;
    println!("evaluate {:.1}s all_optimal={}", t.elapsed().as_secs_f64(), rm.all_optimal());
    for (s, name) in rm.strategies.iter().enumerate() {
        let v = rm.valid_regrets(s);
        let mean = v.iter().sum::<f64>() / v.len().max(1) as f64;
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        println!("{name:>14}: valid {}/{n} mean {mean:.1} min {min:.3}", v.len());
    }
    for (s, i, c) in rm.failures() {
        println!("fail {} scenario {i}: {c}", rm.strategies[s]);
    }
    Ok(())
}
