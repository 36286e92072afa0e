//! Solves one model at a fixed hypercube coordinate and prints a digest.
//!
//! `cargo run --release -p regret-core --example solve_point -- MODEL [U]`

use std::time::Instant;

use regret_core::model::{load_model, resolve_scenario};
use regret_core::system_lp::{atmosphere_balance, biomass_consumed, build_lp, outputs_of_interest};
use regret_lp::solve_lp;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().ok_or("usage: solve_point MODEL [U]")?;
    let u: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.5);
    let model = load_model(&path)?;
    let cm = resolve_scenario(&model, &vec![u; model.uncertain_order.len()])?;
    let (lp, layout) = build_lp(&cm)?;
    println!("{} columns, {} rows", lp.num_cols(), lp.num_rows());
    let start = Instant::now();
    let sol = solve_lp(&lp)?;
    println!("{:?} in {:.2?}, {} iterations", sol.status, start.elapsed(), sol.iterations);
    let y = outputs_of_interest(&sol, &layout)?;
    println!("cost {:.3} MCHF/y", sol.objective);
    for (name, v) in layout.output_names.iter().zip(&y.0) {
        println!("  {name:<12} {v:8.3}");
    }
    println!(
        "biomass {:.3} of {:.3} TWh, atmosphere {:?} Mt",
        biomass_consumed(&layout, &sol.primal),
        layout.biomass_availability,
        atmosphere_balance(&lp, &layout, &sol.primal)
    );
    for (t, name) in layout.technologies.iter().map(|t| (t, &t.id)) {
        let cap = sol.primal[t.capacity.0];
        if cap > 1e-6 {
            println!("  F[{name}] = {cap:.4}");
        }
    }
    for r in &layout.resources {
        let total: f64 = r
            .usage
            .iter()
            .enumerate()
            .map(|(k, c)| layout.clock.annual_weight(r.grain, k) * sol.primal[c.0])
            .sum();
        if total.abs() > 1e-6 {
            println!("  {} = {:.1} GWh", r.id, total);
        }
    }
    Ok(())
}
