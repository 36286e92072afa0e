use std::io::Write;

use regret_lp::{LinearProgram, Solution, StatusError};

use super::layout::{OutputsVector, VariableLayout};
use crate::model::StorageClass;

/// Optimal annual system cost, MCHF/y.
pub fn total_cost(sol: &Solution) -> Result<f64, StatusError> {
    sol.objective_checked()
}

pub fn outputs_of_interest(sol: &Solution, layout: &VariableLayout) -> Result<OutputsVector, StatusError> {
    sol.objective_checked()?;
    Ok(layout.outputs_at(&sol.primal))
}

/// Consumed biomass of a primal point, TWh/y.
pub fn biomass_consumed(layout: &VariableLayout, x: &[f64]) -> f64 {
    layout.biomass_use.eval(x)
}

/// Largest `|lhs - demand|` over the balance rows of each layer.
pub fn balance_residuals(lp: &LinearProgram, layout: &VariableLayout, x: &[f64]) -> Vec<(String, f64)> {
    let activity = lp.row_activity(x);
    layout
        .layers
        .iter()
        .map(|l| {
            let worst = l
                .rows
                .iter()
                .zip(&l.demand)
                .map(|(r, d)| (activity[r.0] - d).abs())
                .fold(0.0, f64::max);
            (l.id.clone(), worst)
        })
        .collect()
}

/// Net annual release to the atmosphere, Mt/y: emissions and the unabatable
/// remainder minus uptake, removals and compensation. Zero under net zero.
pub fn atmosphere_balance(lp: &LinearProgram, layout: &VariableLayout, x: &[f64]) -> Option<f64> {
    let a = layout.atmosphere?;
    let row = layout.layers[a].rows[0];
    let (cols, vals) = lp.row(row.0);
    let net: f64 = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
    Some((net + layout.co2_extra) / 1000.0)
}

/// Seasonal level over the calendar year recomputed from the charge and
/// discharge rates, starting from the stored end-of-year level. The last
/// entry equals the first for a cyclic solution.
pub fn reconstruct_seasonal_level(layout: &VariableLayout, storage: usize, x: &[f64]) -> Option<Vec<f64>> {
    let s = layout.storages.get(storage)?;
    if s.class != StorageClass::Seasonal {
        return None;
    }
    let h = layout.clock.hours as f64;
    let keep = (1.0 - s.s_loss).powi(layout.clock.hours as i32);
    let days = s.level.len();
    let mut level = Vec::with_capacity(days + 1);
    level.push(x[s.level[days - 1].0]);
    for &td in &layout.day_to_td {
        let prev = *level.last().expect("seeded");
        let net = s.eta_in * x[s.charge[td].0] - x[s.discharge[td].0] / s.eta_out;
        level.push(keep * prev + h * net);
    }
    Some(level)
}

/// Writes `tech,mode,td,hour,value` rows with activity rates expanded to every slice.
pub fn write_flows_csv(layout: &VariableLayout, x: &[f64], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["tech", "mode", "td", "hour", "value"])?;
    let clock = &layout.clock;
    for t in &layout.technologies {
        for (mode, acts) in t.mode_names.iter().zip(&t.activity) {
            for (k, c) in acts.iter().enumerate() {
                for s in clock.slices_of(t.dispatch, k) {
                    let (td, hour) = (s / clock.hours + 1, s % clock.hours + 1);
                    w.write_record([
                        t.id.as_str(),
                        mode,
                        &td.to_string(),
                        &hour.to_string(),
                        &format!("{:.16e}", x[c.0]),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}
