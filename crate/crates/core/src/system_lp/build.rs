use regret_lp::{Col, LinearProgram, Sense};

use super::layout::{LayerRows, LinearForm, ResourceCols, StorageCols, TechCols, VarRef, VariableLayout};
use super::time::Clock;
use super::BuildError;
use crate::model::{
    annualization_factor, CapacityFactor, ConcreteModel, Dispatch, Resolution, ResourceKind, ResourceUnits,
    SplitShare, StorageClass,
};

const INF: f64 = f64::INFINITY;
/// TWh, Bpkm or Mt to the model's GWh, Mpkm or kt.
const TO_MODEL_UNITS: f64 = 1000.0;
/// CHF per tonne to MCHF per kt.
const PER_TONNE_TO_PER_KT: f64 = 1e-3;

struct Builder<'a> {
    cm: &'a ConcreteModel,
    clock: Clock,
    lp: LinearProgram,
    vars: Vec<VarRef>,
    /// Balance terms per layer and period.
    balance: Vec<Vec<Vec<(Col, f64)>>>,
    /// Grid of each layer, if any, with its producer terms per period.
    grid_of_layer: Vec<Option<usize>>,
    grid_terms: Vec<Vec<Vec<(Col, f64)>>>,
    pending: Vec<(String, Vec<(Col, f64)>, Sense, f64)>,
}

impl<'a> Builder<'a> {
    fn col(&mut self, name: String, cost: f64, lo: f64, up: f64, what: VarRef) -> Col {
        self.vars.push(what);
        self.lp.add_col(name, cost, lo, up)
    }

    fn row(&mut self, name: String, terms: Vec<(Col, f64)>, sense: Sense, rhs: f64) {
        self.pending.push((name, terms, sense, rhs));
    }

    /// Adds a variable of grain `d` delivering `coef` per unit rate into `layer`.
    fn deliver(&mut self, col: Col, d: Dispatch, k: usize, layer: usize, coef: f64) {
        let res = self.cm.layers[layer].resolution;
        let grid = self.grid_of_layer[layer];
        let kept = match grid {
            Some(g) if coef > 0.0 => 1.0 - self.cm.grids[g].loss_pct,
            _ => 1.0,
        };
        for (p, h) in self.clock.footprint(d, k, res) {
            self.balance[layer][p].push((col, coef * h * kept));
            if let (Some(g), true) = (grid, coef > 0.0) {
                self.grid_terms[g][p].push((col, coef * h));
            }
        }
    }

    fn layer_of(&self, id: &str) -> usize {
        // References are checked when the model is loaded.
        self.cm.layer_index(id).expect("validated layer reference")
    }
}

/// Builds the cost-minimisation LP of one scenario.
pub fn build_lp(cm: &ConcreteModel) -> Result<(LinearProgram, VariableLayout), BuildError> {
    let clock = Clock::new(&cm.time);
    let n_layers = cm.layers.len();
    let mut grid_of_layer = vec![None; n_layers];
    for (g, grid) in cm.grids.iter().enumerate() {
        if let Some(l) = cm.layer_index(&grid.layer) {
            grid_of_layer[l] = Some(g);
        }
    }
    let balance = cm.layers.iter().map(|l| vec![Vec::new(); clock.periods(l.resolution)]).collect();
    let grid_terms = cm
        .grids
        .iter()
        .map(|g| {
            let r = cm.layer(&g.layer).map_or(Resolution::Annual, |l| l.resolution);
            vec![Vec::new(); clock.periods(r)]
        })
        .collect();
    let mut b = Builder {
        cm,
        clock,
        lp: LinearProgram::new(cm.name.clone()),
        vars: Vec::new(),
        balance,
        grid_of_layer,
        grid_terms,
        pending: Vec::new(),
    };
    let i_rate = cm.general.i_rate / 100.0;
    let demand = layer_demands(cm, &b.clock);
    check_suppliers(cm, &demand)?;

    let technologies = add_technologies(&mut b, i_rate, &demand)?;
    let resources = add_resources(&mut b, &demand);
    let storages = add_storages(&mut b, i_rate)?;
    let grids = add_grids(&mut b, i_rate)?;

    // Atmosphere: emissions plus the unabatable remainder are offset by
    // removals and purchased compensation, or released freely without a target.
    let atmosphere = cm.layer_index(&cm.atmosphere_layer);
    let co2_extra = cm.general.co2_extra * TO_MODEL_UNITS;
    let (mut compensation, mut atmosphere_sink) = (None, None);
    if let Some(a) = atmosphere {
        if cm.layers[a].resolution != Resolution::Annual {
            return Err(BuildError::Structure(format!("atmosphere layer {} must be annual", cm.atmosphere_layer)));
        }
        if cm.general.net_zero {
            let cost = cm.general.co2_compensation_cost * PER_TONNE_TO_PER_KT;
            let c = b.col("compensation".into(), cost, 0.0, INF, VarRef::Compensation);
            b.balance[a][0].push((c, -1.0));
            compensation = Some(c);
        } else {
            let c = b.col("atmosphere_sink".into(), 0.0, 0.0, INF, VarRef::AtmosphereSink);
            b.balance[a][0].push((c, -1.0));
            atmosphere_sink = Some(c);
        }
    }

    let mut layers = Vec::with_capacity(n_layers);
    for (li, l) in cm.layers.iter().enumerate() {
        let mut rhs = demand.per_period[li].clone();
        if Some(li) == atmosphere {
            rhs[0] -= co2_extra;
        }
        let terms = std::mem::take(&mut b.balance[li]);
        let rows = terms
            .into_iter()
            .zip(&rhs)
            .enumerate()
            .map(|(p, (t, &r))| b.lp.add_row(format!("bal[{},{p}]", l.id), t, Sense::Eq, r))
            .collect();
        layers.push(LayerRows {
            id: l.id.clone(),
            resolution: l.resolution,
            rows,
            demand: rhs,
            annual_demand: demand.annual[li],
        });
    }
    for (name, terms, sense, rhs) in std::mem::take(&mut b.pending) {
        b.lp.add_row(name, terms, sense, rhs);
    }

    let (outputs, biomass_use, biomass_availability) = output_forms(cm, &b.clock, &technologies, &resources);
    let layout = VariableLayout {
        clock: b.clock,
        day_to_td: cm.time.day_to_td.clone(),
        vars: b.vars,
        technologies,
        resources,
        storages,
        grids,
        compensation,
        atmosphere_sink,
        layers,
        atmosphere,
        co2_extra,
        output_names: cm.outputs.groups.iter().map(|g| g.name.clone()).collect(),
        outputs,
        biomass_use,
        biomass_availability,
    };
    debug_assert_eq!(layout.vars.len(), b.lp.num_cols());
    Ok((b.lp, layout))
}

struct Demands {
    per_period: Vec<Vec<f64>>,
    annual: Vec<f64>,
}

fn layer_demands(cm: &ConcreteModel, clock: &Clock) -> Demands {
    let slices = clock.slices();
    let mut rate = vec![vec![0.0; slices]; cm.layers.len()];
    for d in &cm.demands {
        let total = d.annual_total * TO_MODEL_UNITS;
        let shares = clock.normalised_shares(d.profile.as_ref().map(|p| cm.series[p].values.as_slice()));
        let mut parts = vec![(d.layer.as_str(), total)];
        if let Some(split) = &d.split {
            let pct = match split.share {
                SplitShare::DhnPct => cm.general.dhn_pct,
                SplitShare::PublicMobilityPct => cm.general.public_mobility_pct,
            };
            parts = vec![(d.layer.as_str(), total * pct / 100.0), (split.other_layer.as_str(), total * (1.0 - pct / 100.0))];
        }
        for (layer, amount) in parts {
            let Some(li) = cm.layer_index(layer) else { continue };
            for (r, s) in rate[li].iter_mut().zip(&shares) {
                *r += amount * s;
            }
        }
    }
    let h = clock.hours;
    let per_period = cm
        .layers
        .iter()
        .zip(&rate)
        .map(|(l, r)| match l.resolution {
            Resolution::Hourly => r.clone(),
            Resolution::Daily => r.chunks(h).map(|day| day.iter().sum()).collect(),
            Resolution::Annual => vec![weighted_total(clock, r)],
        })
        .collect();
    let annual = rate.iter().map(|r| weighted_total(clock, r)).collect();
    Demands { per_period, annual }
}

fn weighted_total(clock: &Clock, rate: &[f64]) -> f64 {
    rate.iter().enumerate().map(|(s, v)| clock.td_weight[s / clock.hours] * v).sum()
}

fn check_suppliers(cm: &ConcreteModel, demand: &Demands) -> Result<(), BuildError> {
    for (li, l) in cm.layers.iter().enumerate() {
        if !demand.per_period[li].iter().any(|&d| d > 0.0) {
            continue;
        }
        let by_tech = cm
            .technologies
            .iter()
            .filter(|t| t.f_max != Some(0.0))
            .flat_map(|t| &t.modes)
            .any(|m| m.flows.get(&l.id).is_some_and(|&c| c > 0.0));
        let by_resource = cm
            .resources
            .iter()
            .any(|r| r.layer == l.id && r.kind != ResourceKind::ExportRemoval && r.availability != Some(0.0));
        if !by_tech && !by_resource {
            return Err(BuildError::NoSupplier { layer: l.id.clone() });
        }
    }
    Ok(())
}

fn add_technologies(b: &mut Builder, i_rate: f64, demand: &Demands) -> Result<Vec<TechCols>, BuildError> {
    let cm = b.cm;
    let mut out = Vec::with_capacity(cm.technologies.len());
    for (ti, t) in cm.technologies.iter().enumerate() {
        let d = t.dispatch;
        let n = b.clock.var_count(d);
        let annuity = annualization_factor(i_rate, t.lifetime)?;
        let cost = annuity * t.c_inv + t.c_maint.unwrap_or(0.0);
        let capacity = b.col(format!("F[{}]", t.id), cost, t.f_min, t.f_max.unwrap_or(INF), VarRef::Capacity { tech: ti });
        let cp: Vec<f64> = match &t.c_p {
            CapacityFactor::Constant(c) => vec![*c; n],
            CapacityFactor::Series(id) => (0..n).map(|k| b.clock.mean_over(&cm.series[id].values, d, k)).collect(),
        };
        let fixed = t.f_max == Some(t.f_min) && t.modes.len() == 1;
        let mut activity = Vec::with_capacity(t.modes.len());
        for (mi, mode) in t.modes.iter().enumerate() {
            let cols: Vec<Col> = (0..n)
                .map(|k| {
                    let up = if fixed { cp[k] * t.f_min } else { INF };
                    let name = format!("act[{},{},{k}]", t.id, mode.name);
                    b.col(name, 0.0, 0.0, up, VarRef::Activity { tech: ti, mode: mi, k })
                })
                .collect();
            for (layer, &coef) in &mode.flows {
                let li = b.layer_of(layer);
                for (k, &c) in cols.iter().enumerate() {
                    b.deliver(c, d, k, li, coef);
                }
            }
            activity.push(cols);
        }
        if !fixed {
            for k in 0..n {
                let mut terms: Vec<(Col, f64)> = activity.iter().map(|m| (m[k], 1.0)).collect();
                terms.push((capacity, -cp[k]));
                b.row(format!("cap[{},{k}]", t.id), terms, Sense::Le, 0.0);
            }
        }
        if let Some(share) = &t.f_perc {
            let li = b.layer_of(&share.layer);
            let total = demand.annual[li];
            let terms: Vec<(Col, f64)> = activity
                .iter()
                .flat_map(|m| m.iter().enumerate().map(|(k, &c)| (c, b.clock.annual_weight(d, k))))
                .collect();
            if share.lo_pct > 0.0 {
                b.row(format!("share_lo[{}]", t.id), terms.clone(), Sense::Ge, share.lo_pct / 100.0 * total);
            }
            b.row(format!("share_hi[{}]", t.id), terms, Sense::Le, share.hi_pct / 100.0 * total);
        }
        out.push(TechCols {
            id: t.id.clone(),
            dispatch: d,
            capacity,
            mode_names: t.modes.iter().map(|m| m.name.clone()).collect(),
            activity,
        });
    }
    Ok(out)
}

fn add_resources(b: &mut Builder, demand: &Demands) -> Vec<ResourceCols> {
    let cm = b.cm;
    let mut out = Vec::with_capacity(cm.resources.len());
    for (ri, r) in cm.resources.iter().enumerate() {
        let li = b.layer_of(&r.layer);
        let grain = resource_grain(cm.layers[li].resolution, r.constant_over_year);
        let n = b.clock.var_count(grain);
        let cost_scale = match r.units {
            ResourceUnits::Energy => 1.0,
            ResourceUnits::Co2 => PER_TONNE_TO_PER_KT,
        };
        let availability = match (&r.recycled_from, r.availability) {
            (Some(src), _) => cm.general.recycling_pct / 100.0 * demand.annual[b.layer_of(src)],
            (None, Some(a)) => a * TO_MODEL_UNITS,
            (None, None) => INF,
        };
        // A shaped resource is capped slice by slice, which also caps the annual total.
        let shape = r
            .capacity_factor_series
            .as_ref()
            .filter(|_| availability.is_finite())
            .map(|id| b.clock.normalised_shares(Some(&cm.series[id].values)));
        let sign = if r.kind == ResourceKind::ExportRemoval { -1.0 } else { 1.0 };
        let usage: Vec<Col> = (0..n)
            .map(|k| {
                let mut up = match &shape {
                    Some(s) => availability * b.clock.mean_over(s, grain, k),
                    None => INF,
                };
                if r.limited_by_ntc {
                    up = up.min(cm.general.ntc);
                }
                let cost = r.cost * cost_scale * b.clock.annual_weight(grain, k);
                b.col(format!("res[{},{k}]", r.id), cost, 0.0, up, VarRef::Resource { res: ri, k })
            })
            .collect();
        for (k, &c) in usage.iter().enumerate() {
            b.deliver(c, grain, k, li, sign);
            if let Some(up) = &r.uptake_layer {
                let ul = b.layer_of(up);
                b.deliver(c, grain, k, ul, -r.carbon_intensity);
            }
        }
        // Kept even at zero availability so the row set never depends on the scenario.
        if shape.is_none() && availability.is_finite() {
            let terms = usage.iter().enumerate().map(|(k, &c)| (c, b.clock.annual_weight(grain, k))).collect();
            b.row(format!("avail[{}]", r.id), terms, Sense::Le, availability);
        }
        out.push(ResourceCols {
            id: r.id.clone(),
            grain,
            layer: li,
            sign,
            usage,
            availability,
        });
    }
    for cap in &cm.import_caps {
        let limit: f64 =
            cap.share_pct / 100.0 * cap.demand_layers.iter().map(|l| demand.annual[b.layer_of(l)]).sum::<f64>();
        let terms = cap
            .resources
            .iter()
            .filter_map(|id| out.iter().find(|r| &r.id == id))
            .flat_map(|r| r.usage.iter().enumerate().map(|(k, &c)| (c, b.clock.annual_weight(r.grain, k))))
            .collect();
        b.row(format!("import_cap[{}]", cap.id), terms, Sense::Le, limit);
    }
    out
}

fn resource_grain(layer: Resolution, constant: bool) -> Dispatch {
    match (layer, constant) {
        (_, true) | (Resolution::Annual, _) => Dispatch::Flat,
        (Resolution::Hourly, false) => Dispatch::Hourly,
        (Resolution::Daily, false) => Dispatch::Daily,
    }
}

fn add_storages(b: &mut Builder, i_rate: f64) -> Result<Vec<StorageCols>, BuildError> {
    let cm = b.cm;
    let h = b.clock.hours;
    let mut out = Vec::with_capacity(cm.storages.len());
    for (si, s) in cm.storages.iter().enumerate() {
        let li = b.layer_of(&s.layer);
        let annuity = annualization_factor(i_rate, s.lifetime)?;
        let cost = annuity * s.c_inv + s.c_maint.unwrap_or(0.0);
        let capacity =
            b.col(format!("S[{}]", s.id), cost, s.f_min, s.f_max.unwrap_or(INF), VarRef::StorageCapacity { storage: si });
        let fixed = (s.f_max == Some(s.f_min)).then_some(s.f_min);
        let (rates, levels, grain) = match s.class {
            StorageClass::Daily => (b.clock.slices(), b.clock.slices(), Dispatch::Hourly),
            StorageClass::Seasonal => (b.clock.n_td, cm.time.day_to_td.len(), Dispatch::Daily),
        };
        let avail = s.s_avail;
        let limit = |per: f64| fixed.map_or(INF, |f| avail * f / per);
        let charge: Vec<Col> = (0..rates)
            .map(|k| b.col(format!("sin[{},{k}]", s.id), 0.0, 0.0, limit(s.t_charge), VarRef::Charge { storage: si, k }))
            .collect();
        let discharge: Vec<Col> = (0..rates)
            .map(|k| {
                b.col(format!("sout[{},{k}]", s.id), 0.0, 0.0, limit(s.t_discharge), VarRef::Discharge { storage: si, k })
            })
            .collect();
        let level: Vec<Col> = (0..levels)
            .map(|k| b.col(format!("lvl[{},{k}]", s.id), 0.0, 0.0, limit(1.0), VarRef::Level { storage: si, k }))
            .collect();
        for k in 0..rates {
            b.deliver(discharge[k], grain, k, li, 1.0);
            b.deliver(charge[k], grain, k, li, -1.0);
        }
        match s.class {
            StorageClass::Daily => {
                for k in 0..rates {
                    let prev = (k / h) * h + (k % h + h - 1) % h;
                    let mut terms = vec![(level[k], 1.0), (charge[k], -s.eta_in), (discharge[k], 1.0 / s.eta_out)];
                    terms.push((level[prev], -(1.0 - s.s_loss)));
                    b.row(format!("lvl_eq[{},{k}]", s.id), terms, Sense::Eq, 0.0);
                }
            }
            StorageClass::Seasonal => {
                let hf = h as f64;
                let keep = (1.0 - s.s_loss).powi(h as i32);
                for day in 0..levels {
                    let prev = (day + levels - 1) % levels;
                    let td = cm.time.day_to_td[day];
                    let terms = vec![
                        (level[day], 1.0),
                        (level[prev], -keep),
                        (charge[td], -hf * s.eta_in),
                        (discharge[td], hf / s.eta_out),
                    ];
                    b.row(format!("lvl_eq[{},{day}]", s.id), terms, Sense::Eq, 0.0);
                }
            }
        }
        if fixed.is_none() {
            for (cols, per, tag) in [(&charge, s.t_charge, "sin_cap"), (&discharge, s.t_discharge, "sout_cap"), (&level, 1.0, "lvl_cap")] {
                for (k, &c) in cols.iter().enumerate() {
                    b.row(format!("{tag}[{},{k}]", s.id), vec![(c, 1.0), (capacity, -avail / per)], Sense::Le, 0.0);
                }
            }
        }
        out.push(StorageCols {
            id: s.id.clone(),
            class: s.class,
            capacity,
            charge,
            discharge,
            level,
            eta_in: s.eta_in,
            eta_out: s.eta_out,
            s_loss: s.s_loss,
        });
    }
    Ok(out)
}

fn add_grids(b: &mut Builder, i_rate: f64) -> Result<Vec<Col>, BuildError> {
    let cm = b.cm;
    let mut out = Vec::with_capacity(cm.grids.len());
    for (gi, g) in cm.grids.iter().enumerate() {
        let annuity = annualization_factor(i_rate, g.lifetime)?;
        let cost = annuity * g.c_inv + g.c_maint.unwrap_or(0.0);
        let cap = b.col(format!("G[{}]", g.id), cost, 0.0, INF, VarRef::GridCapacity { grid: gi });
        let res = cm.layers[b.layer_of(&g.layer)].resolution;
        let span = b.clock.period_hours(res);
        for (p, mut terms) in std::mem::take(&mut b.grid_terms[gi]).into_iter().enumerate() {
            terms.push((cap, -span));
            b.row(format!("grid[{},{p}]", g.id), terms, Sense::Le, 0.0);
        }
        out.push(cap);
    }
    Ok(out)
}

/// Output-group biomass forms and the consumed and available biomass, all in TWh/y.
fn output_forms(
    cm: &ConcreteModel,
    clock: &Clock,
    techs: &[TechCols],
    resources: &[ResourceCols],
) -> (Vec<LinearForm>, LinearForm, f64) {
    let biomass: Vec<&str> = cm.outputs.biomass_layers.iter().map(String::as_str).collect();
    let outputs = cm
        .outputs
        .groups
        .iter()
        .map(|g| {
            let mut form = LinearForm::default();
            for (ti, t) in cm.technologies.iter().enumerate().filter(|(_, t)| g.technologies.contains(&t.id)) {
                let cols = &techs[ti];
                for (mode, acts) in t.modes.iter().zip(&cols.activity) {
                    let intake: f64 = biomass
                        .iter()
                        .filter_map(|l| mode.flows.get(*l))
                        .filter(|&&c| c < 0.0)
                        .map(|c| -c)
                        .sum();
                    if intake == 0.0 {
                        continue;
                    }
                    for (k, &c) in acts.iter().enumerate() {
                        form.push(c, intake * clock.annual_weight(t.dispatch, k) / TO_MODEL_UNITS);
                    }
                }
            }
            form
        })
        .collect();
    let mut used = LinearForm::default();
    let mut available = 0.0;
    for r in resources.iter().filter(|r| r.sign > 0.0 && biomass.contains(&cm.layers[r.layer].id.as_str())) {
        for (k, &c) in r.usage.iter().enumerate() {
            used.push(c, clock.annual_weight(r.grain, k) / TO_MODEL_UNITS);
        }
        available += r.availability / TO_MODEL_UNITS;
    }
    (outputs, used, available)
}
