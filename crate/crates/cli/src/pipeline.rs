//! Stage orchestration: every stage reads its inputs from the output
//! directory and persists its results there, so a run can resume where it
//! stopped and each stage can be re-run on its own.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use regret_core::analysis::{
    bin_indices, cumulative_curve, decision_map, marginal_regret_profile, pearson_correlation, summarise,
    top_influential_params, SummaryRow,
};
use regret_core::model::{load_model, uncertain_parameters, ModelDefinition, ModelError};
use regret_core::regret::{
    epsilon_tol, evaluate_regret, explore, fmt17, reference_basis, scenario_lp, CellStatus, RegretError, RegretMatrix,
};
use regret_core::scenarios::lhs_sample;
use regret_core::strategies::{builtin_strategies, identify_strategies, strategies_from_json, strategies_to_json, Strategy};
use regret_lp::mps::write_mps;
use serde_json::{json, Value};

use crate::config::PipelineConfig;
use crate::error::{IoContext, PipelineError, Result};
use crate::manifest::Manifest;
use crate::report;
use crate::store::{
    buffered, read_exploration, read_regret_matrix, read_scenarios, read_text, sha256_hex, slug, write_exploration,
    write_file, write_regret_matrix, write_scenarios, write_with, ParameterTable,
};

pub const RUN_FILE: &str = "run.json";
pub const SCENARIOS_FILE: &str = "scenarios.csv";
pub const PARAMETERS_FILE: &str = "parameters.csv";
pub const OPTIMA_FILE: &str = "optima.csv";
pub const BASES_FILE: &str = "bases.txt";
pub const MIDPOINT_LP: &str = "lp/midpoint.mps";
pub const STRATEGIES_FILE: &str = "strategies.json";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CORRELATIONS_FILE: &str = "correlations.csv";
pub const TOP_PARAMS_FILE: &str = "top_parameters.csv";

/// Share of the available biomass counted as full use.
const FULL_USE: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Sample,
    Explore,
    Identify,
    Evaluate,
    Analyze,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 6] = [Stage::Sample, Stage::Explore, Stage::Identify, Stage::Evaluate, Stage::Analyze, Stage::Report];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Sample => "sample",
            Stage::Explore => "explore",
            Stage::Identify => "identify",
            Stage::Evaluate => "evaluate",
            Stage::Analyze => "analyze",
            Stage::Report => "report",
        }
    }

    /// Files and directories the stage owns.
    fn outputs(self) -> &'static [&'static str] {
        match self {
            Stage::Sample => &[SCENARIOS_FILE, PARAMETERS_FILE],
            Stage::Explore => &[OPTIMA_FILE, BASES_FILE, "lp"],
            Stage::Identify => &[STRATEGIES_FILE, "clusters.csv", "tree.dot", "leaves.csv"],
            Stage::Evaluate => &[crate::store::REGRET_FILE, crate::store::COSTS_FILE, crate::store::STATUS_FILE],
            Stage::Analyze => &[SUMMARY_FILE, CORRELATIONS_FILE, TOP_PARAMS_FILE, "curves", "decision_maps", "profiles"],
            Stage::Report => &[report::FIGURES_DIR],
        }
    }

    fn downstream(self) -> impl Iterator<Item = Stage> {
        Stage::ALL.into_iter().filter(move |s| *s > self)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn model_error(e: ModelError) -> PipelineError {
    PipelineError::Model(e.to_string())
}

fn regret_error(e: RegretError) -> PipelineError {
    match e {
        RegretError::Model(_) | RegretError::Build(_) => PipelineError::Model(e.to_string()),
        RegretError::Cell { ref source, .. } if matches!(**source, RegretError::Model(_) | RegretError::Build(_)) => {
            PipelineError::Model(e.to_string())
        }
        RegretError::IncompatibleLayout { .. } | RegretError::ScenarioShape { .. } => PipelineError::Config(e.to_string()),
        _ => PipelineError::Solver(e.to_string()),
    }
}

/// Stage keys of the last successful execution of each stage.
type RunRecord = BTreeMap<String, Value>;

pub struct Pipeline {
    cfg: PipelineConfig,
    model: OnceCell<ModelDefinition>,
}

/// Runs every stage that is missing or out of date, then writes the manifest.
pub fn run_pipeline(cfg: PipelineConfig) -> Result<Manifest> {
    Pipeline::new(cfg)?.run()
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        fs::create_dir_all(&cfg.out).at(&cfg.out)?;
        Ok(Self { cfg, model: OnceCell::new() })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.cfg.out.join(rel)
    }

    fn model(&self) -> Result<&ModelDefinition> {
        if let Some(m) = self.model.get() {
            return Ok(m);
        }
        let m = load_model(self.cfg.model_path()?).map_err(model_error)?;
        Ok(self.model.get_or_init(|| m))
    }

    /// Hash of the model document and the timeseries it reads.
    fn model_hash(&self) -> Result<String> {
        let path = self.cfg.model_path()?;
        let model = self.model()?;
        let mut bytes = fs::read(path).at(path)?;
        let dir = path.parent().unwrap_or(Path::new(".")).join(&model.timeseries_dir);
        for id in model.series_ids() {
            let file = dir.join(format!("{id}.csv"));
            bytes.extend(id.as_bytes());
            bytes.extend(fs::read(&file).at(&file)?);
        }
        Ok(sha256_hex(&bytes))
    }

    /// What a stage's result depends on beyond its upstream stages.
    fn stage_key(&self, stage: Stage) -> Result<Value> {
        let c = &self.cfg;
        Ok(match stage {
            Stage::Sample => json!({"model": self.model_hash()?, "n": c.n, "seed": c.seed}),
            Stage::Explore => json!({"dump_lp": c.dump_lp}),
            Stage::Identify => {
                let replay = match &c.strategies {
                    Some(p) => Some(sha256_hex(read_text(p)?.as_bytes())),
                    None => None,
                };
                json!({"k": c.k, "max_leaves": c.max_leaves, "seed": c.seed, "strategies": replay})
            }
            Stage::Evaluate | Stage::Report => json!({}),
            Stage::Analyze => json!({"bins": c.bins, "var": c.var_levels, "top_params": c.top_params}),
        })
    }

    fn required(&self, stage: Stage) -> Vec<String> {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        match stage {
            Stage::Explore if self.cfg.dump_lp => own(&[OPTIMA_FILE, BASES_FILE, MIDPOINT_LP]),
            Stage::Explore => own(&[OPTIMA_FILE, BASES_FILE]),
            Stage::Identify if self.cfg.strategies.is_some() => own(&[STRATEGIES_FILE]),
            Stage::Analyze => own(&[SUMMARY_FILE, CORRELATIONS_FILE, TOP_PARAMS_FILE]),
            Stage::Report => report::FIGURES.iter().map(|f| format!("{}/{f}", report::FIGURES_DIR)).collect(),
            other => own(other.outputs()),
        }
    }

    fn complete(&self, stage: Stage) -> bool {
        self.required(stage).iter().all(|f| self.path(f).is_file())
    }

    fn clear(&self, stage: Stage) -> Result<()> {
        for rel in stage.outputs() {
            let p = self.path(rel);
            if p.is_dir() {
                fs::remove_dir_all(&p).at(&p)?;
            } else if p.exists() {
                fs::remove_file(&p).at(&p)?;
            }
        }
        Ok(())
    }

    fn load_record(&self) -> Result<RunRecord> {
        let p = self.path(RUN_FILE);
        if !p.exists() {
            return Ok(RunRecord::new());
        }
        serde_json::from_str(&read_text(&p)?).map_err(|e| PipelineError::corrupt(&p, e))
    }

    fn save_record(&self, record: &RunRecord) -> Result<()> {
        let text = serde_json::to_string_pretty(record).expect("plain data serialises") + "\n";
        write_file(&self.path(RUN_FILE), text.as_bytes())
    }

    fn finish(&self) -> Result<Manifest> {
        let m = Manifest::scan(&self.cfg.out)?;
        m.write(&self.cfg.out)?;
        Ok(m)
    }

    /// All stages, skipping those whose outputs exist and whose inputs are unchanged.
    pub fn run(&self) -> Result<Manifest> {
        let mut record = self.load_record()?;
        let mut upstream_changed = false;
        for stage in Stage::ALL {
            let key = self.stage_key(stage)?;
            if !upstream_changed && record.get(stage.name()) == Some(&key) && self.complete(stage) {
                eprintln!("[{stage}] up to date");
                continue;
            }
            self.redo(stage, key, &mut record)?;
            upstream_changed = true;
        }
        self.finish()
    }

    /// Re-runs one stage from the artifacts on disk and drops everything downstream of it.
    pub fn run_stage(&self, stage: Stage) -> Result<Manifest> {
        let mut record = self.load_record()?;
        let key = self.stage_key(stage)?;
        self.redo(stage, key, &mut record)?;
        for later in stage.downstream() {
            self.clear(later)?;
        }
        self.save_record(&record)?;
        self.finish()
    }

    fn redo(&self, stage: Stage, key: Value, record: &mut RunRecord) -> Result<()> {
        record.remove(stage.name());
        for later in stage.downstream() {
            record.remove(later.name());
        }
        self.save_record(record)?;
        self.clear(stage)?;
        eprintln!("[{stage}] running");
        self.execute(stage).map_err(|e| PipelineError::Stage { stage, source: Box::new(e) })?;
        record.insert(stage.name().to_string(), key);
        self.save_record(record)
    }

    fn execute(&self, stage: Stage) -> Result<()> {
        match stage {
            Stage::Sample => self.sample(),
            Stage::Explore => self.explore(),
            Stage::Identify => self.identify(),
            Stage::Evaluate => self.evaluate(),
            Stage::Analyze => self.analyze(),
            Stage::Report => report::emit_report(&self.cfg.out).map(|_| ()),
        }
    }

    fn sample(&self) -> Result<()> {
        let model = self.model()?;
        let params = uncertain_parameters(model);
        if params.len() != model.uncertain_order.len() {
            return Err(PipelineError::Model("uncertain_order names a field that is not uncertain".into()));
        }
        let names: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
        // A model without uncertainty still gets one (unused) coordinate per scenario.
        let mut set = lhs_sample(names.len().max(1), self.cfg.n, self.cfg.seed).map_err(|e| PipelineError::Config(e.to_string()))?;
        if !names.is_empty() {
            set = set.with_names(names.clone()).map_err(|e| PipelineError::Config(e.to_string()))?;
        }
        write_scenarios(&self.path(SCENARIOS_FILE), &set)?;
        let columns = params.iter().enumerate().map(|(j, p)| set.column(j).iter().map(|&u| p.value.resolve(u)).collect()).collect();
        ParameterTable { names, columns }.write(&self.path(PARAMETERS_FILE))
    }

    fn explore(&self) -> Result<()> {
        let model = self.model()?;
        let scenarios = read_scenarios(&self.path(SCENARIOS_FILE))?;
        if self.cfg.dump_lp {
            let (lp, _) = scenario_lp(model, &vec![0.5; model.uncertain_order.len()]).map_err(regret_error)?;
            let path = self.path(MIDPOINT_LP);
            let mut w = buffered(&path)?;
            write_mps(&lp, &mut w).and_then(|_| w.flush()).at(&path)?;
        }
        let basis = reference_basis(model).map_err(regret_error)?;
        let ex = explore(model, &scenarios, basis.as_ref(), self.cfg.jobs).map_err(regret_error)?;
        write_exploration(&self.path(OPTIMA_FILE), &self.path(BASES_FILE), &ex)?;
        let optimal: Vec<_> = ex.optima.iter().filter(|o| o.status.is_optimal()).collect();
        let full = optimal.iter().filter(|o| o.biomass_used >= FULL_USE * o.biomass_available).count();
        eprintln!("[explore] {} of {} scenarios optimal; biomass fully used in {full}", optimal.len(), ex.optima.len());
        let bad: Vec<String> = ex
            .optima
            .iter()
            .enumerate()
            .filter(|(_, o)| !o.status.is_optimal())
            .map(|(i, o)| format!("scenario {i} {}", o.status))
            .collect();
        if bad.is_empty() {
            return Ok(());
        }
        let msg = format!("{} unconstrained solves without optimum: {}", bad.len(), bad.join(", "));
        if ex.optima.iter().any(|o| matches!(o.status, CellStatus::Failed(_))) {
            Err(PipelineError::Solver(msg))
        } else {
            Err(PipelineError::Model(msg))
        }
    }

    fn identify(&self) -> Result<()> {
        let ex = read_exploration(&self.path(OPTIMA_FILE), None)?;
        let names = ex.output_names.clone();
        let strategy_error = |e: regret_core::strategies::StrategyError| PipelineError::Config(e.to_string());
        let strategies: Vec<Strategy> = match &self.cfg.strategies {
            Some(path) => strategies_from_json(&read_text(path)?, &names).map_err(strategy_error)?,
            None => {
                let (idx, y) = ex.output_matrix();
                let c = &self.cfg;
                let id = identify_strategies(&y, &names, c.k, c.max_leaves, c.seed).map_err(strategy_error)?;
                write_with(&self.path("clusters.csv"), |buf| {
                    writeln!(buf, "scenario,cluster").map_err(|e| e.to_string())?;
                    for (i, l) in idx.iter().zip(&id.clustering.labels) {
                        writeln!(buf, "{i},{l}").map_err(|e| e.to_string())?;
                    }
                    Ok(())
                })?;
                write_file(&self.path("tree.dot"), id.tree.to_dot(&names).as_bytes())?;
                write_with(&self.path("leaves.csv"), |buf| {
                    writeln!(buf, "strategy,leaf,members,cluster,tightened_output,lower_bound,retained").map_err(|e| e.to_string())?;
                    for (s, leaf) in id.tree.leaves().enumerate() {
                        let st = id.tree.leaf_stats(leaf);
                        let t = id.tightened.iter().find(|t| t.0 == s);
                        let (out, lb, kept) = t.map_or((String::new(), String::new(), String::new()), |(_, j, t)| {
                            (names[*j].clone(), fmt17(t.lower_bound), fmt17(t.retained))
                        });
                        writeln!(buf, "{},{leaf},{},{},{out},{lb},{kept}", csv_field(&id.strategies[s].name), st.members.len(), st.label)
                            .map_err(|e| e.to_string())?;
                        if let Some((_, _, t)) = t {
                            eprintln!("[identify] {} tightened; {:.0}% of its scenarios kept", id.strategies[s].name, 100.0 * t.retained);
                        }
                    }
                    Ok(())
                })?;
                let mut list = id.strategies;
                match builtin_strategies(&names) {
                    Ok(b) => list.extend(b),
                    Err(e) => eprintln!("[identify] warning: builtin strategies skipped ({e})"),
                }
                list
            }
        };
        write_file(&self.path(STRATEGIES_FILE), strategies_to_json(&strategies, &names).as_bytes())
    }

    fn evaluate(&self) -> Result<()> {
        let model = self.model()?;
        let scenarios = read_scenarios(&self.path(SCENARIOS_FILE))?;
        let ex = read_exploration(&self.path(OPTIMA_FILE), Some(&self.path(BASES_FILE)))?;
        if ex.optima.len() != scenarios.len() {
            return Err(PipelineError::corrupt(self.path(OPTIMA_FILE), "scenario count differs from scenarios.csv"));
        }
        let strategies = strategies_from_json(&read_text(&self.path(STRATEGIES_FILE))?, &ex.output_names)
            .map_err(|e| PipelineError::corrupt(self.path(STRATEGIES_FILE), e))?;
        let rm = evaluate_regret(model, &scenarios, &ex, &strategies, self.cfg.jobs).map_err(regret_error)?;
        write_regret_matrix(&self.cfg.out, &rm)?;
        let failures = rm.failures();
        if !failures.is_empty() {
            eprintln!(
                "[evaluate] WARNING: {} of {} cells have no optimum and are excluded from the statistics",
                failures.len(),
                rm.strategies.len() * rm.num_scenarios()
            );
            for (s, i, c) in failures.iter().take(10) {
                eprintln!("[evaluate]   {} / scenario {i}: {c}", rm.strategies[*s]);
            }
        }
        Ok(())
    }

    fn analyze(&self) -> Result<()> {
        let rm = read_regret_matrix(&self.cfg.out)?;
        let params = ParameterTable::read(&self.path(PARAMETERS_FILE))?;
        let analysis = Analysis::compute(&rm, &params, &self.cfg)?;
        analysis.write(&self.cfg.out, &params, &self.cfg)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Analytics over the persisted regret grid.
struct Analysis {
    names: Vec<String>,
    summary: Vec<Option<SummaryRow>>,
    valid_counts: Vec<usize>,
    curves: Vec<Option<Vec<(f64, f64)>>>,
    /// Strategies with an optimum in every scenario; only these enter correlations and maps.
    complete: Vec<usize>,
    /// `corr[c][p]` for complete strategy `c`.
    corr: Vec<Vec<Option<f64>>>,
    top: Vec<usize>,
    regrets: Vec<Vec<f64>>,
}

impl Analysis {
    fn compute(rm: &RegretMatrix, params: &ParameterTable, cfg: &PipelineConfig) -> Result<Self> {
        let n = rm.num_scenarios();
        if params.columns.first().is_some_and(|c| c.len() != n) {
            return Err(PipelineError::Config(format!("{PARAMETERS_FILE} does not match the regret grid")));
        }
        let mut summary = Vec::new();
        let mut curves = Vec::new();
        let mut valid_counts = Vec::new();
        for s in 0..rm.strategies.len() {
            let cells: Vec<usize> = (0..n).filter(|&i| rm.status[s][i].is_optimal()).collect();
            let r: Vec<f64> = cells.iter().map(|&i| rm.regret[s][i]).collect();
            let optimal: Vec<bool> = cells.iter().map(|&i| rm.regret[s][i] <= epsilon_tol(rm.c_opt[i])).collect();
            valid_counts.push(r.len());
            if r.is_empty() {
                eprintln!("[analyze] WARNING: strategy '{}' has no optimal cell", rm.strategies[s]);
                summary.push(None);
                curves.push(None);
                continue;
            }
            summary.push(Some(summarise(&rm.strategies[s], &r, &optimal, &cfg.var_levels).map_err(|e| PipelineError::Config(e.to_string()))?));
            curves.push(Some(cumulative_curve(&r).expect("nonempty")));
        }
        let complete: Vec<usize> = (0..rm.strategies.len()).filter(|&s| valid_counts[s] == n).collect();
        if complete.len() < rm.strategies.len() {
            eprintln!("[analyze] WARNING: {} strategies with failed cells left out of correlations and maps", rm.strategies.len() - complete.len());
        }
        let regrets: Vec<Vec<f64>> = complete.iter().map(|&s| rm.regret[s].clone()).collect();
        let corr: Vec<Vec<Option<f64>>> = regrets
            .iter()
            .map(|r| params.columns.iter().map(|p| if n >= 2 { pearson_correlation(r, p).ok().flatten() } else { None }).collect())
            .collect();
        let m = cfg.top_params.min(params.names.len());
        let top = if corr.is_empty() { (0..m).collect() } else { top_influential_params(&corr, m) };
        Ok(Self { names: rm.strategies.clone(), summary, valid_counts, curves, complete, corr, top, regrets })
    }

    fn write(&self, out: &Path, params: &ParameterTable, cfg: &PipelineConfig) -> Result<()> {
        let mut levels = cfg.var_levels.clone();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let (low, high): (Vec<f64>, Vec<f64>) = levels.iter().partition(|&&a| a <= 50.0);
        write_with(&out.join(SUMMARY_FILE), |buf| {
            let mut header = vec!["strategy".to_string(), "scenarios".into(), "optimal_share".into(), "min".into()];
            header.extend(low.iter().map(|a| format!("var{a}")));
            header.push("mean".into());
            header.extend(high.iter().map(|a| format!("var{a}")));
            header.push("max".into());
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(&header).map_err(|e| e.to_string())?;
            for (s, row) in self.summary.iter().enumerate() {
                let var = |a: f64| row.as_ref().map_or(f64::NAN, |r| r.var.iter().find(|v| v.0 == a).map_or(f64::NAN, |v| v.1));
                let get = |f: fn(&SummaryRow) -> f64| row.as_ref().map_or(f64::NAN, f);
                let mut rec = vec![self.names[s].clone(), self.valid_counts[s].to_string(), fmt17(get(|r| r.optimal_share)), fmt17(get(|r| r.min))];
                rec.extend(low.iter().map(|&a| fmt17(var(a))));
                rec.push(fmt17(get(|r| r.mean)));
                rec.extend(high.iter().map(|&a| fmt17(var(a))));
                rec.push(fmt17(get(|r| r.max)));
                w.write_record(&rec).map_err(|e| e.to_string())?;
            }
            w.flush().map_err(|e| e.to_string())
        })?;
        for (s, curve) in self.curves.iter().enumerate() {
            let Some(curve) = curve else { continue };
            write_with(&out.join("curves").join(format!("{}.csv", slug(&self.names[s]))), |buf| {
                writeln!(buf, "regret,cumulative_pct").map_err(|e| e.to_string())?;
                for (r, p) in curve {
                    writeln!(buf, "{},{}", fmt17(*r), fmt17(*p)).map_err(|e| e.to_string())?;
                }
                Ok(())
            })?;
        }
        let complete_names: Vec<&String> = self.complete.iter().map(|&s| &self.names[s]).collect();
        write_with(&out.join(CORRELATIONS_FILE), |buf| {
            let mut w = csv::Writer::from_writer(buf);
            let header = std::iter::once("strategy".to_string()).chain(params.names.iter().cloned());
            w.write_record(header).map_err(|e| e.to_string())?;
            for (name, row) in complete_names.iter().zip(&self.corr) {
                let cells = row.iter().map(|c| c.map_or_else(|| "undefined".to_string(), fmt17));
                w.write_record(std::iter::once(name.to_string()).chain(cells)).map_err(|e| e.to_string())?;
            }
            w.flush().map_err(|e| e.to_string())
        })?;
        write_with(&out.join(TOP_PARAMS_FILE), |buf| {
            writeln!(buf, "rank,parameter,mean_abs_correlation").map_err(|e| e.to_string())?;
            for (rank, &p) in self.top.iter().enumerate() {
                let rows = self.corr.len().max(1) as f64;
                let score = self.corr.iter().map(|r| r[p].map_or(0.0, f64::abs)).sum::<f64>() / rows;
                writeln!(buf, "{rank},{},{}", csv_field(&params.names[p]), fmt17(score)).map_err(|e| e.to_string())?;
            }
            Ok(())
        })?;
        if self.regrets.is_empty() {
            return Ok(());
        }
        let edges = |p: usize, n: usize| {
            let (_, lo, hi) = bin_indices(&params.columns[p], n);
            move |b: usize| (lo + (hi - lo) * b as f64 / n as f64, lo + (hi - lo) * (b + 1) as f64 / n as f64)
        };
        for (a, &pi) in self.top.iter().enumerate() {
            for &pj in &self.top[a + 1..] {
                let g = decision_map(&self.regrets, &params.columns, pi, pj, cfg.bins).map_err(|e| PipelineError::Config(e.to_string()))?;
                let name = format!("{}_{}.csv", slug(&params.names[pi]), slug(&params.names[pj]));
                let (ei, ej) = (edges(pi, cfg.bins), edges(pj, cfg.bins));
                write_with(&out.join("decision_maps").join(name), |buf| {
                    let mut w = csv::Writer::from_writer(buf);
                    let header = ["bin_i", "bin_j", "lo_i", "hi_i", "lo_j", "hi_j", "count", "winner"]
                        .into_iter()
                        .map(String::from)
                        .chain(complete_names.iter().map(|n| n.to_string()));
                    w.write_record(header).map_err(|e| e.to_string())?;
                    for bi in 0..g.n {
                        for bj in 0..g.n {
                            let c = g.cell(bi, bj);
                            let ((li, hi), (lj, hj)) = (ei(bi), ej(bj));
                            let winner = c.winner.map_or_else(|| "Empty".to_string(), |s| complete_names[s].to_string());
                            let rec = [bi.to_string(), bj.to_string(), fmt17(li), fmt17(hi), fmt17(lj), fmt17(hj), c.count.to_string(), winner]
                                .into_iter()
                                .chain(c.mean_regret.iter().map(|v| fmt17(*v)));
                            w.write_record(rec).map_err(|e| e.to_string())?;
                        }
                    }
                    w.flush().map_err(|e| e.to_string())
                })?;
            }
        }
        for &p in &self.top {
            let e = edges(p, cfg.bins);
            write_with(&out.join("profiles").join(format!("{}.csv", slug(&params.names[p]))), |buf| {
                let mut w = csv::Writer::from_writer(buf);
                w.write_record(["strategy", "bin", "lo", "hi", "count", "mean", "sem", "low_count"]).map_err(|e| e.to_string())?;
                for (name, r) in complete_names.iter().zip(&self.regrets) {
                    let profile = marginal_regret_profile(r, &params.columns[p], cfg.bins).map_err(|e| e.to_string())?;
                    for (b, bin) in profile.iter().enumerate() {
                        let (lo, hi) = e(b);
                        w.write_record([
                            name.to_string(),
                            b.to_string(),
                            fmt17(lo),
                            fmt17(hi),
                            bin.count.to_string(),
                            fmt17(bin.mean),
                            fmt17(bin.sem),
                            bin.low_count.to_string(),
                        ])
                        .map_err(|e| e.to_string())?;
                    }
                }
                w.flush().map_err(|e| e.to_string())
            })?;
        }
        Ok(())
    }
}
