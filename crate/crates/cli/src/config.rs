use std::path::PathBuf;

use crate::error::{PipelineError, Result};

/// Everything a pipeline run depends on. `jobs` and `out` only decide where
/// and how fast results are produced, never their content.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub model: Option<PathBuf>,
    pub n: usize,
    pub seed: u64,
    pub k: usize,
    pub max_leaves: usize,
    pub bins: usize,
    pub var_levels: Vec<f64>,
    /// Strategies replayed instead of the discovered ones.
    pub strategies: Option<PathBuf>,
    pub top_params: usize,
    pub jobs: usize,
    pub out: PathBuf,
    pub dump_lp: bool,
}

pub const JOBS_ENV: &str = "REGRET_PLANNER_JOBS";

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            model: None,
            n: 1000,
            seed: 42,
            k: 5,
            max_leaves: 5,
            bins: 7,
            var_levels: vec![50.0, 90.0],
            strategies: None,
            top_params: 5,
            jobs: default_jobs(),
            out: PathBuf::from("results"),
            dump_lp: false,
        }
    }
}

pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

/// Worker count from the environment when set, `flag` otherwise.
pub fn jobs_from_env(flag: usize) -> Result<usize> {
    match std::env::var(JOBS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&j| j >= 1)
            .ok_or_else(|| PipelineError::Config(format!("{JOBS_ENV}='{v}' is not a positive integer"))),
        Err(_) => Ok(flag),
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(PipelineError::Config(m));
        if self.n == 0 {
            return fail("N must be at least 1".into());
        }
        if self.k < 2 {
            return fail(format!("k = {} but at least 2 clusters are needed", self.k));
        }
        if self.max_leaves == 0 {
            return fail("max_leaves must be at least 1".into());
        }
        if self.bins == 0 {
            return fail("bins must be at least 1".into());
        }
        if self.jobs == 0 {
            return fail("jobs must be at least 1".into());
        }
        if let Some(a) = self.var_levels.iter().find(|a| !(0.0..=100.0).contains(*a)) {
            return fail(format!("VaR level {a} outside [0, 100]"));
        }
        Ok(())
    }

    pub fn model_path(&self) -> Result<&PathBuf> {
        self.model.as_ref().ok_or_else(|| PipelineError::Config("--model is required for this stage".into()))
    }
}
