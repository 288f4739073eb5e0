//! Random-ensemble comparison of `delta`, `mu` and `upsilon`.
//!
//! Trial `t` at grid point `g` draws everything from stream `(g, t)` of
//! the run seed: first a graph seed, then the leaders, then (with
//! `with_rank`) a weight seed. Disconnected samples are redrawn up to
//! `max_attempts` times; a trial that never connects is dropped and shows
//! up as `trials_used < trials`.

use std::fmt::Write as _;

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bound::{BoundReport, LeaderSet};
use crate::generators::{resample_until_connected, Family, GenSpec};
use crate::oracle;
use crate::rng;

pub const CSV_HEADER: &str = "param,mean_delta,mean_mu,mean_upsilon,trials_used";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleFamily {
    /// Grid values are edge probabilities.
    ErdosRenyi,
    /// Grid values are attachment counts.
    BarabasiAlbert,
}

impl EnsembleFamily {
    pub fn default_grid(&self) -> Vec<f64> {
        match self {
            EnsembleFamily::ErdosRenyi => (1..=9).map(|i| i as f64 / 10.0).collect(),
            EnsembleFamily::BarabasiAlbert => (1..=10).map(f64::from).collect(),
        }
    }

    fn family(&self, param: f64) -> Family {
        match self {
            EnsembleFamily::ErdosRenyi => Family::ErdosRenyi { p: param },
            EnsembleFamily::BarabasiAlbert => Family::BarabasiAlbert { m: param as usize },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub family: EnsembleFamily,
    pub grid: Vec<f64>,
    pub n: usize,
    pub trials: usize,
    pub leaders: usize,
    pub seed: u64,
    /// Also compute the exact rank for one sampled weighting per trial.
    pub with_rank: bool,
    pub max_attempts: usize,
}

impl ExperimentSpec {
    pub fn new(family: EnsembleFamily, seed: u64) -> Self {
        Self {
            family,
            grid: family.default_grid(),
            n: 50,
            trials: 50,
            leaders: 2,
            seed,
            with_rank: false,
            max_attempts: 1000,
        }
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::Invalid("trials must be at least 1".into()));
        }
        if self.leaders == 0 || self.leaders > self.n {
            return Err(ExperimentError::Invalid(format!(
                "leaders per trial must be in 1..={}",
                self.n
            )));
        }
        for &x in &self.grid {
            let gen = GenSpec::new(self.family.family(x), self.n, 0);
            if self.family == EnsembleFamily::BarabasiAlbert && x.fract() != 0.0 {
                return Err(ExperimentError::Invalid(format!(
                    "attachment count {x} is not an integer"
                )));
            }
            gen.validate()
                .map_err(|e| ExperimentError::Invalid(e.to_string()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("grid point {param}, trial {trial}: {what}")]
    Violation {
        param: f64,
        trial: usize,
        what: String,
    },
}

/// Per-trial measurements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub grid_index: usize,
    pub trial: usize,
    pub attempts: usize,
    pub leaders: Vec<usize>,
    pub delta: usize,
    pub mu: usize,
    pub upsilon: usize,
    pub rank: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub param: f64,
    pub mean_delta: f64,
    pub mean_mu: f64,
    pub mean_upsilon: f64,
    pub trials_used: usize,
    pub mean_rank: Option<f64>,
}

/// All trials of the run, grid-major. Dropped trials are omitted.
pub fn run_trials(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>, ExperimentError> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = (0..spec.grid.len())
        .flat_map(|g| (0..spec.trials).map(move |t| (g, t)))
        .collect();
    let records: Vec<Option<TrialRecord>> = jobs
        .par_iter()
        .map(|&(gi, t)| run_one(spec, gi, t))
        .collect::<Result<_, _>>()?;
    Ok(records.into_iter().flatten().collect())
}

fn run_one(
    spec: &ExperimentSpec,
    gi: usize,
    t: usize,
) -> Result<Option<TrialRecord>, ExperimentError> {
    let param = spec.grid[gi];
    let mut rng = rng::stream2(spec.seed, gi as u32, t as u32);
    let gen = GenSpec::new(spec.family.family(param), spec.n, rng.next_u64());
    let Ok((g, attempts)) = resample_until_connected(&gen, spec.max_attempts) else {
        return Ok(None);
    };
    let picks = rand::seq::index::sample(&mut rng, spec.n, spec.leaders).into_vec();
    let leaders = LeaderSet::from_indices(picks).expect("distinct picks");
    let report = BoundReport::compute(&g, &leaders).expect("connected sample");
    let violation = |what: String| ExperimentError::Violation {
        param,
        trial: t,
        what,
    };
    if !(report.upsilon >= report.delta && report.delta >= report.mu) {
        return Err(violation(format!(
            "upsilon={} delta={} mu={}",
            report.upsilon, report.delta, report.mu
        )));
    }
    let rank = if spec.with_rank {
        let weight_seed = rng.next_u64();
        let r = oracle::sampled_rank(&g, &leaders, weight_seed, 0)
            .expect("valid leaders")
            .rank;
        if r < report.delta {
            return Err(violation(format!("rank {r} < delta {}", report.delta)));
        }
        Some(r)
    } else {
        None
    };
    Ok(Some(TrialRecord {
        grid_index: gi,
        trial: t,
        attempts,
        leaders: leaders.ids(),
        delta: report.delta,
        mu: report.mu,
        upsilon: report.upsilon,
        rank,
    }))
}

/// Means per grid point.
pub fn summarize(spec: &ExperimentSpec, trials: &[TrialRecord]) -> Vec<ExperimentRow> {
    spec.grid
        .iter()
        .enumerate()
        .map(|(gi, &param)| {
            let recs: Vec<&TrialRecord> = trials.iter().filter(|r| r.grid_index == gi).collect();
            let k = recs.len() as f64;
            let mean = |f: &dyn Fn(&TrialRecord) -> usize| {
                recs.iter().map(|r| f(r) as f64).sum::<f64>() / k
            };
            ExperimentRow {
                param,
                mean_delta: mean(&|r| r.delta),
                mean_mu: mean(&|r| r.mu),
                mean_upsilon: mean(&|r| r.upsilon),
                trials_used: recs.len(),
                mean_rank: spec
                    .with_rank
                    .then(|| mean(&|r| r.rank.unwrap_or(0))),
            }
        })
        .collect()
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>, ExperimentError> {
    let trials = run_trials(spec)?;
    Ok(summarize(spec, &trials))
}

/// CSV with six-decimal floats. A `mean_rank` column is appended when any
/// row carries a rank.
pub fn emit_csv(rows: &[ExperimentRow]) -> String {
    let with_rank = rows.iter().any(|r| r.mean_rank.is_some());
    let mut out = String::from(CSV_HEADER);
    if with_rank {
        out.push_str(",mean_rank");
    }
    out.push('\n');
    for r in rows {
        write!(
            out,
            "{:.6},{:.6},{:.6},{:.6},{}",
            r.param, r.mean_delta, r.mean_mu, r.mean_upsilon, r.trials_used
        )
        .unwrap();
        if with_rank {
            write!(out, ",{:.6}", r.mean_rank.unwrap_or(f64::NAN)).unwrap();
        }
        out.push('\n');
    }
    out
}
