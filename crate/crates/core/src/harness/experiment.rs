/*
Copyright 2026 The APSM Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

//! Monte-Carlo learning curves.
//!
//! Every run draws its system and data from its own RNG substream, so the
//! variants of one configuration see identical data and results do not
//! depend on the worker count: runs are reduced in run-index order.

use rayon::prelude::*;

use super::config::{ScenarioConfig, Variant};
use super::scenario::{gen_stream, gen_system, run_rng};
use crate::error::{ApsmError, Result};
use crate::vector::dist_sq;

/// `MSD(n) = (1/R) sum_r ||x_*(n) - u_n^(r)||^2`, `n = 0..num_samples`.
#[derive(Debug, Clone, PartialEq)]
pub struct MsdSeries {
    values: Vec<f64>,
}

impl MsdSeries {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn db(&self) -> Vec<f64> {
        self.values.iter().map(|v| to_db(*v)).collect()
    }

    /// Mean MSD over `n` in `[start, end]`, in dB.
    pub fn mean_db(&self, start: usize, end: usize) -> f64 {
        let slice = &self.values[start..=end];
        to_db(slice.iter().sum::<f64>() / slice.len() as f64)
    }
}

pub fn to_db(v: f64) -> f64 {
    10.0 * v.log10()
}

/// Per-step traces of a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    /// `||x_*(n) - u_n||^2`
    pub sq_dev: Vec<f64>,
    /// `Theta_n(u_n)`
    pub theta: Vec<f64>,
    pub max_window_distance: Vec<f64>,
    /// `Phi_n(u_n)` (zero for the unconstrained variant)
    pub phi: Vec<f64>,
    pub min_m_n: f64,
    /// Steps with `mu_n` outside `(0, 2 M_n)`.
    pub mu_violations: usize,
    /// Samples skipped for a zero regressor.
    pub skipped: usize,
}

/// Runs one Monte-Carlo realisation of `cfg` with `variant`, from `u_0 = 0`.
/// `x_*(n)` is the system that produced the latest sample consumed by `u_n`
/// (the initial system for `n = 0`).
pub fn simulate_run(cfg: &ScenarioConfig, variant: Variant, run: usize) -> Result<RunTrace> {
    let mut rng = run_rng(cfg.seed, run);
    let truth = gen_system(cfg, &mut rng)?;
    let mut stream = gen_stream(&truth, cfg, rng);
    let run_cfg = cfg.run_config(variant)?;
    let mut state = run_cfg.initial_state(vec![0.0; cfg.dimension])?;

    let n = cfg.num_samples;
    let mut trace = RunTrace {
        sq_dev: Vec::with_capacity(n),
        theta: Vec::with_capacity(n),
        max_window_distance: Vec::with_capacity(n),
        phi: Vec::with_capacity(n),
        min_m_n: f64::INFINITY,
        mu_violations: 0,
        skipped: 0,
    };
    for _ in 0..n {
        trace
            .sq_dev
            .push(dist_sq(stream.current_truth().x_star(), state.iterate()));
        let sample = stream.next_sample()?;
        match state.step_sample(&sample, &run_cfg)? {
            Some(report) => {
                trace.theta.push(report.theta_value);
                trace.max_window_distance.push(report.max_window_distance);
                trace.phi.push(report.phi_at_iterate.unwrap_or(0.0));
                trace.min_m_n = trace.min_m_n.min(report.m_n);
                if !(report.mu_n > 0.0 && report.mu_n < 2.0 * report.m_n) {
                    trace.mu_violations += 1;
                }
            }
            None => {
                trace.skipped += 1;
                trace.theta.push(0.0);
                trace.max_window_distance.push(0.0);
                trace.phi.push(0.0);
            }
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub variant: Variant,
    pub msd: MsdSeries,
    /// Run-averaged `Theta_n(u_n)`.
    pub theta: Vec<f64>,
    pub max_window_distance: Vec<f64>,
    pub phi: Vec<f64>,
    pub min_m_n: f64,
    pub mu_violations: usize,
    pub skipped: usize,
}

fn mean_columns(rows: &[&[f64]]) -> Vec<f64> {
    let len = rows.first().map_or(0, |r| r.len());
    let mut out = vec![0.0; len];
    for row in rows {
        for (o, v) in out.iter_mut().zip(row.iter()) {
            *o += v;
        }
    }
    let count = rows.len() as f64;
    out.iter_mut().for_each(|o| *o /= count);
    out
}

/// Monte-Carlo experiment for `cfg.variant`.
pub fn run_experiment(cfg: &ScenarioConfig) -> Result<ExperimentResult> {
    run_variant(cfg, cfg.variant)
}

pub fn run_variant(cfg: &ScenarioConfig, variant: Variant) -> Result<ExperimentResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| ApsmError::Io(format!("cannot start worker pool: {e}")))?;
    let traces: Vec<RunTrace> = pool.install(|| {
        (0..cfg.runs)
            .into_par_iter()
            .map(|run| {
                simulate_run(cfg, variant, run).map_err(|e| ApsmError::Run {
                    run,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let column =
        |f: fn(&RunTrace) -> &[f64]| mean_columns(&traces.iter().map(f).collect::<Vec<_>>());
    Ok(ExperimentResult {
        variant,
        msd: MsdSeries::new(column(|t| &t.sq_dev)),
        theta: column(|t| &t.theta),
        max_window_distance: column(|t| &t.max_window_distance),
        phi: column(|t| &t.phi),
        min_m_n: traces
            .iter()
            .map(|t| t.min_m_n)
            .fold(f64::INFINITY, f64::min),
        mu_violations: traces.iter().map(|t| t.mu_violations).sum(),
        skipped: traces.iter().map(|t| t.skipped).sum(),
    })
}
