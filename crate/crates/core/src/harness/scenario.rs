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

//! Synthetic sparse systems and the streaming regression data they produce.
//!
//! Samples follow `d_n = a_n^T x_* + zeta_n`, where `a_n` is the content of
//! an L-tap shift register fed by a unit-variance white Gaussian process
//! (zero pre-history) and `zeta_n ~ N(0, sigma^2)`.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::{Assignment, ChangeSchedule, ScenarioConfig, SystemSpec};
use crate::error::{ApsmError, Result};
use crate::solver::Sample;
use crate::vector::{dot, RealVec};

/// The RNG of Monte-Carlo run `run` under `master_seed`: ChaCha8 keyed by
/// the master seed, with the run index selecting the stream. Runs therefore
/// draw from disjoint, reproducible substreams.
pub fn run_rng(master_seed: u64, run: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(run as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    x_star: RealVec,
    /// Sorted 0-based positions of the nonzero coefficients.
    support: Vec<usize>,
}

impl GroundTruth {
    pub fn new(x_star: RealVec) -> Self {
        let support = x_star
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect();
        Self { x_star, support }
    }

    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn dim(&self) -> usize {
        self.x_star.len()
    }

    fn assign(&mut self, list: &[Assignment]) -> Result<()> {
        for a in list {
            if a.index == 0 || a.index > self.x_star.len() {
                return Err(ApsmError::Schedule(format!(
                    "coefficient #{} outside 1..={}",
                    a.index,
                    self.x_star.len()
                )));
            }
            self.x_star[a.index - 1] = a.value;
        }
        *self = Self::new(std::mem::take(&mut self.x_star));
        Ok(())
    }
}

/// Draws the unknown system for one run.
pub fn gen_system<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Result<GroundTruth> {
    let dim = cfg.dimension;
    match &cfg.system {
        SystemSpec::Random => {
            if cfg.support_size > dim {
                return Err(ApsmError::SupportTooLarge {
                    support: cfg.support_size,
                    dimension: dim,
                });
            }
            let mut x = vec![0.0; dim];
            let mut positions = sample_indices(rng, dim, cfg.support_size).into_vec();
            positions.sort_unstable();
            for p in positions {
                x[p] = rng.sample(StandardNormal);
            }
            Ok(GroundTruth::new(x))
        }
        SystemSpec::Fixed(list) => {
            let mut truth = GroundTruth::new(vec![0.0; dim]);
            truth.assign(list)?;
            Ok(truth)
        }
    }
}

/// The system in force at 1-based time instant `step`: every event with
/// `event.step <= step` applied in order.
pub fn apply_change(
    truth: &GroundTruth,
    schedule: &ChangeSchedule,
    step: usize,
) -> Result<GroundTruth> {
    ChangeSchedule::new(schedule.events().to_vec())?;
    let mut current = truth.clone();
    for event in schedule.events().iter().take_while(|e| e.step <= step) {
        current.assign(&event.assignments)?;
    }
    Ok(current)
}

/// Infinite iterator of samples for one run. Instant numbering is 1-based:
/// the first sample is produced at instant 1.
pub struct SampleStream<R> {
    rng: R,
    register: RealVec,
    noise_std: f64,
    truth: GroundTruth,
    schedule: ChangeSchedule,
    next_event: usize,
    instant: usize,
}

impl<R: Rng> SampleStream<R> {
    pub fn new(truth: GroundTruth, schedule: ChangeSchedule, noise_std: f64, rng: R) -> Self {
        let register = vec![0.0; truth.dim()];
        Self {
            rng,
            register,
            noise_std,
            truth,
            schedule,
            next_event: 0,
            instant: 0,
        }
    }

    /// The system that generated the most recent sample (the initial system
    /// before the first one).
    pub fn current_truth(&self) -> &GroundTruth {
        &self.truth
    }

    /// Instants produced so far.
    pub fn instant(&self) -> usize {
        self.instant
    }

    /// Next sample together with the system that produced it.
    pub fn next_sample(&mut self) -> Result<Sample> {
        self.instant += 1;
        while let Some(event) = self.schedule.events().get(self.next_event) {
            if event.step > self.instant {
                break;
            }
            self.truth.assign(&event.assignments)?;
            self.next_event += 1;
        }
        self.register.rotate_right(1);
        self.register[0] = self.rng.sample(StandardNormal);
        let noise: f64 = self.rng.sample(StandardNormal);
        let d = dot(&self.register, self.truth.x_star()) + self.noise_std * noise;
        Ok(Sample::new(self.register.clone(), d))
    }
}

impl<R: Rng> Iterator for SampleStream<R> {
    type Item = Sample;

    fn next(&mut self) -> Option<Sample> {
        self.next_sample().ok()
    }
}

/// The sample stream for `truth` under `cfg`'s noise level and schedule.
pub fn gen_stream<R: Rng>(truth: &GroundTruth, cfg: &ScenarioConfig, rng: R) -> SampleStream<R> {
    SampleStream::new(
        truth.clone(),
        cfg.change_schedule.clone(),
        cfg.noise_std(),
        rng,
    )
}
