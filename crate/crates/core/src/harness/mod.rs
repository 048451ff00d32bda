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

//! Reproduction harness: scenario configuration, synthetic data, Monte-Carlo
//! learning curves and CSV output.

pub mod config;
pub mod csv;
pub mod experiment;
pub mod scenario;

pub use config::{
    parse_change_schedule, ChangeSchedule, ScenarioConfig, SystemSpec, Variant, PRESETS,
};
pub use csv::{emit_csv, render_csv};
pub use experiment::{
    run_experiment, run_variant, simulate_run, ExperimentResult, MsdSeries, RunTrace,
};
pub use scenario::{apply_change, gen_stream, gen_system, run_rng, GroundTruth, SampleStream};
