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

use thiserror::Error;

pub type Result<T> = std::result::Result<T, ApsmError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApsmError {
    #[error("degenerate hyperplane: normal vector is zero")]
    DegenerateHyperplane,
    #[error("degenerate hyperslab: regressor vector is zero")]
    DegenerateHyperslab,
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in {what}{}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    NonFinite {
        what: &'static str,
        step: Option<usize>,
    },
    #[error("empty window")]
    EmptyWindow,
    #[error("window-loss subgradient is only available at the anchor point")]
    SubgradientOffAnchor,
    #[error("operator needs at least one soft constraint")]
    NoSoftConstraints,
    #[error("convex weights must sum to 1 (got {0})")]
    WeightsNotConvex(f64),
    #[error("active count must be at least 1")]
    NoActiveSets,
    #[error("support size {support} exceeds dimension {dimension}")]
    SupportTooLarge { support: usize, dimension: usize },
    #[error("invalid change schedule: {0}")]
    Schedule(String),
    #[error("config error on line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("run {run} failed: {source}")]
    Run {
        run: usize,
        #[source]
        source: Box<ApsmError>,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for ApsmError {
    fn from(err: std::io::Error) -> Self {
        ApsmError::Io(err.to_string())
    }
}

pub(crate) fn check_param(
    name: &'static str,
    value: f64,
    ok: bool,
    reason: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ApsmError::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}
