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

//! Scenario configuration: presets, the flat `key = value` file format and
//! its parser.
//!
//! ```text
//! # comments start with '#'
//! preset = fig2-time-varying
//! runs = 300
//! system = 1=1, 2=1, 3=1
//! change_schedule = 501: 2=0, 4=0; 800: 9=-1
//! ```
//!
//! Coefficient indices in `system` and `change_schedule` are 1-based.
//! Unknown and duplicated keys are rejected.

use std::fmt;
use std::str::FromStr;

use crate::error::{ApsmError, Result};
use crate::solver::{ConstraintVariant, Reweighting, RunConfig, StepPolicy};
use crate::sparse::nlms_config;

pub const PRESETS: [&str; 2] = ["fig1-time-invariant", "fig2-time-varying"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    SubgradBall,
    ExactBall,
    Nlms,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::SubgradBall, Variant::ExactBall, Variant::Nlms];

    pub fn name(self) -> &'static str {
        match self {
            Variant::SubgradBall => "subgrad-ball",
            Variant::ExactBall => "exact-ball",
            Variant::Nlms => "nlms",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                format!("unknown variant `{s}` (expected subgrad-ball, exact-ball or nlms)")
            })
    }
}

/// `coefficient #index := value`, with a 1-based index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment {
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    /// `support_size` Gaussian coefficients at uniformly drawn positions.
    Random,
    /// All-zero system with the listed coefficients set.
    Fixed(Vec<Assignment>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChangeEvent {
    /// 1-based time instant at which the assignments take effect.
    pub step: usize,
    pub assignments: Vec<Assignment>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChangeSchedule {
    events: Vec<ChangeEvent>,
}

impl ChangeSchedule {
    pub fn new(events: Vec<ChangeEvent>) -> Result<Self> {
        for pair in events.windows(2) {
            if pair[1].step <= pair[0].step {
                return Err(ApsmError::Schedule(format!(
                    "steps must be strictly increasing ({} then {})",
                    pair[0].step, pair[1].step
                )));
            }
        }
        if events.iter().any(|e| e.step == 0) {
            return Err(ApsmError::Schedule("steps are 1-based".into()));
        }
        Ok(Self { events })
    }

    pub fn events(&self) -> &[ChangeEvent] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

fn parse_assignments(text: &str) -> std::result::Result<Vec<Assignment>, String> {
    let mut out = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (idx, val) = item
            .split_once('=')
            .ok_or_else(|| format!("expected `index=value`, got `{item}`"))?;
        let index: usize = idx
            .trim()
            .parse()
            .map_err(|_| format!("bad coefficient index `{}`", idx.trim()))?;
        if index == 0 {
            return Err("coefficient indices are 1-based".into());
        }
        let value = parse_f64(val.trim())?;
        out.push(Assignment { index, value });
    }
    if out.is_empty() {
        return Err("empty assignment list".into());
    }
    Ok(out)
}

fn render_assignments(list: &[Assignment]) -> String {
    list.iter()
        .map(|a| format!("{}={}", a.index, a.value))
        .collect::<Vec<_>>()
        .join(", ")
}

impl FromStr for SystemSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "random" => Ok(SystemSpec::Random),
            other => parse_assignments(other).map(SystemSpec::Fixed),
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSpec::Random => f.write_str("random"),
            SystemSpec::Fixed(list) => f.write_str(&render_assignments(list)),
        }
    }
}

/// `none` or `step: i=v, ...; step: i=v, ...`
pub fn parse_change_schedule(text: &str) -> Result<ChangeSchedule> {
    let text = text.trim();
    if text.is_empty() || text == "none" {
        return Ok(ChangeSchedule::default());
    }
    let mut events = Vec::new();
    for chunk in text.split(';') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let (step, rest) = chunk.split_once(':').ok_or_else(|| {
            ApsmError::Schedule(format!("expected `step: assignments`, got `{chunk}`"))
        })?;
        let step: usize = step
            .trim()
            .parse()
            .map_err(|_| ApsmError::Schedule(format!("bad step `{}`", step.trim())))?;
        let assignments = parse_assignments(rest).map_err(ApsmError::Schedule)?;
        events.push(ChangeEvent { step, assignments });
    }
    ChangeSchedule::new(events)
}

impl fmt::Display for ChangeSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.events.is_empty() {
            return f.write_str("none");
        }
        let parts: Vec<String> = self
            .events
            .iter()
            .map(|e| format!("{}: {}", e.step, render_assignments(&e.assignments)))
            .collect();
        f.write_str(&parts.join("; "))
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s
        .parse()
        .map_err(|_| format!("expected a number, got `{s}`"))?;
    if !v.is_finite() {
        return Err(format!("value `{s}` is not finite"));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Dimension `L` of the unknown system.
    pub dimension: usize,
    /// Nonzero count of a random system.
    pub support_size: usize,
    pub noise_variance: f64,
    pub num_samples: usize,
    pub runs: usize,
    pub seed: u64,
    pub q: usize,
    pub rho: f64,
    pub eps_check: f64,
    /// `xi = xi_factor * sigma`.
    pub xi_factor: f64,
    pub lambda: f64,
    pub nu: f64,
    pub variant: Variant,
    pub system: SystemSpec,
    pub change_schedule: ChangeSchedule,
    /// Worker threads for the Monte-Carlo runs; 0 picks the default pool.
    pub workers: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::fig1()
    }
}

impl ScenarioConfig {
    /// Time-invariant system of length 100 with 5 Gaussian nonzeros.
    pub fn fig1() -> Self {
        Self {
            dimension: 100,
            support_size: 5,
            noise_variance: 0.1,
            num_samples: 1000,
            runs: 50,
            seed: 1,
            q: 25,
            rho: 6.0,
            eps_check: 0.005,
            xi_factor: 2.0,
            lambda: 1.0,
            nu: 1.0,
            variant: Variant::SubgradBall,
            system: SystemSpec::Random,
            change_schedule: ChangeSchedule::default(),
            workers: 0,
        }
    }

    /// Coefficients #1..#5 equal to one; at instant 501 #2 and #4 drop to
    /// zero and the odd coefficients #7..#15 switch on.
    pub fn fig2() -> Self {
        let ones = |idx: &[usize]| {
            idx.iter()
                .map(|&index| Assignment { index, value: 1.0 })
                .collect::<Vec<_>>()
        };
        let mut change = vec![
            Assignment {
                index: 2,
                value: 0.0,
            },
            Assignment {
                index: 4,
                value: 0.0,
            },
        ];
        change.extend(ones(&[7, 9, 11, 13, 15]));
        Self {
            support_size: 5,
            num_samples: 1001,
            rho: 9.0,
            system: SystemSpec::Fixed(ones(&[1, 2, 3, 4, 5])),
            change_schedule: ChangeSchedule {
                events: vec![ChangeEvent {
                    step: 501,
                    assignments: change,
                }],
            },
            ..Self::fig1()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "fig1-time-invariant" => Ok(Self::fig1()),
            "fig2-time-varying" => Ok(Self::fig2()),
            other => Err(ApsmError::Config {
                line: 0,
                message: format!(
                    "unknown preset `{other}` (expected one of {})",
                    PRESETS.join(", ")
                ),
            }),
        }
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_variance.sqrt()
    }

    pub fn xi(&self) -> f64 {
        self.xi_factor * self.noise_std()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |message: String| Err(ApsmError::Config { line: 0, message });
        if self.dimension == 0 {
            return fail("dimension must be at least 1".into());
        }
        if self.support_size > self.dimension {
            return Err(ApsmError::SupportTooLarge {
                support: self.support_size,
                dimension: self.dimension,
            });
        }
        if self.runs == 0 {
            return fail("runs must be at least 1".into());
        }
        if self.q == 0 {
            return fail("q must be at least 1".into());
        }
        let positive = [("rho", self.rho), ("eps_check", self.eps_check)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive"));
            }
        }
        let non_negative = [
            ("noise_variance", self.noise_variance),
            ("xi_factor", self.xi_factor),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return fail(format!("{name} must be non-negative"));
            }
        }
        for (name, v) in [("lambda", self.lambda), ("nu", self.nu)] {
            if !(v > 0.0 && v < 2.0) {
                return fail(format!("{name} must lie in (0, 2)"));
            }
        }
        let check_indices = |list: &[Assignment]| -> Result<()> {
            match list
                .iter()
                .find(|a| a.index == 0 || a.index > self.dimension)
            {
                Some(a) => fail(format!(
                    "coefficient #{} outside 1..={}",
                    a.index, self.dimension
                )),
                None => Ok(()),
            }
        };
        if let SystemSpec::Fixed(list) = &self.system {
            check_indices(list)?;
        }
        for e in self.change_schedule.events() {
            check_indices(&e.assignments)?;
        }
        ChangeSchedule::new(self.change_schedule.events.clone())?;
        Ok(())
    }

    /// Solver settings for `variant`.
    pub fn run_config(&self, variant: Variant) -> Result<RunConfig> {
        match variant {
            Variant::Nlms => nlms_config(self.lambda),
            Variant::SubgradBall | Variant::ExactBall => {
                let rw = Reweighting::new(self.rho, self.eps_check)?;
                let constraint = if variant == Variant::SubgradBall {
                    ConstraintVariant::SubgradBall(rw)
                } else {
                    ConstraintVariant::ExactBall(rw)
                };
                Ok(RunConfig {
                    q: self.q,
                    xi: self.xi(),
                    constraint,
                    policy: StepPolicy::constant(self.lambda, self.nu)?,
                })
            }
        }
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn int<T: FromStr>(v: &str) -> std::result::Result<T, String> {
            v.parse()
                .map_err(|_| format!("expected a non-negative integer, got `{v}`"))
        }
        match key {
            "dimension" => self.dimension = int(value)?,
            "support_size" => self.support_size = int(value)?,
            "noise_variance" => self.noise_variance = parse_f64(value)?,
            "num_samples" => self.num_samples = int(value)?,
            "runs" => self.runs = int(value)?,
            "seed" => self.seed = int(value)?,
            "q" => self.q = int(value)?,
            "rho" => self.rho = parse_f64(value)?,
            "eps_check" => self.eps_check = parse_f64(value)?,
            "xi_factor" => self.xi_factor = parse_f64(value)?,
            "lambda" => self.lambda = parse_f64(value)?,
            "nu" => self.nu = parse_f64(value)?,
            "variant" => self.variant = value.parse()?,
            "system" => self.system = value.parse()?,
            "change_schedule" => {
                self.change_schedule = parse_change_schedule(value).map_err(|e| e.to_string())?
            }
            "workers" => self.workers = int(value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Parses a config file on top of the fig1 defaults (or of the preset
    /// named by a `preset` key).
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_over(Self::default(), text)
    }

    /// Parses a config file on top of `base`.
    pub fn parse_over(base: Self, text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, &str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ApsmError::Config {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if entries.iter().any(|(_, k, _)| *k == key) {
                return Err(ApsmError::Config {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
            entries.push((line_no, key, value.trim()));
        }

        let mut cfg = match entries.iter().find(|(_, k, _)| *k == "preset") {
            Some((line, _, name)) => Self::preset(name).map_err(|e| match e {
                ApsmError::Config { message, .. } => ApsmError::Config {
                    line: *line,
                    message,
                },
                other => other,
            })?,
            None => base,
        };
        for (line, key, value) in entries {
            if key == "preset" {
                continue;
            }
            cfg.set(key, value)
                .map_err(|message| ApsmError::Config { line, message })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Renders every key in the file format; `parse` reads it back unchanged.
    pub fn render(&self) -> String {
        format!(
            "dimension = {}\nsupport_size = {}\nnoise_variance = {}\nnum_samples = {}\nruns = {}\nseed = {}\n\
             q = {}\nrho = {}\neps_check = {}\nxi_factor = {}\nlambda = {}\nnu = {}\nvariant = {}\n\
             system = {}\nchange_schedule = {}\nworkers = {}\n",
            self.dimension,
            self.support_size,
            self.noise_variance,
            self.num_samples,
            self.runs,
            self.seed,
            self.q,
            self.rho,
            self.eps_check,
            self.xi_factor,
            self.lambda,
            self.nu,
            self.variant,
            self.system,
            self.change_schedule,
            self.workers,
        )
    }
}
