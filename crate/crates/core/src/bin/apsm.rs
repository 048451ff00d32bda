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

//! Command-line harness: runs a scenario and writes its MSD learning curve.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use apsm::harness::{emit_csv, render_csv, run_experiment, ScenarioConfig, Variant, PRESETS};
use apsm::{ApsmError, Result};

#[derive(Parser)]
#[command(
    name = "apsm",
    version,
    about = "Online sparse system identification learning curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo experiment and write `n,msd,msd_db` CSV.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the effective configuration in config-file syntax.
    ShowConfig {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Base preset (fig1-time-invariant, fig2-time-varying).
    #[arg(long)]
    preset: Option<String>,
    /// Config file of `key = value` lines applied on top of the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    workers: Option<usize>,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.preset {
            Some(name) => ScenarioConfig::preset(name)?,
            None => ScenarioConfig::default(),
        };
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ApsmError::Io(format!("{}: {e}", path.display())))?;
            cfg = ScenarioConfig::parse_over(cfg, &text)?;
        }
        if let Some(v) = self.variant {
            cfg.variant = v;
        }
        if let Some(r) = self.runs {
            cfg.runs = r;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.samples {
            cfg.num_samples = n;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { scenario, out } => {
            let cfg = scenario.resolve()?;
            let result = run_experiment(&cfg)?;
            match out {
                Some(path) => {
                    emit_csv(&result.msd, &path)?;
                    eprintln!(
                        "{}: {} runs x {} samples -> {}",
                        cfg.variant,
                        cfg.runs,
                        cfg.num_samples,
                        path.display()
                    );
                }
                None => print!("{}", render_csv(&result.msd)),
            }
        }
        Command::ShowConfig { scenario } => print!("{}", scenario.resolve()?.render()),
        Command::Presets => {
            for name in PRESETS {
                println!("{name}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
