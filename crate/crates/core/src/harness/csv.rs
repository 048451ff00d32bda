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

//! CSV learning-curve output: header `n,msd,msd_db`, one row per step.
//! Numbers use Rust's shortest round-trip rendering; `MSD = 0` yields `-inf`.

use std::fmt::Write as _;
use std::path::Path;

use super::experiment::{to_db, MsdSeries};
use crate::error::Result;

pub fn render_csv(series: &MsdSeries) -> String {
    let mut out = String::from("n,msd,msd_db\n");
    for (n, msd) in series.values().iter().enumerate() {
        let _ = writeln!(out, "{n},{msd},{}", to_db(*msd));
    }
    out
}

pub fn emit_csv(series: &MsdSeries, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_csv(series))?;
    Ok(())
}
