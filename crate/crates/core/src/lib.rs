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

//! Adaptive projected subgradient method (APSM) driven by sequences of
//! strongly attracting quasi-nonexpansive mappings, with an application
//! layer for online sparse system identification.
//!
//! * [`ops`]: projections and the attracting-operator algebra.
//! * [`loss`]: convex loss oracles (sliding-window hyperslab loss, sparsity loss).
//! * [`solver`]: the generic recursion, its fused extrapolated form, diagnostics.
//! * [`sparse`]: hyperslabs, reweighting, weighted l1-ball projections, NLMS.
//! * [`harness`]: Monte-Carlo learning-curve experiments and their configuration.

pub mod error;
pub mod harness;
pub mod loss;
pub mod ops;
pub mod solver;
pub mod sparse;
pub mod vector;

pub use error::{ApsmError, Result};
pub use vector::RealVec;
