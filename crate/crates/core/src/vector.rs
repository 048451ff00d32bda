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

//! Dense real vectors and the handful of BLAS-1 kernels the solver needs.
//!
//! Vectors are plain `Vec<f64>`; every routine works on slices so callers can
//! pass windows or scratch buffers without copying.

use crate::error::{ApsmError, Result};

/// An element of the ambient space `R^L`.
pub type RealVec = Vec<f64>;

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn norm_sq(x: &[f64]) -> f64 {
    dot(x, x)
}

#[inline]
pub fn norm(x: &[f64]) -> f64 {
    norm_sq(x).sqrt()
}

pub fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    dist_sq(x, y).sqrt()
}

pub fn sub(x: &[f64], y: &[f64]) -> RealVec {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `x + alpha * (target - x)`: the relaxation of a map value `target` taken at `x`.
pub fn relax_towards(x: &[f64], target: &[f64], alpha: f64) -> RealVec {
    x.iter()
        .zip(target)
        .map(|(xi, ti)| xi + alpha * (ti - xi))
        .collect()
}

pub fn l1_weighted(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(wi, xi)| wi * xi.abs()).sum()
}

/// Sign with `sign(0) = 0`.
#[inline]
pub fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn ensure_finite(x: &[f64], what: &'static str, step: Option<usize>) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(ApsmError::NonFinite { what, step })
    }
}

pub fn ensure_len(x: &[f64], expected: usize) -> Result<()> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(ApsmError::DimensionMismatch {
            expected,
            found: x.len(),
        })
    }
}
