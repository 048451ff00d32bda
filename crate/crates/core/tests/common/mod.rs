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

//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the projection or solver code under test.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| scale * rng.sample::<f64, _>(rand_distr::StandardNormal))
        .collect()
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(lo..hi)).collect()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

pub fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

pub fn weighted_l1(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(wi, xi)| wi * xi.abs()).sum()
}

/// Exact projection onto `{y : sum w_j |y_j| <= rho}` by enumerating every
/// face of the polytope: for a sign pattern `s` in `{-1, 0, 1}^L` the closest
/// point of the hyperplane `sum_{s_j != 0} s_j w_j y_j = rho` (with `y_j = 0`
/// where `s_j = 0`) is kept when it lies on that face. 3^L candidates.
pub fn l1_projection_by_faces(x: &[f64], w: &[f64], rho: f64) -> Vec<f64> {
    if weighted_l1(w, x) <= rho {
        return x.to_vec();
    }
    let dim = x.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let total = 3usize.pow(dim as u32);
    for code in 0..total {
        let mut signs = vec![0.0; dim];
        let mut c = code;
        for s in signs.iter_mut() {
            *s = (c % 3) as f64 - 1.0;
            c /= 3;
        }
        let den: f64 = signs.iter().zip(w).map(|(s, wj)| s * s * wj * wj).sum();
        if den == 0.0 {
            continue;
        }
        let num: f64 = signs
            .iter()
            .zip(w)
            .zip(x)
            .map(|((s, wj), xj)| s * wj * xj)
            .sum();
        let t = (num - rho) / den;
        let y: Vec<f64> = (0..dim)
            .map(|j| {
                if signs[j] == 0.0 {
                    0.0
                } else {
                    x[j] - t * signs[j] * w[j]
                }
            })
            .collect();
        if (0..dim).any(|j| signs[j] * y[j] < -1e-15) {
            continue;
        }
        let d = dist(x, &y);
        if !matches!(&best, Some((bd, _)) if *bd <= d) {
            best = Some((d, y));
        }
    }
    best.expect("some face is always admissible").1
}

/// Closest point of the 2-D weighted l1 sphere by a dense scan of its edges
/// followed by ternary refinement on the winning edge.
pub fn l1_sphere_scan_2d(x: &[f64], w: &[f64], rho: f64) -> Vec<f64> {
    let v = [
        [rho / w[0], 0.0],
        [0.0, rho / w[1]],
        [-rho / w[0], 0.0],
        [0.0, -rho / w[1]],
    ];
    let point = |e: usize, s: f64| {
        let (p, q) = (v[e], v[(e + 1) % 4]);
        [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]
    };
    let d = |p: [f64; 2]| (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2);
    let mut best = (f64::INFINITY, 0, 0.0);
    for e in 0..4 {
        for k in 0..=4000 {
            let s = k as f64 / 4000.0;
            let val = d(point(e, s));
            if val < best.0 {
                best = (val, e, s);
            }
        }
    }
    let (_, e, s) = best;
    let (mut lo, mut hi) = ((s - 5e-4).max(0.0), (s + 5e-4).min(1.0));
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if d(point(e, m1)) < d(point(e, m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    point(e, 0.5 * (lo + hi)).to_vec()
}

/// Residual of the optimality conditions of the weighted l1-ball projection
/// `y` of `x`: on the support `x_j - y_j = t w_j sign(y_j)` with one common
/// `t >= 0`, off the support `|x_j| <= t w_j`, and `y` on the boundary.
pub fn l1_kkt_residual(x: &[f64], y: &[f64], w: &[f64], rho: f64) -> f64 {
    let support: Vec<usize> = (0..y.len()).filter(|&j| y[j] != 0.0).collect();
    if support.is_empty() {
        return f64::INFINITY;
    }
    let t = support
        .iter()
        .map(|&j| (x[j] - y[j]).abs() / w[j])
        .sum::<f64>()
        / support.len() as f64;
    let mut residual: f64 = (weighted_l1(w, y) - rho).abs() / rho.max(1.0);
    for j in 0..y.len() {
        let r = if y[j] != 0.0 {
            let sign = y[j].signum();
            if x[j].signum() != sign {
                return f64::INFINITY;
            }
            (x[j] - y[j] - t * w[j] * sign).abs()
        } else {
            (x[j].abs() - t * w[j]).max(0.0)
        };
        residual = residual.max(r);
    }
    residual.max((-t).max(0.0))
}

/// Minimizes `f` over an interval by golden-section search.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let m1 = hi - r * (hi - lo);
        let m2 = lo + r * (hi - lo);
        if f(m1) < f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    0.5 * (lo + hi)
}
