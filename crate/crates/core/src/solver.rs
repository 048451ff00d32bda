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

//! The adaptive projected subgradient engine.
//!
//! [`SolverState::apsm_step`] runs the generic recursion
//!
//! ```text
//! u_{n+1} = T_n(u_n - lambda_n Theta_n(u_n) / ||Theta_n'(u_n)||^2 Theta_n'(u_n))
//! ```
//!
//! for any loss oracle and attracting operator. [`SolverState::fused_step`]
//! is the extrapolated form specialised to the sliding-window hyperslab loss
//! and the sparsity constraint:
//!
//! ```text
//! u_{n+1} = T_Phi(u_n + mu_n (sum_i omega_i P_{S_i}(u_n) - u_n)),  mu_n = lambda_n M_n
//! ```
//!
//! with `M_n = sum_i omega_i d^2(u_n, S_i) / ||sum_i omega_i (u_n - P_{S_i}(u_n))||^2`.

use std::collections::VecDeque;

use crate::error::{check_param, ApsmError, Result};
use crate::loss::{window_geometry, ConvexLossOracle, SparsityLoss, WindowLoss};
use crate::ops::{identity, AttractingOperator};
use crate::sparse::{
    exact_ball_operator, project_weighted_l1, sparsity_projection_operator,
    sparsity_subgradient_step, update_weights, Hyperslab,
};
use crate::vector::{axpy, dist, dist_sq, ensure_finite, ensure_len, norm, norm_sq, RealVec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    pub lambda: f64,
    /// `lambda` must lie in `[epsilon_guard, 2 - epsilon_guard]`.
    pub epsilon_guard: f64,
    pub nu: f64,
    pub nu_guard: f64,
    /// Relative zero threshold: a vector `g` counts as zero when
    /// `||g|| <= zero_tol (1 + ||u_n||)`.
    pub zero_tol: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            epsilon_guard: 1.0,
            nu: 1.0,
            nu_guard: 1.0,
            zero_tol: 1e-12,
        }
    }
}

impl StepPolicy {
    pub fn new(lambda: f64, epsilon_guard: f64, nu: f64, nu_guard: f64) -> Result<Self> {
        let policy = Self {
            lambda,
            epsilon_guard,
            nu,
            nu_guard,
            ..Self::default()
        };
        policy.validate()?;
        Ok(policy)
    }

    /// Constant schedules with the widest guards that admit them.
    pub fn constant(lambda: f64, nu: f64) -> Result<Self> {
        let guard = |v: f64| v.min(2.0 - v).min(1.0);
        Self::new(lambda, guard(lambda), nu, guard(nu))
    }

    pub fn validate(&self) -> Result<()> {
        let unit =
            |name, v: f64| check_param(name, v, v > 0.0 && v <= 1.0, "guard must lie in (0, 1]");
        unit("epsilon_guard", self.epsilon_guard)?;
        unit("nu_guard", self.nu_guard)?;
        check_param(
            "lambda",
            self.lambda,
            self.lambda >= self.epsilon_guard && self.lambda <= 2.0 - self.epsilon_guard,
            "outside [eps, 2 - eps]",
        )?;
        check_param(
            "nu",
            self.nu,
            self.nu >= self.nu_guard && self.nu <= 2.0 - self.nu_guard,
            "outside [eps', 2 - eps']",
        )?;
        check_param(
            "zero_tol",
            self.zero_tol,
            self.zero_tol >= 0.0,
            "must be non-negative",
        )
    }

    pub fn zero_threshold(&self, u: &[f64]) -> f64 {
        self.zero_tol * (1.0 + norm(u))
    }
}

/// FIFO buffer of the last `q` hyperslabs.
#[derive(Debug, Clone)]
pub struct SlabWindow {
    capacity: usize,
    slabs: VecDeque<Hyperslab>,
}

impl SlabWindow {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(ApsmError::InvalidParameter {
                name: "q",
                value: 0.0,
                reason: "window length must be at least 1",
            });
        }
        Ok(Self {
            capacity,
            slabs: VecDeque::with_capacity(capacity),
        })
    }

    pub fn push(&mut self, slab: Hyperslab) {
        if self.slabs.len() == self.capacity {
            self.slabs.pop_front();
        }
        self.slabs.push_back(slab);
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.slabs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slabs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Hyperslab> {
        self.slabs.iter()
    }
}

/// One regression sample `(a_n, d_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub a: RealVec,
    pub d: f64,
}

impl Sample {
    pub fn new(a: RealVec, d: f64) -> Self {
        Self { a, d }
    }
}

/// Builds the sparsity loss for the current iterate: weights
/// `1 / (|u_j| + eps_check)` and radius `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reweighting {
    pub rho: f64,
    pub eps_check: f64,
}

impl Reweighting {
    pub fn new(rho: f64, eps_check: f64) -> Result<Self> {
        check_param("rho", rho, rho > 0.0, "must be positive")?;
        check_param("eps_check", eps_check, eps_check > 0.0, "must be positive")?;
        Ok(Self { rho, eps_check })
    }

    pub fn loss_at(&self, u: &[f64]) -> Result<SparsityLoss> {
        let w = update_weights(u, self.eps_check);
        SparsityLoss::with_bounds(
            w,
            self.rho,
            1.0 / (norm_inf(u) + self.eps_check),
            1.0 / self.eps_check,
        )
    }
}

fn norm_inf(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// The a-priori constraint applied after the extrapolated window step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstraintVariant {
    /// Relaxed subgradient projection onto the reweighted l1-ball, O(L).
    SubgradBall(Reweighting),
    /// Exact metric projection onto the reweighted l1-ball, O(L log L).
    ExactBall(Reweighting),
    /// No constraint (NLMS / APA-like configurations).
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub q: usize,
    pub xi: f64,
    pub constraint: ConstraintVariant,
    pub policy: StepPolicy,
}

impl RunConfig {
    pub fn initial_state(&self, u0: RealVec) -> Result<SolverState> {
        check_param("xi", self.xi, self.xi >= 0.0, "must be non-negative")?;
        SolverState::new(u0, self.q, self.policy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusedStepReport {
    /// Extrapolation coefficient `M_n >= 1`.
    pub m_n: f64,
    /// `mu_n = lambda_n M_n`.
    pub mu_n: f64,
    pub active_count: usize,
    /// `Theta_n(u_n)`.
    pub theta_value: f64,
    /// `Phi_n(u_{n+1})`, when a sparsity loss takes part in the step.
    pub phi_value: Option<f64>,
    /// `Phi_n(u_n)`
    pub phi_at_iterate: Option<f64>,
    pub max_window_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApsmStepReport {
    pub theta_value: f64,
    pub subgrad_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// `Theta_n(u_n)`
    pub theta: f64,
    /// `max{d(u_n, S_j) : j in J_n}`
    pub max_window_distance: f64,
    /// `||u_{n+1} - u_n||`
    pub step_norm: f64,
    /// `Phi_n(u_n)`
    pub phi_at_iterate: Option<f64>,
    pub m_n: Option<f64>,
    pub mu_n: Option<f64>,
    /// `||u_n - v_ref||`
    pub reference_before: Option<f64>,
    /// `||u_{n+1} - v_ref||`
    pub reference_after: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsLog {
    records: Vec<StepRecord>,
}

impl DiagnosticsLog {
    pub fn push(&mut self, record: StepRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct SolverState {
    iterate: RealVec,
    step_index: usize,
    window: SlabWindow,
    policy: StepPolicy,
    diagnostics: Option<DiagnosticsLog>,
    reference: Option<RealVec>,
}

fn at_step(err: ApsmError, step: usize) -> ApsmError {
    match err {
        ApsmError::NonFinite { what, .. } => ApsmError::NonFinite {
            what,
            step: Some(step),
        },
        other => other,
    }
}

impl SolverState {
    pub fn new(u0: RealVec, q: usize, policy: StepPolicy) -> Result<Self> {
        policy.validate()?;
        ensure_finite(&u0, "initial point", None)?;
        Ok(Self {
            iterate: u0,
            step_index: 0,
            window: SlabWindow::new(q)?,
            policy,
            diagnostics: None,
            reference: None,
        })
    }

    /// Turns on per-step diagnostics.
    pub fn with_diagnostics(mut self) -> Self {
        self.diagnostics.get_or_insert_with(DiagnosticsLog::default);
        self
    }

    /// Tracks `||u_n - v_ref||` in the diagnostics (and turns them on).
    pub fn with_reference(mut self, v_ref: RealVec) -> Self {
        self.reference = Some(v_ref);
        self.with_diagnostics()
    }

    pub fn iterate(&self) -> &[f64] {
        &self.iterate
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn window(&self) -> &SlabWindow {
        &self.window
    }

    pub fn policy(&self) -> &StepPolicy {
        &self.policy
    }

    pub fn set_policy(&mut self, policy: StepPolicy) -> Result<()> {
        policy.validate()?;
        self.policy = policy;
        Ok(())
    }

    pub fn diagnostics(&self) -> Option<&DiagnosticsLog> {
        self.diagnostics.as_ref()
    }

    pub fn take_diagnostics(&mut self) -> Option<DiagnosticsLog> {
        self.diagnostics.take()
    }

    pub fn push_slab(&mut self, slab: Hyperslab) -> Result<()> {
        ensure_len(slab.a(), self.iterate.len())?;
        self.window.push(slab);
        Ok(())
    }

    /// `Theta_n` anchored at the current iterate with uniform weights.
    pub fn window_loss(&self) -> Result<WindowLoss> {
        WindowLoss::new(self.window.iter().cloned().collect(), self.iterate.clone())
    }

    fn commit(&mut self, next: RealVec, mut record: StepRecord) -> Result<()> {
        ensure_finite(&next, "iterate", Some(self.step_index))?;
        if let Some(log) = self.diagnostics.as_mut() {
            record.step_norm = dist(&next, &self.iterate);
            record.reference_before = self.reference.as_ref().map(|v| dist(&self.iterate, v));
            record.reference_after = self.reference.as_ref().map(|v| dist(&next, v));
            log.push(record);
        }
        self.iterate = next;
        self.step_index += 1;
        Ok(())
    }

    /// One step of the generic recursion with loss `Theta_n` and operator `T_n`.
    pub fn apsm_step(
        &mut self,
        loss: &dyn ConvexLossOracle,
        constraint: &dyn AttractingOperator,
    ) -> Result<ApsmStepReport> {
        let n = self.step_index;
        let u = &self.iterate;
        let value = loss.value(u).map_err(|e| at_step(e, n))?;
        if !value.is_finite() {
            return Err(ApsmError::NonFinite {
                what: "loss value",
                step: Some(n),
            });
        }
        let g = loss.subgrad(u).map_err(|e| at_step(e, n))?;
        ensure_finite(&g, "subgradient", Some(n))?;
        let g_norm = norm(&g);

        let mut moved = u.clone();
        if g_norm > self.policy.zero_threshold(u) {
            axpy(
                -self.policy.lambda * value / (g_norm * g_norm),
                &g,
                &mut moved,
            );
            ensure_finite(&moved, "subgradient step", Some(n))?;
        }
        let next = constraint.apply(&moved).map_err(|e| at_step(e, n))?;

        let record = self.diagnostics.as_ref().map(|_| StepRecord {
            step: n,
            theta: value,
            max_window_distance: window_geometry(self.window.iter(), u).max_distance,
            step_norm: 0.0,
            phi_at_iterate: None,
            m_n: None,
            mu_n: None,
            reference_before: None,
            reference_after: None,
        });
        self.commit(next, record.unwrap_or_else(empty_record))?;
        Ok(ApsmStepReport {
            theta_value: value,
            subgrad_norm: g_norm,
        })
    }

    /// Extrapolated window step followed by `constraint`.
    fn fused_core(
        &mut self,
        sparsity: Option<&SparsityLoss>,
        constraint: impl FnOnce(&[f64]) -> Result<RealVec>,
    ) -> Result<FusedStepReport> {
        let n = self.step_index;
        let u = &self.iterate;
        let dim = u.len();
        let geometry = window_geometry(self.window.iter(), u);
        let active_count = geometry.active.len();

        let mut m_n = 1.0;
        let mut theta = 0.0;
        let mut moved = u.clone();
        if active_count > 0 {
            let omega = 1.0 / active_count as f64;
            // displacement = sum_i omega_i (P_i(u) - u)
            let mut displacement = vec![0.0; dim];
            let (mut weighted_sq, mut l_n) = (0.0, 0.0);
            for (_, d, p) in &geometry.active {
                weighted_sq += omega * dist_sq(u, p);
                l_n += omega * d;
                for j in 0..dim {
                    displacement[j] += omega * (p[j] - u[j]);
                }
            }
            theta = weighted_sq / l_n;
            let denom = norm_sq(&displacement);
            let tol = self.policy.zero_threshold(u);
            if denom > tol * tol {
                // >= 1 by convexity of the squared norm; the clamp only absorbs rounding
                m_n = (weighted_sq / denom).max(1.0);
            }
            axpy(self.policy.lambda * m_n, &displacement, &mut moved);
            ensure_finite(&moved, "extrapolated point", Some(n))?;
        }
        let mu_n = self.policy.lambda * m_n;

        let phi_at_iterate = sparsity.map(|s| crate::loss::phi_value(s, u));
        let next = constraint(&moved).map_err(|e| at_step(e, n))?;
        let report = FusedStepReport {
            m_n,
            mu_n,
            active_count,
            theta_value: theta,
            phi_value: sparsity.map(|s| crate::loss::phi_value(s, &next)),
            phi_at_iterate,
            max_window_distance: geometry.max_distance,
        };
        let record = StepRecord {
            step: n,
            theta,
            max_window_distance: geometry.max_distance,
            step_norm: 0.0,
            phi_at_iterate,
            m_n: Some(m_n),
            mu_n: Some(mu_n),
            reference_before: None,
            reference_after: None,
        };
        self.commit(next, record)?;
        Ok(report)
    }

    /// Extrapolated step with the relaxed subgradient projection of `Phi_n`
    /// (relaxation `nu` from the policy).
    pub fn fused_step(&mut self, sparsity: &SparsityLoss) -> Result<FusedStepReport> {
        ensure_len(sparsity.ball().weights(), self.iterate.len())?;
        let nu = self.policy.nu;
        let ball = sparsity.ball();
        self.fused_core(Some(sparsity), |v| {
            Ok(sparsity_subgradient_step(ball, v, nu))
        })
    }

    /// Extrapolated step followed by an arbitrary attracting operator.
    pub fn fused_step_with(
        &mut self,
        constraint: &dyn AttractingOperator,
        sparsity: Option<&SparsityLoss>,
    ) -> Result<FusedStepReport> {
        self.fused_core(sparsity, |v| constraint.apply(v))
    }

    /// Forms the hyperslab for `sample`, reweights and takes one fused step.
    /// Samples with a zero regressor are skipped: no slab, iterate unchanged.
    pub fn step_sample(
        &mut self,
        sample: &Sample,
        cfg: &RunConfig,
    ) -> Result<Option<FusedStepReport>> {
        ensure_len(&sample.a, self.iterate.len())?;
        let slab = match Hyperslab::new(sample.a.clone(), sample.d, cfg.xi) {
            Ok(slab) => slab,
            Err(ApsmError::DegenerateHyperslab) => {
                self.step_index += 1;
                return Ok(None);
            }
            Err(e) => return Err(at_step(e, self.step_index)),
        };
        self.window.push(slab);
        let report = match cfg.constraint {
            ConstraintVariant::SubgradBall(rw) => {
                let loss = rw.loss_at(&self.iterate)?;
                self.fused_step(&loss)?
            }
            ConstraintVariant::ExactBall(rw) => {
                let loss = rw.loss_at(&self.iterate)?;
                let ball = loss.ball().clone();
                self.fused_core(Some(&loss), |v| Ok(project_weighted_l1(v, &ball)))?
            }
            ConstraintVariant::Identity => self.fused_core(None, |v| Ok(v.to_vec()))?,
        };
        Ok(Some(report))
    }
}

fn empty_record() -> StepRecord {
    StepRecord {
        step: 0,
        theta: 0.0,
        max_window_distance: 0.0,
        step_norm: 0.0,
        phi_at_iterate: None,
        m_n: None,
        mu_n: None,
        reference_before: None,
        reference_after: None,
    }
}

/// The operator used as `T_n` for a given constraint variant at iterate `u`.
pub fn constraint_operator(
    variant: &ConstraintVariant,
    u: &[f64],
    nu: f64,
) -> Result<(crate::ops::Operator, Option<SparsityLoss>)> {
    match variant {
        ConstraintVariant::SubgradBall(rw) => {
            let loss = rw.loss_at(u)?;
            let op = sparsity_projection_operator(loss.ball().clone(), nu)?;
            Ok((op, Some(loss)))
        }
        ConstraintVariant::ExactBall(rw) => {
            let loss = rw.loss_at(u)?;
            Ok((exact_ball_operator(loss.ball().clone()), Some(loss)))
        }
        ConstraintVariant::Identity => Ok((identity(), None)),
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: SolverState,
    pub steps_completed: usize,
    pub log: DiagnosticsLog,
}

/// Drives `num_steps` sample steps, stopping early if `data` runs dry.
pub fn run(
    mut state: SolverState,
    data: impl IntoIterator<Item = Sample>,
    cfg: &RunConfig,
    num_steps: usize,
) -> Result<RunOutcome> {
    let mut steps_completed = 0;
    for sample in data.into_iter().take(num_steps) {
        state.step_sample(&sample, cfg)?;
        steps_completed += 1;
    }
    let log = state.take_diagnostics().unwrap_or_default();
    Ok(RunOutcome {
        state,
        steps_completed,
        log,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// `||u_A - u_B|| / max(1, ||u_A||)` after each step.
    pub discrepancies: Vec<f64>,
    pub max_discrepancy: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Compares the generic recursion (window loss + `T_Phi` operator) with the
/// fused extrapolated form. Every step both paths leave from the same iterate
/// and window, and the generic path carries the trajectory forward.
pub fn equivalence_check(
    initial: &SolverState,
    samples: &[Sample],
    xi: f64,
    reweighting: Reweighting,
    tol: f64,
) -> Result<EquivalenceReport> {
    equivalence_check_with_policies(
        initial,
        *initial.policy(),
        *initial.policy(),
        samples,
        xi,
        reweighting,
        tol,
    )
}

/// As [`equivalence_check`] with separate policies per path.
pub fn equivalence_check_with_policies(
    initial: &SolverState,
    generic_policy: StepPolicy,
    fused_policy: StepPolicy,
    samples: &[Sample],
    xi: f64,
    reweighting: Reweighting,
    tol: f64,
) -> Result<EquivalenceReport> {
    let mut generic = initial.clone();
    generic.set_policy(generic_policy)?;
    fused_policy.validate()?;

    let mut discrepancies = Vec::with_capacity(samples.len());
    for sample in samples {
        let slab = match Hyperslab::new(sample.a.clone(), sample.d, xi) {
            Ok(s) => s,
            Err(ApsmError::DegenerateHyperslab) => continue,
            Err(e) => return Err(e),
        };
        generic.push_slab(slab)?;
        // both paths leave from the same iterate and window
        let mut fused = generic.clone();
        fused.policy = fused_policy;

        let theta = generic.window_loss()?;
        let phi = reweighting.loss_at(generic.iterate())?;
        let t_phi = sparsity_projection_operator(phi.ball().clone(), generic.policy.nu)?;
        generic.apsm_step(&theta, t_phi.as_ref())?;

        let phi = reweighting.loss_at(fused.iterate())?;
        fused.fused_step(&phi)?;

        let scale = norm(generic.iterate()).max(1.0);
        discrepancies.push(dist(generic.iterate(), fused.iterate()) / scale);
    }
    let max_discrepancy = discrepancies.iter().copied().fold(0.0, f64::max);
    Ok(EquivalenceReport {
        passed: max_discrepancy <= tol,
        discrepancies,
        max_discrepancy,
        tol,
    })
}
