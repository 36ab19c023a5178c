//! Forward–backward (IMEX) Euler time loop with travelling-pulse detection.
//!
//! The reaction is strictly explicit and every linear term strictly
//! implicit, so each step is one saddle solve with the load
//! `g = G(wⁿ) + wⁿ/τ`. A run is "steady" (a travelling pulse in the
//! reference frame) once `‖(wⁿ⁺¹ − wⁿ)/τ‖_{0,Ω}` falls below the
//! configured tolerance. Non-convergence within the step cap is a reported
//! status, not an error: transient studies stop at a time horizon instead.

use crate::assembly::SparseMatrix;
use crate::error::{Error, Result};
use crate::fespace::FieldVector;
use crate::problem::{Discretization, Operator};

#[derive(Debug, Clone, Copy)]
pub struct StepperConfig {
    pub tau: f64,
    /// Threshold on the steady metric.
    pub tol_steady: f64,
    pub max_steps: usize,
    /// Start time (nonzero for restarted transients).
    pub t0: f64,
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tau <= 0.0 {
            return Err(Error::Config(format!("tau = {} must be positive", self.tau)));
        }
        if self.tol_steady <= 0.0 {
            return Err(Error::Config(format!(
                "tol_steady = {} must be positive",
                self.tol_steady
            )));
        }
        Ok(())
    }
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            tau: 0.1,
            tol_steady: 1e-5,
            max_steps: 100_000,
            t0: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub w: FieldVector,
    pub lambda: FieldVector,
    pub t: f64,
    pub step_index: usize,
    /// Last computed `‖Δw/τ‖_{0,Ω}`.
    pub steady_metric: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    NotConverged,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub state: SimState,
    /// Steady metric after every step.
    pub history: Vec<f64>,
    pub status: RunStatus,
}

/// `‖(w_new − w_old)/τ‖_{0,Ω}` via the mass matrix: `√(δᵀMδ)/τ`.
pub fn steady_metric(w_new: &FieldVector, w_old: &FieldVector, tau: f64, mass: &SparseMatrix) -> f64 {
    let delta: Vec<f64> = w_new
        .values
        .iter()
        .zip(&w_old.values)
        .map(|(a, b)| a - b)
        .collect();
    let md = mass.matvec(&delta);
    let quad: f64 = delta.iter().zip(&md).map(|(a, b)| a * b).sum();
    quad.max(0.0).sqrt() / tau
}

/// Advances one IMEX step; `op` must hold the operator at the step's end
/// time.
pub fn step(
    disc: &Discretization,
    op: &mut Operator,
    state: &SimState,
    mass: &SparseMatrix,
) -> Result<SimState> {
    let rhs = disc.load(&state.w, op.tau)?;
    let (w, lambda) = op.solve(rhs).map_err(|e| match e {
        Error::Eval(msg) => Error::Divergence {
            step: state.step_index + 1,
            msg,
        },
        other => other,
    })?;
    let metric = steady_metric(&w, &state.w, op.tau, mass);
    if !metric.is_finite() {
        return Err(Error::Divergence {
            step: state.step_index + 1,
            msg: format!("steady metric became {metric}"),
        });
    }
    Ok(SimState {
        w,
        lambda,
        t: state.t + op.tau,
        step_index: state.step_index + 1,
        steady_metric: metric,
    })
}

fn run(
    disc: &Discretization,
    w0: FieldVector,
    config: &StepperConfig,
    t_final: Option<f64>,
    mut snapshot: impl FnMut(&SimState),
) -> Result<RunResult> {
    config.validate()?;
    let mass = disc.mass_matrix()?;
    let time_varying = disc.ale.is_time_varying();
    let mut op = disc.operator(config.t0 + config.tau, config.tau)?;
    let mut state = SimState {
        w: w0,
        lambda: FieldVector::zeros(disc.mult.n_dofs),
        t: config.t0,
        step_index: 0,
        steady_metric: f64::INFINITY,
    };
    snapshot(&state);
    let mut history = Vec::new();
    let mut status = RunStatus::NotConverged;
    while state.step_index < config.max_steps {
        if let Some(tf) = t_final {
            if state.t + config.tau > tf + 1e-12 * config.tau {
                break;
            }
        }
        if time_varying && state.step_index > 0 {
            op = disc.operator(state.t + config.tau, config.tau)?;
        }
        state = step(disc, &mut op, &state, &mass)?;
        history.push(state.steady_metric);
        snapshot(&state);
        if state.steady_metric < config.tol_steady {
            status = RunStatus::Converged;
            break;
        }
    }
    Ok(RunResult {
        state,
        history,
        status,
    })
}

/// Steps until the steady metric drops below tolerance (or the step cap is
/// hit, flagged `NotConverged`). The snapshot hook sees the initial state
/// and every step.
pub fn run_to_steady(
    disc: &Discretization,
    w0: FieldVector,
    config: &StepperConfig,
    snapshot: impl FnMut(&SimState),
) -> Result<RunResult> {
    run(disc, w0, config, None, snapshot)
}

/// Transient run up to `t_final` (steps that would overshoot are not
/// taken); also stops early if the solution happens to reach steady state.
pub fn run_until(
    disc: &Discretization,
    w0: FieldVector,
    config: &StepperConfig,
    t_final: f64,
    snapshot: impl FnMut(&SimState),
) -> Result<RunResult> {
    run(disc, w0, config, Some(t_final), snapshot)
}
