//! Fixed-step classical Runge-Kutta reference solver.
//!
//! This is the ground truth every closed form is measured against, so it
//! shares no code with [`crate::closed_form`]: it only sees the model
//! right-hand sides.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Parameters, State};
use crate::trajectory::{Provenance, TimeGrid, Trajectory};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Largest step taken; intervals between grid points are split evenly.
    pub dt: f64,
    /// Re-run with `dt / 2` and require agreement within `tolerance`.
    pub halving_check: bool,
    pub tolerance: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            halving_check: true,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::validation("dt", "must be finite and > 0"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::validation("tolerance", "must be > 0"));
        }
        Ok(())
    }
}

fn finite_or(x: State, t: f64) -> Result<State> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite { t })
    }
}

/// One classical fourth-order Runge-Kutta step of size `dt` from `(t, x)`.
pub fn rk4_step<F>(rhs: F, x: State, t: f64, dt: f64) -> Result<State>
where
    F: Fn(f64, State) -> State,
{
    let half = 0.5 * dt;
    let k1 = finite_or(rhs(t, x), t)?;
    let k2 = finite_or(rhs(t + half, x + k1 * half), t)?;
    let k3 = finite_or(rhs(t + half, x + k2 * half), t)?;
    let k4 = finite_or(rhs(t + dt, x + k3 * dt), t)?;
    let next = x + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
    finite_or(next, t + dt)
}

/// Integrates from `(t_from, x)` to exactly `t_to` in equal steps no larger
/// than `dt`.
pub fn advance(params: &Parameters, x: State, t_from: f64, t_to: f64, dt: f64) -> Result<State> {
    let span = t_to - t_from;
    if span <= 0.0 {
        return Ok(x);
    }
    // Spans that are an exact multiple of dt up to rounding keep that count.
    let steps = (span / dt * (1.0 - 1e-12)).ceil().max(1.0);
    let h = span / steps;
    let rhs = |_t: f64, y: State| params.rhs(y);
    let mut y = x;
    for j in 0..steps as u64 {
        y = rk4_step(rhs, y, t_from + j as f64 * h, h)?;
    }
    Ok(y)
}

fn march(params: &Parameters, grid: &TimeGrid, dt: f64) -> Result<Vec<State>> {
    let mut states = Vec::with_capacity(grid.len());
    let mut x = params.initial_state();
    let mut t = 0.0;
    for target in grid.points() {
        x = advance(params, x, t, target, dt)?;
        t = target;
        states.push(x);
    }
    Ok(states)
}

/// Reference trajectory on `grid`, starting from the initial conditions at
/// `t = 0`. With `halving_check` on, a second pass at `dt / 2` must agree
/// with the first at every grid point.
pub fn integrate(
    params: &Parameters,
    grid: &TimeGrid,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    grid.validate()?;
    let states = march(params, grid, cfg.dt)?;
    if cfg.halving_check {
        let fine = march(params, grid, 0.5 * cfg.dt)?;
        let (worst, discrepancy) = states
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a.s - b.s).abs().max((a.i - b.i).abs()))
            .enumerate()
            .fold(
                (0, 0.0),
                |best, (k, d)| if d > best.1 { (k, d) } else { best },
            );
        if discrepancy > cfg.tolerance {
            return Err(Error::StepSizeInsufficient {
                t: grid.point(worst),
                discrepancy,
                tolerance: cfg.tolerance,
            });
        }
    }
    Ok(Trajectory::new(
        *grid,
        states,
        Provenance::Reference,
        params.kind(),
    ))
}
