//! Agreement between closed-form and reference trajectories, and the error
//! introduced by replacing `exp(-mu t)` with `1 - mu t` in the SIR solution.

use serde::Serialize;

use crate::closed_form::{closed_state, evaluate_closed_trajectory, DegeneratePolicy};
use crate::error::{Error, Result};
use crate::integrator::{advance, integrate, IntegratorConfig};
use crate::model::{sir_composites, Parameters, SirParameters, State};
use crate::trajectory::{Provenance, TimeGrid, Trajectory};

/// `|i_ref|` at or below this is excluded from the relative error.
pub const REL_FLOOR: f64 = 1e-12;

/// Grid resolution used by [`validity_horizon`] before bisection.
pub const HORIZON_GRID_POINTS: usize = 1001;

/// Bisection stops once the bracket is this fraction of the horizon window.
pub const HORIZON_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    pub max_abs_s: f64,
    pub max_abs_i: f64,
    pub max_rel_i: f64,
    /// Root-mean-square discrepancy on `i` over the grid.
    pub l2_i: f64,
    /// Earliest grid time attaining `max_abs_i`.
    pub argmax_t: f64,
    /// Earliest grid time where the `i` discrepancy exceeds the threshold.
    pub horizon: Option<f64>,
}

/// Pointwise discrepancies between two trajectories on the same grid.
///
/// The relative error divides by the reference trajectory's `i` when exactly
/// one side is a reference solution, and by the larger magnitude otherwise,
/// so the report does not depend on argument order.
pub fn compare(a: &Trajectory, b: &Trajectory, eps: f64) -> Result<ErrorReport> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch(format!(
            "grids differ: {:?} vs {:?}",
            a.grid, b.grid
        )));
    }
    if a.model != b.model {
        return Err(Error::GridMismatch(format!(
            "models differ: {} vs {}",
            a.model, b.model
        )));
    }
    if let Some(k) = a.diverged.into_iter().chain(b.diverged).min() {
        return Err(Error::NonFinite { t: a.grid.point(k) });
    }

    let denominator = |x: &State, y: &State| match (a.provenance, b.provenance) {
        (Provenance::Reference, Provenance::ClosedForm) => x.i.abs(),
        (Provenance::ClosedForm, Provenance::Reference) => y.i.abs(),
        _ => x.i.abs().max(y.i.abs()),
    };

    let mut report = ErrorReport {
        max_abs_s: 0.0,
        max_abs_i: 0.0,
        max_rel_i: 0.0,
        l2_i: 0.0,
        argmax_t: a.grid.t_start,
        horizon: None,
    };
    let mut sum_sq = 0.0;
    for ((t, x), y) in a.iter().zip(&b.states) {
        let ds = (x.s - y.s).abs();
        let di = (x.i - y.i).abs();
        report.max_abs_s = report.max_abs_s.max(ds);
        if di > report.max_abs_i {
            report.max_abs_i = di;
            report.argmax_t = t;
        }
        let denom = denominator(&x, y);
        if denom > REL_FLOOR {
            report.max_rel_i = report.max_rel_i.max(di / denom);
        }
        if report.horizon.is_none() && di > eps {
            report.horizon = Some(t);
        }
        sum_sq += di * di;
    }
    report.l2_i = (sum_sq / a.len() as f64).sqrt();
    Ok(report)
}

/// Closed form and reference solution on `grid`, with their [`ErrorReport`].
pub fn closed_vs_reference(
    params: &Parameters,
    grid: &TimeGrid,
    cfg: &IntegratorConfig,
    eps: f64,
    policy: DegeneratePolicy,
) -> Result<(Trajectory, Trajectory, ErrorReport)> {
    let closed = evaluate_closed_trajectory(params, grid, policy)?;
    let reference = integrate(params, grid, cfg)?;
    let report = compare(&closed, &reference, eps)?;
    Ok((closed, reference, report))
}

/// Central-difference derivative of the closed form minus the model
/// right-hand side at the closed-form state. Zero (up to `O(h^2)`) wherever
/// the closed form actually solves the model.
pub fn ode_residual(
    params: &Parameters,
    t: f64,
    h: f64,
    policy: DegeneratePolicy,
) -> Result<State> {
    if !(h > 0.0 && t >= h) {
        return Err(Error::Precondition(format!(
            "residual needs t >= h > 0, got t = {t}, h = {h}"
        )));
    }
    let forward = closed_state(params, t + h, policy)?;
    let backward = closed_state(params, t - h, policy)?;
    let here = closed_state(params, t, policy)?;
    let derivative = (forward - backward) * (0.5 / h);
    Ok(derivative - params.rhs(here))
}

/// `(mu t)^2 / 2`, an upper bound on `|exp(-mu t) - (1 - mu t)|` for
/// `mu t >= 0` (alternating series remainder).
pub fn linearization_bound(mu: f64, t: f64) -> f64 {
    let x = mu * t;
    0.5 * x * x
}

/// `exp(-mu t) - (1 - mu t)`, evaluated without cancellation.
pub fn linearization_error(mu: f64, t: f64) -> f64 {
    let x = mu * t;
    (-x).exp_m1() + x
}

/// Earliest time in `[0, t_max]` at which the closed-form infective level
/// departs from the reference solution by more than `eps`, or `None`.
///
/// Scans a [`HORIZON_GRID_POINTS`] grid, then bisects the bracketing
/// interval down to `HORIZON_RTOL * t_max`.
pub fn validity_horizon(
    params: &Parameters,
    eps: f64,
    t_max: f64,
    cfg: &IntegratorConfig,
) -> Result<Option<f64>> {
    if !(t_max > 0.0) {
        return Err(Error::Precondition(format!(
            "t_max must be > 0, got {t_max}"
        )));
    }
    let grid = TimeGrid::new(0.0, t_max, HORIZON_GRID_POINTS)?;
    validity_horizon_on(params, eps, &grid, cfg, DegeneratePolicy::Reject)
}

/// [`validity_horizon`] on a caller-chosen scan grid. The bisection
/// tolerance is `HORIZON_RTOL * grid.t_end`.
///
/// Each bisection probe integrates afresh from the left end of the bracket
/// rather than interpolating the scan.
pub fn validity_horizon_on(
    params: &Parameters,
    eps: f64,
    grid: &TimeGrid,
    cfg: &IntegratorConfig,
    policy: DegeneratePolicy,
) -> Result<Option<f64>> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps must be > 0, got {eps}")));
    }
    let (closed, reference, _) = closed_vs_reference(params, grid, cfg, eps, policy)?;
    refine_horizon(params, eps, &closed, &reference, cfg, policy)
}

/// Horizon search over an already computed closed-form / reference pair
/// sharing one grid.
pub fn refine_horizon(
    params: &Parameters,
    eps: f64,
    closed: &Trajectory,
    reference: &Trajectory,
    cfg: &IntegratorConfig,
    policy: DegeneratePolicy,
) -> Result<Option<f64>> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps must be > 0, got {eps}")));
    }
    if closed.grid != reference.grid {
        return Err(Error::GridMismatch("horizon needs a shared grid".into()));
    }
    let grid = &closed.grid;
    let exceeds = |x: &State, y: &State| (x.i - y.i).abs() > eps;
    let Some(k) = closed
        .states
        .iter()
        .zip(&reference.states)
        .position(|(x, y)| exceeds(x, y))
    else {
        return Ok(None);
    };
    if k == 0 {
        return Ok(Some(grid.t_start));
    }

    let resolution = HORIZON_RTOL * grid.t_end;
    let mut lo = grid.point(k - 1);
    let mut hi = grid.point(k);
    let mut x_lo = reference.states[k - 1];
    while hi - lo > resolution {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let x_mid = advance(params, x_lo, lo, mid, cfg.dt)?;
        if exceeds(&closed_state(params, mid, policy)?, &x_mid) {
            hi = mid;
        } else {
            lo = mid;
            x_lo = x_mid;
        }
    }
    Ok(Some(hi))
}

/// Long-time error of the linearized SIR closed form,
/// `lambda / beta - (beta - mu) / beta`, which is exactly `C = s0 + i0 - 1`.
pub fn asymptotic_bias(p: &SirParameters) -> Result<f64> {
    let comp = sir_composites(p)?;
    if !(comp.lambda > 0.0) {
        return Err(Error::Precondition(format!(
            "closed-form asymptote needs lambda > 0, got {}",
            comp.lambda
        )));
    }
    if !(p.beta > p.mu) {
        return Err(Error::Precondition(format!(
            "endemic equilibrium needs beta > mu, got beta = {}, mu = {}",
            p.beta, p.mu
        )));
    }
    Ok(comp.c)
}
