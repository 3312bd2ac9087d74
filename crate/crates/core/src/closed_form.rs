//! Closed-form solutions.
//!
//! The SIS infective equation `i' = r (k - i) i - alpha i` is a logistic
//! (Bernoulli) equation; the substitution `y = 1/i` makes it linear and
//! gives, with `beta = r k - alpha`,
//!
//! ```text
//! i(t) = beta / (r + beta C exp(-beta t)),   C = (beta - i0 r) / (beta i0)
//! ```
//!
//! which is exact.
//!
//! For SIR the sum `s + i` solves a linear equation, `s + i = 1 + C exp(-mu t)`
//! with `C = s0 + i0 - 1`. Substituting into the infective equation and
//! using `z = 1/i` leaves an integrating factor containing
//! `exp(-(beta C / mu) exp(-mu t))`. Replacing the inner `exp(-mu t)` by
//! `1 - mu t` yields the *linearized closed form*
//!
//! ```text
//! i(t) = lambda / (beta + lambda D exp(-lambda t) exp(beta C / mu)),
//! s(t) = 1 + C (1 - mu t) - i(t),              lambda = beta - mu + beta C
//! ```
//!
//! which is exact only when `C = 0`. The `exp(+-beta C / mu)` factors cancel
//! algebraically and are never formed here: `lambda D exp(beta C / mu)` is
//! `(lambda - i0 beta) / i0`. Both infective formulas are evaluated
//! multiplied through by `i0`, with `1 - exp(-x)` taken from `expm1`, which
//! keeps them well conditioned near the degenerate rates.

use crate::error::{Error, Result};
use crate::model::{sir_composites, Parameters, SirParameters, SisParameters, State};
use crate::trajectory::{Provenance, TimeGrid, Trajectory};

/// Upper slack on the SIR fractions before a state is flagged non-physical.
pub const FRACTION_SLACK: f64 = 1e-9;

/// What to do when the closed form's rate (`r k - alpha` or `lambda`) is
/// numerically zero and the formula degenerates to `0/0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegeneratePolicy {
    /// Report `BetaZero` / `LambdaZero`.
    #[default]
    Reject,
    /// Use the zero-rate limit `i0 / (1 + b i0 t)`, the solution of
    /// `i' = -b i^2`.
    AnalyticLimit,
}

fn zero_rate_limit(i0: f64, quadratic: f64, t: f64) -> f64 {
    i0 / (1.0 + quadratic * i0 * t)
}

/// `i0 rate / (i0 b (1 - e^{-rate t}) + rate e^{-rate t})`, the logistic
/// solution of `i' = rate i - b i^2` through `i(0) = i0`.
fn logistic(i0: f64, rate: f64, quadratic: f64, t: f64) -> f64 {
    let decay = (-rate * t).exp();
    let grown = -(-rate * t).exp_m1();
    i0 * rate / (i0 * quadratic * grown + rate * decay)
}

/// Exact SIS state at time `t`. Falls back to the zero-rate limit when
/// `r k - alpha` is numerically zero.
pub fn sis_state(p: &SisParameters, t: f64) -> State {
    let i = if p.is_beta_zero() {
        zero_rate_limit(p.i0, p.r, t)
    } else {
        logistic(p.i0, p.growth_rate(), p.r, t)
    };
    State::new(p.k - i, i)
}

pub fn sis_infective_exact(p: &SisParameters, t: f64) -> f64 {
    sis_state(p, t).i
}

pub fn sis_susceptible_exact(p: &SisParameters, t: f64) -> f64 {
    sis_state(p, t).s
}

/// Linearized SIR state at time `t`.
pub fn sir_state(p: &SirParameters, t: f64, policy: DegeneratePolicy) -> Result<State> {
    let i = if p.is_lambda_zero() {
        match policy {
            DegeneratePolicy::Reject => return Err(Error::LambdaZero { lambda: p.lambda() }),
            DegeneratePolicy::AnalyticLimit => zero_rate_limit(p.i0, p.beta, t),
        }
    } else {
        logistic(p.i0, p.lambda(), p.beta, t)
    };
    let s = 1.0 + p.sum_constant() * (1.0 - p.mu * t) - i;
    Ok(State::new(s, i))
}

pub fn sir_infective_closed(p: &SirParameters, t: f64, policy: DegeneratePolicy) -> Result<f64> {
    sir_state(p, t, policy).map(|x| x.i)
}

/// Never clamped: the value may leave `[0, 1]` once `1 - mu t` has drifted
/// away from `exp(-mu t)`.
pub fn sir_susceptible_closed(p: &SirParameters, t: f64, policy: DegeneratePolicy) -> Result<f64> {
    sir_state(p, t, policy).map(|x| x.s)
}

/// The SIR infective formula exactly as first derived, with the integration
/// constant `D` and both `exp(+-beta C / mu)` factors formed explicitly.
/// Only usable while those factors are representable.
pub fn sir_infective_uncancelled(p: &SirParameters, t: f64) -> Result<f64> {
    let comp = sir_composites(p)?;
    let d = comp.d_raw.ok_or_else(|| {
        Error::Precondition(format!(
            "exp(beta C / mu) with beta C / mu = {:e} is not representable",
            p.beta * comp.c / p.mu
        ))
    })?;
    let lambda = comp.lambda;
    let growth = (p.beta * comp.c / p.mu).exp();
    Ok(lambda / (p.beta + lambda * d * (-lambda * t).exp() * growth))
}

/// Closed-form state of either model.
pub fn closed_state(params: &Parameters, t: f64, policy: DegeneratePolicy) -> Result<State> {
    match params {
        Parameters::Sis(p) => {
            if policy == DegeneratePolicy::Reject && p.is_beta_zero() {
                return Err(Error::BetaZero {
                    beta: p.growth_rate(),
                });
            }
            Ok(sis_state(p, t))
        }
        Parameters::Sir(p) => sir_state(p, t, policy),
    }
}

/// Whether a state lies outside what the model can physically produce.
///
/// SIS: either level negative or `i > k`. SIR: either fraction negative or
/// above one (with [`FRACTION_SLACK`]), or `t` beyond `1/mu` while `C != 0`,
/// where the stand-in `1 - mu t` for the positive `exp(-mu t)` has turned
/// negative.
pub fn is_nonphysical(params: &Parameters, t: f64, x: State) -> bool {
    match params {
        Parameters::Sis(p) => x.s < 0.0 || x.i < 0.0 || x.i > p.k,
        Parameters::Sir(p) => {
            let past_linear_range = p.sum_constant() != 0.0 && 1.0 - p.mu * t < 0.0;
            x.s < 0.0
                || x.i < 0.0
                || x.s > 1.0 + FRACTION_SLACK
                || x.i > 1.0 + FRACTION_SLACK
                || past_linear_range
        }
    }
}

/// Samples the closed form on `grid`. Each point is bitwise identical to
/// the corresponding scalar evaluation.
pub fn evaluate_closed_trajectory(
    params: &Parameters,
    grid: &TimeGrid,
    policy: DegeneratePolicy,
) -> Result<Trajectory> {
    let states = grid
        .points()
        .enumerate()
        .map(|(index, t)| {
            closed_state(params, t, policy).map_err(|e| Error::AtGridPoint {
                index,
                t,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory::new(
        *grid,
        states,
        Provenance::ClosedForm,
        params.kind(),
    ))
}
