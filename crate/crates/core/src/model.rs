//! Model definitions for the SIS and SIR (with demography) systems.
//!
//! SIS:
//! ```text
//! s' = -r s i + alpha i
//! i' =  r s i - alpha i          s + i = k for all t
//! ```
//!
//! SIR with inflow/outflow rate `mu`, total population normalized to one:
//! ```text
//! s' = -beta s i - mu s + mu
//! i' =  beta s i - mu i          (s + i)' = -mu (s + i) + mu
//! ```

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold below which `r k - alpha` or `lambda` count as zero.
pub const DEGENERACY_RTOL: f64 = 1e-12;

/// Largest `|beta C / mu|` for which `exp(beta C / mu)` and its reciprocal
/// are both comfortably representable in `f64`.
pub const SAFE_EXPONENT: f64 = 700.0;

/// Slack used when deciding whether `s0 + i0` exceeds one.
pub const UNIT_TOTAL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Sis,
    Sir,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Sis => "sis",
            ModelKind::Sir => "sir",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Susceptible and infective levels at one instant. Also used for
/// time derivatives of the same pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub s: f64,
    pub i: f64,
}

impl State {
    pub const fn new(s: f64, i: f64) -> Self {
        Self { s, i }
    }

    pub fn is_finite(&self) -> bool {
        self.s.is_finite() && self.i.is_finite()
    }

    pub fn total(&self) -> f64 {
        self.s + self.i
    }
}

impl Add for State {
    type Output = State;
    fn add(self, rhs: State) -> State {
        State::new(self.s + rhs.s, self.i + rhs.i)
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, rhs: State) -> State {
        State::new(self.s - rhs.s, self.i - rhs.i)
    }
}

impl Mul<f64> for State {
    type Output = State;
    fn mul(self, rhs: f64) -> State {
        State::new(self.s * rhs, self.i * rhs)
    }
}

fn require_finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, "must be finite"))
    }
}

/// SIS constants and initial infectives. The initial susceptible level is
/// always `k - i0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SisParameters {
    /// Infectivity coefficient.
    pub r: f64,
    /// Recovery coefficient.
    pub alpha: f64,
    /// Total population.
    pub k: f64,
    /// Initial infectives.
    pub i0: f64,
}

impl SisParameters {
    pub fn new(r: f64, alpha: f64, k: f64, i0: f64) -> Result<Self> {
        let p = Self { r, alpha, k, i0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("r", self.r)?;
        require_finite("alpha", self.alpha)?;
        require_finite("k", self.k)?;
        require_finite("i0", self.i0)?;
        if self.r <= 0.0 {
            return Err(Error::validation("r", "must satisfy r > 0"));
        }
        if self.alpha < 0.0 {
            return Err(Error::validation("alpha", "must satisfy alpha >= 0"));
        }
        if self.k <= 0.0 {
            return Err(Error::validation("k", "must satisfy k > 0"));
        }
        if self.i0 <= 0.0 || self.i0 >= self.k {
            return Err(Error::validation("i0", "must satisfy 0 < i0 < k"));
        }
        Ok(())
    }

    pub fn s0(&self) -> f64 {
        self.k - self.i0
    }

    pub fn initial_state(&self) -> State {
        State::new(self.s0(), self.i0)
    }

    /// `r k - alpha`, the net growth rate of infectives near zero.
    pub fn growth_rate(&self) -> f64 {
        self.r * self.k - self.alpha
    }

    pub fn is_beta_zero(&self) -> bool {
        let rk = self.r * self.k;
        self.growth_rate().abs() <= DEGENERACY_RTOL * rk.max(self.alpha)
    }
}

/// SIR constants and initial fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirParameters {
    /// Infectivity coefficient.
    pub beta: f64,
    /// Recovery coefficient; also the inflow and outflow rate.
    pub mu: f64,
    pub s0: f64,
    pub i0: f64,
}

impl SirParameters {
    pub fn new(beta: f64, mu: f64, s0: f64, i0: f64) -> Result<Self> {
        let p = Self { beta, mu, s0, i0 };
        p.validate()?;
        Ok(p)
    }

    /// Rejects non-positive or non-finite inputs. `s0 + i0 > 1` is allowed;
    /// see [`SirParameters::exceeds_unit_total`].
    pub fn validate(&self) -> Result<()> {
        require_finite("beta", self.beta)?;
        require_finite("mu", self.mu)?;
        require_finite("s0", self.s0)?;
        require_finite("i0", self.i0)?;
        if self.beta <= 0.0 {
            return Err(Error::validation("beta", "must satisfy beta > 0"));
        }
        if self.mu <= 0.0 {
            return Err(Error::validation("mu", "must satisfy mu > 0"));
        }
        if self.s0 <= 0.0 {
            return Err(Error::validation("s0", "must satisfy s0 > 0"));
        }
        if self.i0 <= 0.0 {
            return Err(Error::validation("i0", "must satisfy i0 > 0"));
        }
        Ok(())
    }

    /// Warning flag: the initial fractions sum to more than one.
    pub fn exceeds_unit_total(&self) -> bool {
        self.s0 + self.i0 > 1.0 + UNIT_TOTAL_SLACK
    }

    pub fn initial_state(&self) -> State {
        State::new(self.s0, self.i0)
    }

    /// Integration constant of the sum equation, `s0 + i0 - 1`.
    pub fn sum_constant(&self) -> f64 {
        self.s0 + self.i0 - 1.0
    }

    /// `beta (s0 + i0) - mu`.
    pub fn lambda(&self) -> f64 {
        self.beta * (self.s0 + self.i0) - self.mu
    }

    pub fn is_lambda_zero(&self) -> bool {
        self.lambda().abs() <= DEGENERACY_RTOL * self.beta.max(self.mu)
    }
}

/// Parameters of either model; the variant fixes the [`ModelKind`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Parameters {
    Sis(SisParameters),
    Sir(SirParameters),
}

impl Parameters {
    pub fn kind(&self) -> ModelKind {
        match self {
            Parameters::Sis(_) => ModelKind::Sis,
            Parameters::Sir(_) => ModelKind::Sir,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Parameters::Sis(p) => p.validate(),
            Parameters::Sir(p) => p.validate(),
        }
    }

    pub fn initial_state(&self) -> State {
        match self {
            Parameters::Sis(p) => p.initial_state(),
            Parameters::Sir(p) => p.initial_state(),
        }
    }

    pub fn rhs(&self, x: State) -> State {
        match self {
            Parameters::Sis(p) => sis_rhs(p, x),
            Parameters::Sir(p) => sir_rhs(p, x),
        }
    }
}

impl From<SisParameters> for Parameters {
    fn from(p: SisParameters) -> Self {
        Parameters::Sis(p)
    }
}

impl From<SirParameters> for Parameters {
    fn from(p: SirParameters) -> Self {
        Parameters::Sir(p)
    }
}

/// SIS right-hand side. The two components are exact negatives of each
/// other, so the total `s + i` is conserved.
pub fn sis_rhs(p: &SisParameters, x: State) -> State {
    let flow = p.r * x.s * x.i - p.alpha * x.i;
    State::new(-flow, flow)
}

pub fn sir_rhs(p: &SirParameters, x: State) -> State {
    let contact = p.beta * x.s * x.i;
    State::new(-contact - p.mu * x.s + p.mu, contact - p.mu * x.i)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SisComposites {
    /// `r k - alpha`.
    pub beta_sis: f64,
    /// Integration constant fixed by `i(0) = i0`.
    pub c_sis: f64,
    /// `r k / alpha`; `None` when `alpha = 0`.
    pub r0: Option<f64>,
    /// Endemic level `k - alpha / r`.
    pub i_star: f64,
}

pub fn sis_composites(p: &SisParameters) -> Result<SisComposites> {
    let beta = p.growth_rate();
    if p.is_beta_zero() {
        return Err(Error::BetaZero { beta });
    }
    Ok(SisComposites {
        beta_sis: beta,
        c_sis: (beta - p.i0 * p.r) / (beta * p.i0),
        r0: (p.alpha != 0.0).then(|| p.r * p.k / p.alpha),
        i_star: beta / p.r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SirComposites {
    /// Sum-equation constant `s0 + i0 - 1`.
    pub c: f64,
    /// Logistic rate `beta - mu + beta c`.
    pub lambda: f64,
    /// Integration constant `(lambda - i0 beta) / (lambda i0 exp(beta c / mu))`;
    /// `None` when the exponential is not representable.
    pub d_raw: Option<f64>,
    /// `(lambda - i0 beta) / i0`, which equals `lambda * d_raw * exp(beta c / mu)`.
    pub d_cancelled: f64,
    /// Long-time limit of the linearized closed form, `lambda / beta`.
    pub i_inf_closed: f64,
    /// Endemic equilibrium of the true system, `(beta - mu) / beta`.
    pub i_star_true: f64,
    pub s_star_true: f64,
    /// `|beta c / mu|` exceeds [`SAFE_EXPONENT`].
    pub overflow_risk: bool,
}

pub fn sir_composites(p: &SirParameters) -> Result<SirComposites> {
    let lambda = p.lambda();
    if p.is_lambda_zero() {
        return Err(Error::LambdaZero { lambda });
    }
    let c = p.sum_constant();
    let exponent = p.beta * c / p.mu;
    let overflow_risk = !(exponent.abs() <= SAFE_EXPONENT);
    let numerator = lambda - p.i0 * p.beta;
    let d_raw = (!overflow_risk).then(|| numerator / (lambda * p.i0 * exponent.exp()));
    Ok(SirComposites {
        c,
        lambda,
        d_raw,
        d_cancelled: numerator / p.i0,
        i_inf_closed: lambda / p.beta,
        i_star_true: (p.beta - p.mu) / p.beta,
        s_star_true: p.mu / p.beta,
        overflow_risk,
    })
}
