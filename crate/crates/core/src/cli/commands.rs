//! Command bodies. Each returns the full output document as a string so the
//! binary only has to route it to a file or stdout.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::scenario::{scenario_value, ScenarioConfig};
use crate::analysis::{asymptotic_bias, closed_vs_reference, compare, refine_horizon};
use crate::closed_form::{evaluate_closed_trajectory, is_nonphysical, DegeneratePolicy};
use crate::error::{Error, Result};
use crate::integrator::integrate;
use crate::model::{sir_composites, sis_composites, Parameters, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Mode {
    Closed,
    Reference,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub field: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub scale: Scale,
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    let magnitude = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&magnitude) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn csv_document<F>(header: &[&str], rows: usize, mut row: F) -> Result<String>
where
    F: FnMut(usize) -> Vec<String>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for k in 0..rows {
        w.write_record(row(k)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Rejects degenerate rates up front unless the analytic limit was requested.
pub fn check_degenerate(params: &Parameters, policy: DegeneratePolicy) -> Result<()> {
    if policy == DegeneratePolicy::AnalyticLimit {
        return Ok(());
    }
    match params {
        Parameters::Sis(p) => sis_composites(p).map(|_| ()),
        Parameters::Sir(p) => sir_composites(p).map(|_| ()),
    }
}

fn out_of_range(params: &Parameters, x: &State) -> bool {
    // `t = 0` never trips the linearization check.
    is_nonphysical(params, 0.0, *x)
}

pub fn simulate(cfg: &ScenarioConfig, mode: Mode, policy: DegeneratePolicy) -> Result<String> {
    let params = &cfg.parameters;
    let grid = &cfg.grid;
    let times: Vec<f64> = grid.points().collect();
    match mode {
        Mode::Closed => {
            check_degenerate(params, policy)?;
            let closed = evaluate_closed_trajectory(params, grid, policy)?;
            csv_document(
                &["t", "s_closed", "i_closed", "nonphysical"],
                times.len(),
                |k| {
                    let (t, x) = (times[k], closed.states[k]);
                    vec![
                        format_number(t),
                        format_number(x.s),
                        format_number(x.i),
                        is_nonphysical(params, t, x).to_string(),
                    ]
                },
            )
        }
        Mode::Reference => {
            let reference = integrate(params, grid, &cfg.integrator)?;
            csv_document(&["t", "s_ref", "i_ref", "nonphysical"], times.len(), |k| {
                let x = reference.states[k];
                vec![
                    format_number(times[k]),
                    format_number(x.s),
                    format_number(x.i),
                    out_of_range(params, &x).to_string(),
                ]
            })
        }
        Mode::Both => {
            check_degenerate(params, policy)?;
            let closed = evaluate_closed_trajectory(params, grid, policy)?;
            let reference = integrate(params, grid, &cfg.integrator)?;
            csv_document(
                &[
                    "t",
                    "s_closed",
                    "i_closed",
                    "s_ref",
                    "i_ref",
                    "abs_err_s",
                    "abs_err_i",
                    "nonphysical",
                ],
                times.len(),
                |k| {
                    let (t, x, y) = (times[k], closed.states[k], reference.states[k]);
                    let flagged = is_nonphysical(params, t, x) || out_of_range(params, &y);
                    vec![
                        format_number(t),
                        format_number(x.s),
                        format_number(x.i),
                        format_number(y.s),
                        format_number(y.i),
                        format_number((x.s - y.s).abs()),
                        format_number((x.i - y.i).abs()),
                        flagged.to_string(),
                    ]
                },
            )
        }
    }
}

/// Derived constants of the active model, or `null` when they do not exist.
fn composites_value(params: &Parameters) -> Value {
    let value = match params {
        Parameters::Sis(p) => sis_composites(p).map(serde_json::to_value),
        Parameters::Sir(p) => sir_composites(p).map(serde_json::to_value),
    };
    match value {
        Ok(Ok(v)) => v,
        _ => Value::Null,
    }
}

#[derive(Serialize)]
struct Report {
    max_abs_s: f64,
    max_abs_i: f64,
    max_rel_i: f64,
    l2_i: f64,
    argmax_t: f64,
    horizon: Option<f64>,
    composites: Value,
    parameters: Value,
}

/// Closed form vs reference report, with the scenario (integrator settings
/// and threshold included) echoed under `parameters`.
pub fn compare_report(cfg: &ScenarioConfig, policy: DegeneratePolicy) -> Result<String> {
    check_degenerate(&cfg.parameters, policy)?;
    let closed = evaluate_closed_trajectory(&cfg.parameters, &cfg.grid, policy)?;
    let reference = integrate(&cfg.parameters, &cfg.grid, &cfg.integrator)?;
    let r = compare(&closed, &reference, cfg.eps)?;
    let report = Report {
        max_abs_s: r.max_abs_s,
        max_abs_i: r.max_abs_i,
        max_rel_i: r.max_rel_i,
        l2_i: r.l2_i,
        argmax_t: r.argmax_t,
        horizon: r.horizon,
        composites: composites_value(&cfg.parameters),
        parameters: scenario_value(cfg),
    };
    Ok(serde_json::to_string_pretty(&report).expect("report serializes") + "\n")
}

#[derive(Serialize)]
struct HorizonReport {
    eps: f64,
    t_start: f64,
    t_end: f64,
    horizon: Option<f64>,
}

/// Bisection-refined validity horizon over the scenario grid.
pub fn horizon_report(cfg: &ScenarioConfig, policy: DegeneratePolicy) -> Result<String> {
    check_degenerate(&cfg.parameters, policy)?;
    let (closed, reference, _) =
        closed_vs_reference(&cfg.parameters, &cfg.grid, &cfg.integrator, cfg.eps, policy)?;
    let horizon = refine_horizon(
        &cfg.parameters,
        cfg.eps,
        &closed,
        &reference,
        &cfg.integrator,
        policy,
    )?;
    let report = HorizonReport {
        eps: cfg.eps,
        t_start: cfg.grid.t_start,
        t_end: cfg.grid.t_end,
        horizon,
    };
    Ok(serde_json::to_string_pretty(&report).expect("report serializes") + "\n")
}

/// Copy of `params` with one scalar field replaced.
pub fn with_field(params: &Parameters, field: &str, value: f64) -> Result<Parameters> {
    let mut out = *params;
    let slot = match &mut out {
        Parameters::Sis(p) => match field {
            "r" => &mut p.r,
            "alpha" => &mut p.alpha,
            "k" => &mut p.k,
            "i0" => &mut p.i0,
            _ => return Err(Error::UnknownField(field.to_owned())),
        },
        Parameters::Sir(p) => match field {
            "beta" => &mut p.beta,
            "mu" => &mut p.mu,
            "s0" => &mut p.s0,
            "i0" => &mut p.i0,
            _ => return Err(Error::UnknownField(field.to_owned())),
        },
    };
    *slot = value;
    out.validate()?;
    Ok(out)
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::validation("steps", "must be >= 2"));
        }
        if !self.from.is_finite() || !self.to.is_finite() {
            return Err(Error::validation("from/to", "must be finite"));
        }
        if self.scale == Scale::Log && !(self.from > 0.0 && self.to > 0.0) {
            return Err(Error::validation(
                "from/to",
                "log scale needs positive bounds",
            ));
        }
        Ok(())
    }

    /// Sweep values in sweep order; both endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k == 0 {
                    return self.from;
                }
                if k + 1 == self.steps {
                    return self.to;
                }
                let frac = k as f64 / last;
                match self.scale {
                    Scale::Linear => self.from + (self.to - self.from) * frac,
                    Scale::Log => {
                        let (a, b) = (self.from.ln(), self.to.ln());
                        (a + (b - a) * frac).exp()
                    }
                }
            })
            .collect()
    }
}

struct SweepRow {
    value: f64,
    max_abs_i: f64,
    horizon: Option<f64>,
    bias: Option<f64>,
}

fn sweep_row(
    cfg: &ScenarioConfig,
    field: &str,
    value: f64,
    policy: DegeneratePolicy,
) -> Result<SweepRow> {
    let params = with_field(&cfg.parameters, field, value)?;
    check_degenerate(&params, policy)?;
    let (closed, reference, report) =
        closed_vs_reference(&params, &cfg.grid, &cfg.integrator, cfg.eps, policy)?;
    let horizon = refine_horizon(
        &params,
        cfg.eps,
        &closed,
        &reference,
        &cfg.integrator,
        policy,
    )?;
    let bias = match params {
        Parameters::Sir(p) => asymptotic_bias(&p).ok(),
        Parameters::Sis(_) => None,
    };
    Ok(SweepRow {
        value,
        max_abs_i: report.max_abs_i,
        horizon,
        bias,
    })
}

/// One row per sweep value, in sweep order. Values are evaluated in
/// parallel; the first failing value (by sweep index) is reported.
pub fn sweep(cfg: &ScenarioConfig, spec: &SweepSpec, policy: DegeneratePolicy) -> Result<String> {
    spec.validate()?;
    // Surface a bad field name before doing any work.
    with_field(&cfg.parameters, &spec.field, spec.from)?;
    let rows: Vec<SweepRow> = spec
        .values()
        .into_par_iter()
        .map(|v| sweep_row(cfg, &spec.field, v, policy))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_>>()?;

    let is_sir = matches!(cfg.parameters, Parameters::Sir(_));
    let mut header = vec!["value", "max_abs_i", "horizon"];
    if is_sir {
        header.push("asymptotic_bias");
    }
    let optional = |x: Option<f64>| x.map(format_number).unwrap_or_default();
    csv_document(&header, rows.len(), |k| {
        let row = &rows[k];
        let mut fields = vec![
            format_number(row.value),
            format_number(row.max_abs_i),
            optional(row.horizon),
        ];
        if is_sir {
            fields.push(optional(row.bias));
        }
        fields
    })
}
