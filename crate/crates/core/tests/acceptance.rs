//! Acceptance suite: every exit criterion at its pinned tolerance.
//!
//! Prints one `PASS`/`FAIL` line per criterion and fails if any criterion
//! does. Run with `cargo test -p epikin --test acceptance -- --nocapture`
//! to see the table on success as well.

use std::path::Path;
use std::process::Command;

use epikin::analysis::{closed_vs_reference, compare, linearization_bound, linearization_error};
use epikin::cli::{parse_scenario, serialize_scenario, ScenarioConfig};
use epikin::closed_form::{evaluate_closed_trajectory, sir_state, sis_state, DegeneratePolicy};
use epikin::integrator::{advance, integrate, IntegratorConfig};
use epikin::model::sir_composites;
use epikin::{Parameters, SirParameters, SisParameters, TimeGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_sis(rng: &mut ChaCha8Rng) -> SisParameters {
    loop {
        let r = rng.gen_range(0.1..2.0);
        let alpha = rng.gen_range(0.0..1.5);
        let k = rng.gen_range(0.5..2.0);
        let i0 = rng.gen_range(0.01..0.99) * k;
        let p = SisParameters::new(r, alpha, k, i0).unwrap();
        if !p.is_beta_zero() {
            return p;
        }
    }
}

fn random_sir(rng: &mut ChaCha8Rng) -> SirParameters {
    loop {
        let beta = rng.gen_range(0.1..2.0);
        let mu = rng.gen_range(0.02..1.0);
        let s0 = rng.gen_range(0.05..0.95);
        let i0 = rng.gen_range(0.01..0.5);
        let p = SirParameters::new(beta, mu, s0, i0).unwrap();
        if !p.is_lambda_zero() {
            return p;
        }
    }
}

fn random_sir_unit_total(rng: &mut ChaCha8Rng) -> SirParameters {
    loop {
        let beta = rng.gen_range(0.1..2.0);
        let mu = rng.gen_range(0.02..1.0);
        let i0 = rng.gen_range(0.01..0.5);
        let p = SirParameters::new(beta, mu, 1.0 - i0, i0).unwrap();
        if (beta - mu).abs() > 0.05 {
            return p;
        }
    }
}

fn checked_config() -> IntegratorConfig {
    IntegratorConfig {
        dt: 1e-3,
        halving_check: true,
        tolerance: 1e-9,
    }
}

// 1 and 2 share their runs.
fn sis_exactness_and_conservation() -> (Outcome, Outcome) {
    let mut rng = rng(1);
    let grid = TimeGrid::new(0.0, 50.0, 501).unwrap();
    let mut worst_err: f64 = 0.0;
    let mut worst_cons: f64 = 0.0;
    for _ in 0..100 {
        let p = random_sis(&mut rng);
        let params = Parameters::Sis(p);
        let (closed, _, report) = closed_vs_reference(
            &params,
            &grid,
            &checked_config(),
            1e-6,
            DegeneratePolicy::Reject,
        )
        .unwrap();
        worst_err = worst_err.max(report.max_abs_i);
        for x in &closed.states {
            worst_cons = worst_cons.max((x.s + x.i - p.k).abs() / p.k);
        }
    }
    (
        outcome(
            worst_err <= 1e-7,
            format!("max_abs_i = {worst_err:.3e} (<= 1e-7)"),
        ),
        outcome(
            worst_cons <= 1e-12,
            format!("max |s+i-k|/k = {worst_cons:.3e} (<= 1e-12)"),
        ),
    )
}

fn sis_equilibrium() -> Outcome {
    let mut rng = rng(3);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 100 {
        let p = random_sis(&mut rng);
        let beta = p.growth_rate();
        if beta <= 0.0 {
            continue;
        }
        n += 1;
        let i = sis_state(&p, 100.0 / beta).i;
        worst = worst.max((i - (p.k - p.alpha / p.r)).abs());
    }
    outcome(
        worst <= 1e-6,
        format!("max |i(100/beta) - (k - alpha/r)| = {worst:.3e} (<= 1e-6)"),
    )
}

fn sir_exact_subcase() -> Outcome {
    let mut rng = rng(4);
    let grid = TimeGrid::new(0.0, 50.0, 501).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = random_sir_unit_total(&mut rng);
        let (_, _, report) = closed_vs_reference(
            &p.into(),
            &grid,
            &checked_config(),
            1e-6,
            DegeneratePolicy::Reject,
        )
        .unwrap();
        worst = worst.max(report.max_abs_i);
    }
    outcome(worst <= 1e-6, format!("max_abs_i = {worst:.3e} (<= 1e-6)"))
}

fn sir_sum_law() -> Outcome {
    let mut rng = rng(5);
    let grid = TimeGrid::new(0.0, 50.0, 501).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = random_sir(&mut rng);
        let reference = integrate(&p.into(), &grid, &checked_config()).unwrap();
        let c = p.sum_constant();
        for (t, x) in reference.iter() {
            let exact = 1.0 + c * (-p.mu * t).exp();
            worst = worst.max((x.s + x.i - exact).abs());
        }
    }
    outcome(
        worst <= 1e-8,
        format!("max |s+i - (1 + C e^(-mu t))| = {worst:.3e} (<= 1e-8)"),
    )
}

fn sir_initial_conditions() -> Outcome {
    let mut rng = rng(6);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p = random_sir(&mut rng);
        let x = sir_state(&p, 0.0, DegeneratePolicy::Reject).unwrap();
        worst = worst.max((x.s - p.s0).abs()).max((x.i - p.i0).abs());
    }
    outcome(
        worst <= 1e-13,
        format!("max initial deviation = {worst:.3e} (<= 1e-13)"),
    )
}

fn sir_bias_identity() -> Outcome {
    let mut rng = rng(7);
    let grid = TimeGrid::new(0.0, 200.0, 201).unwrap();
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 20 {
        let mu = rng.gen_range(0.05..0.5);
        let beta = rng.gen_range(mu + 0.2..2.0);
        let s0 = rng.gen_range(0.05..0.95);
        let i0 = rng.gen_range(0.01..0.5);
        let p = SirParameters::new(beta, mu, s0, i0).unwrap();
        let c = p.sum_constant();
        if c.abs() < 0.01 || p.lambda() < 0.05 {
            continue;
        }
        n += 1;
        let (closed, reference, _) = closed_vs_reference(
            &p.into(),
            &grid,
            &checked_config(),
            1.0,
            DegeneratePolicy::Reject,
        )
        .unwrap();
        let gap = closed.last().i - reference.last().i;
        worst = worst.max((gap - c).abs());
    }
    outcome(
        worst <= 1e-3,
        format!("max |(i_closed - i_ref)(200) - C| = {worst:.3e} (<= 1e-3)"),
    )
}

fn quadratic_onset() -> Outcome {
    let grid = TimeGrid::new(0.0, 1.0, 2).unwrap();
    let errors: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&mu| {
            let p = SirParameters::new(0.8, mu, 0.7, 0.1).unwrap();
            let (_, _, r) = closed_vs_reference(
                &p.into(),
                &grid,
                &checked_config(),
                1.0,
                DegeneratePolicy::Reject,
            )
            .unwrap();
            r.max_abs_i
        })
        .collect();
    let ratios = [errors[0] / errors[1], errors[1] / errors[2]];
    let pass = ratios.iter().all(|r| (3.5..=4.5).contains(r));
    outcome(
        pass,
        format!(
            "errors {:.4e}, {:.4e}, {:.4e}; ratios {:.3}, {:.3} (each in [3.5, 4.5])",
            errors[0], errors[1], errors[2], ratios[0], ratios[1]
        ),
    )
}

fn linearization_bound_grid() -> Outcome {
    let mut worst_slack = f64::INFINITY;
    let mut violations = 0;
    for j in 0..100 {
        let mu = 3.0 * (j + 1) as f64 / 100.0;
        for k in 0..100 {
            let t = k as f64 / 99.0;
            let naive = ((-mu * t).exp() - (1.0 - mu * t)).abs();
            let stable = linearization_error(mu, t).abs();
            let bound = linearization_bound(mu, t);
            if naive > bound || stable > bound {
                violations += 1;
            }
            worst_slack = worst_slack.min(bound - naive.max(stable));
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations on 100x100 grid, min slack {worst_slack:.3e}"),
    )
}

fn integrator_order() -> Outcome {
    // Fast enough dynamics that the dt = 2.5e-3 error stays far above rounding.
    let p = SisParameters::new(2.0, 0.5, 1.0, 0.01).unwrap();
    let params = Parameters::Sis(p);
    let exact = sis_state(&p, 5.0).i;
    let errors: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&dt| {
            let x = advance(&params, params.initial_state(), 0.0, 5.0, dt).unwrap();
            (x.i - exact).abs()
        })
        .collect();
    let ratios = [errors[0] / errors[1], errors[1] / errors[2]];
    let pass = ratios.iter().all(|r| (12.0..=20.0).contains(r));
    outcome(
        pass,
        format!(
            "errors {:.3e}, {:.3e}, {:.3e}; ratios {:.2}, {:.2} (each in [12, 20])",
            errors[0], errors[1], errors[2], ratios[0], ratios[1]
        ),
    )
}

fn random_config(rng: &mut ChaCha8Rng) -> ScenarioConfig {
    let parameters = if rng.gen_bool(0.5) {
        Parameters::Sis(random_sis(rng))
    } else {
        Parameters::Sir(random_sir(rng))
    };
    let t_start = rng.gen_range(0.0..5.0);
    ScenarioConfig {
        parameters,
        grid: TimeGrid::new(
            t_start,
            t_start + rng.gen_range(1.0..100.0),
            rng.gen_range(2..2000),
        )
        .unwrap(),
        integrator: IntegratorConfig {
            dt: rng.gen_range(1e-4..1e-2),
            halving_check: rng.gen_bool(0.5),
            tolerance: rng.gen_range(1e-12..1e-6),
        },
        eps: rng.gen_range(1e-8..1e-1),
    }
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_epikin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_scenario(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn cli_round_trip_and_determinism() -> Outcome {
    let mut rng = rng(11);
    let mut fixpoint_failures = 0;
    for _ in 0..50 {
        let cfg = random_config(&mut rng);
        let text = serialize_scenario(&cfg);
        match parse_scenario(&text) {
            Ok(back) if back == cfg && serialize_scenario(&back) == text => {}
            _ => fixpoint_failures += 1,
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(
        dir.path(),
        "sir.json",
        r#"{"model":"sir","sir":{"beta":0.8,"mu":0.1,"s0":0.7,"i0":0.1},"grid":{"t_start":0,"t_end":20,"n_points":201}}"#,
    );
    let a = run_cli(&["simulate", "--config", &cfg]);
    let b = run_cli(&["simulate", "--config", &cfg]);
    let identical = a.status.success() && b.status.success() && a.stdout == b.stdout;
    outcome(
        fixpoint_failures == 0 && identical,
        format!(
            "{fixpoint_failures}/50 fixpoint failures; simulate outputs identical: {identical} ({} bytes)",
            a.stdout.len()
        ),
    )
}

fn degenerate_handling() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let beta_zero = write_scenario(
        dir.path(),
        "beta_zero.json",
        r#"{"model":"sis","sis":{"r":0.5,"alpha":0.5,"k":1.0,"i0":0.1},"grid":{"t_start":0,"t_end":10,"n_points":101}}"#,
    );
    let lambda_zero = write_scenario(
        dir.path(),
        "lambda_zero.json",
        r#"{"model":"sir","sir":{"beta":0.3,"mu":0.3,"s0":0.9,"i0":0.1},"grid":{"t_start":0,"t_end":10,"n_points":101}}"#,
    );
    let mut notes = Vec::new();
    let mut pass = true;
    for (path, category) in [(&beta_zero, "BetaZero"), (&lambda_zero, "LambdaZero")] {
        let out = run_cli(&["simulate", "--config", path]);
        let stderr = String::from_utf8_lossy(&out.stderr);
        let first = stderr.lines().next().unwrap_or_default();
        let ok = out.status.code() == Some(3) && first == format!("error: {category}");
        pass &= ok;
        notes.push(format!(
            "{category}: exit {:?} `{first}`",
            out.status.code()
        ));
    }

    let grid = TimeGrid::new(0.0, 10.0, 101).unwrap();
    let mut worst: f64 = 0.0;
    for params in [
        Parameters::Sis(SisParameters::new(0.5, 0.5, 1.0, 0.1).unwrap()),
        Parameters::Sir(SirParameters::new(0.3, 0.3, 0.9, 0.1).unwrap()),
    ] {
        let closed =
            evaluate_closed_trajectory(&params, &grid, DegeneratePolicy::AnalyticLimit).unwrap();
        let reference = integrate(&params, &grid, &checked_config()).unwrap();
        worst = worst.max(compare(&closed, &reference, 1e-6).unwrap().max_abs_i);
    }
    pass &= worst <= 1e-6;
    notes.push(format!("limit vs RK4 max_abs_i = {worst:.3e} (<= 1e-6)"));
    outcome(pass, notes.join("; "))
}

#[test]
fn acceptance_criteria() {
    // The degenerate SIR case above really is degenerate.
    assert!(sir_composites(&SirParameters::new(0.3, 0.3, 0.9, 0.1).unwrap()).is_err());

    let (c1, c2) = sis_exactness_and_conservation();
    let results = vec![
        ("1 SIS exactness", c1),
        ("2 SIS conservation", c2),
        ("3 SIS equilibrium", sis_equilibrium()),
        ("4 SIR exact sub-case (C = 0)", sir_exact_subcase()),
        ("5 SIR sum law", sir_sum_law()),
        ("6 SIR initial conditions", sir_initial_conditions()),
        ("7 SIR asymptotic bias identity", sir_bias_identity()),
        ("8 quadratic truncation onset", quadratic_onset()),
        ("9 linearization bound", linearization_bound_grid()),
        ("10 integrator order", integrator_order()),
        (
            "11 CLI round-trip and determinism",
            cli_round_trip_and_determinism(),
        ),
        ("12 degenerate handling", degenerate_handling()),
    ];
    let mut failed = Vec::new();
    for (name, o) in &results {
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
