use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use epikin::cli::{self, Mode, Scale, ScenarioConfig, SweepSpec};
use epikin::closed_form::DegeneratePolicy;
use epikin::{Error, Parameters};

/// Closed-form SIS/SIR solutions checked against a Runge-Kutta reference.
#[derive(Debug, Parser)]
#[command(name = "epikin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the trajectory as CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
    },
    /// Compare closed form against the reference solution (JSON report).
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Earliest time the closed form departs from the reference by more than eps.
    Horizon {
        #[command(flatten)]
        common: Common,
    },
    /// Vary one parameter and tabulate errors, horizons and bias.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary (sis: r, alpha, k, i0; sir: beta, mu, s0, i0).
        #[arg(long)]
        field: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Scale::Linear)]
        scale: Scale,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the scenario's horizon threshold.
    #[arg(long)]
    eps: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluate zero-rate (BetaZero / LambdaZero) cases with their analytic limit.
    #[arg(long)]
    analytic_limit: bool,
}

impl Common {
    fn load(&self) -> Result<ScenarioConfig, Error> {
        let text = fs::read_to_string(&self.config)?;
        let mut cfg = cli::parse_scenario(&text)?;
        if let Some(eps) = self.eps {
            cfg.eps = eps;
            cfg.validate()?;
        }
        if let Parameters::Sir(p) = cfg.parameters {
            if p.exceeds_unit_total() {
                eprintln!("warning: s0 + i0 = {} exceeds 1", p.s0 + p.i0);
            }
        }
        Ok(cfg)
    }

    fn policy(&self) -> DegeneratePolicy {
        if self.analytic_limit {
            DegeneratePolicy::AnalyticLimit
        } else {
            DegeneratePolicy::Reject
        }
    }

    fn emit(&self, document: &str) -> Result<(), Error> {
        match &self.out {
            Some(path) => fs::write(path, document)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(document.as_bytes())?;
                stdout.flush()?;
            }
        }
        Ok(())
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Simulate { common, mode } => {
            let cfg = common.load()?;
            common.emit(&cli::simulate(&cfg, mode, common.policy())?)
        }
        Command::Compare { common } => {
            let cfg = common.load()?;
            common.emit(&cli::compare_report(&cfg, common.policy())?)
        }
        Command::Horizon { common } => {
            let cfg = common.load()?;
            common.emit(&cli::horizon_report(&cfg, common.policy())?)
        }
        Command::Sweep {
            common,
            field,
            from,
            to,
            steps,
            scale,
        } => {
            let cfg = common.load()?;
            let spec = SweepSpec {
                field,
                from,
                to,
                steps,
                scale,
            };
            common.emit(&cli::sweep(&cfg, &spec, common.policy())?)
        }
    }
}

fn main() -> ExitCode {
    let parsed = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error: UsageError");
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(parsed.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.category());
            eprintln!("{e}");
            ExitCode::from(e.class().exit_code() as u8)
        }
    }
}
