mod error;
mod inputs;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qdisturb::audit;
use qdisturb::edr::edr_report;
use qdisturb::measures::{
    commutes_in_state, distributional_deviation, eta_bar, is_properly_nondisturbing, EtaBarOptions,
    DEFAULT_TOL,
};
use qdisturb::model::{MeasurementModel, ModelFile};
use qdisturb::scenarios::{self, SCENARIO_NAMES};

use error::{data, CliError};
use output::{flat_csv, json_text, rounded_json, table_csv};

const SWEEP_COLUMNS: [&str; 8] = [
    "theta",
    "eta_o",
    "epsilon_o",
    "delta_g_tau",
    "p_ab",
    "p_e",
    "p_e_optimal",
    "branciard_lhs",
];

#[derive(Parser, Debug)]
#[command(
    name = "qdisturb",
    version,
    about = "Error, disturbance and correlation analysis of quantum measurement models"
)]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write output to PATH instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Tolerance for non-disturbance classifications
    #[arg(long, global = true, value_name = "X", default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named scenario and check its golden values
    Scenario {
        /// cnot, no-measurement, bell-sigma-z, bell-sigma-theta, random-local
        name: String,
        /// Measurement angle for bell-sigma-theta, radians in [0, π/2)
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        /// Seed for random-local
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sweep the σ_θ measurement angle on the Bell pair
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        theta_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        theta_max: f64,
        #[arg(long, allow_negative_numbers = true)]
        step: f64,
    },
    /// Randomized audit of universal relations and equivalences
    Audit {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Analyze a user model file
    Analyze {
        /// Model JSON file
        model_file: PathBuf,
        /// Measured observable: sigma_x|sigma_y|sigma_z|sigma_theta:<rad>[@k], matrix JSON, or file
        #[arg(long)]
        a: String,
        /// Disturbed observable, same syntax as --a
        #[arg(long)]
        b: String,
        /// System state: JSON, file, 0, 1, +, -, +i, -i, phi+, or a digit string
        #[arg(long)]
        psi: Option<String>,
    },
}

/// Rendered output and whether all checks passed.
struct Outcome {
    text: String,
    passed: Result<(), String>,
}

fn render<T: Serialize>(value: &T, format: Format) -> Result<String, CliError> {
    let v = rounded_json(value)?;
    Ok(match format {
        Format::Json => json_text(&v),
        Format::Csv => flat_csv(&v),
    })
}

fn cmd_scenario(
    name: &str,
    theta: Option<f64>,
    seed: Option<u64>,
    format: Format,
) -> Result<Outcome, CliError> {
    if !SCENARIO_NAMES.contains(&name) {
        return Err(CliError::Usage(format!(
            "unknown scenario '{name}'; expected one of {}",
            SCENARIO_NAMES.join(", ")
        )));
    }
    let result = scenarios::run(name, theta, seed).map_err(data)?;
    let failed: Vec<String> = result
        .failed_checks()
        .map(|c| format!("{} expected {} got {}", c.name, c.expected, c.actual))
        .collect();
    Ok(Outcome {
        text: render(&result, format)?,
        passed: if failed.is_empty() {
            Ok(())
        } else {
            Err(failed.join("; "))
        },
    })
}

fn cmd_sweep(
    theta_min: f64,
    theta_max: f64,
    step: f64,
    format: Format,
) -> Result<Outcome, CliError> {
    let rows = scenarios::sweep(theta_min, theta_max, step).map_err(data)?;
    let text = match format {
        Format::Json => json_text(&rounded_json(&rows)?),
        Format::Csv => {
            let rows: Vec<_> = rows.iter().map(rounded_json).collect::<Result<_, _>>()?;
            table_csv(&SWEEP_COLUMNS, &rows)
        }
    };
    Ok(Outcome {
        text,
        passed: Ok(()),
    })
}

fn cmd_audit(seed: u64, n: usize, tol: f64, format: Format) -> Result<Outcome, CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let report = audit::run_all(seed, n, tol).map_err(data)?;
    let failed: Vec<String> = report
        .properties
        .iter()
        .filter(|p| p.universal && !p.passed())
        .map(|p| format!("{}: {} of {} cases", p.name, p.failures, p.cases))
        .collect();
    let text = match format {
        Format::Json => json_text(&rounded_json(&report)?),
        Format::Csv => {
            let rows: Vec<_> = report
                .properties
                .iter()
                .map(rounded_json)
                .collect::<Result<_, _>>()?;
            table_csv(&["name", "cases", "failures", "worst", "universal"], &rows)
        }
    };
    Ok(Outcome {
        text,
        passed: if failed.is_empty() {
            Ok(())
        } else {
            Err(failed.join("; "))
        },
    })
}

fn load_model(path: &PathBuf) -> Result<MeasurementModel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    MeasurementModel::try_from(file).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn cmd_analyze(
    path: &PathBuf,
    a: &str,
    b: &str,
    psi: Option<&str>,
    tol: f64,
    format: Format,
) -> Result<Outcome, CliError> {
    let model = load_model(path)?;
    let dims = model.system_dims().to_vec();
    let a = inputs::observable(a, &dims, "A")?;
    let b = inputs::observable(b, &dims, "B")?;
    let psi = inputs::state(psi, &dims)?;
    let report = edr_report(&model, &a, &b, &psi).map_err(data)?;
    let deviation = distributional_deviation(&model, &b, &psi).map_err(data)?;
    let proper = is_properly_nondisturbing(&model, &b, &psi, tol).map_err(data)?;
    let bar = eta_bar(&model, &b, &psi, EtaBarOptions::default()).map_err(data)?;
    let value = json!({
        "system_dims": dims,
        "probe_dim": model.probe_dim(),
        "psi": psi,
        "edr": report,
        "classifications": {
            "a_b_commute_in_state": commutes_in_state(&a, &b, &psi, tol),
            "distributional_deviation": deviation,
            "distributionally_nondisturbing": deviation <= tol,
            "properly_nondisturbing": proper,
        },
        "eta_bar": bar,
    });
    Ok(Outcome {
        text: render(&value, format)?,
        passed: Ok(()),
    })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            cli.tol
        )));
    }
    match &cli.command {
        Command::Scenario { name, theta, seed } => cmd_scenario(name, *theta, *seed, cli.format),
        Command::Sweep {
            theta_min,
            theta_max,
            step,
        } => cmd_sweep(*theta_min, *theta_max, *step, cli.format),
        Command::Audit { seed, n } => cmd_audit(*seed, *n, cli.tol, cli.format),
        Command::Analyze {
            model_file,
            a,
            b,
            psi,
        } => cmd_analyze(model_file, a, b, psi.as_deref(), cli.tol, cli.format),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("--out {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Usage(format!("stdout: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    let result = run(&cli).and_then(|outcome| {
        emit(&outcome.text, cli.out.as_ref())?;
        outcome.passed.map_err(CliError::Failed)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdisturb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
