//! Observable and state specifications given on the command line.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;

use qdisturb::linalg::{c, pauli, ComplexMatrix};
use qdisturb::model::{Observable, QState};

use crate::error::{data, CliError};

/// Inline JSON, or the contents of a file when `spec` names one.
fn json_source(spec: &str) -> Result<Option<String>, CliError> {
    let trimmed = spec.trim_start();
    if trimmed.starts_with('{') {
        return Ok(Some(spec.to_string()));
    }
    let path = Path::new(spec);
    if path.is_file() {
        return std::fs::read_to_string(path)
            .map(Some)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())));
    }
    Ok(None)
}

fn named(name: &str) -> Result<Option<ComplexMatrix>, CliError> {
    Ok(Some(match name {
        "sigma_x" => pauli::x(),
        "sigma_y" => pauli::y(),
        "sigma_z" => pauli::z(),
        _ => match name.strip_prefix("sigma_theta:") {
            Some(angle) => {
                let theta: f64 = angle
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad angle in '{name}'")))?;
                pauli::theta(theta)
            }
            None => return Ok(None),
        },
    }))
}

/// Parses `sigma_x|sigma_y|sigma_z|sigma_theta:<rad>`, an inline matrix, or a
/// matrix file, optionally suffixed `@k` to act on subsystem `k` (1-based).
pub fn observable(spec: &str, system_dims: &[usize], label: &str) -> Result<Observable, CliError> {
    let (body, index) = match spec.rsplit_once('@') {
        Some((body, k)) if !k.is_empty() && k.chars().all(|ch| ch.is_ascii_digit()) => {
            let k: usize = k
                .parse()
                .map_err(|_| CliError::Usage(format!("bad subsystem index in '{spec}'")))?;
            if k == 0 || k > system_dims.len() {
                return Err(CliError::Usage(format!(
                    "subsystem index {k} outside 1..={}",
                    system_dims.len()
                )));
            }
            (body, Some(k - 1))
        }
        _ => (spec, None),
    };
    let (matrix, is_named) = match named(body)? {
        Some(m) => (m, true),
        None => match json_source(body)? {
            Some(text) => (
                serde_json::from_str::<ComplexMatrix>(&text)
                    .map_err(|e| CliError::Data(format!("observable {label}: {e}")))?,
                false,
            ),
            None => {
                return Err(CliError::Usage(format!(
                    "observable '{body}' is neither a named Pauli, inline matrix JSON, nor a readable file"
                )))
            }
        },
    };
    let system_dim: usize = system_dims.iter().product();
    match index {
        Some(k) => Observable::on_subsystem(&matrix, system_dims, k, label).map_err(data),
        None if is_named && system_dims.len() > 1 => Err(CliError::Usage(format!(
            "named observable '{body}' on a composite system needs a subsystem suffix such as @1"
        ))),
        None if matrix.rows() != system_dim => Err(CliError::Data(format!(
            "observable {label} is {}x{} but the system dimension is {system_dim}",
            matrix.rows(),
            matrix.cols()
        ))),
        None => Observable::new(matrix, label).map_err(data),
    }
}

/// Parses state JSON (inline or file), `0`, `1`, `+`, `-`, `+i`, `-i`,
/// `phi+`, or a digit string giving a product basis state.
pub fn state(spec: Option<&str>, system_dims: &[usize]) -> Result<QState, CliError> {
    let dims = system_dims.to_vec();
    let Some(spec) = spec else {
        return QState::basis(dims, 0).map_err(data);
    };
    let h = FRAC_1_SQRT_2;
    let qubit = |amps: [(f64, f64); 2]| -> Result<QState, CliError> {
        if system_dims != [2] {
            return Err(CliError::Data(format!(
                "'{spec}' is a qubit state but the system has dims {system_dims:?}"
            )));
        }
        QState::new(
            dims.clone(),
            amps.iter().map(|&(re, im)| c(re, im)).collect(),
        )
        .map_err(data)
    };
    match spec {
        "+" => return qubit([(h, 0.0), (h, 0.0)]),
        "-" => return qubit([(h, 0.0), (-h, 0.0)]),
        "+i" => return qubit([(h, 0.0), (0.0, h)]),
        "-i" => return qubit([(h, 0.0), (0.0, -h)]),
        "phi+" => {
            if system_dims != [2, 2] {
                return Err(CliError::Data(format!(
                    "phi+ needs a two-qubit system, found dims {system_dims:?}"
                )));
            }
            return Ok(QState::phi_plus());
        }
        _ => {}
    }
    if !spec.is_empty() && spec.chars().all(|ch| ch.is_ascii_digit()) {
        let digits: Vec<usize> = spec.bytes().map(|b| usize::from(b - b'0')).collect();
        if digits.len() != system_dims.len() || digits.iter().zip(system_dims).any(|(d, n)| d >= n)
        {
            return Err(CliError::Data(format!(
                "basis label '{spec}' does not fit dims {system_dims:?}"
            )));
        }
        let index = digits
            .iter()
            .zip(system_dims)
            .fold(0, |acc, (d, n)| acc * n + d);
        return QState::basis(dims, index).map_err(data);
    }
    match json_source(spec)? {
        Some(text) => {
            let s: QState =
                serde_json::from_str(&text).map_err(|e| CliError::Data(format!("state: {e}")))?;
            if s.dim() != system_dims.iter().product::<usize>() {
                return Err(CliError::Data(format!(
                    "state dimension {} does not match system dims {system_dims:?}",
                    s.dim()
                )));
            }
            QState::new(dims, s.amplitudes().to_vec()).map_err(data)
        }
        None => Err(CliError::Usage(format!("unrecognized state '{spec}'"))),
    }
}
