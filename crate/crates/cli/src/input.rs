//! Parsing of input files: channel specs, input-state lists and point sets.

use std::fs;
use std::path::Path;

use nalgebra::Vector3;
use qcap_core::channels::ChannelSpec;
use qcap_core::qmath::{bloch_to_density, c, fibonacci_sphere, BlochVector, ComplexMatrix, DensityMatrix};
use qcap_core::superact::ReferenceModel;
use qcap_core::zeroerr::{basis_inputs, epr_inputs};
use serde::Deserialize;

use crate::error::{CliError, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn read_channel(path: &Path) -> Result<ChannelSpec> {
    Ok(ChannelSpec::from_toml_str(&read_text(path)?)?)
}

pub fn read_model(path: &Path) -> Result<ReferenceModel> {
    Ok(ReferenceModel::from_toml_str(&read_text(path)?)?)
}

/// Input-state list. Exactly one source key must be present.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputsFile {
    basis: Option<usize>,
    bloch: Option<Vec<[f64; 3]>>,
    states: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    /// Number of pure qubit states spread over the Bloch sphere.
    fibonacci: Option<usize>,
    #[serde(default)]
    epr: bool,
}

pub fn read_inputs(path: &Path) -> Result<Vec<DensityMatrix>> {
    let file: InputsFile =
        toml::from_str(&read_text(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let sources =
        [file.basis.is_some(), file.bloch.is_some(), file.states.is_some(), file.fibonacci.is_some(), file.epr]
            .iter()
            .filter(|&&b| b)
            .count();
    if sources != 1 {
        return Err(CliError::Input(format!(
            "{}: give exactly one of 'basis', 'bloch', 'states', 'fibonacci' or 'epr = true'",
            path.display()
        )));
    }
    let states = if let Some(d) = file.basis {
        if d == 0 {
            return Err(CliError::Input("basis dimension must be positive".into()));
        }
        basis_inputs(d)
    } else if let Some(vectors) = file.bloch {
        vectors
            .iter()
            .map(|v| Ok(bloch_to_density(&BlochVector::new(v[0], v[1], v[2])?)))
            .collect::<Result<Vec<_>>>()?
    } else if let Some(n) = file.fibonacci {
        fibonacci_sphere(n)
            .into_iter()
            .map(|v| Ok(bloch_to_density(&BlochVector::from_vector(v)?)))
            .collect::<Result<Vec<_>>>()?
    } else if let Some(matrices) = file.states {
        matrices.iter().map(|m| state_from_entries(m)).collect::<Result<Vec<_>>>()?
    } else {
        epr_inputs().to_vec()
    };
    if states.is_empty() {
        return Err(CliError::Input(format!("{}: no input states", path.display())));
    }
    Ok(states)
}

fn state_from_entries(rows: &[Vec<[f64; 2]>]) -> Result<DensityMatrix> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(CliError::Input("state matrices must be square and nonempty".into()));
    }
    let m = ComplexMatrix::from_fn(d, d, |i, j| c(rows[i][j][0], rows[i][j][1]));
    Ok(DensityMatrix::new(m)?)
}

/// Qubit points with weights and ball radii.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
    pub radii: Vec<f64>,
}

/// Reads `x,y,z[,w[,r]]` rows. Lines starting with `#` and a leading
/// non-numeric header row are skipped.
pub fn read_points(path: &Path) -> Result<PointSet> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut set = PointSet { points: Vec::new(), weights: Vec::new(), radii: Vec::new() };
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let values: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match values {
            Ok(v) => v,
            Err(_) if line == 0 => continue,
            Err(e) => return Err(CliError::Input(format!("{}: row {}: {e}", path.display(), line + 1))),
        };
        if !(3..=5).contains(&values.len()) {
            return Err(CliError::Input(format!(
                "{}: row {} has {} fields, expected x,y,z[,w[,r]]",
                path.display(),
                line + 1,
                values.len()
            )));
        }
        let v = BlochVector::new(values[0], values[1], values[2])?;
        set.points.push(*v.as_vector());
        set.weights.push(values.get(3).copied().unwrap_or(1.0));
        set.radii.push(values.get(4).copied().unwrap_or(0.0));
    }
    if set.points.is_empty() {
        return Err(CliError::Input(format!("{}: no points", path.display())));
    }
    Ok(set)
}
