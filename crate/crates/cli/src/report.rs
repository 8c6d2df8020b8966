//! JSON report layout shared by every command and the validator.

use std::collections::BTreeMap;

use qcap_core::qmath::{density_to_bloch, DensityMatrix};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub metadata: Metadata,
    pub result: ResultBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub flags: BTreeMap<String, String>,
}

impl Metadata {
    pub fn new(command: &str, seed: u64, flags: BTreeMap<String, String>) -> Self {
        Self {
            tool: "qcap".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            flags,
        }
    }

    /// Comment lines for CSV output.
    pub fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("tool {} {}", self.tool, self.version),
            format!("command {}", self.command),
            format!("seed {}", self.seed),
        ];
        lines.extend(self.flags.iter().map(|(k, v)| format!("flag {k}={v}")));
        lines
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ResultBody {
    Capacity(CapacityReport),
    Private(PrivateReport),
    ZeroError(ZeroErrorReport),
    Ball(BallReport),
    Sweep(SweepReport),
}

/// A state as a Bloch vector (qubits) or as `[re, im]` matrix entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

impl StateJson {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        if let Ok(b) = density_to_bloch(rho) {
            return Self { bloch: Some([b.x(), b.y(), b.z()]), matrix: None };
        }
        let m = rho.matrix();
        let rows = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        Self { bloch: None, matrix: Some(rows) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleMember {
    pub weight: f64,
    pub state: StateJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Balls {
    pub r_ab: f64,
    pub r_ae: f64,
    pub r_coh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityReport {
    pub mode: String,
    pub value_bits: f64,
    pub radius: f64,
    pub lower_bound: f64,
    pub center: StateJson,
    pub ensemble: Vec<EnsembleMember>,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balls: Option<Balls>,
    /// Number of candidate inputs when the optimum is restricted to a list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrivateReport {
    pub value_bits: f64,
    pub declared: bool,
    pub ensembles_tested: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroErrorReport {
    pub k: usize,
    pub rate_bits: f64,
    pub n_uses: usize,
    pub epr_normalized: bool,
    pub inputs: usize,
    pub vertices: usize,
    pub edges: usize,
    pub codewords: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallReport {
    pub algorithm: String,
    pub points: usize,
    pub center_bloch: [f64; 3],
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub p_c: f64,
    pub r_h2: f64,
    pub r_super: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepReport {
    pub p1_bits: f64,
    pub window: [f64; 2],
    pub detected_window: Option<[f64; 2]>,
    pub rows: Vec<SweepPoint>,
}

/// Consistency checks beyond the schema.
pub fn check_report(report: &Report) -> Result<(), String> {
    let finite = |name: &str, v: f64| if v.is_finite() { Ok(()) } else { Err(format!("{name} is not finite")) };
    match &report.result {
        ResultBody::Capacity(c) => {
            finite("value_bits", c.value_bits)?;
            finite("lower_bound", c.lower_bound)?;
            if c.value_bits < -1e-12 {
                return Err(format!("negative capacity {}", c.value_bits));
            }
            if c.lower_bound > c.value_bits + 1e-9 {
                return Err("lower bound exceeds the estimate".into());
            }
            let total: f64 = c.ensemble.iter().map(|m| m.weight).sum();
            if c.ensemble.iter().any(|m| m.weight < 0.0) || (total - 1.0).abs() > 1e-9 {
                return Err(format!("ensemble weights sum to {total}"));
            }
            for m in &c.ensemble {
                check_state(&m.state)?;
            }
            check_state(&c.center)?;
            if let Some(b) = &c.balls {
                if (b.r_coh - (b.r_ab - b.r_ae)).abs() > 1e-9 {
                    return Err("r_coh must equal r_ab − r_ae".into());
                }
            }
        }
        ResultBody::Private(p) => finite("value_bits", p.value_bits)?,
        ResultBody::ZeroError(z) => {
            if z.codewords.len() != z.k {
                return Err(format!("{} codewords listed for K = {}", z.codewords.len(), z.k));
            }
            if z.codewords.iter().any(|w| w.len() != z.n_uses || w.iter().any(|&s| s >= z.inputs)) {
                return Err("codeword length or symbol out of range".into());
            }
            let mut expected = if z.k > 0 { (z.k as f64).log2() / z.n_uses as f64 } else { 0.0 };
            if z.epr_normalized {
                expected *= 0.5;
            }
            if (expected - z.rate_bits).abs() > 1e-12 {
                return Err(format!("rate {} does not match K = {}", z.rate_bits, z.k));
            }
        }
        ResultBody::Ball(b) => {
            finite("radius", b.radius)?;
            if b.radius < 0.0 {
                return Err("negative radius".into());
            }
            if b.center_bloch.iter().map(|x| x * x).sum::<f64>().sqrt() > 1.0 + 1e-9 {
                return Err("center outside the Bloch ball".into());
            }
        }
        ResultBody::Sweep(s) => check_sweep_rows(&s.rows)?,
    }
    Ok(())
}

fn check_state(s: &StateJson) -> Result<(), String> {
    match (&s.bloch, &s.matrix) {
        (Some(b), None) => {
            if b.iter().map(|x| x * x).sum::<f64>().sqrt() > 1.0 + 1e-9 {
                return Err("Bloch vector outside the ball".into());
            }
            Ok(())
        }
        (None, Some(m)) => {
            let trace: f64 = m.iter().enumerate().map(|(i, row)| row.get(i).map_or(f64::NAN, |e| e[0])).sum();
            if m.iter().any(|row| row.len() != m.len()) || (trace - 1.0).abs() > 1e-9 {
                return Err("state matrix must be square with unit trace".into());
            }
            Ok(())
        }
        _ => Err("state must have exactly one of 'bloch' or 'matrix'".into()),
    }
}

pub fn check_sweep_rows(rows: &[SweepPoint]) -> Result<(), String> {
    for r in rows {
        if !(0.0..=1.0).contains(&r.p_c) {
            return Err(format!("p_C = {} outside [0, 1]", r.p_c));
        }
        let expected = 2.0 * r.p_c * (1.0 - r.p_c) * r.r_h2;
        if (r.r_super - expected).abs() > 1e-12 {
            return Err(format!("row p_C = {}: r_super {} differs from 2p(1−p)·r_H2 = {expected}", r.p_c, r.r_super));
        }
    }
    Ok(())
}
