//! Superactivation of joint channels built from zero-capacity components.
//!
//! A joint construction uses the first channel with probability `p_C` and the
//! second with `1 − p_C`, each branch flagged by an orthogonal classical
//! marker. With two uses, the superball radius is
//! `r_super = p_C²·r_HH + 2p_C(1 − p_C)·r_H2`, where the pairwise radii come
//! from a [`ReferenceModel`].

use std::fmt::Write as _;

use crate::channels::ChannelSpec;
use crate::error::{Error, Result};
use crate::qmath::{check_dims, h2, relative_entropy, tensor, von_neumann_entropy, DensityMatrix};

/// Joint single-use quantum capacity of a channel with private capacity `p1`
/// paired with a 50% erasure channel: `p1 / 2`.
pub fn superactivation_value(p1: f64) -> Result<f64> {
    if !(p1 >= 0.0 && p1.is_finite()) {
        return Err(Error::InvalidParameter(format!("private capacity {p1} must be finite and >= 0")));
    }
    Ok(0.5 * p1)
}

/// A convex combination of two channels selected with probability `p_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointConstruction {
    pub p_c: f64,
    pub ch1: ChannelSpec,
    pub ch2: ChannelSpec,
}

impl JointConstruction {
    pub fn new(p_c: f64, ch1: ChannelSpec, ch2: ChannelSpec) -> Result<Self> {
        check_probability(p_c)?;
        Ok(Self { p_c, ch1, ch2 })
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p_C = {p} outside [0, 1]")))
    }
}

/// Declared radii of a superactivation model.
///
/// The activation window is open at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceModel {
    /// Single-use private capacity of the first channel, in bits.
    pub p1: f64,
    pub window: (f64, f64),
    /// Radius of the mixed pair inside the window, `p1 / 2`.
    pub r_h2_inside: f64,
    /// Radius of the pair of first-channel uses.
    pub r_hh: f64,
}

impl Default for ReferenceModel {
    /// Horodecki channel (`P⁽¹⁾ = 0.02` bits) combined with a 50% erasure channel.
    fn default() -> Self {
        Self::new(0.02, (0.0, 0.0041)).expect("reference values are valid")
    }
}

impl ReferenceModel {
    pub fn new(p1: f64, window: (f64, f64)) -> Result<Self> {
        let r_h2_inside = superactivation_value(p1)?;
        let (lo, hi) = window;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::InvalidParameter(format!("activation window ({lo}, {hi}) invalid")));
        }
        Ok(Self { p1, window, r_h2_inside, r_hh: 0.0 })
    }

    /// Reads `P1_horodecki`, `window_lo` and `window_hi` from a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let num = |key: &str| {
            table
                .get(key)
                .and_then(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)))
                .ok_or_else(|| Error::Parse(format!("missing numeric key '{key}'")))
        };
        if let Some(k) = table.keys().find(|k| !["P1_horodecki", "window_lo", "window_hi"].contains(&k.as_str())) {
            return Err(Error::Parse(format!("unexpected key '{k}'")));
        }
        Self::new(num("P1_horodecki")?, (num("window_lo")?, num("window_hi")?))
    }

    pub fn in_window(&self, p_c: f64) -> bool {
        p_c > self.window.0 && p_c < self.window.1
    }

    pub fn r_h2(&self, p_c: f64) -> f64 {
        if self.in_window(p_c) {
            self.r_h2_inside
        } else {
            0.0
        }
    }
}

/// `r_super = p_C²·r_HH + 2p_C(1 − p_C)·r_H2(p_C)`.
pub fn joint_radius(construction: &JointConstruction, model: &ReferenceModel) -> f64 {
    joint_radius_at(construction.p_c, model)
}

pub fn joint_radius_at(p_c: f64, model: &ReferenceModel) -> f64 {
    p_c * p_c * model.r_hh + 2.0 * p_c * (1.0 - p_c) * model.r_h2(p_c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub p_c: f64,
    pub r_h2: f64,
    pub r_super: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub model: ReferenceModel,
}

impl SweepResult {
    /// Grid values with a strictly positive joint radius.
    pub fn activation_points(&self) -> Vec<f64> {
        self.rows.iter().filter(|r| r.r_super > 0.0).map(|r| r.p_c).collect()
    }

    /// Smallest and largest activated grid value.
    pub fn detected_window(&self) -> Option<(f64, f64)> {
        let pts = self.activation_points();
        Some((*pts.first()?, *pts.last()?))
    }

    /// CSV with `#` comment lines followed by `p_C,r_H2,r_super` rows.
    pub fn to_csv(&self, header: &[String]) -> String {
        let mut out = String::new();
        for line in header {
            let _ = writeln!(out, "# {line}");
        }
        out.push_str("p_C,r_H2,r_super\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.p_c, r.r_h2, r.r_super);
        }
        out
    }
}

/// Evaluates the joint radius on every grid value, in grid order.
pub fn sweep(grid: &[f64], model: &ReferenceModel) -> Result<SweepResult> {
    let rows = grid
        .iter()
        .map(|&p_c| {
            check_probability(p_c)?;
            Ok(SweepRow { p_c, r_h2: model.r_h2(p_c), r_super: joint_radius_at(p_c, model) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows, model: *model })
}

/// `steps + 1` evenly spaced values from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
        return Err(Error::InvalidParameter(format!("need 0 <= lo < hi <= 1, got [{lo}, {hi}]")));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    Ok((0..=steps).map(|i| if i == steps { hi } else { lo + (hi - lo) * i as f64 / steps as f64 }).collect())
}

/// `(D(ρ1⊗ρ2‖σ1⊗σ2), D(ρ1‖σ1) + D(ρ2‖σ2))`.
pub fn decomposition_check(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    sigma1: &DensityMatrix,
    sigma2: &DensityMatrix,
) -> Result<(f64, f64)> {
    check_dims(rho1.dim(), sigma1.dim())?;
    check_dims(rho2.dim(), sigma2.dim())?;
    let lhs = relative_entropy(&tensor(rho1, rho2), &tensor(sigma1, sigma2))?;
    let rhs = relative_entropy(rho1, sigma1)? + relative_entropy(rho2, sigma2)?;
    Ok((lhs, rhs))
}

/// The same comparison for a joint state: `D(ρ12‖σ1⊗σ2)` against the sum of
/// the marginal divergences.
pub fn decomposition_check_joint(
    rho12: &DensityMatrix,
    dims: (usize, usize),
    sigma1: &DensityMatrix,
    sigma2: &DensityMatrix,
) -> Result<(f64, f64)> {
    use crate::qmath::{partial_trace, Subsystem};
    check_dims(dims.0, sigma1.dim())?;
    check_dims(dims.1, sigma2.dim())?;
    let lhs = relative_entropy(rho12, &tensor(sigma1, sigma2))?;
    let rho1 = partial_trace(rho12, Subsystem::B, dims)?;
    let rho2 = partial_trace(rho12, Subsystem::A, dims)?;
    Ok((lhs, relative_entropy(&rho1, sigma1)? + relative_entropy(&rho2, sigma2)?))
}

/// `½(1 − H(p/2))`, the joint radius of a depolarizing channel paired with a
/// 50% erasure channel.
pub fn depolarizing_erasure_radius(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(0.5 * (1.0 - h2(0.5 * p)))
}

/// Superball center and boundary: the higher-entropy of two average output
/// states, and the index of the lowest-entropy candidate. Ties go to the
/// first argument and the lowest index.
pub fn superball_center_and_boundary(
    sigma1: &DensityMatrix,
    sigma2: &DensityMatrix,
    candidates: &[DensityMatrix],
) -> Result<(DensityMatrix, usize)> {
    let center = if von_neumann_entropy(sigma2) > von_neumann_entropy(sigma1) { sigma2 } else { sigma1 };
    let (_, boundary) = entropy_extremes(candidates)?;
    Ok((center.clone(), boundary))
}

/// Indices of the highest- and lowest-entropy states. Ties go to the lowest index.
pub fn entropy_extremes(candidates: &[DensityMatrix]) -> Result<(usize, usize)> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate states"));
    }
    let entropies: Vec<f64> = candidates.iter().map(von_neumann_entropy).collect();
    let mut center = 0;
    let mut boundary = 0;
    for (i, &s) in entropies.iter().enumerate() {
        if s > entropies[center] {
            center = i;
        }
        if s < entropies[boundary] {
            boundary = i;
        }
    }
    Ok((center, boundary))
}
