//! Quantum channels in Kraus form and their affine Bloch-ball representation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::qmath::{bloch_coords, c, check_dims, identity, pauli_x, pauli_y, pauli_z, ComplexMatrix, DensityMatrix};

/// Tolerance for `Σ Nᵢ†Nᵢ = I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// A CPTP map `ρ ↦ Σ Nᵢ ρ Nᵢ†` with `out_dim × in_dim` Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::Empty("Kraus operator list"))?;
        let (out_dim, in_dim) = first.shape();
        let mut sum = DMatrix::zeros(in_dim, in_dim);
        for k in &kraus {
            if k.shape() != (out_dim, in_dim) {
                return Err(Error::InvalidChannel(format!(
                    "Kraus operators must all be {out_dim}x{in_dim}, found {}x{}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            sum += k.adjoint() * k;
        }
        let dev = (sum - identity(in_dim)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel(format!("Kraus completeness violated by {dev:e}")));
        }
        Ok(Self { in_dim, out_dim, kraus })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Applies the channel to an arbitrary `in_dim × in_dim` operator.
    pub fn apply_operator(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.kraus
            .iter()
            .fold(DMatrix::zeros(self.out_dim, self.out_dim), |acc: ComplexMatrix, k| acc + k * m * k.adjoint())
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_dims(self.in_dim, rho.dim())?;
        Ok(DensityMatrix::from_hermitian_unchecked(self.apply_operator(rho.matrix())))
    }

    /// The channel to the environment: `E(ρ)ᵢⱼ = Tr(Nᵢ ρ Nⱼ†)`.
    ///
    /// Its output dimension is the number of Kraus operators as given.
    pub fn complementary(&self) -> KrausChannel {
        let r = self.kraus.len();
        let kraus = (0..self.out_dim).map(|k| DMatrix::from_fn(r, self.in_dim, |i, j| self.kraus[i][(k, j)])).collect();
        KrausChannel { in_dim: self.in_dim, out_dim: r, kraus }
    }

    /// Parallel composition `self ⊗ other`.
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let kraus = self.kraus.iter().flat_map(|a| other.kraus.iter().map(move |b| a.kronecker(b))).collect();
        KrausChannel { in_dim: self.in_dim * other.in_dim, out_dim: self.out_dim * other.out_dim, kraus }
    }

    pub fn is_qubit(&self) -> bool {
        self.in_dim == 2 && self.out_dim == 2
    }

    /// True when the maximally mixed input maps to the maximally mixed output.
    pub fn is_unital(&self) -> bool {
        let out = self.apply_operator(&(identity(self.in_dim) * c(1.0 / self.in_dim as f64, 0.0)));
        let target = identity(self.out_dim) * c(1.0 / self.out_dim as f64, 0.0);
        (out - target).iter().all(|z| z.norm() < 1e-12)
    }
}

pub fn tensor_channels(a: &KrausChannel, b: &KrausChannel) -> KrausChannel {
    a.tensor(b)
}

pub fn complementary_channel(ch: &KrausChannel) -> KrausChannel {
    ch.complementary()
}

/// A qubit channel as the affine map `r ↦ A r + b` on Bloch vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAffineMap {
    pub a: Matrix3<f64>,
    pub b: Vector3<f64>,
}

impl BlochAffineMap {
    pub fn apply(&self, r: &Vector3<f64>) -> Vector3<f64> {
        self.a * r + self.b
    }

    /// Diagonal of `A`, the distortion vector when `A` is diagonal.
    pub fn eta(&self) -> Vector3<f64> {
        self.a.diagonal()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..3).all(|i| (0..3).all(|j| i == j || self.a[(i, j)].abs() <= tol))
    }

    /// Checks complete positivity from the distortion vector; only meaningful
    /// for diagonal `A` with zero shift.
    pub fn is_cp(&self) -> Option<bool> {
        if self.is_diagonal(1e-12) && self.b.norm() <= 1e-12 {
            Some(cp_check_eta(&self.eta()))
        } else {
            None
        }
    }
}

/// Affine Bloch form of a qubit channel: `Aᵢⱼ = ½Tr(σᵢ N(σⱼ))`, `b = r(N(I/2))`.
pub fn kraus_to_affine(ch: &KrausChannel) -> Result<BlochAffineMap> {
    if !ch.is_qubit() {
        return Err(Error::NotQubit(if ch.in_dim != 2 { ch.in_dim } else { ch.out_dim }));
    }
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut a = Matrix3::zeros();
    for (j, pj) in paulis.iter().enumerate() {
        let out = ch.apply_operator(pj);
        for (i, pi) in paulis.iter().enumerate() {
            a[(i, j)] = 0.5 * (pi * &out).trace().re;
        }
    }
    let b = bloch_coords(&ch.apply_operator(&(identity(2) * c(0.5, 0.0))));
    Ok(BlochAffineMap { a, b })
}

/// Complete positivity of a unital Pauli-diagonal map with distortion vector `η`.
pub fn cp_check_eta(eta: &Vector3<f64>) -> bool {
    const TOL: f64 = 1e-12;
    let (x, y, z) = (eta.x, eta.y, eta.z);
    (x + y).abs() <= (1.0 + z).abs() + TOL && (x - y).abs() <= (1.0 - z).abs() + TOL
}

/// The supported channel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Identity,
    BitFlip,
    PhaseFlip,
    BitPhaseFlip,
    Depolarizing,
    AmplitudeDamping,
    Dephasing,
    Erasure,
    DeclaredCapacity,
    CustomKraus,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 10] = [
        ChannelKind::Identity,
        ChannelKind::BitFlip,
        ChannelKind::PhaseFlip,
        ChannelKind::BitPhaseFlip,
        ChannelKind::Depolarizing,
        ChannelKind::AmplitudeDamping,
        ChannelKind::Dephasing,
        ChannelKind::Erasure,
        ChannelKind::DeclaredCapacity,
        ChannelKind::CustomKraus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Identity => "identity",
            ChannelKind::BitFlip => "bit_flip",
            ChannelKind::PhaseFlip => "phase_flip",
            ChannelKind::BitPhaseFlip => "bit_phase_flip",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::AmplitudeDamping => "amplitude_damping",
            ChannelKind::Dephasing => "dephasing",
            ChannelKind::Erasure => "erasure",
            ChannelKind::DeclaredCapacity => "declared_capacity",
            ChannelKind::CustomKraus => "custom_kraus",
        }
    }

    fn allowed_params(self) -> &'static [&'static str] {
        match self {
            ChannelKind::Identity | ChannelKind::CustomKraus | ChannelKind::DeclaredCapacity => &[],
            ChannelKind::Dephasing => &["p", "gamma"],
            _ => &["p"],
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidChannel(format!("unknown channel kind '{s}'")))
    }
}

/// A declarative description of a channel, as read from a channel file.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub params: BTreeMap<String, f64>,
    pub kraus: Option<Vec<ComplexMatrix>>,
    pub private_capacity_bits: Option<f64>,
    pub activation_window: Option<(f64, f64)>,
    pub inner: Option<Box<ChannelSpec>>,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
            kraus: None,
            private_capacity_bits: None,
            activation_window: None,
            inner: None,
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_table(&table)
    }

    fn from_table(table: &toml::Table) -> Result<Self> {
        let kind: ChannelKind = table
            .get("kind")
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::Parse("missing string key 'kind'".into()))?
            .parse()?;
        let mut spec = ChannelSpec::new(kind);
        for (key, value) in table {
            match key.as_str() {
                "kind" => {}
                "kraus" => spec.kraus = Some(parse_kraus(value)?),
                "private_capacity_bits" => spec.private_capacity_bits = Some(as_number(key, value)?),
                "activation_window" => {
                    let arr = value
                        .as_array()
                        .filter(|a| a.len() == 2)
                        .ok_or_else(|| Error::Parse("activation_window must be a two-element array".into()))?;
                    spec.activation_window = Some((as_number(key, &arr[0])?, as_number(key, &arr[1])?));
                }
                "inner" => {
                    let t = value.as_table().ok_or_else(|| Error::Parse("inner must be a table".into()))?;
                    spec.inner = Some(Box::new(Self::from_table(t)?));
                }
                _ => {
                    spec.params.insert(key.clone(), as_number(key, value)?);
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    fn param(&self, name: &str) -> Result<f64> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("{} requires parameter '{name}'", self.kind)))
    }

    fn probability(&self, name: &str) -> Result<f64> {
        let p = self.param(name)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("{name} = {p} outside [0, 1]")));
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let allowed = self.kind.allowed_params();
        if let Some(k) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!("unexpected parameter '{k}' for {}", self.kind)));
        }
        match self.kind {
            ChannelKind::Identity => {}
            ChannelKind::Dephasing => match (self.params.get("p"), self.params.get("gamma")) {
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidParameter("dephasing takes either p or gamma, not both".into()))
                }
                (Some(_), None) => {
                    self.probability("p")?;
                }
                (None, Some(&g)) if g >= 0.0 && g.is_finite() => {}
                (None, Some(&g)) => return Err(Error::InvalidParameter(format!("gamma = {g} must be >= 0"))),
                (None, None) => return Err(Error::InvalidParameter("dephasing requires p or gamma".into())),
            },
            ChannelKind::CustomKraus => {
                if self.kraus.is_none() {
                    return Err(Error::InvalidParameter("custom_kraus requires 'kraus'".into()));
                }
            }
            ChannelKind::DeclaredCapacity => {
                let p = self.private_capacity_bits.ok_or_else(|| {
                    Error::InvalidParameter("declared_capacity requires private_capacity_bits".into())
                })?;
                if !(p >= 0.0 && p.is_finite()) {
                    return Err(Error::InvalidParameter(format!("private_capacity_bits = {p} must be >= 0")));
                }
                if let Some((lo, hi)) = self.activation_window {
                    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                        return Err(Error::InvalidParameter(format!("activation window ({lo}, {hi}) invalid")));
                    }
                }
                if let Some(inner) = &self.inner {
                    inner.validate()?;
                }
            }
            _ => {
                self.probability("p")?;
            }
        }
        Ok(())
    }
}

fn as_number(key: &str, v: &toml::Value) -> Result<f64> {
    v.as_float()
        .or_else(|| v.as_integer().map(|i| i as f64))
        .ok_or_else(|| Error::Parse(format!("'{key}' must be a number")))
}

/// Parses `[[[re, im], ...], ...]` rows for each Kraus operator.
fn parse_kraus(v: &toml::Value) -> Result<Vec<ComplexMatrix>> {
    let err = || Error::Parse("kraus must be a list of matrices of [re, im] pairs".into());
    let mats = v.as_array().ok_or_else(err)?;
    mats.iter()
        .map(|m| {
            let rows = m.as_array().ok_or_else(err)?;
            let mut entries = Vec::new();
            let mut cols = None;
            for row in rows {
                let row = row.as_array().ok_or_else(err)?;
                if *cols.get_or_insert(row.len()) != row.len() {
                    return Err(err());
                }
                for z in row {
                    let pair = z.as_array().filter(|p| p.len() == 2).ok_or_else(err)?;
                    entries.push(c(as_number("kraus", &pair[0])?, as_number("kraus", &pair[1])?));
                }
            }
            crate::qmath::complex_matrix(rows.len(), cols.unwrap_or(0), &entries)
        })
        .collect()
}

/// A channel with a Kraus form, or one known only through declared capacities.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    Kraus(KrausChannel),
    Declared(DeclaredChannel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeclaredChannel {
    pub inner: Option<KrausChannel>,
    pub private_capacity_bits: f64,
    pub activation_window: Option<(f64, f64)>,
}

impl ChannelModel {
    pub fn kraus(&self) -> Option<&KrausChannel> {
        match self {
            ChannelModel::Kraus(k) => Some(k),
            ChannelModel::Declared(d) => d.inner.as_ref(),
        }
    }
}

pub fn build_model(spec: &ChannelSpec) -> Result<ChannelModel> {
    spec.validate()?;
    if spec.kind == ChannelKind::DeclaredCapacity {
        let inner = spec.inner.as_deref().map(build_channel).transpose()?;
        return Ok(ChannelModel::Declared(DeclaredChannel {
            inner,
            private_capacity_bits: spec.private_capacity_bits.unwrap_or(0.0),
            activation_window: spec.activation_window,
        }));
    }
    build_channel(spec).map(ChannelModel::Kraus)
}

/// Builds the Kraus form of a channel description.
pub fn build_channel(spec: &ChannelSpec) -> Result<KrausChannel> {
    spec.validate()?;
    let id = identity(2);
    let scaled = |m: ComplexMatrix, w: f64| m * c(w.sqrt(), 0.0);
    match spec.kind {
        ChannelKind::Identity => KrausChannel::new(vec![id]),
        ChannelKind::BitFlip => pauli_mixture(spec.probability("p")?, pauli_x()),
        ChannelKind::PhaseFlip => pauli_mixture(spec.probability("p")?, pauli_z()),
        ChannelKind::BitPhaseFlip => pauli_mixture(spec.probability("p")?, pauli_y()),
        ChannelKind::Dephasing => {
            let p = match spec.params.get("gamma") {
                Some(&g) => 0.5 * (1.0 - (-g).exp()),
                None => spec.probability("p")?,
            };
            pauli_mixture(p, pauli_z())
        }
        ChannelKind::Depolarizing => {
            let p = spec.probability("p")?;
            KrausChannel::new(vec![
                scaled(id, 1.0 - 0.75 * p),
                scaled(pauli_x(), 0.25 * p),
                scaled(pauli_y(), 0.25 * p),
                scaled(pauli_z(), 0.25 * p),
            ])
        }
        ChannelKind::AmplitudeDamping => {
            let p = spec.probability("p")?;
            let a1 = DMatrix::from_row_slice(2, 2, &[c(p.sqrt(), 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
            let a2 = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c((1.0 - p).sqrt(), 0.), c(0., 0.)]);
            KrausChannel::new(vec![a1, a2])
        }
        ChannelKind::Erasure => {
            let p = spec.probability("p")?;
            let keep = DMatrix::from_fn(3, 2, |i, j| if i == j { c((1.0 - p).sqrt(), 0.0) } else { c(0.0, 0.0) });
            let flag =
                |j: usize| DMatrix::from_fn(3, 2, |i, k| if i == 2 && k == j { c(p.sqrt(), 0.0) } else { c(0.0, 0.0) });
            KrausChannel::new(vec![keep, flag(0), flag(1)])
        }
        ChannelKind::CustomKraus => KrausChannel::new(spec.kraus.clone().unwrap_or_default()),
        ChannelKind::DeclaredCapacity => match &spec.inner {
            Some(inner) => build_channel(inner),
            None => Err(Error::InvalidChannel("declared_capacity channel has no Kraus form".into())),
        },
    }
}

fn pauli_mixture(p: f64, pauli: ComplexMatrix) -> Result<KrausChannel> {
    KrausChannel::new(vec![identity(2) * c((1.0 - p).sqrt(), 0.0), pauli * c(p.sqrt(), 0.0)])
}

/// A classical channel `P(y|x)` embedded with Kraus operators `√P(y|x)·|y⟩⟨x|`.
/// `transition[x][y]` is the probability of output `y` given input `x`.
pub fn classical_channel(transition: &[Vec<f64>]) -> Result<KrausChannel> {
    let din = transition.len();
    let dout = transition.first().map_or(0, Vec::len);
    let mut kraus = Vec::new();
    for (x, row) in transition.iter().enumerate() {
        if row.len() != dout {
            return Err(Error::InvalidChannel("ragged transition matrix".into()));
        }
        for (y, &p) in row.iter().enumerate() {
            if p < 0.0 {
                return Err(Error::InvalidChannel(format!("negative transition probability {p}")));
            }
            if p > 0.0 {
                let mut k = DMatrix::zeros(dout, din);
                k[(y, x)] = c(p.sqrt(), 0.0);
                kraus.push(k);
            }
        }
    }
    KrausChannel::new(kraus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_declared_channel_with_inner() {
        let spec = ChannelSpec::from_toml_str(
            "kind = \"declared_capacity\"\nprivate_capacity_bits = 0.02\nactivation_window = [0.0, 0.0041]\n[inner]\nkind = \"identity\"\n",
        )
        .unwrap();
        assert_eq!(spec.activation_window, Some((0.0, 0.0041)));
        assert!(matches!(build_model(&spec).unwrap(), ChannelModel::Declared(d) if d.inner.is_some()));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ChannelSpec::from_toml_str("kind = \"warp\"").is_err());
        assert!(ChannelSpec::from_toml_str("kind = \"bit_flip\"\np = 1.5").is_err());
        assert!(ChannelSpec::from_toml_str("kind = \"bit_flip\"\nq = 0.5").is_err());
        let declared =
            ChannelSpec::from_toml_str("kind = \"declared_capacity\"\nprivate_capacity_bits = 0.02").unwrap();
        assert!(matches!(build_channel(&declared), Err(Error::InvalidChannel(_))));
    }

    #[test]
    fn parses_custom_kraus() {
        let spec = ChannelSpec::from_toml_str(
            "kind = \"custom_kraus\"\nkraus = [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]\n",
        )
        .unwrap();
        let ch = build_channel(&spec).unwrap();
        assert_eq!((ch.in_dim(), ch.out_dim()), (2, 2));
    }
}
