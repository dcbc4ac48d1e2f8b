//! JSON input files read by the subcommands.

use std::path::Path;

use ncdg_core::bundle::Instance;
use ncdg_core::encoding::MatrixJson;
use ncdg_core::reduction::ReductionDescriptor;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::report::CliError;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError {
        kind: "parse".into(),
        message: format!("{}: {e}", path.display()),
        exit_code: 2,
    })
}

/// Starting field for the vacuum search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    /// All fields zero plus noise.
    Zero,
    /// `b_k = scale · E_k`, the defining representation, plus noise.
    Defining,
    /// `b_k = −scale · E_kᵀ`, plus noise.
    Dual,
    /// Noise only, with amplitude `scale`.
    Random,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    pub kind: InitialKind,
    #[serde(default = "one")]
    pub scale: f64,
    /// Amplitude of the Gaussian noise added to `b` at every site.
    #[serde(default)]
    pub noise: f64,
    /// Amplitude of the noise added to the gauge field.
    #[serde(default)]
    pub gauge_noise: f64,
}

fn one() -> f64 {
    1.0
}

fn default_steps() -> usize {
    5000
}

fn default_action_tol() -> f64 {
    1e-12
}

/// Configuration of `ymh-minimize`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YmhConfig {
    pub n: usize,
    pub d: usize,
    /// Sites per axis.
    #[serde(rename = "N")]
    pub sites: usize,
    /// Lattice spacing.
    pub h: f64,
    pub m: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    pub initial: InitialCondition,
    #[serde(default)]
    pub b_only: bool,
    #[serde(default = "default_steps")]
    pub max_steps: usize,
    #[serde(default = "default_action_tol")]
    pub action_tol: f64,
}

fn default_n() -> usize {
    2
}

fn default_samples() -> usize {
    120
}

fn default_pairs() -> usize {
    100
}

fn default_curvature_pairs() -> usize {
    10
}

fn default_scale() -> f64 {
    0.5
}

/// Descriptor of `bundle-check`: base manifold, sampling density, and the
/// transition function `g₁₂` given by its rank and charge.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDescriptor {
    pub instance: Instance,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "one")]
    pub charge: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_curvature_pairs")]
    pub curvature_pairs: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_rank() -> usize {
    1
}

/// Analytic gauge fields understood by `chern`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldSpec {
    /// Instanton on `R^4` of size `rho`.
    Bpst {
        #[serde(default = "one")]
        rho: f64,
        #[serde(default)]
        center: [f64; 4],
    },
    /// Abelian vortex on `R^2` embedded in `U(rank)`.
    Vortex {
        #[serde(default = "one")]
        charge: f64,
        #[serde(default = "one")]
        rho: f64,
        #[serde(default = "default_rank")]
        rank: usize,
        #[serde(default)]
        traceless: bool,
    },
    /// Zero curvature.
    Flat { dim: usize, rank: usize },
}

/// Optional action of `k ⊕ z0` for `reduce`; omitted matrices mean the
/// trivial action.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetrySpec {
    #[serde(default)]
    pub k_dim: usize,
    #[serde(default)]
    pub z0_dim: usize,
    #[serde(default)]
    pub on_matrices: Option<Vec<MatrixJson>>,
    #[serde(default)]
    pub on_lm: Option<Vec<Vec<Vec<f64>>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReduceInput {
    #[serde(flatten)]
    pub data: ReductionDescriptor,
    #[serde(default)]
    pub symmetry: SymmetrySpec,
}
