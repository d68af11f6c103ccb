//! Per-subcommand parameters. Each struct is both the subcommand's flag set and the shape
//! of the config file's `params` object; every field is optional and defaults live in `ops`.

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use specflow::diagnostics::{BoxSet, PiecewiseSlice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Alpha,
    Beta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    All,
    Sawtooth,
    Heisenberg,
    Master,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergentsParams {
    /// Rotation coordinate whose expansion is listed [default: alpha]
    #[arg(long)]
    pub coordinate: Option<Which>,
    /// Number of partial quotients [default: 20]
    #[arg(long)]
    pub terms: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PalindromicParams {
    /// Length of the Thue–Morse prefix scanned [default: 64]
    #[arg(long)]
    pub terms: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YoccozParams {
    /// `linear` for γ(n) = n + 1, or `affine:SLOPE,INTERCEPT[,DEN]` [default: linear]
    #[arg(long)]
    pub gamma: Option<String>,
    /// Multiplies γ by an integer [default: 1]
    #[arg(long)]
    pub gamma_scale: Option<u64>,
    /// Levels of the greedy construction [default: 4]
    #[arg(long)]
    pub levels: Option<usize>,
    /// First partial quotient of α [default: 1]
    #[arg(long)]
    pub a1: Option<u64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErgodicityParams {
    /// Search box |k|, |l| ≤ K [default: 50]
    #[arg(long)]
    pub k_max: Option<u32>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BirkhoffParams {
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    /// Largest m [default: 1000]
    #[arg(long)]
    pub m_max: Option<i64>,
    /// Number of evenly spaced m values [default: 20]
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowParams {
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    /// Starting height in the fibre [default: 0]
    #[arg(long)]
    pub s: Option<f64>,
    /// Comma-separated flow times [default: 0,1,10,100]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub times: Option<Vec<f64>>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpSumParams {
    /// Config only: the slice h.
    #[arg(skip)]
    pub slice: Option<PiecewiseSlice>,
    /// Slope of h; overrides the slice's slope [default: 12.5]
    #[arg(long, allow_hyphen_values = true)]
    pub slope: Option<f64>,
    /// Lower bound for |h'| [default: certified from the slice]
    #[arg(long)]
    pub theta: Option<f64>,
    /// Initial Gauss–Kronrod panels per piece [default: 400]
    #[arg(long)]
    pub quad: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakMixingParams {
    /// Comma-separated orders n [default: 50,100,200]
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u64>>,
    /// Comma-separated frequencies s [default: 1,2,5,10]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub s: Option<Vec<f64>>,
    /// Quadrature panels per smooth piece [default: 60]
    #[arg(long)]
    pub quad: Option<usize>,
    /// Monte Carlo cross-check with this many samples [default: off]
    #[arg(long)]
    pub mc_samples: Option<usize>,
    #[arg(long)]
    pub m_probe: Option<u64>,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSetParams {
    /// Fixed y coordinate [default: 0.3]
    #[arg(long)]
    pub y: Option<f64>,
    /// Comma-separated times [default: 50,100]
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    /// Comma-separated tolerances [default: 0.01,0.02]
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// x cells before refinement [default: 2000]
    #[arg(long)]
    pub x_grid: Option<usize>,
    /// Dense-grid cross-check with this many points [default: off]
    #[arg(long)]
    pub dense: Option<usize>,
    #[arg(long)]
    pub m_probe: Option<u64>,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelateParams {
    /// Config only: box A [default: full base, heights below min(2, inf f)]
    #[arg(skip)]
    pub a: Option<BoxSet>,
    /// Config only: box B [default: A]
    #[arg(skip)]
    pub b: Option<BoxSet>,
    /// Comma-separated times [default: 1,10,100,1000]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub times: Option<Vec<f64>>,
    /// Monte Carlo samples [default: 4000]
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidityParams {
    /// Thue–Morse prefix length used to find common denominators [default: 64]
    #[arg(long)]
    pub terms: Option<usize>,
    /// Keep only the first this-many denominators
    #[arg(long)]
    pub count: Option<usize>,
    /// Explicit comma-separated denominators (required with a custom rotation)
    #[arg(long, value_delimiter = ',')]
    pub denominators: Option<Vec<String>>,
    /// Sampled base points [default: 1000]
    #[arg(long)]
    pub sample: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionParams {
    #[arg(long)]
    pub terms: Option<usize>,
    /// Which common denominator l_k to use, counting from 0 [default: 2]
    #[arg(long)]
    pub index: Option<usize>,
    /// Explicit l; overrides --index
    #[arg(long)]
    pub l: Option<String>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FayadParams {
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub gamma_scale: Option<u64>,
    /// Level n; partitions η_{2n} and η_{2n+1} [default: 2]
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m_samples: Option<usize>,
    #[arg(long)]
    pub cell_samples: Option<usize>,
    #[arg(long)]
    pub transverse_samples: Option<usize>,
    /// Walk every m in each window
    #[arg(long)]
    pub exhaustive: Option<bool>,
    #[arg(long)]
    pub m_probe: Option<u64>,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingsParams {
    #[arg(long)]
    pub x: Option<f64>,
    /// x' = x + d [default: 1e-3]
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<f64>,
    /// Horizon [default: 40/|d|]
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Minimum gap [default: C₁/|d| from the cocycle model]
    #[arg(long)]
    pub a: Option<f64>,
    /// Maximum gap [default: C₂/|d| from the cocycle model]
    #[arg(long)]
    pub b: Option<f64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityParams {
    #[arg(long)]
    pub kind: Option<KindArg>,
    /// Random (p, q, n) inputs [default: 1000]
    #[arg(long)]
    pub inputs: Option<usize>,
    #[arg(long)]
    pub n_max: Option<u64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessParams {
    /// Random pairs [default: 100]
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Requested ε; clamped to the model's cap [default: 0.1]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Pair distances are log-uniform in [d_min, d_max] [default: 1e-5]
    #[arg(long)]
    pub d_min: Option<f64>,
    /// [default: 1e-3]
    #[arg(long)]
    pub d_max: Option<f64>,
    /// Segment count N [default: 2]
    #[arg(long)]
    pub n: Option<u64>,
}
