use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::hermitian::HermitianForm;
use crate::monge_ampere::SolverConfig;
use crate::torus::{PotentialField, TorusGrid};

/// One trigonometric term `cos_coef·cos(2π k·x) + sin_coef·sin(2π k·x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigMode {
    /// Integer frequency per real axis `(x_1, y_1, …, x_n, y_n)`.
    pub k: Vec<i64>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Right-hand side of a standalone Monge-Ampère solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DensitySpec {
    Constant {
        value: f64,
    },
    /// Node values in row-major grid order.
    Values {
        values: Vec<f64>,
    },
    Trig {
        #[serde(default)]
        constant: f64,
        modes: Vec<TrigMode>,
    },
    /// `exp(g)` for a seeded random band-limited `g` with `max |g| = amplitude`.
    Perturbed {
        amplitude: f64,
    },
}

/// Randomly drawn metrics `γ`, optionally conformally perturbed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomGammas {
    pub count: usize,
    /// Amplitude of the log conformal factor; `0` keeps `γ` constant.
    #[serde(default)]
    pub perturbation: f64,
    /// Perturb only every other metric, starting with the second.
    #[serde(default)]
    pub alternate: bool,
}

/// Scenario file consumed by `solve-ma`, `verify-estimate` and `dual-test`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub alpha: Option<HermitianForm<f64>>,
    #[serde(default)]
    pub beta: Option<HermitianForm<f64>>,
    #[serde(default)]
    pub omega: Option<HermitianForm<f64>>,
    #[serde(default)]
    pub eps: Option<Vec<f64>>,
    /// Explicit constant metrics.
    #[serde(default)]
    pub gamma: Vec<HermitianForm<f64>>,
    #[serde(default)]
    pub random_gammas: Option<RandomGammas>,
    /// Background form of `solve-ma` (identity if absent).
    #[serde(default)]
    pub background: Option<HermitianForm<f64>>,
    #[serde(default)]
    pub density: Option<DensitySpec>,
    #[serde(default)]
    pub solver: Option<SolverConfig<f64>>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read scenario {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Usage(format!("malformed scenario {}: {e}", path.display())))
    }
}

impl DensitySpec {
    pub fn sample(&self, grid: &Arc<TorusGrid<f64>>, seed: u64) -> Result<PotentialField<f64>> {
        match self {
            DensitySpec::Constant { value } => {
                Ok(PotentialField::from_fn(grid.clone(), |_| *value))
            }
            DensitySpec::Values { values } => {
                if values.len() != grid.nodes() {
                    return usage(format!(
                        "field `density.values` has {} entries, grid has {} nodes",
                        values.len(),
                        grid.nodes()
                    ));
                }
                PotentialField::new(grid.clone(), values.clone())
            }
            DensitySpec::Trig { constant, modes } => {
                if let Some(m) = modes.iter().find(|m| m.k.len() != grid.real_axes()) {
                    return usage(format!(
                        "field `density.modes[].k` must have {} entries, got {}",
                        grid.real_axes(),
                        m.k.len()
                    ));
                }
                let two_pi = 2.0 * std::f64::consts::PI;
                Ok(PotentialField::from_fn(grid.clone(), |x| {
                    modes.iter().fold(*constant, |acc, m| {
                        let phase =
                            two_pi * m.k.iter().zip(x).map(|(k, xi)| *k as f64 * xi).sum::<f64>();
                        acc + m.cos * phase.cos() + m.sin * phase.sin()
                    })
                }))
            }
            DensitySpec::Perturbed { amplitude } => {
                let mut rng = crate::hermitian::seeded_rng(seed);
                let g = crate::estimate::random_log_factor(grid, *amplitude, &mut rng);
                PotentialField::new(grid.clone(), g.values().iter().map(|v| v.exp()).collect())
            }
        }
    }
}
