//! Model parameters, closed-form energies and the truncated Fock-space
//! diagonalization that supplies the regular spectrum.
//!
//! The Hamiltonian is `H = Δσz + εσx + ω a†a + g σx (a† + a)`. The matrix is
//! assembled in the basis `|m⟩ ⊗ |s⟩` with `s = ±1` an eigenvalue of σx, so the
//! coupling stays inside each `s` block and Δ links the two blocks at equal `m`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub delta: f64,
    pub epsilon: f64,
    pub omega: f64,
    pub g: f64,
}

impl ModelParams {
    pub fn new(delta: f64, epsilon: f64, omega: f64, g: f64) -> Result<Self> {
        let p = Self {
            delta,
            epsilon,
            omega,
            g,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite()
            && self.epsilon.is_finite()
            && self.omega.is_finite()
            && self.g.is_finite())
        {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParams(format!(
                "g must be non-negative, got {}",
                self.g
            )));
        }
        Ok(())
    }

    pub fn with_g(self, g: f64) -> Self {
        Self { g, ..self }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    /// The asymmetry as seen by a branch: `σε`.
    pub fn branch_epsilon(&self, branch: Branch) -> f64 {
        branch.sign() * self.epsilon
    }
}

/// Solution family: `Plus` is the `e^{-gz/ω}` family with energies
/// `nω − g²/ω + ε`, `Minus` the mirrored `e^{gz/ω}` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "p" => Ok(Branch::Plus),
            "-" | "minus" | "m" => Ok(Branch::Minus),
            _ => Err(Error::InvalidParams(format!("unknown branch `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub params: ModelParams,
    pub truncation: usize,
    pub levels: Vec<EnergyLevel>,
}

impl Spectrum {
    pub fn values(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.value).collect()
    }

    /// Distance from `energy` to the closest level.
    pub fn distance_to(&self, energy: f64) -> f64 {
        self.levels
            .iter()
            .map(|l| (l.value - energy).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Exceptional (Juddian) energy `nω − g²/ω + σε`.
pub fn qes_energy(params: &ModelParams, n: usize, branch: Branch) -> f64 {
    n as f64 * params.omega - params.g * params.g / params.omega + params.branch_epsilon(branch)
}

/// `E + g²/ω`, the rescaled level plotted against the coupling.
pub fn rescaled_level(energy: f64, g: f64, omega: f64) -> f64 {
    energy + g * g / omega
}

/// Parameters of the flux-qubit circuit QED Hamiltonian expressed in AQRM form.
pub fn from_cqed(big_omega: f64, theta: f64, omega: f64, g: f64) -> Result<ModelParams> {
    ModelParams::new(
        0.5 * big_omega * theta.sin(),
        0.5 * big_omega * theta.cos(),
        omega,
        g,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagConfig {
    /// Required headroom between the Fock cutoff and the number of levels.
    pub margin: usize,
    /// Maximum allowed level shift between successive cutoffs.
    pub tolerance: f64,
    pub max_doublings: usize,
}

impl Default for DiagConfig {
    fn default() -> Self {
        Self {
            margin: 50,
            tolerance: 1e-9,
            max_doublings: 2,
        }
    }
}

pub const DEFAULT_TRUNCATION: usize = 200;

/// Real-symmetric matrix of `H` with photon numbers `0..=truncation`.
pub fn hamiltonian_matrix(params: &ModelParams, truncation: usize) -> DMatrix<f64> {
    let dim = 2 * (truncation + 1);
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let idx = |m: usize, s: usize| 2 * m + s;
    for m in 0..=truncation {
        for (s, sign) in [(0, 1.0), (1, -1.0)] {
            let i = idx(m, s);
            h[(i, i)] = params.omega * m as f64 + sign * params.epsilon;
            if m < truncation {
                let j = idx(m + 1, s);
                let c = sign * params.g * ((m + 1) as f64).sqrt();
                h[(i, j)] = c;
                h[(j, i)] = c;
            }
        }
        h[(idx(m, 0), idx(m, 1))] = params.delta;
        h[(idx(m, 1), idx(m, 0))] = params.delta;
    }
    h
}

fn lowest_eigenvalues(params: &ModelParams, truncation: usize, count: usize) -> Vec<f64> {
    let mut values: Vec<f64> = hamiltonian_matrix(params, truncation)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values.truncate(count);
    values
}

/// Lowest `level_count` levels with the default convergence settings.
pub fn regular_spectrum(
    params: &ModelParams,
    level_count: usize,
    truncation: usize,
) -> Result<Spectrum> {
    regular_spectrum_with(params, level_count, truncation, &DiagConfig::default())
}

/// Lowest `level_count` levels. The cutoff is doubled until no level moves by
/// more than `config.tolerance`; the levels of the larger cutoff are returned.
pub fn regular_spectrum_with(
    params: &ModelParams,
    level_count: usize,
    truncation: usize,
    config: &DiagConfig,
) -> Result<Spectrum> {
    params.validate()?;
    if level_count == 0 {
        return Err(Error::InvalidParams("level_count must be positive".into()));
    }
    if truncation < level_count + config.margin {
        return Err(Error::InvalidParams(format!(
            "truncation {truncation} below level_count {level_count} + margin {}",
            config.margin
        )));
    }
    let doublings = config.max_doublings.max(1);
    let mut cutoff = truncation;
    let mut previous = lowest_eigenvalues(params, cutoff, level_count);
    for step in 1..=doublings {
        cutoff *= 2;
        let last = lowest_eigenvalues(params, cutoff, level_count);
        let shift = previous
            .iter()
            .zip(&last)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if shift < config.tolerance {
            return Ok(Spectrum {
                params: *params,
                truncation: cutoff,
                levels: last
                    .into_iter()
                    .enumerate()
                    .map(|(index, value)| EnergyLevel { index, value })
                    .collect(),
            });
        }
        if step == doublings {
            return Err(Error::NonConvergence {
                truncation: cutoff,
                shift,
                tolerance: config.tolerance,
                previous,
                last,
            });
        }
        previous = last;
    }
    unreachable!("loop returns on its final iteration")
}
