//! Numerical checks of the Schrödinger picture: finite-difference residuals of
//! closed-form triples, the connection eigensolver that recovers the regular
//! spectrum, and a finite-difference oracle for regular potentials.

mod connection;
mod fd;
mod residual;

pub use connection::{
    connection_wronskian, eigenvalue_scan, pole_energies, shooting_scan, shooting_wronskian,
    Certificate, ConnectionConfig, ConnectionResult, ScanReport, Seed,
};
pub use fd::{fd_eigensolve, Boundary, MESH_TOLERANCE};
pub use residual::{residual_check, PlainWavefunction, SplitWavefunction};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Branch, ModelParams};

/// Uniform grid on `[x_min, x_max]` with `x_min > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub points: Vec<f64>,
}

impl Grid {
    pub fn uniform(x_min: f64, x_max: f64, count: usize) -> Result<Self> {
        if !(x_min > 0.0 && x_max > x_min && x_max.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "grid needs 0 < x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidParams(
                "grid needs at least two points".into(),
            ));
        }
        let h = (x_max - x_min) / (count - 1) as f64;
        let points = (0..count).map(|i| x_min + i as f64 * h).collect();
        Ok(Self {
            x_min,
            x_max,
            points,
        })
    }
}

impl Default for Grid {
    /// `[0.3, 6]` with 200 points.
    fn default() -> Self {
        Self::uniform(0.3, 6.0, 200).expect("valid default grid")
    }
}

/// `ℓ` with `V ≈ ℓ(ℓ+1)/x²` as `x → 0`: `E/ω + g²/ω² + ε/ω ± ½`.
pub fn indicial_exponent(params: &ModelParams, energy: f64, branch: Branch) -> f64 {
    let (eps, w, g) = (params.epsilon, params.omega, params.g);
    energy / w + g * g / (w * w) + eps / w + 0.5 * branch.sign()
}
