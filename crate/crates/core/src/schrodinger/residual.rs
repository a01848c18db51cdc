//! Finite-difference residual of `−Ψ″ + VΨ = 𝓔Ψ` for wavefunctions that span
//! many orders of magnitude.

use super::Grid;
use crate::error::{Error, Result};
use crate::potentials::ProductWavefunction;

/// `Ψ = e^{L(x)} F(x)` with a smooth log-gauge `L` and a tame factor `F`.
pub trait SplitWavefunction {
    fn log_gauge(&self, x: f64) -> Result<f64>;
    fn factor(&self, x: f64) -> Result<f64>;

    /// `L(x + dx) − L(x)`; override when plain subtraction cancels badly.
    fn log_gauge_diff(&self, x: f64, dx: f64) -> Result<f64> {
        Ok(self.log_gauge(x + dx)? - self.log_gauge(x)?)
    }
}

impl SplitWavefunction for ProductWavefunction {
    fn log_gauge(&self, x: f64) -> Result<f64> {
        ProductWavefunction::log_gauge(self, x)
    }

    fn factor(&self, x: f64) -> Result<f64> {
        ProductWavefunction::factor(self, x)
    }

    fn log_gauge_diff(&self, x: f64, dx: f64) -> Result<f64> {
        if x <= 0.0 || x + dx <= 0.0 {
            return Err(Error::SingularPoint);
        }
        let c = x.cosh();
        let cm = 2.0 * (0.5 * x).sinh().powi(2);
        let dc = 2.0 * (x + 0.5 * dx).sinh() * (0.5 * dx).sinh();
        Ok(-self.p * (dc / cm).ln_1p() - self.q * (dc / (c + 1.0)).ln_1p() + self.kappa * dc)
    }
}

/// A wavefunction given directly by its values.
pub struct PlainWavefunction<F: Fn(f64) -> f64>(pub F);

impl<F: Fn(f64) -> f64> SplitWavefunction for PlainWavefunction<F> {
    fn log_gauge(&self, _x: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn factor(&self, x: f64) -> Result<f64> {
        Ok((self.0)(x))
    }
}

const D2_WEIGHTS: [f64; 7] = [
    1.0 / 90.0,
    -3.0 / 20.0,
    3.0 / 2.0,
    -49.0 / 18.0,
    3.0 / 2.0,
    -3.0 / 20.0,
    1.0 / 90.0,
];

/// `Ψ″(x) e^{−L(x)}` by sixth-order central differences.
fn scaled_second_derivative(psi: &impl SplitWavefunction, x: f64, h: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (j, w) in D2_WEIGHTS.iter().enumerate() {
        let dx = (j as f64 - 3.0) * h;
        let rel = if j == 3 {
            0.0
        } else {
            psi.log_gauge_diff(x, dx)?
        };
        acc += w * rel.exp() * psi.factor(x + dx)?;
    }
    Ok(acc / (h * h))
}

/// Residual at `x` scaled by `e^{−L(x)}`, with one Richardson step.
fn scaled_residual(
    v: &impl Fn(f64) -> Result<f64>,
    psi: &impl SplitWavefunction,
    cal_e: f64,
    x: f64,
    h: f64,
) -> Result<f64> {
    let coarse = scaled_second_derivative(psi, x, h)?;
    let fine = scaled_second_derivative(psi, x, 0.5 * h)?;
    let d2 = (64.0 * fine - coarse) / 63.0;
    Ok(-d2 + (v(x)? - cal_e) * psi.factor(x)?)
}

/// `max |−Ψ″ + VΨ − 𝓔Ψ| / max |Ψ|` over the grid.
///
/// The step starts at `1e-3` and is halved until the maximum settles; the
/// smallest maximum seen is returned.
pub fn residual_check(
    v: impl Fn(f64) -> Result<f64>,
    psi: &impl SplitWavefunction,
    cal_e: f64,
    grid: &Grid,
) -> Result<f64> {
    let range_err = |x: f64| {
        Error::Range(format!(
            "wavefunction not representable at x = {x}; use a narrower grid"
        ))
    };
    let mut logs = Vec::with_capacity(grid.points.len());
    for &x in &grid.points {
        let l = psi.log_gauge(x)?;
        if !l.is_finite() {
            return Err(range_err(x));
        }
        logs.push(l);
    }
    let log_max = grid
        .points
        .iter()
        .zip(&logs)
        .map(|(&x, l)| Ok(l + psi.factor(x)?.abs().ln()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if !log_max.is_finite() {
        return Err(range_err(grid.x_min));
    }
    let sweep = |h: f64| -> Result<f64> {
        let mut worst = 0.0f64;
        for (&x, &l) in grid.points.iter().zip(&logs) {
            if x - 3.0 * h <= 0.0 {
                return Err(Error::SingularPoint);
            }
            let r = scaled_residual(&v, psi, cal_e, x, h)?;
            worst = worst.max(r.abs() * (l - log_max).exp());
        }
        if worst.is_finite() {
            Ok(worst)
        } else {
            Err(range_err(grid.x_max))
        }
    };
    let mut h = 1e-3;
    let mut prev = sweep(h)?;
    let mut best = prev;
    for _ in 0..6 {
        h *= 0.5;
        let next = sweep(h)?;
        best = best.min(next);
        if next >= prev || (prev - next) <= 0.1 * next {
            break;
        }
        prev = next;
    }
    Ok(best)
}
