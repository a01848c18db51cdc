//! Constraint polynomials `P_n(x, y)` and the coefficient sequence `Q_k` of the
//! truncating series solution.
//!
//! Both recursions carry the branch through `ε → σε`. Roots are isolated in
//! `x = (2g)²`, where the constraint is an honest degree-`n` polynomial, and
//! mapped back with `g = √x / 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{qes_energy, Branch, ModelParams};
use crate::poly;

/// Highest degree whose roots are trusted in double precision.
pub const MAX_STABLE_DEGREE: usize = 12;

/// One exceptional (Juddian) solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QesPoint {
    pub n: usize,
    pub branch: Branch,
    pub g: f64,
    pub energy: f64,
    /// `|P_n|` divided by the magnitude of the terms in its recursion.
    pub constraint_residual: f64,
}

impl QesPoint {
    pub fn params(&self, delta: f64, epsilon: f64, omega: f64) -> ModelParams {
        ModelParams {
            delta,
            epsilon,
            omega,
            g: self.g,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QesSearch {
    pub points: Vec<QesPoint>,
    /// Set when Δ = 0: the degenerate atomic-limit family solves the Q
    /// truncation condition for every g but is not a root of `P_n`.
    pub degenerate_atomic_limit: bool,
}

/// Coefficients of the recursion step `P_k = a_k P_{k-1} - b_k P_{k-2}`, with
/// `a_k = kx + y - k²ω² - 2kεω` split into its `x`-slope and constant part.
fn step(n: usize, k: usize, y: f64, epsilon: f64, omega: f64) -> (f64, f64, f64) {
    let kf = k as f64;
    let slope = kf;
    let constant = y - kf * kf * omega * omega - 2.0 * kf * epsilon * omega;
    let b = kf * (kf - 1.0) * (n as f64 - kf + 1.0) * omega * omega;
    (slope, constant, b)
}

/// `P_n(x, y)` by direct recursion. `epsilon` is the branch-signed asymmetry.
pub fn constraint_poly_eval(n: usize, x: f64, y: f64, epsilon: f64, omega: f64) -> f64 {
    constraint_poly_with_scale(n, x, y, epsilon, omega).0
}

/// `P_n(x, y)` together with the same recursion run on absolute values, which
/// bounds the size of every intermediate term.
pub fn constraint_poly_with_scale(
    n: usize,
    x: f64,
    y: f64,
    epsilon: f64,
    omega: f64,
) -> (f64, f64) {
    let (mut prev, mut prev_abs) = (0.0, 0.0);
    let (mut cur, mut cur_abs) = (1.0, 1.0);
    for k in 1..=n {
        let (slope, constant, b) = step(n, k, y, epsilon, omega);
        let a = slope * x + constant;
        let a_abs = (slope * x).abs() + y.abs() + (constant - y).abs();
        let next = a * cur - b * x * prev;
        let next_abs = a_abs * cur_abs + (b * x).abs() * prev_abs;
        (prev, prev_abs) = (cur, cur_abs);
        (cur, cur_abs) = (next, next_abs);
    }
    (cur, cur_abs)
}

/// Ascending coefficients in `x` of `P_n(x, y)` for fixed `y`.
pub fn constraint_poly_coeffs(n: usize, y: f64, epsilon: f64, omega: f64) -> Result<Vec<f64>> {
    if n > MAX_STABLE_DEGREE {
        return Err(Error::DegreeTooHigh {
            degree: n,
            limit: MAX_STABLE_DEGREE,
        });
    }
    let mut prev: Vec<f64> = Vec::new();
    let mut cur = vec![1.0];
    for k in 1..=n {
        let (slope, constant, b) = step(n, k, y, epsilon, omega);
        let mut next = poly::mul(&cur, &[constant, slope]);
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] -= b * c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

/// All positive couplings at which `P_n((2g)², Δ²) = 0` on the given branch,
/// sorted ascending.
pub fn qes_points(
    delta: f64,
    epsilon: f64,
    omega: f64,
    n: usize,
    branch: Branch,
) -> Result<QesSearch> {
    if n == 0 {
        return Err(Error::InvalidParams("level n must be at least 1".into()));
    }
    ModelParams::new(delta, epsilon, omega, 0.0)?;
    if delta == 0.0 {
        return Ok(QesSearch {
            points: Vec::new(),
            degenerate_atomic_limit: true,
        });
    }
    let y = delta * delta;
    let eps = branch.sign() * epsilon;
    let coeffs = constraint_poly_coeffs(n, y, eps, omega)?;
    let upper = poly::cauchy_bound(&coeffs);
    let points = poly::real_roots_in(&coeffs, 0.0, upper)
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| {
            let g = 0.5 * x.sqrt();
            let (p, scale) = constraint_poly_with_scale(n, x, y, eps, omega);
            let params = ModelParams {
                delta,
                epsilon,
                omega,
                g,
            };
            QesPoint {
                n,
                branch,
                g,
                energy: qes_energy(&params, n, branch),
                constraint_residual: if scale > 0.0 { p.abs() / scale } else { 0.0 },
            }
        })
        .collect();
    Ok(QesSearch {
        points,
        degenerate_atomic_limit: false,
    })
}

/// Scaled constraint residual `|P_n| / scale` at the coupling in `params`.
pub fn scaled_constraint_residual(params: &ModelParams, n: usize, branch: Branch) -> f64 {
    let x = 4.0 * params.g * params.g;
    let (p, scale) = constraint_poly_with_scale(
        n,
        x,
        params.delta * params.delta,
        params.branch_epsilon(branch),
        params.omega,
    );
    if scale > 0.0 {
        p.abs() / scale
    } else {
        0.0
    }
}

/// `Q_0 … Q_{n+1}` with `Q_0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QSequence {
    pub n: usize,
    pub branch: Branch,
    pub values: Vec<f64>,
    pub normalization: f64,
}

impl QSequence {
    /// `Q_{n+1}`, which vanishes exactly when the series truncates.
    pub fn truncation_coefficient(&self) -> f64 {
        self.values[self.n + 1]
    }
}

/// Terms of the recurrence at step `k`: `lead·Q_{k+1} = mid·Q_k + low·Q_{k-1}`.
fn q_step(n: usize, k: usize, params: &ModelParams, eps: f64) -> (f64, f64, f64) {
    let (w, g, d) = (params.omega, params.g, params.delta);
    let (kf, nf) = (k as f64, n as f64);
    let lead = w * (kf + 1.0) * (2.0 * eps + nf * w - kf * w);
    let mid = -(w * w * (2.0 * kf * kf - 2.0 * kf * nf - kf) - 2.0 * kf * eps * w
        + 4.0 * kf * g * g
        + d * d);
    let low = (1.0 - kf) * w * w * (nf - kf + 1.0);
    (lead, mid, low)
}

fn is_resonant(lead: f64, params: &ModelParams, k: usize) -> bool {
    lead.abs() <= 1e-12 * params.omega * params.omega * (k as f64 + 1.0)
}

/// Runs the recurrence up to `Q_last`, returning values and an absolute-value
/// magnitude bound for each.
fn q_recurrence(
    n: usize,
    params: &ModelParams,
    branch: Branch,
    last: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    params.validate()?;
    let eps = params.branch_epsilon(branch);
    let mut q = vec![1.0];
    let mut q_abs = vec![1.0];
    for k in 0..last {
        let (lead, mid, low) = q_step(n, k, params, eps);
        if is_resonant(lead, params, k) {
            return Err(Error::Resonant { k });
        }
        let (qm1, qm1_abs) = if k == 0 {
            (0.0, 0.0)
        } else {
            (q[k - 1], q_abs[k - 1])
        };
        q.push((mid * q[k] + low * qm1) / lead);
        // `mid` collects several terms; bound it by the sum of their sizes.
        let (w, g, d) = (params.omega, params.g, params.delta);
        let kf = k as f64;
        let mid_abs = (w * w * (2.0 * kf * kf - 2.0 * kf * n as f64 - kf)).abs()
            + (2.0 * kf * eps * w).abs()
            + 4.0 * kf * g * g
            + d * d;
        q_abs.push((mid_abs * q_abs[k] + low.abs() * qm1_abs) / lead.abs());
    }
    Ok((q, q_abs))
}

/// `Q_0 … Q_{n+1}` of the branch-signed recurrence, normalized to `Q_0 = 1`.
pub fn q_sequence(n: usize, params: &ModelParams, branch: Branch) -> Result<QSequence> {
    let (values, _) = q_recurrence(n, params, branch, n + 1)?;
    Ok(QSequence {
        n,
        branch,
        values,
        normalization: 1.0,
    })
}

/// `Q_0 … Q_n`, the coefficients of the polynomial `f(u)` at a QES point.
/// Only steps `k < n` are needed, so this stays defined at `ε = 0`.
pub fn q_polynomial(n: usize, params: &ModelParams, branch: Branch) -> Result<Vec<f64>> {
    Ok(q_recurrence(n, params, branch, n)?.0)
}

/// Continues the recurrence to `Q_last`, `last > n + 1`.
pub fn q_sequence_extended(
    n: usize,
    params: &ModelParams,
    branch: Branch,
    last: usize,
) -> Result<Vec<f64>> {
    Ok(q_recurrence(n, params, branch, last)?.0)
}

/// Relative mismatch between `Q_{n+1}` from the recurrence and its
/// closed-form multiple of `P_n((2g)², Δ²)`. Terms are measured against the
/// magnitude bound of each recursion, so the residual stays meaningful where
/// both sides vanish.
pub fn qp_proportionality_residual(n: usize, params: &ModelParams, branch: Branch) -> Result<f64> {
    let (q, q_abs) = q_recurrence(n, params, branch, n + 1)?;
    let lhs = q[n + 1];
    let eps = params.branch_epsilon(branch);
    let w = params.omega;
    let y = params.delta * params.delta;
    let (p, p_abs) = constraint_poly_with_scale(n, 4.0 * params.g * params.g, y, eps, w);
    let mut denom = w.powi(n as i32 + 1) * 2f64.powi(n as i32 + 1);
    for k in 0..=n {
        denom *= (k + 1) as f64 * (eps + k as f64 * w / 2.0);
    }
    let sign = if (n + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let rhs = sign * y * p / denom;
    let rhs_abs = (y * p_abs / denom).abs();
    let scale = lhs.abs().max(rhs.abs()).max(q_abs[n + 1]).max(rhs_abs);
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((lhs - rhs).abs() / scale)
}
