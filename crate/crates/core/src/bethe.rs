//! Bethe ansatz roots of the exceptional states and their Gaudin parameters.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constraint::{q_polynomial, scaled_constraint_residual, QSequence};
use crate::error::{Error, Result};
use crate::model::{Branch, ModelParams};
use crate::poly;

/// Accepted scaled constraint residual for parameters claimed to be a QES point.
pub const QES_POINT_TOLERANCE: f64 = 1e-8;
/// Accepted max Bethe residual of a solved root set.
pub const BETHE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheRoots {
    pub n: usize,
    pub branch: Branch,
    pub params: ModelParams,
    pub roots: Vec<Complex64>,
    pub residual_norm: f64,
    /// Δ = 0: every root sits on the pole `ωz = −σg`, so the rational
    /// equations are not evaluated.
    pub degenerate_atomic_limit: bool,
}

impl BetheRoots {
    pub fn root_sum(&self) -> Complex64 {
        self.roots.iter().sum()
    }
}

fn pole_strengths(params: &ModelParams, n: usize, branch: Branch) -> (f64, f64) {
    let w = params.omega;
    let nf = n as f64;
    (
        nf * w * w + 2.0 * params.branch_epsilon(branch) * w,
        nf * w * w - w * w,
    )
}

fn check_roots(roots: &[Complex64], params: &ModelParams, branch: Branch) -> Result<()> {
    let sg = branch.sign() * params.g;
    let scale = roots
        .iter()
        .fold(params.g / params.omega, |m, z| m.max(z.norm()));
    let tiny = 1e-14 * scale.max(1e-300);
    for (i, &zi) in roots.iter().enumerate() {
        for (j, &zj) in roots.iter().enumerate().skip(i + 1) {
            if (zi - zj).norm() <= tiny {
                return Err(Error::CoincidentRoots { i, j });
            }
        }
        for pole in [sg / params.omega, -sg / params.omega] {
            if (zi - pole).norm() <= tiny {
                return Err(Error::PoleCollision { index: i, pole });
            }
        }
    }
    Ok(())
}

/// Residual of each Bethe equation, written for the branch sign `σ`.
pub fn bethe_residuals(
    roots: &[Complex64],
    params: &ModelParams,
    n: usize,
    branch: Branch,
) -> Result<Vec<Complex64>> {
    check_roots(roots, params, branch)?;
    let (a, b) = pole_strengths(params, n, branch);
    let (w, sg) = (params.omega, branch.sign() * params.g);
    Ok(roots
        .iter()
        .enumerate()
        .map(|(i, &zi)| {
            let pair: Complex64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| 2.0 * w / (zi - zj))
                .sum();
            pair - (a / (w * zi - sg) + b / (w * zi + sg) + 2.0 * sg)
        })
        .collect())
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// `|Δ² + 2ng² + 2σωg Σz_i|`.
pub fn constraint_sum_residual(
    roots: &[Complex64],
    params: &ModelParams,
    n: usize,
    branch: Branch,
) -> f64 {
    let sum: Complex64 = roots.iter().sum();
    let g = params.g;
    (params.delta * params.delta
        + 2.0 * n as f64 * g * g
        + 2.0 * branch.sign() * params.omega * g * sum)
        .norm()
}

fn jacobian(
    roots: &[Complex64],
    params: &ModelParams,
    n: usize,
    branch: Branch,
) -> DMatrix<Complex64> {
    let (a, b) = pole_strengths(params, n, branch);
    let (w, sg) = (params.omega, branch.sign() * params.g);
    let m = roots.len();
    let mut jac = DMatrix::<Complex64>::zeros(m, m);
    for i in 0..m {
        let zi = roots[i];
        let mut diag =
            a * w / ((w * zi - sg) * (w * zi - sg)) + b * w / ((w * zi + sg) * (w * zi + sg));
        for j in 0..m {
            if j != i {
                let d = zi - roots[j];
                let t = 2.0 * w / (d * d);
                diag -= t;
                jac[(i, j)] = t;
            }
        }
        jac[(i, i)] = diag;
    }
    jac
}

/// Damped Newton iteration on the Bethe equations from `seed`.
pub fn solve_bethe_newton(
    params: &ModelParams,
    n: usize,
    branch: Branch,
    seed: &[Complex64],
) -> Result<Vec<Complex64>> {
    const MAX_ITER: usize = 100;
    let mut z = seed.to_vec();
    let mut res = bethe_residuals(&z, params, n, branch)?;
    let mut norm = max_norm(&res);
    for _ in 0..MAX_ITER {
        if norm < 1e-13 {
            break;
        }
        let jac = jacobian(&z, params, n, branch);
        let rhs = DVector::from_iterator(res.len(), res.iter().map(|r| -r));
        let Some(step) = jac.lu().solve(&rhs) else {
            break;
        };
        let mut damping = 1.0;
        let mut improved = false;
        while damping > 1e-6 {
            let trial: Vec<Complex64> = z
                .iter()
                .zip(step.iter())
                .map(|(zi, s)| zi + s * damping)
                .collect();
            if let Ok(r) = bethe_residuals(&trial, params, n, branch) {
                let tn = max_norm(&r);
                if tn < norm {
                    (z, res, norm) = (trial, r, tn);
                    improved = true;
                    break;
                }
            }
            damping *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if norm < BETHE_TOLERANCE {
        Ok(z)
    } else {
        Err(Error::NewtonFailed {
            residual: norm,
            best: z,
        })
    }
}

/// Roots of the QES factor at a Juddian point, from the coefficient
/// polynomial `f(u) = Σ Q_k u^k` and the map `z = −σ(g/ω)(u+1)/(u−1)`.
pub fn solve_bethe(params: &ModelParams, n: usize, branch: Branch) -> Result<BetheRoots> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidParams("level n must be at least 1".into()));
    }
    let sgw = branch.sign() * params.g / params.omega;
    let degenerate = params.delta == 0.0;
    if !degenerate {
        let residual = scaled_constraint_residual(params, n, branch);
        if residual > QES_POINT_TOLERANCE {
            return Err(Error::NotAtQesPoint { residual });
        }
    }
    let q = q_polynomial(n, params, branch)?;
    let scale = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut degree = n;
    while degree > 0 && q[degree].abs() <= 1e-13 * scale {
        degree -= 1;
    }
    let u_roots = poly::complex_roots(&q[..=degree]);
    let mut roots = Vec::with_capacity(n);
    for (index, u) in u_roots.iter().enumerate() {
        if (u - 1.0).norm() < 1e-12 {
            return Err(Error::MapSingularity { index });
        }
        roots.push(-sgw * (u + 1.0) / (u - 1.0));
    }
    // Roots of f at infinity land on the atomic-limit point.
    roots.resize(n, Complex64::new(-sgw, 0.0));
    if degenerate {
        return Ok(BetheRoots {
            n,
            branch,
            params: *params,
            roots,
            residual_norm: 0.0,
            degenerate_atomic_limit: true,
        });
    }
    let mut residual_norm = max_norm(&bethe_residuals(&roots, params, n, branch)?);
    if residual_norm > 1e-13 {
        if let Ok(polished) = solve_bethe_newton(params, n, branch, &roots) {
            let r = max_norm(&bethe_residuals(&polished, params, n, branch)?);
            let size = roots.iter().fold(1.0f64, |m, z| m.max(z.norm()));
            if r < residual_norm && poly::matched_distance(&polished, &roots) < 1e-6 * size {
                roots = polished;
                residual_norm = r;
            }
        }
    }
    sort_roots(&mut roots);
    if residual_norm > BETHE_TOLERANCE {
        return Err(Error::Inconsistent {
            check: "bethe_residual",
            value: residual_norm,
            tolerance: BETHE_TOLERANCE,
        });
    }
    Ok(BetheRoots {
        n,
        branch,
        params: *params,
        roots,
        residual_norm,
        degenerate_atomic_limit: false,
    })
}

/// Sorts by real part, then imaginary part.
pub fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Parameters of the Gaudin-type system reproducing one branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaudinParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub gamma: f64,
    pub m: usize,
    pub v: Vec<Complex64>,
    pub cal_e: f64,
}

impl GaudinParams {
    /// Branch table for level `n` with the given `v_j` and `𝓔 = A Σ v_j`.
    pub fn for_branch(params: &ModelParams, n: usize, branch: Branch, v: Vec<Complex64>) -> Self {
        let (g, w) = (params.g, params.omega);
        let nf = n as f64;
        let two_eps = 2.0 * params.epsilon / w;
        let (a, b, c) = match branch {
            Branch::Plus => (-2.0 * g / w, nf + two_eps, nf - 1.0),
            Branch::Minus => (2.0 * g / w, nf - 1.0, nf - two_eps),
        };
        let cal_e = a * v.iter().sum::<Complex64>().re;
        Self {
            a,
            b,
            c,
            gamma: 2.0 * g / w,
            m: v.len(),
            v,
            cal_e,
        }
    }

    /// Residuals of the Gaudin form `A + B/(v+γ/2) + C/(v−γ/2) − Σ 2/(v_j−v_k)`.
    pub fn residuals(&self) -> Vec<Complex64> {
        let h = 0.5 * self.gamma;
        self.v
            .iter()
            .enumerate()
            .map(|(j, &vj)| {
                let pair: Complex64 = self
                    .v
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &vk)| 2.0 / (vj - vk))
                    .sum();
                self.a + self.b / (vj + h) + self.c / (vj - h) - pair
            })
            .collect()
    }
}

/// `−Δ²/ω² − 2ng²/ω²`.
pub fn exceptional_cal_e(params: &ModelParams, n: usize) -> f64 {
    let w2 = params.omega * params.omega;
    -(params.delta * params.delta) / w2 - 2.0 * n as f64 * params.g * params.g / w2
}

pub fn to_gaudin(roots: &BetheRoots) -> Result<GaudinParams> {
    let v = roots.roots.iter().map(|z| -z).collect();
    let gp = GaudinParams::for_branch(&roots.params, roots.n, roots.branch, v);
    let expected = exceptional_cal_e(&roots.params, roots.n);
    let tolerance = 1e-8 * expected.abs().max(1.0);
    let value = (gp.cal_e - expected).abs();
    if value > tolerance {
        return Err(Error::Inconsistent {
            check: "gaudin_energy",
            value,
            tolerance,
        });
    }
    Ok(gp)
}

/// Coefficients `Q_0 … Q_n` rebuilt from the roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RootsQ {
    pub sequence: QSequence,
    /// Some root sits at the atomic-limit point, so the product form was
    /// replaced by direct expansion of the linear factors.
    pub degenerate_factor: bool,
}

pub fn q_from_roots(roots: &BetheRoots) -> RootsQ {
    let p = &roots.params;
    let (g, w) = (p.g, p.omega);
    let s = roots.branch.sign();
    let n = roots.n;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    // Mirror the minus branch onto the plus-branch convention.
    let z: Vec<Complex64> = roots.roots.iter().map(|&zk| s * zk).collect();
    let scale = g / w + z.iter().fold(0.0f64, |m, zk| m.max(zk.norm()));
    let degenerate = z.iter().any(|&zk| (g / w + zk).norm() <= 1e-12 * scale);
    let coeffs: Vec<Complex64> = if degenerate {
        let factors: Vec<(Complex64, Complex64)> =
            z.iter().map(|&zk| (g / w + zk, g / w - zk)).collect();
        poly::expand_linear_factors(&factors)
            .into_iter()
            .map(|c| c * sign / w)
            .collect()
    } else {
        let ratios: Vec<Complex64> = z.iter().map(|&zk| (g - w * zk) / (g + w * zk)).collect();
        let sym = poly::elementary_symmetric(&ratios);
        let prod: Complex64 = z.iter().map(|&zk| g / w + zk).product();
        (0..=n).map(|k| sym[n - k] * prod * sign / w).collect()
    };
    let values: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
    RootsQ {
        sequence: QSequence {
            n,
            branch: roots.branch,
            normalization: values[0],
            values,
        },
        degenerate_factor: degenerate,
    }
}

/// Largest difference between two coefficient lists after scaling each to a
/// unit constant term.
pub fn normalized_q_distance(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().min(b.len());
    let (na, nb) = (a[0], b[0]);
    (0..len).fold(0.0, |m, k| m.max((a[k] / na - b[k] / nb).abs()))
}
