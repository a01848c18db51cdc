//! Three-point finite-difference eigenvalues of `−ψ″ + Vψ`, located by Sturm
//! bisection on the tridiagonal matrix and Richardson-extrapolated in `h²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// `ψ = 0` at both ends.
    Dirichlet,
    /// `ψ′ = 0` at the left end (the symmetry point), `ψ = 0` at the right.
    EvenParity,
}

/// Agreement required between the extrapolants from `(N, 2N)` and `(2N, 4N)`.
pub const MESH_TOLERANCE: f64 = 1e-6;

/// Symmetric tridiagonal matrix: `diag[i]` and squared off-diagonals
/// `off2[i]` between rows `i` and `i + 1`.
struct Tridiagonal {
    diag: Vec<f64>,
    off2: Vec<f64>,
}

impl Tridiagonal {
    fn build(v: &impl Fn(f64) -> f64, a: f64, b: f64, boundary: Boundary, mesh: usize) -> Self {
        let h = (b - a) / mesh as f64;
        let inv = 1.0 / (h * h);
        let (first, count) = match boundary {
            Boundary::Dirichlet => (1, mesh - 1),
            Boundary::EvenParity => (0, mesh),
        };
        let diag = (0..count)
            .map(|i| 2.0 * inv + v(a + (first + i) as f64 * h))
            .collect();
        let mut off2 = vec![inv * inv; count.saturating_sub(1)];
        if boundary == Boundary::EvenParity && !off2.is_empty() {
            // Ghost point ψ_{−1} = ψ_1 doubles the coupling in the first row;
            // the similarity transform keeps the product of off-diagonals.
            off2[0] = 2.0 * inv * inv;
        }
        Self { diag, off2 }
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in self.diag.iter().enumerate() {
            let prev = if i == 0 { 0.0 } else { self.off2[i - 1] / d };
            d = a - x - prev;
            if d == 0.0 {
                d = -f64::EPSILON * (a.abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off2[i - 1].sqrt() } else { 0.0 }
                + if i + 1 < n { self.off2[i].sqrt() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue.
    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn raw_eigenvalues(
    v: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    boundary: Boundary,
    count: usize,
    mesh: usize,
) -> Vec<f64> {
    let m = Tridiagonal::build(v, a, b, boundary, mesh);
    (0..count).map(|k| m.eigenvalue(k)).collect()
}

/// Lowest `count` eigenvalues on `(a, b)` at mesh `mesh`, extrapolated with the
/// doubled mesh. A second extrapolant from `(2·mesh, 4·mesh)` must agree to
/// [`MESH_TOLERANCE`]; the finer one is returned.
pub fn fd_eigensolve(
    v: impl Fn(f64) -> f64,
    interval: (f64, f64),
    boundary: Boundary,
    count: usize,
    mesh: usize,
) -> Result<Vec<f64>> {
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidParams(format!("bad interval ({a}, {b})")));
    }
    if count == 0 || mesh < 4 * count + 4 {
        return Err(Error::InvalidParams(format!(
            "mesh {mesh} too small for {count} eigenvalues"
        )));
    }
    for i in 0..=mesh {
        let x = a + (b - a) * i as f64 / mesh as f64;
        if !v(x).is_finite() {
            return Err(Error::Range(format!("potential not finite at x = {x}")));
        }
    }
    let e1 = raw_eigenvalues(&v, a, b, boundary, count, mesh);
    let e2 = raw_eigenvalues(&v, a, b, boundary, count, 2 * mesh);
    let e4 = raw_eigenvalues(&v, a, b, boundary, count, 4 * mesh);
    let coarse: Vec<f64> = e1
        .iter()
        .zip(&e2)
        .map(|(x1, x2)| (4.0 * x2 - x1) / 3.0)
        .collect();
    let fine: Vec<f64> = e2
        .iter()
        .zip(&e4)
        .map(|(x2, x4)| (4.0 * x4 - x2) / 3.0)
        .collect();
    let gap = coarse
        .iter()
        .zip(&fine)
        .fold(0.0f64, |m, (c, f)| m.max((c - f).abs()));
    if gap > MESH_TOLERANCE {
        return Err(Error::MeshTooCoarse { gap });
    }
    Ok(fine)
}
