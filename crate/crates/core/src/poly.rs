//! Dense univariate polynomial utilities. Coefficients are stored in ascending
//! order: `c[k]` multiplies `x^k`.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Error-free product: `a*b = p + e` exactly.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Error-free sum: `a+b = s + e` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Compensated Horner evaluation, as accurate as Horner in twice the working
/// precision.
pub fn comp_horner(coeffs: &[f64], x: f64) -> f64 {
    let Some((&last, rest)) = coeffs.split_last() else {
        return 0.0;
    };
    let mut s = last;
    let mut correction = 0.0;
    for &c in rest.iter().rev() {
        let (p, pe) = two_prod(s, x);
        let (t, se) = two_sum(p, c);
        s = t;
        correction = correction * x + (pe + se);
    }
    s + correction
}

pub fn horner_complex(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Drops leading (highest-degree) coefficients that are zero or negligible
/// relative to `scale`.
fn trim(mut p: Vec<f64>, scale: f64) -> Vec<f64> {
    while p.last().is_some_and(|c| c.abs() <= scale) {
        p.pop();
    }
    p
}

fn max_abs(p: &[f64]) -> f64 {
    p.iter().fold(0.0, |m, c| m.max(c.abs()))
}

fn normalized(p: Vec<f64>) -> Vec<f64> {
    let m = max_abs(&p);
    if m == 0.0 {
        p
    } else {
        p.into_iter().map(|c| c / m).collect()
    }
}

/// Remainder of `num / den`.
fn remainder(num: &[f64], den: &[f64]) -> Vec<f64> {
    let mut r = num.to_vec();
    let dl = den.len();
    let lead = den[dl - 1];
    while r.len() >= dl {
        let q = r[r.len() - 1] / lead;
        let shift = r.len() - dl;
        for (i, &d) in den.iter().enumerate() {
            r[shift + i] -= q * d;
        }
        r.pop();
    }
    r
}

/// Sturm chain `p, p', -rem(p, p'), …` with every member rescaled to unit
/// max-norm. Remainder coefficients below `1e-11` of their dividend's scale are
/// treated as zero.
pub fn sturm_chain(p: &[f64]) -> Vec<Vec<f64>> {
    let p0 = normalized(trim(p.to_vec(), 0.0));
    let p1 = normalized(trim(derivative(&p0), 0.0));
    let mut chain = vec![p0];
    if p1.is_empty() {
        return chain;
    }
    chain.push(p1);
    loop {
        let n = chain.len();
        if chain[n - 1].len() <= 1 {
            break;
        }
        let r = remainder(&chain[n - 2], &chain[n - 1]);
        let r = trim(r, 1e-11);
        if r.is_empty() {
            break;
        }
        chain.push(normalized(r.into_iter().map(|c| -c).collect()));
    }
    chain
}

pub fn sign_changes(chain: &[Vec<f64>], x: f64) -> usize {
    let mut count = 0;
    let mut prev = 0.0f64;
    for p in chain {
        let v = comp_horner(p, x);
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            count += 1;
        }
        prev = v;
    }
    count
}

/// Cauchy bound on the modulus of every root.
pub fn cauchy_bound(p: &[f64]) -> f64 {
    let lead = p[p.len() - 1].abs();
    1.0 + p[..p.len() - 1]
        .iter()
        .fold(0.0f64, |m, c| m.max(c.abs() / lead))
}

/// Bisects a sign change of `p` on `[lo, hi]` down to adjacent floats.
fn bisect_sign_change(p: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = comp_horner(p, lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = comp_horner(p, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All distinct real roots of `p` in the half-open interval `(lo, hi]`, in
/// ascending order. The interval is split until every piece holds exactly one
/// root according to the Sturm count, and each isolated root is then located
/// by sign-change bisection. Clusters narrower than the working precision are
/// reported once.
pub fn real_roots_in(p: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let p = trim(p.to_vec(), 0.0);
    if p.len() <= 1 {
        return Vec::new();
    }
    let chain = sturm_chain(&p);
    let mut roots = Vec::new();
    let mut stack = vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        let va = sign_changes(&chain, a);
        let vb = sign_changes(&chain, b);
        let count = va.saturating_sub(vb);
        if count == 0 {
            continue;
        }
        let fa = comp_horner(&p, a);
        let fb = comp_horner(&p, b);
        if count == 1 && fa * fb < 0.0 {
            roots.push(bisect_sign_change(&p, a, b));
            continue;
        }
        if count == 1 && fb == 0.0 {
            roots.push(b);
            continue;
        }
        let mid = 0.5 * (a + b);
        if b - a <= 4.0 * f64::EPSILON * b.abs().max(1e-300) || mid <= a || mid >= b {
            roots.push(mid);
            continue;
        }
        stack.push((mid, b));
        stack.push((a, mid));
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Diagonal similarity scaling (powers of two) that equalizes row and column
/// norms, improving eigenvalue accuracy for companion matrices.
pub fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let g = r / radix;
            while cc < g {
                f *= radix;
                cc *= radix * radix;
            }
            let g = r * radix;
            while cc > g {
                f /= radix;
                cc /= radix * radix;
            }
            if (cc + r / f) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Complex roots of a real polynomial from the eigenvalues of its balanced
/// companion matrix, each polished by a few Newton steps.
pub fn complex_roots(p: &[f64]) -> Vec<Complex64> {
    let p = trim(p.to_vec(), 0.0);
    let n = p.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = p[n];
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -p[i] / lead;
    }
    balance(&mut companion);
    let dp = derivative(&p);
    let mut roots: Vec<Complex64> = companion
        .complex_eigenvalues()
        .iter()
        .map(|&z| newton_polish(&p, &dp, z))
        .collect();
    // Real polynomial: snap near-real roots and enforce exact conjugate pairs.
    for z in roots.iter_mut() {
        if z.im.abs() <= 1e-14 * z.norm().max(1.0) {
            z.im = 0.0;
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

fn newton_polish(p: &[f64], dp: &[f64], mut z: Complex64) -> Complex64 {
    let mut fz = horner_complex(p, z).norm();
    for _ in 0..8 {
        let d = horner_complex(dp, z);
        if d.norm() == 0.0 {
            break;
        }
        let step = horner_complex(p, z) / d;
        let trial = z - step;
        let ft = horner_complex(p, trial).norm();
        if ft.is_nan() || ft >= fz {
            break;
        }
        z = trial;
        fz = ft;
    }
    z
}

/// Elementary symmetric polynomials `S_0 = 1, S_1, …, S_n` of `values`.
pub fn elementary_symmetric(values: &[Complex64]) -> Vec<Complex64> {
    let mut s = vec![Complex64::new(0.0, 0.0); values.len() + 1];
    s[0] = Complex64::new(1.0, 0.0);
    for (k, &v) in values.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            let prev = s[j - 1];
            s[j] += v * prev;
        }
    }
    s
}

/// Ascending coefficients of `∏ (a_k u + b_k)`.
pub fn expand_linear_factors(factors: &[(Complex64, Complex64)]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &(a, b) in factors {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k] += ck * b;
            next[k + 1] += ck * a;
        }
        c = next;
    }
    c
}

/// Minimum-cost perfect assignment for a square cost matrix (Hungarian
/// algorithm with potentials). Returns `assign[row] = column`.
pub fn optimal_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if owner[j] > 0 {
            assign[owner[j] - 1] = j - 1;
        }
    }
    assign
}

/// Largest distance between two root sets after optimal matching.
pub fn matched_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "root sets differ in size");
    let key = |z: &Complex64, w: &Complex64| z.re.total_cmp(&w.re).then(z.im.total_cmp(&w.im));
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(key);
    b.sort_by(key);
    let cost: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    optimal_assignment(&cost)
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .fold(0.0, f64::max)
}
