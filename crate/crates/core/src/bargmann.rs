//! Second-order ODEs of the Bargmann picture and their Frobenius series about
//! the regular singular points `z = ±g/ω`.

use crate::error::{Error, Result};
use crate::model::{Branch, ModelParams};

/// `(ω²z² − g²)φ″ + Q(z)φ′ + R(z)φ = 0`, with `Q` quadratic and `R` linear
/// (ascending coefficients).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BargmannOde {
    pub branch: Branch,
    pub omega: f64,
    pub g: f64,
    pub first: [f64; 3],
    pub zeroth: [f64; 2],
}

pub fn bargmann_ode(params: &ModelParams, energy: f64, branch: Branch) -> BargmannOde {
    let ModelParams {
        delta,
        epsilon: eps,
        omega: w,
        g,
    } = *params;
    let e = energy;
    let base = e * e - delta * delta - eps * eps - g.powi(4) / (w * w);
    let (first, zeroth) = match branch {
        Branch::Plus => (
            [
                g / w * (2.0 * g * g - w * w - 2.0 * eps * w),
                w * w - 2.0 * g * g - 2.0 * e * w,
                -2.0 * g * w,
            ],
            [
                base + 2.0 * eps * g * g / w,
                2.0 * g * (g * g / w + e - eps),
            ],
        ),
        Branch::Minus => (
            [
                -g / w * (2.0 * g * g - w * w + 2.0 * eps * w),
                w * w - 2.0 * g * g - 2.0 * e * w,
                2.0 * g * w,
            ],
            [
                base - 2.0 * eps * g * g / w,
                -2.0 * g * (g * g / w + e + eps),
            ],
        ),
    };
    BargmannOde {
        branch,
        omega: w,
        g,
        first,
        zeroth,
    }
}

impl BargmannOde {
    pub fn second_coeff(&self, z: f64) -> f64 {
        self.omega * self.omega * z * z - self.g * self.g
    }

    pub fn first_coeff(&self, z: f64) -> f64 {
        self.first[0] + z * (self.first[1] + z * self.first[2])
    }

    pub fn zeroth_coeff(&self, z: f64) -> f64 {
        self.zeroth[0] + z * self.zeroth[1]
    }

    pub fn residual(&self, z: f64, phi: f64, dphi: f64, d2phi: f64) -> f64 {
        self.second_coeff(z) * d2phi + self.first_coeff(z) * dphi + self.zeroth_coeff(z) * phi
    }

    /// Adds `shift` to the constant part of the zeroth-order coefficient.
    pub fn with_zeroth_shift(mut self, shift: f64) -> Self {
        self.zeroth[0] += shift;
        self
    }

    /// Regular singular points `(g/ω, −g/ω)`.
    pub fn singular_points(&self) -> (f64, f64) {
        (self.g / self.omega, -self.g / self.omega)
    }

    /// Nonzero indicial exponent at the singular point `z0`.
    pub fn other_exponent(&self, z0: f64) -> f64 {
        1.0 - self.first_coeff(z0) / (2.0 * self.omega * self.omega * z0)
    }

    /// Exponent-zero Frobenius series about `z0 = ±g/ω`.
    pub fn frobenius(&self, z0: f64) -> FrobeniusSeries {
        self.frobenius_with_exponent(z0, 0)
    }

    /// Frobenius series `t^r Σ a_k t^k` about `z0`; `r` must be an indicial
    /// exponent (0, or [`other_exponent`](Self::other_exponent) when that is
    /// a positive integer).
    pub fn frobenius_with_exponent(&self, z0: f64, exponent: u32) -> FrobeniusSeries {
        let [_, f1, f2] = self.first;
        FrobeniusSeries {
            z0,
            exponent,
            omega: self.omega,
            lead: 2.0 * self.omega * self.omega * z0,
            q: [self.first_coeff(z0), f1 + 2.0 * f2 * z0, f2],
            r: [self.zeroth_coeff(z0), self.zeroth[1]],
            r0_scale: self.zeroth[0].abs() + (z0 * self.zeroth[1]).abs(),
        }
    }
}

/// Coefficients of `Σ a_k t^k`, `t = z − z0`, built term by term.
#[derive(Debug, Clone, Copy)]
pub struct FrobeniusSeries {
    pub z0: f64,
    pub exponent: u32,
    omega: f64,
    lead: f64,
    q: [f64; 3],
    r: [f64; 2],
    /// Magnitude of the terms summed into `r[0]`.
    r0_scale: f64,
}

/// Outcome of the recursion at a step whose leading factor vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    /// Index `k + 1` of the coefficient that cannot be formed.
    pub index: usize,
    /// Numerator of the offending step relative to the size of its terms;
    /// zero means the log term is absent.
    pub relative_numerator: f64,
}

impl FrobeniusSeries {
    const MAX_TERMS: usize = 600;

    fn numerator(&self, k: usize, ak: f64, akm1: f64) -> (f64, f64) {
        let (w2, kf) = (self.omega * self.omega, (k as u32 + self.exponent) as f64);
        let t1 = ak * (w2 * kf * (kf - 1.0) + self.q[1] * kf + self.r[0]);
        let t2 = akm1 * (self.q[2] * (kf - 1.0) + self.r[1]);
        let size = ak.abs() * (w2 * kf * (kf - 1.0) + (self.q[1] * kf).abs() + self.r0_scale)
            + akm1.abs() * ((self.q[2] * (kf - 1.0)).abs() + self.r[1].abs());
        (-(t1 + t2), size)
    }

    fn den_scale(&self) -> f64 {
        self.lead.abs().max(self.q[0].abs())
    }

    fn denominator(&self, k: usize) -> f64 {
        let kr = (k as u32 + self.exponent) as f64;
        (kr + 1.0) * (self.lead * kr + self.q[0])
    }

    /// Value and derivative at offset `t`, or an error when a leading factor
    /// vanishes before convergence.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let (s, ds) = self.eval_series(t)?;
        if self.exponent == 0 {
            return Ok((s, ds));
        }
        let r = self.exponent as i32;
        let tr = t.powi(r);
        Ok((tr * s, r as f64 * t.powi(r - 1) * s + tr * ds))
    }

    fn eval_series(&self, t: f64) -> Result<(f64, f64)> {
        let (mut akm1, mut ak) = (0.0, 1.0);
        let (mut val, mut der) = (1.0, 0.0);
        let mut tp = 1.0; // t^k
        let mut small = 0;
        for k in 0..Self::MAX_TERMS {
            let den = self.denominator(k);
            let (num, size) = self.numerator(k, ak, akm1);
            if den.abs() <= 1e-14 * (k as f64 + 1.0) * self.den_scale() {
                if num.abs() <= 1e-12 * size.max(f64::MIN_POSITIVE) {
                    // Log-free resonance: the free coefficient is set to zero.
                    (akm1, ak) = (ak, 0.0);
                    tp *= t;
                    continue;
                }
                return Err(Error::Range(format!(
                    "Frobenius recursion resonant at term {}",
                    k + 1
                )));
            }
            let next = num / den;
            der += (k as f64 + 1.0) * next * tp;
            tp *= t;
            let term = next * tp;
            val += term;
            (akm1, ak) = (ak, next);
            let converged = term.abs() <= 1e-17 * val.abs().max(1e-300)
                && (term * (k as f64 + 2.0)).abs() <= 1e-17 * der.abs().max(1.0);
            if converged {
                small += 1;
                if small >= 3 {
                    return Ok((val, der));
                }
            } else {
                small = 0;
            }
        }
        Err(Error::Range("Frobenius series did not converge".into()))
    }

    /// Relative size of the numerator at the first vanishing leading factor,
    /// if any occurs within `max_index` terms.
    pub fn resonance(&self, max_index: usize) -> Option<Resonance> {
        let (mut akm1, mut ak) = (0.0, 1.0);
        for k in 0..max_index {
            let den = self.denominator(k);
            let (num, size) = self.numerator(k, ak, akm1);
            if den.abs() <= 1e-9 * (k as f64 + 1.0) * self.den_scale() {
                return Some(Resonance {
                    index: k + 1,
                    relative_numerator: num.abs() / size.max(f64::MIN_POSITIVE),
                });
            }
            (akm1, ak) = (ak, num / den);
        }
        None
    }
}

/// Exponents of the gauge linking the Bargmann solution to the Schrödinger
/// wavefunction: `φ = (c−1)^p (c+1)^q e^{s(g²/ω²)c} Ψ` with `c = cosh x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gauge {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub kappa: f64,
}

pub fn gauge(params: &ModelParams, energy: f64, branch: Branch) -> Gauge {
    let (e, eps, w, g) = (energy, params.epsilon, params.omega, params.g);
    let a = 2.0 * e * w + 2.0 * eps * w + 2.0 * g * g;
    let b = 2.0 * e * w - 2.0 * eps * w + 2.0 * g * g;
    let (sp, s) = match branch {
        Branch::Plus => (1.0, 1.0),
        Branch::Minus => (-1.0, -1.0),
    };
    Gauge {
        p: (a + sp * w * w) / (4.0 * w * w),
        q: (b - sp * w * w) / (4.0 * w * w),
        s,
        kappa: g * g / (w * w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::qes_points;
    use crate::model::qes_energy;

    #[test]
    fn product_solution_solves_the_ode() {
        // φ = z + 3.8 at the first Juddian point.
        let p = ModelParams::new(1.2, 0.3, 1.0, 0.2).unwrap();
        let ode = bargmann_ode(&p, 1.26, Branch::Plus);
        for z in [-2.0, 0.1, 0.7, 3.0] {
            assert!(ode.residual(z, z + 3.8, 1.0, 0.0).abs() < 1e-13);
        }
    }

    #[test]
    fn minus_branch_mirrors_plus() {
        let p = ModelParams::new(0.9, 0.27, 1.3, 0.45).unwrap();
        let e = 0.77;
        let plus = bargmann_ode(&p, e, Branch::Plus);
        let minus = bargmann_ode(&p.with_epsilon(-0.27), e, Branch::Minus);
        // z → −z maps the plus equation onto the mirrored minus equation.
        assert!((plus.first[0] + minus.first[0]).abs() < 1e-14);
        assert!((plus.first[1] - minus.first[1]).abs() < 1e-14);
        assert!((plus.first[2] + minus.first[2]).abs() < 1e-14);
        assert!((plus.zeroth[0] - minus.zeroth[0]).abs() < 1e-14);
        assert!((plus.zeroth[1] + minus.zeroth[1]).abs() < 1e-14);
    }

    #[test]
    fn frobenius_series_solves_the_ode() {
        let p = ModelParams::new(1.2, 0.3, 1.0, 0.7).unwrap();
        for branch in Branch::BOTH {
            let ode = bargmann_ode(&p, 0.413, branch);
            let (zp, zm) = ode.singular_points();
            for z0 in [zp, zm] {
                let s = ode.frobenius(z0);
                let t = -0.3 * z0;
                let h = 1e-4;
                let (f, df) = s.eval(t).unwrap();
                let (fp, dfp) = s.eval(t + h).unwrap();
                let (fm, dfm) = s.eval(t - h).unwrap();
                let d2 = (dfp - dfm) / (2.0 * h);
                assert!(((fp - fm) / (2.0 * h) - df).abs() < 1e-7 * df.abs().max(1.0));
                let r = ode.residual(z0 + t, f, df, d2);
                assert!(r.abs() < 1e-7, "{branch} {z0}: {r}");
            }
        }
    }

    #[test]
    fn larger_exponent_series_solves_the_ode() {
        // Off the constraint the exponent-n solution about −g/ω carries no log.
        let p = ModelParams::new(1.2, 0.3, 1.0, 0.5).unwrap();
        let e = qes_energy(&p, 2, Branch::Plus);
        let ode = bargmann_ode(&p, e, Branch::Plus);
        let (_, zm) = ode.singular_points();
        let rho = ode.other_exponent(zm);
        assert!((rho - 2.0).abs() < 1e-12);
        let s = ode.frobenius_with_exponent(zm, 2);
        let (t, h) = (0.2, 1e-4);
        let (f, df) = s.eval(t).unwrap();
        let (_, dfp) = s.eval(t + h).unwrap();
        let (_, dfm) = s.eval(t - h).unwrap();
        let r = ode.residual(zm + t, f, df, (dfp - dfm) / (2.0 * h));
        assert!(r.abs() < 1e-7 * f.abs().max(1e-3), "{r}");
        assert!(ode.frobenius(zm).resonance(4).unwrap().relative_numerator > 1e-6);
    }

    #[test]
    fn juddian_energies_are_log_free_resonances() {
        for n in 1..=4 {
            for pt in qes_points(1.2, 0.3, 1.0, n, Branch::Plus).unwrap().points {
                let p = pt.params(1.2, 0.3, 1.0);
                let e = qes_energy(&p, n, Branch::Plus);
                let ode = bargmann_ode(&p, e, Branch::Plus);
                let (_, zm) = ode.singular_points();
                assert!((ode.other_exponent(zm) - n as f64).abs() < 1e-12);
                let res = ode.frobenius(zm).resonance(n + 2).unwrap();
                assert_eq!(res.index, n);
                assert!(res.relative_numerator < 1e-10, "n={n} g={} {:?}", pt.g, res);
            }
        }
    }

    #[test]
    fn gauge_matches_qes_exponents() {
        // At E = nω − g²/ω + ε the plus gauge reduces to the QES exponents.
        let p = ModelParams::new(1.2, 0.3, 1.0, 0.2).unwrap();
        let gp = gauge(&p, qes_energy(&p, 1, Branch::Plus), Branch::Plus);
        assert!((gp.p - 0.25 * (2.0 + 1.0 + 1.2)).abs() < 1e-14);
        assert!((gp.q - 0.25 * (2.0 - 1.0)).abs() < 1e-14);
    }
}
