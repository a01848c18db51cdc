//! Hyperbolic Schrödinger potentials and wavefunctions equivalent to the
//! AQRM: the Gaudin pair, the QES Pöschl-Teller pair and the full pair that
//! carries the regular energy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::GaudinParams;
use crate::error::{Error, Result};
use crate::model::{Branch, ModelParams};

/// Largest `|x|` evaluated directly; `sinh² x` overflows soon after.
pub const MAX_ABS_X: f64 = 350.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    #[default]
    PartialFraction,
    Hyperbolic,
}

impl std::str::FromStr for Form {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "partial_fraction" | "partial-fraction" | "pf" => Ok(Form::PartialFraction),
            "hyperbolic" | "hyp" => Ok(Form::Hyperbolic),
            _ => Err(Error::InvalidParams(format!("unknown form `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Gaudin,
    Qes,
    Full,
}

impl std::str::FromStr for PotentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaudin" => Ok(PotentialKind::Gaudin),
            "qes" => Ok(PotentialKind::Qes),
            "full" => Ok(PotentialKind::Full),
            _ => Err(Error::InvalidParams(format!(
                "unknown potential kind `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub branch: Branch,
    pub params: ModelParams,
    pub n: Option<usize>,
    pub energy: Option<f64>,
    pub gaudin: Option<GaudinParams>,
}

impl PotentialSpec {
    pub fn gaudin(params: ModelParams, branch: Branch, gp: GaudinParams) -> Self {
        Self {
            kind: PotentialKind::Gaudin,
            branch,
            params,
            n: None,
            energy: None,
            gaudin: Some(gp),
        }
    }

    pub fn qes(params: ModelParams, branch: Branch, n: usize) -> Self {
        Self {
            kind: PotentialKind::Qes,
            branch,
            params,
            n: Some(n),
            energy: None,
            gaudin: None,
        }
    }

    pub fn full(params: ModelParams, branch: Branch, energy: f64) -> Self {
        Self {
            kind: PotentialKind::Full,
            branch,
            params,
            n: None,
            energy: Some(energy),
            gaudin: None,
        }
    }

    /// Checks that exactly the fields required by `kind` are present.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let ok = match self.kind {
            PotentialKind::Gaudin => {
                self.gaudin.is_some() && self.n.is_none() && self.energy.is_none()
            }
            PotentialKind::Qes => {
                self.n.is_some() && self.gaudin.is_none() && self.energy.is_none()
            }
            PotentialKind::Full => {
                self.energy.is_some() && self.n.is_none() && self.gaudin.is_none()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "fields do not match potential kind {:?}",
                self.kind
            )))
        }
    }

    pub fn eval(&self, x: f64, form: Form) -> Result<f64> {
        self.validate()?;
        match self.kind {
            PotentialKind::Gaudin => gaudin_potential(self.gaudin.as_ref().unwrap(), x),
            PotentialKind::Qes => {
                qes_potential(&self.params, self.n.unwrap(), self.branch, x, form)
            }
            PotentialKind::Full => {
                full_potential(&self.params, self.energy.unwrap(), self.branch, x, form)
            }
        }
    }
}

/// `cosh x − 1`, `cosh x + 1`, `sinh² x` and `cosh x`, rejecting `x = 0`
/// and overflow.
fn hyperbolic_parts(x: f64) -> Result<(f64, f64, f64, f64)> {
    if x == 0.0 {
        return Err(Error::SingularPoint);
    }
    if !x.is_finite() || x.abs() > MAX_ABS_X {
        return Err(Error::Range(format!(
            "|x| = {} exceeds {MAX_ABS_X}",
            x.abs()
        )));
    }
    let sh = (0.5 * x).sinh();
    let ch = (0.5 * x).cosh();
    let minus = 2.0 * sh * sh;
    let plus = 2.0 * ch * ch;
    Ok((minus, plus, x.sinh().powi(2), x.cosh()))
}

/// Potential of the Gaudin-type system with `M = v.len()` roots.
pub fn gaudin_potential(gp: &GaudinParams, x: f64) -> Result<f64> {
    let (cm, cp, s2, c) = hyperbolic_parts(x)?;
    let GaudinParams {
        a, b, c: cc, gamma, ..
    } = *gp;
    let m = gp.v.len() as f64;
    let ag = a * gamma;
    Ok(m * (m - 1.0 - b - cc + 0.5 * ag * c)
        + 0.25 * (b + cc + 1.0).powi(2)
        + ag * ag / 16.0 * s2
        + 0.25 * ag * (cc - b)
        - 0.25 * ag * (b + cc) * c
        + (2.0 * b + 1.0) * (2.0 * b + 3.0) / (8.0 * cm)
        - (2.0 * cc + 1.0) * (2.0 * cc + 3.0) / (8.0 * cp))
}

/// `log|Ψ|` and `sign Ψ` of `(c−1)^{-p} (c+1)^{-q} e^{κc} ∏(hc + v_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductWavefunction {
    pub p: f64,
    pub q: f64,
    pub kappa: f64,
    pub half_gamma: f64,
    pub v: Vec<Complex64>,
}

impl ProductWavefunction {
    /// Smooth prefactor `−p log(c−1) − q log(c+1) + κc`.
    pub fn log_gauge(&self, x: f64) -> Result<f64> {
        let (cm, cp, _, c) = hyperbolic_parts(x)?;
        Ok(-self.p * cm.ln() - self.q * cp.ln() + self.kappa * c)
    }

    /// Polynomial factor `∏(hc + v_j)`; conjugate pairs make it real.
    pub fn factor(&self, x: f64) -> Result<f64> {
        let (_, _, _, c) = hyperbolic_parts(x)?;
        Ok(self
            .v
            .iter()
            .map(|&vj| self.half_gamma * c + vj)
            .product::<Complex64>()
            .re)
    }

    /// `(log|Ψ|, sign Ψ)`; the log is `−∞` at a node.
    pub fn log_value(&self, x: f64) -> Result<(f64, f64)> {
        let f = self.factor(x)?;
        Ok((self.log_gauge(x)? + f.abs().ln(), f.signum()))
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        let (log, sign) = self.log_value(x)?;
        if log > 709.0 {
            return Err(Error::Range(format!("wavefunction overflows at x = {x}")));
        }
        Ok(sign * log.exp())
    }
}

pub fn gaudin_product(gp: &GaudinParams) -> ProductWavefunction {
    ProductWavefunction {
        p: 0.5 * gp.b + 0.25,
        q: 0.5 * gp.c + 0.25,
        kappa: 0.25 * gp.a * gp.gamma,
        half_gamma: 0.5 * gp.gamma,
        v: gp.v.clone(),
    }
}

pub fn gaudin_wavefunction(gp: &GaudinParams, x: f64) -> Result<f64> {
    gaudin_product(gp).value(x)
}

/// The QES Pöschl-Teller potential of level `n`.
pub fn qes_potential(
    params: &ModelParams,
    n: usize,
    branch: Branch,
    x: f64,
    form: Form,
) -> Result<f64> {
    let (cm, cp, s2, c) = hyperbolic_parts(x)?;
    let (eps, w, g) = (params.epsilon, params.omega, params.g);
    let (e, k2, k4) = (eps / w, g * g / (w * w), g.powi(4) / w.powi(4));
    let nf = n as f64;
    let v = match (branch, form) {
        (Branch::Plus, Form::PartialFraction) => {
            e * e + k4 * s2 + k2 * (1.0 - c) + 2.0 * k2 * e * (1.0 + c)
                - (4.0 * nf * nf - 1.0) / (8.0 * cp)
                + (2.0 * nf + 1.0 + 4.0 * e) * (2.0 * nf + 3.0 + 4.0 * e) / (8.0 * cm)
        }
        (Branch::Minus, Form::PartialFraction) => {
            e * e + k4 * s2 + k2 * (1.0 + c) - 2.0 * k2 * e * (1.0 - c)
                + (4.0 * nf * nf - 1.0) / (8.0 * cm)
                - (2.0 * nf + 1.0 - 4.0 * e) * (2.0 * nf + 3.0 - 4.0 * e) / (8.0 * cp)
        }
        (Branch::Plus, Form::Hyperbolic) => {
            e * e + k2 * (1.0 + 2.0 * e) - k2 * (1.0 - 2.0 * e) * c
                + k4 * s2
                + 0.25 * ((2.0 * nf + 1.0).powi(2) + 8.0 * e * (1.0 + nf + e)) / s2
                + 0.5 * (2.0 * nf + 1.0 + 4.0 * e * (1.0 + nf + e)) * c / s2
        }
        (Branch::Minus, Form::Hyperbolic) => {
            e * e
                + k2 * (1.0 - 2.0 * e)
                + k2 * (1.0 + 2.0 * e) * c
                + k4 * s2
                + 0.25 * ((2.0 * nf + 1.0).powi(2) - 8.0 * e * (1.0 + nf - e)) / s2
                - 0.5 * (2.0 * nf + 1.0 - 4.0 * e * (1.0 + nf - e)) * c / s2
        }
    };
    Ok(v)
}

/// Product form of the QES wavefunction of level `n` with roots `v_j`.
pub fn qes_product(
    params: &ModelParams,
    n: usize,
    branch: Branch,
    v: &[Complex64],
) -> ProductWavefunction {
    let (w, g) = (params.omega, params.g);
    let e = params.epsilon / w;
    let nf = n as f64;
    let (p, q) = match branch {
        Branch::Plus => (0.25 * (2.0 * nf + 1.0 + 4.0 * e), 0.25 * (2.0 * nf - 1.0)),
        Branch::Minus => (0.25 * (2.0 * nf - 1.0), 0.25 * (2.0 * nf + 1.0 - 4.0 * e)),
    };
    ProductWavefunction {
        p,
        q,
        kappa: -branch.sign() * g * g / (w * w),
        half_gamma: g / w,
        v: v.to_vec(),
    }
}

pub fn qes_wavefunction(
    params: &ModelParams,
    n: usize,
    branch: Branch,
    v: &[Complex64],
    x: f64,
) -> Result<f64> {
    if v.len() != n {
        return Err(Error::InvalidParams(format!(
            "expected {n} roots, got {}",
            v.len()
        )));
    }
    qes_product(params, n, branch, v).value(x)
}

/// Coefficients of `1/(cosh x − 1)` and `1/(cosh x + 1)` in the full potential.
fn full_pole_coefficients(params: &ModelParams, energy: f64, branch: Branch) -> (f64, f64) {
    let (eps, w, g) = (params.epsilon, params.omega, params.g);
    let w2 = w * w;
    let a = 2.0 * energy * w + 2.0 * eps * w + 2.0 * g * g;
    let b = 2.0 * energy * w - 2.0 * eps * w + 2.0 * g * g;
    let d = 8.0 * w2 * w2;
    match branch {
        Branch::Plus => ((a + 3.0 * w2) * (a + w2) / d, (b + w2) * (b - w2) / d),
        Branch::Minus => ((a + w2) * (a - w2) / d, (b + 3.0 * w2) * (b + w2) / d),
    }
}

/// Coefficients of `csch² x` and `coth x csch x` in the full potential.
pub fn full_hyperbolic_coefficients(
    params: &ModelParams,
    energy: f64,
    branch: Branch,
) -> (f64, f64) {
    let (eps, w, g) = (params.epsilon, params.omega, params.g);
    let s = branch.sign();
    let shifted = energy + g * g / w + 0.5 * w;
    (
        (shifted * shifted + eps * eps + s * eps * w) / (w * w),
        (2.0 * eps / w + s) * (energy * w + g * g + 0.5 * w * w) / (w * w),
    )
}

/// Branch-dependent smooth part shared by every full and QES potential.
fn smooth_part(params: &ModelParams, branch: Branch, s2: f64, c: f64) -> f64 {
    let (eps, w, g) = (params.epsilon, params.omega, params.g);
    let (e, k2) = (eps / w, g * g / (w * w));
    let s = branch.sign();
    e * e + k2 * (1.0 + 2.0 * s * e) - s * k2 * (1.0 - 2.0 * s * e) * c + k2 * k2 * s2
}

/// The generalised Pöschl-Teller potential carrying the regular energy `E`.
pub fn full_potential(
    params: &ModelParams,
    energy: f64,
    branch: Branch,
    x: f64,
    form: Form,
) -> Result<f64> {
    let (cm, cp, s2, c) = hyperbolic_parts(x)?;
    let (eps, w, g) = (params.epsilon, params.omega, params.g);
    let (e, k2, k4) = (eps / w, g * g / (w * w), g.powi(4) / w.powi(4));
    Ok(match form {
        Form::PartialFraction => {
            let (minus, plus) = full_pole_coefficients(params, energy, branch);
            let base = match branch {
                Branch::Plus => e * e + k4 * s2 + k2 * (1.0 - c) + 2.0 * k2 * e * (1.0 + c),
                Branch::Minus => e * e + k4 * s2 + k2 * (1.0 + c) - 2.0 * k2 * e * (1.0 - c),
            };
            base + minus / cm - plus / cp
        }
        Form::Hyperbolic => {
            let (csch2, coth_csch) = full_hyperbolic_coefficients(params, energy, branch);
            smooth_part(params, branch, s2, c) + (csch2 + coth_csch * c) / s2
        }
    })
}

/// The full potential continued to `x = iθ`, `0 < θ < π`.
pub fn full_potential_on_segment(
    params: &ModelParams,
    energy: f64,
    branch: Branch,
    theta: f64,
) -> f64 {
    let (minus, plus) = full_pole_coefficients(params, energy, branch);
    let c = theta.cos();
    let sin = theta.sin();
    // cosθ − 1 and cosθ + 1 without cancellation near the ends.
    let cm = -2.0 * (0.5 * theta).sin().powi(2);
    let cp = 2.0 * (0.5 * theta).cos().powi(2);
    smooth_part(params, branch, -sin * sin, c) + minus / cm - plus / cp
}

/// `𝓔_±(E) = −2Eg²/ω³ − 2g⁴/ω⁴ − Δ²/ω² ± 2g²ε/ω³`.
pub fn full_energy(params: &ModelParams, energy: f64, branch: Branch) -> f64 {
    let (d, eps, w, g) = (params.delta, params.epsilon, params.omega, params.g);
    -2.0 * energy * g * g / w.powi(3) - 2.0 * g.powi(4) / w.powi(4) - d * d / (w * w)
        + branch.sign() * 2.0 * g * g * eps / w.powi(3)
}

/// `P(z) y″ + [Q(z) − (n−1)/2 P′(z)] y′ + [R − n/2 Q′(z) + n(n−1)/12 P″] y = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalQesForm {
    pub n: usize,
    pub branch: Branch,
    pub energy: f64,
    pub p_coeffs: Vec<f64>,
    pub q_coeffs: Vec<f64>,
    pub r: f64,
}

impl CanonicalQesForm {
    /// Ascending coefficients of the equation's `y″`, `y′` and `y` terms.
    pub fn ode_coefficients(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let nf = self.n as f64;
        let p = &self.p_coeffs;
        let q = &self.q_coeffs;
        let first = vec![
            q[0] - 0.5 * (nf - 1.0) * p[1],
            q[1] - (nf - 1.0) * p[2],
            q[2],
        ];
        let zeroth = vec![
            self.r - 0.5 * nf * q[1] + nf * (nf - 1.0) / 6.0 * p[2],
            -nf * q[2],
        ];
        (p.clone(), first, zeroth)
    }
}

pub fn canonical_qes_form(
    params: &ModelParams,
    n: usize,
    branch: Branch,
    energy: f64,
) -> CanonicalQesForm {
    let ModelParams {
        delta,
        epsilon: eps,
        omega: w,
        g,
    } = *params;
    let nf = n as f64;
    let s = branch.sign();
    let q_coeffs = vec![
        -s * g / w * (w * w + 2.0 * s * eps * w - 2.0 * g * g),
        -(nf * w * w + 2.0 * s * eps * w),
        -s * 2.0 * g * w,
    ];
    let r = nf * nf * w * w / 3.0 + nf * w * w / 6.0 + s * nf * eps * w
        - 2.0 * nf * g * g
        - delta * delta;
    CanonicalQesForm {
        n,
        branch,
        energy,
        p_coeffs: vec![-g * g, 0.0, w * w],
        q_coeffs,
        r,
    }
}

/// The other spinor component from the first-order relation, given `φ` and
/// `φ′` at `z`.
pub fn partner_component(
    params: &ModelParams,
    energy: f64,
    branch: Branch,
    phi: impl Fn(f64) -> (f64, f64),
    z: f64,
) -> Result<f64> {
    if params.delta == 0.0 {
        return Err(Error::UndefinedPartner);
    }
    let (w, g, eps) = (params.omega, params.g, params.epsilon);
    let (f, df) = phi(z);
    let bracket = match branch {
        Branch::Plus => (w * z + g) * df - (g * g / w + energy - eps) * f,
        Branch::Minus => (w * z - g) * df - (g * g / w + energy + eps) * f,
    };
    Ok(-bracket / params.delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KkConstants {
    pub q: f64,
    pub lambda: f64,
    pub b_kk: f64,
    pub two_j: f64,
    pub l: f64,
    pub a_free: f64,
}

/// Constants of the hypergeometric-type QES equation reproducing the plus
/// branch under `t = (g + ωz)/(2g)`.
pub fn kk_constants(params: &ModelParams, energy: f64, a_free: f64) -> Result<KkConstants> {
    if a_free == 0.0 || !a_free.is_finite() {
        return Err(Error::InvalidParams(
            "A_free must be finite and nonzero".into(),
        ));
    }
    let ModelParams {
        delta,
        epsilon: eps,
        omega: w,
        g,
    } = *params;
    let e = energy;
    let (g2, w2) = (g * g, w * w);
    Ok(KkConstants {
        q: -4.0 * g2 / (a_free * a_free * w2),
        lambda: e * e / w2 - 2.0 * e * g2 / w.powi(3) + 4.0 * g2 * eps / w.powi(3)
            - 3.0 * g2 * g2 / w.powi(4)
            - delta * delta / w2
            - eps * eps / w2,
        b_kk: -1.0 - 4.0 * g2 / w2 + 2.0 * eps / w,
        two_j: e / w + g2 / w2 - eps / w,
        l: -e / w - g2 / w2 - 0.5 + eps / w,
        a_free,
    })
}
