//! Connection eigensolver for the full Pöschl-Teller pair.
//!
//! The equation is continued to the segment `x = iθ`, `0 < θ < π`, where it
//! reads `Ψ_θθ = (𝓔 − V(iθ))Ψ` and both ends are regular singular points
//! (`z = ±g/ω` in the Bargmann variable `z = (g/ω) cos θ`). A level is an
//! energy at which the solution analytic at one end is analytic at the other.
//! Each end is seeded from its Frobenius series, carried through the gauge
//! that links the Bargmann solution to `Ψ`, and integrated to a matching
//! angle, where the normalized Wronskian measures the mismatch.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::indicial_exponent;
use crate::bargmann::{bargmann_ode, gauge, BargmannOde, Gauge};
use crate::error::{Error, Result};
use crate::model::{Branch, ModelParams};
use crate::ode::{integrate, Tolerances};
use crate::potentials::{full_energy, full_potential_on_segment, PotentialKind, PotentialSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionConfig {
    /// Distance in θ from each end at which the series seeds the integration.
    pub seed_angle: f64,
    /// Angle where the two solutions are compared.
    pub match_angle: f64,
    /// Closest approach of a scan sample to a pole energy.
    pub pole_offset: f64,
    /// Root-bracket width at which refinement stops.
    pub energy_tolerance: f64,
    /// Largest residue or mismatch accepted as exact at a pole energy.
    pub certificate_tolerance: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for ConnectionConfig {
    fn default() -> Self {
        Self {
            seed_angle: PI / 3.0,
            match_angle: PI / 2.0,
            pole_offset: 1e-7,
            energy_tolerance: 1e-12,
            certificate_tolerance: 1e-7,
            rtol: 1e-11,
            atol: 1e-14,
        }
    }
}

impl ConnectionConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.seed_angle > 0.0
            && self.seed_angle < self.match_angle
            && self.match_angle < PI - self.seed_angle
            && self.pole_offset > 0.0
            && self.energy_tolerance > 0.0
            && self.certificate_tolerance > 0.0
            && self.rtol > 0.0
            && self.atol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "bad connection settings {self:?}"
            )))
        }
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rtol: self.rtol,
            atol: self.atol,
            ..Tolerances::default()
        }
    }
}

/// How a located level was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// The mismatch changes sign; the level is the refined zero.
    SignChange,
    /// A pole energy where every solution is analytic at one end, so the
    /// level is exact. `wronskian` then holds the relative residue.
    LogFreeResonance,
    /// A pole energy where the larger-exponent solution at the resonant end
    /// connects to the other end. `wronskian` holds that mismatch.
    ResonantConnection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionResult {
    pub energy: f64,
    pub cal_e: f64,
    pub wronskian: f64,
    /// Strength `ℓ` of the `ℓ(ℓ+1)/x²` term at the origin.
    pub left_exponent: f64,
    pub converged: bool,
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub branch: Branch,
    pub levels: Vec<ConnectionResult>,
    pub poles: Vec<f64>,
    pub trace: Vec<String>,
}

impl ScanReport {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|r| r.energy).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    /// `θ = 0`, the image of `x → 0`.
    Left,
    /// `θ = π`.
    Right,
}

/// Which local solution is analytic at an end.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Local {
    /// Exponent zero; no resonance in reach.
    Regular,
    /// Integer other exponent and no log term: every solution is analytic.
    LogFree(f64),
    /// Integer other exponent with a log term: only the exponent-`k` solution.
    Logarithmic(u32),
}

struct Segment {
    params: ModelParams,
    branch: Branch,
    energy: f64,
    cal_e: f64,
    ode: BargmannOde,
    gauge: Gauge,
}

impl Segment {
    fn new(params: &ModelParams, energy: f64, branch: Branch, cal_e: f64) -> Result<Self> {
        params.validate()?;
        if params.g <= 0.0 {
            return Err(Error::InvalidParams(
                "connection problem needs g > 0 (the singular points merge at g = 0)".into(),
            ));
        }
        if !energy.is_finite() || !cal_e.is_finite() {
            return Err(Error::InvalidParams("non-finite energy".into()));
        }
        let w = params.omega;
        let shift = w * w * (cal_e - full_energy(params, energy, branch));
        Ok(Self {
            params: *params,
            branch,
            energy,
            cal_e,
            ode: bargmann_ode(params, energy, branch).with_zeroth_shift(shift),
            gauge: gauge(params, energy, branch),
        })
    }

    fn z0(&self, end: End) -> f64 {
        let (zp, zm) = self.ode.singular_points();
        match end {
            End::Left => zp,
            End::Right => zm,
        }
    }

    fn local(&self, end: End, tol: f64) -> Local {
        let z0 = self.z0(end);
        let rho = self.ode.other_exponent(z0);
        let k = rho.round();
        if k < 1.0 || (rho - k).abs() > 1e-9 * k {
            return Local::Regular;
        }
        match self.ode.frobenius(z0).resonance(k as usize + 1) {
            Some(r) if r.relative_numerator <= tol => Local::LogFree(r.relative_numerator),
            Some(_) => Local::Logarithmic(k as u32),
            None => Local::Regular,
        }
    }

    /// `(Ψ, Ψ_θ)` at `θ`, up to a common factor, from the series at `end`.
    fn seed(&self, end: End, exponent: u32, theta: f64) -> Result<[f64; 2]> {
        let k = self.params.g / self.params.omega;
        let sin = theta.sin();
        let one_minus = 2.0 * (0.5 * theta).sin().powi(2);
        let one_plus = 2.0 * (0.5 * theta).cos().powi(2);
        let t = match end {
            End::Left => -k * one_minus,
            End::Right => k * one_plus,
        };
        let (val, der) = self
            .ode
            .frobenius_with_exponent(self.z0(end), exponent)
            .eval(t)?;
        let Gauge { p, q, s, kappa } = self.gauge;
        let dlog_gauge = p * sin / one_minus - q * sin / one_plus - s * kappa * sin;
        Ok([val, der * (-k * sin) - val * dlog_gauge])
    }

    fn carry(&self, end: End, exponent: u32, cfg: &ConnectionConfig) -> Result<[f64; 2]> {
        let theta0 = match end {
            End::Left => cfg.seed_angle,
            End::Right => PI - cfg.seed_angle,
        };
        let y0 = self.seed(end, exponent, theta0)?;
        let (params, energy, branch, cal_e) = (self.params, self.energy, self.branch, self.cal_e);
        let rhs = move |theta: f64, y: &[f64; 2]| {
            [
                y[1],
                (cal_e - full_potential_on_segment(&params, energy, branch, theta)) * y[0],
            ]
        };
        integrate(rhs, theta0, y0, cfg.match_angle, &cfg.tolerances())
    }

    fn mismatch(&self, left: u32, right: u32, cfg: &ConnectionConfig) -> Result<f64> {
        let l = self.carry(End::Left, left, cfg)?;
        let r = self.carry(End::Right, right, cfg)?;
        let w = (l[0] * r[1] - l[1] * r[0]) / (l[0].hypot(l[1]) * r[0].hypot(r[1]));
        if w.is_finite() {
            Ok(w)
        } else {
            Err(Error::Range(format!(
                "mismatch not finite at E = {}",
                self.energy
            )))
        }
    }
}

/// Normalized Wronskian of the solutions analytic at `x → 0` and at
/// `x = iπ` for the full potential of `spec` at spectral parameter `cal_e`.
pub fn connection_wronskian(
    spec: &PotentialSpec,
    cal_e: f64,
    cfg: &ConnectionConfig,
) -> Result<ConnectionResult> {
    spec.validate()?;
    cfg.validate()?;
    if spec.kind != PotentialKind::Full {
        return Err(Error::InvalidParams(
            "connection problem needs kind = full".into(),
        ));
    }
    let energy = spec.energy.expect("validated full spec");
    let seg = Segment::new(&spec.params, energy, spec.branch, cal_e)?;
    let wronskian = seg.mismatch(0, 0, cfg)?;
    Ok(ConnectionResult {
        energy,
        cal_e,
        wronskian,
        left_exponent: indicial_exponent(&spec.params, energy, spec.branch),
        converged: true,
        certificate: None,
    })
}

fn mismatch_at(
    params: &ModelParams,
    branch: Branch,
    energy: f64,
    cfg: &ConnectionConfig,
) -> Result<f64> {
    Segment::new(params, energy, branch, full_energy(params, energy, branch))?.mismatch(0, 0, cfg)
}

/// Energies in `(lo, hi)` where an end of the segment is resonant, sorted.
pub fn pole_energies(params: &ModelParams, branch: Branch, range: (f64, f64)) -> Vec<f64> {
    let (lo, hi) = range;
    let w = params.omega;
    let ode = bargmann_ode(params, 0.0, branch);
    let (zp, zm) = ode.singular_points();
    let mut poles = Vec::new();
    if params.g <= 0.0 {
        return poles;
    }
    for z0 in [zp, zm] {
        // The other exponent grows by 1/ω per unit of E.
        let rho0 = ode.other_exponent(z0);
        let k_min = ((lo / w + rho0).floor().max(0.0) as u64).max(1);
        let mut k = k_min;
        loop {
            let e = w * (k as f64 - rho0);
            if e >= hi {
                break;
            }
            if e > lo {
                poles.push(e);
            }
            k += 1;
        }
    }
    poles.sort_by(f64::total_cmp);
    poles.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    poles
}

/// Brent's method on a bracket with `f(a)` and `f(b)` of opposite sign.
fn brent(
    f: impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
) -> Result<(f64, bool)> {
    if fa == 0.0 {
        return Ok((a, true));
    }
    if fb == 0.0 {
        return Ok((b, true));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            (c, fc) = (a, fa);
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            (a, fa, b, fb, c, fc) = (b, fb, c, fc, b, fb);
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 {
            return Ok((b, true));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0)),
                    (qa - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        (a, fa) = (b, fb);
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = f(b)?;
    }
    Ok((b, false))
}

/// Samples of `f` on `[a, b]`; failed evaluations break the chain.
fn bracket_roots(
    f: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    intervals: usize,
    tol: f64,
    trace: &mut Vec<String>,
) -> Vec<(f64, bool, f64)> {
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=intervals {
        let x = if i == intervals {
            b
        } else {
            a + (b - a) * i as f64 / intervals as f64
        };
        let fx = match f(x) {
            Ok(v) => v,
            Err(err) => {
                trace.push(format!("E = {x}: {err}"));
                prev = None;
                continue;
            }
        };
        if let Some((xp, fp)) = prev {
            if fp.signum() != fx.signum() || fx == 0.0 {
                match brent(f, xp, x, fp, fx, tol) {
                    Ok((root, converged)) => {
                        let value = f(root).unwrap_or(f64::NAN);
                        roots.push((root, converged, value));
                    }
                    Err(err) => trace.push(format!("refinement in [{xp}, {x}] failed: {err}")),
                }
            }
        }
        prev = if fx == 0.0 { None } else { Some((x, fx)) };
    }
    roots
}

/// Scans the regular energy `E` over `range` and returns the levels of the
/// AQRM found through the `branch` connection problem. The potential and
/// `𝓔 = full_energy(E)` move together with `E`.
///
/// Pole energies, where an end is resonant and the mismatch is not
/// continuous, split the scan; each pole is then tested directly.
pub fn eigenvalue_scan(
    params: &ModelParams,
    branch: Branch,
    range: (f64, f64),
    steps: usize,
    cfg: &ConnectionConfig,
) -> Result<ScanReport> {
    params.validate()?;
    cfg.validate()?;
    let (lo, hi) = range;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParams("energy range must be finite".into()));
    }
    if steps == 0 {
        return Err(Error::InvalidParams("steps must be positive".into()));
    }
    let mut report = ScanReport {
        branch,
        levels: Vec::new(),
        poles: Vec::new(),
        trace: Vec::new(),
    };
    if hi <= lo {
        report.trace.push("empty energy range".into());
        return Ok(report);
    }
    if params.g <= 0.0 {
        return Err(Error::InvalidParams(
            "connection problem needs g > 0".into(),
        ));
    }
    let poles = pole_energies(params, branch, range);
    let h = (hi - lo) / steps as f64;
    let f = |e: f64| mismatch_at(params, branch, e, cfg);

    let mut edges = vec![lo];
    for &p in &poles {
        edges.push(p - cfg.pole_offset);
        edges.push(p + cfg.pole_offset);
    }
    edges.push(hi);
    for pair in edges.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        let intervals = ((b - a) / h).ceil().max(1.0) as usize;
        for (root, converged, value) in
            bracket_roots(&f, a, b, intervals, cfg.energy_tolerance, &mut report.trace)
        {
            report.levels.push(ConnectionResult {
                energy: root,
                cal_e: full_energy(params, root, branch),
                wronskian: value,
                left_exponent: indicial_exponent(params, root, branch),
                converged,
                certificate: Some(Certificate::SignChange),
            });
        }
    }

    for &p in &poles {
        match pole_certificate(params, branch, p, cfg) {
            Ok(Some((certificate, value))) => report.levels.push(ConnectionResult {
                energy: p,
                cal_e: full_energy(params, p, branch),
                wronskian: value,
                left_exponent: indicial_exponent(params, p, branch),
                converged: true,
                certificate: Some(certificate),
            }),
            Ok(None) => {}
            Err(err) => report.trace.push(format!("pole E = {p}: {err}")),
        }
    }
    report.poles = poles;
    report.levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    report
        .levels
        .dedup_by(|a, b| (a.energy - b.energy).abs() < 1e-9);
    if report.levels.is_empty() {
        report.trace.push(format!("no level in [{lo}, {hi}]"));
    }
    Ok(report)
}

/// Decides whether the pole energy `energy` is itself a level.
fn pole_certificate(
    params: &ModelParams,
    branch: Branch,
    energy: f64,
    cfg: &ConnectionConfig,
) -> Result<Option<(Certificate, f64)>> {
    let seg = Segment::new(params, energy, branch, full_energy(params, energy, branch))?;
    let left = seg.local(End::Left, cfg.certificate_tolerance);
    let right = seg.local(End::Right, cfg.certificate_tolerance);
    for local in [left, right] {
        if let Local::LogFree(residue) = local {
            return Ok(Some((Certificate::LogFreeResonance, residue)));
        }
    }
    let exponent = |local| match local {
        Local::Logarithmic(k) => k,
        _ => 0,
    };
    let m = seg.mismatch(exponent(left), exponent(right), cfg)?;
    Ok((m.abs() <= cfg.certificate_tolerance).then_some((Certificate::ResonantConnection, m)))
}

/// Initial data `(ψ, ψ′)` at `x` for a real-line shooting problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub x: f64,
    pub value: f64,
    pub slope: f64,
}

/// Normalized Wronskian at `x_match` of the solutions of `ψ″ = (V − 𝓔)ψ`
/// started from `left` and `right`.
pub fn shooting_wronskian(
    v: impl Fn(f64) -> f64,
    cal_e: f64,
    left: Seed,
    right: Seed,
    x_match: f64,
) -> Result<f64> {
    if !(left.x < x_match && x_match < right.x) {
        return Err(Error::InvalidParams(
            "matching point must lie between the seeds".into(),
        ));
    }
    let tol = Tolerances::default();
    let rhs = |x: f64, y: &[f64; 2]| [y[1], (v(x) - cal_e) * y[0]];
    let l = integrate(rhs, left.x, [left.value, left.slope], x_match, &tol)?;
    let r = integrate(rhs, right.x, [right.value, right.slope], x_match, &tol)?;
    Ok((l[0] * r[1] - l[1] * r[0]) / (l[0].hypot(l[1]) * r[0].hypot(r[1])))
}

/// Zeros of [`shooting_wronskian`] in `range`, with seeds that may depend on 𝓔.
pub fn shooting_scan(
    v: impl Fn(f64) -> f64,
    left: impl Fn(f64) -> Seed,
    right: impl Fn(f64) -> Seed,
    x_match: f64,
    range: (f64, f64),
    steps: usize,
) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite()) || steps == 0 {
        return Err(Error::InvalidParams("bad scan range".into()));
    }
    if hi <= lo {
        return Ok(Vec::new());
    }
    let f = |e: f64| shooting_wronskian(&v, e, left(e), right(e), x_match);
    let mut trace = Vec::new();
    let roots = bracket_roots(&f, lo, hi, steps, 1e-12, &mut trace);
    if let Some(msg) = trace.first() {
        return Err(Error::Integrator(msg.clone()));
    }
    Ok(roots.into_iter().map(|(r, _, _)| r).collect())
}
