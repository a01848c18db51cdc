//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
//! Run with `cargo test -p aqrm-cli --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use aqrm_core::bethe::{exceptional_cal_e, normalized_q_distance, q_from_roots, to_gaudin};
use aqrm_core::constraint::{constraint_poly_coeffs, q_sequence, qp_proportionality_residual};
use aqrm_core::model::DEFAULT_TRUNCATION;
use aqrm_core::potentials::{qes_potential, qes_product};
use aqrm_core::schrodinger::{
    eigenvalue_scan, fd_eigensolve, residual_check, Boundary, ConnectionConfig, Grid,
};
use aqrm_core::verify::qp_parameter_draws;
use aqrm_core::{
    qes_energy, qes_points, regular_spectrum, solve_bethe, Branch, ModelParams, QesPoint,
};
use num_complex::Complex64;

const DELTA: f64 = 1.2;
const EPSILON: f64 = 0.3;
const OMEGA: f64 = 1.0;
const N_MAX: usize = 5;

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn all_points(epsilon: f64) -> Vec<QesPoint> {
    let mut out = Vec::new();
    for branch in Branch::BOTH {
        for n in 1..=N_MAX {
            out.extend(
                qes_points(DELTA, epsilon, OMEGA, n, branch)
                    .expect("valid parameters")
                    .points,
            );
        }
    }
    out
}

fn params_at(p: &QesPoint) -> ModelParams {
    ModelParams::new(DELTA, EPSILON, OMEGA, p.g).expect("valid parameters")
}

fn within(label: &str, value: f64, tolerance: f64) -> Outcome {
    if value < tolerance {
        Ok(format!("{label} = {value:.3e} < {tolerance:.0e}"))
    } else {
        Err(format!("{label} = {value:.3e}, tolerance {tolerance:.0e}"))
    }
}

fn point_counts() -> Outcome {
    let mut report = Vec::new();
    for branch in Branch::BOTH {
        for n in 1..=N_MAX {
            let found = qes_points(DELTA, EPSILON, OMEGA, n, branch)
                .map_err(|e| e.to_string())?
                .points
                .len();
            let expected = if branch == Branch::Plus { n } else { n - 1 };
            if found != expected {
                return Err(format!(
                    "n = {n}, branch {}: {found} points, expected {expected}",
                    branch.symbol()
                ));
            }
            report.push(found.to_string());
        }
    }
    Ok(format!("counts + then -: {}", report.join(",")))
}

fn juddian_levels() -> Outcome {
    let mut worst = 0.0f64;
    for p in all_points(EPSILON) {
        let params = params_at(&p);
        let spectrum = regular_spectrum(&params, 2 * p.n + 6, DEFAULT_TRUNCATION)
            .map_err(|e| e.to_string())?;
        worst = worst.max(spectrum.distance_to(qes_energy(&params, p.n, p.branch)));
    }
    within("max distance to a diagonalization level", worst, 1e-6)?;
    let first = qes_points(DELTA, EPSILON, OMEGA, 1, Branch::Plus)
        .map_err(|e| e.to_string())?
        .points;
    let g = first.first().ok_or("no n = 1 point")?.g;
    within("|g_1 - 0.2|", (g - 0.2).abs(), 1e-12)?;
    Ok(format!("max distance {worst:.3e}, g_1 = {g}"))
}

/// Bethe equations written out branch by branch.
fn bethe_equation_residual(z: &[Complex64], n: usize, branch: Branch, g: f64) -> f64 {
    let (w, e) = (OMEGA, EPSILON);
    let nf = n as f64;
    let mut worst = 0.0f64;
    for (i, &zi) in z.iter().enumerate() {
        let lhs: Complex64 = z
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &zj)| 2.0 * w / (zi - zj))
            .sum();
        let rhs = match branch {
            Branch::Plus => {
                (nf * w * w + 2.0 * e * w) / (w * zi - g)
                    + (nf * w * w - w * w) / (w * zi + g)
                    + 2.0 * g
            }
            Branch::Minus => {
                (nf * w * w - w * w) / (w * zi - g) + (nf * w * w - 2.0 * e * w) / (w * zi + g)
                    - 2.0 * g
            }
        };
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

fn bethe_triple() -> Outcome {
    let (mut bethe, mut constraint, mut energy) = (0.0f64, 0.0f64, 0.0f64);
    for p in all_points(EPSILON) {
        let params = params_at(&p);
        let roots = solve_bethe(&params, p.n, p.branch).map_err(|e| e.to_string())?;
        let z = &roots.roots;
        bethe = bethe.max(bethe_equation_residual(z, p.n, p.branch, p.g));
        let sum: Complex64 = z.iter().sum();
        let s = p.branch.sign();
        let g = p.g;
        constraint = constraint
            .max((DELTA * DELTA + 2.0 * p.n as f64 * g * g + 2.0 * s * OMEGA * g * sum).norm());
        let gp = to_gaudin(&roots).map_err(|e| e.to_string())?;
        let a_sum = gp.a * gp.v.iter().sum::<Complex64>().re;
        let expected =
            -DELTA * DELTA / (OMEGA * OMEGA) - 2.0 * p.n as f64 * g * g / (OMEGA * OMEGA);
        energy = energy.max((a_sum - expected).abs());
    }
    within("Bethe residual", bethe, 1e-8)?;
    within("constraint residual", constraint, 1e-8)?;
    within("A sum v energy error", energy, 1e-8)?;
    let first = qes_points(DELTA, EPSILON, OMEGA, 1, Branch::Plus)
        .map_err(|e| e.to_string())?
        .points[0];
    let roots = solve_bethe(&params_at(&first), 1, Branch::Plus).map_err(|e| e.to_string())?;
    let z1 = roots.roots[0];
    within(
        "|z_1 + 3.8|",
        (z1 - Complex64::new(-3.8, 0.0)).norm(),
        1e-10,
    )?;
    Ok(format!(
        "Bethe {bethe:.2e}, constraint {constraint:.2e}, energy {energy:.2e}, z_1 = {}",
        z1.re
    ))
}

fn qp_proportionality() -> Outcome {
    let draws = qp_parameter_draws(1, 100, 8);
    if draws.len() != 100 {
        return Err(format!("{} draws", draws.len()));
    }
    let mut worst = 0.0f64;
    for (params, n, branch) in draws {
        worst =
            worst.max(qp_proportionality_residual(n, &params, branch).map_err(|e| e.to_string())?);
    }
    within("max relative residual over 100 draws", worst, 1e-10)
}

fn q_from_bethe_roots() -> Outcome {
    let mut worst = 0.0f64;
    for p in all_points(EPSILON) {
        let params = params_at(&p);
        let recurrence = q_sequence(p.n, &params, p.branch).map_err(|e| e.to_string())?;
        let roots = solve_bethe(&params, p.n, p.branch).map_err(|e| e.to_string())?;
        let from_roots = q_from_roots(&roots);
        worst = worst.max(normalized_q_distance(
            &recurrence.values[..=p.n],
            &from_roots.sequence.values,
        ));
    }
    within("max normalized Q distance", worst, 1e-6)
}

fn schrodinger_residual() -> Outcome {
    let grid = Grid::default();
    let mut worst = 0.0f64;
    let points = all_points(EPSILON);
    for p in &points {
        let params = params_at(p);
        let roots = solve_bethe(&params, p.n, p.branch).map_err(|e| e.to_string())?;
        let v: Vec<Complex64> = roots.roots.iter().map(|z| -z).collect();
        let psi = qes_product(&params, p.n, p.branch, &v);
        let r = residual_check(
            |x| qes_potential(&params, p.n, p.branch, x, aqrm_core::Form::PartialFraction),
            &psi,
            exceptional_cal_e(&params, p.n),
            &grid,
        )
        .map_err(|e| e.to_string())?;
        worst = worst.max(r);
    }
    within(
        &format!("max residual over {} triples", points.len()),
        worst,
        1e-6,
    )
}

fn connection_levels() -> Outcome {
    let mut worst = 0.0f64;
    for g in [0.4, 0.7, 1.0] {
        let params = ModelParams::new(DELTA, EPSILON, OMEGA, g).map_err(|e| e.to_string())?;
        let oracle = regular_spectrum(&params, 4, DEFAULT_TRUNCATION)
            .map_err(|e| e.to_string())?
            .values();
        // Below the ground state: H >= -g²/ω - sqrt(Δ² + ε²).
        let lo = -g * g / OMEGA - DELTA.hypot(EPSILON) - 0.25 * OMEGA;
        let hi = lo + 6.0 * OMEGA;
        for branch in Branch::BOTH {
            let scan =
                eigenvalue_scan(&params, branch, (lo, hi), 600, &ConnectionConfig::default())
                    .map_err(|e| e.to_string())?;
            let found = scan.energies();
            if found.len() < 4 {
                return Err(format!(
                    "g = {g}, branch {}: {} levels in [{lo}, {hi}]",
                    branch.symbol(),
                    found.len()
                ));
            }
            for (a, b) in found.iter().zip(&oracle) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    within("max deviation of the first 4 levels", worst, 1e-4)
}

fn cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_aqrm"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "aqrm {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap_or_default()
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|c| c.parse().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    (header, rows)
}

fn symmetric_model() -> Outcome {
    let y = DELTA * DELTA;
    for n in 1..=N_MAX {
        let plus = constraint_poly_coeffs(n, y, 0.0, OMEGA).map_err(|e| e.to_string())?;
        let minus = constraint_poly_coeffs(n, y, -0.0, OMEGA).map_err(|e| e.to_string())?;
        if plus != minus {
            return Err(format!("n = {n}: branch polynomials differ"));
        }
        let gp: Vec<f64> = qes_points(DELTA, 0.0, OMEGA, n, Branch::Plus)
            .map_err(|e| e.to_string())?
            .points
            .iter()
            .map(|p| p.g)
            .collect();
        let gm: Vec<f64> = qes_points(DELTA, 0.0, OMEGA, n, Branch::Minus)
            .map_err(|e| e.to_string())?
            .points
            .iter()
            .map(|p| p.g)
            .collect();
        if gp != gm {
            return Err(format!("n = {n}: branch points differ {gp:?} vs {gm:?}"));
        }
    }
    let sym = ["--epsilon", "0", "--delta", "1.2", "--omega", "1"];
    let table = cli(&[&sym[..], &["qes-points", "--n-max", "5", "--branch", "+"]].concat())?;
    let (_, rows) = csv(&table);
    let (mut line_dev, mut cal_dev, mut crossings) = (0.0f64, 0.0f64, 0usize);
    for row in rows.iter().filter(|r| r[0] >= 2.0) {
        let (n, g) = (row[0], row[2]);
        let g_text = format!("{g}");
        let g_hi = format!("{}", g + 1.0);
        let levels = format!("{}", 2 * n as usize + 4);
        let grid = [
            "--g-min",
            g_text.as_str(),
            "--g-max",
            g_hi.as_str(),
            "--steps",
            "1",
            "--levels",
            levels.as_str(),
        ];
        let (_, spec) = csv(&cli(&[&sym[..], &["spectrum"], &grid[..]].concat())?);
        let rescaled = &spec[0][1..];
        let mut hits: Vec<usize> = (0..rescaled.len())
            .filter(|&k| (rescaled[k] - n).abs() < 1e-6)
            .collect();
        if hits.len() < 2 {
            return Err(format!(
                "n = {n}, g = {g}: {} levels on E + g² = n",
                hits.len()
            ));
        }
        hits.truncate(2);
        line_dev = line_dev.max(
            hits.iter()
                .map(|&k| (rescaled[k] - n).abs())
                .fold(0.0, f64::max),
        );
        let (header, pt) = csv(&cli(&[&sym[..], &["pt-energies"], &grid[..]].concat())?);
        let cell = |name: String| header.iter().position(|h| *h == name).map(|i| pt[0][i]);
        let expected = -DELTA * DELTA - 2.0 * n * g * g;
        for &k in &hits {
            let p = cell(format!("calE_plus_{k}")).ok_or("missing plus column")?;
            let m = cell(format!("calE_minus_{k}")).ok_or("missing minus column")?;
            cal_dev = cal_dev.max((p - m).abs()).max((p - expected).abs());
        }
        crossings += 1;
    }
    if crossings == 0 {
        return Err("no crossings emitted".into());
    }
    within("distance to E + g² = n", line_dev, 1e-6)?;
    within("branch 𝓔 mismatch at crossings", cal_dev, 1e-6)?;
    Ok(format!(
        "{crossings} crossings, line {line_dev:.2e}, 𝓔 {cal_dev:.2e}"
    ))
}

fn oracle_eigensolver() -> Outcome {
    let osc = fd_eigensolve(|x| x * x, (-10.0, 10.0), Boundary::Dirichlet, 3, 2000)
        .map_err(|e| e.to_string())?;
    let sech = fd_eigensolve(
        |x| -6.0 / x.cosh().powi(2),
        (-15.0, 15.0),
        Boundary::Dirichlet,
        2,
        3000,
    )
    .map_err(|e| e.to_string())?;
    let a = osc
        .iter()
        .zip([1.0, 3.0, 5.0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let b = sech
        .iter()
        .zip([-4.0, -1.0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    within("oscillator error", a, 1e-6)?;
    within("sech² error", b, 1e-6)?;
    Ok(format!("x²: {osc:?}, sech²: {sech:?}"))
}

fn main() {
    let criteria = [
        Criterion {
            name: "qes point counts",
            budget: Some(Duration::from_secs(1)),
            run: point_counts,
        },
        Criterion {
            name: "exceptional energies on the spectrum",
            budget: Some(Duration::from_secs(30)),
            run: juddian_levels,
        },
        Criterion {
            name: "bethe, constraint and energy",
            budget: None,
            run: bethe_triple,
        },
        Criterion {
            name: "q-p proportionality",
            budget: Some(Duration::from_secs(5)),
            run: qp_proportionality,
        },
        Criterion {
            name: "q from bethe roots",
            budget: None,
            run: q_from_bethe_roots,
        },
        Criterion {
            name: "schrodinger residual",
            budget: Some(Duration::from_secs(10)),
            run: schrodinger_residual,
        },
        Criterion {
            name: "connection spectrum",
            budget: Some(Duration::from_secs(120)),
            run: connection_levels,
        },
        Criterion {
            name: "symmetric model crossings",
            budget: None,
            run: symmetric_model,
        },
        Criterion {
            name: "finite-difference oracle",
            budget: Some(Duration::from_secs(5)),
            run: oracle_eigensolver,
        },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(budget)) = (&outcome, c.budget) {
            if elapsed > budget {
                outcome = Err(format!("took {elapsed:.2?}, budget {budget:.0?}"));
            }
        }
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {} ({secs:.2} s): {detail}", i + 1, c.name),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {} ({secs:.2} s): {detail}", i + 1, c.name);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
