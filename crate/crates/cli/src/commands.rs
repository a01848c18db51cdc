//! One function per subcommand; each renders its artifact and writes it.

use aqrm_core::bethe::{bethe_residuals, exceptional_cal_e, solve_bethe, to_gaudin, BetheRoots};
use aqrm_core::model::{rescaled_level, DEFAULT_TRUNCATION};
use aqrm_core::potentials::{
    full_energy, gaudin_potential, gaudin_product, qes_product, Form, PotentialKind, PotentialSpec,
    ProductWavefunction,
};
use aqrm_core::verify::{run_verification, VerifyConfig};
use aqrm_core::{qes_energy, qes_points, regular_spectrum, Branch, ModelParams, QesPoint};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::FileConfig;
use crate::format::{round_json, Cell, Table};
use crate::{
    write_atomic, BetheArgs, Cli, CliError, Command, OutputFormat, PotentialArgs, PtEnergiesArgs,
    QesPointsArgs, SpectrumArgs, VerifyArgs, EXIT_FAILURE,
};

/// Settings shared by every command after merging flags and the config file.
struct Context {
    file: FileConfig,
    delta: f64,
    epsilon: f64,
    omega: f64,
    format: OutputFormat,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let ctx = Self {
            delta: file.pick(cli.delta, "delta", 1.2)?,
            epsilon: file.pick(cli.epsilon, "epsilon", 0.3)?,
            omega: file.pick(cli.omega, "omega", 1.0)?,
            format: file.pick(cli.format, "format", OutputFormat::Csv)?,
            file,
        };
        ModelParams::new(ctx.delta, ctx.epsilon, ctx.omega, 0.0)?;
        Ok(ctx)
    }

    fn params(&self, g: f64) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(self.delta, self.epsilon, self.omega, g)?)
    }

    fn render(&self, table: &Table) -> String {
        match self.format {
            OutputFormat::Csv => {
                for note in &table.notes {
                    eprintln!("note: {note}");
                }
                table.to_csv()
            }
            OutputFormat::Json => json_text(table.to_json()),
        }
    }
}

fn json_text(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&round_json(v)).expect("JSON value serializes");
    s.push('\n');
    s
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let ctx = Context::new(cli)?;
    let (text, code) = match &cli.command {
        Command::QesPoints(a) => (ctx.render(&qes_points_table(&ctx, a)?), 0),
        Command::Spectrum(a) => (ctx.render(&spectrum_table(&ctx, a)?), 0),
        Command::PtEnergies(a) => (ctx.render(&pt_energies_table(&ctx, a)?), 0),
        Command::Bethe(a) => (bethe_output(&ctx, a)?, 0),
        Command::Potential(a) => (ctx.render(&potential_table(&ctx, a)?), 0),
        Command::Verify(a) => return verify(cli, &ctx, a),
    };
    emit(cli, &text)?;
    Ok(code)
}

fn branch_cell(b: Branch) -> Cell {
    Cell::Text(b.symbol().to_string())
}

fn branch_word(b: Branch) -> &'static str {
    match b {
        Branch::Plus => "plus",
        Branch::Minus => "minus",
    }
}

fn qes_points_table(ctx: &Context, a: &QesPointsArgs) -> Result<Table, CliError> {
    let n_max: usize = ctx.file.pick(a.n_max, "n_max", 5)?;
    if n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let mut t = Table::new(["n", "branch", "g", "E", "E_plus_g2", "constraint_residual"]);
    let mut degenerate = false;
    for branch in a.branch.branches() {
        for n in 1..=n_max {
            let search = qes_points(ctx.delta, ctx.epsilon, ctx.omega, n, branch)?;
            degenerate |= search.degenerate_atomic_limit;
            for pt in search.points {
                let p = pt.params(ctx.delta, ctx.epsilon, ctx.omega);
                let e = qes_energy(&p, n, branch);
                t.push(vec![
                    Cell::Int(n as i64),
                    branch_cell(branch),
                    Cell::Num(pt.g),
                    Cell::Num(e),
                    Cell::Num(rescaled_level(e, pt.g, ctx.omega)),
                    Cell::Num(pt.constraint_residual),
                ]);
            }
        }
    }
    if degenerate {
        t.notes.push(
            "delta = 0 is the degenerate atomic limit: every coupling is exceptional, no isolated QES points"
                .into(),
        );
    }
    Ok(t)
}

struct CouplingGrid {
    g_min: f64,
    g_max: f64,
    couplings: Vec<f64>,
    levels: usize,
    truncation: usize,
}

fn coupling_grid(ctx: &Context, a: &SpectrumArgs) -> Result<CouplingGrid, CliError> {
    let g_min: f64 = ctx.file.pick(a.g_min, "g_min", 0.0)?;
    let g_max: f64 = ctx.file.pick(a.g_max, "g_max", 1.0)?;
    let steps: usize = ctx.file.pick(a.steps, "steps", 51)?;
    let levels: usize = ctx.file.pick(a.levels, "levels", 6)?;
    let truncation: usize = ctx
        .file
        .pick(a.truncation, "truncation", DEFAULT_TRUNCATION)?;
    if !(g_min.is_finite() && g_max.is_finite() && g_min < g_max) {
        return Err(CliError::Usage(format!(
            "need g_min < g_max, got {g_min} and {g_max}"
        )));
    }
    if g_min < 0.0 {
        return Err(CliError::Usage("g_min must be non-negative".into()));
    }
    if steps == 0 || levels == 0 {
        return Err(CliError::Usage("steps and levels must be positive".into()));
    }
    let couplings = if steps == 1 {
        vec![g_min]
    } else {
        (0..steps)
            .map(|i| g_min + (g_max - g_min) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    Ok(CouplingGrid {
        g_min,
        g_max,
        couplings,
        levels,
        truncation,
    })
}

fn spectrum_table(ctx: &Context, a: &SpectrumArgs) -> Result<Table, CliError> {
    let grid = coupling_grid(ctx, a)?;
    let mut columns = vec!["g".to_string()];
    columns.extend((0..grid.levels).map(|k| format!("level_{k}")));
    let mut t = Table::new(columns);
    for &g in &grid.couplings {
        let spectrum = regular_spectrum(&ctx.params(g)?, grid.levels, grid.truncation)?;
        let mut row = vec![Cell::Num(g)];
        row.extend(
            spectrum
                .values()
                .into_iter()
                .map(|e| Cell::Num(rescaled_level(e, g, ctx.omega))),
        );
        t.push(row);
    }
    Ok(t)
}

fn pt_energies_table(ctx: &Context, a: &PtEnergiesArgs) -> Result<Table, CliError> {
    let grid = coupling_grid(ctx, &a.grid)?;
    let branches = a.branch.branches();
    if a.markers {
        let n_max: usize = ctx.file.pick(a.n_max, "n_max", 5)?;
        let mut t = Table::new(["n", "branch", "g", "calE"]);
        for &branch in &branches {
            for n in 1..=n_max {
                for pt in qes_points(ctx.delta, ctx.epsilon, ctx.omega, n, branch)?.points {
                    if pt.g < grid.g_min || pt.g > grid.g_max {
                        continue;
                    }
                    let p = pt.params(ctx.delta, ctx.epsilon, ctx.omega);
                    t.push(vec![
                        Cell::Int(n as i64),
                        branch_cell(branch),
                        Cell::Num(pt.g),
                        Cell::Num(exceptional_cal_e(&p, n)),
                    ]);
                }
            }
        }
        return Ok(t);
    }
    let mut columns = vec!["g".to_string()];
    for &b in &branches {
        columns.extend((0..grid.levels).map(|k| format!("calE_{}_{k}", branch_word(b))));
    }
    let mut t = Table::new(columns);
    for &g in &grid.couplings {
        let p = ctx.params(g)?;
        let spectrum = regular_spectrum(&p, grid.levels, grid.truncation)?.values();
        let mut row = vec![Cell::Num(g)];
        for &b in &branches {
            row.extend(spectrum.iter().map(|&e| Cell::Num(full_energy(&p, e, b))));
        }
        t.push(row);
    }
    Ok(t)
}

/// The `index`-th QES point of level `n`, or a usage error with a count hint.
fn select_point(
    ctx: &Context,
    n: usize,
    branch: Branch,
    index: usize,
) -> Result<QesPoint, CliError> {
    if n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    let search = qes_points(ctx.delta, ctx.epsilon, ctx.omega, n, branch)?;
    let count = search.points.len();
    if count == 0 {
        let extra = if search.degenerate_atomic_limit {
            " (delta = 0 is the degenerate atomic limit)"
        } else {
            ""
        };
        return Err(CliError::Usage(format!(
            "no QES point for n = {n} on branch {branch}{extra}"
        )));
    }
    search.points.into_iter().nth(index).ok_or_else(|| {
        CliError::Usage(format!(
            "index {index} out of range: {count} QES point(s) for n = {n} on branch {branch}, valid 0..={}",
            count - 1
        ))
    })
}

fn complex_pairs(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|c| json!([c.re, c.im])).collect())
}

fn bethe_json(index: usize, pt: &QesPoint, roots: &BetheRoots) -> Result<Value, CliError> {
    let gp = to_gaudin(roots)?;
    let p = &roots.params;
    let expected = exceptional_cal_e(p, roots.n);
    let bethe = if roots.degenerate_atomic_limit {
        0.0
    } else {
        bethe_residuals(&roots.roots, p, roots.n, roots.branch)?
            .iter()
            .fold(0.0f64, |m, r| m.max(r.norm()))
    };
    let gaudin_eq = gp.residuals().iter().fold(0.0f64, |m, r| m.max(r.norm()));
    Ok(json!({
        "n": roots.n,
        "branch": roots.branch.symbol(),
        "index": index,
        "g": pt.g,
        "energy": qes_energy(p, roots.n, roots.branch),
        "cal_e": gp.cal_e,
        "roots": complex_pairs(&roots.roots),
        "gaudin": {
            "A": gp.a,
            "B": gp.b,
            "C": gp.c,
            "gamma": gp.gamma,
            "v": complex_pairs(&gp.v),
        },
        "residuals": {
            "bethe": bethe,
            "constraint": pt.constraint_residual,
            "gaudin_energy": (gp.cal_e - expected).abs(),
            "gaudin_equations": gaudin_eq,
        },
        "degenerate_atomic_limit": roots.degenerate_atomic_limit,
    }))
}

fn bethe_output(ctx: &Context, a: &BetheArgs) -> Result<String, CliError> {
    let pt = select_point(ctx, a.n, a.branch, a.index)?;
    let p = pt.params(ctx.delta, ctx.epsilon, ctx.omega);
    let roots = solve_bethe(&p, a.n, a.branch)?;
    match ctx.format {
        OutputFormat::Json => Ok(json_text(bethe_json(a.index, &pt, &roots)?)),
        OutputFormat::Csv => {
            let mut t = Table::new(["j", "re", "im"]);
            for (j, z) in roots.roots.iter().enumerate() {
                t.push(vec![Cell::Int(j as i64), Cell::Num(z.re), Cell::Num(z.im)]);
            }
            Ok(ctx.render(&t))
        }
    }
}

fn potential_table(ctx: &Context, a: &PotentialArgs) -> Result<Table, CliError> {
    let x_min: f64 = ctx.file.pick(a.x_min, "x_min", 0.25)?;
    let x_max: f64 = ctx.file.pick(a.x_max, "x_max", 6.0)?;
    let samples: usize = ctx.file.pick(a.samples, "samples", 24)?;
    let form: Form = ctx.file.pick(a.form, "form", Form::PartialFraction)?;
    if samples == 0 {
        return Err(CliError::Usage("samples must be positive".into()));
    }
    if !(x_min > 0.0 && x_min.is_finite()) {
        return Err(CliError::Usage("x_min must be positive".into()));
    }
    if samples > 1 && !(x_max > x_min && x_max.is_finite()) {
        return Err(CliError::Usage("need x_max > x_min".into()));
    }
    let branch = a.branch;
    let coupling = |n: Option<usize>| -> Result<f64, CliError> {
        match (a.g, n) {
            (Some(g), _) => Ok(g),
            (None, Some(n)) => Ok(select_point(ctx, n, branch, a.index)?.g),
            (None, None) => Err(CliError::Usage("give --g or --n".into())),
        }
    };
    let (spec, psi): (PotentialSpec, Option<ProductWavefunction>) = match a.kind {
        PotentialKind::Qes | PotentialKind::Gaudin => {
            if a.energy.is_some() {
                return Err(CliError::Usage("--energy applies to kind full".into()));
            }
            let n =
                a.n.ok_or_else(|| CliError::Usage(format!("kind {:?} needs --n", a.kind)))?;
            let p = ctx.params(coupling(Some(n))?)?;
            let needs_roots = a.psi || a.kind == PotentialKind::Gaudin;
            let roots = if needs_roots {
                Some(solve_bethe(&p, n, branch)?)
            } else {
                None
            };
            match a.kind {
                PotentialKind::Gaudin => {
                    let gp = to_gaudin(roots.as_ref().expect("solved"))?;
                    let psi = a.psi.then(|| gaudin_product(&gp));
                    (PotentialSpec::gaudin(p, branch, gp), psi)
                }
                _ => {
                    let psi = roots.map(|r| {
                        let v: Vec<Complex64> = r.roots.iter().map(|z| -z).collect();
                        qes_product(&p, n, branch, &v)
                    });
                    (PotentialSpec::qes(p, branch, n), psi)
                }
            }
        }
        PotentialKind::Full => {
            let energy = a
                .energy
                .ok_or_else(|| CliError::Usage("kind full needs --energy".into()))?;
            if a.psi {
                return Err(CliError::Usage(
                    "--psi needs a closed-form wavefunction (kind qes or gaudin)".into(),
                ));
            }
            (
                PotentialSpec::full(ctx.params(coupling(a.n)?)?, branch, energy),
                None,
            )
        }
    };
    let mut columns = vec!["x", "V"];
    if psi.is_some() {
        columns.push("psi");
    }
    let mut t = Table::new(columns);
    for i in 0..samples {
        let x = if samples == 1 {
            x_min
        } else {
            x_min + (x_max - x_min) * i as f64 / (samples - 1) as f64
        };
        let v = match spec.kind {
            PotentialKind::Gaudin => {
                gaudin_potential(spec.gaudin.as_ref().expect("gaudin spec"), x)?
            }
            _ => spec.eval(x, form)?,
        };
        let mut row = vec![Cell::Num(x), Cell::Num(v)];
        if let Some(psi) = &psi {
            row.push(Cell::Num(psi.value(x)?));
        }
        t.push(row);
    }
    Ok(t)
}

fn verify(cli: &Cli, ctx: &Context, a: &VerifyArgs) -> Result<i32, CliError> {
    let defaults = VerifyConfig::default();
    let cfg = VerifyConfig {
        delta: ctx.delta,
        epsilon: ctx.epsilon,
        omega: ctx.omega,
        n_max: ctx.file.pick(a.n_max, "n_max", defaults.n_max)?,
        seed: ctx.file.pick(a.seed, "seed", defaults.seed)?,
        qp_draws: a.qp_draws.unwrap_or(defaults.qp_draws),
        couplings: defaults.couplings,
        faults: a.fault.clone(),
    };
    let report = run_verification(&cfg)?;
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        eprintln!(
            "{status} {:<28} value={} tolerance={}",
            c.name,
            crate::format::fmt_num(c.value),
            crate::format::fmt_num(c.tolerance)
        );
    }
    let text = json_text(serde_json::to_value(&report).expect("report serializes"));
    match a.report.as_ref().or(cli.output.as_ref()) {
        Some(path) => write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    if report.passed {
        Ok(0)
    } else {
        eprintln!("failed checks: {}", report.failed.join(", "));
        Ok(EXIT_FAILURE)
    }
}
