//! Batch front-end: parse a model config, run a computation, emit CSV and a
//! one-line verification summary.
//!
//! Exit codes: 0 pass, 1 usage/parse errors, 2 series not converged,
//! 3 verification failure.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use levyscale::error::{ScaleError, SeriesError};
use levyscale::grid::{Grid, GridFunction};
use levyscale::levy::{JumpMeasure, LevyModel, Regime};
use levyscale::resolvent::{solve_renewal, solve_resolvent, RenewalVariant};
use levyscale::scale::{
    scale_auto, scale_bounded_variation, scale_brownian_closed_form, scale_gaussian,
    scale_gaussian_roots, scale_stable_closed_form, scale_unbounded_variation, tilt, HKernel,
    Method, ScaleOptions, ScaleTable,
};
use levyscale::series::SeriesReport;
use levyscale::verify::verify_scale;

#[derive(Parser)]
#[command(
    name = "levyscale",
    about = "q-scale functions of spectrally negative Lévy processes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute W^(q) and verify it against the defining Laplace identity
    Scale(RunArgs),
    /// Ruin probability r(x) = 1 − ψ'(0+)·W^(0)(x) (bounded variation)
    Ruin(RunArgs),
    /// Solve ρ ∗ ν̄̄ = 1 for the model's integrated jump tail
    Resolvent(RunArgs),
    /// Solve the scale-connection renewal equation f = 1 + g ⊛ f with
    /// g = −ν̄̄/c″ (needs an unbounded-variation model with c″ ≠ 0)
    Renewal(RunArgs),
    /// Compute W^(q) and emit the residual table of the defining identity
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Model configuration file
    #[arg(long)]
    model: PathBuf,
    /// Rate parameter q ≥ 0
    #[arg(long)]
    q: Option<f64>,
    /// Grid extent
    #[arg(long)]
    xmax: Option<f64>,
    /// Grid step h
    #[arg(long)]
    step: Option<f64>,
    /// Series truncation tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Series term budget
    #[arg(long)]
    max_terms: Option<usize>,
    /// Method override (series-gaussian, series-roots, series-bv,
    /// series-ubv, series-ubv-resolvent, series-ubv-compensated,
    /// closed-brownian, closed-stable, tilt)
    #[arg(long)]
    method: Option<String>,
    /// Two-grid Richardson extrapolation
    #[arg(long)]
    richardson: bool,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Resolved {
    model: LevyModel,
    q: f64,
    grid: Grid,
    opts: ScaleOptions,
    method: Option<String>,
    out: PathBuf,
}

const VERIFY_TOL: f64 = 1e-2;

fn resolve(args: &RunArgs) -> Result<Resolved, String> {
    let file = config::load(&args.model)?;
    let run = file.run;
    let q = args.q.or(run.q).unwrap_or(0.0);
    if q < 0.0 {
        return Err(format!("q = {q} must be nonnegative"));
    }
    let step = args.step.or(run.step).unwrap_or(1.0 / 1024.0);
    let xmax = args.xmax.or(run.xmax).unwrap_or(10.0);
    if step <= 0.0 || !step.is_finite() || xmax < 10.0 * step {
        return Err(format!(
            "need step > 0 and xmax ≥ 10·step (got {step}, {xmax})"
        ));
    }
    let grid = Grid::with_xmax(step, xmax).map_err(|e| e.to_string())?;
    let opts = ScaleOptions {
        tolerance: args.tol.or(run.tol),
        max_terms: args.max_terms.or(run.max_terms).unwrap_or(200),
        richardson: args.richardson || run.richardson.unwrap_or(false),
    };
    let out = args
        .out
        .clone()
        .or_else(|| run.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out.csv"));
    Ok(Resolved {
        model: file.model,
        q,
        grid,
        opts,
        method: args.method.clone().or(run.method),
        out,
    })
}

fn closed_form_table(r: &Resolved, method: Method) -> Result<ScaleTable, String> {
    let w = match (&method, r.model.jumps()) {
        (Method::ClosedBrownian, j) => {
            let no_jumps = matches!(j, JumpMeasure::CompoundPoisson { rate, law }
                if *rate == 0.0 || law.is_empty());
            if r.model.sigma2() <= 0.0 || !no_jumps {
                return Err("closed-brownian needs sigma2 > 0 and no jumps".into());
            }
            let c = r.model.c_raw().map_err(|e| e.to_string())?;
            let s2 = r.model.sigma2();
            let q = r.q;
            GridFunction::from_fn(r.grid, move |x| scale_brownian_closed_form(c, s2, q, x))
        }
        (Method::ClosedStable, JumpMeasure::Stable { alpha }) => {
            if r.model.sigma2() != 0.0 {
                return Err("closed-stable needs sigma2 = 0".into());
            }
            let alpha = *alpha;
            let q = r.q;
            GridFunction::from_fn(r.grid, move |x| scale_stable_closed_form(alpha, q, x))
        }
        _ => return Err("closed-stable needs a stable jump family".into()),
    };
    let regime = r.model.classify().map_err(|e| e.to_string())?;
    Ok(ScaleTable {
        fingerprint: r.model.fingerprint(),
        q: r.q,
        grid: r.grid,
        w,
        regime,
        report: SeriesReport::exact(1),
        method,
    })
}

enum RunFailure {
    Usage(String),
    NotConverged(String),
    Verification(String),
}

impl From<String> for RunFailure {
    fn from(s: String) -> Self {
        RunFailure::Usage(s)
    }
}

fn scale_error(e: ScaleError) -> RunFailure {
    match e {
        ScaleError::Series(SeriesError::NotConverged {
            terms,
            last_term_l1,
            ..
        }) => RunFailure::NotConverged(format!(
            "series not converged after {terms} terms (last term L1 {last_term_l1:.3e})"
        )),
        other => RunFailure::Usage(other.to_string()),
    }
}

fn compute_table(r: &Resolved) -> Result<ScaleTable, RunFailure> {
    let table = match r.method.as_deref() {
        None => scale_auto(&r.model, r.q, r.grid, &r.opts).map_err(scale_error)?,
        Some("series-gaussian") => {
            scale_gaussian(&r.model, r.q, r.grid, &r.opts).map_err(scale_error)?
        }
        Some("series-roots") => {
            scale_gaussian_roots(&r.model, r.q, r.grid, &r.opts).map_err(scale_error)?
        }
        Some("series-bv") => {
            scale_bounded_variation(&r.model, r.q, r.grid, &r.opts).map_err(scale_error)?
        }
        Some("series-ubv") => scale_unbounded_variation(&r.model, r.q, r.grid, None, &r.opts)
            .map_err(scale_error)?,
        Some("series-ubv-resolvent") => {
            scale_unbounded_variation(&r.model, r.q, r.grid, Some(HKernel::Resolvent), &r.opts)
                .map_err(scale_error)?
        }
        Some("series-ubv-compensated") => {
            scale_unbounded_variation(&r.model, r.q, r.grid, Some(HKernel::Compensated), &r.opts)
                .map_err(scale_error)?
        }
        Some("closed-brownian") => closed_form_table(r, Method::ClosedBrownian)?,
        Some("closed-stable") => closed_form_table(r, Method::ClosedStable)?,
        Some("tilt") => tilt(&r.model, r.q, r.grid, &r.opts).map_err(scale_error)?,
        Some(other) => {
            return Err(RunFailure::Usage(format!(
                "unknown or unsupported method {other:?}"
            )))
        }
    };
    Ok(table)
}

fn write_csv(
    path: &PathBuf,
    header: &[(&str, String)],
    columns: (&str, &str),
    rows: impl Iterator<Item = (f64, f64)>,
) -> Result<(), String> {
    use std::io::Write;
    let mut buf = String::new();
    for (k, v) in header {
        buf.push_str(&format!("# {k}: {v}\n"));
    }
    buf.push_str(&format!("{},{}\n", columns.0, columns.1));
    for (x, w) in rows {
        buf.push_str(&format!("{x:.16e},{w:.16e}\n"));
    }
    let mut f = std::fs::File::create(path)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    f.write_all(buf.as_bytes())
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn table_header(t: &ScaleTable, residual: f64) -> Vec<(&'static str, String)> {
    vec![
        ("model", t.fingerprint.clone()),
        ("q", format!("{}", t.q)),
        ("h", format!("{}", t.grid.step())),
        ("xmax", format!("{}", t.grid.x_max())),
        ("regime", format!("{}", t.regime)),
        ("method", t.method.as_str().to_string()),
        ("terms", format!("{}", t.report.terms_used)),
        ("max_laplace_residual", format!("{residual:.6e}")),
    ]
}

fn run_scale(r: &Resolved, emit_residual_table: bool) -> Result<(), RunFailure> {
    let start = Instant::now();
    let table = compute_table(r)?;
    let check = verify_scale(&r.model, r.q, &table, VERIFY_TOL)
        .map_err(|e| RunFailure::Usage(e.to_string()))?;
    let residual = check.max_residual();
    let dt = start.elapsed().as_secs_f64();
    if emit_residual_table {
        write_csv(
            &r.out,
            &table_header(&table, residual),
            ("beta", "residual"),
            check
                .betas
                .iter()
                .copied()
                .zip(check.residuals.iter().copied()),
        )?;
    } else {
        write_csv(
            &r.out,
            &table_header(&table, residual),
            ("x", "W"),
            (0..r.grid.len()).map(|j| (r.grid.node(j), table.w.value(j))),
        )?;
    }
    let status = if check.passed { "PASS" } else { "FAIL" };
    println!(
        "method={} terms={} residual<{:.3e} runtime={:.2}s {status}",
        table.method.as_str(),
        table.report.terms_used,
        residual.max(1e-300),
        dt
    );
    if !check.passed {
        return Err(RunFailure::Verification(format!(
            "max Laplace residual {residual:.3e} exceeds {VERIFY_TOL:.1e}"
        )));
    }
    Ok(())
}

fn run_ruin(r: &Resolved) -> Result<(), RunFailure> {
    let start = Instant::now();
    if r.model
        .classify()
        .map_err(|e| RunFailure::Usage(e.to_string()))?
        != Regime::BoundedVariation
    {
        return Err(RunFailure::Usage(
            "ruin probabilities need a bounded-variation model".into(),
        ));
    }
    let loading = r
        .model
        .c_double_prime()
        .map_err(|e| RunFailure::Usage(e.to_string()))?;
    if loading <= 0.0 {
        return Err(RunFailure::Usage(format!(
            "net profit condition violated: psi'(0+) = {loading}"
        )));
    }
    let table = scale_bounded_variation(&r.model, 0.0, r.grid, &r.opts).map_err(scale_error)?;
    let check = verify_scale(&r.model, 0.0, &table, VERIFY_TOL)
        .map_err(|e| RunFailure::Usage(e.to_string()))?;
    let residual = check.max_residual();
    let mut header = table_header(&table, residual);
    header.push(("psi_prime_0", format!("{loading}")));
    write_csv(
        &r.out,
        &header,
        ("x", "ruin"),
        (0..r.grid.len()).map(|j| (r.grid.node(j), 1.0 - loading * table.w.value(j))),
    )?;
    let status = if check.passed { "PASS" } else { "FAIL" };
    println!(
        "method={} terms={} residual<{:.3e} runtime={:.2}s {status}",
        table.method.as_str(),
        table.report.terms_used,
        residual.max(1e-300),
        start.elapsed().as_secs_f64()
    );
    if !check.passed {
        return Err(RunFailure::Verification(format!(
            "max Laplace residual {residual:.3e} exceeds {VERIFY_TOL:.1e}"
        )));
    }
    Ok(())
}

fn run_resolvent(r: &Resolved) -> Result<(), RunFailure> {
    let start = Instant::now();
    let nubb = r
        .model
        .integrated_tail_grid(r.grid)
        .map_err(|e| RunFailure::Usage(e.to_string()))?;
    let res = solve_resolvent(&nubb, None).map_err(|e| RunFailure::Usage(e.to_string()))?;
    let header = vec![
        ("model", r.model.fingerprint()),
        ("h", format!("{}", r.grid.step())),
        ("xmax", format!("{}", r.grid.x_max())),
        ("max_residual", format!("{:.6e}", res.max_residual)),
    ];
    write_csv(
        &r.out,
        &header,
        ("x", "rho"),
        (0..r.grid.len()).map(|j| (r.grid.node(j), res.rho.value(j))),
    )?;
    let ok = res.max_residual < VERIFY_TOL;
    println!(
        "method=direct-volterra residual<{:.3e} runtime={:.2}s {}",
        res.max_residual.max(1e-300),
        start.elapsed().as_secs_f64(),
        if ok { "PASS" } else { "FAIL" }
    );
    if !ok {
        return Err(RunFailure::Verification(format!(
            "resolvent residual {:.3e} exceeds {VERIFY_TOL:.1e}",
            res.max_residual
        )));
    }
    Ok(())
}

fn run_renewal(r: &Resolved) -> Result<(), RunFailure> {
    let start = Instant::now();
    if r.model
        .classify()
        .map_err(|e| RunFailure::Usage(e.to_string()))?
        != Regime::UnboundedVariationNoGaussian
    {
        return Err(RunFailure::Usage(
            "the renewal connection needs an unbounded-variation model".into(),
        ));
    }
    let cpp = r
        .model
        .c_double_prime()
        .map_err(|e| RunFailure::Usage(e.to_string()))?;
    if cpp == 0.0 {
        return Err(RunFailure::Usage(
            "the scale-connection renewal equation needs c'' != 0".into(),
        ));
    }
    let nubb = r
        .model
        .integrated_tail_grid(r.grid)
        .map_err(|e| RunFailure::Usage(e.to_string()))?;
    let g = nubb.scale(-1.0 / cpp);
    let sol = solve_renewal(&g, RenewalVariant::ViaResolvent)
        .map_err(|e| RunFailure::Usage(e.to_string()))?;
    let header = vec![
        ("model", r.model.fingerprint()),
        ("h", format!("{}", r.grid.step())),
        ("xmax", format!("{}", r.grid.x_max())),
        ("variant", sol.variant.to_string()),
        ("equation_residual", format!("{:.6e}", sol.residual_sup)),
    ];
    write_csv(
        &r.out,
        &header,
        ("x", "f"),
        (0..r.grid.len()).map(|j| (r.grid.node(j), sol.f.value(j))),
    )?;
    let ok = sol.residual_sup < VERIFY_TOL;
    println!(
        "method=renewal-{} residual<{:.3e} runtime={:.2}s {}",
        sol.variant,
        sol.residual_sup.max(1e-300),
        start.elapsed().as_secs_f64(),
        if ok { "PASS" } else { "FAIL" }
    );
    if !ok {
        return Err(RunFailure::Verification(format!(
            "renewal residual {:.3e} exceeds {VERIFY_TOL:.1e}",
            sol.residual_sup
        )));
    }
    Ok(())
}

type Runner = fn(&Resolved) -> Result<(), RunFailure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&RunArgs, Runner) = match &cli.command {
        Command::Scale(a) => (a, |r| run_scale(r, false)),
        Command::Ruin(a) => (a, run_ruin),
        Command::Resolvent(a) => (a, run_resolvent),
        Command::Renewal(a) => (a, run_renewal),
        Command::Verify(a) => (a, |r| run_scale(r, true)),
    };
    let resolved = match resolve(args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&resolved) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunFailure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(RunFailure::NotConverged(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(RunFailure::Verification(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
