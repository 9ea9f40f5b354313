use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use specgrad::io::{read_field, write_field, write_kernel_csv, FieldFormat};
use specgrad::operator::{
    apply_multiplier, build_multiplier, extract_kernel_1d, fresnel_cos_apply,
    heat_smooth_realspace, inverse_derivative, sgn_kernel_apply, shifted_derivative_apply,
    ClosedForm, Diagnosed, OperatorKind, OperatorSpec, StabilityReport, Warning,
};
use specgrad::oracle::{
    brute_force_trials, closed_form_catalog, run_oracles, Library, OracleReport, DEFAULT_SEED,
};
use specgrad::symbol::{Function, SymbolExpr, Variable, SYMBOL_VARS};
use specgrad::{field::sample_text, parse, Field, OperatorError};

use crate::config::{JobConfig, Kind};
use crate::error::{io_error, is_pole, CliError, Stage};

/// Randomized brute-force trials run by `verify` unless configured otherwise.
pub const DEFAULT_TRIALS: usize = 20;

const DEFAULT_REPORT: &str = "verify-report.json";

/// Share of the grid period, centred on zero, where closed-form kernels are compared.
const KERNEL_COMPARE_FRACTION: f64 = 0.8;

fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("summary serializes")
    );
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("summary serializes");
    fs::write(path, text + "\n").map_err(|e| io_error(path, e))
}

fn load_field(cfg: &JobConfig) -> Result<Field, CliError> {
    match (&cfg.field, &cfg.input) {
        (Some(_), Some(_)) => Err(CliError::config(
            "give exactly one input field: `field` or `input`, not both",
        )),
        (None, None) => Err(CliError::config(
            "no input field: pass --field EXPR or --input FILE",
        )),
        (Some(expr), None) => Ok(sample_text(expr, &cfg.grid()?)?),
        (None, Some(path)) => {
            let field = read_field(path)
                .map_err(|e| CliError::new(Stage::Io, format!("{}: {e}", path.display())))?;
            if cfg.grid_configured() && &cfg.grid()? != field.grid() {
                return Err(CliError::config(format!(
                    "the configured grid does not match the grid of {}",
                    path.display()
                )));
            }
            Ok(field)
        }
    }
}

fn spectral(spec: &OperatorSpec, field: &Field) -> Result<(Field, StabilityReport), CliError> {
    match build_multiplier(spec, field.grid()) {
        Ok(mult) => {
            let report = mult.report(specgrad::operator::AMPLIFICATION_LIMIT);
            Ok((apply_multiplier(&mult, field)?, report))
        }
        Err(OperatorError::Amplification { report, limit }) => {
            print_json(&json!({ "stability": report }));
            Err(OperatorError::Amplification { report, limit }.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn warned(d: Diagnosed<Field>) -> (Field, Vec<Warning>) {
    (d.value, d.warnings)
}

pub fn apply(cfg: &JobConfig) -> Result<(), CliError> {
    let kind = cfg.operator.kind.unwrap_or(Kind::DotGradient);
    if !kind.uses_symbol() && cfg.operator.symbol.is_some() {
        return Err(CliError::config(format!(
            "--kind {} does not take a symbol",
            kind.name()
        )));
    }
    let out = cfg.out()?;
    let field = load_field(cfg)?;

    let mut stability = None;
    let (result, warnings) = match kind {
        Kind::DotGradient | Kind::Laplacian => {
            let text = cfg.operator.symbol.as_deref().ok_or_else(|| {
                CliError::config(format!("--kind {} needs --symbol", kind.name()))
            })?;
            let spec = if kind == Kind::DotGradient {
                OperatorSpec::parse(text, OperatorKind::DotGradient, cfg.beta()?)?
            } else {
                if !cfg.operator.beta.is_empty() {
                    return Err(CliError::config("--kind laplacian does not take beta"));
                }
                OperatorSpec::parse(text, OperatorKind::Laplacian, Vec::new())?
            };
            let (f, report) = spectral(&spec, &field)?;
            stability = Some(report);
            (f, Vec::new())
        }
        Kind::Shift => {
            let beta = cfg.beta()?;
            if beta.iter().any(|b| b.im != 0.0) {
                return Err(CliError::config("shift needs real beta components"));
            }
            let spec = OperatorSpec::dot_gradient(
                SymbolExpr::call(Function::Exp, SymbolExpr::var(Variable::Z)),
                beta,
            )?;
            let (f, report) = spectral(&spec, &field)?;
            stability = Some(report);
            (f, Vec::new())
        }
        Kind::InverseDerivative => (inverse_derivative(&field, cfg.beta_1d()?)?, Vec::new()),
        Kind::SgnKernel => warned(sgn_kernel_apply(&field, cfg.beta_1d()?)?),
        Kind::ShiftedDerivative => (
            shifted_derivative_apply(&field, cfg.real_beta_1d()?)?,
            Vec::new(),
        ),
        Kind::FresnelQuadrature => warned(fresnel_cos_apply(&field, cfg.real_beta_1d()?)?),
        Kind::HeatRealspace => warned(heat_smooth_realspace(&field, cfg.alpha()?)?),
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let format = cfg
        .format
        .map_or_else(|| FieldFormat::from_path(out), Into::into);
    write_field(&result, out, format)?;

    let summary = json!({
        "kind": kind.name(),
        "out": out.display().to_string(),
        "stability": stability,
        "warnings": warnings,
    });
    print_json(&summary);
    if let Some(path) = &cfg.diagnostics {
        write_json(path, &summary)?;
    }
    Ok(())
}

fn closed_path(cfg: &JobConfig, out: &Path) -> PathBuf {
    cfg.closed_out.clone().unwrap_or_else(|| {
        let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("kernel");
        out.with_file_name(format!("{stem}_closed.csv"))
    })
}

fn write_kernel(path: &Path, kernel: &specgrad::operator::Kernel1D) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    Ok(write_kernel_csv(kernel, BufWriter::new(file))?)
}

pub fn kernel(cfg: &JobConfig) -> Result<(), CliError> {
    let grid = cfg.grid()?;
    if grid.dims() != 1 {
        return Err(CliError::config(format!(
            "kernel extraction is 1D-only; the grid has {} dimensions",
            grid.dims()
        )));
    }
    let text = cfg
        .operator
        .symbol
        .as_deref()
        .ok_or_else(|| CliError::config("kernel needs --symbol"))?;
    let symbol = parse(text, SYMBOL_VARS)?;
    let beta = cfg.beta_1d()?;
    let out = cfg.out()?;
    let closed = ClosedForm::recognize(&symbol, beta);

    let extracted = match extract_kernel_1d(&symbol, beta, &grid) {
        Ok(k) => k,
        Err(e) if is_pole(&e) && matches!(closed, Some(ClosedForm::Sign { .. })) => {
            let form = closed.expect("matched above");
            let path = closed_path(cfg, out);
            write_kernel(&path, &form.tabulate_on(&grid, beta)?)?;
            return Err(CliError::new(Stage::Operator, e.to_string()).with_hint(format!(
                "its kernel is the closed form sgn(rho)/(2 beta), written to {}; apply it with `apply --kind sgn-kernel`",
                path.display()
            )));
        }
        Err(e) => return Err(e.into()),
    };
    let table = extracted.central_period(&grid)?;
    write_kernel(out, &table)?;

    let closed_summary = match closed {
        Some(form) => {
            let reference = form.tabulate(&table);
            let path = closed_path(cfg, out);
            write_kernel(&path, &reference)?;
            let reach = 0.5 * KERNEL_COMPARE_FRACTION * grid.period(0);
            let deviation = table
                .offsets()
                .iter()
                .zip(table.values().iter().zip(reference.values()))
                .filter(|(r, _)| r.abs() <= reach)
                .map(|(_, (a, b))| (a - b).norm())
                .fold(0.0, f64::max);
            json!({
                "name": form.name(),
                "out": path.display().to_string(),
                "compared_within": reach,
                "max_deviation": deviation,
            })
        }
        None => Value::Null,
    };
    print_json(&json!({
        "symbol": symbol.to_string(),
        "beta": [beta.re, beta.im],
        "out": out.display().to_string(),
        "offsets": table.offsets().len(),
        "mass": [table.mass().re, table.mass().im],
        "closed_form": closed_summary,
    }));
    Ok(())
}

fn seed() -> Result<u64, CliError> {
    match std::env::var("SPECGRAD_SEED") {
        Ok(text) => text.trim().parse().map_err(|_| {
            CliError::config(format!(
                "SPECGRAD_SEED must be an unsigned integer, got `{text}`"
            ))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn verify(cfg: &JobConfig) -> Result<(), CliError> {
    let seed = seed()?;
    let mut catalog = closed_form_catalog();
    for (name, &tol) in &cfg.tolerances {
        let case = catalog
            .iter_mut()
            .find(|c| &c.name == name)
            .ok_or_else(|| {
                CliError::config(format!("tolerance override for unknown case `{name}`"))
            })?;
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::config(format!(
                "tolerance for `{name}` must be positive, got {tol}"
            )));
        }
        case.tolerance = tol;
    }
    let trials = brute_force_trials(seed, cfg.trials.unwrap_or(DEFAULT_TRIALS));

    let wanted = |name: &str| cfg.cases.is_empty() || cfg.cases.iter().any(|c| c == name);
    if let Some(unknown) = cfg
        .cases
        .iter()
        .find(|c| !catalog.iter().any(|k| &k.name == *c) && !trials.iter().any(|t| &t.name == *c))
    {
        let names: Vec<_> = catalog.iter().map(|c| c.name.as_str()).collect();
        return Err(CliError::config(format!("unknown case `{unknown}`"))
            .with_hint(format!("catalog cases: {}", names.join(", "))));
    }
    catalog.retain(|c| wanted(&c.name));

    let mut report: OracleReport = run_oracles(&catalog, &Library);
    report
        .results
        .extend(trials.into_iter().filter(|t| wanted(&t.name)));

    print!("{}", report.table());
    let path = cfg
        .report
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_REPORT));
    fs::write(&path, report.to_json() + "\n").map_err(|e| io_error(&path, e))?;
    println!("report written to {} (seed {seed})", path.display());

    if report.success() {
        Ok(())
    } else {
        Err(CliError::new(
            Stage::Verify,
            format!(
                "{} of {} cases failed",
                report.failures(),
                report.results.len()
            ),
        ))
    }
}
