//! Ground truth for the fast paths: a brute-force discretization of the
//! kernel integral and a catalog of cases with closed-form answers.

mod brute;
mod catalog;

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::OracleError;
use crate::field::{sample_text, Field};
use crate::grid::Grid;
use crate::operator::{
    apply_operator, convolve_kernel, extract_kernel_1d, fresnel_cos_apply, heat_smooth_realspace,
    inverse_derivative, sgn_kernel_apply, shift_field, shifted_derivative_apply, OperatorKind,
    OperatorSpec,
};
use crate::symbol::{parse, SYMBOL_VARS};

pub use brute::{brute_force_apply, BRUTE_FORCE_LIMIT};
pub use catalog::closed_form_catalog;

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 42;

/// Symbols exercised by the randomized brute-force comparison.
pub const EQUIVALENCE_SYMBOLS: [&str; 5] = ["z", "z^2", "exp(z)", "cos(z^2)", "1+z/2"];

/// Tolerance of the brute-force vs FFT comparison.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-10;

/// One computation applied to a case's input field.
#[derive(Debug, Clone, PartialEq)]
pub enum Operation {
    /// Spectral multiplier path.
    Apply {
        symbol: String,
        kind: OperatorKind,
        beta: Vec<Complex64>,
    },
    Shift {
        beta: Vec<f64>,
    },
    HeatRealspace {
        alpha: f64,
    },
    InverseDerivative {
        beta: Complex64,
    },
    /// `beta d/dx` applied to the inverse derivative.
    InverseDerivativeReverify {
        beta: Complex64,
    },
    SgnKernel {
        beta: Complex64,
    },
    ShiftedDerivative {
        beta: f64,
    },
    FresnelQuadrature {
        beta: f64,
    },
    /// Extract the 1D kernel of the symbol and convolve.
    KernelConvolution {
        symbol: String,
        beta: Complex64,
    },
    BruteForce {
        symbol: String,
        beta: Complex64,
    },
}

impl Operation {
    pub fn apply_1d(symbol: &str, beta: f64) -> Self {
        Operation::Apply {
            symbol: symbol.into(),
            kind: OperatorKind::DotGradient,
            beta: vec![Complex64::new(beta, 0.0)],
        }
    }
}

/// What a case's result is compared against.
#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    /// Coordinate expression sampled on the case grid.
    Expression(String),
    /// `scale * erf(x)`, minus `mean(input) * x` when `remove_input_mean`.
    Erf { scale: f64, remove_input_mean: bool },
    /// Another implementation path on the same input.
    Path(Operation),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCase {
    pub name: String,
    pub field: String,
    pub grid: Grid,
    pub operation: Operation,
    pub expected: Expected,
    pub tolerance: f64,
    /// Compare after subtracting each side's mean.
    pub mean_aligned: bool,
    pub provenance: String,
}

/// Runs an [`Operation`] on a field.
pub trait Executor {
    fn execute(&self, op: &Operation, field: &Field) -> Result<Field, OracleError>;
}

/// Executes operations with this crate's implementations.
#[derive(Debug, Clone, Copy, Default)]
pub struct Library;

impl Executor for Library {
    fn execute(&self, op: &Operation, field: &Field) -> Result<Field, OracleError> {
        let out = match op {
            Operation::Apply { symbol, kind, beta } => {
                apply_operator(&OperatorSpec::parse(symbol, *kind, beta.clone())?, field)?
            }
            Operation::Shift { beta } => shift_field(field, beta)?,
            Operation::HeatRealspace { alpha } => heat_smooth_realspace(field, *alpha)?.value,
            Operation::InverseDerivative { beta } => inverse_derivative(field, *beta)?,
            Operation::InverseDerivativeReverify { beta } => {
                let spec = OperatorSpec::parse("z", OperatorKind::DotGradient, vec![*beta])?;
                apply_operator(&spec, &inverse_derivative(field, *beta)?)?
            }
            Operation::SgnKernel { beta } => sgn_kernel_apply(field, *beta)?.value,
            Operation::ShiftedDerivative { beta } => shifted_derivative_apply(field, *beta)?,
            Operation::FresnelQuadrature { beta } => fresnel_cos_apply(field, *beta)?.value,
            Operation::KernelConvolution { symbol, beta } => {
                let symbol =
                    parse(symbol, SYMBOL_VARS).map_err(crate::error::OperatorError::from)?;
                convolve_kernel(&extract_kernel_1d(&symbol, *beta, field.grid())?, field)?
            }
            Operation::BruteForce { symbol, beta } => {
                let symbol =
                    parse(symbol, SYMBOL_VARS).map_err(crate::error::OperatorError::from)?;
                brute_force_apply(&symbol, *beta, field)?
            }
        };
        Ok(out)
    }
}

/// Outcome of one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub name: String,
    pub pass: bool,
    /// `null` when the case failed to run.
    pub max_error: Option<f64>,
    pub seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OracleReport {
    pub results: Vec<CaseResult>,
}

impl OracleReport {
    pub fn success(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| !r.pass).count()
    }

    /// JSON list of `{name, pass, max_error, seconds}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.results).expect("report serializes")
    }

    pub fn table(&self) -> String {
        let width = self
            .results
            .iter()
            .map(|r| r.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:<6}  {:>10}  {:>9}",
            "case", "status", "max_error", "seconds"
        );
        for r in &self.results {
            let err = r
                .max_error
                .map_or_else(|| "-".to_string(), |e| format!("{e:.3e}"));
            let status = if r.pass { "pass" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{:<width$}  {:<6}  {:>10}  {:>9.4}",
                r.name, status, err, r.seconds
            );
            if let Some(e) = &r.error {
                let _ = writeln!(out, "{:<width$}    error: {e}", "");
            }
        }
        let _ = writeln!(
            out,
            "{} cases, {} failed",
            self.results.len(),
            self.failures()
        );
        out
    }
}

fn expected_field(
    case: &OracleCase,
    input: &Field,
    exec: &dyn Executor,
) -> Result<Field, OracleError> {
    match &case.expected {
        Expected::Expression(text) => Ok(sample_text(text, &case.grid)?),
        Expected::Erf {
            scale,
            remove_input_mean,
        } => {
            let slope = if *remove_input_mean {
                input.mean()
            } else {
                Complex64::new(0.0, 0.0)
            };
            Ok(Field::from_fn(case.grid.clone(), |p| {
                Complex64::new(scale * erf(p[0]), 0.0) - slope * p[0]
            })?)
        }
        Expected::Path(op) => exec.execute(op, input),
    }
}

fn run_case(case: &OracleCase, exec: &dyn Executor) -> Result<f64, OracleError> {
    let input = sample_text(&case.field, &case.grid)?;
    let mut actual = exec.execute(&case.operation, &input)?;
    let mut expected = expected_field(case, &input, exec)?;
    if case.mean_aligned {
        actual = actual.mean_removed();
        expected = expected.mean_removed();
    }
    Ok(actual
        .max_abs_diff(&expected)
        .ok_or(crate::error::GridError::Mismatch)?)
}

/// Runs every case; failures are recorded, never raised. A case passes only
/// with a positive tolerance that bounds its max absolute error.
pub fn run_oracles(cases: &[OracleCase], exec: &dyn Executor) -> OracleReport {
    let results = cases
        .iter()
        .map(|case| {
            let start = Instant::now();
            let outcome = run_case(case, exec);
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok(err) => CaseResult {
                    name: case.name.clone(),
                    pass: case.tolerance > 0.0 && err <= case.tolerance,
                    max_error: Some(err),
                    seconds,
                    error: None,
                },
                Err(e) => CaseResult {
                    name: case.name.clone(),
                    pass: false,
                    max_error: None,
                    seconds,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    OracleReport { results }
}

/// Randomized brute-force vs FFT comparisons: `trials` random complex fields
/// on `[0, 2pi)` with `n` alternating 16/64, symbols cycling through
/// [`EQUIVALENCE_SYMBOLS`], and real beta drawn from `[0.1, 2]`. The error
/// is measured relative to `max(1, max |output|)`.
pub fn brute_force_trials(seed: u64, trials: usize) -> Vec<CaseResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|t| {
            let n = if t % 2 == 0 { 16 } else { 64 };
            let symbol = EQUIVALENCE_SYMBOLS[t % EQUIVALENCE_SYMBOLS.len()];
            let beta = rng.random_range(0.1..=2.0);
            let values: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let name = format!("brute-force-{t:02}-n{n}-{symbol}");
            let start = Instant::now();
            let outcome = (|| -> Result<f64, OracleError> {
                let grid = Grid::interval(n, 0.0, 2.0 * std::f64::consts::PI)?;
                let field = Field::new(grid, values)?;
                let b = Complex64::new(beta, 0.0);
                let fast = Library.execute(&Operation::apply_1d(symbol, beta), &field)?;
                let slow = Library.execute(
                    &Operation::BruteForce {
                        symbol: symbol.into(),
                        beta: b,
                    },
                    &field,
                )?;
                let scale = fast.max_abs().max(1.0);
                Ok(fast.max_abs_diff(&slow).expect("same grid") / scale)
            })();
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok(err) => CaseResult {
                    name,
                    pass: err <= EQUIVALENCE_TOLERANCE,
                    max_error: Some(err),
                    seconds,
                    error: None,
                },
                Err(e) => CaseResult {
                    name,
                    pass: false,
                    max_error: None,
                    seconds,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}
