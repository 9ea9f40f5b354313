use thiserror::Error;

use crate::operator::StabilityReport;
use crate::symbol::Variable;

/// Grid, field, and transform errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid dimension must be 1, 2 or 3, got {0}")]
    Dims(usize),
    #[error("`{what}` has {got} entries, expected one per axis ({expected})")]
    ArrayLength {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("axis {axis}: need at least 2 samples, got {n}")]
    TooFewSamples { axis: usize, n: usize },
    #[error("axis {axis}: spacing must be finite and positive, got {spacing}")]
    Spacing { axis: usize, spacing: f64 },
    #[error("axis {axis}: origin must be finite, got {origin}")]
    Origin { axis: usize, origin: f64 },
    #[error("axis {axis} out of range for a {dims}-dimensional grid")]
    AxisOutOfRange { axis: usize, dims: usize },
    #[error("field has {got} values but the grid holds {expected}")]
    ValueCount { expected: usize, got: usize },
    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },
    #[error("operands live on different grids")]
    Mismatch,
    #[error("operation requires a 1-dimensional grid, got {0} dimensions")]
    NotOneDimensional(usize),
}

/// Expression syntax errors. Offsets are byte offsets into the source text.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown variable `{name}` at byte {offset} (allowed: {allowed})")]
    UnknownVariable {
        name: String,
        offset: usize,
        allowed: String,
    },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
}

/// Expression evaluation errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("overflow: intermediate magnitude exceeds {cutoff:e}", cutoff = crate::symbol::OVERFLOW_CUTOFF)]
    Overflow,
    #[error("variable `{0}` is not bound")]
    Unbound(Variable),
}

/// Errors while sampling an expression on a grid.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("at grid index {index:?}: {source}")]
    Eval {
        index: Vec<usize>,
        source: EvalError,
    },
}

/// Operator construction and application errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("symbol may only reference `z`, found `{0}`")]
    SymbolVariable(Variable),
    #[error("beta has {got} components, grid has {dims} dimensions")]
    BetaLength { dims: usize, got: usize },
    #[error("beta must be nonzero")]
    ZeroBeta,
    #[error("alpha must be finite and positive, got {0}")]
    Alpha(f64),
    #[error("{}", describe_domain(k, source))]
    Domain { k: Vec<f64>, source: EvalError },
    #[error("{}", describe_amplification(report, *limit))]
    Amplification { report: StabilityReport, limit: f64 },
    #[error("kernel spacing {kernel} does not match grid spacing {grid}, or offsets are not aligned to the grid")]
    KernelAlignment { kernel: f64, grid: f64 },
}

fn describe_amplification(report: &StabilityReport, limit: f64) -> String {
    let growth = if report.max_magnitude.is_finite() {
        format!("multiplier magnitude {:.3e}", report.max_magnitude)
    } else {
        "multiplier overflows".to_string()
    };
    format!(
        "{growth} at k = {:?}, beyond the amplification guard {limit:e}; the symbol is ill-posed on this grid",
        report.argmax_k
    )
}

fn describe_domain(k: &[f64], source: &EvalError) -> String {
    if k.iter().all(|&v| v == 0.0) {
        format!(
            "symbol has a pole at k = 0 ({source}); singular symbols such as 1/z are handled by the inverse-derivative operator"
        )
    } else {
        format!("symbol cannot be evaluated at k = {k:?}: {source}")
    }
}

/// Field and kernel file I/O errors.
#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("malformed field file: {0}")]
    Format(String),
}

/// Oracle-suite errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("brute-force oracle limited to n <= {limit}, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Grid(#[from] GridError),
}
