//! JSON job configuration and its merge with command-line flags.
//!
//! ```json
//! {
//!   "grid": { "n": [64], "spacing": ["2*pi/64"], "origin": [0] },
//!   "field": "sin(x)",
//!   "operator": { "symbol": "exp(z)", "kind": "dot-gradient", "beta": [[1.5707963267948966, 0]] },
//!   "out": "shifted.csv"
//! }
//! ```
//!
//! Numbers may be given as JSON numbers, `[re, im]` pairs, or constant
//! expressions such as `"pi/2"`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Deserialize;
use specgrad::io::FieldFormat;
use specgrad::symbol::Bindings;
use specgrad::{parse, Grid};

use crate::error::{io_error, CliError};

/// Operators the `apply` command can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// f(beta . grad) as a Fourier multiplier
    DotGradient,
    /// f(laplacian) as a Fourier multiplier
    Laplacian,
    /// exp(beta . grad): band-limited translation by beta
    Shift,
    /// spectral inverse of beta d/dx, zero mean
    InverseDerivative,
    /// (1/2beta) [int_{-inf}^x - int_x^inf], by quadrature
    SgnKernel,
    /// exp(beta d/dx) beta d/dx: derivative then shift
    ShiftedDerivative,
    /// cos((beta d/dx)^2) by direct quadrature of its kernel
    FresnelQuadrature,
    /// exp(alpha laplacian) by real-space heat-kernel convolution
    HeatRealspace,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::DotGradient => "dot-gradient",
            Kind::Laplacian => "laplacian",
            Kind::Shift => "shift",
            Kind::InverseDerivative => "inverse-derivative",
            Kind::SgnKernel => "sgn-kernel",
            Kind::ShiftedDerivative => "shifted-derivative",
            Kind::FresnelQuadrature => "fresnel-quadrature",
            Kind::HeatRealspace => "heat-realspace",
        }
    }

    pub fn uses_symbol(self) -> bool {
        matches!(self, Kind::DotGradient | Kind::Laplacian)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl From<Format> for FieldFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => FieldFormat::Csv,
            Format::Json => FieldFormat::Json,
        }
    }
}

/// A scalar as written in a config file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Real(f64),
    Pair([f64; 2]),
    Expr(String),
}

impl Number {
    pub fn complex(&self, what: &str) -> Result<Complex64, CliError> {
        match self {
            Number::Real(v) => Ok(Complex64::new(*v, 0.0)),
            Number::Pair([re, im]) => Ok(Complex64::new(*re, *im)),
            Number::Expr(text) => constant(text, what),
        }
    }

    pub fn real(&self, what: &str) -> Result<f64, CliError> {
        let v = self.complex(what)?;
        if v.im != 0.0 {
            return Err(CliError::config(format!("{what} must be real, got {v}")));
        }
        Ok(v.re)
    }
}

/// Evaluates an expression with no variables.
pub fn constant(text: &str, what: &str) -> Result<Complex64, CliError> {
    let expr = parse(text, &[])
        .map_err(|e| CliError::from(e).with_hint(format!("while reading {what} `{text}`")))?;
    let v = expr
        .eval(&Bindings::new())
        .map_err(|e| CliError::config(format!("{what} `{text}`: {e}")))?;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(CliError::config(format!("{what} `{text}` is not finite")));
    }
    Ok(v)
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dims: Option<usize>,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub spacing: Vec<Number>,
    #[serde(default)]
    pub origin: Vec<Number>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub symbol: Option<String>,
    pub kind: Option<Kind>,
    #[serde(default)]
    pub beta: Vec<Number>,
    pub alpha: Option<Number>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Informational; the subcommand on the command line decides.
    pub command: Option<String>,
    #[serde(default)]
    pub grid: GridConfig,
    pub field: Option<String>,
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub operator: OperatorConfig,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub diagnostics: Option<PathBuf>,
    pub closed_out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub cases: Vec<String>,
    /// Per-case tolerance overrides for `verify`.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub trials: Option<usize>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Reads `path` when given, otherwise starts empty.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn set_field(&mut self, expr: String) {
        self.field = Some(expr);
        self.input = None;
    }

    pub fn set_input(&mut self, path: PathBuf) {
        self.input = Some(path);
        self.field = None;
    }

    pub fn grid_configured(&self) -> bool {
        !(self.grid.n.is_empty() && self.grid.spacing.is_empty() && self.grid.origin.is_empty())
    }

    /// Builds the grid; origin defaults to zero on every axis.
    pub fn grid(&self) -> Result<Grid, CliError> {
        let g = &self.grid;
        if g.n.is_empty() {
            return Err(CliError::config("grid: `n` is required (e.g. --grid-n 64)"));
        }
        if g.spacing.is_empty() {
            return Err(CliError::config(
                "grid: `spacing` is required (e.g. --grid-spacing 2*pi/64)",
            ));
        }
        let dims = g.dims.unwrap_or(g.n.len());
        let spacing = g
            .spacing
            .iter()
            .map(|s| s.real("grid spacing"))
            .collect::<Result<Vec<_>, _>>()?;
        let origin = if g.origin.is_empty() {
            vec![0.0; dims]
        } else {
            g.origin
                .iter()
                .map(|s| s.real("grid origin"))
                .collect::<Result<Vec<_>, _>>()?
        };
        Ok(Grid::new(dims, &g.n, &spacing, &origin)?)
    }

    pub fn beta(&self) -> Result<Vec<Complex64>, CliError> {
        self.operator
            .beta
            .iter()
            .map(|b| b.complex("beta"))
            .collect()
    }

    /// The single beta component of a 1D operator.
    pub fn beta_1d(&self) -> Result<Complex64, CliError> {
        match self.beta()?[..] {
            [b] => Ok(b),
            [] => Err(CliError::config("beta is required (e.g. --beta 0.5)")),
            ref more => Err(CliError::config(format!(
                "this operator takes one beta component, got {}",
                more.len()
            ))),
        }
    }

    pub fn real_beta_1d(&self) -> Result<f64, CliError> {
        let b = self.beta_1d()?;
        if b.im != 0.0 {
            return Err(CliError::config(format!(
                "this operator needs a real beta, got {b}"
            )));
        }
        Ok(b.re)
    }

    pub fn alpha(&self) -> Result<f64, CliError> {
        self.operator
            .alpha
            .as_ref()
            .ok_or_else(|| CliError::config("alpha is required (e.g. --alpha 0.5)"))?
            .real("alpha")
    }

    pub fn out(&self) -> Result<&Path, CliError> {
        self.out
            .as_deref()
            .ok_or_else(|| CliError::config("an output path is required (--out FILE)"))
    }
}
