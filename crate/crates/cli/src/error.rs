use std::fmt;
use std::process::ExitCode;

use specgrad::{GridError, IoError, OperatorError, OracleError, ParseError, SampleError};

/// Where a run failed; decides the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Io,
    Parse,
    Field,
    Operator,
    Verify,
}

impl Stage {
    fn name(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Io => "io",
            Stage::Parse => "parse",
            Stage::Field => "field",
            Stage::Operator => "operator",
            Stage::Verify => "verify",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Stage::Verify => 1,
            Stage::Config | Stage::Io | Stage::Parse => 2,
            Stage::Field | Stage::Operator => 3,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub stage: Stage,
    pub message: String,
    pub hint: Option<String>,
}

impl CliError {
    pub fn new(stage: Stage, message: impl Into<String>) -> Self {
        CliError {
            stage,
            message: message.into(),
            hint: None,
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Stage::Config, message)
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.stage.exit_code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.stage.name(), self.message)?;
        if let Some(hint) = &self.hint {
            write!(f, "\nhint: {hint}")?;
        }
        Ok(())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::new(Stage::Parse, e.to_string())
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        CliError::config(format!("grid: {e}"))
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::new(Stage::Io, e.to_string())
    }
}

impl From<SampleError> for CliError {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::Parse(p) => p.into(),
            other => CliError::new(Stage::Field, other.to_string()),
        }
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::Parse(p) => p.into(),
            OperatorError::Grid(g) => g.into(),
            e @ (OperatorError::SymbolVariable(_) | OperatorError::BetaLength { .. }) => CliError::config(e.to_string()),
            e @ OperatorError::Domain { .. } if is_pole(&e) => CliError::new(Stage::Operator, e.to_string())
                .with_hint("use `apply --kind inverse-derivative` (spectral, mean-zero) or `--kind sgn-kernel` (real-space quadrature)"),
            other => CliError::new(Stage::Operator, other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Operator(o) => o.into(),
            OracleError::Sample(s) => s.into(),
            OracleError::Grid(g) => g.into(),
            other => CliError::config(other.to_string()),
        }
    }
}

pub fn is_pole(e: &OperatorError) -> bool {
    matches!(e, OperatorError::Domain { k, .. } if k.iter().all(|&v| v == 0.0))
}

pub fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::new(Stage::Io, format!("{}: {e}", path.display()))
}
