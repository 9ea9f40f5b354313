use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BinaryOp, Constant, Function, SymbolExpr, Variable};
use crate::error::EvalError;

/// Any intermediate value larger than this in magnitude is an overflow.
pub const OVERFLOW_CUTOFF: f64 = 1e300;

/// Integer exponents up to this size use repeated multiplication.
const MAX_INTEGER_POWER: f64 = 1024.0;

/// Values for the variables of an expression.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Bindings {
    values: [Option<Complex64>; 3],
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds only `z`, the operator-symbol argument.
    pub fn z(value: Complex64) -> Self {
        Self::new().with(Variable::Z, value)
    }

    pub fn with(mut self, var: Variable, value: Complex64) -> Self {
        self.set(var, value);
        self
    }

    pub fn set(&mut self, var: Variable, value: Complex64) {
        self.values[var as usize] = Some(value);
    }

    pub fn get(&self, var: Variable) -> Option<Complex64> {
        self.values[var as usize]
    }
}

fn checked(v: Complex64) -> Result<Complex64, EvalError> {
    if v.re.is_finite() && v.im.is_finite() && v.norm() <= OVERFLOW_CUTOFF {
        Ok(v)
    } else {
        Err(EvalError::Overflow)
    }
}

fn power(base: Complex64, exp: Complex64) -> Result<Complex64, EvalError> {
    let zero = Complex64::new(0.0, 0.0);
    if exp.im == 0.0 && exp.re.fract() == 0.0 && exp.re.abs() <= MAX_INTEGER_POWER {
        let n = exp.re as i32;
        if base == zero && n < 0 {
            return Err(EvalError::Domain("zero raised to a negative power"));
        }
        return checked(base.powi(n));
    }
    if base == zero {
        return if exp.re > 0.0 {
            Ok(zero)
        } else {
            Err(EvalError::Domain(
                "zero raised to a power with non-positive real part",
            ))
        };
    }
    checked(base.powc(exp))
}

fn apply(func: Function, a: Complex64) -> Result<Complex64, EvalError> {
    let v = match func {
        Function::Exp => a.exp(),
        Function::Cos => a.cos(),
        Function::Sin => a.sin(),
        Function::Tan => a.tan(),
        Function::Sqrt => a.sqrt(),
        Function::Log => {
            if a == Complex64::new(0.0, 0.0) {
                return Err(EvalError::Domain("logarithm of zero"));
            }
            a.ln()
        }
        Function::Abs => Complex64::new(a.norm(), 0.0),
    };
    checked(v)
}

impl SymbolExpr {
    /// Evaluates with principal branches for `sqrt`, `log` and non-integer powers.
    pub fn eval(&self, bindings: &Bindings) -> Result<Complex64, EvalError> {
        let v = match self {
            SymbolExpr::Number(v) => Complex64::new(*v, 0.0),
            SymbolExpr::Const(Constant::Pi) => Complex64::new(PI, 0.0),
            SymbolExpr::Const(Constant::E) => Complex64::new(E, 0.0),
            SymbolExpr::Const(Constant::I) => Complex64::new(0.0, 1.0),
            SymbolExpr::Var(var) => bindings.get(*var).ok_or(EvalError::Unbound(*var))?,
            // 0 - a, not -a: a negated real literal keeps a +0 imaginary part
            // and so stays on the principal side of the sqrt/log branch cut.
            SymbolExpr::Neg(a) => Complex64::new(0.0, 0.0) - a.eval(bindings)?,
            SymbolExpr::Call(func, a) => return apply(*func, a.eval(bindings)?),
            SymbolExpr::Binary(op, a, b) => {
                let (a, b) = (a.eval(bindings)?, b.eval(bindings)?);
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == Complex64::new(0.0, 0.0) {
                            return Err(EvalError::Domain("division by zero"));
                        }
                        a / b
                    }
                    BinaryOp::Pow => return power(a, b),
                }
            }
        };
        checked(v)
    }

    /// Shorthand for evaluating an operator symbol at `z`.
    pub fn eval_z(&self, z: Complex64) -> Result<Complex64, EvalError> {
        self.eval(&Bindings::z(z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ProbeOutcome {
    Finite { value: Complex64 },
    Overflow,
    DomainError,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub arg: Complex64,
    #[serde(flatten)]
    pub outcome: ProbeOutcome,
}

/// Per-point evaluation outcomes of a symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub points: Vec<ProbePoint>,
    /// Largest magnitude among finite outcomes; `None` when no probe was finite.
    pub max_finite_magnitude: Option<f64>,
}

impl SingularityReport {
    pub fn has_singularity(&self) -> bool {
        self.points
            .iter()
            .any(|p| !matches!(p.outcome, ProbeOutcome::Finite { .. }))
    }
}

/// Evaluates `expr` (in `z`) at each sample argument, recording rather than
/// propagating domain errors and overflows.
pub fn probe_singularities(expr: &SymbolExpr, sample_args: &[Complex64]) -> SingularityReport {
    let points: Vec<ProbePoint> = sample_args
        .iter()
        .map(|&arg| {
            let outcome = match expr.eval_z(arg) {
                Ok(value) => ProbeOutcome::Finite { value },
                Err(EvalError::Overflow) => ProbeOutcome::Overflow,
                Err(_) => ProbeOutcome::DomainError,
            };
            ProbePoint { arg, outcome }
        })
        .collect();
    let max_finite_magnitude = points
        .iter()
        .filter_map(|p| match p.outcome {
            ProbeOutcome::Finite { value } => Some(value.norm()),
            _ => None,
        })
        .fold(None, |acc: Option<f64>, m| {
            Some(acc.map_or(m, |a| a.max(m)))
        });
    SingularityReport {
        points,
        max_finite_magnitude,
    }
}
