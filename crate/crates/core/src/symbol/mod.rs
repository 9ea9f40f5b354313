//! Operator-symbol and coordinate expressions over complex numbers.
//!
//! Grammar, loosest binding first:
//!
//! | level | form                    | associativity |
//! |-------|-------------------------|---------------|
//! | 1     | `a + b`, `a - b`        | left          |
//! | 2     | `a * b`, `a / b`        | left          |
//! | 3     | `-a`                    | prefix        |
//! | 4     | `a ^ b`                 | right         |
//! | 5     | literal, name, `f(a)`, `(a)` |          |
//!
//! The exponent of `^` may itself start with a unary minus (`2^-1`).
//! Function calls always need parentheses: `cos(z)`, never `cos z`.
//! Literals are non-negative reals (`2`, `0.5`, `1e-3`); the constants
//! `pi`, `e` and `i` are predefined. Operator symbols may only use the
//! variable `z`; field expressions use `x`, `y`, `z` up to the grid
//! dimension.

mod eval;
mod parse;

use std::fmt;

pub use eval::{
    probe_singularities, Bindings, ProbeOutcome, ProbePoint, SingularityReport, OVERFLOW_CUTOFF,
};
pub use parse::parse;

/// Variables an expression may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variable {
    X,
    Y,
    Z,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::X => "x",
            Variable::Y => "y",
            Variable::Z => "z",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "x" => Some(Variable::X),
            "y" => Some(Variable::Y),
            "z" => Some(Variable::Z),
            _ => None,
        }
    }

    /// Coordinate variable for grid axis `axis`.
    pub fn for_axis(axis: usize) -> Option<Self> {
        [Variable::X, Variable::Y, Variable::Z].get(axis).copied()
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The only variable an operator symbol may use.
pub const SYMBOL_VARS: &[Variable] = &[Variable::Z];

/// Coordinate variables available on a grid of `dims` dimensions.
pub fn field_vars(dims: usize) -> &'static [Variable] {
    const ALL: &[Variable] = &[Variable::X, Variable::Y, Variable::Z];
    &ALL[..dims.min(3)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
    I,
}

impl Constant {
    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::E => "e",
            Constant::I => "i",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "pi" => Some(Constant::Pi),
            "e" => Some(Constant::E),
            "i" => Some(Constant::I),
            _ => None,
        }
    }
}

/// Built-in functions. New entries need a name here and a rule in `eval`;
/// the grammar does not change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Exp,
    Cos,
    Sin,
    Tan,
    Sqrt,
    Log,
    Abs,
}

impl Function {
    pub const ALL: [Function; 7] = [
        Function::Exp,
        Function::Cos,
        Function::Sin,
        Function::Tan,
        Function::Sqrt,
        Function::Log,
        Function::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Exp => "exp",
            Function::Cos => "cos",
            Function::Sin => "sin",
            Function::Tan => "tan",
            Function::Sqrt => "sqrt",
            Function::Log => "log",
            Function::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Function::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
            BinaryOp::Pow => 4,
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolExpr {
    Number(f64),
    Const(Constant),
    Var(Variable),
    Neg(Box<SymbolExpr>),
    Binary(BinaryOp, Box<SymbolExpr>, Box<SymbolExpr>),
    Call(Function, Box<SymbolExpr>),
}

const NEG_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 5;

impl SymbolExpr {
    pub fn var(v: Variable) -> Self {
        SymbolExpr::Var(v)
    }

    pub fn number(value: f64) -> Self {
        SymbolExpr::Number(value)
    }

    pub fn binary(op: BinaryOp, lhs: SymbolExpr, rhs: SymbolExpr) -> Self {
        SymbolExpr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(func: Function, arg: SymbolExpr) -> Self {
        SymbolExpr::Call(func, Box::new(arg))
    }

    /// Calls `visit` on every variable occurrence.
    pub fn for_each_var(&self, visit: &mut impl FnMut(Variable)) {
        match self {
            SymbolExpr::Number(_) | SymbolExpr::Const(_) => {}
            SymbolExpr::Var(v) => visit(*v),
            SymbolExpr::Neg(a) | SymbolExpr::Call(_, a) => a.for_each_var(visit),
            SymbolExpr::Binary(_, a, b) => {
                a.for_each_var(visit);
                b.for_each_var(visit);
            }
        }
    }

    /// Distinct variables referenced, sorted.
    pub fn variables(&self) -> Vec<Variable> {
        let mut vars = Vec::new();
        self.for_each_var(&mut |v| {
            if !vars.contains(&v) {
                vars.push(v);
            }
        });
        vars.sort();
        vars
    }

    fn precedence(&self) -> u8 {
        match self {
            SymbolExpr::Binary(op, ..) => op.precedence(),
            SymbolExpr::Neg(_) => NEG_PRECEDENCE,
            _ => ATOM_PRECEDENCE,
        }
    }

    fn write_wrapped(&self, f: &mut fmt::Formatter<'_>, wrap: bool) -> fmt::Result {
        if wrap {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }

    // Exponent position accepts `-` exponent | power.
    fn write_exponent(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolExpr::Neg(inner) => {
                f.write_str("-")?;
                inner.write_exponent(f)
            }
            other => other.write_wrapped(f, other.precedence() < BinaryOp::Pow.precedence()),
        }
    }
}

/// Unparses with the minimum parentheses that re-parse to the same tree.
impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolExpr::Number(v) => write!(f, "{v}"),
            SymbolExpr::Const(c) => f.write_str(c.name()),
            SymbolExpr::Var(v) => f.write_str(v.name()),
            SymbolExpr::Neg(inner) => {
                f.write_str("-")?;
                inner.write_wrapped(f, inner.precedence() < NEG_PRECEDENCE)
            }
            SymbolExpr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
            SymbolExpr::Binary(BinaryOp::Pow, base, exp) => {
                base.write_wrapped(f, base.precedence() < ATOM_PRECEDENCE)?;
                f.write_str("^")?;
                exp.write_exponent(f)
            }
            SymbolExpr::Binary(op, lhs, rhs) => {
                let p = op.precedence();
                lhs.write_wrapped(f, lhs.precedence() < p)?;
                write!(f, "{}", op.symbol())?;
                rhs.write_wrapped(f, rhs.precedence() <= p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_expr() -> impl Strategy<Value = SymbolExpr> {
        let leaf = prop_oneof![
            (0u32..1000, 0u32..4)
                .prop_map(|(m, e)| SymbolExpr::Number(m as f64 / 10f64.powi(e as i32))),
            Just(SymbolExpr::Const(Constant::Pi)),
            Just(SymbolExpr::Const(Constant::I)),
            Just(SymbolExpr::Const(Constant::E)),
            Just(SymbolExpr::Var(Variable::Z)),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            let op = prop_oneof![
                Just(BinaryOp::Add),
                Just(BinaryOp::Sub),
                Just(BinaryOp::Mul),
                Just(BinaryOp::Div),
                Just(BinaryOp::Pow),
            ];
            let func = (0usize..Function::ALL.len()).prop_map(|i| Function::ALL[i]);
            prop_oneof![
                inner.clone().prop_map(|a| SymbolExpr::Neg(Box::new(a))),
                (op, inner.clone(), inner.clone())
                    .prop_map(|(o, a, b)| SymbolExpr::binary(o, a, b)),
                (func, inner).prop_map(|(f, a)| SymbolExpr::call(f, a)),
            ]
        })
    }

    proptest! {
        #[test]
        fn unparse_reparse_is_structural_identity(expr in arb_expr()) {
            let text = expr.to_string();
            let back = parse(&text, SYMBOL_VARS).unwrap();
            prop_assert_eq!(&back, &expr);
            prop_assert_eq!(back.to_string(), text);
        }
    }

    #[test]
    fn minimal_parentheses() {
        let cases = [
            ("cos(z^2)", "cos(z^2)"),
            ("(1+z)*2", "(1+z)*2"),
            ("1+(z*2)", "1+z*2"),
            ("1-(2-z)", "1-(2-z)"),
            ("(1-2)-z", "1-2-z"),
            ("z^2^3", "z^2^3"),
            ("(z^2)^3", "(z^2)^3"),
            ("-z^2", "-z^2"),
            ("(-z)^2", "(-z)^2"),
            ("2^-z", "2^-z"),
            ("2^(-z+1)", "2^(-z+1)"),
            ("exp(z)*z", "exp(z)*z"),
        ];
        for (src, want) in cases {
            assert_eq!(parse(src, SYMBOL_VARS).unwrap().to_string(), want, "{src}");
        }
    }

    #[test]
    fn variables_are_collected() {
        let e = parse("x*y + sin(x)", field_vars(2)).unwrap();
        assert_eq!(e.variables(), vec![Variable::X, Variable::Y]);
    }
}
