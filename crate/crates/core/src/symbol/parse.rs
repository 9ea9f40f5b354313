use super::{BinaryOp, Constant, Function, SymbolExpr, Variable};
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number {v}"),
            Token::Ident(name) => format!("`{name}`"),
            Token::Op(c) => format!("`{c}`"),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => pos += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                tokens.push((pos, Token::Op(c as char)));
                pos += 1;
            }
            b'(' => {
                tokens.push((pos, Token::LParen));
                pos += 1;
            }
            b')' => {
                tokens.push((pos, Token::RParen));
                pos += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = pos;
                while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.') {
                    pos += 1;
                }
                // Exponent only when digits follow, so `2*e` and `2e` stay distinct from `2e3`.
                if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
                    let mut look = pos + 1;
                    if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
                        look += 1;
                    }
                    if look < bytes.len() && bytes[look].is_ascii_digit() {
                        pos = look;
                        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                            pos += 1;
                        }
                    }
                }
                let literal = &text[start..pos];
                let value = literal.parse::<f64>().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: "a number".into(),
                    found: format!("`{literal}`"),
                })?;
                tokens.push((start, Token::Number(value)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = pos;
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                tokens.push((start, Token::Ident(text[start..pos].to_string())));
            }
            _ => {
                let ch = text[pos..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: pos,
                    expected: "an operator, number, name or parenthesis".into(),
                    found: format!("`{ch}`"),
                });
            }
        }
    }
    tokens.push((text.len(), Token::End));
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    allowed: &'a [Variable],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn advance(&mut self) -> (usize, Token) {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, want: Token, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<SymbolExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Op('+') => BinaryOp::Add,
                Token::Op('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = SymbolExpr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<SymbolExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Op('*') => BinaryOp::Mul,
                Token::Op('/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = SymbolExpr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<SymbolExpr, ParseError> {
        if *self.peek() == Token::Op('-') {
            self.advance();
            return Ok(SymbolExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<SymbolExpr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Token::Op('^') {
            self.advance();
            let exponent = self.exponent()?;
            return Ok(SymbolExpr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<SymbolExpr, ParseError> {
        if *self.peek() == Token::Op('-') {
            self.advance();
            return Ok(SymbolExpr::Neg(Box::new(self.exponent()?)));
        }
        self.power()
    }

    fn primary(&mut self) -> Result<SymbolExpr, ParseError> {
        match self.peek().clone() {
            Token::Number(v) => {
                self.advance();
                Ok(SymbolExpr::Number(v))
            }
            Token::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(name) => {
                let (offset, _) = self.advance();
                let call = *self.peek() == Token::LParen;
                if let Some(func) = Function::from_name(&name) {
                    if !call {
                        return Err(self.error(&format!("`(` after function name `{name}`")));
                    }
                    self.advance();
                    let arg = self.expr()?;
                    self.expect(Token::RParen, "`)` closing the function argument")?;
                    return Ok(SymbolExpr::call(func, arg));
                }
                if call {
                    return Err(ParseError::UnknownFunction { name, offset });
                }
                if let Some(c) = Constant::from_name(&name) {
                    return Ok(SymbolExpr::Const(c));
                }
                match Variable::from_name(&name) {
                    Some(v) if self.allowed.contains(&v) => Ok(SymbolExpr::Var(v)),
                    _ => Err(ParseError::UnknownVariable {
                        name,
                        offset,
                        allowed: self
                            .allowed
                            .iter()
                            .map(|v| v.name())
                            .collect::<Vec<_>>()
                            .join(", "),
                    }),
                }
            }
            _ => Err(self.error("a number, name or `(`")),
        }
    }
}

/// Parses `text`, accepting only the variables in `allowed`.
pub fn parse(text: &str, allowed: &[Variable]) -> Result<SymbolExpr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
        allowed,
    };
    let expr = parser.expr()?;
    if *parser.peek() != Token::End {
        return Err(parser.error("an operator or end of input"));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{field_vars, SYMBOL_VARS};

    fn z() -> SymbolExpr {
        SymbolExpr::Var(Variable::Z)
    }

    #[test]
    fn function_of_power() {
        let e = parse("cos(z^2)", SYMBOL_VARS).unwrap();
        assert_eq!(
            e,
            SymbolExpr::call(
                Function::Cos,
                SymbolExpr::binary(BinaryOp::Pow, z(), SymbolExpr::Number(2.0))
            )
        );
    }

    #[test]
    fn reciprocal() {
        let e = parse("1/(z)", SYMBOL_VARS).unwrap();
        assert_eq!(
            e,
            SymbolExpr::binary(BinaryOp::Div, SymbolExpr::Number(1.0), z())
        );
    }

    #[test]
    fn call_needs_parentheses() {
        match parse("cos z", SYMBOL_VARS) {
            Err(ParseError::Syntax {
                offset, expected, ..
            }) => {
                assert_eq!(offset, 4);
                assert!(expected.contains("`(`"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        let two = || SymbolExpr::Number(2.0);
        let three = || SymbolExpr::Number(3.0);
        assert_eq!(
            parse("2+3*z", SYMBOL_VARS).unwrap(),
            SymbolExpr::binary(
                BinaryOp::Add,
                two(),
                SymbolExpr::binary(BinaryOp::Mul, three(), z())
            )
        );
        assert_eq!(
            parse("z^2^3", SYMBOL_VARS).unwrap(),
            SymbolExpr::binary(
                BinaryOp::Pow,
                z(),
                SymbolExpr::binary(BinaryOp::Pow, two(), three())
            )
        );
        assert_eq!(
            parse("-z^2", SYMBOL_VARS).unwrap(),
            SymbolExpr::Neg(Box::new(SymbolExpr::binary(BinaryOp::Pow, z(), two())))
        );
        assert_eq!(
            parse("2-3-z", SYMBOL_VARS).unwrap(),
            SymbolExpr::binary(
                BinaryOp::Sub,
                SymbolExpr::binary(BinaryOp::Sub, two(), three()),
                z()
            )
        );
        assert_eq!(
            parse("2^-z", SYMBOL_VARS).unwrap(),
            SymbolExpr::binary(BinaryOp::Pow, two(), SymbolExpr::Neg(Box::new(z())))
        );
    }

    #[test]
    fn numbers_and_constants() {
        assert_eq!(
            parse("1e-3", SYMBOL_VARS).unwrap(),
            SymbolExpr::Number(1e-3)
        );
        assert_eq!(
            parse("2.5E2", SYMBOL_VARS).unwrap(),
            SymbolExpr::Number(250.0)
        );
        assert_eq!(
            parse("2*e", SYMBOL_VARS).unwrap(),
            SymbolExpr::binary(
                BinaryOp::Mul,
                SymbolExpr::Number(2.0),
                SymbolExpr::Const(Constant::E)
            )
        );
        assert!(matches!(
            parse("2e", SYMBOL_VARS),
            Err(ParseError::Syntax { offset: 1, .. })
        ));
        assert_eq!(parse("pi", &[]).unwrap(), SymbolExpr::Const(Constant::Pi));
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(
            parse("x + 1", SYMBOL_VARS),
            Err(ParseError::UnknownVariable { offset: 0, .. })
        ));
        assert!(matches!(
            parse("erf(z)", SYMBOL_VARS),
            Err(ParseError::UnknownFunction { offset: 0, .. })
        ));
        assert!(matches!(
            parse("z", field_vars(2)),
            Err(ParseError::UnknownVariable { .. })
        ));
        assert!(parse("x*y*z", field_vars(3)).is_ok());
    }

    #[test]
    fn syntax_errors_report_offsets() {
        assert_eq!(parse("", SYMBOL_VARS), Err(ParseError::Empty));
        assert!(matches!(
            parse("(z", SYMBOL_VARS),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse("z +", SYMBOL_VARS),
            Err(ParseError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse("2z", SYMBOL_VARS),
            Err(ParseError::Syntax { offset: 1, .. })
        ));
        assert!(matches!(
            parse("z # 1", SYMBOL_VARS),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse("1..2", SYMBOL_VARS),
            Err(ParseError::Syntax { offset: 0, .. })
        ));
    }
}
