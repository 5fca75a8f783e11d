//! Infix expression parser. Grammar is documented in `docs/grammar.md`.

use super::expr::{Expr, Prim};
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>, AlgebraError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-8
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| AlgebraError::Parse(format!("bad number '{text}'")))?;
            out.push(Tok::Num(v));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(AlgebraError::Parse(format!("unexpected character '{c}' at {i}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), AlgebraError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(AlgebraError::Parse(format!("expected '{op}' at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Expr, AlgebraError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, AlgebraError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                acc = acc * self.unary()?.recip();
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, AlgebraError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, AlgebraError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        let n = match self.peek() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() < i32::MAX as f64 => *v as i32,
            _ => return Err(AlgebraError::Parse("exponent must be an integer literal".into())),
        };
        self.pos += 1;
        if paren {
            self.expect(')')?;
        }
        Ok(base.powi(if neg { -n } else { n }))
    }

    fn number(&mut self) -> Result<f64, AlgebraError> {
        let neg = self.eat('-');
        match self.peek() {
            Some(Tok::Num(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => Err(AlgebraError::Parse("expected numeric literal".into())),
        }
    }

    fn atom(&mut self) -> Result<Expr, AlgebraError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::constant(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if !self.eat('(') {
                    return Ok(match name.as_str() {
                        "pi" => Expr::constant(std::f64::consts::PI),
                        _ => Expr::var(&name),
                    });
                }
                let arg = self.expr()?;
                let prim = match name.as_str() {
                    "exp" => Prim::Exp,
                    "log" | "ln" => Prim::Log,
                    "sin" => Prim::Sin,
                    "cos" => Prim::Cos,
                    "abs" => Prim::Abs,
                    "smoothstep" | "smoothstep_d" => {
                        self.expect(',')?;
                        let lo = self.number()?;
                        self.expect(',')?;
                        let hi = self.number()?;
                        let order = if name == "smoothstep_d" {
                            self.expect(',')?;
                            self.number()? as u8
                        } else {
                            0
                        };
                        if hi <= lo {
                            return Err(AlgebraError::Parse("smoothstep needs lo < hi".into()));
                        }
                        Prim::Smoothstep { lo, hi, order }
                    }
                    other => return Err(AlgebraError::Parse(format!("unknown function '{other}'"))),
                };
                self.expect(')')?;
                Ok(Expr::apply(prim, arg))
            }
            other => Err(AlgebraError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses an infix expression such as `exp(-s^2/0.1) * (2 - r^2)`.
pub fn parse_expr(src: &str) -> Result<Expr, AlgebraError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(AlgebraError::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(src: &str, vars: &[(&str, f64)]) -> f64 {
        parse_expr(src).unwrap().eval(vars).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(at("1 + 2 * 3", &[]), 7.0);
        assert_eq!(at("2 * 3 ^ 2", &[]), 18.0);
        assert_eq!(at("-2^2", &[]), -4.0);
        assert_eq!(at("8 / 2 / 2", &[]), 2.0);
        assert_eq!(at("x^(-1)", &[("x", 4.0)]), 0.25);
        assert_eq!(at("1e-2 * 100", &[]), 1.0);
    }

    #[test]
    fn primitives() {
        assert!((at("exp(log(x))", &[("x", 3.5)]) - 3.5).abs() < 1e-14);
        assert_eq!(at("smoothstep(r, 0.2, 0.4)", &[("r", 0.5)]), 1.0);
        assert_eq!(at("smoothstep_d(r, 0.0, 1.0, 1)", &[("r", 0.5)]), 1.875);
    }

    #[test]
    fn display_output_reparses() {
        let e = parse_expr("exp(-s^2/0.3) * cos(t) - 2 * smoothstep(s, 1, 2) / (s * log(s))").unwrap();
        let again = parse_expr(&e.to_string()).unwrap();
        for s in [1.3, 2.5, 7.0] {
            let v = [("s", s), ("t", 0.7)];
            assert_eq!(e.eval(&v).unwrap(), again.eval(&v).unwrap());
        }
    }

    #[test]
    fn errors() {
        assert!(parse_expr("x^y").is_err());
        assert!(parse_expr("foo(x)").is_err());
        assert!(parse_expr("(x").is_err());
        assert!(parse_expr("x $ y").is_err());
    }
}
