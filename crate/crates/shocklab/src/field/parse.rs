//! Recursive-descent parser for the field expression language.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*      -- '/' only by a nonzero constant
//! unary   := '-' unary | power
//! power   := atom ('^' uint)?                -- non-negative integer exponents
//! atom    := number | var | '(' expr ')' | func
//! func    := ('sin' | 'cos' | 'exp') '(' expr ')'
//!          | 'gauss' '(' vector ',' number ')'
//! vector  := '(' number (',' number)* ')' | number
//! var     := 'a' digit                       -- a1 .. ad
//! ```
//!
//! `^` binds tighter than `*`/`/`, which bind tighter than `+`/`-`.

use crate::error::{Result, ShockError};
use crate::field::expr::{Expr, FieldExpr};

pub fn parse_field(source: &str, dim: usize) -> Result<FieldExpr> {
    if !(1..=3).contains(&dim) {
        return Err(ShockError::BadDimension { dim });
    }
    if source.trim().is_empty() {
        return Err(ShockError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
        dim,
    };
    let ast = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    FieldExpr::new(dim, ast)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> ShockError {
        ShockError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'/') {
                let at = self.pos;
                let rhs = self.unary()?;
                match const_fold(&rhs) {
                    Some(c) if c != 0.0 => {
                        lhs = Expr::Mul(Box::new(lhs), Box::new(Expr::Const(1.0 / c)));
                    }
                    Some(_) => {
                        return Err(ShockError::Syntax {
                            offset: at,
                            message: "division by zero constant".into(),
                        })
                    }
                    None => {
                        return Err(ShockError::Syntax {
                            offset: at,
                            message: "division is only allowed by a nonzero constant".into(),
                        })
                    }
                }
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let n = self.uint()?;
            Ok(Expr::Pow(Box::new(base), n))
        } else {
            Ok(base)
        }
    }

    fn uint(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a non-negative integer exponent"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u32>()
            .map_err(|_| self.err("exponent too large"))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Const(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.err("expected a number, variable, function, or `(`")),
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let s = self.src;
        let mut p = self.pos;
        if p < s.len() && (s[p] == b'+' || s[p] == b'-') {
            p += 1;
        }
        while p < s.len() && (s[p].is_ascii_digit() || s[p] == b'.') {
            p += 1;
        }
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if q < s.len() && s[q].is_ascii_digit() {
                p = q;
                while p < s.len() && s[p].is_ascii_digit() {
                    p += 1;
                }
            }
        }
        let text = std::str::from_utf8(&s[start..p]).unwrap();
        let v: f64 = text.parse().map_err(|_| ShockError::Syntax {
            offset: start,
            message: format!("malformed number `{}`", text),
        })?;
        self.pos = p;
        Ok(v)
    }

    fn ident(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "sin" | "cos" | "exp" => {
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(match name {
                    "sin" => Expr::Sin(Box::new(arg)),
                    "cos" => Expr::Cos(Box::new(arg)),
                    _ => Expr::Exp(Box::new(arg)),
                })
            }
            "gauss" => {
                self.expect(b'(')?;
                let center = self.vector()?;
                self.expect(b',')?;
                let wat = self.pos;
                let width = self.signed_number()?;
                self.expect(b')')?;
                if center.len() != self.dim {
                    return Err(ShockError::Invalid(format!(
                        "gauss center has {} components, field dimension is {}",
                        center.len(),
                        self.dim
                    )));
                }
                if !(width > 0.0) {
                    let _ = wat;
                    return Err(ShockError::NonPositiveGaussWidth { width });
                }
                Ok(Expr::Gauss { center, width })
            }
            _ => {
                if let Some(rest) = name.strip_prefix('a') {
                    if let Ok(ix) = rest.parse::<usize>() {
                        if ix == 0 {
                            return Err(ShockError::Syntax {
                                offset: start,
                                message: "variables are 1-based: a1, a2, a3".into(),
                            });
                        }
                        if ix > self.dim {
                            return Err(ShockError::VariableOutOfRange {
                                index: ix,
                                dim: self.dim,
                            });
                        }
                        return Ok(Expr::Var(ix - 1));
                    }
                }
                Err(ShockError::UnknownIdentifier {
                    name: name.to_string(),
                    offset: start,
                })
            }
        }
    }

    fn signed_number(&mut self) -> Result<f64> {
        if self.eat(b'-') {
            Ok(-self.number()?)
        } else {
            self.number()
        }
    }

    fn vector(&mut self) -> Result<Vec<f64>> {
        if self.eat(b'(') {
            let mut v = vec![self.signed_number()?];
            while self.eat(b',') {
                v.push(self.signed_number()?);
            }
            self.expect(b')')?;
            Ok(v)
        } else {
            Ok(vec![self.signed_number()?])
        }
    }
}

fn const_fold(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(c) => Some(*c),
        Expr::Neg(a) => const_fold(a).map(|v| -v),
        Expr::Add(a, b) => Some(const_fold(a)? + const_fold(b)?),
        Expr::Sub(a, b) => Some(const_fold(a)? - const_fold(b)?),
        Expr::Mul(a, b) => Some(const_fold(a)? * const_fold(b)?),
        Expr::Pow(a, n) => Some(const_fold(a)?.powi(*n as i32)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_parses() {
        let f = parse_field("a1^4/4 - a1^2/2", 1).unwrap();
        assert_eq!(f.eval(&[1.0]), -0.25);
        assert_eq!(f.eval(&[0.0]), 0.0);
    }

    #[test]
    fn variable_out_of_range() {
        let e = parse_field("a1 + a3", 2).unwrap_err();
        match e {
            ShockError::VariableOutOfRange { index, dim } => {
                assert_eq!((index, dim), (3, 2));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn two_bumps() {
        let f = parse_field("gauss((0,0), 1) + gauss((1,0), 1)", 2).unwrap();
        let v = f.eval(&[0.0, 0.0]);
        assert!((v - (1.0 + (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn syntax_error_has_offset() {
        let e = parse_field("a1 + ", 1).unwrap_err();
        match e {
            ShockError::Syntax { offset, .. } => assert_eq!(offset, 5),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn gauss_width_must_be_positive() {
        let e = parse_field("gauss((0), -1)", 1).unwrap_err();
        assert!(matches!(e, ShockError::NonPositiveGaussWidth { .. }));
    }

    #[test]
    fn precedence() {
        // ^ over *, * over +
        let f = parse_field("2*a1^2 + 1", 1).unwrap();
        assert_eq!(f.eval(&[3.0]), 19.0);
    }

    #[test]
    fn division_only_by_constants() {
        assert!(parse_field("a1 / a1", 1).is_err());
        assert!(parse_field("a1 / (2*3)", 1).is_ok());
        assert!(parse_field("a1 / 0", 1).is_err());
    }
}
