//! Recursive-descent parser.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := primary ('^' unary)?          (right associative)
//! primary := number | 'pi' | ident | ident '(' args ')' | '(' expr ')'
//!          | 'integral' '(' expr ',' ident ',' expr ',' expr ')'
//! ```
//!
//! `u`, `v` and `t` are chart/curve variables; any other bare identifier is a
//! named parameter resolved at evaluation time.

use super::ast::{BinOp, Expr, ExprKind, Func, Span, Var};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && i + 1 < bytes.len() && (bytes[i + 1] as char).is_ascii_digit()) {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                    while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value: f64 = text
                .parse()
                .map_err(|_| Error::Syntax { offset: start, message: format!("malformed number `{}`", text) })?;
            out.push(Token { tok: Tok::Num(value), span: Span::new(start, i) });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), span: Span::new(start, i) });
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => {
                // report the character, not the byte, for non-ASCII input
                let ch = src[start..].chars().next().unwrap_or(c);
                return Err(Error::Syntax { offset: start, message: format!("unexpected character `{}`", ch) });
            }
        };
        i += c.len_utf8();
        out.push(Token { tok, span: Span::new(start, i) });
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(src.len(), src.len()) });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Num(x) => format!("number {}", x),
            Tok::Ident(s) => format!("identifier `{}`", s),
            Tok::Op(c) => format!("`{}`", c),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Span> {
        let t = self.peek().clone();
        if t.tok == want {
            self.bump();
            Ok(t.span)
        } else {
            Err(Error::Syntax {
                offset: t.span.start,
                message: format!("expected {}, found {}", what, Self::describe(&t.tok)),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek().tok {
            Tok::Op('-') => {
                let start = self.bump().span;
                let inner = self.unary()?;
                let span = start.join(inner.span);
                Ok(Expr::new(ExprKind::Neg(Box::new(inner)), span))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            let span = base.span.join(exponent.span);
            return Ok(Expr::new(ExprKind::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)), span));
        }
        Ok(base)
    }

    fn args(&mut self) -> Result<(Vec<Expr>, Span)> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if self.peek().tok == Tok::RParen {
            let end = self.bump().span;
            return Ok((args, end));
        }
        loop {
            args.push(self.expr()?);
            match self.peek().tok {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    let end = self.bump().span;
                    return Ok((args, end));
                }
                _ => {
                    let t = self.peek().clone();
                    return Err(Error::Syntax {
                        offset: t.span.start,
                        message: format!("expected `,` or `)`, found {}", Self::describe(&t.tok)),
                    });
                }
            }
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let t = self.bump();
        match t.tok {
            Tok::Num(x) => Ok(Expr::new(ExprKind::Num(x), t.span)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let is_call = self.peek().tok == Tok::LParen;
                if name == "integral" {
                    return self.integral(t.span);
                }
                if is_call {
                    let func = Func::from_name(&name)
                        .ok_or_else(|| Error::UnknownIdentifier { name: name.clone(), offset: t.span.start })?;
                    let (args, end) = self.args()?;
                    if args.len() != func.arity() {
                        return Err(Error::Arity {
                            name,
                            expected: func.arity(),
                            found: args.len(),
                            offset: t.span.start,
                        });
                    }
                    return Ok(Expr::new(ExprKind::Call(func, args), t.span.join(end)));
                }
                if Func::from_name(&name).is_some() {
                    return Err(Error::Syntax {
                        offset: t.span.end,
                        message: format!("function `{}` requires an argument list", name),
                    });
                }
                let kind = match (name.as_str(), Var::from_name(&name)) {
                    ("pi", _) => ExprKind::Pi,
                    (_, Some(v)) => ExprKind::Var(v),
                    _ => ExprKind::Param(name),
                };
                Ok(Expr::new(kind, t.span))
            }
            other => Err(Error::Syntax {
                offset: t.span.start,
                message: format!("expected an operand, found {}", Self::describe(&other)),
            }),
        }
    }

    fn integral(&mut self, start: Span) -> Result<Expr> {
        self.expect(Tok::LParen, "`(` after integral")?;
        let integrand = self.expr()?;
        self.expect(Tok::Comma, "`,`")?;
        let var_tok = self.bump();
        let var = match var_tok.tok {
            Tok::Ident(ref s) if s != "pi" && s != "integral" && Func::from_name(s).is_none() => s.clone(),
            ref other => {
                return Err(Error::Syntax {
                    offset: var_tok.span.start,
                    message: format!("expected integration variable, found {}", Self::describe(other)),
                })
            }
        };
        self.expect(Tok::Comma, "`,`")?;
        let lower = self.expr()?;
        self.expect(Tok::Comma, "`,`")?;
        let upper = self.expr()?;
        let end = self.expect(Tok::RParen, "`)`")?;
        let integrand = bind_variable(integrand, &var);
        let mut stray = None;
        integrand.visit(&mut |e| {
            if let ExprKind::Var(v) = &e.kind {
                stray.get_or_insert((v.name(), e.span.start));
            }
        });
        if let Some((name, offset)) = stray {
            return Err(Error::Syntax {
                offset,
                message: format!("integrand may depend only on `{}` and parameters, found `{}`", var, name),
            });
        }
        Ok(Expr::new(
            ExprKind::Integral { integrand: Box::new(integrand), var, lower: Box::new(lower), upper: Box::new(upper) },
            start.join(end),
        ))
    }
}

/// Rewrites free occurrences of `name` into bound-variable nodes.
fn bind_variable(e: Expr, name: &str) -> Expr {
    let span = e.span;
    let kind = match e.kind {
        ExprKind::Param(ref p) if p == name => ExprKind::Bound(p.clone()),
        ExprKind::Var(v) if v.name() == name => ExprKind::Bound(name.to_string()),
        ExprKind::Neg(a) => ExprKind::Neg(Box::new(bind_variable(*a, name))),
        ExprKind::Binary(op, a, b) => {
            ExprKind::Binary(op, Box::new(bind_variable(*a, name)), Box::new(bind_variable(*b, name)))
        }
        ExprKind::Call(f, args) => ExprKind::Call(f, args.into_iter().map(|a| bind_variable(a, name)).collect()),
        ExprKind::Integral { integrand, var, lower, upper } => ExprKind::Integral {
            // an inner integral over the same name shadows the outer one
            integrand: if var == name { integrand } else { Box::new(bind_variable(*integrand, name)) },
            var,
            lower: Box::new(bind_variable(*lower, name)),
            upper: Box::new(bind_variable(*upper, name)),
        },
        other => other,
    };
    Expr::new(kind, span)
}

pub fn parse(src: &str) -> Result<Expr> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::Eof {
        return Err(Error::Syntax {
            offset: t.span.start,
            message: format!("unexpected {} after expression", Parser::describe(&t.tok)),
        });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_calls() {
        let e = parse("sin(u)*cos(v)").unwrap();
        let expected = Expr::binary(
            BinOp::Mul,
            Expr::call(Func::Sin, vec![Expr::var(Var::U)]),
            Expr::call(Func::Cos, vec![Expr::var(Var::V)]),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn dangling_power_reports_offset() {
        match parse("u^") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn integral_node() {
        let e = parse("integral(sqrt(1-b^2*cos(r)^2), r, 0, t)").unwrap();
        match &e.kind {
            ExprKind::Integral { integrand, var, upper, .. } => {
                assert_eq!(var, "r");
                assert_eq!(**upper, Expr::var(Var::T));
                assert!(integrand.params().contains("b"));
                assert!(!integrand.params().contains("r"));
            }
            _ => panic!("not an integral"),
        }
    }

    #[test]
    fn integrand_rejects_chart_variables() {
        assert!(matches!(parse("integral(r*u, r, 0, v)"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn precedence() {
        // power > unary minus > mul/div > add/sub
        let e = parse("-u^2*3+1").unwrap();
        let u2 = Expr::binary(BinOp::Pow, Expr::var(Var::U), Expr::num(2.0));
        let expected =
            Expr::binary(BinOp::Add, Expr::binary(BinOp::Mul, Expr::negate(u2), Expr::num(3.0)), Expr::num(1.0));
        assert_eq!(e, expected);
        let r = parse("2^3^2").unwrap();
        assert_eq!(r.to_string(), "(2.0 ^ (3.0 ^ 2.0))");
        let neg_exp = parse("u^-2").unwrap();
        assert_eq!(neg_exp.to_string(), "(u ^ (-2.0))");
    }

    #[test]
    fn unknown_function_and_arity() {
        assert!(matches!(parse("foo(u)"), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse("atan2(u)"), Err(Error::Arity { expected: 2, found: 1, .. })));
        assert!(matches!(parse("sin(u, v)"), Err(Error::Arity { .. })));
    }

    #[test]
    fn trailing_garbage() {
        assert!(matches!(parse("u v"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("u + $"), Err(Error::Syntax { offset: 4, .. })));
    }

    #[test]
    fn print_parse_fixed_point() {
        for src in [
            "sin(u)*cos(v) - 2.5e-3/u",
            "integral(cos(r)^2, r, 0, v) + atan2(u, v)",
            "-(u - v)^-1.5 + pi*k",
            "exp(log(1 + u^2)) / sqrt(2)",
        ] {
            let a = parse(src).unwrap();
            let b = parse(&a.to_string()).unwrap();
            assert_eq!(a, b, "{}", src);
        }
    }
}
