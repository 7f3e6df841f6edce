//! Expression front end.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary ("*" unary)*
//! unary  := ("-" | "+") unary | power
//! power  := atom ("^" INT)?
//! atom   := INT ("/" INT)? | NAME ("[" INT "]")? | "(" expr ")"
//! ```
//!
//! `name` alone means `name[0]`. Exponents must be positive and may only be
//! applied to even operands.

use std::collections::BTreeMap;

use super::poly::Poly;
use super::var::{Parity, Symbol, Var, VarKind};
use crate::error::AlgebraError;
use crate::scalar::Coeff;

/// Names known to the parser, with their kind and parity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarContext {
    entries: BTreeMap<Symbol, (VarKind, Parity)>,
}

impl VarContext {
    pub fn new() -> Self {
        VarContext::default()
    }

    pub fn add(&mut self, name: &str, kind: VarKind, parity: Parity) {
        self.entries.insert(Symbol::new(name), (kind, parity));
    }

    pub fn add_even(&mut self, name: &str) {
        self.add(name, VarKind::Jet, Parity::Even);
    }

    pub fn add_odd(&mut self, name: &str) {
        self.add(name, VarKind::Jet, Parity::Odd);
    }

    pub fn add_parameter(&mut self, name: &str) {
        self.add(name, VarKind::Parameter, Parity::Even);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(&Symbol::new(name))
    }

    pub fn lookup(&self, name: &str) -> Option<(VarKind, Parity)> {
        self.entries.get(&Symbol::new(name)).copied()
    }

    pub fn var(&self, name: &str, order: u32) -> Option<Var> {
        let (kind, parity) = self.lookup(name)?;
        if kind != VarKind::Jet && order != 0 {
            return None;
        }
        Some(Var { name: Symbol::new(name), order, kind, parity })
    }

    pub fn names(&self) -> impl Iterator<Item = (&'static str, VarKind, Parity)> + '_ {
        self.entries.iter().map(|(s, (k, p))| (s.as_str(), *k, *p))
    }

    /// Union of two contexts; entries of `other` win on conflicts.
    pub fn merged(&self, other: &VarContext) -> VarContext {
        let mut out = self.clone();
        out.entries.extend(other.entries.iter().map(|(k, v)| (*k, *v)));
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Name(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, AlgebraError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            out.push((pos, Tok::Int(chars[start..i].iter().map(|(_, c)| c).collect())));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((pos, Tok::Name(chars[start..i].iter().map(|(_, c)| c).collect())));
        } else if "+-*/^()[]".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(AlgebraError::Syntax { pos, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    ctx: &'a VarContext,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AlgebraError> {
        Err(AlgebraError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<String, AlgebraError> {
        match self.peek() {
            Some(Tok::Int(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.err("expected an integer"),
        }
    }

    fn expr<C: Coeff>(&mut self) -> Result<Poly<C>, AlgebraError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc += &self.term()?;
            } else if self.eat('-') {
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<C: Coeff>(&mut self) -> Result<Poly<C>, AlgebraError> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            let rhs = self.unary()?;
            acc = &acc * &rhs;
        }
        Ok(acc)
    }

    fn unary<C: Coeff>(&mut self) -> Result<Poly<C>, AlgebraError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power<C: Coeff>(&mut self) -> Result<Poly<C>, AlgebraError> {
        let start = self.pos();
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let n: u32 = match self.int()?.parse() {
            Ok(n) if n > 0 => n,
            _ => return self.err("exponent must be a positive integer"),
        };
        if base.parity() != Some(Parity::Even) {
            return Err(AlgebraError::Syntax { pos: start, msg: "exponent applied to an odd operand".into() });
        }
        Ok(base.pow(n))
    }

    fn atom<C: Coeff>(&mut self) -> Result<Poly<C>, AlgebraError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                let mut text = n;
                // `a/b` is a single rational literal
                if self.peek() == Some(&Tok::Sym('/')) {
                    self.at += 1;
                    let d = self.int()?;
                    text = format!("{text}/{d}");
                }
                match C::parse_literal(&text) {
                    Some(c) => Ok(Poly::constant(c)),
                    None => Err(AlgebraError::Syntax { pos, msg: format!("bad number `{text}`") }),
                }
            }
            Some(Tok::Name(name)) => {
                self.at += 1;
                let order = if self.eat('[') {
                    let k = match self.int()?.parse::<u32>() {
                        Ok(k) => k,
                        Err(_) => return self.err("jet order out of range"),
                    };
                    if !self.eat(']') {
                        return self.err("expected `]`");
                    }
                    k
                } else {
                    0
                };
                let Some((kind, _)) = self.ctx.lookup(&name) else {
                    return Err(AlgebraError::UnknownVariable { name, pos });
                };
                if kind != VarKind::Jet && order != 0 {
                    return Err(AlgebraError::Syntax { pos, msg: format!("`{name}` has no jets") });
                }
                Ok(Poly::var(self.ctx.var(&name, order).expect("looked up above")))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(Tok::Sym(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse_expr<C: Coeff>(text: &str, ctx: &VarContext) -> Result<Poly<C>, AlgebraError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), ctx };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn ctx() -> VarContext {
        let mut c = VarContext::new();
        c.add_even("u");
        c.add_even("v");
        c.add_odd("p");
        c.add_parameter("sigma");
        c
    }

    #[test]
    fn kdv_rhs() {
        let f = parse_expr::<Rational>("u[3] + 6*u*u[1]", &ctx()).unwrap();
        let u = |k| Poly::<Rational>::var(Var::even("u", k));
        assert_eq!(f, &u(3) + &(&Poly::int(6) * &(&u(0) * &u(1))));
    }

    #[test]
    fn nilpotent_product_parses_to_zero() {
        assert!(parse_expr::<Rational>("p[0]*p[0]", &ctx()).unwrap().is_zero());
    }

    #[test]
    fn rational_coefficient() {
        let f = parse_expr::<Rational>("-1/3 * v[2]", &ctx()).unwrap();
        let (m, c) = f.terms().next().unwrap();
        assert_eq!(m.to_string(), "v[2]");
        assert_eq!(c.to_string(), "-1/3");
    }

    #[test]
    fn parentheses_and_powers() {
        let f = parse_expr::<Rational>("1/2*(u^2+u*v^2-v*v[2])", &ctx()).unwrap();
        assert_eq!(f.len(), 3);
        let g = parse_expr::<Rational>("(u + v)^2 - u^2 - 2*u*v - v^2", &ctx()).unwrap();
        assert!(g.is_zero());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_expr::<Rational>("u + w", &ctx()),
            Err(AlgebraError::UnknownVariable { name: "w".into(), pos: 4 })
        );
        assert!(matches!(parse_expr::<Rational>("u +", &ctx()), Err(AlgebraError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_expr::<Rational>("p^2", &ctx()), Err(AlgebraError::Syntax { .. })));
        assert!(matches!(parse_expr::<Rational>("u^0", &ctx()), Err(AlgebraError::Syntax { .. })));
        assert!(matches!(parse_expr::<Rational>("sigma[1]", &ctx()), Err(AlgebraError::Syntax { .. })));
        assert!(matches!(parse_expr::<Rational>("u / v", &ctx()), Err(AlgebraError::Syntax { .. })));
        assert!(matches!(parse_expr::<Rational>("(u", &ctx()), Err(AlgebraError::Syntax { .. })));
    }
}
