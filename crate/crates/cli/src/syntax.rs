//! Text syntax for monomial ideals, toric functions and rationals.
//!
//! ```text
//! ideal    := '0' | monomial (',' monomial)*
//! monomial := '1' | term ('*' term)*
//! term     := var ('^' natural)?
//! function := 'min' '(' linear (',' linear)* ')'
//!           | 'power' '(' rational ';' rational (',' rational)* ')'
//! linear   := ['-'] lterm (('+' | '-') lterm)*
//! lterm    := rational ['*' var] | var
//! rational := natural ('/' natural)?
//! ```

use std::cmp::Ordering;
use std::fmt;

use nil_core::ideal::MonomialIdeal;
use nil_core::newton::ExponentVector;
use nil_core::toric::{AffinePiece, ConcaveToricFunction};
use nil_core::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub token: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.token.is_empty() {
            write!(f, "line {}, column {}: {} (at end of input)", self.line, self.column, self.message)
        } else {
            write!(f, "line {}, column {}: {} (at '{}')", self.line, self.column, self.message, self.token)
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Ident(String),
    Number(String),
    Symbol(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    kind: Kind,
    text: String,
    line: usize,
    column: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        let mut take_while = |pred: fn(char) -> bool| {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !pred(d) {
                    break;
                }
                s.push(d);
                chars.next();
                column += 1;
            }
            s
        };
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            Kind::Ident(take_while(|d| d.is_ascii_alphanumeric() || d == '_'))
        } else if c.is_ascii_digit() {
            Kind::Number(take_while(|d| d.is_ascii_digit()))
        } else if "^*,+-/();".contains(c) {
            chars.next();
            column += 1;
            Kind::Symbol(c)
        } else {
            return Err(ParseError {
                line: l,
                column: col,
                token: c.to_string(),
                message: "unexpected character".into(),
            });
        };
        let text = match &kind {
            Kind::Ident(s) | Kind::Number(s) => s.clone(),
            Kind::Symbol(c) => c.to_string(),
            Kind::End => unreachable!(),
        };
        tokens.push(Token {
            kind,
            text,
            line: l,
            column: col,
        });
    }
    tokens.push(Token {
        kind: Kind::End,
        text: String::new(),
        line,
        column,
    });
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn new(src: &str, vars: &'a [String]) -> Result<Self, ParseError> {
        Ok(Self {
            tokens: tokenize(src)?,
            pos: 0,
            vars,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != Kind::End {
            self.pos += 1;
        }
        t
    }

    fn error_at(t: &Token, message: impl Into<String>) -> ParseError {
        ParseError {
            line: t.line,
            column: t.column,
            token: t.text.clone(),
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        Self::error_at(self.peek(), message)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().kind == Kind::Symbol(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.peek().kind == Kind::End {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn natural(&mut self) -> Result<u32, ParseError> {
        let t = self.next();
        match &t.kind {
            Kind::Number(s) => s.parse().map_err(|_| Self::error_at(&t, "exponent too large")),
            _ => Err(Self::error_at(&t, "expected a natural number")),
        }
    }

    fn variable(&mut self) -> Result<usize, ParseError> {
        let t = self.next();
        match &t.kind {
            Kind::Ident(name) => self
                .vars
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Self::error_at(&t, format!("unknown variable; expected one of {}", self.vars.join(", ")))),
            _ => Err(Self::error_at(&t, "expected a variable")),
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let t = self.next();
        let Kind::Number(num) = &t.kind else {
            return Err(Self::error_at(&t, "expected a number"));
        };
        let num: BigInt = num.parse().unwrap();
        if self.eat('/') {
            let d = self.next();
            let Kind::Number(den) = &d.kind else {
                return Err(Self::error_at(&d, "expected a denominator"));
            };
            let den: BigInt = den.parse().unwrap();
            if den.is_zero() {
                return Err(Self::error_at(&d, "zero denominator"));
            }
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::from_integer(num))
        }
    }

    fn monomial(&mut self) -> Result<Vec<u32>, ParseError> {
        let mut exps = vec![0u32; self.vars.len()];
        if let Kind::Number(s) = &self.peek().kind {
            if s == "1" {
                self.pos += 1;
                return Ok(exps);
            }
            return Err(self.error("monomials carry no coefficients"));
        }
        loop {
            let v = self.variable()?;
            let e = if self.eat('^') { self.natural()? } else { 1 };
            exps[v] = exps[v]
                .checked_add(e)
                .ok_or_else(|| self.error("exponent too large"))?;
            if !self.eat('*') {
                return Ok(exps);
            }
        }
    }

    fn ideal(&mut self) -> Result<Option<Vec<Vec<u32>>>, ParseError> {
        if self.peek().kind == Kind::Number("0".into()) {
            self.pos += 1;
            self.finish()?;
            return Ok(None);
        }
        let mut gens = vec![self.monomial()?];
        while self.eat(',') {
            gens.push(self.monomial()?);
        }
        self.finish()?;
        Ok(Some(gens))
    }

    fn linear_term(&mut self, slope: &mut [Rational], offset: &mut Rational, sign: &Rational) -> Result<(), ParseError> {
        let start = self.peek().clone();
        if matches!(start.kind, Kind::Ident(_)) {
            let v = self.variable()?;
            slope[v] += sign;
            return Ok(());
        }
        let coeff = self.rational()? * sign;
        if self.eat('*') {
            let v = self.variable()?;
            slope[v] += coeff;
        } else {
            *offset += coeff;
        }
        Ok(())
    }

    fn affine(&mut self) -> Result<(Vec<Rational>, Rational, Token), ParseError> {
        let start = self.peek().clone();
        let mut slope = vec![Rational::zero(); self.vars.len()];
        let mut offset = Rational::zero();
        let mut sign = if self.eat('-') { -Rational::one() } else { Rational::one() };
        loop {
            self.linear_term(&mut slope, &mut offset, &sign)?;
            if self.eat('+') {
                sign = Rational::one();
            } else if self.eat('-') {
                sign = -Rational::one();
            } else {
                return Ok((slope, offset, start));
            }
        }
    }

    fn function(&mut self) -> Result<ConcaveToricFunction, ParseError> {
        let head = self.next();
        match &head.kind {
            Kind::Ident(s) if s == "min" => {
                self.expect('(')?;
                let mut pieces = Vec::new();
                loop {
                    let (slope, offset, start) = self.affine()?;
                    let slope = ExponentVector::new(slope)
                        .map_err(|_| Self::error_at(&start, "slopes must be non-negative"))?;
                    pieces.push(AffinePiece { slope, offset });
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect(')')?;
                self.finish()?;
                ConcaveToricFunction::min_of(pieces).map_err(|e| Self::error_at(&head, e.to_string()))
            }
            Kind::Ident(s) if s == "power" => {
                self.expect('(')?;
                let k = self.rational()?;
                self.expect(';')?;
                let start = self.peek().clone();
                let mut alpha = vec![self.rational()?];
                while self.eat(',') {
                    alpha.push(self.rational()?);
                }
                self.expect(')')?;
                self.finish()?;
                if alpha.len() != self.vars.len() {
                    return Err(Self::error_at(
                        &start,
                        format!("expected {} exponents, got {}", self.vars.len(), alpha.len()),
                    ));
                }
                let alpha = ExponentVector::new(alpha).map_err(|e| Self::error_at(&start, e.to_string()))?;
                ConcaveToricFunction::power(k, alpha).map_err(|e| Self::error_at(&head, e.to_string()))
            }
            _ => Err(Self::error_at(&head, "expected 'min' or 'power'")),
        }
    }
}

/// Parses an ideal; `0` is the zero ideal and `1` the unit ideal.
pub fn parse_ideal(src: &str, vars: &[String]) -> Result<MonomialIdeal, ParseError> {
    let mut p = Parser::new(src, vars)?;
    match p.ideal()? {
        None => Ok(MonomialIdeal::zero(vars.len())),
        Some(gens) => Ok(MonomialIdeal::minimalize(vars.len(), &gens).expect("generator lengths match variables")),
    }
}

pub fn parse_monomial(src: &str, vars: &[String]) -> Result<Vec<u32>, ParseError> {
    let mut p = Parser::new(src, vars)?;
    let m = p.monomial()?;
    p.finish()?;
    Ok(m)
}

pub fn parse_function(src: &str, vars: &[String]) -> Result<ConcaveToricFunction, ParseError> {
    Parser::new(src, vars)?.function()
}

pub fn parse_rational(src: &str) -> Result<Rational, ParseError> {
    let mut p = Parser::new(src, &[])?;
    let neg = p.eat('-');
    let r = p.rational()?;
    p.finish()?;
    Ok(if neg { -r } else { r })
}

/// Comma-separated rationals, e.g. `2, 1/3`.
pub fn parse_rational_list(src: &str) -> Result<Vec<Rational>, ParseError> {
    let mut p = Parser::new(src, &[])?;
    let mut out = vec![p.rational()?];
    while p.eat(',') {
        out.push(p.rational()?);
    }
    p.finish()?;
    Ok(out)
}

pub fn parse_natural_list(src: &str) -> Result<Vec<u32>, ParseError> {
    let mut p = Parser::new(src, &[])?;
    let mut out = vec![p.natural()?];
    while p.eat(',') {
        out.push(p.natural()?);
    }
    p.finish()?;
    Ok(out)
}

/// Identifiers used as variables in `src`, in natural order.
pub fn infer_variables(sources: &[&str]) -> Result<Vec<String>, ParseError> {
    let mut names = Vec::new();
    for src in sources {
        for t in tokenize(src)? {
            if let Kind::Ident(s) = t.kind {
                if s != "min" && s != "power" && !names.contains(&s) {
                    names.push(s);
                }
            }
        }
    }
    names.sort_by(|a, b| natural_cmp(a, b));
    Ok(names)
}

/// Default names for `n` variables: `x, y, z`, or `z1..zn` beyond three.
pub fn default_variables(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("z{i}")).collect()
    }
}

/// Orders `z2` before `z10`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let split = |s: &str| {
        let digits = s.len() - s.chars().rev().take_while(|c| c.is_ascii_digit()).count();
        let (head, tail) = s.split_at(digits);
        (head.to_string(), tail.parse::<u64>().ok())
    };
    split(a).cmp(&split(b)).then_with(|| a.cmp(b))
}

pub fn format_monomial(exps: &[u32], vars: &[String]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .zip(vars)
        .filter(|(e, _)| **e > 0)
        .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Generators in lex order with `x > y > …`, largest first.
pub fn format_generators(ideal: &MonomialIdeal, vars: &[String]) -> Vec<String> {
    let mut gens = ideal.generators().to_vec();
    gens.sort_by(|a, b| b.cmp(a));
    gens.iter().map(|g| format_monomial(g, vars)).collect()
}

pub fn format_ideal(ideal: &MonomialIdeal, vars: &[String]) -> String {
    if ideal.is_zero() {
        "0".into()
    } else {
        format_generators(ideal, vars).join(", ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn ideals() {
        let i = parse_ideal("x^2, y^3, x^2*y", &xy()).unwrap();
        assert_eq!(format_ideal(&i, &xy()), "x^2, y^3");
        assert!(parse_ideal("1", &xy()).unwrap().is_unit());
        assert!(parse_ideal("0", &xy()).unwrap().is_zero());
        assert_eq!(parse_ideal("x*x", &xy()).unwrap().generators(), &[vec![2, 0]]);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_ideal("x^2,\n  y^^3", &xy()).unwrap_err();
        assert_eq!((e.line, e.column, e.token.as_str()), (2, 5, "^"));
        let e = parse_ideal("x^2, w", &xy()).unwrap_err();
        assert_eq!((e.line, e.column, e.token.as_str()), (1, 6, "w"));
        let e = parse_ideal("x $", &xy()).unwrap_err();
        assert_eq!(e.token, "$");
        let e = parse_ideal("x,", &xy()).unwrap_err();
        assert_eq!(e.token, "");
    }

    #[test]
    fn functions() {
        let g = parse_function("min(2*x + 1, 3*y, x + y - 1/2)", &xy()).unwrap();
        let ConcaveToricFunction::PiecewiseLinearMin(pieces) = &g else { panic!() };
        assert_eq!(pieces.len(), 3);
        assert_eq!(pieces[2].offset, Rational::new((-1).into(), 2.into()));
        assert!(parse_function("power(5/2; 1)", &["x".into()]).is_ok());
        assert!(parse_function("power(1; 1/2, 1/2)", &xy()).is_ok());
        let e = parse_function("power(1; 1)", &xy()).unwrap_err();
        assert!(e.message.contains("expected 2 exponents"));
        assert!(parse_function("min(-x)", &xy()).is_err());
        assert!(parse_function("max(x)", &xy()).is_err());
    }

    #[test]
    fn variable_inference() {
        let v = infer_variables(&["z10*z2, z1"]).unwrap();
        assert_eq!(v, ["z1", "z2", "z10"]);
        assert_eq!(infer_variables(&["min(2*x, 3*y)"]).unwrap(), ["x", "y"]);
        assert_eq!(default_variables(4)[3], "z4");
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("5/6").unwrap().to_string(), "5/6");
        assert_eq!(parse_rational("-3").unwrap().to_string(), "-3");
        assert!(parse_rational("1/0").is_err());
        assert_eq!(parse_rational_list("2, 1/3").unwrap().len(), 2);
        assert_eq!(parse_natural_list("2,3").unwrap(), [2, 3]);
    }
}
