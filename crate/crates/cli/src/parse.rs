//! Parsers for the command-line shorthands: complex literals, symbol
//! expressions, inner functions and measures.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::Rng;
use ttolab::clark::clark_measure;
use ttolab::measure::Atom;
use ttolab::{BoundaryMeasure, InnerFunction, C64};

/// Laurent polynomial in `z` on the circle, keyed by power.
pub type Laurent = BTreeMap<i64, C64>;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // Exponent, only when followed by a digit or a signed digit.
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
            let v = text.parse::<f64>().map_err(|_| format!("bad number `{text}`"))?;
            out.push(Token::Num(v));
        } else if ch.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()".contains(ch) {
            out.push(Token::Op(ch));
            i += 1;
        } else {
            return Err(format!("unexpected character `{ch}`"));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

fn constant(v: C64) -> Laurent {
    let mut p = Laurent::new();
    p.insert(0, v);
    p
}

fn add(a: &Laurent, b: &Laurent, sign: f64) -> Laurent {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(*k).or_insert(C64::new(0.0, 0.0)) += v * sign;
    }
    out
}

fn mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            *out.entry(ka + kb).or_insert(C64::new(0.0, 0.0)) += va * vb;
        }
    }
    out
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Laurent, String> {
        let mut acc = match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                add(&Laurent::new(), &self.term()?, -1.0)
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            acc = add(&acc, &t, if op == '+' { 1.0 } else { -1.0 });
        }
        Ok(acc)
    }

    /// Products, with `*` optional between adjacent factors (`2z`, `3i`).
    fn term(&mut self) -> Result<Laurent, String> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Token::Op('*')) => {
                    self.pos += 1;
                    acc = mul(&acc, &self.power()?);
                }
                Some(Token::Num(_) | Token::Ident(_) | Token::Op('(')) => {
                    acc = mul(&acc, &self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Laurent, String> {
        let base = self.primary()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let e = match self.next() {
                Some(Token::Num(v)) if v.fract() == 0.0 && (0.0..=4096.0).contains(&v) => v as u32,
                other => return Err(format!("exponent must be a small nonnegative integer, got {other:?}")),
            };
            let mut out = constant(C64::new(1.0, 0.0));
            for _ in 0..e {
                out = mul(&out, &base);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Laurent, String> {
        match self.next() {
            Some(Token::Num(v)) => Ok(constant(C64::new(v, 0.0))),
            Some(Token::Ident(name)) => match name.as_str() {
                "i" => Ok(constant(C64::new(0.0, 1.0))),
                "z" => {
                    let mut p = Laurent::new();
                    p.insert(1, C64::new(1.0, 0.0));
                    Ok(p)
                }
                "zbar" => {
                    let mut p = Laurent::new();
                    p.insert(-1, C64::new(1.0, 0.0));
                    Ok(p)
                }
                other => Err(format!("unknown name `{other}` (expected z, zbar or i)")),
            },
            Some(Token::Op('(')) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::Op(')')) => Ok(inner),
                    _ => Err("missing `)`".into()),
                }
            }
            other => Err(format!("unexpected token {other:?}")),
        }
    }
}

/// Parses expressions like `0.5*z + 2*zbar^2 - 1` or `(1+2i)z`.
pub fn laurent(src: &str) -> Result<Laurent, String> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err("empty expression".into());
    }
    let mut p = Parser { tokens, pos: 0 };
    let out = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(format!("trailing input in `{src}`"));
    }
    Ok(out.into_iter().filter(|(_, v)| *v != C64::new(0.0, 0.0)).collect())
}

/// A complex constant such as `0.3-0.4i`, `-i` or `2e-3`.
pub fn complex(src: &str) -> Result<C64, String> {
    let p = laurent(src)?;
    if p.keys().any(|&k| k != 0) {
        return Err(format!("`{src}` is not a constant"));
    }
    Ok(p.get(&0).copied().unwrap_or(C64::new(0.0, 0.0)))
}

/// Two-sided coefficients `−K..=K` of a Laurent polynomial.
pub fn fourier_coefficients(p: &Laurent) -> Vec<C64> {
    let k = p.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0) as i64;
    (-k..=k).map(|j| p.get(&j).copied().unwrap_or(C64::new(0.0, 0.0))).collect()
}

/// `z^n`, `B[a1, a2, ...]`, or `@path` to an inner-function JSON file.
pub fn theta(src: &str) -> Result<InnerFunction, String> {
    let s = src.trim();
    if let Some(path) = s.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?;
        return serde_json::from_str(&text).map_err(|e| format!("parsing {path}: {e}"));
    }
    if let Some(rest) = s.strip_prefix("z^") {
        let n: usize = rest.trim().parse().map_err(|_| format!("bad degree in `{s}`"))?;
        if n == 0 {
            return Err("degree must be at least 1".into());
        }
        return Ok(InnerFunction::monomial(n));
    }
    if s == "z" {
        return Ok(InnerFunction::monomial(1));
    }
    if let Some(body) = s.strip_prefix("B[").and_then(|r| r.strip_suffix(']')) {
        let zeros = body
            .split(',')
            .map(|part| complex(part.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        if zeros.is_empty() {
            return Err("B[...] needs at least one zero".into());
        }
        return InnerFunction::new(zeros, C64::new(1.0, 0.0)).map_err(|e| e.to_string());
    }
    Err(format!("cannot parse theta `{s}`: expected z^n, B[a1,...] or @file"))
}

/// `m`, `sigma:ALPHA`, `dirac:ANGLE[:WEIGHT]`, `atoms:K` (random) or `@file`.
pub fn measure<R: Rng + ?Sized>(
    src: &str,
    theta: &InnerFunction,
    grid: usize,
    rng: &mut R,
) -> Result<BoundaryMeasure, String> {
    let s = src.trim();
    if let Some(path) = s.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?;
        return serde_json::from_str(&text).map_err(|e| format!("parsing {path}: {e}"));
    }
    let mut parts = s.split(':');
    let kind = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    match (kind, args.as_slice()) {
        ("m" | "lebesgue", []) => Ok(BoundaryMeasure::lebesgue(grid)),
        ("sigma", [alpha]) => {
            let alpha = complex(alpha)?;
            clark_measure(theta, alpha).map(|c| c.to_measure()).map_err(|e| e.to_string())
        }
        ("dirac", [angle]) => Ok(BoundaryMeasure::dirac(number(angle)?, C64::new(1.0, 0.0))),
        ("dirac", [angle, weight]) => Ok(BoundaryMeasure::dirac(number(angle)?, complex(weight)?)),
        ("atoms", [count]) => {
            let k: usize = count.parse().map_err(|_| format!("bad atom count `{count}`"))?;
            Ok(BoundaryMeasure::from_atoms(
                (0..k)
                    .map(|_| Atom {
                        angle: rng.random::<f64>() * TAU,
                        radius: 1.0,
                        weight: C64::new(rng.random::<f64>(), 0.0),
                    })
                    .collect(),
            ))
        }
        _ => Err(format!(
            "cannot parse measure `{s}`: expected m, sigma:ALPHA, dirac:ANGLE[:WEIGHT], atoms:K or @file"
        )),
    }
}

fn number(s: &str) -> Result<f64, String> {
    let v = complex(s)?;
    if v.im != 0.0 {
        return Err(format!("`{s}` must be real"));
    }
    Ok(v.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn symbol_grammar() {
        let p = laurent("0.5*z + 2*zbar^2 - 1").unwrap();
        assert_eq!(p.get(&1), Some(&c(0.5, 0.0)));
        assert_eq!(p.get(&-2), Some(&c(2.0, 0.0)));
        assert_eq!(p.get(&0), Some(&c(-1.0, 0.0)));
        assert_eq!(fourier_coefficients(&p).len(), 5);
    }

    #[test]
    fn products_and_implicit_multiplication() {
        let p = laurent("(1+z)(1+zbar)").unwrap();
        assert_eq!(p.get(&0), Some(&c(2.0, 0.0)));
        assert_eq!(p.get(&1), Some(&c(1.0, 0.0)));
        assert_eq!(p.get(&-1), Some(&c(1.0, 0.0)));
        assert_eq!(laurent("3i z").unwrap().get(&1), Some(&c(0.0, 3.0)));
    }

    #[test]
    fn complex_literals() {
        assert_eq!(complex("0.3+0.4i").unwrap(), c(0.3, 0.4));
        assert_eq!(complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(complex("1e-3-2E-1i").unwrap(), c(1e-3, -0.2));
        assert!(complex("z").is_err());
        assert!(complex("1 +").is_err());
    }

    #[test]
    fn theta_shorthand() {
        assert_eq!(theta("z^4").unwrap().degree(), 4);
        let b = theta("B[0.5, -0.2+0.1i]").unwrap();
        assert_eq!(b.zeros(), &[c(0.5, 0.0), c(-0.2, 0.1)]);
        assert!(theta("B[1.5]").is_err());
        assert!(theta("q^2").is_err());
    }
}
