//! Text format: `3/2*x1^2*x2 - 1`. Variables are `x1..xd`; `x`, `y`, `z` are
//! accepted as aliases for `x1`, `x2`, `x3`. Printing is canonical (leading
//! term first) and parsing it back is exact.

use num_traits::{One, Signed};

use super::{MPoly, Monomial};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Q};

pub fn format_poly(p: &MPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().iter().rev().enumerate() {
        let neg = c.is_negative();
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs();
        let mono: Vec<String> = m
            .exps()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    format!("x{}", i + 1)
                } else {
                    format!("x{}^{}", i + 1, e)
                }
            })
            .collect();
        if mono.is_empty() {
            out.push_str(&a.to_string());
        } else {
            if !a.is_one() {
                out.push_str(&a.to_string());
                out.push('*');
            }
            out.push_str(&mono.join("*"));
        }
    }
    out
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            msg: msg.into(),
        }
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> &'a str {
        let start = self.pos;
        while self.pos < self.s.len() && f(self.s[self.pos]) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap()
    }
}

/// Parses a polynomial in `nvars` variables.
pub fn parse_poly(src: &str, nvars: usize) -> Result<MPoly> {
    let mut lx = Lexer {
        s: src.as_bytes(),
        pos: 0,
    };
    let mut p = MPoly::zero(nvars);
    let mut first = true;
    loop {
        let sign = match lx.peek() {
            Some(b'+') => {
                lx.pos += 1;
                1
            }
            Some(b'-') => {
                lx.pos += 1;
                -1
            }
            None if first => return Err(lx.err("empty polynomial")),
            None => break,
            Some(_) if first => 1,
            Some(c) => return Err(lx.err(format!("expected '+' or '-', found {:?}", c as char))),
        };
        first = false;
        let (m, c) = parse_term(&mut lx, nvars)?;
        p.add_term(m, if sign < 0 { -c } else { c });
    }
    Ok(p)
}

fn parse_term(lx: &mut Lexer, nvars: usize) -> Result<(Monomial, Q)> {
    let mut exps = vec![0u32; nvars];
    let mut coeff = Q::one();
    loop {
        match lx.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let num = lx.take_while(|c| c.is_ascii_digit() || c == b'.');
                let mut text = num.to_string();
                // A '/' directly followed by digits continues the number.
                if lx.s.get(lx.pos) == Some(&b'/') {
                    lx.pos += 1;
                    let den = lx.take_while(|c| c.is_ascii_digit());
                    if den.is_empty() {
                        return Err(lx.err("expected denominator"));
                    }
                    text = format!("{text}/{den}");
                }
                coeff *= parse_rational(&text).map_err(|_| lx.err("bad number"))?;
            }
            Some(b'x') | Some(b'y') | Some(b'z') => {
                let c = lx.s[lx.pos];
                lx.pos += 1;
                let idx = lx.take_while(|c| c.is_ascii_digit());
                let i = if c == b'x' && !idx.is_empty() {
                    let v: usize = idx.parse().map_err(|_| lx.err("bad variable index"))?;
                    if v == 0 {
                        return Err(lx.err("variables are numbered from 1"));
                    }
                    v - 1
                } else if idx.is_empty() {
                    (c - b'x') as usize
                } else {
                    return Err(lx.err("only x takes an index"));
                };
                if i >= nvars {
                    return Err(lx.err(format!("variable x{} exceeds {nvars} variables", i + 1)));
                }
                let mut e = 1u32;
                if lx.peek() == Some(b'^') {
                    lx.pos += 1;
                    lx.skip_ws();
                    let ds = lx.take_while(|c| c.is_ascii_digit());
                    e = ds.parse().map_err(|_| lx.err("bad exponent"))?;
                }
                exps[i] += e;
            }
            Some(c) => return Err(lx.err(format!("unexpected {:?}", c as char))),
            None => return Err(lx.err("unexpected end of input")),
        }
        if lx.peek() == Some(b'*') {
            lx.pos += 1;
        } else {
            break;
        }
    }
    Ok((Monomial::new(exps), coeff))
}

