//! Text syntax for scalars and germs.
//!
//! ```text
//! germ   := expr ('|' op)*
//! op     := dt | dtb | t* | tb* | loc | conj
//! expr   := ['+'|'-'] prod (('+'|'-') prod)*
//! prod   := unary (('*'|'/') unary)*
//! unary  := '-' unary | atom ['^' ['-'] int]
//! atom   := int | i | tau | t | tb | u(expr, int) | d(int, int) | '(' expr ')'
//! ```
//! `t` and `tb` stand for the germs `t u(-1,0)`, `tb u(-1,0)` (the constant function
//! is `u(-1,0)`), products go through the germ product, and `u(beta,p)` with `beta`
//! outside `[-1,0)` is renormalized.


use crate::error::{Error, Result};
use crate::germ::{make_u, Germ};
use crate::scalar::{GaussianRational as G, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < b.len() && (b[i] as char).is_ascii_digit() {
                i += 1;
            }
            let v = src[s..i].parse::<i64>().map_err(|_| perr("integer too large", s, i))?;
            out.push(Token { tok: Tok::Int(v), start: s, end: i });
        } else if c.is_ascii_alphabetic() {
            let s = i;
            while i < b.len() && (b[i] as char).is_ascii_alphabetic() {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[s..i].to_string()), start: s, end: i });
        } else if "+-*/^(),|".contains(c) {
            out.push(Token { tok: Tok::Sym(c), start: i, end: i + 1 });
            i += 1;
        } else {
            let w = c.len_utf8();
            return Err(perr(&format!("unexpected character '{}'", &src[i..i + w]), i, i + w));
        }
    }
    Ok(out)
}

fn perr(msg: &str, start: usize, end: usize) -> Error {
    Error::Parse { msg: msg.to_string(), start, end }
}

#[derive(Clone, Debug)]
enum Val {
    S(Scalar),
    G(Germ),
}

impl Val {
    fn into_germ(self) -> Germ {
        match self {
            Val::S(s) => Germ::one().scale(&s),
            Val::G(g) => g,
        }
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn span_here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(t) => (t.start, t.end),
            None => (self.src.len(), self.src.len()),
        }
    }

    fn err_here(&self, msg: &str) -> Error {
        let (s, e) = self.span_here();
        perr(msg, s, e)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.err_here(&format!("expected '{}'", c)))
        }
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat_sym('-');
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.err_here("expected an integer")),
        }
    }

    fn expr(&mut self) -> Result<Val> {
        let mut neg = false;
        if self.eat_sym('-') {
            neg = true;
        } else {
            self.eat_sym('+');
        }
        let mut acc = self.prod()?;
        if neg {
            acc = negate(acc);
        }
        loop {
            if self.eat_sym('+') {
                let r = self.prod()?;
                acc = add(acc, r);
            } else if self.eat_sym('-') {
                let r = self.prod()?;
                acc = add(acc, negate(r));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn prod(&mut self) -> Result<Val> {
        let mut acc = self.unary()?;
        loop {
            let (s, _) = self.span_here();
            if self.eat_sym('*') {
                let r = self.unary()?;
                let e = self.toks[self.pos - 1].end;
                acc = mul(acc, r).map_err(|m| perr(&m, s, e))?;
            } else if self.eat_sym('/') {
                let r = self.unary()?;
                let e = self.toks[self.pos - 1].end;
                let inv = match r {
                    Val::S(x) => x.inv().ok_or_else(|| perr("division by zero or by a sum of tau powers", s, e))?,
                    Val::G(_) => return Err(perr("division by a germ", s, e)),
                };
                acc = mul(acc, Val::S(inv)).map_err(|m| perr(&m, s, e))?;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Val> {
        if self.eat_sym('-') {
            return Ok(negate(self.unary()?));
        }
        let (s, _) = self.span_here();
        let base = self.atom()?;
        if self.eat_sym('^') {
            let k = self.int()?;
            let e = self.toks[self.pos - 1].end;
            return power(base, k).map_err(|m| perr(&m, s, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Val> {
        let (s, e) = self.span_here();
        let tok = self.peek().cloned().ok_or_else(|| self.err_here("unexpected end of input"))?;
        match tok {
            Tok::Int(v) => {
                self.pos += 1;
                Ok(Val::S(Scalar::int(v)))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                match name.as_str() {
                    "i" => Ok(Val::S(Scalar::i())),
                    "tau" => Ok(Val::S(Scalar::tau())),
                    "t" => Ok(Val::G(tpow(1, 0))),
                    "tb" => Ok(Val::G(tpow(0, 1))),
                    "u" => {
                        self.expect_sym('(')?;
                        let (as_, _) = self.span_here();
                        let a = self.expr()?;
                        let ae = self.toks[self.pos - 1].end;
                        let alpha = match a {
                            Val::S(x) if x.terms().all(|(k, _)| k == 0) => x.coeff(0),
                            _ => return Err(perr("exponent must be a Gaussian rational", as_, ae)),
                        };
                        self.expect_sym(',')?;
                        let p = self.int()?;
                        if p < 0 {
                            let t = &self.toks[self.pos - 1];
                            return Err(perr("log power must be nonnegative", t.start, t.end));
                        }
                        self.expect_sym(')')?;
                        Ok(Val::G(make_u(&alpha, p)?))
                    }
                    "d" => {
                        self.expect_sym('(')?;
                        let i = self.int()?;
                        self.expect_sym(',')?;
                        let j = self.int()?;
                        self.expect_sym(')')?;
                        if i < 0 || j < 0 {
                            return Err(perr("derivative orders must be nonnegative", s, self.toks[self.pos - 1].end));
                        }
                        Ok(Val::G(Germ::delta(i as u32, j as u32, Scalar::one())))
                    }
                    _ => Err(perr(&format!("unknown name '{}'", name), s, e)),
                }
            }
            _ => Err(perr("unexpected token", s, e)),
        }
    }

    fn ops(&mut self, mut g: Germ) -> Result<Germ> {
        while self.eat_sym('|') {
            let (s, e) = self.span_here();
            let name = match self.peek() {
                Some(Tok::Ident(n)) => n.clone(),
                _ => return Err(self.err_here("expected an operator name after '|'")),
            };
            self.pos += 1;
            g = match name.as_str() {
                "dt" => g.d_t(),
                "dtb" => g.d_tbar(),
                "loc" => g.localize(),
                "conj" => g.conj(),
                "t" | "tb" => {
                    if !self.eat_sym('*') {
                        return Err(perr(&format!("use '{}*' for multiplication", name), s, e));
                    }
                    if name == "t" { g.mul_t() } else { g.mul_tbar() }
                }
                _ => return Err(perr(&format!("unknown operator '{}'", name), s, e)),
            };
        }
        Ok(g)
    }
}

fn tpow(a: i64, b: i64) -> Germ {
    Germ::mono(a, b, G::int(-1), 0, Scalar::one())
}

fn negate(v: Val) -> Val {
    match v {
        Val::S(s) => Val::S(-s),
        Val::G(g) => Val::G(-g),
    }
}

fn add(a: Val, b: Val) -> Val {
    match (a, b) {
        (Val::S(x), Val::S(y)) => Val::S(&x + &y),
        (a, b) => Val::G(&a.into_germ() + &b.into_germ()),
    }
}

/// Single monomial `c t^a tb^b u(-1,0)` with `a, b >= 0`.
fn as_poly_monomial(g: &Germ) -> Option<(i64, i64, Scalar)> {
    if g.n_terms() != 1 || g.has_delta() {
        return None;
    }
    let m = g.monomials().next()?;
    (m.alpha.is_minus_one() && m.p == 0 && m.a >= 0 && m.b >= 0).then_some((m.a, m.b, m.coeff))
}

fn mul(a: Val, b: Val) -> std::result::Result<Val, String> {
    match (a, b) {
        (Val::S(x), Val::S(y)) => Ok(Val::S(&x * &y)),
        (Val::S(x), Val::G(g)) | (Val::G(g), Val::S(x)) => Ok(Val::G(g.scale(&x))),
        (Val::G(g), Val::G(h)) => {
            if g.has_delta() || h.has_delta() {
                let (poly, other) = match (as_poly_monomial(&g), as_poly_monomial(&h)) {
                    (Some(p), _) => (p, h),
                    (_, Some(p)) => (p, g),
                    _ => return Err("product with a delta term needs a polynomial factor".into()),
                };
                let (ea, eb, c) = poly;
                let mut r = other.scale(&c);
                for _ in 0..ea {
                    r = r.mul_t();
                }
                for _ in 0..eb {
                    r = r.mul_tbar();
                }
                return Ok(Val::G(r));
            }
            g.mul(&h).map(Val::G).map_err(|e| e.to_string())
        }
    }
}

fn power(v: Val, k: i64) -> std::result::Result<Val, String> {
    match v {
        Val::S(s) => {
            if k >= 0 {
                let mut r = Scalar::one();
                for _ in 0..k {
                    r = &r * &s;
                }
                Ok(Val::S(r))
            } else {
                let inv = s.inv().ok_or("negative power of a non-invertible scalar")?;
                power(Val::S(inv), -k)
            }
        }
        Val::G(g) => {
            // only t and tb admit integer powers
            match as_poly_monomial(&g) {
                Some((1, 0, c)) if c.is_one() => Ok(Val::G(tpow(k, 0))),
                Some((0, 1, c)) if c.is_one() => Ok(Val::G(tpow(0, k))),
                _ => Err("only t and tb can be raised to a power".into()),
            }
        }
    }
}

fn parser(src: &str) -> Result<Parser<'_>> {
    Ok(Parser { toks: lex(src)?, pos: 0, src })
}

/// Parses a germ expression with optional `| op` suffixes.
pub fn parse_germ(src: &str) -> Result<Germ> {
    let mut p = parser(src)?;
    if p.toks.is_empty() {
        return Err(perr("empty expression", 0, 0));
    }
    let v = p.expr()?.into_germ();
    let g = p.ops(v)?;
    if p.pos < p.toks.len() {
        return Err(p.err_here("unexpected trailing input"));
    }
    Ok(g)
}

/// Parses a scalar (Laurent polynomial in `tau` over the Gaussian rationals).
pub fn parse_scalar(src: &str) -> Result<Scalar> {
    let mut p = parser(src)?;
    if p.toks.is_empty() {
        return Err(perr("empty expression", 0, 0));
    }
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.err_here("unexpected trailing input"));
    }
    match v {
        Val::S(s) => Ok(s),
        Val::G(_) => Err(perr("expected a scalar, found a germ", 0, src.len())),
    }
}

/// Parses a Gaussian rational such as `-1/2`, `3/4*i`, `1-2*i`.
pub fn parse_gr(src: &str) -> Result<G> {
    let s = parse_scalar(src)?;
    if s.terms().any(|(k, _)| k != 0) {
        return Err(perr("expected a number without tau", 0, src.len()));
    }
    Ok(s.coeff(0))
}

/// Pretty error with a caret under the offending span.
pub fn render_error(src: &str, e: &Error) -> String {
    match e {
        Error::Parse { msg, start, end } => {
            let w = (end.saturating_sub(*start)).max(1);
            format!("error: {}\n  {}\n  {}{}", msg, src, " ".repeat(*start), "^".repeat(w))
        }
        other => format!("error: {}", other),
    }
}
