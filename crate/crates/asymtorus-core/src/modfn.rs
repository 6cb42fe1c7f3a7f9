//! Modular functions: exact rational functions of the two modular variables
//! `(s, t)` dressed with integer powers of `k`, `π` and `i`.
//!
//! These are the values produced by the closed-form evaluation of the
//! rearranged operator words, and the values stored in the embedded reference
//! tables.  The module provides their arithmetic, the substitutions `t = 1`
//! and `s = 1`, constant-ratio extraction (used to fit one overall
//! normalization), two printers, and a small expression parser for reading
//! the reference tables.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ratfn::{rat_i64, Poly2, Rat, RatFn2, RatFnError};
use crate::scalar::{fmt_rational, Gauss};

/// Errors from modular-function arithmetic and parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum ModFnError {
    /// Addition of functions whose `k`/`π`/`i` prefactors disagree.
    Mismatch(String),
    /// Malformed expression text.
    Parse(String),
    /// A rational-function operation failed.
    Rat(RatFnError),
}

impl From<RatFnError> for ModFnError {
    fn from(e: RatFnError) -> Self {
        ModFnError::Rat(e)
    }
}

impl core::fmt::Display for ModFnError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ModFnError::Mismatch(m) => write!(f, "prefactor mismatch: {}", m),
            ModFnError::Parse(m) => write!(f, "expression parse error: {}", m),
            ModFnError::Rat(e) => write!(f, "{}", e),
        }
    }
}

/// `i^i_power · π^pi_power · k^k_prefactor · rf(s, t)` with `i_power ∈ {0,1}`
/// (even powers of `i` are folded into the sign of `rf`).
///
/// The zero function is normalized to have all prefactors zero.
#[derive(Debug, Clone)]
pub struct ModularFunction {
    pub k_prefactor: i32,
    pub pi_power: i32,
    pub i_power: u8,
    pub rf: RatFn2,
}

fn fold_i(total: i64, rf: RatFn2) -> (u8, RatFn2) {
    match total.rem_euclid(4) {
        0 => (0, rf),
        1 => (1, rf),
        2 => (0, rf.neg()),
        _ => (1, rf.neg()),
    }
}

impl ModularFunction {
    fn normalized(k_prefactor: i32, pi_power: i32, i_power: u8, rf: RatFn2) -> ModularFunction {
        if rf.is_zero() {
            return ModularFunction::zero();
        }
        ModularFunction {
            k_prefactor,
            pi_power,
            i_power,
            rf,
        }
    }

    pub fn zero() -> ModularFunction {
        ModularFunction {
            k_prefactor: 0,
            pi_power: 0,
            i_power: 0,
            rf: RatFn2::zero(),
        }
    }

    pub fn one() -> ModularFunction {
        ModularFunction::from_rf(RatFn2::one())
    }

    pub fn from_rf(rf: RatFn2) -> ModularFunction {
        ModularFunction::normalized(0, 0, 0, rf)
    }

    pub fn pi() -> ModularFunction {
        ModularFunction::normalized(0, 1, 0, RatFn2::one())
    }

    pub fn imaginary_unit() -> ModularFunction {
        ModularFunction::normalized(0, 0, 1, RatFn2::one())
    }

    pub fn k_power(p: i32) -> ModularFunction {
        ModularFunction::normalized(p, 0, 0, RatFn2::one())
    }

    pub fn is_zero(&self) -> bool {
        self.rf.is_zero()
    }

    pub fn neg(&self) -> ModularFunction {
        ModularFunction::normalized(
            self.k_prefactor,
            self.pi_power,
            self.i_power,
            self.rf.neg(),
        )
    }

    pub fn mul(&self, o: &ModularFunction) -> ModularFunction {
        let (i_power, rf) = fold_i(
            self.i_power as i64 + o.i_power as i64,
            self.rf.mul(&o.rf),
        );
        ModularFunction::normalized(
            self.k_prefactor + o.k_prefactor,
            self.pi_power + o.pi_power,
            i_power,
            rf,
        )
    }

    pub fn scale(&self, c: &Rat) -> ModularFunction {
        ModularFunction::normalized(
            self.k_prefactor,
            self.pi_power,
            self.i_power,
            self.rf.scale(c),
        )
    }

    /// Multiplies by a Gaussian-rational constant.  `None` when the constant
    /// is neither purely real nor purely imaginary (such a product leaves the
    /// single-`i_power` representation).
    pub fn scale_gauss(&self, g: &Gauss) -> Option<ModularFunction> {
        if g.is_real() {
            Some(self.scale(&g.re))
        } else if g.is_imaginary() {
            Some(self.mul(&ModularFunction::imaginary_unit()).scale(&g.im))
        } else {
            None
        }
    }

    pub fn recip(&self) -> Result<ModularFunction, ModFnError> {
        let (i_power, rf) = fold_i(-(self.i_power as i64), self.rf.recip()?);
        Ok(ModularFunction::normalized(
            -self.k_prefactor,
            -self.pi_power,
            i_power,
            rf,
        ))
    }

    pub fn div(&self, o: &ModularFunction) -> Result<ModularFunction, ModFnError> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn add(&self, o: &ModularFunction) -> Result<ModularFunction, ModFnError> {
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        if self.k_prefactor != o.k_prefactor
            || self.pi_power != o.pi_power
            || self.i_power != o.i_power
        {
            return Err(ModFnError::Mismatch(format!(
                "(k^{}, pi^{}, i^{}) + (k^{}, pi^{}, i^{})",
                self.k_prefactor,
                self.pi_power,
                self.i_power,
                o.k_prefactor,
                o.pi_power,
                o.i_power
            )));
        }
        Ok(ModularFunction::normalized(
            self.k_prefactor,
            self.pi_power,
            self.i_power,
            self.rf.add(&o.rf),
        ))
    }

    pub fn sub(&self, o: &ModularFunction) -> Result<ModularFunction, ModFnError> {
        self.add(&o.neg())
    }

    pub fn pow_int(&self, e: i32) -> Result<ModularFunction, ModFnError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = ModularFunction::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Substitutes `t = 1`; errors when the denominator carries `(t−1)`.
    pub fn subst_t_one(&self) -> Result<ModularFunction, ModFnError> {
        Ok(ModularFunction::normalized(
            self.k_prefactor,
            self.pi_power,
            self.i_power,
            self.rf.subst_t_one()?,
        ))
    }

    /// Substitutes `s = 1`; errors when the denominator carries `(s−1)`.
    pub fn subst_s_one(&self) -> Result<ModularFunction, ModFnError> {
        Ok(ModularFunction::normalized(
            self.k_prefactor,
            self.pi_power,
            self.i_power,
            self.rf.subst_s_one()?,
        ))
    }

    /// The constant `c` with `self = c · other`, when it exists.  Requires
    /// both functions nonzero with matching `k` and `π` powers; the constant
    /// absorbs any `i` mismatch.
    pub fn constant_ratio(&self, other: &ModularFunction) -> Option<Gauss> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        if self.k_prefactor != other.k_prefactor || self.pi_power != other.pi_power {
            return None;
        }
        let a = self.rf.num.mul(&other.rf.den.expand());
        let b = other.rf.num.mul(&self.rf.den.expand());
        // a == r · b for a constant rational r.
        let mut ratio: Option<Rat> = None;
        for (s0, t0) in [(2, 3), (3, 2), (5, 7), (7, 5), (11, 13)] {
            let (s0, t0) = (rat_i64(s0, 1), rat_i64(t0, 1));
            let bv = b.eval_rat(&s0, &t0);
            if !bv.is_zero() {
                ratio = Some(a.eval_rat(&s0, &t0) / bv);
                break;
            }
        }
        let r = ratio?;
        if !a.sub(&b.scale(&r)).is_zero() {
            return None;
        }
        let delta = (4 + self.i_power as i64 - other.i_power as i64) % 4;
        Some(Gauss::from_rational(r) * Gauss::i_pow(delta as u8))
    }

    /// Value equality (prefactors compared exactly, rational parts by
    /// cross-multiplication).
    pub fn eq_value(&self, o: &ModularFunction) -> bool {
        if self.is_zero() || o.is_zero() {
            return self.is_zero() == o.is_zero();
        }
        self.k_prefactor == o.k_prefactor
            && self.pi_power == o.pi_power
            && self.i_power == o.i_power
            && self.rf.eq_value(&o.rf)
    }

    /// Float evaluation at `(s, t)` for a given `k > 0`.  The imaginary unit
    /// is reported separately: the result is `(re, im)` with exactly one of
    /// the two nonzero.
    pub fn eval_f64(&self, k: f64, s: f64, t: f64) -> (f64, f64) {
        let v = crate::scalar::powi_f64(core::f64::consts::PI, self.pi_power)
            * crate::scalar::powi_f64(k, self.k_prefactor)
            * self.rf.eval_f64(s, t);
        if self.i_power == 0 {
            (v, 0.0)
        } else {
            (0.0, v)
        }
    }

    /// Parses the ascii expression grammar used by the reference tables:
    /// integers, `i`, `pi`, `k`, `s`, `t`, `+ - * /`, integer `^` exponents
    /// (possibly negative) and parentheses.
    pub fn parse(text: &str) -> Result<ModularFunction, ModFnError> {
        let tokens = tokenize(text).map_err(ModFnError::Parse)?;
        let mut p = Parser { tokens, pos: 0 };
        let v = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(ModFnError::Parse(format!(
                "trailing tokens after position {}",
                p.pos
            )));
        }
        Ok(v)
    }

    /// Compact display with unicode π, the true minus sign and superscript
    /// exponents, e.g. `(π/3)k⁻³(1−s)/(s(s+1)²)`.
    pub fn pretty_unicode(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let (content, prim) = content_split(&self.rf.num);
        let mut out = String::new();
        if content.is_negative() {
            out.push('\u{2212}');
        }
        let c = content.abs();
        let has_tail = self.k_prefactor != 0 || !prim.is_one() || !self.rf.den.is_empty();
        let mut inner = String::new();
        if !c.numer().is_one() || (self.pi_power == 0 && self.i_power == 0) {
            inner.push_str(&c.numer().to_string());
        }
        if self.i_power == 1 {
            inner.push('i');
        }
        match self.pi_power {
            0 => {}
            1 => inner.push('\u{03C0}'),
            p => {
                inner.push('\u{03C0}');
                inner.push_str(&superscript(p as i64));
            }
        }
        if !c.denom().is_one() {
            inner.push('/');
            inner.push_str(&c.denom().to_string());
        }
        if inner == "1" && has_tail {
            // bare unit coefficient: skip
        } else if inner.contains('/') {
            out.push('(');
            out.push_str(&inner);
            out.push(')');
        } else {
            out.push_str(&inner);
        }
        match self.k_prefactor {
            0 => {}
            1 => out.push('k'),
            p => {
                out.push('k');
                out.push_str(&superscript(p as i64));
            }
        }
        if !prim.is_one() {
            out.push('(');
            out.push_str(&poly_compact(&prim));
            out.push(')');
        }
        if !self.rf.den.is_empty() {
            out.push_str("/(");
            for (irr, e) in &self.rf.den.powers {
                let sym = irr.symbol();
                if sym.len() == 1 {
                    out.push_str(sym);
                } else {
                    out.push('(');
                    out.push_str(&sym.replace('-', "\u{2212}"));
                    out.push(')');
                }
                if *e > 1 {
                    out.push_str(&superscript(*e as i64));
                }
            }
            out.push(')');
        }
        out
    }
}

impl PartialEq for ModularFunction {
    fn eq(&self, o: &ModularFunction) -> bool {
        self.eq_value(o)
    }
}

// ---------------------------------------------------------------------------
// Ascii display (the reference-table style)
// ---------------------------------------------------------------------------

/// Splits off the signed rational content so the remaining polynomial has
/// coprime integer coefficients and a positive lowest-degree term.
fn content_split(p: &Poly2) -> (Rat, Poly2) {
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for c in p.terms.values() {
        num_gcd = num_gcd.gcd(c.numer());
        den_lcm = den_lcm.lcm(c.denom());
    }
    let mut content = BigRational::new(num_gcd, den_lcm);
    if let Some(first) = p.terms.values().next() {
        if first.is_negative() {
            content = -content;
        }
    }
    let prim = p.scale(&(Rat::one() / content.clone()));
    (content, prim)
}

trait PolyIsOne {
    fn is_one(&self) -> bool;
}

impl PolyIsOne for Poly2 {
    fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }
}

fn superscript(n: i64) -> String {
    const DIGITS: [char; 10] = [
        '\u{2070}', '\u{00B9}', '\u{00B2}', '\u{00B3}', '\u{2074}', '\u{2075}', '\u{2076}',
        '\u{2077}', '\u{2078}', '\u{2079}',
    ];
    let mut out = String::new();
    if n < 0 {
        out.push('\u{207B}');
    }
    let digits = n.unsigned_abs().to_string();
    for d in digits.chars() {
        out.push(DIGITS[d.to_digit(10).unwrap() as usize]);
    }
    out
}

/// Ascending-order compact polynomial: `1−s`, `2s²+4st+…`.
fn poly_compact(p: &Poly2) -> String {
    let mut out = String::new();
    for (idx, ((i, j), c)) in p.terms.iter().enumerate() {
        let neg = c.is_negative();
        if idx == 0 {
            if neg {
                out.push('\u{2212}');
            }
        } else {
            out.push(if neg { '\u{2212}' } else { '+' });
        }
        let a = c.abs();
        let bare = *i == 0 && *j == 0;
        if !a.is_one() || bare {
            out.push_str(&fmt_rational(&a));
        }
        for (var, e) in [('s', *i), ('t', *j)] {
            if e == 1 {
                out.push(var);
            } else if e > 1 {
                out.push(var);
                out.push_str(&superscript(e as i64));
            }
        }
    }
    out
}

impl core::fmt::Display for ModularFunction {
    /// Reference-table style: `-(2*pi/3) * k^-3 * (…) / ((t+1)^3 * (s+1))`.
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let (content, prim) = content_split(&self.rf.num);
        let mut parts: Vec<String> = Vec::new();
        let c = content.abs();
        let mut inner_factors: Vec<String> = Vec::new();
        if !c.numer().is_one() || (self.pi_power == 0 && self.i_power == 0) {
            inner_factors.push(c.numer().to_string());
        }
        if self.i_power == 1 {
            inner_factors.push("i".to_string());
        }
        match self.pi_power {
            0 => {}
            1 => inner_factors.push("pi".to_string()),
            p => inner_factors.push(format!("pi^{}", p)),
        }
        let mut inner = inner_factors.join("*");
        if !c.denom().is_one() {
            inner = format!("{}/{}", inner, c.denom());
        }
        let wrap = inner.contains('*') || inner.contains('/') || content.is_negative();
        let const_part = match (content.is_negative(), wrap) {
            (true, _) => format!("-({})", inner),
            (false, true) => format!("({})", inner),
            (false, false) => inner.clone(),
        };
        let skip_unit = const_part == "1"
            && (self.k_prefactor != 0 || !prim.is_one() || !self.rf.den.is_empty());
        if !skip_unit {
            parts.push(const_part);
        }
        match self.k_prefactor {
            0 => {}
            1 => parts.push("k".to_string()),
            p => parts.push(format!("k^{}", p)),
        }
        if !prim.is_one() {
            parts.push(format!("({})", poly_ascii(&prim)));
        }
        write!(f, "{}", parts.join(" * "))?;
        if !self.rf.den.is_empty() {
            let factors: Vec<String> = self
                .rf
                .den
                .powers
                .iter()
                .map(|(irr, e)| {
                    let sym = irr.symbol();
                    let base = if sym.len() == 1 {
                        sym.to_string()
                    } else {
                        format!("({})", sym)
                    };
                    if *e > 1 {
                        format!("{}^{}", base, e)
                    } else {
                        base
                    }
                })
                .collect();
            if factors.len() > 1 {
                write!(f, " / ({})", factors.join(" * "))?;
            } else {
                write!(f, " / {}", factors[0])?;
            }
        }
        Ok(())
    }
}

/// Ascending-order ascii polynomial: `1 - s`, `2*s^2 + 4*s*t + 3`.
fn poly_ascii(p: &Poly2) -> String {
    let mut out = String::new();
    for (idx, ((i, j), c)) in p.terms.iter().enumerate() {
        let neg = c.is_negative();
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let bare = *i == 0 && *j == 0;
        let mut factors: Vec<String> = Vec::new();
        if !a.is_one() || bare {
            factors.push(fmt_rational(&a));
        }
        for (var, e) in [('s', *i), ('t', *j)] {
            if e == 1 {
                factors.push(var.to_string());
            } else if e > 1 {
                factors.push(format!("{}^{}", var, e));
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

// ---------------------------------------------------------------------------
// Expression parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            ' ' | '\t' | '\n' | '\r' => {
                chars.next();
            }
            '+' => {
                chars.next();
                out.push(Tok::Plus);
            }
            '-' => {
                chars.next();
                out.push(Tok::Minus);
            }
            '*' => {
                chars.next();
                out.push(Tok::Star);
            }
            '/' => {
                chars.next();
                out.push(Tok::Slash);
            }
            '^' => {
                chars.next();
                out.push(Tok::Caret);
            }
            '(' => {
                chars.next();
                out.push(Tok::LParen);
            }
            ')' => {
                chars.next();
                out.push(Tok::RParen);
            }
            '0'..='9' => {
                let mut n: i64 = 0;
                while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add(d as i64))
                        .ok_or("integer literal overflow")?;
                    chars.next();
                }
                out.push(Tok::Num(n));
            }
            'a'..='z' | 'A'..='Z' => {
                let mut id = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() {
                        id.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Ident(id));
            }
            other => return Err(format!("unexpected character `{}`", other)),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<ModularFunction, ModFnError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ModularFunction, ModFnError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    acc = acc.div(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ModularFunction, ModFnError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        let mut v = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let mut sign = 1i32;
            if self.peek() == Some(&Tok::Minus) {
                self.bump();
                sign = -1;
            }
            match self.bump() {
                Some(Tok::Num(n)) => {
                    let e = i32::try_from(n)
                        .map_err(|_| ModFnError::Parse("exponent overflow".to_string()))?;
                    v = v.pow_int(sign * e)?;
                }
                other => {
                    return Err(ModFnError::Parse(format!(
                        "expected integer exponent, found {:?}",
                        other
                    )))
                }
            }
        }
        Ok(v)
    }

    fn atom(&mut self) -> Result<ModularFunction, ModFnError> {
        match self.bump() {
            Some(Tok::Num(n)) => Ok(ModularFunction::from_rf(RatFn2::constant(rat_i64(n, 1)))),
            Some(Tok::Ident(id)) => match id.as_str() {
                "pi" => Ok(ModularFunction::pi()),
                "i" => Ok(ModularFunction::imaginary_unit()),
                "k" => Ok(ModularFunction::k_power(1)),
                "s" => Ok(ModularFunction::from_rf(RatFn2::from_poly(Poly2::var_s()))),
                "t" => Ok(ModularFunction::from_rf(RatFn2::from_poly(Poly2::var_t()))),
                other => Err(ModFnError::Parse(format!("unknown symbol `{}`", other))),
            },
            Some(Tok::LParen) => {
                let v = self.expr()?;
                if self.bump() != Some(Tok::RParen) {
                    return Err(ModFnError::Parse("missing `)`".to_string()));
                }
                Ok(v)
            }
            other => Err(ModFnError::Parse(format!(
                "unexpected token {:?}",
                other
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfn::{FactorBag, Irr};

    fn mf(text: &str) -> ModularFunction {
        ModularFunction::parse(text).unwrap()
    }

    #[test]
    fn parses_the_reduced_trace_function() {
        // (pi/3) * k^-3 * (1-s) / (s * (s+1)^2)
        let h = mf("(pi/3) * k^-3 * (1-s) / (s * (s+1)^2)");
        assert_eq!(h.k_prefactor, -3);
        assert_eq!(h.pi_power, 1);
        assert_eq!(h.i_power, 0);
        let mut num = Poly2::constant(rat_i64(1, 3));
        num.insert_add((1, 0), rat_i64(-1, 3));
        let mut den = FactorBag::empty();
        den.push(Irr::S, 1);
        den.push(Irr::Sp1, 2);
        assert!(h.rf.eq_value(&RatFn2::new(num, den)));
    }

    #[test]
    fn parser_handles_precedence_signs_and_powers() {
        let a = mf("1 - 2*s^2 + s*t");
        let mut p = Poly2::constant(rat_i64(1, 1));
        p.insert_add((2, 0), rat_i64(-2, 1));
        p.insert_add((1, 1), rat_i64(1, 1));
        assert!(a.rf.eq_value(&RatFn2::from_poly(p)));

        assert!(mf("-(pi/2)").eq_value(&ModularFunction::pi().scale(&rat_i64(-1, 2))));
        assert!(mf("i^2").eq_value(&ModularFunction::one().neg()));
        assert!(mf("i^3").eq_value(&ModularFunction::imaginary_unit().neg()));
        assert!(mf("(s+1)^2 / (s+1)").eq_value(&mf("s+1")));
        assert!(mf("k^-2 * k^5").eq_value(&ModularFunction::k_power(3)));
        assert!(mf("0").is_zero());
        assert!(mf("2 - s - (2 - s)").is_zero());

        assert!(ModularFunction::parse("s + q").is_err());
        assert!(ModularFunction::parse("(s+1").is_err());
        assert!(ModularFunction::parse("pi + k").is_err());
    }

    #[test]
    fn substitutions_follow_the_denominator_factors() {
        let f = mf("(t-1) / ((t+1)^2 * (s+t))");
        let at_t1 = f.subst_t_one().unwrap();
        assert!(at_t1.is_zero());
        let g = mf("1 / (s-1)");
        assert!(g.subst_s_one().is_err());
        let h = mf("(s+t) / (t+1)");
        assert!(h
            .subst_t_one()
            .unwrap()
            .eq_value(&mf("(s+1)/2")));
    }

    #[test]
    fn constant_ratio_recovers_scalar_and_imaginary_fits() {
        let f = mf("pi * k^-2 * (t-1) / ((t+1)^2 * (s+1))");
        let g = f.scale_gauss(&(-Gauss::i())).unwrap();
        assert_eq!(g.i_power, 1);
        assert_eq!(g.constant_ratio(&f), Some(-Gauss::i()));
        assert_eq!(f.constant_ratio(&f), Some(Gauss::one()));
        let h = f.scale(&rat_i64(-3, 4));
        assert_eq!(h.constant_ratio(&f), Some(Gauss::from_ratio(-3, 4)));
        // Different shape: no constant ratio.
        let other = mf("pi * k^-2 * (t-1) / ((t+1)^2 * (s+t))");
        assert_eq!(other.constant_ratio(&f), None);
    }

    #[test]
    fn displays_roundtrip_through_the_parser() {
        for text in [
            "-(2*pi/3) * k^-3 * (2*s^2 + 4*s*t + 4*s + 3 + 8*t + 3*t^2) / ((t+1)^3 * (s+1) * (s+t))",
            "(pi/2) * k^-1 * (t^2 - 6*t + 1) / (t+1)^3",
            "(4*pi/3) * k^-3 / (s+1)^3",
            "-(pi) * k^-1 * (s-1) / (s+1)^2",
            "pi * k^-2 * (t-1) / ((t+1)^2 * (s+t))",
            "(pi/3) * k^-3 * (1-s) / (s * (s+1)^2)",
            "0",
        ] {
            let f = mf(text);
            let shown = format!("{}", f);
            assert!(
                ModularFunction::parse(&shown).unwrap().eq_value(&f),
                "`{}` reprinted as `{}`",
                text,
                shown
            );
        }
        assert_eq!(
            format!("{}", ModularFunction::pi().scale(&rat_i64(-1, 2))),
            "-(pi/2)"
        );
    }

    #[test]
    fn unicode_display_matches_the_published_form() {
        let h = mf("(pi/3) * k^-3 * (1-s) / (s * (s+1)^2)");
        assert_eq!(
            h.pretty_unicode(),
            "(\u{03C0}/3)k\u{207B}\u{00B3}(1\u{2212}s)/(s(s+1)\u{00B2})"
        );
        let zero = ModularFunction::zero();
        assert_eq!(zero.pretty_unicode(), "0");
    }

    #[test]
    fn float_evaluation_separates_real_and_imaginary_parts() {
        let f = mf("pi * k^-1 * s / (t+1)");
        let (re, im) = f.eval_f64(2.0, 3.0, 1.0);
        assert!((re - core::f64::consts::PI * 0.5 * 3.0 / 2.0).abs() < 1e-12);
        assert_eq!(im, 0.0);
        let g = f.mul(&ModularFunction::imaginary_unit());
        let (re2, im2) = g.eval_f64(2.0, 3.0, 1.0);
        assert_eq!(re2, 0.0);
        assert!((im2 - re).abs() < 1e-15);
    }
}
