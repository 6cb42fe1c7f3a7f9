//! Commutative collapse of the symbol calculus and its exact ξ-integration.
//!
//! When the deformation is switched off every factor of a word commutes, so a
//! word reduces to a monomial in `k`, `b0`, the derivative letters and the
//! momenta.  Because `b0` is then literally `(1 + ξ₁² + k²ξ₂²)⁻¹`, inverse
//! powers of it admit closed-form momentum integrals in terms of Beta
//! functions.  This module performs the collapse, evaluates those integrals
//! exactly, and exposes the resulting curvature density.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::scalar::{beta_half_half_over_pi, beta_int, fmt_rational, Gauss};
use crate::symbol::{Letter, SymbolError, SymbolExpr};

/// Errors from the commutative reduction.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalError {
    /// The expression still carries chiral words; take spin parts first.
    ChiralWord,
    /// The momentum integral diverges for the given powers.
    Divergent,
    /// A text line could not be parsed.
    Parse(String),
    /// Failure while building the symbol input.
    Symbol(SymbolError),
}

impl From<SymbolError> for ClassicalError {
    fn from(e: SymbolError) -> Self {
        ClassicalError::Symbol(e)
    }
}

/// Derivative letters in display order.
pub const LETTERS: [Letter; 5] = [
    Letter::D1,
    Letter::D2,
    Letter::D11,
    Letter::D12,
    Letter::D22,
];

fn letter_index(l: Letter) -> usize {
    match l {
        Letter::D1 => 0,
        Letter::D2 => 1,
        Letter::D11 => 2,
        Letter::D12 => 3,
        Letter::D22 => 4,
    }
}

// ---------------------------------------------------------------------------
// Commutative monomials
// ---------------------------------------------------------------------------

/// One commutative monomial `b0^b0 · k^k · ∏ letterᵢ^lettersᵢ · ξ₁^xi1 ξ₂^xi2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CKey {
    pub b0: u32,
    pub k: u32,
    pub letters: [u32; 5],
    pub xi1: u32,
    pub xi2: u32,
}

/// A finite sum of commutative monomials with Gaussian-rational coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CPoly {
    pub terms: BTreeMap<CKey, Gauss>,
}

fn push_pow(s: &mut String, base: &str, e: u32) {
    if e == 1 {
        s.push(' ');
        s.push_str(base);
    } else if e > 1 {
        s.push_str(&format!(" {}^{}", base, e));
    }
}

fn coeff_prefix(c: &Gauss) -> String {
    if c.is_real() {
        fmt_rational(&c.re)
    } else if c.is_imaginary() {
        format!("{} i", fmt_rational(&c.im))
    } else {
        format!("({})", c)
    }
}

impl CPoly {
    pub fn zero() -> CPoly {
        CPoly::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert_add(&mut self, key: CKey, c: Gauss) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            None => {
                self.terms.insert(key, c);
            }
            Some(prev) => {
                let sum = prev + c;
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
        }
    }

    /// Collapses a symbol expression by letting all factors commute.
    ///
    /// Fails if any word still carries the chiral spin flag — reduce with the
    /// spin-trace projections first.
    pub fn collapse(expr: &SymbolExpr) -> Result<CPoly, ClassicalError> {
        let mut out = CPoly::zero();
        for (w, c) in &expr.words {
            if w.chiral {
                return Err(ClassicalError::ChiralWord);
            }
            let mut letters = [0u32; 5];
            for l in w.letters() {
                letters[letter_index(l)] += 1;
            }
            let key = CKey {
                b0: w.b0_total(),
                k: w.k_total(),
                letters,
                xi1: w.xi1,
                xi2: w.xi2,
            };
            out.insert_add(key, c.clone());
        }
        Ok(out)
    }

    /// One line per monomial, largest `b0` power first.
    pub fn to_lines(&self) -> Vec<String> {
        self.terms
            .iter()
            .rev()
            .map(|(key, c)| {
                let mut s = coeff_prefix(c);
                push_pow(&mut s, "b0", key.b0);
                push_pow(&mut s, "k", key.k);
                for (idx, l) in LETTERS.iter().enumerate() {
                    push_pow(&mut s, l.token(), key.letters[idx]);
                }
                push_pow(&mut s, "x1", key.xi1);
                push_pow(&mut s, "x2", key.xi2);
                s
            })
            .collect()
    }

    /// Parses the line format produced by [`CPoly::to_lines`].  Lines starting
    /// with `#` and blank lines are skipped.
    pub fn parse(text: &str) -> Result<CPoly, ClassicalError> {
        let mut out = CPoly::zero();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, c) = parse_cline(line).map_err(ClassicalError::Parse)?;
            out.insert_add(key, c);
        }
        Ok(out)
    }
}

impl core::fmt::Display for CPoly {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, line) in self.to_lines().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", line)?;
        }
        Ok(())
    }
}

fn parse_cline(line: &str) -> Result<(CKey, Gauss), String> {
    let mut tokens = line.split_whitespace().peekable();
    let coeff_tok = tokens.next().ok_or("empty line")?;
    let rat = crate::torus::rational_from_str(coeff_tok)
        .map_err(|_| format!("bad coefficient `{}`", coeff_tok))?;
    let mut coeff = Gauss::from_rational(rat);
    if tokens.peek() == Some(&"i") {
        tokens.next();
        coeff = coeff * Gauss::i();
    }
    let mut key = CKey {
        b0: 0,
        k: 0,
        letters: [0; 5],
        xi1: 0,
        xi2: 0,
    };
    let split_pow = |tok: &str, base: &str| -> Option<Result<u32, String>> {
        if tok == base {
            return Some(Ok(1));
        }
        let rest = tok.strip_prefix(base)?;
        let rest = rest.strip_prefix('^')?;
        Some(
            rest.parse::<u32>()
                .map_err(|_| format!("bad exponent in `{}`", tok)),
        )
    };
    'toks: for tok in tokens {
        // Longer bases first so `d11k^2` is not read as `d1k…`.
        for base in ["d11k", "d12k", "d22k", "d1k", "d2k", "b0", "x1", "x2", "k"] {
            if let Some(e) = split_pow(tok, base) {
                let e = e?;
                match base {
                    "b0" => key.b0 += e,
                    "k" => key.k += e,
                    "x1" => key.xi1 += e,
                    "x2" => key.xi2 += e,
                    _ => {
                        let l = Letter::from_token(base).expect("letter token");
                        key.letters[letter_index(l)] += e;
                    }
                }
                continue 'toks;
            }
        }
        return Err(format!("unknown token `{}`", tok));
    }
    Ok((key, coeff))
}

// ---------------------------------------------------------------------------
// Momentum integration
// ---------------------------------------------------------------------------

/// An exactly integrated density: `π^pi_power · Σ c · k^e · ∏ letterᵢ^{mᵢ}`.
///
/// The key is the (possibly negative) power of `k` together with the letter
/// multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalDensity {
    pub pi_power: i32,
    pub terms: BTreeMap<(i64, [u32; 5]), Gauss>,
}

impl ClassicalDensity {
    pub fn zero() -> ClassicalDensity {
        ClassicalDensity {
            pi_power: 1,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert_add(&mut self, key: (i64, [u32; 5]), c: Gauss) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            None => {
                self.terms.insert(key, c);
            }
            Some(prev) => {
                let sum = prev + c;
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
        }
    }

    /// Multiplies every coefficient by `g` and shifts the power of π.
    pub fn scale(&self, g: &Gauss, pi_shift: i32) -> ClassicalDensity {
        ClassicalDensity {
            pi_power: self.pi_power + pi_shift,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c * g))
                .collect(),
        }
    }

    /// One line per term, spelling the power of π explicitly.
    pub fn to_lines(&self) -> Vec<String> {
        self.terms
            .iter()
            .rev()
            .map(|((kp, letters), c)| {
                let mut s = coeff_prefix(c);
                match self.pi_power {
                    0 => {}
                    1 => s.push_str(" pi"),
                    p => s.push_str(&format!(" pi^{}", p)),
                }
                if *kp != 0 {
                    s.push_str(&format!(" k^{}", kp));
                }
                for (idx, l) in LETTERS.iter().enumerate() {
                    push_pow(&mut s, l.token(), letters[idx]);
                }
                s
            })
            .collect()
    }

    /// Evaluates the density as a float given `k` and the five letter values.
    /// `pi_power` is included.
    pub fn eval_f64(&self, k: f64, letters: [f64; 5]) -> f64 {
        let mut acc = 0.0;
        for ((kp, m), c) in &self.terms {
            let mut t = c.approx().re * crate::scalar::powi_f64(k, *kp as i32);
            for idx in 0..5 {
                t *= crate::scalar::powi_f64(letters[idx], m[idx] as i32);
            }
            acc += t;
        }
        acc * crate::scalar::powi_f64(core::f64::consts::PI, self.pi_power)
    }
}

impl core::fmt::Display for ClassicalDensity {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, line) in self.to_lines().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", line)?;
        }
        Ok(())
    }
}

/// Integrates a collapsed polynomial over the momentum plane.
///
/// For a monomial `c · k^e · L · b0^p · ξ₁^{2a} ξ₂^{2b}` the substitution
/// `ξ₂ → ξ₂/k` followed by polar coordinates gives
///
/// ```text
/// ∫∫ = c · L · k^{e−2b−1} · B(a+½, b+½) · B(a+b+1, p−a−b−1),
/// ```
///
/// which converges exactly when `p ≥ a+b+2`.  Odd momentum powers integrate
/// to zero by symmetry.  The half-integer Beta factor contributes one overall
/// power of π, recorded in `pi_power`.
pub fn integrate_momenta(poly: &CPoly) -> Result<ClassicalDensity, ClassicalError> {
    let mut out = ClassicalDensity::zero();
    for (key, c) in &poly.terms {
        if key.xi1 % 2 == 1 || key.xi2 % 2 == 1 {
            continue;
        }
        let (a, b, p) = (key.xi1 / 2, key.xi2 / 2, key.b0);
        if p < a + b + 2 {
            return Err(ClassicalError::Divergent);
        }
        let factor: BigRational =
            beta_half_half_over_pi(a, b) * beta_int(a + b + 1, p - a - b - 1);
        let k_pow = key.k as i64 - 2 * (b as i64) - 1;
        out.insert_add((k_pow, key.letters), c.scale(&factor));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The curvature chain
// ---------------------------------------------------------------------------

/// Commutative momentum integral of the spin-plain part of the subleading
/// parametrix term.
pub fn plain_commutative_integral() -> Result<ClassicalDensity, ClassicalError> {
    let (_, _, b2) = crate::symbol::parametrix()?;
    let poly = CPoly::collapse(&b2.even_part().spin_plain_part())?;
    integrate_momenta(&poly)
}

/// Commutative momentum integral of the chiral-traced part; vanishes exactly.
pub fn chiral_commutative_integral() -> Result<ClassicalDensity, ClassicalError> {
    let (_, _, b2) = crate::symbol::parametrix()?;
    let poly = CPoly::collapse(&b2.even_part().spin_chiral_part())?;
    integrate_momenta(&poly)
}

/// The commutative scalar-curvature density: the plain momentum integral
/// carries the overall normalization `48π · (2π)⁻² = 12/π`.
pub fn commutative_scalar_curvature() -> Result<ClassicalDensity, ClassicalError> {
    let plain = plain_commutative_integral()?;
    Ok(plain.scale(&Gauss::from_int(12), -1))
}

/// `true` when the density is a genuine curvature: total weight `−1` in the
/// scaling `k ↦ λk` for every term (each letter scales like `k` itself).
pub fn has_uniform_weight(d: &ClassicalDensity, weight: i64) -> bool {
    d.terms.keys().all(|(kp, letters)| {
        let letter_count: u32 = letters.iter().sum();
        kp + letter_count as i64 == weight
    })
}
