//! Exact rational functions of the modular variables s and t.
//!
//! Denominators are kept factored over the fixed set of irreducibles
//! {s, s+1, s−1, t, t+1, t−1, s+t, s−t} that closed-form rearrangement ever
//! produces; numerators are expanded polynomials with `BigRational`
//! coefficients.  Equality is decided by cross-multiplication, so no
//! general factorization is ever needed.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rat = BigRational;

pub fn rat_i64(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Errors from rational-function arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum RatFnError {
    /// A numerator had to be inverted but does not factor over the fixed
    /// irreducible set.
    NotFactorable(String),
    /// A substitution hit a pole (a vanishing denominator factor).
    Pole(&'static str),
}

impl fmt::Display for RatFnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatFnError::NotFactorable(p) => {
                write!(f, "polynomial does not factor over s,t irreducibles: {}", p)
            }
            RatFnError::Pole(w) => write!(f, "substitution hits a pole at {}", w),
        }
    }
}

// ---------------------------------------------------------------------------
// Dense single-variable polynomials
// ---------------------------------------------------------------------------

/// Dense polynomial in one variable with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly1 {
    /// coeffs[d] is the coefficient of x^d; no trailing zeros.
    pub coeffs: Vec<Rat>,
}

impl Poly1 {
    pub fn zero() -> Self {
        Poly1 { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Poly1 { coeffs: vec![c] };
        p.trim();
        p
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut p = Poly1 { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn add(&self, o: &Poly1) -> Poly1 {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = vec![Rat::zero(); n];
        for (d, c) in self.coeffs.iter().enumerate() {
            out[d] += c;
        }
        for (d, c) in o.coeffs.iter().enumerate() {
            out[d] += c;
        }
        Poly1::from_coeffs(out)
    }

    pub fn neg(&self) -> Poly1 {
        Poly1 {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn sub(&self, o: &Poly1) -> Poly1 {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly1) -> Poly1 {
        if self.is_zero() || o.is_zero() {
            return Poly1::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (d1, c1) in self.coeffs.iter().enumerate() {
            for (d2, c2) in o.coeffs.iter().enumerate() {
                out[d1 + d2] += c1 * c2;
            }
        }
        Poly1::from_coeffs(out)
    }

    pub fn scale(&self, c: &Rat) -> Poly1 {
        if c.is_zero() {
            return Poly1::zero();
        }
        Poly1 {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplication by x^n.
    pub fn shift(&self, n: usize) -> Poly1 {
        if self.is_zero() {
            return Poly1::zero();
        }
        let mut coeffs = vec![Rat::zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly1 { coeffs }
    }

    /// Coefficient reversal: x^deg · p(1/x).
    pub fn reversed(&self) -> Poly1 {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Poly1::from_coeffs(coeffs)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Sparse two-variable polynomials
// ---------------------------------------------------------------------------

/// Sparse polynomial in (s, t); keys are (s-degree, t-degree).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly2 {
    pub terms: BTreeMap<(u32, u32), Rat>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Poly2::zero();
        p.insert_add((0, 0), c);
        p
    }

    pub fn one() -> Self {
        Poly2::constant(Rat::one())
    }

    pub fn monomial(i: u32, j: u32, c: Rat) -> Self {
        let mut p = Poly2::zero();
        p.insert_add((i, j), c);
        p
    }

    pub fn var_s() -> Self {
        Poly2::monomial(1, 0, Rat::one())
    }

    pub fn var_t() -> Self {
        Poly2::monomial(0, 1, Rat::one())
    }

    pub fn insert_add(&mut self, key: (u32, u32), c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            None => {
                self.terms.insert(key, c);
            }
            Some(prev) => {
                let s = prev + c;
                if !s.is_zero() {
                    self.terms.insert(key, s);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, o: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.insert_add(*k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly2 {
        Poly2 {
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, o: &Poly2) -> Poly2 {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &o.terms {
                out.insert_add((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Poly2 {
        if c.is_zero() {
            return Poly2::zero();
        }
        Poly2 {
            terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect(),
        }
    }

    /// Lexicographic leading term with s > t.
    fn leading(&self) -> Option<((u32, u32), Rat)> {
        self.terms
            .iter()
            .max_by_key(|((i, j), _)| (*i, *j))
            .map(|(k, c)| (*k, c.clone()))
    }

    /// Exact division; returns `None` when the divisor does not divide.
    pub fn divide_exact(&self, d: &Poly2) -> Option<Poly2> {
        let (ld, cd) = d.leading()?;
        let mut rem = self.clone();
        let mut quo = Poly2::zero();
        while let Some((lr, cr)) = rem.leading() {
            if lr.0 < ld.0 || lr.1 < ld.1 {
                return None;
            }
            let qk = (lr.0 - ld.0, lr.1 - ld.1);
            let qc = cr / &cd;
            let qterm = Poly2::monomial(qk.0, qk.1, qc);
            rem = rem.sub(&qterm.mul(d));
            quo = quo.add(&qterm);
        }
        Some(quo)
    }

    /// Substitutes t = 1.
    pub fn subst_t_one(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for ((i, j), c) in &self.terms {
            let _ = j;
            out.insert_add((*i, 0), c.clone());
        }
        out
    }

    /// Substitutes s = 1.
    pub fn subst_s_one(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for ((_, j), c) in &self.terms {
            out.insert_add((0, *j), c.clone());
        }
        out
    }

    /// Converts a t-free polynomial to dense single-variable form.
    pub fn to_poly1(&self) -> Option<Poly1> {
        let deg = self.terms.keys().map(|(i, _)| *i).max().unwrap_or(0);
        let mut coeffs = vec![Rat::zero(); deg as usize + 1];
        for ((i, j), c) in &self.terms {
            if *j != 0 {
                return None;
            }
            coeffs[*i as usize] = c.clone();
        }
        Some(Poly1::from_coeffs(coeffs))
    }

    pub fn eval_rat(&self, s: &Rat, t: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for ((i, j), c) in &self.terms {
            let mut term = c.clone();
            for _ in 0..*i {
                term *= s;
            }
            for _ in 0..*j {
                term *= t;
            }
            acc += term;
        }
        acc
    }

    pub fn eval_f64(&self, s: f64, t: f64) -> f64 {
        let mut acc = 0.0;
        for ((i, j), c) in &self.terms {
            let cf = rat_to_f64(c);
            acc += cf * crate::scalar::powi_f64(s, *i as i32) * crate::scalar::powi_f64(t, *j as i32);
        }
        acc
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((i, j), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", crate::scalar::fmt_rational(c))?;
            if *i > 0 {
                write!(f, " s^{}", i)?;
            }
            if *j > 0 {
                write!(f, " t^{}", j)?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Fixed irreducible factors and factored denominators
// ---------------------------------------------------------------------------

/// Irreducible denominator factors, ordered as they print.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Irr {
    S,
    Sp1,
    Sm1,
    T,
    Tp1,
    Tm1,
    SpT,
    SmT,
}

pub const ALL_IRR: [Irr; 8] = [
    Irr::S,
    Irr::Sp1,
    Irr::Sm1,
    Irr::T,
    Irr::Tp1,
    Irr::Tm1,
    Irr::SpT,
    Irr::SmT,
];

impl Irr {
    pub fn poly(self) -> Poly2 {
        let one = Rat::one();
        match self {
            Irr::S => Poly2::monomial(1, 0, one),
            Irr::Sp1 => {
                let mut p = Poly2::monomial(1, 0, Rat::one());
                p.insert_add((0, 0), Rat::one());
                p
            }
            Irr::Sm1 => {
                let mut p = Poly2::monomial(1, 0, Rat::one());
                p.insert_add((0, 0), -Rat::one());
                p
            }
            Irr::T => Poly2::monomial(0, 1, one),
            Irr::Tp1 => {
                let mut p = Poly2::monomial(0, 1, Rat::one());
                p.insert_add((0, 0), Rat::one());
                p
            }
            Irr::Tm1 => {
                let mut p = Poly2::monomial(0, 1, Rat::one());
                p.insert_add((0, 0), -Rat::one());
                p
            }
            Irr::SpT => {
                let mut p = Poly2::monomial(1, 0, Rat::one());
                p.insert_add((0, 1), Rat::one());
                p
            }
            Irr::SmT => {
                let mut p = Poly2::monomial(1, 0, Rat::one());
                p.insert_add((0, 1), -Rat::one());
                p
            }
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Irr::S => "s",
            Irr::Sp1 => "s+1",
            Irr::Sm1 => "s-1",
            Irr::T => "t",
            Irr::Tp1 => "t+1",
            Irr::Tm1 => "t-1",
            Irr::SpT => "s+t",
            Irr::SmT => "s-t",
        }
    }
}

/// Multiset of irreducible denominator factors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactorBag {
    pub powers: BTreeMap<Irr, u32>,
}

impl FactorBag {
    pub fn empty() -> Self {
        FactorBag {
            powers: BTreeMap::new(),
        }
    }

    pub fn single(irr: Irr, e: u32) -> Self {
        let mut b = FactorBag::empty();
        b.push(irr, e);
        b
    }

    pub fn push(&mut self, irr: Irr, e: u32) {
        if e == 0 {
            return;
        }
        *self.powers.entry(irr).or_insert(0) += e;
    }

    pub fn remove(&mut self, irr: Irr, e: u32) {
        if e == 0 {
            return;
        }
        let cur = self.powers.get_mut(&irr).expect("factor not present");
        assert!(*cur >= e, "factor power underflow");
        *cur -= e;
        if *cur == 0 {
            self.powers.remove(&irr);
        }
    }

    pub fn merge(&self, o: &FactorBag) -> FactorBag {
        let mut out = self.clone();
        for (irr, e) in &o.powers {
            out.push(*irr, *e);
        }
        out
    }

    /// Componentwise minimum.
    pub fn gcd(&self, o: &FactorBag) -> FactorBag {
        let mut out = FactorBag::empty();
        for (irr, e) in &self.powers {
            if let Some(e2) = o.powers.get(irr) {
                out.push(*irr, (*e).min(*e2));
            }
        }
        out
    }

    /// self − o (must be contained).
    pub fn difference(&self, o: &FactorBag) -> FactorBag {
        let mut out = self.clone();
        for (irr, e) in &o.powers {
            out.remove(*irr, *e);
        }
        out
    }

    pub fn expand(&self) -> Poly2 {
        let mut p = Poly2::one();
        for (irr, e) in &self.powers {
            let f = irr.poly();
            for _ in 0..*e {
                p = p.mul(&f);
            }
        }
        p
    }

    pub fn eval_rat(&self, s: &Rat, t: &Rat) -> Rat {
        self.expand().eval_rat(s, t)
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Rational functions in (s, t)
// ---------------------------------------------------------------------------

/// A rational function num / ∏ irr^e with exact coefficients.
#[derive(Debug, Clone)]
pub struct RatFn2 {
    pub num: Poly2,
    pub den: FactorBag,
}

impl RatFn2 {
    pub fn zero() -> Self {
        RatFn2 {
            num: Poly2::zero(),
            den: FactorBag::empty(),
        }
    }

    pub fn one() -> Self {
        RatFn2::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        RatFn2 {
            num: Poly2::constant(c),
            den: FactorBag::empty(),
        }
    }

    pub fn from_poly(num: Poly2) -> Self {
        RatFn2 {
            num,
            den: FactorBag::empty(),
        }
    }

    pub fn new(num: Poly2, den: FactorBag) -> Self {
        let mut r = RatFn2 { num, den };
        r.reduce();
        r
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels denominator factors that divide the numerator exactly.
    pub fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = FactorBag::empty();
            return;
        }
        let irrs: Vec<Irr> = self.den.powers.keys().cloned().collect();
        for irr in irrs {
            let p = irr.poly();
            loop {
                let e = self.den.powers.get(&irr).cloned().unwrap_or(0);
                if e == 0 {
                    break;
                }
                match self.num.divide_exact(&p) {
                    Some(q) => {
                        self.num = q;
                        self.den.remove(irr, 1);
                    }
                    None => break,
                }
            }
        }
    }

    pub fn add(&self, o: &RatFn2) -> RatFn2 {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let g = self.den.gcd(&o.den);
        let d1 = self.den.difference(&g);
        let d2 = o.den.difference(&g);
        let num = self
            .num
            .mul(&d2.expand())
            .add(&o.num.mul(&d1.expand()));
        let den = self.den.merge(&d2);
        RatFn2::new(num, den)
    }

    pub fn neg(&self) -> RatFn2 {
        RatFn2 {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatFn2) -> RatFn2 {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFn2) -> RatFn2 {
        RatFn2::new(self.num.mul(&o.num), self.den.merge(&o.den))
    }

    pub fn scale(&self, c: &Rat) -> RatFn2 {
        if c.is_zero() {
            return RatFn2::zero();
        }
        RatFn2 {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Multiplies by s^i t^j with signed exponents.
    pub fn mul_monomial(&self, i: i64, j: i64) -> RatFn2 {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        if i >= 0 {
            num = num.mul(&Poly2::monomial(i as u32, 0, Rat::one()));
        } else {
            den.push(Irr::S, (-i) as u32);
        }
        if j >= 0 {
            num = num.mul(&Poly2::monomial(0, j as u32, Rat::one()));
        } else {
            den.push(Irr::T, (-j) as u32);
        }
        RatFn2::new(num, den)
    }

    /// Multiplicative inverse; fails when the numerator does not factor over
    /// the fixed irreducible set.
    pub fn recip(&self) -> Result<RatFn2, RatFnError> {
        use alloc::format;
        assert!(!self.is_zero(), "inverting zero rational function");
        let mut rem = self.num.clone();
        let mut bag = FactorBag::empty();
        loop {
            if let Some(c) = rem.as_constant() {
                let num = self.den.expand().scale(&(Rat::one() / c));
                return Ok(RatFn2::new(num, bag));
            }
            let mut progressed = false;
            for irr in ALL_IRR {
                if let Some(q) = rem.divide_exact(&irr.poly()) {
                    rem = q;
                    bag.push(irr, 1);
                    progressed = true;
                    break;
                }
            }
            if !progressed {
                return Err(RatFnError::NotFactorable(format!("{}", rem)));
            }
        }
    }

    /// Structural equality of values, decided by cross-multiplication.
    pub fn eq_value(&self, o: &RatFn2) -> bool {
        self.num.mul(&o.den.expand()) == o.num.mul(&self.den.expand())
    }

    /// Substitutes t = 1; errors if the denominator contains (t−1).
    pub fn subst_t_one(&self) -> Result<RatFn2, RatFnError> {
        let mut num = self.num.subst_t_one();
        let mut den = FactorBag::empty();
        for (irr, e) in &self.den.powers {
            match irr {
                Irr::T => {}
                Irr::Tp1 => {
                    // (t+1)^e → 2^e
                    let half = Rat::new(BigInt::one(), BigInt::from(2));
                    for _ in 0..*e {
                        num = num.scale(&half);
                    }
                }
                Irr::Tm1 => return Err(RatFnError::Pole("t = 1")),
                Irr::SpT => den.push(Irr::Sp1, *e),
                Irr::SmT => den.push(Irr::Sm1, *e),
                other => den.push(*other, *e),
            }
        }
        Ok(RatFn2::new(num, den))
    }

    /// Substitutes s = 1; errors if the denominator contains (s−1).
    pub fn subst_s_one(&self) -> Result<RatFn2, RatFnError> {
        let mut num = self.num.subst_s_one();
        let mut den = FactorBag::empty();
        for (irr, e) in &self.den.powers {
            match irr {
                Irr::S => {}
                Irr::Sp1 => {
                    let half = Rat::new(BigInt::one(), BigInt::from(2));
                    for _ in 0..*e {
                        num = num.scale(&half);
                    }
                }
                Irr::Sm1 => return Err(RatFnError::Pole("s = 1")),
                Irr::SpT => den.push(Irr::Tp1, *e),
                Irr::SmT => {
                    // 1 − t = −(t − 1)
                    den.push(Irr::Tm1, *e);
                    if e % 2 == 1 {
                        num = num.neg();
                    }
                }
                other => den.push(*other, *e),
            }
        }
        Ok(RatFn2::new(num, den))
    }

    /// Expanded single-variable view (numerator, denominator); `None` if t
    /// still occurs.
    pub fn to_single_var(&self) -> Option<(Poly1, Poly1)> {
        let num = self.num.to_poly1()?;
        let den = self.den.expand().to_poly1()?;
        Some((num, den))
    }

    pub fn eval_rat(&self, s: &Rat, t: &Rat) -> Option<Rat> {
        let d = self.den.eval_rat(s, t);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_rat(s, t) / d)
    }

    pub fn eval_f64(&self, s: f64, t: f64) -> f64 {
        let mut den = 1.0;
        for (irr, e) in &self.den.powers {
            den *= crate::scalar::powi_f64(irr.poly().eval_f64(s, t), *e as i32);
        }
        self.num.eval_f64(s, t) / den
    }
}

impl PartialEq for RatFn2 {
    fn eq(&self, other: &Self) -> bool {
        self.eq_value(other)
    }
}

impl fmt::Display for RatFn2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.num)?;
        if !self.den.is_empty() {
            write!(f, " / (")?;
            let mut first = true;
            for (irr, e) in &self.den.powers {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                if *e == 1 {
                    write!(f, "({})", irr.symbol())?;
                } else {
                    write!(f, "({})^{}", irr.symbol(), e)?;
                }
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Single-variable fractions for reciprocal substitutions
// ---------------------------------------------------------------------------

/// num/den as expanded polynomials in one variable — the form used for the
/// reciprocal-substitution identity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct RatFn1 {
    pub num: Poly1,
    pub den: Poly1,
}

impl RatFn1 {
    pub fn from_two_var(r: &RatFn2) -> Option<RatFn1> {
        let (num, den) = r.to_single_var()?;
        Some(RatFn1 { num, den })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The function x ↦ f(1/x), again as a polynomial fraction.
    pub fn recip_substitute(&self) -> RatFn1 {
        let dn = self.num.degree();
        let dd = self.den.degree();
        let mut num = self.num.reversed();
        let mut den = self.den.reversed();
        if dd > dn {
            num = num.shift(dd - dn);
        } else {
            den = den.shift(dn - dd);
        }
        RatFn1 { num, den }
    }

    /// Multiplies by x^n.
    pub fn mul_power(&self, n: usize) -> RatFn1 {
        RatFn1 {
            num: self.num.shift(n),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, o: &RatFn1) -> RatFn1 {
        RatFn1 {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
    }

    pub fn eq_value(&self, o: &RatFn1) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }
}
