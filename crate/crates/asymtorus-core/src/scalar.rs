//! Coefficient rings for exact and floating-point torus computations.
//!
//! Exact computations use Gaussian rationals ℚ(i) extended by the circle
//! constant τ = 2π: the derivations multiply a mode coefficient by 2πi·m, so
//! closing derivation identities exactly requires τ as a formal (transcendental)
//! generator.  An element of [`TauPoly`] is a finite sum Σ_d g_d · τ^d with
//! g_d ∈ ℚ(i).
//!
//! Floating-point computations use `Complex64`; they admit arbitrary real
//! deformation parameters θ at the cost of ~1e−12 accumulated roundoff.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// τ = 2π as a floating-point constant.
pub const TAU_F64: f64 = core::f64::consts::PI * 2.0;

// ---------------------------------------------------------------------------
// Gaussian rationals
// ---------------------------------------------------------------------------

/// A Gaussian rational `re + im·i` with arbitrary-precision parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Gauss {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gauss {
    pub fn zero() -> Self {
        Gauss {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Gauss {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Gauss {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Gauss {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// `p/q` as a real Gaussian rational.  Panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        Gauss {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Gauss {
            re: r,
            im: BigRational::zero(),
        }
    }

    /// i^p for p taken mod 4.
    pub fn i_pow(p: u8) -> Self {
        match p % 4 {
            0 => Gauss::one(),
            1 => Gauss::i(),
            2 => -Gauss::one(),
            _ => -Gauss::i(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gauss {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Multiplicative inverse.  Panics on zero.
    pub fn recip(&self) -> Self {
        let n = &self.re * &self.re + &self.im * &self.im;
        assert!(!n.is_zero(), "division by zero Gaussian rational");
        Gauss {
            re: &self.re / &n,
            im: -(&self.im / &n),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Gauss {
            re: &self.re * r,
            im: &self.im * r,
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    pub fn approx(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Add for Gauss {
    type Output = Gauss;
    fn add(self, o: Gauss) -> Gauss {
        Gauss {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for Gauss {
    type Output = Gauss;
    fn sub(self, o: Gauss) -> Gauss {
        Gauss {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Neg for Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for Gauss {
    type Output = Gauss;
    fn mul(self, o: Gauss) -> Gauss {
        Gauss {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Mul<&'a Gauss> for &'a Gauss {
    type Output = Gauss;
    fn mul(self, o: &Gauss) -> Gauss {
        Gauss {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

/// Renders a rational without a superfluous `/1`.
pub fn fmt_rational(r: &BigRational) -> String {
    use alloc::format;
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if !self.re.is_zero() {
            write!(f, "{}", fmt_rational(&self.re))?;
            if !self.im.is_zero() {
                if self.im.is_positive() {
                    write!(f, "+")?;
                }
                write!(f, "{} i", fmt_rational(&self.im))?;
            }
            Ok(())
        } else {
            write!(f, "{} i", fmt_rational(&self.im))
        }
    }
}

// ---------------------------------------------------------------------------
// Exact scalars: ℚ(i)[τ]
// ---------------------------------------------------------------------------

/// A polynomial Σ_d g_d τ^d in the circle constant τ = 2π over ℚ(i).
///
/// This is the exact coefficient ring of the torus algebra: derivations
/// multiply mode coefficients by τ·i·m, and phases contribute elements of
/// ℚ(i) whenever they are fourth roots of unity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct TauPoly {
    terms: BTreeMap<u16, Gauss>,
}

impl TauPoly {
    pub fn zero() -> Self {
        TauPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        TauPoly::from_gauss(Gauss::one())
    }

    pub fn from_gauss(g: Gauss) -> Self {
        let mut terms = BTreeMap::new();
        if !g.is_zero() {
            terms.insert(0, g);
        }
        TauPoly { terms }
    }

    /// The generator τ itself.
    pub fn tau() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(1, Gauss::one());
        TauPoly { terms }
    }

    /// g · τ^d.
    pub fn monomial(d: u16, g: Gauss) -> Self {
        let mut terms = BTreeMap::new();
        if !g.is_zero() {
            terms.insert(d, g);
        }
        TauPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u16, &Gauss)> {
        self.terms.iter()
    }

    /// Returns the ℚ(i) value if the element is τ-free (degree 0), else `None`.
    pub fn as_gauss(&self) -> Option<Gauss> {
        match self.terms.len() {
            0 => Some(Gauss::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn conj(&self) -> Self {
        TauPoly {
            terms: self
                .terms
                .iter()
                .map(|(d, g)| (*d, g.conj()))
                .collect(),
        }
    }

    pub fn scale(&self, g: &Gauss) -> Self {
        if g.is_zero() {
            return TauPoly::zero();
        }
        TauPoly {
            terms: self.terms.iter().map(|(d, c)| (*d, c * g)).collect(),
        }
    }

    pub fn approx(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (d, g) in &self.terms {
            acc += g.approx() * libm::pow(TAU_F64, *d as f64);
        }
        acc
    }

    fn insert_add(terms: &mut BTreeMap<u16, Gauss>, d: u16, g: Gauss) {
        if g.is_zero() {
            return;
        }
        match terms.remove(&d) {
            None => {
                terms.insert(d, g);
            }
            Some(prev) => {
                let s = prev + g;
                if !s.is_zero() {
                    terms.insert(d, s);
                }
            }
        }
    }
}

/// Integer power of an f64 without the std `powi`.
pub(crate) fn powi_f64(base: f64, exp: i32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    if exp < 0 {
        1.0 / acc
    } else {
        acc
    }
}

impl Add for TauPoly {
    type Output = TauPoly;
    fn add(self, o: TauPoly) -> TauPoly {
        let mut terms = self.terms;
        for (d, g) in o.terms {
            TauPoly::insert_add(&mut terms, d, g);
        }
        TauPoly { terms }
    }
}

impl Sub for TauPoly {
    type Output = TauPoly;
    fn sub(self, o: TauPoly) -> TauPoly {
        self + (-o)
    }
}

impl Neg for TauPoly {
    type Output = TauPoly;
    fn neg(self) -> TauPoly {
        TauPoly {
            terms: self.terms.into_iter().map(|(d, g)| (d, -g)).collect(),
        }
    }
}

impl Mul for TauPoly {
    type Output = TauPoly;
    fn mul(self, o: TauPoly) -> TauPoly {
        let mut terms = BTreeMap::new();
        for (d1, g1) in &self.terms {
            for (d2, g2) in &o.terms {
                TauPoly::insert_add(&mut terms, d1 + d2, g1 * g2);
            }
        }
        TauPoly { terms }
    }
}

impl fmt::Display for TauPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, g) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "({})", g)?,
                1 => write!(f, "({}) tau", g)?,
                _ => write!(f, "({}) tau^{}", g, d)?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Phase errors and the coefficient trait
// ---------------------------------------------------------------------------

/// Raised when a product phase e^{2πiθw} is not a fourth root of unity and
/// therefore has no exact Gaussian-rational value.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseNotExact {
    /// θ·w reduced mod 1; the phase would be e^{2πi·(this)}.
    pub fractional_turn: BigRational,
}

impl fmt::Display for PhaseNotExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "phase e^{{2πi·{}}} is not a fourth root of unity; use the floating-point representation for this deformation parameter",
            fmt_rational(&self.fractional_turn)
        )
    }
}

/// Scalar ring used by [`crate::torus::TorusElement`].
///
/// The two implementations are [`TauPoly`] (exact, rational θ with phases
/// restricted to fourth roots of unity) and `Complex64` (floating point,
/// arbitrary real θ).
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Representation of the deformation parameter θ.
    type Theta: Clone + PartialEq + fmt::Debug;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    /// The commutation phase e^{2πiθ·w}.
    fn phase(theta: &Self::Theta, w: i64) -> Result<Self, PhaseNotExact>;
    /// The derivation factor 2πi·m = τ·i·m.
    fn deriv_factor(m: i64) -> Self;
    fn approx(&self) -> Complex64;
}

impl Coeff for TauPoly {
    type Theta = BigRational;

    fn zero() -> Self {
        TauPoly::zero()
    }

    fn one() -> Self {
        TauPoly::one()
    }

    fn is_zero(&self) -> bool {
        TauPoly::is_zero(self)
    }

    fn conj(&self) -> Self {
        TauPoly::conj(self)
    }

    fn phase(theta: &BigRational, w: i64) -> Result<Self, PhaseNotExact> {
        let turn = theta * BigRational::from_integer(BigInt::from(w));
        // Reduce mod 1 and demand a denominator dividing 4.
        let four = BigRational::from_integer(BigInt::from(4));
        let q = &turn * &four; // quarter turns
        if q.denom().is_one() {
            // q mod 4 selects the power of i.
            let qm = q.numer().mod_floor_u8();
            Ok(TauPoly::from_gauss(Gauss::i_pow(qm)))
        } else {
            let frac = &turn - turn.floor();
            Err(PhaseNotExact {
                fractional_turn: frac,
            })
        }
    }

    fn deriv_factor(m: i64) -> Self {
        TauPoly::monomial(1, Gauss::i().scale(&BigRational::from_integer(BigInt::from(m))))
    }

    fn approx(&self) -> Complex64 {
        TauPoly::approx(self)
    }
}

trait ModFloorU8 {
    fn mod_floor_u8(&self) -> u8;
}

impl ModFloorU8 for BigInt {
    fn mod_floor_u8(&self) -> u8 {
        use num_integer::Integer;
        let four = BigInt::from(4);
        let r = self.mod_floor(&four);
        r.to_u8().expect("residue mod 4 fits in u8")
    }
}

impl Coeff for Complex64 {
    type Theta = f64;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn conj(&self) -> Self {
        Complex64::new(self.re, -self.im)
    }

    fn phase(theta: &f64, w: i64) -> Result<Self, PhaseNotExact> {
        Ok(Complex64::from_polar(1.0, TAU_F64 * theta * w as f64))
    }

    fn deriv_factor(m: i64) -> Self {
        Complex64::new(0.0, TAU_F64 * m as f64)
    }

    fn approx(&self) -> Complex64 {
        *self
    }
}

// ---------------------------------------------------------------------------
// Exact rational helpers shared across the crate
// ---------------------------------------------------------------------------

/// n! as a `BigRational`.
pub fn factorial(n: u32) -> BigRational {
    let mut acc = BigInt::one();
    for j in 2..=n as u64 {
        acc *= BigInt::from(j);
    }
    BigRational::from_integer(acc)
}

/// Binomial coefficient C(n, j) as a `BigRational`.
pub fn binomial(n: u32, j: u32) -> BigRational {
    if j > n {
        return BigRational::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for r in 0..j as u64 {
        num *= BigInt::from(n as u64 - r);
        den *= BigInt::from(r + 1);
    }
    BigRational::new(num, den)
}

/// Γ(a + 1/2) / √π = (2a)! / (4^a a!) as a rational.
pub fn gamma_half_over_sqrt_pi(a: u32) -> BigRational {
    let mut num = BigInt::one();
    for j in 1..=(2 * a) as u64 {
        num *= BigInt::from(j);
    }
    let mut den = BigInt::one();
    for j in 1..=a as u64 {
        den *= BigInt::from(j);
    }
    den *= BigInt::one() << (2 * a as usize); // 4^a
    BigRational::new(num, den)
}

/// B(a + 1/2, b + 1/2) / π — the beta function of two half-integers is always
/// π times a rational: Γ(a+½)Γ(b+½)/Γ(a+b+1).
pub fn beta_half_half_over_pi(a: u32, b: u32) -> BigRational {
    gamma_half_over_sqrt_pi(a) * gamma_half_over_sqrt_pi(b) / factorial(a + b)
}

/// B(m, n) for positive integers = (m−1)!(n−1)!/(m+n−1)!.
pub fn beta_int(m: u32, n: u32) -> BigRational {
    assert!(m >= 1 && n >= 1, "integer beta needs positive arguments");
    factorial(m - 1) * factorial(n - 1) / factorial(m + n - 1)
}

/// B(k + 1/2, n) for integer n ≥ 1 — rational: (n−1)! · 2^n / ∏_{j=0}^{n−1}(2k+1+2j).
pub fn beta_halfint_int(k: u32, n: u32) -> BigRational {
    assert!(n >= 1, "beta second argument must be a positive integer");
    let mut den = BigInt::one();
    for j in 0..n as u64 {
        den *= BigInt::from(2 * k as u64 + 1 + 2 * j);
    }
    factorial(n - 1) * BigRational::new(BigInt::one() << n as usize, den)
}

/// B(1/2, j − 1/2) / π = (2j−3)!! / (2^{j−1} (j−1)!) for j ≥ 1.
pub fn beta_w_over_pi(j: u32) -> BigRational {
    assert!(j >= 1);
    let mut num = BigInt::one();
    let mut d = 2i64 * j as i64 - 3;
    while d >= 2 {
        num *= BigInt::from(d);
        d -= 2;
    }
    let den = BigInt::one() << (j - 1) as usize;
    BigRational::new(num, den) / factorial(j - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn gauss_arithmetic() {
        let a = Gauss::from_ratio(1, 2);
        let b = Gauss::i();
        let c = (a.clone() + b.clone()) * (a.clone() - b.clone());
        // (1/2 + i)(1/2 − i) = 1/4 + 1 = 5/4
        assert_eq!(c, Gauss::from_ratio(5, 4));
        assert_eq!(Gauss::i_pow(2), -Gauss::one());
        assert_eq!(b.clone() * b.clone().conj(), Gauss::one());
        assert_eq!(a.recip(), Gauss::from_int(2));
    }

    #[test]
    fn tau_poly_ring() {
        let t = TauPoly::tau();
        let two = TauPoly::from_gauss(Gauss::from_int(2));
        let p = t.clone() * t.clone() + two.clone();
        assert_eq!(p.clone() - p.clone(), TauPoly::zero());
        let q = p * t; // τ³ + 2τ
        let expect = TauPoly::monomial(3, Gauss::one()) + TauPoly::monomial(1, Gauss::from_int(2));
        assert_eq!(q, expect);
        assert!((TauPoly::tau().approx().re - TAU_F64).abs() < 1e-15);
    }

    #[test]
    fn exact_phases_are_fourth_roots() {
        let quarter = rat(1, 4);
        assert_eq!(
            <TauPoly as Coeff>::phase(&quarter, 1).unwrap(),
            TauPoly::from_gauss(Gauss::i())
        );
        assert_eq!(
            <TauPoly as Coeff>::phase(&quarter, 2).unwrap(),
            TauPoly::from_gauss(-Gauss::one())
        );
        assert_eq!(
            <TauPoly as Coeff>::phase(&quarter, -1).unwrap(),
            TauPoly::from_gauss(-Gauss::i())
        );
        assert_eq!(
            <TauPoly as Coeff>::phase(&rat(1, 2), 3).unwrap(),
            TauPoly::from_gauss(-Gauss::one())
        );
        // θ = 1/5 has no exact phase for a single crossing.
        let err = <TauPoly as Coeff>::phase(&rat(1, 5), 1).unwrap_err();
        assert_eq!(err.fractional_turn, rat(1, 5));
        // ... but five crossings is a full turn.
        assert_eq!(
            <TauPoly as Coeff>::phase(&rat(1, 5), 5).unwrap(),
            TauPoly::one()
        );
    }

    #[test]
    fn float_phase_matches_polar_form() {
        let p = <Complex64 as Coeff>::phase(&0.2, 3).unwrap();
        assert!((p.re - (TAU_F64 * 0.6).cos()).abs() < 1e-15);
        assert!((p.im - (TAU_F64 * 0.6).sin()).abs() < 1e-15);
    }

    #[test]
    fn beta_helpers() {
        // B(1/2, 1/2) = π.
        assert_eq!(beta_half_half_over_pi(0, 0), rat(1, 1));
        // B(1/2, 3/2) = π/2, B(3/2, 3/2) = π/8.
        assert_eq!(beta_half_half_over_pi(0, 1), rat(1, 2));
        assert_eq!(beta_half_half_over_pi(1, 1), rat(1, 8));
        // B(1/2, 1) = 2, B(1/2, 2) = 4/3, B(3/2, 1) = 2/3.
        assert_eq!(beta_halfint_int(0, 1), rat(2, 1));
        assert_eq!(beta_halfint_int(0, 2), rat(4, 3));
        assert_eq!(beta_halfint_int(1, 1), rat(2, 3));
        // B(1/2, 1/2)/π = 1, B(1/2, 3/2)/π = 1/2, B(1/2, 5/2)/π = 3/8.
        assert_eq!(beta_w_over_pi(1), rat(1, 1));
        assert_eq!(beta_w_over_pi(2), rat(1, 2));
        assert_eq!(beta_w_over_pi(3), rat(3, 8));
        // B(3, 1) = 1/3, B(2, 2) = 1/6.
        assert_eq!(beta_int(3, 1), rat(1, 3));
        assert_eq!(beta_int(2, 2), rat(1, 6));
        assert_eq!(binomial(5, 2), rat(10, 1));
        assert_eq!(factorial(5), rat(120, 1));
    }
}
