//! Elements of the rotation algebra and their basic operations.
//!
//! An element is a finite sum a = Σ a_{mn} U₁^m U₂^n in normal order, with the
//! commutation rule U₁U₂ = e^{2πiθ} U₂U₁.  The module implements the product
//! (with exact fourth-root-of-unity phases or floating-point phases depending
//! on the coefficient ring), the star involution
//! (a*)_{−m,−n} = conj(a_{mn}) e^{−2πiθmn}, the two basis derivations
//! δ_μ(U_ν) = 2πi δ_μ^ν U_ν, and the canonical trace 𝔱(a) = a₀₀.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::scalar::{Coeff, PhaseNotExact, TauPoly};

/// Error type for torus-algebra operations.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraError {
    /// The two operands live at different deformation parameters.
    ThetaMismatch,
    /// An exact phase was requested that is not a fourth root of unity.
    Phase(PhaseNotExact),
    /// The element cannot be written in the requested file format.
    NotRepresentable(String),
    /// Malformed serialized input.
    Parse(String),
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::ThetaMismatch => {
                write!(f, "operands have different deformation parameters")
            }
            AlgebraError::Phase(p) => write!(f, "{}", p),
            AlgebraError::NotRepresentable(s) => write!(f, "not representable: {}", s),
            AlgebraError::Parse(s) => write!(f, "parse error: {}", s),
        }
    }
}

impl From<PhaseNotExact> for AlgebraError {
    fn from(p: PhaseNotExact) -> Self {
        AlgebraError::Phase(p)
    }
}

/// Direction index of a derivation or symbol variable: 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    One,
    Two,
}

impl Dir {
    pub fn index(self) -> usize {
        match self {
            Dir::One => 1,
            Dir::Two => 2,
        }
    }
}

/// A finite Fourier element Σ a_{mn} U₁^m U₂^n of the rotation algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusElement<C: Coeff> {
    theta: C::Theta,
    coeffs: BTreeMap<(i64, i64), C>,
}

impl<C: Coeff> TorusElement<C> {
    pub fn zero(theta: C::Theta) -> Self {
        TorusElement {
            theta,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(theta: C::Theta) -> Self {
        Self::monomial(theta, 0, 0, C::one())
    }

    /// The generator U₁.
    pub fn u1(theta: C::Theta) -> Self {
        Self::monomial(theta, 1, 0, C::one())
    }

    /// The generator U₂.
    pub fn u2(theta: C::Theta) -> Self {
        Self::monomial(theta, 0, 1, C::one())
    }

    /// c · U₁^m U₂^n.
    pub fn monomial(theta: C::Theta, m: i64, n: i64, c: C) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert((m, n), c);
        }
        TorusElement { theta, coeffs }
    }

    pub fn from_coeffs<I: IntoIterator<Item = ((i64, i64), C)>>(theta: C::Theta, it: I) -> Self {
        let mut out = Self::zero(theta);
        for ((m, n), c) in it {
            out.insert_add((m, n), c);
        }
        out
    }

    pub fn theta(&self) -> &C::Theta {
        &self.theta
    }

    pub fn coeff(&self, m: i64, n: i64) -> C {
        self.coeffs.get(&(m, n)).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&(i64, i64), &C)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest |m| or |n| over the support (0 for the zero element).
    pub fn degree(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|(m, n)| m.abs().max(n.abs()))
            .max()
            .unwrap_or(0)
    }

    fn insert_add(&mut self, key: (i64, i64), c: C) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.remove(&key) {
            None => {
                self.coeffs.insert(key, c);
            }
            Some(prev) => {
                let s = prev + c;
                if !s.is_zero() {
                    self.coeffs.insert(key, s);
                }
            }
        }
    }

    fn check_theta(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.theta == other.theta {
            Ok(())
        } else {
            Err(AlgebraError::ThetaMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_theta(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.insert_add(*k, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TorusElement {
            theta: self.theta.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (*k, -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.theta.clone());
        for (k, v) in &self.coeffs {
            out.insert_add(*k, v.clone() * c.clone());
        }
        out
    }

    /// Normal-ordered product.  For terms U₁^p U₂^q · U₁^m U₂^n the crossing
    /// U₂^q U₁^m = e^{−2πiθqm} U₁^m U₂^q contributes the phase e^{2πiθ·(−qm)}.
    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_theta(other)?;
        let mut out = Self::zero(self.theta.clone());
        for ((p, q), a) in &self.coeffs {
            for ((m, n), b) in &other.coeffs {
                let w = -(q.checked_mul(*m).expect("mode product overflow"));
                let ph = C::phase(&self.theta, w)?;
                out.insert_add((p + m, q + n), a.clone() * b.clone() * ph);
            }
        }
        Ok(out)
    }

    /// Star involution: (a*)_{−m,−n} = conj(a_{mn}) · e^{−2πiθmn}.
    pub fn star(&self) -> Result<Self, AlgebraError> {
        let mut out = Self::zero(self.theta.clone());
        for ((m, n), c) in &self.coeffs {
            let w = -(m.checked_mul(*n).expect("mode product overflow"));
            let ph = C::phase(&self.theta, w)?;
            out.insert_add((-m, -n), c.conj() * ph);
        }
        Ok(out)
    }

    /// Basis derivation δ_μ: multiplies a_{mn} by 2πi·m (μ = 1) or 2πi·n (μ = 2).
    pub fn delta(&self, mu: Dir) -> Self {
        let mut out = Self::zero(self.theta.clone());
        for ((m, n), c) in &self.coeffs {
            let f = match mu {
                Dir::One => C::deriv_factor(*m),
                Dir::Two => C::deriv_factor(*n),
            };
            out.insert_add((*m, *n), c.clone() * f);
        }
        out
    }

    /// Canonical trace 𝔱(a) = a₀₀.
    pub fn trace(&self) -> C {
        self.coeff(0, 0)
    }

    /// Max modulus of the coefficients, evaluated approximately.
    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .values()
            .map(|c| c.approx().norm())
            .fold(0.0, f64::max)
    }

    /// Max modulus of the coefficient difference (approximate).
    pub fn coeff_distance(&self, other: &Self) -> f64 {
        let mut keys: Vec<(i64, i64)> = self.coeffs.keys().cloned().collect();
        keys.extend(other.coeffs.keys().cloned());
        keys.iter()
            .map(|&(m, n)| (self.coeff(m, n).approx() - other.coeff(m, n).approx()).norm())
            .fold(0.0, f64::max)
    }

    /// ‖a − a*‖_∞ on coefficients (approximate); 0 for self-adjoint elements.
    pub fn self_adjoint_defect(&self) -> Result<f64, AlgebraError> {
        Ok(self.coeff_distance(&self.star()?))
    }

    pub fn is_self_adjoint(&self, tol: f64) -> Result<bool, AlgebraError> {
        Ok(self.self_adjoint_defect()? <= tol)
    }
}

// ---------------------------------------------------------------------------
// JSON serialization: { "theta": <number or "p/q">, "coeffs": [{m,n,re,im}] }
// ---------------------------------------------------------------------------

fn rational_to_string(r: &BigRational) -> String {
    crate::scalar::fmt_rational(r)
}

pub(crate) fn rational_from_str(s: &str) -> Result<BigRational, AlgebraError> {
    let parse_int = |t: &str| -> Result<BigInt, AlgebraError> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| AlgebraError::Parse(alloc::format!("bad integer `{}`", t)))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den == BigInt::from(0) {
                return Err(AlgebraError::Parse("zero denominator".to_string()));
            }
            Ok(BigRational::new(parse_int(p)?, den))
        }
    }
}

impl TorusElement<Complex64> {
    /// Serializes with numeric entries.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Value};
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|((m, n), c)| json!({ "m": m, "n": n, "re": c.re, "im": c.im }))
            .collect();
        json!({ "theta": self.theta, "coeffs": coeffs })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, AlgebraError> {
        let theta = match &v["theta"] {
            serde_json::Value::Number(x) => x
                .as_f64()
                .ok_or_else(|| AlgebraError::Parse("theta not finite".to_string()))?,
            serde_json::Value::String(s) => {
                let r = rational_from_str(s)?;
                r.to_f64()
                    .ok_or_else(|| AlgebraError::Parse("theta not finite".to_string()))?
            }
            _ => return Err(AlgebraError::Parse("missing theta".to_string())),
        };
        let mut out = Self::zero(theta);
        let entries = v["coeffs"]
            .as_array()
            .ok_or_else(|| AlgebraError::Parse("missing coeffs array".to_string()))?;
        for e in entries {
            let m = e["m"]
                .as_i64()
                .ok_or_else(|| AlgebraError::Parse("bad m".to_string()))?;
            let n = e["n"]
                .as_i64()
                .ok_or_else(|| AlgebraError::Parse("bad n".to_string()))?;
            let num = |f: &serde_json::Value| -> Result<f64, AlgebraError> {
                match f {
                    serde_json::Value::Number(x) => x
                        .as_f64()
                        .ok_or_else(|| AlgebraError::Parse("bad coefficient".to_string())),
                    serde_json::Value::String(s) => rational_from_str(s)?
                        .to_f64()
                        .ok_or_else(|| AlgebraError::Parse("bad coefficient".to_string())),
                    serde_json::Value::Null => Ok(0.0),
                    _ => Err(AlgebraError::Parse("bad coefficient".to_string())),
                }
            };
            out.insert_add((m, n), Complex64::new(num(&e["re"])?, num(&e["im"])?));
        }
        Ok(out)
    }
}

impl TorusElement<TauPoly> {
    /// Serializes τ-free exact elements with rational-string entries.
    pub fn to_json(&self) -> Result<serde_json::Value, AlgebraError> {
        use serde_json::{json, Value};
        let mut coeffs: Vec<Value> = Vec::new();
        for ((m, n), c) in &self.coeffs {
            let g = c.as_gauss().ok_or_else(|| {
                AlgebraError::NotRepresentable(
                    "coefficient carries a power of tau; serialize the float form instead"
                        .to_string(),
                )
            })?;
            coeffs.push(json!({
                "m": m,
                "n": n,
                "re": rational_to_string(&g.re),
                "im": rational_to_string(&g.im),
            }));
        }
        Ok(json!({ "theta": rational_to_string(&self.theta), "coeffs": coeffs }))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, AlgebraError> {
        let theta = match &v["theta"] {
            serde_json::Value::String(s) => rational_from_str(s)?,
            _ => {
                return Err(AlgebraError::Parse(
                    "exact elements need a rational-string theta".to_string(),
                ))
            }
        };
        let mut out = Self::zero(theta);
        let entries = v["coeffs"]
            .as_array()
            .ok_or_else(|| AlgebraError::Parse("missing coeffs array".to_string()))?;
        for e in entries {
            let m = e["m"]
                .as_i64()
                .ok_or_else(|| AlgebraError::Parse("bad m".to_string()))?;
            let n = e["n"]
                .as_i64()
                .ok_or_else(|| AlgebraError::Parse("bad n".to_string()))?;
            let rat = |f: &serde_json::Value| -> Result<BigRational, AlgebraError> {
                match f {
                    serde_json::Value::String(s) => rational_from_str(s),
                    serde_json::Value::Number(x) if x.is_i64() => Ok(BigRational::from_integer(
                        BigInt::from(x.as_i64().unwrap()),
                    )),
                    serde_json::Value::Null => Ok(num_traits::Zero::zero()),
                    _ => Err(AlgebraError::Parse(
                        "exact coefficients must be rational strings or integers".to_string(),
                    )),
                }
            };
            let g = crate::scalar::Gauss {
                re: rat(&e["re"])?,
                im: rat(&e["im"])?,
            };
            out.insert_add((m, n), TauPoly::from_gauss(g));
        }
        Ok(out)
    }

    /// Converts an exact element to the floating-point representation.
    pub fn to_float(&self) -> TorusElement<Complex64> {
        let theta = self.theta.to_f64().expect("theta fits in f64");
        TorusElement {
            theta,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (*k, c.approx()))
                .collect(),
        }
    }
}

impl<C: Coeff> fmt::Display for TorusElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((m, n), c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            if *m != 0 {
                write!(f, " U1^{}", m)?;
            }
            if *n != 0 {
                write!(f, " U2^{}", n)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gauss;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn exact_theta_quarter() -> BigRational {
        rat(1, 4)
    }

    #[test]
    fn generators_commute_up_to_phase() {
        // U₁U₂ = e^{2πiθ} U₂U₁ with θ = 1/4, i.e. the two orderings differ by i.
        let th = exact_theta_quarter();
        let u1 = TorusElement::<TauPoly>::u1(th.clone());
        let u2 = TorusElement::<TauPoly>::u2(th.clone());
        let lhs = u1.mul(&u2).unwrap();
        let rhs = u2
            .mul(&u1)
            .unwrap()
            .scale(&TauPoly::from_gauss(Gauss::i()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn unit_is_neutral_and_theta_checked() {
        let th = exact_theta_quarter();
        let x = TorusElement::<TauPoly>::from_coeffs(
            th.clone(),
            [
                ((1, 0), TauPoly::from_gauss(Gauss::from_ratio(1, 2))),
                ((0, -2), TauPoly::from_gauss(Gauss::i())),
            ],
        );
        let one = TorusElement::<TauPoly>::one(th);
        assert_eq!(one.mul(&x).unwrap(), x);
        assert_eq!(x.mul(&one).unwrap(), x);
        let other = TorusElement::<TauPoly>::one(rat(1, 2));
        assert_eq!(x.add(&other).unwrap_err(), AlgebraError::ThetaMismatch);
    }

    #[test]
    fn exact_product_requires_fourth_roots() {
        let th = rat(1, 5);
        let u1 = TorusElement::<TauPoly>::u1(th.clone());
        let u2 = TorusElement::<TauPoly>::u2(th);
        // U₂·U₁ crosses once: e^{−2πi/5} is not Gaussian rational.
        assert!(matches!(
            u2.mul(&u1).unwrap_err(),
            AlgebraError::Phase(_)
        ));
        // U₁·U₂ needs no crossing and stays exact.
        assert!(u1.mul(&u2).is_ok());
    }

    #[test]
    fn float_product_square_matches_hand_expansion() {
        // In normal order U₂U₁ = e^{−2πiθ}U₁U₂, so
        // (U₁ + U₂)² = U₁² + U₂² + (1 + e^{−2πiθ}) U₁U₂ at any θ.
        let th = 1.0 / 3.0;
        let u1 = TorusElement::<Complex64>::u1(th);
        let u2 = TorusElement::<Complex64>::u2(th);
        let s = u1.add(&u2).unwrap();
        let sq = s.mul(&s).unwrap();
        let phase = Complex64::from_polar(1.0, -crate::scalar::TAU_F64 / 3.0);
        let expect = TorusElement::<Complex64>::from_coeffs(
            th,
            [
                ((2, 0), Complex64::new(1.0, 0.0)),
                ((0, 2), Complex64::new(1.0, 0.0)),
                ((1, 1), Complex64::new(1.0, 0.0) + phase),
            ],
        );
        assert!(sq.coeff_distance(&expect) < 1e-15);
    }

    #[test]
    fn derivations_and_trace() {
        let th = exact_theta_quarter();
        let u1 = TorusElement::<TauPoly>::u1(th.clone());
        // δ₁(U₁) = 2πi U₁ = τ·i·U₁, δ₂(U₁) = 0.
        assert_eq!(
            u1.delta(Dir::One),
            u1.scale(&TauPoly::monomial(1, Gauss::i()))
        );
        assert!(u1.delta(Dir::Two).support_len() == 0);
        // The trace kills every derivation output: 𝔱(δ_μ a) = 0.
        let a = TorusElement::<TauPoly>::from_coeffs(
            th,
            [
                ((0, 0), TauPoly::from_gauss(Gauss::from_int(3))),
                ((2, -1), TauPoly::from_gauss(Gauss::i())),
                ((-2, 1), TauPoly::from_gauss(-Gauss::i())),
            ],
        );
        assert!(a.delta(Dir::One).trace().is_zero());
        assert!(a.delta(Dir::Two).trace().is_zero());
        assert_eq!(a.trace(), TauPoly::from_gauss(Gauss::from_int(3)));
    }

    #[test]
    fn trace_is_tracial_exact() {
        // 𝔱(ab) = 𝔱(ba) with θ = 1/4 and crossing-rich elements.
        let th = exact_theta_quarter();
        let a = TorusElement::<TauPoly>::from_coeffs(
            th.clone(),
            [
                ((1, 2), TauPoly::from_gauss(Gauss::from_ratio(2, 3))),
                ((-1, 1), TauPoly::from_gauss(Gauss::i())),
            ],
        );
        let b = TorusElement::<TauPoly>::from_coeffs(
            th,
            [
                ((-1, -2), TauPoly::from_gauss(Gauss::from_ratio(5, 7))),
                ((1, -1), TauPoly::from_gauss(Gauss::from_int(2)) + TauPoly::from_gauss(Gauss::i())),
            ],
        );
        let ab = a.mul(&b).unwrap().trace();
        let ba = b.mul(&a).unwrap().trace();
        assert_eq!(ab, ba);
    }

    #[test]
    fn star_is_an_involution_and_antihomomorphism() {
        let th = exact_theta_quarter();
        let a = TorusElement::<TauPoly>::from_coeffs(
            th.clone(),
            [
                ((1, 1), TauPoly::from_gauss(Gauss::from_ratio(1, 2))),
                ((0, 3), TauPoly::from_gauss(Gauss::i())),
            ],
        );
        let b = TorusElement::<TauPoly>::from_coeffs(
            th,
            [
                ((2, -1), TauPoly::from_gauss(Gauss::from_int(1))),
                ((-1, 0), TauPoly::from_gauss(-Gauss::i())),
            ],
        );
        assert_eq!(a.star().unwrap().star().unwrap(), a);
        // (ab)* = b* a*.
        let lhs = a.mul(&b).unwrap().star().unwrap();
        let rhs = b.star().unwrap().mul(&a.star().unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn leibniz_rule_exact() {
        let th = exact_theta_quarter();
        let a = TorusElement::<TauPoly>::from_coeffs(
            th.clone(),
            [
                ((1, 0), TauPoly::from_gauss(Gauss::from_int(1))),
                ((0, 2), TauPoly::from_gauss(Gauss::from_ratio(3, 5))),
            ],
        );
        let b = TorusElement::<TauPoly>::from_coeffs(
            th,
            [
                ((-1, 1), TauPoly::from_gauss(Gauss::i())),
                ((2, 2), TauPoly::from_gauss(Gauss::from_int(2))),
            ],
        );
        for mu in [Dir::One, Dir::Two] {
            let lhs = a.mul(&b).unwrap().delta(mu);
            let rhs = a
                .delta(mu)
                .mul(&b)
                .unwrap()
                .add(&a.mul(&b.delta(mu)).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn self_adjointness_detection() {
        let th = 0.2_f64;
        let mut k = TorusElement::<Complex64>::one(th);
        let u1 = TorusElement::<Complex64>::u1(th);
        let u1s = u1.star().unwrap();
        k = k
            .add(&u1.scale(&Complex64::new(0.2, 0.0)))
            .unwrap()
            .add(&u1s.scale(&Complex64::new(0.2, 0.0)))
            .unwrap();
        assert!(k.is_self_adjoint(1e-14).unwrap());
        let broken = k.add(&TorusElement::u2(th)).unwrap();
        assert!(!broken.is_self_adjoint(1e-14).unwrap());
    }

    #[test]
    fn json_round_trip_float_and_exact() {
        let th = 0.2_f64;
        let x = TorusElement::<Complex64>::from_coeffs(
            th,
            [
                ((0, 0), Complex64::new(1.0, 0.0)),
                ((1, 0), Complex64::new(0.25, -0.5)),
            ],
        );
        let v = x.to_json();
        let y = TorusElement::<Complex64>::from_json(&v).unwrap();
        assert!(x.coeff_distance(&y) == 0.0);

        let xe = TorusElement::<TauPoly>::from_coeffs(
            rat(1, 4),
            [
                ((0, 0), TauPoly::from_gauss(Gauss::from_ratio(1, 3))),
                ((-1, 2), TauPoly::from_gauss(Gauss::i())),
            ],
        );
        let ve = xe.to_json().unwrap();
        let ye = TorusElement::<TauPoly>::from_json(&ve).unwrap();
        assert_eq!(xe, ye);
        // τ-carrying coefficients have no exact file form.
        assert!(xe.delta(Dir::One).to_json().is_err());
    }
}
