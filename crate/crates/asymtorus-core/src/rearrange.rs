//! Rearrangement of operator words into modular-function form.
//!
//! Each word of the subleading parametrix term is a product of blocks
//! `k^n b0^m` separated by one or two derivative letters, times even powers
//! of the momenta.  Moving every block to the left past the letters dresses
//! the letters with modular weights; the trace of the word then becomes a
//! two-parameter integral
//!
//! ```text
//! F(s, t) = 2 ∫₀^∞∫₀^∞ k^{n₁+n₂+n₃−1−2k₂} · u^{k₂−½} v^{2k₁}
//!             · (1+v²+u)^{−m₁} · s^{n₂} (1+v²+u s²)^{−m₂}
//!             · t^{n₃} (1+v²+u t²)^{−m₃}  du dv,
//! ```
//!
//! where `s` and `t` are the modular weights attached to the first and second
//! letter.  This module extracts the descriptor `(n, m, k₁, k₂)` from a word
//! and evaluates `F` in closed form as an exact [`ModularFunction`]:
//! a scaling substitution reduces the `v`-integral to a Beta factor, `u = w²`
//! turns the rest into an even rational integral, and a partial-fraction
//! decomposition with poles at `−1`, `−s⁻²`, `−t⁻²` finishes it.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;


use crate::modfn::{ModFnError, ModularFunction};
use crate::ratfn::{rat_i64, Rat, RatFn2, RatFnError};
use crate::scalar::{beta_halfint_int, beta_w_over_pi, binomial, Gauss};
use crate::symbol::{Letter, Word};

/// Errors from descriptor extraction and closed-form evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum RearrangeError {
    /// The word does not have the one-or-two-letter block shape.
    UnsupportedShape(String),
    /// Odd momentum powers have no place in an even-part word.
    OddMomentum,
    /// The two-parameter integral diverges (too few resolvent powers).
    Nonconvergent,
    /// Arithmetic on the closed form failed.
    ModFn(ModFnError),
}

impl From<ModFnError> for RearrangeError {
    fn from(e: ModFnError) -> Self {
        RearrangeError::ModFn(e)
    }
}

impl From<RatFnError> for RearrangeError {
    fn from(e: RatFnError) -> Self {
        RearrangeError::ModFn(ModFnError::Rat(e))
    }
}

impl core::fmt::Display for RearrangeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RearrangeError::UnsupportedShape(m) => write!(f, "unsupported word shape: {}", m),
            RearrangeError::OddMomentum => write!(f, "odd momentum power"),
            RearrangeError::Nonconvergent => write!(f, "integral does not converge"),
            RearrangeError::ModFn(e) => write!(f, "{}", e),
        }
    }
}

/// The integral data of one word: slot powers of `k` and `b0`, halved
/// momentum exponents, the derivative letters in order, and the word's
/// coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralDescriptor {
    pub coeff: Gauss,
    /// Powers of `k` in slots 1..3 (before, between, after the letters).
    pub n: [i64; 3],
    /// Powers of `b0` in the same slots.
    pub m: [u32; 3],
    /// Half of the `ξ₁` exponent.
    pub k1: u32,
    /// Half of the `ξ₂` exponent.
    pub k2: u32,
    pub letters: Vec<Letter>,
}

/// Extracts the descriptor of a one- or two-letter word.  Slots follow the
/// letters: the head block is slot 1, the block after the first letter is
/// slot 2, and (for two-letter words) the block after the second letter is
/// slot 3.
pub fn describe(word: &Word, coeff: &Gauss) -> Result<IntegralDescriptor, RearrangeError> {
    if word.chiral {
        return Err(RearrangeError::UnsupportedShape(
            "chiral flag must be traced out first".into(),
        ));
    }
    if !word.xi1.is_multiple_of(2) || !word.xi2.is_multiple_of(2) {
        return Err(RearrangeError::OddMomentum);
    }
    if word.tail.is_empty() || word.tail.len() > 2 {
        return Err(RearrangeError::UnsupportedShape(format!(
            "{} letters",
            word.tail.len()
        )));
    }
    let mut n = [0i64; 3];
    let mut m = [0u32; 3];
    n[0] = word.head.k_pow as i64;
    m[0] = word.head.b0_pow;
    let mut letters = Vec::new();
    for (idx, (l, b)) in word.tail.iter().enumerate() {
        letters.push(*l);
        n[idx + 1] = b.k_pow as i64;
        m[idx + 1] = b.b0_pow;
    }
    Ok(IntegralDescriptor {
        coeff: coeff.clone(),
        n,
        m,
        k1: word.xi1 / 2,
        k2: word.xi2 / 2,
        letters,
    })
}

/// The three pole locations of the partial-fraction step, as values of
/// `X = w²`: `−1`, `−s⁻²`, `−t⁻²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pole {
    One,
    SInvSq,
    TInvSq,
}

impl Pole {
    fn of_slot(i: usize) -> Pole {
        match i {
            0 => Pole::One,
            1 => Pole::SInvSq,
            _ => Pole::TInvSq,
        }
    }

    /// The pole location `c` as an exact rational function.
    fn value(self) -> RatFn2 {
        match self {
            Pole::One => RatFn2::one(),
            Pole::SInvSq => RatFn2::one().mul_monomial(-2, 0),
            Pole::TInvSq => RatFn2::one().mul_monomial(0, -2),
        }
    }

    /// `c^{½−j}` for `j ≥ 1`, using positivity of `s`, `t`.
    fn half_power(self, j: u32) -> RatFn2 {
        let e = 2 * j as i64 - 1;
        match self {
            Pole::One => RatFn2::one(),
            Pole::SInvSq => RatFn2::one().mul_monomial(e, 0),
            Pole::TInvSq => RatFn2::one().mul_monomial(0, e),
        }
    }
}

/// A polynomial in the local variable `Y` truncated at a fixed degree, with
/// exact rational-function coefficients.
#[derive(Debug, Clone)]
struct YSeries {
    coeffs: Vec<RatFn2>,
}

impl YSeries {
    fn constant(c: RatFn2, len: usize) -> YSeries {
        let mut coeffs = vec![RatFn2::zero(); len];
        if len > 0 {
            coeffs[0] = c;
        }
        YSeries { coeffs }
    }

    fn mul(&self, o: &YSeries) -> YSeries {
        let len = self.coeffs.len();
        let mut coeffs = vec![RatFn2::zero(); len];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in o.coeffs.iter().enumerate() {
                if a + b >= len || cb.is_zero() {
                    continue;
                }
                coeffs[a + b] = coeffs[a + b].add(&ca.mul(cb));
            }
        }
        YSeries { coeffs }
    }
}

fn rf_pow(base: &RatFn2, e: u32) -> RatFn2 {
    let mut acc = RatFn2::one();
    for _ in 0..e {
        acc = acc.mul(base);
    }
    acc
}

impl IntegralDescriptor {
    /// Total power of `k` carried by the closed form.
    pub fn k_prefactor(&self) -> i64 {
        self.n.iter().sum::<i64>() - 1 - 2 * self.k2 as i64
    }

    /// Whether the two-parameter integral converges.
    pub fn converges(&self) -> bool {
        let total_m: u32 = self.m.iter().sum();
        total_m > self.k1 + self.k2 + 1
    }

    /// The integrand of the `(u, v)` representation at numeric `(s, t)`,
    /// with unit coefficient and `k = 1`:
    ///
    /// ```text
    /// u^{k₂−½} v^{2k₁} (1+v²+u)^{−m₁} s^{n₂}(1+v²+us²)^{−m₂} t^{n₃}(1+v²+ut²)^{−m₃}.
    /// ```
    ///
    /// The closed form with unit coefficient equals `2 ∬` of this over
    /// `(0,∞)²`.
    pub fn integrand_f64(&self, s: f64, t: f64, u: f64, v: f64) -> f64 {
        use crate::scalar::powi_f64;
        let vv = 1.0 + v * v;
        let mut val = libm::pow(u, self.k2 as f64 - 0.5) * powi_f64(v, 2 * self.k1 as i32);
        val *= powi_f64(vv + u, -(self.m[0] as i32));
        val *= powi_f64(s, self.n[1] as i32) * powi_f64(vv + u * s * s, -(self.m[1] as i32));
        val *= powi_f64(t, self.n[2] as i32) * powi_f64(vv + u * t * t, -(self.m[2] as i32));
        val
    }

    /// Closed form of the integral with unit coefficient.
    pub fn eval_closed_unit(&self) -> Result<ModularFunction, RearrangeError> {
        if !self.converges() {
            return Err(RearrangeError::Nonconvergent);
        }
        let total_m: u32 = self.m.iter().sum();

        // v-integral: ∫₀^∞ v^{2k₁} (1+v²)^{−(Σm−k₂−½)} dv = ½ B(k₁+½, Σm−k₁−k₂−1).
        let v_int: Rat =
            beta_halfint_int(self.k1, total_m - self.k1 - self.k2 - 1) * rat_i64(1, 2);

        // Partial fractions of X^{k₂} / ∏ (X + cᵢ)^{mᵢ} over the occupied slots.
        let poles: Vec<(Pole, u32)> = (0..3)
            .filter(|&i| self.m[i] > 0)
            .map(|i| (Pole::of_slot(i), self.m[i]))
            .collect();
        let mut sum = RatFn2::zero();
        for (pi_idx, &(pole, mult)) in poles.iter().enumerate() {
            // Coefficients of Y^0..Y^{mult−1} of
            //   (Y − cᵢ)^{k₂} · ∏_{l≠i} (c_l − cᵢ + Y)^{−m_l}.
            let len = mult as usize;
            let c_i = pole.value();
            // (Y − cᵢ)^{k₂} truncated.
            let mut shifted = YSeries::constant(RatFn2::one(), len);
            {
                let mut coeffs = vec![RatFn2::zero(); len];
                for r in 0..=self.k2 {
                    if (r as usize) < len {
                        let sign = if (self.k2 - r) % 2 == 1 {
                            rat_i64(-1, 1)
                        } else {
                            rat_i64(1, 1)
                        };
                        let b = binomial(self.k2, r) * sign;
                        coeffs[r as usize] = rf_pow(&c_i, self.k2 - r).scale(&b);
                    }
                }
                shifted.coeffs = coeffs;
            }
            let mut g = shifted;
            for (other_idx, &(other, other_mult)) in poles.iter().enumerate() {
                if other_idx == pi_idx {
                    continue;
                }
                // (d + Y)^{−m} = Σ_j (−1)^j C(m+j−1, j) d^{−m−j} Y^j.
                let d = other.value().sub(&c_i);
                let d_inv = d.recip()?;
                let mut coeffs = vec![RatFn2::zero(); len];
                for (j, slot) in coeffs.iter_mut().enumerate() {
                    let sign = if j % 2 == 1 {
                        rat_i64(-1, 1)
                    } else {
                        rat_i64(1, 1)
                    };
                    let b = binomial(other_mult + j as u32 - 1, j as u32) * sign;
                    *slot = rf_pow(&d_inv, other_mult + j as u32).scale(&b);
                }
                g = g.mul(&YSeries { coeffs });
            }
            // ∫₀^∞ (w² + cᵢ)^{−j} dw = (π/2) βⱼ cᵢ^{½−j}.
            for j in 1..=mult {
                let a_ij = &g.coeffs[(mult - j) as usize];
                if a_ij.is_zero() {
                    continue;
                }
                let term = a_ij
                    .scale(&beta_w_over_pi(j))
                    .mul(&pole.half_power(j));
                sum = sum.add(&term);
            }
        }

        // F = π · 2 v_int · s^{n₂−2m₂} t^{n₃−2m₃} · Σ  (the π/2 of each w-term
        // and the leading 2 of the u-substitution combine with v_int).
        let rf = sum
            .scale(&(v_int * rat_i64(2, 1)))
            .mul_monomial(
                self.n[1] - 2 * self.m[1] as i64,
                self.n[2] - 2 * self.m[2] as i64,
            );
        let k_prefactor = i32::try_from(self.k_prefactor())
            .map_err(|_| RearrangeError::UnsupportedShape("k power overflow".into()))?;
        Ok(ModularFunction {
            k_prefactor,
            pi_power: 1,
            i_power: 0,
            rf,
        })
    }

    /// Closed form including the word's coefficient.
    pub fn eval_closed(&self) -> Result<ModularFunction, RearrangeError> {
        let unit = self.eval_closed_unit()?;
        unit.scale_gauss(&self.coeff).ok_or_else(|| {
            RearrangeError::UnsupportedShape("mixed real/imaginary coefficient".into())
        })
    }

    /// For an adjacent-pair word (trivial middle slot) the two letters act as
    /// a single operand: move the trailing slot into the middle, making the
    /// closed form a function of `s` alone.
    pub fn merged(&self) -> Option<IntegralDescriptor> {
        if self.letters.len() == 2 && self.n[1] == 0 && self.m[1] == 0 {
            Some(IntegralDescriptor {
                coeff: self.coeff.clone(),
                n: [self.n[0], self.n[2], 0],
                m: [self.m[0], self.m[2], 0],
                k1: self.k1,
                k2: self.k2,
                letters: self.letters.clone(),
            })
        } else {
            None
        }
    }
}
