//! Modular-weighted operator calculus in the eigenbasis of a positive
//! operator.
//!
//! For a positive matrix `K` with eigenpairs `(μᵢ, vᵢ)`, a function applied
//! to the modular pair acts entrywise in the eigenbasis.  [`apply_modular`]
//! follows the squared convention: its first slot is the eigenvalue ratio of
//! `Δ² : X ↦ K⁻²XK²`, namely `(μⱼ/μᵢ)²`.
//!
//! The assembled curvature tables use the *unsquared* ratio `μⱼ/μᵢ`: their
//! symbolic variable is the weight picked up by commuting one power of the
//! conformal factor across an operand, and their `k`-prefactor counts single
//! powers.  Evaluating them at that ratio makes the trace cancellations
//! exact at any truncation, because the functional identities (such as
//! `s³H(s) + H(1/s) = 0` against the `k⁻³` prefactor) then match the
//! eigenvalue swap `i ↔ j` term by term.

use asymtorus_core::curvature::{CurvaturePackage, FunctionalTerm, OperandTag};
use asymtorus_core::modfn::ModularFunction;
use asymtorus_core::symbol::Letter;
use asymtorus_core::torus::{Dir, TorusElement};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::collections::BTreeMap;

use crate::gns::{gns_right, hermitian_eigen, GnsBasis, HermitianEigen};
use crate::LabError;

const TAU: f64 = core::f64::consts::TAU;

/// Eigenbasis of a positive Hermitian matrix, the frame in which modular
/// weights are diagonal.
pub struct ModularFrame {
    pub eig: HermitianEigen,
}

impl ModularFrame {
    pub fn new(h: &DMatrix<Complex64>) -> Result<ModularFrame, LabError> {
        let eig = hermitian_eigen(h);
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min <= 0.0 {
            return Err(LabError::NotPositive { eigenvalue: min });
        }
        Ok(ModularFrame { eig })
    }

    pub fn dim(&self) -> usize {
        self.eig.values.len()
    }

    /// `V† X V`.
    pub fn to_frame(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        self.eig.vectors.adjoint() * x * &self.eig.vectors
    }

    /// `V X̃ V†`.
    pub fn from_frame(&self, xt: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        &self.eig.vectors * xt * self.eig.vectors.adjoint()
    }

    /// The matrix power `K^p` assembled from the eigensystem.
    pub fn power(&self, p: i32) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut d = DMatrix::<Complex64>::zeros(n, n);
        for (i, &mu) in self.eig.values.iter().enumerate() {
            d[(i, i)] = Complex64::new(mu.powi(p), 0.0);
        }
        self.from_frame(&d)
    }
}

/// Weighted application in the frame, shared by the public entry points:
/// `result̃_{il} = scalar · μᵢ^{k_pow} Σⱼ w(ρᵢⱼ, ρᵢₗ) X̃ᵢⱼ Ỹⱼₗ` with
/// `ρᵢⱼ = (μⱼ/μᵢ)^{ratio_power}` (the one-operand form drops the `j` sum).
fn apply_with<F: Fn(f64, f64) -> f64>(
    frame: &ModularFrame,
    x: &DMatrix<Complex64>,
    y: Option<&DMatrix<Complex64>>,
    weight: F,
    k_pow: i32,
    ratio_power: i32,
    scalar: Complex64,
) -> DMatrix<Complex64> {
    let n = frame.dim();
    let mu = &frame.eig.values;
    let xt = frame.to_frame(x);
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    match y {
        Some(y) => {
            let yt = frame.to_frame(y);
            for i in 0..n {
                let pre = scalar * mu[i].powi(k_pow);
                for l in 0..n {
                    let t = (mu[l] / mu[i]).powi(ratio_power);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        let s = (mu[j] / mu[i]).powi(ratio_power);
                        acc += weight(s, t) * xt[(i, j)] * yt[(j, l)];
                    }
                    out[(i, l)] = pre * acc;
                }
            }
        }
        None => {
            for i in 0..n {
                let pre = scalar * mu[i].powi(k_pow);
                for l in 0..n {
                    let s = (mu[l] / mu[i]).powi(ratio_power);
                    out[(i, l)] = pre * weight(s, 1.0) * xt[(i, l)];
                }
            }
        }
    }
    frame.from_frame(&out)
}

/// Scalar prefactor of a modular function: `π^{pi_power} · i^{i_power}`.
fn scalar_of(f: &ModularFunction) -> Complex64 {
    let p = core::f64::consts::PI.powi(f.pi_power);
    if f.i_power == 0 {
        Complex64::new(p, 0.0)
    } else {
        Complex64::new(0.0, p)
    }
}

/// Applies a modular function to one or two operands in the squared
/// convention: the function's first slot receives `(μⱼ/μᵢ)²` (the eigenvalue
/// ratio of `Δ²`), the second `(μₗ/μᵢ)²`, and the `k`-prefactor multiplies
/// from the left as `μᵢ^{k_prefactor}`.
pub fn apply_modular(
    f: &ModularFunction,
    x: &DMatrix<Complex64>,
    y: Option<&DMatrix<Complex64>>,
    frame: &ModularFrame,
) -> DMatrix<Complex64> {
    apply_with(
        frame,
        x,
        y,
        |s, t| f.rf.eval_f64(s, t),
        f.k_prefactor,
        2,
        scalar_of(f),
    )
}

/// Trace of the two-operand application without forming the result matrix:
/// on the diagonal the second slot collapses to `1`, so the cost is `O(n²)`.
/// `ratio_power` selects the modular convention (2 for the squared one).
pub fn pair_trace(
    f: &ModularFunction,
    xt: &DMatrix<Complex64>,
    yt: &DMatrix<Complex64>,
    frame: &ModularFrame,
    ratio_power: i32,
) -> Complex64 {
    let n = frame.dim();
    let mu = &frame.eig.values;
    let scalar = scalar_of(f);
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let pre = mu[i].powi(f.k_prefactor);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let s = (mu[j] / mu[i]).powi(ratio_power);
            acc += f.rf.eval_f64(s, 1.0) * xt[(i, j)] * yt[(j, i)];
        }
        total += pre * acc;
    }
    scalar * total
}

/// Trace of the one-operand application: the slot collapses to `1` on the
/// diagonal, leaving `f(1) · Σᵢ μᵢ^{k_pow} X̃ᵢᵢ`.
pub fn single_trace(
    f: &ModularFunction,
    xt: &DMatrix<Complex64>,
    frame: &ModularFrame,
) -> Complex64 {
    let mu = &frame.eig.values;
    let at_one = f.rf.eval_f64(1.0, 1.0);
    let mut total = Complex64::new(0.0, 0.0);
    for (i, &m) in mu.iter().enumerate() {
        total += m.powi(f.k_prefactor) * xt[(i, i)];
    }
    scalar_of(f) * at_one * total
}

/// Diagonal mode multiplier `2π·m` (first direction) or `2π·n` (second).
pub fn mode_multiplier(basis: &GnsBasis, dir: Dir) -> DMatrix<Complex64> {
    let dim = basis.dim();
    let mut d = DMatrix::<Complex64>::zeros(dim, dim);
    for idx in 0..dim {
        let (m, n) = basis.mode(idx);
        let v = match dir {
            Dir::One => m,
            Dir::Two => n,
        };
        d[(idx, idx)] = Complex64::new(TAU * v as f64, 0.0);
    }
    d
}

fn letter_dirs(letter: Letter) -> &'static [Dir] {
    match letter {
        Letter::D1 => &[Dir::One],
        Letter::D2 => &[Dir::Two],
        Letter::D11 => &[Dir::One, Dir::One],
        Letter::D12 => &[Dir::One, Dir::Two],
        Letter::D22 => &[Dir::Two, Dir::Two],
    }
}

/// Right-multiplication matrix of the iterated derivative of `k` named by a
/// letter.
pub fn letter_matrix(
    k: &TorusElement<Complex64>,
    letter: Letter,
    basis: &GnsBasis,
) -> DMatrix<Complex64> {
    let mut x = k.clone();
    for &d in letter_dirs(letter) {
        x = x.delta(d);
    }
    gns_right(&x, basis)
}

/// Evaluates curvature packages on one concrete positive conformal factor,
/// sharing the eigendecomposition and the transformed derivative matrices
/// between packages — the eigensolve dominates the cost at realistic
/// cutoffs.
pub struct CurvatureEvaluator {
    frame: ModularFrame,
    transformed: BTreeMap<Letter, DMatrix<Complex64>>,
}

impl CurvatureEvaluator {
    pub fn new(k: &TorusElement<Complex64>, basis: &GnsBasis) -> Result<CurvatureEvaluator, LabError> {
        let frame = ModularFrame::new(&gns_right(k, basis))?;
        let mut transformed = BTreeMap::new();
        for letter in [Letter::D1, Letter::D2, Letter::D11, Letter::D12, Letter::D22] {
            transformed.insert(letter, frame.to_frame(&letter_matrix(k, letter, basis)));
        }
        Ok(CurvatureEvaluator { frame, transformed })
    }

    /// The GNS trace of one package.  Returns the total together with the
    /// largest magnitude among the individual entry traces, so callers can
    /// judge the total relative to the size of what cancelled.
    ///
    /// The package functions are evaluated at the unsquared eigenvalue
    /// ratio — see the module docs — which makes the vanishing of the total
    /// exact at finite truncation rather than only in the limit.
    pub fn package_trace(&self, pkg: &CurvaturePackage) -> (Complex64, f64) {
        let mut total = Complex64::new(0.0, 0.0);
        let mut largest = 0.0f64;
        for (tag, f) in &pkg.entries {
            if f.is_zero() {
                continue;
            }
            let value = match *tag {
                OperandTag::Pair(l1, l2) => pair_trace(
                    f,
                    &self.transformed[&l1],
                    &self.transformed[&l2],
                    &self.frame,
                    1,
                ),
                OperandTag::Prod(l) => {
                    let xt = &self.transformed[&l];
                    single_trace(f, &(xt * xt), &self.frame)
                }
                OperandTag::Single(l) => single_trace(f, &self.transformed[&l], &self.frame),
            };
            largest = largest.max(value.norm());
            total += value;
        }
        (total, largest)
    }
}

/// One-shot form of [`CurvatureEvaluator::package_trace`].
pub fn numeric_curvature_trace(
    pkg: &CurvaturePackage,
    k: &TorusElement<Complex64>,
    basis: &GnsBasis,
) -> Result<(Complex64, f64), LabError> {
    Ok(CurvatureEvaluator::new(k, basis)?.package_trace(pkg))
}

/// Evaluates a list of functional terms on a concrete factor: a pair term
/// `c·(p,q)` is `c · tr(K^{−p} X₁ K^{−q} X₁)` and a second-derivative term
/// `c·(p)` is `c · tr(K^{−p} X₁₁)`, with `X₁ = R_{δ₁(k)}`, `X₁₁ = R_{δ₁₁(k)}`,
/// everything normalized by the matrix dimension.  Returns the value and the
/// largest single term as a scale.
pub fn evaluate_functional(
    terms: &[FunctionalTerm],
    k: &TorusElement<Complex64>,
    basis: &GnsBasis,
) -> Result<(f64, f64), LabError> {
    let frame = ModularFrame::new(&gns_right(k, basis))?;
    let x1 = frame.to_frame(&letter_matrix(k, Letter::D1, basis));
    let x11 = frame.to_frame(&letter_matrix(k, Letter::D11, basis));
    let mu = &frame.eig.values;
    let n = frame.dim();
    let mut value = 0.0;
    let mut scale = 0.0f64;
    for term in terms {
        let t = match *term {
            FunctionalTerm::PairTerm { ref coeff, p, q } => {
                let c = coeff.to_f64().ok_or_else(|| {
                    LabError::Shape("functional coefficient out of range".into())
                })?;
                let mut acc = 0.0;
                for i in 0..n {
                    let wi = mu[i].powi(-(p as i32));
                    for j in 0..n {
                        let wj = mu[j].powi(-(q as i32));
                        acc += wi * wj * (x1[(i, j)] * x1[(j, i)]).re;
                    }
                }
                c * acc
            }
            FunctionalTerm::SecondTerm { ref coeff, p } => {
                let c = coeff.to_f64().ok_or_else(|| {
                    LabError::Shape("functional coefficient out of range".into())
                })?;
                let mut acc = 0.0;
                for i in 0..n {
                    acc += mu[i].powi(-(p as i32)) * x11[(i, i)].re;
                }
                c * acc
            }
        };
        value += t;
        scale = scale.max(t.abs());
    }
    let d = n as f64;
    Ok((value / d, scale / d))
}

/// A random bivariate polynomial with bounded degree, for oracle sweeps.
#[derive(Debug, Clone)]
pub struct PolyWeight {
    pub terms: Vec<(u32, u32, f64)>,
}

impl PolyWeight {
    pub fn random(sampler: &mut crate::Sampler, max_degree: u32) -> PolyWeight {
        let mut terms = Vec::new();
        for a in 0..=max_degree {
            for b in 0..=(max_degree - a) {
                terms.push((a, b, sampler.range(-1.0, 1.0)));
            }
        }
        PolyWeight { terms }
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(a, b, c)| c * s.powi(a as i32) * t.powi(b as i32))
            .sum()
    }
}

/// Random Hermitian positive matrix with eigenvalues drawn uniformly from
/// `[1/2, 2]`: random eigenvectors, bounded condition number.  Polynomials
/// of modular ratios amplify the spectral spread exponentially in the
/// degree, so an unbounded ensemble would drown any fixed tolerance in
/// rounding noise.
pub fn random_positive_matrix(sampler: &mut crate::Sampler, n: usize) -> DMatrix<Complex64> {
    let b = DMatrix::from_fn(n, n, |_, _| sampler.complex());
    let h: DMatrix<Complex64> = (&b + b.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = hermitian_eigen(&h);
    let mut d = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = Complex64::new(sampler.range(0.5, 2.0), 0.0);
    }
    &eig.vectors * d * eig.vectors.adjoint()
}

pub fn random_matrix(sampler: &mut crate::Sampler, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| sampler.complex())
}

/// One trial of the trace-identity oracle: the trace of the two-operand
/// application equals the trace of the one-operand application of the
/// `t = 1` slice to `X`, multiplied by `Y` — the second modular slot is
/// invisible under the trace.  Returns the gap relative to the size of the
/// traces themselves.
pub fn trace_identity_gap(
    poly: &PolyWeight,
    x: &DMatrix<Complex64>,
    y: &DMatrix<Complex64>,
    frame: &ModularFrame,
) -> f64 {
    let lhs = apply_with(
        frame,
        x,
        Some(y),
        |s, t| poly.eval(s, t),
        0,
        2,
        Complex64::new(1.0, 0.0),
    );
    let collapsed = apply_with(
        frame,
        x,
        None,
        |s, _| poly.eval(s, 1.0),
        0,
        2,
        Complex64::new(1.0, 0.0),
    );
    let rhs = collapsed * y;
    let (a, b) = (lhs.trace(), rhs.trace());
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Applies a polynomial modular weight in the squared convention, as
/// [`apply_modular`] does for table functions.
pub fn apply_poly_weight(
    poly: &PolyWeight,
    x: &DMatrix<Complex64>,
    y: Option<&DMatrix<Complex64>>,
    frame: &ModularFrame,
) -> DMatrix<Complex64> {
    apply_with(
        frame,
        x,
        y,
        |s, t| poly.eval(s, t),
        0,
        2,
        Complex64::new(1.0, 0.0),
    )
}

/// Direct matrix-algebra evaluation of a polynomial modular weight: each
/// monomial `s^a t^b` acts as `[K^{−2(a+b)} X K^{2(a+b)}] · [K^{−2b} Y K^{2b}]`.
pub fn polynomial_direct(
    poly: &PolyWeight,
    x: &DMatrix<Complex64>,
    y: &DMatrix<Complex64>,
    frame: &ModularFrame,
) -> DMatrix<Complex64> {
    let n = frame.dim();
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for &(a, b, c) in &poly.terms {
        let pa = frame.power(-2 * (a + b) as i32);
        let pb = frame.power(2 * (a + b) as i32);
        let qa = frame.power(-2 * b as i32);
        let qb = frame.power(2 * b as i32);
        let term = (&pa * x * &pb) * (&qa * y * &qb);
        out += term * Complex64::new(c, 0.0);
    }
    out
}
