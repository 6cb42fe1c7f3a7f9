//! Adaptive Gauss–Kronrod quadrature for the momentum-space integrals.
//!
//! The double integrals run over `(0, ∞)²` with an integrable `u^{−1/2}`
//! endpoint singularity in the worst case.  Substituting `u = x²` removes
//! the singularity, and `x = a/(1−a)`, `v = b/(1−b)` map both half-lines to
//! the unit interval, after which a nested adaptive 15-point Kronrod rule
//! converges quickly.

// Node and weight tables are quoted verbatim from the reference values and
// carry more digits than f64 resolves.
#![allow(clippy::excessive_precision)]

use asymtorus_core::rearrange::IntegralDescriptor;

use crate::LabError;

/// Kronrod abscissae on `[0, 1]`-half of `[−1, 1]` (QUADPACK 15-point rule).
const XGK: [f64; 8] = [
    0.991455371120812639207,
    0.949107912342758524526,
    0.864864423359769072790,
    0.741531185599394439864,
    0.586087235467691130294,
    0.405845151377397166907,
    0.207784955007898467601,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224964,
    0.063092092629978553291,
    0.104790010322250183840,
    0.140653259715525918745,
    0.169004726639267902827,
    0.190350578064785409913,
    0.204432940075298892414,
    0.209482141084727828013,
];

/// Embedded 7-point Gauss weights (abscissae are `XGK[1], XGK[3], XGK[5], XGK[7]`).
const WG: [f64; 4] = [
    0.129484966168869693271,
    0.279705391489276667901,
    0.381830050505118944950,
    0.417959183673469387755,
];

/// One 15-point Kronrod panel on `[a, b]`: returns the Kronrod value and an
/// error estimate from the embedded Gauss rule.
fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kron += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    kron *= half;
    gauss *= half;
    (kron, (kron - gauss).abs())
}

/// Adaptive bisection driver.
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, LabError> {
    let (value, err) = kronrod_panel(f, a, b);
    // Accept on the requested tolerance, on reaching relative machine
    // accuracy for this panel, or on panels too narrow to resolve further.
    if err <= tol || err <= 1e-15 * value.abs() || (b - a) < 1e-13 {
        if !value.is_finite() {
            return Err(LabError::Divergent);
        }
        return Ok(value);
    }
    if depth == 0 {
        return Err(LabError::Quadrature(format!(
            "panel [{a}, {b}] did not converge: error estimate {err:.3e}"
        )));
    }
    let mid = 0.5 * (a + b);
    let left = adapt(f, a, mid, 0.5 * tol, depth - 1)?;
    let right = adapt(f, mid, b, 0.5 * tol, depth - 1)?;
    Ok(left + right)
}

/// Adaptive integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, LabError> {
    adapt(&f, a, b, tol, 40)
}

/// Numerical value of a momentum integral at `(s, t)` for a unit coefficient
/// and unit conformal factor — directly comparable with
/// [`IntegralDescriptor::eval_closed`] evaluated the same way.
///
/// The integrand supplies the full measure; the substitutions used here are
/// `u = x²` with `x = a/(1−a)` (turning `u^{k₂−1/2} du` into `2 x^{2k₂} dx`)
/// and `v = b/(1−b)`.
pub fn descriptor_quadrature(
    desc: &IntegralDescriptor,
    s: f64,
    t: f64,
    tol: f64,
) -> Result<f64, LabError> {
    let outer = |a: f64| -> f64 {
        if a <= 0.0 || a >= 1.0 {
            return 0.0;
        }
        let x = a / (1.0 - a);
        let da = 1.0 / ((1.0 - a) * (1.0 - a));
        let u = x * x;
        let inner = |b: f64| -> f64 {
            if b <= 0.0 || b >= 1.0 {
                return 0.0;
            }
            let v = b / (1.0 - b);
            let db = 1.0 / ((1.0 - b) * (1.0 - b));
            desc.integrand_f64(s, t, u, v) * db
        };
        // The outer Jacobian 2x/(1−a)² magnifies inner noise without bound
        // near a → 1, so the inner tolerance must shrink with it.
        let jac = 2.0 * x * da;
        let inner_tol = (0.1 * tol / jac.max(1.0)).max(1e-300);
        // Inner panels must not abort the whole integral on a hard spot; the
        // outer error estimate still sees the residue.
        let iv = integrate(inner, 0.0, 1.0, inner_tol).unwrap_or(f64::NAN);
        iv * jac
    };
    let raw = integrate(outer, 0.0, 1.0, tol)?;
    Ok(2.0 * raw)
}

/// Every distinct integral-descriptor shape occurring in the even part of
/// the subleading parametrix term, over both spin projections, including
/// the merged form of adjacent pairs.  One representative per shape, in a
/// deterministic order.
pub fn descriptor_shapes() -> Result<Vec<IntegralDescriptor>, LabError> {
    use std::collections::BTreeSet;
    let (_, _, b2) = asymtorus_core::symbol::parametrix()?;
    let even = b2.even_part();
    let mut seen: BTreeSet<([i64; 3], [u32; 3], u32, u32)> = BTreeSet::new();
    let mut out = Vec::new();
    for part in [even.spin_plain_part(), even.spin_chiral_part()] {
        for (w, c) in &part.words {
            let d = asymtorus_core::rearrange::describe(w, c)?;
            for cand in [Some(d.clone()), d.merged()].into_iter().flatten() {
                if seen.insert((cand.n, cand.m, cand.k1, cand.k2)) {
                    out.push(cand);
                }
            }
        }
    }
    Ok(out)
}
