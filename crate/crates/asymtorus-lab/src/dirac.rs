//! Truncated Dirac operators for a conformal factor in the commutant.
//!
//! The operator acts on the spinor doubling of the GNS box as
//! `σ¹ Δ̂₁ + σ² ( R_k Δ̂₂ + Δ̂₂ R_k ) / 2`, where `Δ̂_μ` are the self-adjoint
//! mode multipliers `2π m`, `2π n` and `R_k` is right multiplication by the
//! positive element `k`.  In spinor blocks this is `[[0, C], [C†, 0]]` with
//! `C = Δ̂₁ − i ( R_k Δ̂₂ + Δ̂₂ R_k ) / 2`, so the spectrum consists of the
//! signed singular values of `C` and the grading `diag(1, −1)` anticommutes
//! with the operator exactly, truncation included.

use asymtorus_core::torus::{Dir, TorusElement};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::gns::{gns_right, hermitian_eigen, GnsBasis};
use crate::LabError;

const TAU: f64 = core::f64::consts::TAU;

/// The off-diagonal spinor block of a truncated Dirac operator.
pub struct DiracOperator {
    pub basis: GnsBasis,
    pub c: DMatrix<Complex64>,
}

/// One eigenvalue of `C†C` with the boundary mass of its eigenvector: the
/// squared component norm on modes within `margin` steps of the cutoff.
#[derive(Debug, Clone, Copy)]
pub struct ModeWeight {
    pub lambda: f64,
    pub boundary_mass: f64,
}

/// Positivity check shared by the builders: the truncated right
/// multiplication by `k` must be positive definite.  The Cholesky pivot
/// test is the cheap gate; the eigensolver runs only to name the offending
/// eigenvalue on failure.
fn check_positive(k: &TorusElement<Complex64>, basis: &GnsBasis) -> Result<DMatrix<Complex64>, LabError> {
    let r = gns_right(k, basis);
    if crate::gns::nonpositive_pivot(&r).is_some() {
        let eig = hermitian_eigen(&r);
        let min = eig.values.first().copied().unwrap_or(0.0);
        return Err(LabError::NotPositive { eigenvalue: min });
    }
    Ok(r)
}

impl DiracOperator {
    /// Dense construction for an arbitrary positive `k`.
    pub fn build(k: &TorusElement<Complex64>, basis: &GnsBasis) -> Result<DiracOperator, LabError> {
        let r = check_positive(k, basis)?;
        let dim = basis.dim();
        let mut c = DMatrix::<Complex64>::zeros(dim, dim);
        // C = Δ̂₁ − i (R_k Δ̂₂ + Δ̂₂ R_k)/2, with Δ̂₂ diagonal: entry (row, col)
        // of the anticommutator is R[(row,col)]·2π(n_col + n_row).
        for col in 0..dim {
            let (m_col, n_col) = basis.mode(col);
            for row in 0..dim {
                let (_, n_row) = basis.mode(row);
                let t = r[(row, col)] * Complex64::new(0.0, -0.5 * TAU * (n_col + n_row) as f64);
                c[(row, col)] += t;
            }
            c[(col, col)] += Complex64::new(TAU * m_col as f64, 0.0);
        }
        Ok(DiracOperator {
            basis: *basis,
            c,
        })
    }

    /// The full Hermitian matrix `[[0, C], [C†, 0]]` on the spinor doubling.
    pub fn full_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.c.nrows();
        let mut d = DMatrix::zeros(2 * dim, 2 * dim);
        d.view_mut((0, dim), (dim, dim)).copy_from(&self.c);
        d.view_mut((dim, 0), (dim, dim))
            .copy_from(&self.c.adjoint());
        d
    }

    /// Eigenvalues of `C†C`, ascending.
    pub fn squared_eigenvalues(&self) -> Vec<f64> {
        let h = self.c.adjoint() * &self.c;
        hermitian_eigen(&h).values
    }

    /// Eigenvalues of `C†C` together with the boundary mass of each
    /// eigenvector (modes within `margin` steps of the cutoff).
    pub fn weighted_eigenvalues(&self, margin: usize) -> Vec<ModeWeight> {
        let h = self.c.adjoint() * &self.c;
        let eig = hermitian_eigen(&h);
        let dim = self.c.nrows();
        let mut out = Vec::with_capacity(dim);
        for (i, &lambda) in eig.values.iter().enumerate() {
            let mut mass = 0.0;
            for idx in 0..dim {
                let (m, n) = self.basis.mode(idx);
                if !self.basis.is_interior(m, n, margin as i64) {
                    mass += eig.vectors[(idx, i)].norm_sqr();
                }
            }
            out.push(ModeWeight {
                lambda,
                boundary_mass: mass,
            });
        }
        out
    }

    /// The full spectrum of the operator: the signed singular values of `C`,
    /// sorted ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        signed_from_squares(&self.squared_eigenvalues())
    }
}

/// Spectrum `{±√λ}` from eigenvalues of `C†C`, sorted ascending, with tiny
/// negative rounding clamped.
pub fn signed_from_squares(squares: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * squares.len());
    for &l in squares {
        let s = l.max(0.0).sqrt();
        out.push(-s);
        out.push(s);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Counts spectrum entries inside `(−tol, tol)`.
pub fn kernel_dimension(spectrum: &[f64], tol: f64) -> usize {
    spectrum.iter().filter(|l| l.abs() < tol).count()
}

/// Default kernel threshold: `1e−6` times the spectral gap `2π` of the flat
/// operator (which is cutoff-independent).
pub fn default_kernel_tol() -> f64 {
    1e-6 * TAU
}

/// True when every Fourier mode of `x` lies on the first axis, so that the
/// Dirac operator block-diagonalizes over the second mode index.
pub fn is_axis_profile(x: &TorusElement<Complex64>) -> bool {
    x.coeffs().all(|(&(_, q), _)| q == 0)
}

/// Block decomposition of the off-diagonal part for an axis profile: for
/// each second index `n` the block is `C_n = diag(2πm) − i·2πn·R^{(n)}` on
/// the `m`-line, with `[R^{(n)}]_{m+p, m} = k_p e^{−2πiθnp}`.
pub struct BlockDirac {
    pub basis: GnsBasis,
    pub blocks: Vec<(i64, DMatrix<Complex64>)>,
}

impl BlockDirac {
    pub fn build(k: &TorusElement<Complex64>, basis: &GnsBasis) -> Result<BlockDirac, LabError> {
        if !is_axis_profile(k) {
            return Err(LabError::Shape(
                "block decomposition needs a first-axis profile".into(),
            ));
        }
        let theta = *k.theta();
        let half = basis.n as i64;
        let side = basis.side();
        // Positivity needs only the n = 0 line: every other line's
        // multiplication block is the diagonal phase conjugation
        // `D† R⁽⁰⁾ D` with `D = diag(e^{2πiθnm})`, which commutes with the
        // truncation, so all lines share one spectrum.
        {
            let mut r0 = DMatrix::<Complex64>::zeros(side, side);
            for (col, m) in (-half..=half).enumerate() {
                for (&(p, _), &coeff) in k.coeffs() {
                    let m2 = m + p;
                    if m2.abs() <= half {
                        r0[((m2 + half) as usize, col)] += coeff;
                    }
                }
            }
            let min = hermitian_eigen(&r0).values.first().copied().unwrap_or(0.0);
            if min <= 0.0 {
                return Err(LabError::NotPositive { eigenvalue: min });
            }
        }
        let mut blocks = Vec::with_capacity(side);
        for n in -half..=half {
            let mut c = DMatrix::<Complex64>::zeros(side, side);
            for (col, m) in (-half..=half).enumerate() {
                for (&(p, _), &coeff) in k.coeffs() {
                    let m2 = m + p;
                    if m2.abs() > half {
                        continue;
                    }
                    let row = (m2 + half) as usize;
                    let phase = Complex64::from_polar(1.0, -TAU * theta * (n * p) as f64);
                    c[(row, col)] +=
                        coeff * phase * Complex64::new(0.0, -TAU * n as f64);
                }
                c[(col, col)] += Complex64::new(TAU * m as f64, 0.0);
            }
            blocks.push((n, c));
        }
        Ok(BlockDirac { basis: *basis, blocks })
    }

    /// Eigenvalues of `C†C` over all blocks, ascending.
    pub fn squared_eigenvalues(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.basis.dim());
        for (_, c) in &self.blocks {
            let h = c.adjoint() * c;
            out.extend(hermitian_eigen(&h).values);
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    /// Weighted eigenvalues with per-eigenvector boundary mass, as in
    /// [`DiracOperator::weighted_eigenvalues`].
    pub fn weighted_eigenvalues(&self, margin: usize) -> Vec<ModeWeight> {
        let half = self.basis.n as i64;
        let mut out = Vec::with_capacity(self.basis.dim());
        for (n, c) in &self.blocks {
            let h = c.adjoint() * c;
            let eig = hermitian_eigen(&h);
            let block_boundary = n.abs() > half - margin as i64;
            for (i, &lambda) in eig.values.iter().enumerate() {
                let mass = if block_boundary {
                    1.0
                } else {
                    let mut acc = 0.0;
                    for (idx, m) in (-half..=half).enumerate() {
                        if m.abs() > half - margin as i64 {
                            acc += eig.vectors[(idx, i)].norm_sqr();
                        }
                    }
                    acc
                };
                out.push(ModeWeight {
                    lambda,
                    boundary_mass: mass,
                });
            }
        }
        out.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
        out
    }

    pub fn spectrum(&self) -> Vec<f64> {
        signed_from_squares(&self.squared_eigenvalues())
    }
}

/// Builds the conformal factor's derived right-multiplication matrix
/// `R_{δ_μ(k)}`.
pub fn derived_right(
    k: &TorusElement<Complex64>,
    dirs: &[Dir],
    basis: &GnsBasis,
) -> DMatrix<Complex64> {
    let mut x = k.clone();
    for &d in dirs {
        x = x.delta(d);
    }
    gns_right(&x, basis)
}
