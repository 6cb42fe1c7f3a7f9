//! Truncated GNS representation: the Fourier box basis, left and right
//! multiplication matrices, and a Hermitian eigendecomposition wrapper.
//!
//! Basis vectors are the monomials `e_{mn} = U₁^m U₂^n` with `|m|, |n| ≤ N`.
//! Operators act as written and matrix entries that would leave the index
//! box are dropped, so interior columns are exact and boundary columns are
//! truncated; invariants are stated on the interior region.

use asymtorus_core::torus::TorusElement;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::LabError;

/// Fourier box `{(m, n) : |m| ≤ N, |n| ≤ N}` indexing the scalar GNS space;
/// the spinor space doubles it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GnsBasis {
    pub n: usize,
}

impl GnsBasis {
    pub fn new(n: usize) -> GnsBasis {
        GnsBasis { n }
    }

    /// Number of scalar basis vectors, `(2N+1)²`.
    pub fn dim(&self) -> usize {
        let side = 2 * self.n + 1;
        side * side
    }

    pub fn side(&self) -> usize {
        2 * self.n + 1
    }

    /// Flat index of the mode `(m, n)`.
    pub fn index(&self, m: i64, n: i64) -> Option<usize> {
        let half = self.n as i64;
        if m.abs() > half || n.abs() > half {
            return None;
        }
        Some(((m + half) as usize) * self.side() + (n + half) as usize)
    }

    /// Mode of a flat index.
    pub fn mode(&self, idx: usize) -> (i64, i64) {
        let half = self.n as i64;
        let side = self.side();
        ((idx / side) as i64 - half, (idx % side) as i64 - half)
    }

    /// True when the mode sits at least `margin` steps inside the box.
    pub fn is_interior(&self, m: i64, n: i64, margin: i64) -> bool {
        let half = self.n as i64;
        m.abs() <= half - margin && n.abs() <= half - margin
    }
}

fn tau() -> f64 {
    core::f64::consts::TAU
}

/// Matrix of left multiplication by `x`: `L_x e_{mn} = x · e_{mn}`, with the
/// reordering phase `e^{−2πiθqm}` for each Fourier mode `(p, q)` of `x`.
pub fn gns_left(x: &TorusElement<Complex64>, basis: &GnsBasis) -> DMatrix<Complex64> {
    let theta = *x.theta();
    let mut out = DMatrix::zeros(basis.dim(), basis.dim());
    for col in 0..basis.dim() {
        let (m, n) = basis.mode(col);
        for (&(p, q), &c) in x.coeffs() {
            if let Some(row) = basis.index(m + p, n + q) {
                let phase = Complex64::from_polar(1.0, -tau() * theta * (q * m) as f64);
                out[(row, col)] += c * phase;
            }
        }
    }
    out
}

/// Matrix of right multiplication by `x`: `R_x e_{mn} = e_{mn} · x`, with the
/// reordering phase `e^{−2πiθnp}`.
pub fn gns_right(x: &TorusElement<Complex64>, basis: &GnsBasis) -> DMatrix<Complex64> {
    let theta = *x.theta();
    let mut out = DMatrix::zeros(basis.dim(), basis.dim());
    for col in 0..basis.dim() {
        let (m, n) = basis.mode(col);
        for (&(p, q), &c) in x.coeffs() {
            if let Some(row) = basis.index(m + p, n + q) {
                let phase = Complex64::from_polar(1.0, -tau() * theta * (n * p) as f64);
                out[(row, col)] += c * phase;
            }
        }
    }
    out
}

/// Eigendecomposition `H = V diag(λ) V†` of a Hermitian matrix, eigenvalues
/// ascending.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

/// Relative deviation from Hermiticity, `‖H − H†‖ / ‖H‖` in Frobenius norm.
pub fn hermitian_defect(h: &DMatrix<Complex64>) -> f64 {
    let diff = h - h.adjoint();
    let denom = h.norm();
    if denom == 0.0 {
        0.0
    } else {
        diff.norm() / denom
    }
}

/// Cholesky pivot test for positive definiteness of a Hermitian matrix.
/// Returns the first nonpositive pivot, or `None` when the matrix is
/// positive definite.  A third of the cost of a full eigensolve, and —
/// unlike a complex Cholesky driver — it cannot be fooled by complex square
/// roots of negative pivots.
pub fn nonpositive_pivot(h: &DMatrix<Complex64>) -> Option<f64> {
    let n = h.nrows();
    let mut l = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let mut d = h[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return Some(d);
        }
        let root = d.sqrt();
        l[(j, j)] = Complex64::new(root, 0.0);
        for i in (j + 1)..n {
            let mut s = h[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / root;
        }
    }
    None
}

/// Diagonalizes a Hermitian matrix, sorting eigenvalues (and their vectors)
/// ascending.
pub fn hermitian_eigen(h: &DMatrix<Complex64>) -> HermitianEigen {
    let se = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let dim = h.nrows();
    let mut vectors = DMatrix::zeros(dim, dim);
    for (new, &old) in order.iter().enumerate() {
        vectors.set_column(new, &se.eigenvectors.column(old));
    }
    HermitianEigen { values, vectors }
}

/// Builds `k = c·1 + profile` and checks positivity of its truncated
/// right-multiplication matrix: the minimum eigenvalue must reach `floor`.
/// Returns the element together with the achieved spectral floor.
pub fn make_positive_k(
    profile: &TorusElement<Complex64>,
    c: f64,
    floor: f64,
    basis: &GnsBasis,
) -> Result<(TorusElement<Complex64>, f64), LabError> {
    let one = TorusElement::<Complex64>::one(*profile.theta()).scale(&Complex64::new(c, 0.0));
    let k = one.add(profile)?;
    let r = gns_right(&k, basis);
    let defect = hermitian_defect(&r);
    if defect > 1e-12 {
        return Err(LabError::Algebra(format!(
            "right-multiplication matrix of k is not Hermitian (defect {:.3e}); \
             the profile must be self-adjoint",
            defect
        )));
    }
    let eig = hermitian_eigen(&r);
    let min = eig.values.first().copied().unwrap_or(c);
    if min < floor {
        return Err(LabError::NotPositive { eigenvalue: min });
    }
    Ok((k, min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use asymtorus_core::torus::TorusElement;

    fn elem(theta: f64, coeffs: &[((i64, i64), Complex64)]) -> TorusElement<Complex64> {
        TorusElement::from_coeffs(theta, coeffs.iter().copied())
    }

    #[test]
    fn hermitian_eigensolver_handles_complex_matrices() {
        // 3×3 Hermitian with known spectrum: diag(1,2,3) conjugated by a
        // unitary built from a complex Householder reflector.
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
        ]));
        let v = nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.3),
            Complex64::new(0.0, -1.0),
        ]);
        let nrm = v.norm();
        let v = v / Complex64::new(nrm, 0.0);
        let u = DMatrix::identity(3, 3)
            - (&v * v.adjoint()).scale(2.0);
        let h = &u * d * u.adjoint();
        assert!(hermitian_defect(&h) < 1e-14);

        let eig = hermitian_eigen(&h);
        let expect = [1.0, 2.0, 3.0];
        for (got, want) in eig.values.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12, "got {:?}", eig.values);
        }
        // Reconstruction V diag(λ) V† = H.
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            3,
            eig.values.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        let back = &eig.vectors * lam * eig.vectors.adjoint();
        assert!((back - h).norm() < 1e-12);
    }

    #[test]
    fn multiplication_matrices_match_brute_force_products() {
        // θ = 1/5, N = 3: every column of L_x / R_x must equal the Fourier
        // expansion of the corresponding product, truncated to the box.
        let theta = 0.2;
        let basis = GnsBasis::new(3);
        let x = elem(
            theta,
            &[
                ((1, 0), Complex64::new(0.7, 0.1)),
                ((0, 1), Complex64::new(-0.3, 0.4)),
                ((-1, 2), Complex64::new(0.2, -0.9)),
            ],
        );
        let l = gns_left(&x, &basis);
        let r = gns_right(&x, &basis);
        for col in 0..basis.dim() {
            let (m, n) = basis.mode(col);
            let e = elem(theta, &[((m, n), Complex64::new(1.0, 0.0))]);
            let xe = x.mul(&e).unwrap();
            let ex = e.mul(&x).unwrap();
            for row in 0..basis.dim() {
                let (mm, nn) = basis.mode(row);
                assert!((l[(row, col)] - xe.coeff(mm, nn)).norm() < 1e-14);
                assert!((r[(row, col)] - ex.coeff(mm, nn)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn right_shift_carries_the_reordering_phase() {
        let theta = 0.2;
        let basis = GnsBasis::new(3);
        let u1 = TorusElement::<Complex64>::u1(theta);
        let r = gns_right(&u1, &basis);
        // e_{mn}·U₁ = e^{−2πiθn} e_{m+1,n}.
        let col = basis.index(0, 2).unwrap();
        let row = basis.index(1, 2).unwrap();
        let want = Complex64::from_polar(1.0, -tau() * theta * 2.0);
        assert!((r[(row, col)] - want).norm() < 1e-14);
        // Left multiplication by U₁ is a pure shift.
        let l = gns_left(&u1, &basis);
        assert!((l[(row, col)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn left_and_right_multiplications_commute_on_the_interior() {
        let theta = (5f64.sqrt() - 1.0) / 2.0;
        let basis = GnsBasis::new(4);
        let a = elem(
            theta,
            &[
                ((1, 0), Complex64::new(0.3, 0.0)),
                ((0, 1), Complex64::new(0.0, 0.5)),
            ],
        );
        let b = elem(
            theta,
            &[
                ((1, 1), Complex64::new(0.2, -0.1)),
                ((-1, 0), Complex64::new(0.4, 0.0)),
            ],
        );
        let l = gns_left(&a, &basis);
        let r = gns_right(&b, &basis);
        let comm = &l * &r - &r * &l;
        // Columns whose mode is at least deg(a)+deg(b) = 2+2 steps inside
        // the box are untouched by truncation.
        for col in 0..basis.dim() {
            let (m, n) = basis.mode(col);
            if basis.is_interior(m, n, 4) {
                for row in 0..basis.dim() {
                    assert!(
                        comm[(row, col)].norm() < 1e-13,
                        "[{}, {}] -> {:.3e}",
                        row,
                        col,
                        comm[(row, col)].norm()
                    );
                }
            }
        }
    }

    #[test]
    fn positivity_guard_accepts_and_rejects() {
        let basis = GnsBasis::new(4);
        let theta = 0.2;
        let eps = 0.2;
        let profile = elem(
            theta,
            &[
                ((1, 0), Complex64::new(eps, 0.0)),
                ((-1, 0), Complex64::new(eps, 0.0)),
            ],
        );
        let (_, achieved) = make_positive_k(&profile, 1.0, 0.5, &basis).unwrap();
        assert!(achieved >= 0.6 - 1e-9, "floor {}", achieved);

        let too_big = elem(
            theta,
            &[
                ((1, 0), Complex64::new(0.8, 0.0)),
                ((-1, 0), Complex64::new(0.8, 0.0)),
            ],
        );
        match make_positive_k(&too_big, 1.0, 0.5, &basis) {
            Err(LabError::NotPositive { eigenvalue }) => assert!(eigenvalue < 0.5),
            other => panic!("expected positivity error, got {:?}", other.map(|x| x.1)),
        }
    }

    #[test]
    fn pivot_test_tracks_definiteness() {
        // diag(2, −1) conjugated by a unitary built from a Householder
        // reflector: Hermitian, indefinite.
        let v = DMatrix::from_row_slice(
            2,
            1,
            &[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)],
        );
        let u = DMatrix::identity(2, 2) - &v * v.adjoint() * Complex64::new(2.0, 0.0);
        let pos = &u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])) * u.adjoint();
        let indef = &u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ])) * u.adjoint();
        assert!(nonpositive_pivot(&pos).is_none());
        assert!(nonpositive_pivot(&indef).is_some());
    }

    #[test]
    fn matrix_trace_of_left_multiplication_approaches_the_state() {
        let theta = 0.31;
        let x = elem(
            theta,
            &[
                ((0, 0), Complex64::new(0.9, 0.0)),
                ((1, 0), Complex64::new(0.5, 0.2)),
                ((1, -1), Complex64::new(0.1, 0.1)),
            ],
        );
        let mut errs = Vec::new();
        for n in [3usize, 6] {
            let basis = GnsBasis::new(n);
            let l = gns_left(&x, &basis);
            let tr: Complex64 = (0..basis.dim()).map(|i| l[(i, i)]).sum();
            let avg = tr / Complex64::new(basis.dim() as f64, 0.0);
            errs.push((avg - x.coeff(0, 0)).norm());
        }
        // Off-diagonal modes contribute nothing: the normalized matrix
        // trace is exact at every cutoff for a left multiplication.
        assert!(errs[0] < 1e-14 && errs[1] < 1e-14, "{:?}", errs);
    }
}
