//! Dense linear-algebra kernels.
//!
//! Thin, contract-checked wrappers over `nalgebra` decompositions. Every other
//! module goes through these instead of calling the decompositions directly, so
//! the singularity and convergence policies live in one place.

use nalgebra::{ComplexField, DMatrix, DVector, Schur, SymmetricEigen, LU, SVD};

use crate::error::{Error, Result};

/// Default relative eigenvalue cut-off used when factoring Gramians.
pub const GRAMIAN_FACTOR_TOL: f64 = 1e-12;

/// A pivoted LU factorization that has passed the singularity check and can be
/// reused for many right-hand sides.
#[derive(Debug, Clone)]
pub struct LinearSolver<T: ComplexField> {
    lu: LU<T, nalgebra::Dyn, nalgebra::Dyn>,
}

impl<T: ComplexField<RealField = f64>> LinearSolver<T> {
    pub fn new(a: DMatrix<T>, context: &str) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{context}: coefficient matrix is {}x{}, expected square",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        let lu = a.lu();
        // Pivot growth test: a diagonal entry of U that is tiny relative to the
        // largest one means the matrix is rank deficient to working precision.
        let u = lu.u();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for i in 0..n {
            let d = u[(i, i)].clone().modulus();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if n == 0 {
            return Ok(Self { lu });
        }
        if !lo.is_finite() || lo <= hi * f64::EPSILON * n as f64 {
            return Err(Error::singular(context));
        }
        Ok(Self { lu })
    }

    pub fn solve(&self, b: &DMatrix<T>) -> Result<DMatrix<T>> {
        if b.nrows() != self.lu.l().nrows() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} rows, coefficient matrix has {}",
                b.nrows(),
                self.lu.l().nrows()
            )));
        }
        self.lu.solve(b).ok_or_else(|| Error::singular("LU solve"))
    }
}

/// Solves `A X = B` for square nonsingular `A`.
pub fn solve_linear(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    LinearSolver::new(a.clone(), "solve_linear")?.solve(b)
}

/// Thin singular value decomposition `A = U diag(sigma) Xᵀ` with `sigma`
/// sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub sigma: DVector<f64>,
    pub x: DMatrix<f64>,
}

pub fn svd_decompose(a: &DMatrix<f64>) -> Result<Svd> {
    let k = a.nrows().min(a.ncols());
    if k == 0 {
        return Ok(Svd { u: DMatrix::zeros(a.nrows(), 0), sigma: DVector::zeros(0), x: DMatrix::zeros(a.ncols(), 0) });
    }
    let max_iter = 200 * k.max(10);
    let svd = SVD::try_new(a.clone(), true, true, f64::EPSILON, max_iter)
        .ok_or(Error::ConvergenceFailure { what: "SVD", iterations: max_iter })?;
    let u = svd.u.expect("left vectors requested");
    let vt = svd.v_t.expect("right vectors requested");

    let mut order: Vec<usize> = (0..k).collect();
    // Stable sort keeps the kernel's order among ties.
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

    let mut su = DMatrix::zeros(a.nrows(), k);
    let mut sx = DMatrix::zeros(a.ncols(), k);
    let mut sigma = DVector::zeros(k);
    for (dst, &src) in order.iter().enumerate() {
        su.set_column(dst, &u.column(src));
        sx.set_column(dst, &vt.row(src).transpose());
        sigma[dst] = svd.singular_values[src];
    }
    Ok(Svd { u: su, sigma, x: sx })
}

/// Real Schur form `A = Q T Qᵀ` with `T` upper quasi-triangular.
///
/// Subdiagonal entries of `T` are exactly zero outside 2x2 blocks, and entries
/// below the first subdiagonal are zeroed.
pub fn real_schur(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "real_schur: matrix is {}x{}, expected square",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    let max_iter = 100 * n.max(10);
    let (q, mut t) = Schur::try_new(a.clone(), f64::EPSILON, max_iter)
        .ok_or(Error::ConvergenceFailure { what: "real Schur iteration", iterations: max_iter })?
        .unpack();
    for j in 0..n {
        for i in (j + 2)..n {
            t[(i, j)] = 0.0;
        }
    }
    Ok((q, t))
}

/// Low-rank factor `R` with `P ≈ R Rᵀ` for a symmetric positive semidefinite `P`.
///
/// Eigenpairs with `λ ≥ rel_tol·λ_max` are kept (largest first); the rest,
/// including round-off negatives, are dropped. A negative eigenvalue larger in
/// magnitude than `rel_tol·λ_max` is reported as [`Error::IndefiniteMatrix`].
pub fn psd_lowrank_factor(p: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    if !p.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "psd_lowrank_factor: matrix is {}x{}, expected square",
            p.nrows(),
            p.ncols()
        )));
    }
    let n = p.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let sym = (p + p.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 200 * n.max(10))
        .ok_or(Error::ConvergenceFailure { what: "symmetric eigensolver", iterations: 200 * n.max(10) })?;
    let lmax = eig.eigenvalues.max();
    let lmin = eig.eigenvalues.min();
    let threshold = rel_tol * lmax.max(0.0);
    if lmin < 0.0 && -lmin > threshold {
        return Err(Error::IndefiniteMatrix { eigenvalue: lmin, threshold });
    }
    if lmax <= 0.0 {
        return Ok(DMatrix::zeros(n, 0));
    }
    let mut keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] >= threshold).collect();
    keep.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut r = DMatrix::zeros(n, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        r.set_column(dst, &(eig.eigenvectors.column(src) * eig.eigenvalues[src].sqrt()));
    }
    Ok(r)
}

/// `‖X‖_F`, with the convention that an empty matrix has norm zero.
pub(crate) fn fro(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        m.norm()
    }
}

/// `num / den`, treating `0/0` as zero.
pub(crate) fn relative(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub(crate) fn ensure_finite(m: &DMatrix<f64>, name: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(name.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn solve_identity_and_diagonal() {
        let m = dmatrix![1.0, 2.0; 3.0, 4.0; 5.0, 6.0];
        let x = solve_linear(&DMatrix::identity(3, 3), &m).unwrap();
        assert_eq!(x, m);

        let x = solve_linear(&dmatrix![2.0, 0.0; 0.0, 4.0], &dmatrix![2.0; 4.0]).unwrap();
        assert!((x - dmatrix![1.0; 1.0]).norm() < 1e-15);
    }

    #[test]
    fn solve_upper_triangular_back_substitution() {
        let x = solve_linear(&dmatrix![1.0, 1.0; 0.0, 1.0], &dmatrix![3.0; 1.0]).unwrap();
        assert!((x - dmatrix![2.0; 1.0]).norm() < 1e-15);
    }

    #[test]
    fn solve_rejects_singular() {
        let err = solve_linear(&dmatrix![1.0, 2.0; 2.0, 4.0], &dmatrix![1.0; 1.0]).unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { .. }));
    }

    #[test]
    fn svd_small_cases() {
        let s = svd_decompose(&DMatrix::identity(2, 2)).unwrap();
        assert!((s.sigma.clone() - DVector::from_vec(vec![1.0, 1.0])).norm() < 1e-15);

        let s = svd_decompose(&dmatrix![3.0, 0.0; 0.0, 2.0]).unwrap();
        assert!((s.sigma[0] - 3.0).abs() < 1e-15 && (s.sigma[1] - 2.0).abs() < 1e-15);
        assert!((s.u[(0, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((s.x[(1, 1)].abs() - 1.0).abs() < 1e-15);

        let s = svd_decompose(&dmatrix![0.0, 2.0; 1.0, 0.0]).unwrap();
        assert!((s.sigma[0] - 2.0).abs() < 1e-14 && (s.sigma[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_sorts_ascending_input() {
        let s = svd_decompose(&dmatrix![1.0, 0.0, 0.0; 0.0, 5.0, 0.0; 0.0, 0.0, 3.0]).unwrap();
        assert_eq!(s.sigma.as_slice(), &[5.0, 3.0, 1.0]);
        let rebuilt = &s.u * DMatrix::from_diagonal(&s.sigma) * s.x.transpose();
        assert!((rebuilt - dmatrix![1.0, 0.0, 0.0; 0.0, 5.0, 0.0; 0.0, 0.0, 3.0]).norm() < 1e-14);
    }

    #[test]
    fn schur_of_diagonal_and_companion() {
        let (q, t) = real_schur(&dmatrix![-1.0, 0.0; 0.0, -2.0]).unwrap();
        let mut d = [t[(0, 0)], t[(1, 1)]];
        d.sort_by(f64::total_cmp);
        assert_eq!(d, [-2.0, -1.0]);
        assert!((&q * &t * q.transpose() - dmatrix![-1.0, 0.0; 0.0, -2.0]).norm() < 1e-14);

        let a = dmatrix![0.0, 1.0; -2.0, -3.0];
        let (q, t) = real_schur(&a).unwrap();
        assert!(t[(1, 0)].abs() < 1e-14);
        let mut d = [t[(0, 0)], t[(1, 1)]];
        d.sort_by(f64::total_cmp);
        assert!((d[0] + 2.0).abs() < 1e-12 && (d[1] + 1.0).abs() < 1e-12);
        assert!((&q * &t * q.transpose() - a).norm() < 1e-13);
    }

    #[test]
    fn schur_of_upper_triangular_is_itself() {
        let a = dmatrix![-1.0, 2.0, 3.0; 0.0, -4.0, 5.0; 0.0, 0.0, -6.0];
        let (q, t) = real_schur(&a).unwrap();
        assert!((&q * &t * q.transpose() - &a).norm() < 1e-13);
        for i in 0..3 {
            assert!((t[(i, i)] - a[(i, i)]).abs() < 1e-13);
        }
    }

    #[test]
    fn psd_factor_cases() {
        let r = psd_lowrank_factor(&DMatrix::identity(2, 2), 1e-12).unwrap();
        assert_eq!(r.ncols(), 2);
        assert!((&r * r.transpose() - DMatrix::identity(2, 2)).norm() < 1e-14);

        let r = psd_lowrank_factor(&dmatrix![4.0, 0.0; 0.0, 0.0], 1e-12).unwrap();
        assert_eq!(r.ncols(), 1);
        assert!((r[(0, 0)].abs() - 2.0).abs() < 1e-15 && r[(1, 0)] == 0.0);

        let p = dmatrix![2.0, 1.0; 1.0, 2.0];
        let r = psd_lowrank_factor(&p, 1e-12).unwrap();
        assert_eq!(r.ncols(), 2);
        assert!((&r * r.transpose() - p).norm() < 1e-12);
    }

    #[test]
    fn psd_factor_rejects_indefinite() {
        let err = psd_lowrank_factor(&dmatrix![1.0, 0.0; 0.0, -0.5], 1e-12).unwrap_err();
        assert!(matches!(err, Error::IndefiniteMatrix { .. }));
    }

    #[test]
    fn psd_factor_of_zero_is_empty() {
        let r = psd_lowrank_factor(&DMatrix::zeros(3, 3), 1e-12).unwrap();
        assert_eq!(r.shape(), (3, 0));
    }
}
