//! Bartels–Stewart solvers for generalized Lyapunov and Sylvester equations.
//!
//! Every equation is brought to standard form through `Ã = E⁻¹A` and solved on
//! the real Schur form of `Ã`. One Schur decomposition serves the
//! controllability equation, the observability equation and any number of
//! cross (Sylvester) equations against another pencil.

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::kernels::{fro, real_schur, relative, LinearSolver};
use crate::system::quasi_triangular_eigenvalues;

/// Required relative residual of every accepted Lyapunov / Sylvester solution.
pub const RESIDUAL_TOL: f64 = 1e-10;

const REFINEMENT_STEPS: usize = 3;

/// A stable pencil `(E, A)` together with the real Schur form of `E⁻¹A`.
#[derive(Debug, Clone)]
pub struct SchurPencil {
    e: DMatrix<f64>,
    a: DMatrix<f64>,
    e_solver: LinearSolver<f64>,
    q: DMatrix<f64>,
    t: DMatrix<f64>,
    abscissa: f64,
}

impl SchurPencil {
    /// Factors `E`, computes the Schur form of `E⁻¹A` and rejects unstable pencils.
    pub fn new(e: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<Self> {
        if !a.is_square() || e.shape() != a.shape() {
            return Err(Error::DimensionMismatch(format!(
                "pencil matrices are {}x{} and {}x{}",
                e.nrows(),
                e.ncols(),
                a.nrows(),
                a.ncols()
            )));
        }
        let e_solver = LinearSolver::new(e.clone(), "descriptor matrix E")?;
        let a_std = e_solver.solve(a)?;
        let (q, t) = real_schur(&a_std)?;
        let abscissa = quasi_triangular_eigenvalues(&t).iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        if abscissa >= 0.0 {
            return Err(Error::UnstablePencil { abscissa });
        }
        Ok(Self { e: e.clone(), a: a.clone(), e_solver, q, t, abscissa })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// Largest real part of the pencil's eigenvalues (negative by construction).
    pub fn abscissa(&self) -> f64 {
        self.abscissa
    }

    /// Solves `A P Eᵀ + E P Aᵀ = −F Fᵀ`.
    pub fn controllability(&self, f: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_rows(f.nrows(), "F")?;
        let rhs = f * f.transpose();
        let g = self.e_solver.solve(f)?;
        let mut p = self.solve_standard_lyapunov(&(-(&g * g.transpose())))?;
        for _ in 0..REFINEMENT_STEPS {
            let residual = self.controllability_residual_matrix(&p, &rhs);
            if relative(fro(&residual), fro(&rhs)) <= RESIDUAL_TOL * 0.1 {
                break;
            }
            let r = self.e_solver.solve(&residual)?;
            let r = self.e_solver.solve(&r.transpose())?;
            p += self.solve_standard_lyapunov(&(-r))?;
            symmetrize(&mut p);
        }
        let res = relative(fro(&self.controllability_residual_matrix(&p, &rhs)), fro(&rhs));
        check_residual("Lyapunov", res)?;
        Ok(p)
    }

    /// Solves `Aᵀ Q E + Eᵀ Q A = −Cᵀ C`.
    pub fn observability(&self, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if c.ncols() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "C has {} columns, pencil has order {}",
                c.ncols(),
                self.order()
            )));
        }
        let rhs = c.transpose() * c;
        let mut z = self.solve_transposed_lyapunov(&(-&rhs))?;
        let mut q = self.recover_observability(&z)?;
        for _ in 0..REFINEMENT_STEPS {
            let residual = self.observability_residual_matrix(&q, &rhs);
            if relative(fro(&residual), fro(&rhs)) <= RESIDUAL_TOL * 0.1 {
                break;
            }
            z += self.solve_transposed_lyapunov(&(-residual))?;
            symmetrize(&mut z);
            q = self.recover_observability(&z)?;
        }
        let res = relative(fro(&self.observability_residual_matrix(&q, &rhs)), fro(&rhs));
        check_residual("Lyapunov", res)?;
        Ok(q)
    }

    /// Solves the cross equation `A X Ê ᵀ + E X Âᵀ = −B B̂ᵀ` against `other = (Ê, Â)`.
    pub fn cross(&self, b: &DMatrix<f64>, other: &SchurPencil, b_other: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_rows(b.nrows(), "B")?;
        other.check_rows(b_other.nrows(), "reduced B")?;
        if b.ncols() != b_other.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "B has {} columns, reduced B has {}",
                b.ncols(),
                b_other.ncols()
            )));
        }
        let rhs = b * b_other.transpose();
        let g = self.e_solver.solve(b)?;
        let g_other = other.e_solver.solve(b_other)?;
        let mut x = self.solve_standard_sylvester(other, &(-(&g * g_other.transpose())))?;
        for _ in 0..REFINEMENT_STEPS {
            let residual = self.cross_residual_matrix(other, &x, &rhs);
            if relative(fro(&residual), fro(&rhs)) <= RESIDUAL_TOL * 0.1 {
                break;
            }
            let r = self.e_solver.solve(&residual)?;
            let r = other.e_solver.solve(&r.transpose())?.transpose();
            x += self.solve_standard_sylvester(other, &(-r))?;
        }
        let res = relative(fro(&self.cross_residual_matrix(other, &x, &rhs)), fro(&rhs));
        check_residual("Sylvester", res)?;
        Ok(x)
    }

    /// Relative residual of a controllability Gramian candidate.
    pub fn controllability_residual(&self, p: &DMatrix<f64>, f: &DMatrix<f64>) -> f64 {
        let rhs = f * f.transpose();
        relative(fro(&self.controllability_residual_matrix(p, &rhs)), fro(&rhs))
    }

    /// Relative residual of an observability Gramian candidate.
    pub fn observability_residual(&self, q: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
        let rhs = c.transpose() * c;
        relative(fro(&self.observability_residual_matrix(q, &rhs)), fro(&rhs))
    }

    /// Relative residual of a cross Gramian candidate.
    pub fn cross_residual(
        &self,
        other: &SchurPencil,
        x: &DMatrix<f64>,
        b: &DMatrix<f64>,
        b_other: &DMatrix<f64>,
    ) -> f64 {
        let rhs = b * b_other.transpose();
        relative(fro(&self.cross_residual_matrix(other, x, &rhs)), fro(&rhs))
    }

    fn check_rows(&self, rows: usize, name: &str) -> Result<()> {
        if rows != self.order() {
            return Err(Error::DimensionMismatch(format!("{name} has {rows} rows, pencil has order {}", self.order())));
        }
        Ok(())
    }

    fn controllability_residual_matrix(&self, p: &DMatrix<f64>, fft: &DMatrix<f64>) -> DMatrix<f64> {
        let ape = &self.a * p * self.e.transpose();
        &ape + ape.transpose() + fft
    }

    fn observability_residual_matrix(&self, q: &DMatrix<f64>, ctc: &DMatrix<f64>) -> DMatrix<f64> {
        let aqe = self.a.transpose() * q * &self.e;
        &aqe + aqe.transpose() + ctc
    }

    fn cross_residual_matrix(&self, other: &SchurPencil, x: &DMatrix<f64>, bbt: &DMatrix<f64>) -> DMatrix<f64> {
        &self.a * x * other.e.transpose() + &self.e * x * other.a.transpose() + bbt
    }

    /// `Ã X + X Ãᵀ = C`.
    fn solve_standard_lyapunov(&self, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let c_schur = self.q.transpose() * c * &self.q;
        let mut y = quasi_triangular_sylvester(&self.t, &self.t, c_schur)?;
        symmetrize(&mut y);
        let mut x = &self.q * y * self.q.transpose();
        symmetrize(&mut x);
        Ok(x)
    }

    /// `Ãᵀ Z + Z Ã = C`.
    ///
    /// With `Ã = Q T Qᵀ` this is `Tᵀ Y + Y T = Qᵀ C Q`. Reversing row and column
    /// order turns the lower quasi-triangular `Tᵀ` into an upper one, so the
    /// same kernel applies without a second Schur decomposition.
    fn solve_transposed_lyapunov(&self, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.order();
        let c_schur = self.q.transpose() * c * &self.q;
        let t_rev = DMatrix::from_fn(n, n, |i, j| self.t[(n - 1 - j, n - 1 - i)]);
        let c_rev = DMatrix::from_fn(n, n, |i, j| c_schur[(n - 1 - i, n - 1 - j)]);
        let y_rev = quasi_triangular_sylvester(&t_rev, &t_rev, c_rev)?;
        let mut y = DMatrix::from_fn(n, n, |i, j| y_rev[(n - 1 - i, n - 1 - j)]);
        symmetrize(&mut y);
        let mut z = &self.q * y * self.q.transpose();
        symmetrize(&mut z);
        Ok(z)
    }

    /// `Q = E⁻ᵀ Z E⁻¹`.
    fn recover_observability(&self, z: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        // E⁻ᵀ Z E⁻¹ = (E⁻ᵀ (E⁻ᵀ Z)ᵀ)ᵀ; E⁻ᵀ via the transposed factorization.
        let et_solver = LinearSolver::new(self.e.transpose(), "descriptor matrix Eᵀ")?;
        let w = et_solver.solve(z)?;
        let mut q = et_solver.solve(&w.transpose())?.transpose();
        symmetrize(&mut q);
        Ok(q)
    }

    /// `Ã X + X Ã_otherᵀ = C`.
    fn solve_standard_sylvester(&self, other: &SchurPencil, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let c_schur = self.q.transpose() * c * &other.q;
        let y = quasi_triangular_sylvester(&self.t, &other.t, c_schur)?;
        Ok(&self.q * y * other.q.transpose())
    }
}

fn check_residual(equation: &'static str, residual: f64) -> Result<()> {
    if residual <= RESIDUAL_TOL {
        Ok(())
    } else {
        Err(Error::ResidualContract { equation, residual, tolerance: RESIDUAL_TOL })
    }
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Diagonal block boundaries `(start, size)` of an upper quasi-triangular matrix.
fn diagonal_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    blocks
}

/// Solves `T Y + Y Sᵀ = C` for upper quasi-triangular `T` (n×n) and `S` (k×k).
///
/// Column blocks of `Y` are resolved from last to first (the coupling through
/// `Sᵀ` only reaches earlier columns), and within a column block the row
/// blocks from bottom to top. Each diagonal coupling is a Kronecker system of
/// size at most 4.
pub(crate) fn quasi_triangular_sylvester(
    t: &DMatrix<f64>,
    s: &DMatrix<f64>,
    mut c: DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let (n, k) = (t.nrows(), s.nrows());
    debug_assert_eq!(c.shape(), (n, k));
    let row_blocks = diagonal_blocks(t);
    let col_blocks = diagonal_blocks(s);
    let mut y = DMatrix::<f64>::zeros(n, k);
    // Row-major copy of T so the back-substitution dot products are contiguous.
    let t_rows = t.transpose();

    for &(j0, bj) in col_blocks.iter().rev() {
        // rhs for this column block already has later column blocks eliminated.
        for &(i0, bi) in row_blocks.iter().rev() {
            let tail = i0 + bi;
            let mut rhs = [[0.0; 2]; 2];
            for jj in 0..bj {
                let ycol = y.column(j0 + jj);
                for ii in 0..bi {
                    let row = t_rows.column(i0 + ii);
                    let mut acc = c[(i0 + ii, j0 + jj)];
                    if tail < n {
                        acc -= row.rows(tail, n - tail).dot(&ycol.rows(tail, n - tail));
                    }
                    rhs[ii][jj] = acc;
                }
            }
            let block = solve_small(t, i0, bi, s, j0, bj, rhs)?;
            for jj in 0..bj {
                for ii in 0..bi {
                    y[(i0 + ii, j0 + jj)] = block[ii][jj];
                }
            }
        }
        // Eliminate the finished column block from the earlier columns:
        // C[:, l] -= Σ_jj Y[:, j0+jj] S[l, j0+jj] for l < j0.
        if j0 > 0 {
            for jj in 0..bj {
                let ycol = y.column(j0 + jj).clone_owned();
                for l in 0..j0 {
                    let coeff = s[(l, j0 + jj)];
                    if coeff != 0.0 {
                        c.column_mut(l).axpy(-coeff, &ycol, 1.0);
                    }
                }
            }
        }
    }
    Ok(y)
}

/// `T_ii Y + Y S_jjᵀ = R` for blocks of size 1 or 2.
fn solve_small(
    t: &DMatrix<f64>,
    i0: usize,
    bi: usize,
    s: &DMatrix<f64>,
    j0: usize,
    bj: usize,
    rhs: [[f64; 2]; 2],
) -> Result<[[f64; 2]; 2]> {
    let mut out = [[0.0; 2]; 2];
    if bi == 1 && bj == 1 {
        let den = t[(i0, i0)] + s[(j0, j0)];
        if den == 0.0 {
            return Err(Error::singular("Sylvester diagonal block"));
        }
        out[0][0] = rhs[0][0] / den;
        return Ok(out);
    }
    // (I_bj ⊗ T_ii + S_jj ⊗ I_bi) vec(Y) = vec(R), column-major vec.
    let dim = bi * bj;
    let mut kron = Matrix4::<f64>::identity();
    let mut vec_r = Vector4::<f64>::zeros();
    for jc in 0..bj {
        for ic in 0..bi {
            let row = jc * bi + ic;
            vec_r[row] = rhs[ic][jc];
            for jd in 0..bj {
                for id in 0..bi {
                    let col = jd * bi + id;
                    let mut v = 0.0;
                    if jc == jd {
                        v += t[(i0 + ic, i0 + id)];
                    }
                    if ic == id {
                        v += s[(j0 + jc, j0 + jd)];
                    }
                    kron[(row, col)] = v;
                }
            }
        }
    }
    let sol = match dim {
        2 => {
            let m2 = Matrix2::new(kron[(0, 0)], kron[(0, 1)], kron[(1, 0)], kron[(1, 1)]);
            let r2 = nalgebra::Vector2::new(vec_r[0], vec_r[1]);
            let x = m2.lu().solve(&r2).ok_or_else(|| Error::singular("Sylvester 2x2 block"))?;
            Vector4::new(x[0], x[1], 0.0, 0.0)
        }
        _ => kron.lu().solve(&vec_r).ok_or_else(|| Error::singular("Sylvester 4x4 block"))?,
    };
    for jc in 0..bj {
        for ic in 0..bi {
            out[ic][jc] = sol[jc * bi + ic];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn quasi_triangular_kernel_with_complex_blocks() {
        // T has a 2x2 block with complex eigenvalues -1 ± 2i followed by -3.
        let t = dmatrix![-1.0, 2.0, 0.5; -2.0, -1.0, 0.3; 0.0, 0.0, -3.0];
        let s = dmatrix![-0.5, 1.0; 0.0, -2.0];
        let c = dmatrix![1.0, 2.0; 3.0, 4.0; 5.0, 6.0];
        let y = quasi_triangular_sylvester(&t, &s, c.clone()).unwrap();
        assert!((&t * &y + &y * s.transpose() - c).norm() < 1e-13);
    }

    #[test]
    fn transposed_lyapunov_matches_direct_form() {
        let e = dmatrix![1.0, 0.0, 0.0; 0.0, 2.0, 0.0; 0.0, 0.0, 1.5];
        let a = dmatrix![-1.0, 3.0, 0.0; -3.0, -1.0, 1.0; 0.5, 0.0, -2.0];
        let c = dmatrix![1.0, 0.0, 1.0];
        let pencil = SchurPencil::new(&e, &a).unwrap();
        let q = pencil.observability(&c).unwrap();
        assert!(pencil.observability_residual(&q, &c) < 1e-13);
        // Duality: the same Q solves the controllability equation of (Eᵀ, Aᵀ, Cᵀ).
        let dual = SchurPencil::new(&e.transpose(), &a.transpose()).unwrap();
        let q_dual = dual.controllability(&c.transpose()).unwrap();
        assert!((q - q_dual).norm() < 1e-12);
    }

    #[test]
    fn unstable_pencil_rejected() {
        let err = SchurPencil::new(&DMatrix::identity(2, 2), &dmatrix![-1.0, 0.0; 0.0, 0.5]).unwrap_err();
        assert!(matches!(err, Error::UnstablePencil { .. }));
    }
}
