//! Gramians of second-order systems with inhomogeneous initial conditions.
//!
//! The position controllability Gramian of each subsystem is the upper-left
//! `n×n` block of the companion controllability Gramian with the matching
//! input matrix (`[0; B]`, `[X0; 0]`, `[0; M V0]`). All three subsystems share
//! one observability Gramian: the lower-right (velocity) block of the
//! companion observability Gramian.
//!
//! Gramians here are always Lyapunov-equation solutions. Frequency-domain
//! integrals `∫ R(iω) R(iω)ᴴ dω` over the real line equal `2π` times them.

mod bartels_stewart;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use bartels_stewart::{SchurPencil, RESIDUAL_TOL};

use crate::error::{Error, Result};
use crate::kernels::psd_lowrank_factor;
use crate::system::{combined_input_matrix, companion, subsystem_input_matrix, SecondOrderSystem, Subsystem};

/// Solves `A P Eᵀ + E P Aᵀ = −F Fᵀ` for a stable pencil.
pub fn solve_gen_lyapunov(e: &DMatrix<f64>, a: &DMatrix<f64>, f: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    SchurPencil::new(e, a)?.controllability(f)
}

/// Solves `Aᵀ Q E + Eᵀ Q A = −Cᵀ C` for a stable pencil.
pub fn solve_gen_lyapunov_obs(e: &DMatrix<f64>, a: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    SchurPencil::new(e, a)?.observability(c)
}

/// Solves `A X Êᵀ + E X Âᵀ = −B B̂ᵀ` for the full pencil `(E, A)` and the
/// reduced pencil `(Ê, Â)`.
pub fn solve_sylvester_cross(
    e: &DMatrix<f64>,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    e_r: &DMatrix<f64>,
    a_r: &DMatrix<f64>,
    b_r: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let full = SchurPencil::new(e, a)?;
    let red = SchurPencil::new(e_r, a_r)?;
    full.cross(b, &red, b_r)
}

fn half_dimension(p: &DMatrix<f64>) -> Result<usize> {
    if !p.is_square() {
        return Err(Error::DimensionMismatch(format!("Gramian is {}x{}, expected square", p.nrows(), p.ncols())));
    }
    if !p.nrows().is_multiple_of(2) {
        return Err(Error::OddDimension(p.nrows()));
    }
    Ok(p.nrows() / 2)
}

/// Upper-left `n×n` block of a `2n×2n` companion Gramian.
pub fn extract_position_block(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = half_dimension(p)?;
    Ok(p.view((0, 0), (n, n)).clone_owned())
}

/// Lower-right `n×n` block of a `2n×2n` companion Gramian.
pub fn extract_velocity_obs_block(q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = half_dimension(q)?;
    Ok(q.view((n, n), (n, n)).clone_owned())
}

/// Low-rank factors `P_SO ≈ R_SO R_SOᵀ`, `P_x0 ≈ R_x0 R_x0ᵀ`,
/// `P_v0 ≈ R_v0 R_v0ᵀ` and `Q_SO ≈ S Sᵀ`.
#[derive(Debug, Clone)]
pub struct GramianFactors {
    pub r_so: DMatrix<f64>,
    pub r_x0: DMatrix<f64>,
    pub r_v0: DMatrix<f64>,
    pub s: DMatrix<f64>,
}

impl GramianFactors {
    pub fn controllability(&self, tag: Subsystem) -> &DMatrix<f64> {
        match tag {
            Subsystem::Input => &self.r_so,
            Subsystem::InitialPosition => &self.r_x0,
            Subsystem::InitialVelocity => &self.r_v0,
        }
    }
}

/// Position controllability Gramian of one subsystem (exact Lyapunov block,
/// not factored).
pub fn position_gramian(sos: &SecondOrderSystem, input: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let fo = companion(sos);
    let pencil = SchurPencil::new(&fo.e, &fo.a)?;
    extract_position_block(&pencil.controllability(input)?)
}

/// Position block of the companion Gramian driven by the stacked input
/// `[0 X0 0; B 0 M V0]`. Equal to `P_SO + P_x0 + P_v0`.
pub fn augmented_position_gramian(sos: &SecondOrderSystem) -> Result<DMatrix<f64>> {
    position_gramian(sos, &combined_input_matrix(sos))
}

/// Computes the tailored Gramian factors of all three subsystems.
///
/// One Schur decomposition of the companion pencil is shared by the four
/// Lyapunov solves, which run in parallel. An empty `X0` or `V0` yields a
/// factor with zero columns.
pub fn controllability_factors(sos: &SecondOrderSystem, rel_tol: f64) -> Result<GramianFactors> {
    let fo = companion(sos);
    let pencil = SchurPencil::new(&fo.e, &fo.a)?;
    let n = sos.n();

    let jobs: Vec<Option<Subsystem>> =
        vec![Some(Subsystem::Input), Some(Subsystem::InitialPosition), Some(Subsystem::InitialVelocity), None];
    let mut factors: Vec<DMatrix<f64>> = jobs
        .par_iter()
        .map(|job| match job {
            Some(tag) => {
                let input = subsystem_input_matrix(sos, *tag);
                if input.ncols() == 0 {
                    return Ok(DMatrix::zeros(n, 0));
                }
                let p = pencil.controllability(&input)?;
                psd_lowrank_factor(&extract_position_block(&p)?, rel_tol)
            }
            None => {
                let q = pencil.observability(&fo.c)?;
                psd_lowrank_factor(&extract_velocity_obs_block(&q)?, rel_tol)
            }
        })
        .collect::<Result<_>>()?;
    let s = factors.pop().expect("four jobs");
    let r_v0 = factors.pop().expect("four jobs");
    let r_x0 = factors.pop().expect("four jobs");
    let r_so = factors.pop().expect("four jobs");
    Ok(GramianFactors { r_so, r_x0, r_v0, s })
}

/// `[R_SO R_x0 R_v0]`, whose Gram product is `P_SO + P_x0 + P_v0`.
pub fn combined_factor(f: &GramianFactors) -> Result<DMatrix<f64>> {
    let n = f.r_so.nrows();
    if f.r_x0.nrows() != n || f.r_v0.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "factor row counts differ: R_SO {}, R_x0 {}, R_v0 {}",
            n,
            f.r_x0.nrows(),
            f.r_v0.nrows()
        )));
    }
    let width = f.r_so.ncols() + f.r_x0.ncols() + f.r_v0.ncols();
    let mut out = DMatrix::zeros(n, width);
    let mut col = 0;
    for r in [&f.r_so, &f.r_x0, &f.r_v0] {
        out.view_mut((0, col), (n, r.ncols())).copy_from(r);
        col += r.ncols();
    }
    Ok(out)
}
