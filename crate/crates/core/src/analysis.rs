//! H2 errors and a-posteriori L2 output-error bounds.
//!
//! For stable `H(s) = C (sE − A)⁻¹ B` and `Ĥ(s) = Ĉ (sÊ − Â)⁻¹ B̂`,
//!
//! ```text
//! ‖H − Ĥ‖²_H2 = tr(C P Cᵀ) − 2 tr(C P̃ Ĉᵀ) + tr(Ĉ P̂ Ĉᵀ)
//! ```
//!
//! with `P`, `P̂` the controllability Gramians and `P̃` the solution of
//! `A P̃ Êᵀ + E P̃ Âᵀ = −B B̂ᵀ`. Since `‖y‖_L2 ≤ ‖H‖_H2 ‖U‖_H∞`, the output
//! error of the split scheme is bounded by
//!
//! ```text
//! ‖H_SO − Ĥ_SO‖ ‖U‖_H∞ + ‖H_x0 − Ĥ_x0‖ ‖z0‖ + ‖H_v0 − Ĥ_v0‖ ‖w0‖
//! ```
//!
//! and that of a single reduced model by `‖H_c − Ĥ_c‖ (‖U‖_H∞ + ‖z0‖ + ‖w0‖)`
//! where `H_c` is driven by the stacked input `[0 X0 0; B 0 M V0]`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gramians::{combined_factor, GramianFactors, SchurPencil};
use crate::kernels::svd_decompose;
use crate::reduction::{ReducedModel, SplitReduction};
use crate::system::{
    combined_input_matrix, companion, subsystem_input_matrix, FirstOrderSystem, SecondOrderSystem, Subsystem,
};

/// Negative trace expressions smaller than this (relative to the trace
/// scale) are round-off and clamp to zero.
pub const TRACE_CLAMP_TOL: f64 = 1e-10;

/// `‖H_full − H_red‖_H2` via Gramians and the cross Sylvester equation.
pub fn h2_error(full: &FirstOrderSystem, red: &FirstOrderSystem) -> Result<f64> {
    let full_pencil = SchurPencil::new(&full.e, &full.a)?;
    h2_error_with(&full_pencil, full, red)
}

/// [`h2_error`] with the full pencil's Schur form supplied, so repeated
/// comparisons against one full system factor it once.
pub fn h2_error_with(full_pencil: &SchurPencil, full: &FirstOrderSystem, red: &FirstOrderSystem) -> Result<f64> {
    if full.c.nrows() != red.c.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "full system has {} outputs, reduced has {}",
            full.c.nrows(),
            red.c.nrows()
        )));
    }
    if full.b.ncols() != red.b.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "full system has {} inputs, reduced has {}",
            full.b.ncols(),
            red.b.ncols()
        )));
    }
    if full.b.ncols() == 0 {
        return Ok(0.0);
    }
    let p = full_pencil.controllability(&full.b)?;
    let t_full = (&full.c * p * full.c.transpose()).trace();
    let (t_cross, t_red) = if red.order() == 0 {
        (0.0, 0.0)
    } else {
        let red_pencil = SchurPencil::new(&red.e, &red.a)?;
        let p_red = red_pencil.controllability(&red.b)?;
        let p_cross = full_pencil.cross(&full.b, &red_pencil, &red.b)?;
        ((&full.c * p_cross * red.c.transpose()).trace(), (&red.c * p_red * red.c.transpose()).trace())
    };
    let expr = t_full - 2.0 * t_cross + t_red;
    if expr >= 0.0 {
        Ok(expr.sqrt())
    } else if -expr <= TRACE_CLAMP_TOL * (t_full.abs() + t_red.abs()).max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NumericalInconsistency(format!(
            "squared H2 error evaluated to {expr:e} (terms {t_full:e}, {t_cross:e}, {t_red:e})"
        )))
    }
}

/// `sup_ω |α / (iω − β)| = |α| / |β|`, the H∞ norm of the Laplace transform of
/// `α e^{βt}`.
pub fn hinf_exp_input(alpha: f64, beta: f64) -> Result<f64> {
    if beta.is_nan() || beta >= 0.0 {
        return Err(Error::NonDecayingInput(beta));
    }
    Ok(alpha.abs() / beta.abs())
}

/// One summand of an error bound: an H2 error times an amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTerm {
    pub label: &'static str,
    pub h2_error: f64,
    pub amplitude: f64,
}

impl BoundTerm {
    pub fn contribution(&self) -> f64 {
        self.h2_error * self.amplitude
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBoundReport {
    /// Three terms (`so`, `x0`, `v0`) for the split scheme, one (`combined`)
    /// for a single reduced model.
    pub terms: Vec<BoundTerm>,
    pub u_hinf: f64,
    pub z0_norm: f64,
    pub w0_norm: f64,
    pub total: f64,
}

impl ErrorBoundReport {
    fn from_terms(terms: Vec<BoundTerm>, u_hinf: f64, z0_norm: f64, w0_norm: f64) -> Self {
        let total = terms.iter().map(BoundTerm::contribution).sum();
        Self { terms, u_hinf, z0_norm, w0_norm, total }
    }
}

fn check_coefficients(sos: &SecondOrderSystem, z0: &DVector<f64>, w0: &DVector<f64>) -> Result<()> {
    if z0.len() != sos.position_basis().ncols() {
        return Err(Error::DimensionMismatch(format!(
            "z0 has length {}, X0 has {} columns",
            z0.len(),
            sos.position_basis().ncols()
        )));
    }
    if w0.len() != sos.velocity_basis().ncols() {
        return Err(Error::DimensionMismatch(format!(
            "w0 has length {}, V0 has {} columns",
            w0.len(),
            sos.velocity_basis().ncols()
        )));
    }
    Ok(())
}

/// Companion realization of a reduced model driven by `input(rom_system)`.
fn reduced_realization(
    rom: &ReducedModel,
    width: usize,
    input: impl Fn(&SecondOrderSystem) -> DMatrix<f64>,
) -> Result<FirstOrderSystem> {
    if rom.order() == 0 {
        return FirstOrderSystem::new(
            DMatrix::zeros(0, 0),
            DMatrix::zeros(0, 0),
            DMatrix::zeros(0, width),
            DMatrix::zeros(rom.outputs(), 0),
        );
    }
    let sys = rom.to_system()?;
    companion(&sys).with_input(input(&sys))
}

/// A-posteriori L2 bound for the split scheme.
pub fn bound_split(
    sos: &SecondOrderSystem,
    split: &SplitReduction,
    u_hinf: f64,
    z0: &DVector<f64>,
    w0: &DVector<f64>,
) -> Result<ErrorBoundReport> {
    check_coefficients(sos, z0, w0)?;
    let full = companion(sos);
    let pencil = SchurPencil::new(&full.e, &full.a)?;
    let amplitudes = [u_hinf, z0.norm(), w0.norm()];
    let terms = Subsystem::ALL
        .par_iter()
        .zip(amplitudes.par_iter())
        .map(|(&tag, &amplitude)| {
            let full_tag = full.with_input(subsystem_input_matrix(sos, tag))?;
            let red =
                reduced_realization(split.get(tag), sos.subsystem_width(tag), |s| subsystem_input_matrix(s, tag))?;
            Ok(BoundTerm { label: tag.label(), h2_error: h2_error_with(&pencil, &full_tag, &red)?, amplitude })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorBoundReport::from_terms(terms, amplitudes[0], amplitudes[1], amplitudes[2]))
}

/// A-posteriori L2 bound for a single reduced model (combined or homogeneous).
pub fn bound_combined(
    sos: &SecondOrderSystem,
    rom: &ReducedModel,
    u_hinf: f64,
    z0: &DVector<f64>,
    w0: &DVector<f64>,
) -> Result<ErrorBoundReport> {
    check_coefficients(sos, z0, w0)?;
    let full = companion(sos).with_input(combined_input_matrix(sos))?;
    let pencil = SchurPencil::new(&full.e, &full.a)?;
    let red = reduced_realization(rom, full.b.ncols(), combined_input_matrix)?;
    let h2 = h2_error_with(&pencil, &full, &red)?;
    let (zn, wn) = (z0.norm(), w0.norm());
    let term = BoundTerm { label: "combined", h2_error: h2, amplitude: u_hinf + zn + wn };
    Ok(ErrorBoundReport::from_terms(vec![term], u_hinf, zn, wn))
}

/// Hankel singular values (`σ(Sᵀ R)`) of each subsystem and of the combined
/// factor.
#[derive(Debug, Clone)]
pub struct HankelReport {
    pub so: DVector<f64>,
    pub x0: DVector<f64>,
    pub v0: DVector<f64>,
    pub combined: DVector<f64>,
}

impl HankelReport {
    pub fn get(&self, tag: Subsystem) -> &DVector<f64> {
        match tag {
            Subsystem::Input => &self.so,
            Subsystem::InitialPosition => &self.x0,
            Subsystem::InitialVelocity => &self.v0,
        }
    }
}

pub fn hankel_report(factors: &GramianFactors) -> Result<HankelReport> {
    let sv = |r: &DMatrix<f64>| -> Result<DVector<f64>> { Ok(svd_decompose(&(factors.s.transpose() * r))?.sigma) };
    Ok(HankelReport {
        so: sv(&factors.r_so)?,
        x0: sv(&factors.r_x0)?,
        v0: sv(&factors.r_v0)?,
        combined: sv(&combined_factor(factors)?)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn scalar_fo(a: f64, b: f64, c: f64) -> FirstOrderSystem {
        FirstOrderSystem::new(dmatrix![1.0], dmatrix![a], dmatrix![b], dmatrix![c]).unwrap()
    }

    #[test]
    fn h2_of_identical_systems_is_zero() {
        let fo = scalar_fo(-1.0, 1.0, 1.0);
        assert!(h2_error(&fo, &fo).unwrap() < 1e-8);
    }

    #[test]
    fn h2_against_empty_model_is_the_norm() {
        let fo = scalar_fo(-1.0, 1.0, 1.0);
        let zero = FirstOrderSystem::new(
            DMatrix::zeros(0, 0),
            DMatrix::zeros(0, 0),
            DMatrix::zeros(0, 1),
            DMatrix::zeros(1, 0),
        )
        .unwrap();
        assert!((h2_error(&fo, &zero).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn h2_between_scalar_poles() {
        // 1/2 − 2·(1/3) + 1/4 = 1/12
        let e = h2_error(&scalar_fo(-1.0, 1.0, 1.0), &scalar_fo(-2.0, 1.0, 1.0)).unwrap();
        assert!((e - (1.0f64 / 12.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn exponential_input_norms() {
        assert!((hinf_exp_input(0.2, -1.0).unwrap() - 0.2).abs() < 1e-16);
        assert_eq!(hinf_exp_input(0.0, -3.0).unwrap(), 0.0);
        assert_eq!(hinf_exp_input(1.0, -4.0).unwrap(), 0.25);
        assert!(matches!(hinf_exp_input(1.0, 0.0), Err(Error::NonDecayingInput(_))));
    }

    #[test]
    fn hankel_values_of_identity_factors() {
        let f = GramianFactors {
            r_so: DMatrix::identity(2, 2),
            r_x0: DMatrix::identity(2, 2),
            r_v0: DMatrix::identity(2, 2),
            s: DMatrix::identity(2, 2),
        };
        let rep = hankel_report(&f).unwrap();
        assert!(rep.so.iter().chain(rep.x0.iter()).chain(rep.v0.iter()).all(|&s| (s - 1.0).abs() < 1e-14));
        assert_eq!(rep.combined.len(), 2);
    }
}
