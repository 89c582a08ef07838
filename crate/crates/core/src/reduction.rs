//! Structure-preserving balanced truncation.
//!
//! Given Gramian factors `P ≈ R Rᵀ` (position controllability) and
//! `Q ≈ S Sᵀ` (velocity observability), the SVD `Sᵀ R = U Σ Xᵀ` yields the
//! projections
//!
//! ```text
//! W = S U_r Σ_r^{-1/2},   V = R X_r Σ_r^{-1/2}
//! ```
//!
//! and the reduced second-order model `M̂ = WᵀMV`, `D̂ = WᵀDV`, `K̂ = WᵀKV`,
//! `B̂ = WᵀB`, `Ĉ = CV`, `X̂0 = WᵀX0`, `V̂0 = WᵀV0`.
//!
//! Three schemes are offered: one projection per subsystem
//! ([`reduce_split`]), one projection from the summed Gramians
//! ([`reduce_combined`]), and the classical homogeneous projection that
//! ignores initial conditions ([`reduce_homogeneous`]).

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gramians::{combined_factor, controllability_factors, GramianFactors};
use crate::kernels::{svd_decompose, GRAMIAN_FACTOR_TOL};
use crate::system::{eval_transfer, Complex64, SecondOrderSystem, Stability, Subsystem};

/// Singular values at or below `σ₁ · RANK_TOL` are treated as zero.
pub const RANK_TOL: f64 = 1e-14;

/// Requested reduced order: explicit, or from a relative Hankel singular value cut-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderSpec {
    Fixed(usize),
    Tolerance(f64),
}

/// Which scheme produced a reduced model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// One of the three independent reductions of the split scheme.
    Split(Subsystem),
    Combined,
    Homogeneous,
}

/// Balancing-and-truncating projection pair.
#[derive(Debug, Clone)]
pub struct Projection {
    pub w: DMatrix<f64>,
    pub v: DMatrix<f64>,
    /// Retained singular values `σ₁ ≥ … ≥ σ_r > 0`.
    pub retained: DVector<f64>,
    /// Full singular value spectrum of `Sᵀ R`.
    pub spectrum: DVector<f64>,
}

/// Reduced second-order model.
///
/// Matrices that do not drive this model are stored with zero columns: the
/// initial-position ROM of the split scheme has no input, the input ROM has
/// no initial-condition bases, and so on. A model of order zero is valid and
/// has identically zero output.
#[derive(Debug, Clone)]
pub struct ReducedModel {
    pub m: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub x0: DMatrix<f64>,
    pub v0: DMatrix<f64>,
    pub retained_sigma: DVector<f64>,
    pub scheme: Scheme,
    pub w: DMatrix<f64>,
    pub v: DMatrix<f64>,
    /// `None` for order zero, or when the stability test itself failed.
    pub stability: Option<Stability>,
}

impl ReducedModel {
    pub fn order(&self) -> usize {
        self.m.nrows()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    /// The model as a [`SecondOrderSystem`]; fails for order zero.
    pub fn to_system(&self) -> Result<SecondOrderSystem> {
        SecondOrderSystem::new(self.m.clone(), self.d.clone(), self.k.clone(), self.b.clone(), self.c.clone())?
            .with_initial_position_basis(self.x0.clone())?
            .with_initial_velocity_basis(self.v0.clone())
    }

    /// True if the model is stable or empty. BT for second-order systems
    /// does not guarantee stability, so this is reported, not enforced.
    pub fn is_stable(&self) -> bool {
        self.order() == 0 || self.stability.is_some_and(|s| s.stable)
    }

    /// Reduced transfer function of one subsystem at `s`.
    pub fn transfer(&self, tag: Subsystem, s: Complex64) -> Result<DMatrix<Complex64>> {
        let width = match tag {
            Subsystem::Input => self.b.ncols(),
            Subsystem::InitialPosition => self.x0.ncols(),
            Subsystem::InitialVelocity => self.v0.ncols(),
        };
        if self.order() == 0 {
            return Ok(DMatrix::zeros(self.outputs(), width));
        }
        eval_transfer(&self.to_system()?, tag, s)
    }

    fn empty(sos: &SecondOrderSystem, scheme: Scheme) -> Self {
        let n = sos.n();
        ReducedModel {
            m: DMatrix::zeros(0, 0),
            d: DMatrix::zeros(0, 0),
            k: DMatrix::zeros(0, 0),
            b: DMatrix::zeros(0, 0),
            c: DMatrix::zeros(sos.outputs(), 0),
            x0: DMatrix::zeros(0, 0),
            v0: DMatrix::zeros(0, 0),
            retained_sigma: DVector::zeros(0),
            scheme,
            w: DMatrix::zeros(n, 0),
            v: DMatrix::zeros(n, 0),
            stability: None,
        }
    }
}

/// The three independent reduced models of the split scheme. Their outputs
/// add up to the approximation of the full response.
#[derive(Debug, Clone)]
pub struct SplitReduction {
    pub rom_so: ReducedModel,
    pub rom_x0: ReducedModel,
    pub rom_v0: ReducedModel,
}

impl SplitReduction {
    pub fn get(&self, tag: Subsystem) -> &ReducedModel {
        match tag {
            Subsystem::Input => &self.rom_so,
            Subsystem::InitialPosition => &self.rom_x0,
            Subsystem::InitialVelocity => &self.rom_v0,
        }
    }
}

/// Number of singular values with `σᵢ ≥ rel_tol·σ₁` (boundary kept).
pub fn order_from_tolerance(sigma: &DVector<f64>, rel_tol: f64) -> Result<usize> {
    if sigma.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let cut = rel_tol * sigma[0];
    Ok(sigma.iter().take_while(|&&s| s >= cut).count())
}

/// Builds `W = S U_r Σ_r^{-1/2}`, `V = R X_r Σ_r^{-1/2}` from the SVD of `Sᵀ R`.
pub fn bt_project(s: &DMatrix<f64>, r: &DMatrix<f64>, order: OrderSpec) -> Result<Projection> {
    if s.nrows() != r.nrows() {
        return Err(Error::DimensionMismatch(format!("S has {} rows, R has {}", s.nrows(), r.nrows())));
    }
    let svd = svd_decompose(&(s.transpose() * r))?;
    if svd.sigma.is_empty() || svd.sigma[0] <= 0.0 {
        return Err(Error::EmptySpectrum);
    }
    let available = svd.sigma.iter().filter(|&&x| x > svd.sigma[0] * RANK_TOL).count();
    let r_order = match order {
        OrderSpec::Fixed(k) => k,
        OrderSpec::Tolerance(tol) => order_from_tolerance(&svd.sigma, tol)?,
    };
    if r_order > available {
        return Err(Error::RankDeficient { requested: r_order, available });
    }
    let retained = svd.sigma.rows(0, r_order).clone_owned();
    let scale = DMatrix::from_diagonal(&retained.map(|x| 1.0 / x.sqrt()));
    let w = s * svd.u.columns(0, r_order) * &scale;
    let v = r * svd.x.columns(0, r_order) * &scale;
    Ok(Projection { w, v, retained, spectrum: svd.sigma })
}

/// Which data a projected model keeps.
#[derive(Clone, Copy)]
struct Carries {
    input: bool,
    position: bool,
    velocity: bool,
}

fn project(sos: &SecondOrderSystem, proj: &Projection, scheme: Scheme, carries: Carries) -> ReducedModel {
    let (w, v) = (&proj.w, &proj.v);
    let wt = w.transpose();
    let r = w.ncols();
    let keep = |flag: bool, full: &DMatrix<f64>| {
        if flag {
            &wt * full
        } else {
            DMatrix::zeros(r, 0)
        }
    };
    let mut rom = ReducedModel {
        m: &wt * sos.mass() * v,
        d: &wt * sos.damping() * v,
        k: &wt * sos.stiffness() * v,
        b: keep(carries.input, sos.input()),
        c: sos.output() * v,
        x0: keep(carries.position, sos.position_basis()),
        v0: keep(carries.velocity, sos.velocity_basis()),
        retained_sigma: proj.retained.clone(),
        scheme,
        w: w.clone(),
        v: v.clone(),
        stability: None,
    };
    if r > 0 {
        rom.stability = rom.to_system().and_then(|s| s.stability()).ok();
    }
    rom
}

/// Split scheme: an independent balanced truncation per subsystem.
///
/// `orders` is indexed like [`Subsystem::ALL`]. A subsystem whose factor is
/// empty (no initial-condition directions) yields an order-zero model.
pub fn reduce_split(
    sos: &SecondOrderSystem,
    factors: &GramianFactors,
    orders: [OrderSpec; 3],
) -> Result<SplitReduction> {
    let mut roms: Vec<ReducedModel> = Subsystem::ALL
        .par_iter()
        .zip(orders.par_iter())
        .map(|(&tag, &order)| {
            let scheme = Scheme::Split(tag);
            let r = factors.controllability(tag);
            if r.ncols() == 0 {
                return Ok(ReducedModel::empty(sos, scheme));
            }
            let proj = bt_project(&factors.s, r, order)?;
            let carries = Carries {
                input: tag == Subsystem::Input,
                position: tag == Subsystem::InitialPosition,
                velocity: tag == Subsystem::InitialVelocity,
            };
            Ok(project(sos, &proj, scheme, carries))
        })
        .collect::<Result<_>>()?;
    let rom_v0 = roms.pop().expect("three subsystems");
    let rom_x0 = roms.pop().expect("three subsystems");
    let rom_so = roms.pop().expect("three subsystems");
    Ok(SplitReduction { rom_so, rom_x0, rom_v0 })
}

const ALL_DATA: Carries = Carries { input: true, position: true, velocity: true };

/// Combined scheme: one projection from `P_SO + P_x0 + P_v0`; input and both
/// initial-condition bases are projected with the same `W`.
pub fn reduce_combined(sos: &SecondOrderSystem, factors: &GramianFactors, order: OrderSpec) -> Result<ReducedModel> {
    let proj = bt_project(&factors.s, &combined_factor(factors)?, order)?;
    Ok(project(sos, &proj, Scheme::Combined, ALL_DATA))
}

/// Classical second-order balanced truncation from `P_SO` and `Q_SO` alone.
///
/// Initial-condition bases are projected with the same `W` so the model can be
/// simulated from the same initial data.
pub fn reduce_homogeneous(sos: &SecondOrderSystem, order: OrderSpec) -> Result<ReducedModel> {
    let homogeneous = SecondOrderSystem::new(
        sos.mass().clone(),
        sos.damping().clone(),
        sos.stiffness().clone(),
        sos.input().clone(),
        sos.output().clone(),
    )?;
    let factors = controllability_factors(&homogeneous, GRAMIAN_FACTOR_TOL)?;
    reduce_homogeneous_with(sos, &factors, order)
}

/// [`reduce_homogeneous`] reusing already computed factors (only `R_SO` and
/// `S` are read).
pub fn reduce_homogeneous_with(
    sos: &SecondOrderSystem,
    factors: &GramianFactors,
    order: OrderSpec,
) -> Result<ReducedModel> {
    let proj = bt_project(&factors.s, &factors.r_so, order)?;
    Ok(project(sos, &proj, Scheme::Homogeneous, ALL_DATA))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn tolerance_orders() {
        assert_eq!(order_from_tolerance(&dvector![1.0, 1e-2, 1e-5], 1e-4).unwrap(), 2);
        assert_eq!(order_from_tolerance(&dvector![1.0], 1.0).unwrap(), 1);
        assert_eq!(order_from_tolerance(&dvector![1.0, 1e-4], 1e-4).unwrap(), 2);
        assert!(matches!(order_from_tolerance(&DVector::zeros(0), 1e-4), Err(Error::EmptySpectrum)));
    }

    #[test]
    fn identity_factors_give_identity_projection() {
        let i2 = DMatrix::<f64>::identity(2, 2);
        let p = bt_project(&i2, &i2, OrderSpec::Fixed(2)).unwrap();
        assert!((p.w.transpose() * &p.w - &i2).norm() < 1e-14);
        assert!((p.w.abs() - p.v.abs()).norm() < 1e-14);
        assert!((p.retained.clone() - dvector![1.0, 1.0]).norm() < 1e-14);
    }

    #[test]
    fn tied_spectrum_truncation_is_a_unit_axis() {
        let i2 = DMatrix::<f64>::identity(2, 2);
        let p = bt_project(&i2, &i2, OrderSpec::Fixed(1)).unwrap();
        // Tie: only the span is determined; W and V are the same unit vector up to sign.
        assert!((p.w.norm() - 1.0).abs() < 1e-14);
        assert!(((p.w.transpose() * &p.v)[(0, 0)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_projection_by_hand() {
        let s = DMatrix::<f64>::identity(2, 2);
        let r = dmatrix![4.0, 0.0; 0.0, 1.0];
        let p = bt_project(&s, &r, OrderSpec::Fixed(1)).unwrap();
        assert_eq!(p.retained.as_slice(), &[4.0]);
        let sign = p.w[(0, 0)].signum();
        assert!((p.w.clone() * sign - dmatrix![0.5; 0.0]).norm() < 1e-15);
        assert!((p.v.clone() * sign - dmatrix![2.0; 0.0]).norm() < 1e-15);
    }

    #[test]
    fn over_requested_order_is_rank_deficient() {
        let s = DMatrix::<f64>::identity(2, 2);
        let r = dmatrix![1.0, 0.0; 0.0, 0.0];
        assert!(matches!(
            bt_project(&s, &r, OrderSpec::Fixed(2)),
            Err(Error::RankDeficient { requested: 2, available: 1 })
        ));
    }
}
