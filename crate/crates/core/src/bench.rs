//! Benchmark models.
//!
//! [`generate_msd`] builds a mass-spring-damper chain: `n` masses in a row,
//! each joined to its neighbours by springs, with the two end masses also
//! tied to the ground. Damping is Rayleigh-type `α M + β K` plus optional
//! dampers from each mass to the ground. The force acts on, and the output
//! observes, the last mass; the initial-condition bases are the last and the
//! first unit vector.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::svd_decompose;
use crate::reduction::{reduce_homogeneous, OrderSpec};
use crate::system::SecondOrderSystem;

/// A per-element parameter, either shared or given element by element.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Uniform(f64),
    PerElement(Vec<f64>),
}

impl Param {
    fn expand(&self, len: usize, name: &str, allow_zero: bool) -> Result<Vec<f64>> {
        let values = match self {
            Param::Uniform(v) => vec![*v; len],
            Param::PerElement(v) if v.len() == len => v.clone(),
            Param::PerElement(v) => {
                return Err(Error::InvalidParameter(format!("{name} needs {len} values, got {}", v.len())))
            }
        };
        let ok = |v: f64| v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
        if let Some(bad) = values.iter().find(|&&v| !ok(v)) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {bad}")));
        }
        Ok(values)
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Uniform(v)
    }
}

/// Chain parameters. The default is a unit chain (unit masses and springs)
/// with Rayleigh damping `D = 0.1 (M + K)` and no grounded dampers.
///
/// Springs are numbered from the left wall: spring `0`
/// ties mass `0` to the ground, spring `i` joins masses `i-1` and `i`, and
/// spring `n` ties the last mass to the ground.
#[derive(Debug, Clone, PartialEq)]
pub struct MsdParams {
    /// `n` values.
    pub masses: Param,
    /// `n + 1` values.
    pub stiffnesses: Param,
    /// Grounded dampers, `n` values; zero is allowed.
    pub dampers: Param,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for MsdParams {
    fn default() -> Self {
        Self {
            masses: Param::Uniform(1.0),
            stiffnesses: Param::Uniform(1.0),
            dampers: Param::Uniform(0.0),
            alpha: 0.1,
            beta: 0.1,
        }
    }
}

pub fn generate_msd(n: usize, params: &MsdParams) -> Result<SecondOrderSystem> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("chain needs at least 2 masses, got {n}")));
    }
    for (name, v) in [("alpha", params.alpha), ("beta", params.beta)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be nonnegative, got {v}")));
        }
    }
    let masses = params.masses.expand(n, "masses", false)?;
    let springs = params.stiffnesses.expand(n + 1, "stiffnesses", false)?;
    let dampers = params.dampers.expand(n, "dampers", true)?;

    let m = DMatrix::from_diagonal(&DVector::from_vec(masses));
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = springs[i] + springs[i + 1];
        if i + 1 < n {
            k[(i, i + 1)] = -springs[i + 1];
            k[(i + 1, i)] = -springs[i + 1];
        }
    }
    let d = &m * params.alpha + &k * params.beta + DMatrix::from_diagonal(&DVector::from_vec(dampers));

    let unit = |i: usize| DMatrix::from_fn(n, 1, |r, _| if r == i { 1.0 } else { 0.0 });
    SecondOrderSystem::new(m, d, k, unit(n - 1), unit(n - 1).transpose())?
        .with_initial_position_basis(unit(n - 1))?
        .with_initial_velocity_basis(unit(0))
}

/// Relative threshold for the numerical rank of a projection basis.
pub const PROJECTION_RANK_TOL: f64 = 1e-12;

/// A unit vector orthogonal to the range of `w`.
///
/// Takes the full SVD `w = U Σ Xᵀ`, counts `ℓ = #{σᵢ > σ₁·1e-12}` and returns
/// column `ℓ + 1` of `U`. Used to place the initial state of the building
/// benchmark outside the subspace the input-driven reduction already sees.
pub fn building_init_from_projection(w: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = w.nrows();
    if n == 0 {
        return Err(Error::FullRank(0));
    }
    let rank = if w.ncols() == 0 {
        0
    } else {
        let s = svd_decompose(w)?;
        let top = s.sigma.get(0).copied().unwrap_or(0.0);
        s.sigma.iter().filter(|&&x| x > top * PROJECTION_RANK_TOL).count()
    };
    if rank >= n {
        return Err(Error::FullRank(rank));
    }
    // A square matrix with the same range makes the thin SVD return a full U.
    let square = if w.ncols() > n {
        w * w.transpose()
    } else {
        let mut padded = DMatrix::zeros(n, n);
        padded.columns_mut(0, w.ncols()).copy_from(w);
        padded
    };
    let full = svd_decompose(&square)?;
    Ok(full.u.column(rank).clone_owned())
}

/// Building-benchmark setup: `X0 = V0 = u`, where `u` is the unit vector of
/// [`building_init_from_projection`] applied to the `W` of an order-`r`
/// homogeneous balanced truncation of `sos`.
pub fn with_building_initial_conditions(sos: &SecondOrderSystem, r: usize) -> Result<SecondOrderSystem> {
    let w = reduce_homogeneous(sos, OrderSpec::Fixed(r))?.w;
    let u = building_init_from_projection(&w)?;
    let basis = DMatrix::from_column_slice(u.len(), 1, u.as_slice());
    sos.clone().with_initial_position_basis(basis.clone())?.with_initial_velocity_basis(basis)
}
