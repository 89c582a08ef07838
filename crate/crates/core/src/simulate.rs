//! Fixed-step time simulation of second-order systems.
//!
//! The companion system `E z' = A z + B u` is integrated with the implicit
//! trapezoidal rule
//!
//! ```text
//! (E − h/2 A) z_{k+1} = (E + h/2 A) z_k + h/2 B (u_k + u_{k+1})
//! ```
//!
//! which is A-stable and second-order accurate. The step matrix is factored
//! once per simulation.

use nalgebra::{DMatrix, DVector};

use crate::analysis::hinf_exp_input;
use crate::error::{Error, Result};
use crate::kernels::LinearSolver;
use crate::reduction::{ReducedModel, SplitReduction};
use crate::system::SecondOrderSystem;

/// Default horizon and step used when none is configured.
pub const DEFAULT_T_END: f64 = 20.0;
pub const DEFAULT_STEP: f64 = 1e-3;

/// Uniform grid `t0, t0 + h, …, t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    h: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t_end: f64, h: f64) -> Result<Self> {
        if !t0.is_finite() || !t_end.is_finite() || h.is_nan() || h <= 0.0 || t_end <= t0 {
            return Err(Error::InvalidParameter(format!(
                "time grid needs t_end > t0 and h > 0 (got t0={t0}, t_end={t_end}, h={h})"
            )));
        }
        let span = t_end - t0;
        let steps = (span / h).round();
        if steps < 1.0 || (steps * h - span).abs() > 1e-9 * span {
            return Err(Error::InvalidParameter(format!("horizon {span} is not a whole number of steps of size {h}")));
        }
        Ok(Self { t0, h, steps: steps as usize })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn t_end(&self) -> f64 {
        self.time(self.steps)
    }
    pub fn step(&self) -> f64 {
        self.h
    }
    pub fn steps(&self) -> usize {
        self.steps
    }
    /// Number of sample points, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.h
    }
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.time(i))
    }
}

/// Output samples on a grid; column `k` holds `y(t_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub samples: DMatrix<f64>,
}

impl Trajectory {
    pub fn zeros(grid: TimeGrid, outputs: usize) -> Self {
        Self { grid, samples: DMatrix::zeros(outputs, grid.len()) }
    }

    pub fn outputs(&self) -> usize {
        self.samples.nrows()
    }

    /// Value at the last grid point (first output channel).
    pub fn last(&self) -> f64 {
        self.samples[(0, self.samples.ncols() - 1)]
    }
}

/// Input signals, applied identically to every input channel.
///
/// The closed-form kinds carry enough information for the error bounds to
/// obtain `‖U‖_H∞`.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSignal {
    Zero,
    /// `u(t) = alpha · e^{beta t}`.
    Exponential {
        alpha: f64,
        beta: f64,
    },
    /// Piecewise-linear interpolation of `values[i]` at `times[i]`, held
    /// constant outside the table.
    Tabulated {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

impl InputSignal {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            InputSignal::Zero => 0.0,
            InputSignal::Exponential { alpha, beta } => alpha * (beta * t).exp(),
            InputSignal::Tabulated { times, values } => {
                if times.is_empty() {
                    return 0.0;
                }
                let i = times.partition_point(|&x| x <= t);
                if i == 0 {
                    values[0]
                } else if i == times.len() {
                    values[times.len() - 1]
                } else {
                    let (ta, tb) = (times[i - 1], times[i]);
                    let w = (t - ta) / (tb - ta);
                    values[i - 1] * (1.0 - w) + values[i] * w
                }
            }
        }
    }

    /// `u(t)` replicated over `channels` inputs.
    pub fn eval(&self, t: f64, channels: usize) -> DVector<f64> {
        DVector::from_element(channels, self.value(t))
    }

    /// `sup_ω ‖U(iω)‖₂` for `channels` identical channels, when known in closed form.
    pub fn hinf_norm(&self, channels: usize) -> Result<Option<f64>> {
        match self {
            InputSignal::Zero => Ok(Some(0.0)),
            InputSignal::Exponential { alpha, beta } => {
                Ok(Some(hinf_exp_input(*alpha, *beta)? * (channels as f64).sqrt()))
            }
            InputSignal::Tabulated { .. } => Ok(None),
        }
    }
}

/// Simulates `M x'' + D x' + K x = B u`, `y = C x` from `x(0) = x0`,
/// `x'(0) = v0`.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    m: &DMatrix<f64>,
    d: &DMatrix<f64>,
    k: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    x0: &DVector<f64>,
    v0: &DVector<f64>,
    u: &InputSignal,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Trajectory::zeros(*grid, c.nrows()));
    }
    if x0.len() != n || v0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "initial state has lengths {} and {}, system order is {n}",
            x0.len(),
            v0.len()
        )));
    }
    let h = grid.step();
    let half = 0.5 * h;
    let nn = 2 * n;

    // E − h/2 A and E + h/2 A for E = [I 0; 0 M], A = [0 I; −K −D].
    let mut lhs = DMatrix::zeros(nn, nn);
    let mut rhs = DMatrix::zeros(nn, nn);
    for i in 0..n {
        lhs[(i, i)] = 1.0;
        rhs[(i, i)] = 1.0;
        lhs[(i, n + i)] = -half;
        rhs[(i, n + i)] = half;
    }
    lhs.view_mut((n, 0), (n, n)).copy_from(&(k * half));
    lhs.view_mut((n, n), (n, n)).copy_from(&(m + d * half));
    rhs.view_mut((n, 0), (n, n)).copy_from(&(k * -half));
    rhs.view_mut((n, n), (n, n)).copy_from(&(m - d * half));

    let solver = LinearSolver::new(lhs, "trapezoidal step").map_err(|_| Error::SingularStepMatrix)?;
    let phi = solver.solve(&rhs)?;
    let mut b_fo = DMatrix::zeros(nn, b.ncols());
    b_fo.view_mut((n, 0), (n, b.ncols())).copy_from(&(b * half));
    let gamma = solver.solve(&b_fo)?;

    let mut z = DVector::zeros(nn);
    z.rows_mut(0, n).copy_from(x0);
    z.rows_mut(n, n).copy_from(v0);
    let mut next = DVector::zeros(nn);
    let mut out = DMatrix::zeros(c.nrows(), grid.len());
    out.set_column(0, &(c * z.rows(0, n)));

    let channels = b.ncols();
    let driven = channels > 0 && *u != InputSignal::Zero;
    let mut u_prev = u.eval(grid.time(0), channels);
    for step in 1..grid.len() {
        next.gemv(1.0, &phi, &z, 0.0);
        if driven {
            let u_next = u.eval(grid.time(step), channels);
            next.gemv(1.0, &gamma, &(&u_prev + &u_next), 1.0);
            u_prev = u_next;
        }
        std::mem::swap(&mut z, &mut next);
        out.set_column(step, &(c * z.rows(0, n)));
    }
    if !out.iter().all(|v| v.is_finite()) {
        return Err(Error::NumericalInconsistency("simulation produced non-finite output".into()));
    }
    Ok(Trajectory { grid: *grid, samples: out })
}

/// Simulates a system from `x(0) = X0 z0`, `x'(0) = V0 w0`.
pub fn simulate_system(
    sos: &SecondOrderSystem,
    z0: &DVector<f64>,
    w0: &DVector<f64>,
    u: &InputSignal,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let (x0, v0) = initial_state(sos.position_basis(), sos.velocity_basis(), z0, w0)?;
    simulate(sos.mass(), sos.damping(), sos.stiffness(), sos.input(), sos.output(), &x0, &v0, u, grid)
}

/// Simulates a reduced model from `x_r(0) = X̂0 z0`, `x_r'(0) = V̂0 w0`.
///
/// Data a model does not carry (zero-column `B̂`, `X̂0` or `V̂0`) contributes
/// nothing; the corresponding coefficients are ignored.
pub fn simulate_rom(
    rom: &ReducedModel,
    z0: &DVector<f64>,
    w0: &DVector<f64>,
    u: &InputSignal,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    if rom.order() == 0 {
        return Ok(Trajectory::zeros(*grid, rom.outputs()));
    }
    let pick = |basis: &DMatrix<f64>, coeff: &DVector<f64>| {
        if basis.ncols() == 0 {
            DVector::zeros(0)
        } else {
            coeff.clone()
        }
    };
    let (x0, v0) = initial_state(&rom.x0, &rom.v0, &pick(&rom.x0, z0), &pick(&rom.v0, w0))?;
    simulate(&rom.m, &rom.d, &rom.k, &rom.b, &rom.c, &x0, &v0, u, grid)
}

/// Output of the split scheme: the sum of its three reduced responses.
pub fn simulate_split(
    split: &SplitReduction,
    z0: &DVector<f64>,
    w0: &DVector<f64>,
    u: &InputSignal,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let y_so = simulate_rom(&split.rom_so, z0, w0, u, grid)?;
    let y_x0 = simulate_rom(&split.rom_x0, z0, w0, u, grid)?;
    let y_v0 = simulate_rom(&split.rom_v0, z0, w0, u, grid)?;
    superpose(&y_so, &y_x0, &y_v0)
}

fn initial_state(
    x_basis: &DMatrix<f64>,
    v_basis: &DMatrix<f64>,
    z0: &DVector<f64>,
    w0: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    if z0.len() != x_basis.ncols() || w0.len() != v_basis.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "coefficients have lengths {} and {}, bases have {} and {} columns",
            z0.len(),
            w0.len(),
            x_basis.ncols(),
            v_basis.ncols()
        )));
    }
    Ok((x_basis * z0, v_basis * w0))
}

/// Pointwise sum `y_SO + y_x0 + y_v0`.
pub fn superpose(a: &Trajectory, b: &Trajectory, c: &Trajectory) -> Result<Trajectory> {
    if a.grid != b.grid || a.grid != c.grid {
        return Err(Error::GridMismatch);
    }
    if a.outputs() != b.outputs() || a.outputs() != c.outputs() {
        return Err(Error::DimensionMismatch("trajectories have different output counts".into()));
    }
    Ok(Trajectory { grid: a.grid, samples: &a.samples + &b.samples + &c.samples })
}

/// Running `sqrt(∫_{t0}^{t} ‖y − ŷ‖² dτ)` by the cumulative trapezoidal rule.
pub fn l2_error_integral(y: &Trajectory, y_hat: &Trajectory) -> Result<Trajectory> {
    if y.grid != y_hat.grid {
        return Err(Error::GridMismatch);
    }
    if y.outputs() != y_hat.outputs() {
        return Err(Error::DimensionMismatch("trajectories have different output counts".into()));
    }
    let diff = &y.samples - &y_hat.samples;
    let h = y.grid.step();
    let mut out = DMatrix::zeros(1, y.grid.len());
    let mut acc = 0.0;
    let mut prev = diff.column(0).norm_squared();
    for k in 1..y.grid.len() {
        let cur = diff.column(k).norm_squared();
        acc += 0.5 * h * (prev + cur);
        out[(0, k)] = acc.sqrt();
        prev = cur;
    }
    Ok(Trajectory { grid: y.grid, samples: out })
}
