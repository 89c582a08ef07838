//! Second-order systems, their companion first-order realization and the
//! three transfer functions an inhomogeneous response splits into.
//!
//! A second-order system
//!
//! ```text
//! M x'' + D x' + K x = B u,   y = C x,   x(0) = X0 z0,   x'(0) = V0 w0
//! ```
//!
//! has output `y = y_SO + y_x0 + y_v0`, driven respectively by the input, the
//! initial position and the initial velocity. In the Laplace domain, with
//! `Λ(s) = (s²M + sD + K)⁻¹`:
//!
//! ```text
//! H_SO(s) = C Λ(s) B,   H_x0(s) = C Λ(s) (D + sM) X0,   H_v0(s) = C Λ(s) M V0.
//! ```

use std::fmt;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::kernels::{ensure_finite, real_schur, LinearSolver};

pub type Complex64 = Complex<f64>;

/// Which part of the superposed response a quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    /// Input to output with zero initial conditions.
    Input,
    /// Initial position to output with zero input.
    InitialPosition,
    /// Initial velocity to output with zero input.
    InitialVelocity,
}

impl Subsystem {
    pub const ALL: [Subsystem; 3] = [Subsystem::Input, Subsystem::InitialPosition, Subsystem::InitialVelocity];

    /// Short label used in file names and reports.
    pub fn label(self) -> &'static str {
        match self {
            Subsystem::Input => "so",
            Subsystem::InitialPosition => "x0",
            Subsystem::InitialVelocity => "v0",
        }
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `M x'' + D x' + K x = B u`, `y = C x`, with initial data in `span(X0)` and
/// `span(V0)`.
///
/// Immutable once built. Stability is not enforced here because reduced
/// models (which may lose it) share the type; Gramian computations check it
/// eagerly instead, see [`SecondOrderSystem::stability`].
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderSystem {
    m: DMatrix<f64>,
    d: DMatrix<f64>,
    k: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    x0: DMatrix<f64>,
    v0: DMatrix<f64>,
}

impl SecondOrderSystem {
    /// Builds a system with empty initial-condition bases.
    pub fn new(m: DMatrix<f64>, d: DMatrix<f64>, k: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if n == 0 || !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "M is {}x{}, expected a nonempty square matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        for (name, mat) in [("D", &d), ("K", &k)] {
            if mat.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!(
                    "{name} vs M: {name} is {}x{}, M is {n}x{n}",
                    mat.nrows(),
                    mat.ncols()
                )));
            }
        }
        if b.nrows() != n {
            return Err(Error::DimensionMismatch(format!("B vs M: B has {} rows, M has {n}", b.nrows())));
        }
        if c.ncols() != n {
            return Err(Error::DimensionMismatch(format!("C vs M: C has {} columns, M has {n}", c.ncols())));
        }
        for (name, mat) in [("M", &m), ("D", &d), ("K", &k), ("B", &b), ("C", &c)] {
            ensure_finite(mat, name)?;
        }
        LinearSolver::new(m.clone(), "mass matrix M")?;
        Ok(Self { x0: DMatrix::zeros(n, 0), v0: DMatrix::zeros(n, 0), m, d, k, b, c })
    }

    pub fn with_initial_position_basis(mut self, x0: DMatrix<f64>) -> Result<Self> {
        if x0.nrows() != self.n() {
            return Err(Error::DimensionMismatch(format!("X0 vs M: X0 has {} rows, M has {}", x0.nrows(), self.n())));
        }
        ensure_finite(&x0, "X0")?;
        self.x0 = x0;
        Ok(self)
    }

    pub fn with_initial_velocity_basis(mut self, v0: DMatrix<f64>) -> Result<Self> {
        if v0.nrows() != self.n() {
            return Err(Error::DimensionMismatch(format!("V0 vs M: V0 has {} rows, M has {}", v0.nrows(), self.n())));
        }
        ensure_finite(&v0, "V0")?;
        self.v0 = v0;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }
    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }
    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }
    pub fn mass(&self) -> &DMatrix<f64> {
        &self.m
    }
    pub fn damping(&self) -> &DMatrix<f64> {
        &self.d
    }
    pub fn stiffness(&self) -> &DMatrix<f64> {
        &self.k
    }
    pub fn input(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn output(&self) -> &DMatrix<f64> {
        &self.c
    }
    pub fn position_basis(&self) -> &DMatrix<f64> {
        &self.x0
    }
    pub fn velocity_basis(&self) -> &DMatrix<f64> {
        &self.v0
    }

    /// Number of columns driving the given subsystem (`m`, `n_x0` or `n_v0`).
    pub fn subsystem_width(&self, tag: Subsystem) -> usize {
        match tag {
            Subsystem::Input => self.b.ncols(),
            Subsystem::InitialPosition => self.x0.ncols(),
            Subsystem::InitialVelocity => self.v0.ncols(),
        }
    }

    /// Stability of the quadratic pencil, via its companion form.
    pub fn stability(&self) -> Result<Stability> {
        stability_check(&companion(self))
    }
}

/// `E z' = A z + B u`, `y = C z`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderSystem {
    pub e: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

impl FirstOrderSystem {
    pub fn new(e: DMatrix<f64>, a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() || e.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "E is {}x{}, A is {}x{}; both must be square and equal",
                e.nrows(),
                e.ncols(),
                a.nrows(),
                a.ncols()
            )));
        }
        if b.nrows() != n || c.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows and C has {} columns, state dimension is {n}",
                b.nrows(),
                c.ncols()
            )));
        }
        for (name, mat) in [("E", &e), ("A", &a), ("B", &b), ("C", &c)] {
            ensure_finite(mat, name)?;
        }
        Ok(Self { e, a, b, c })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// Same pencil and output, different input matrix.
    pub fn with_input(&self, b: DMatrix<f64>) -> Result<Self> {
        Self::new(self.e.clone(), self.a.clone(), b, self.c.clone())
    }

    /// `C (sE − A)⁻¹ B`.
    pub fn transfer(&self, s: Complex64) -> Result<DMatrix<Complex64>> {
        let pencil = self.e.map(|v| Complex64::new(v, 0.0)) * s - self.a.map(|v| Complex64::new(v, 0.0));
        let solver = LinearSolver::new(pencil, "sE - A").map_err(|_| Error::SingularPencil { re: s.re, im: s.im })?;
        let x = solver.solve(&self.b.map(|v| Complex64::new(v, 0.0)))?;
        Ok(self.c.map(|v| Complex64::new(v, 0.0)) * x)
    }
}

/// Result of a stability test: whether every finite eigenvalue of the pencil
/// has negative real part, and the largest real part found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub stable: bool,
    pub abscissa: f64,
}

/// Companion realization `E = [I 0; 0 M]`, `A = [0 I; −K −D]`, `B = [0; B]`,
/// `C = [C 0]`.
pub fn companion(sos: &SecondOrderSystem) -> FirstOrderSystem {
    let n = sos.n();
    let mut e = DMatrix::identity(2 * n, 2 * n);
    e.view_mut((n, n), (n, n)).copy_from(&sos.m);
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, n), (n, n)).fill_with_identity();
    a.view_mut((n, 0), (n, n)).copy_from(&(-&sos.k));
    a.view_mut((n, n), (n, n)).copy_from(&(-&sos.d));
    let b = subsystem_input_matrix(sos, Subsystem::Input);
    let mut c = DMatrix::zeros(sos.outputs(), 2 * n);
    c.view_mut((0, 0), (sos.outputs(), n)).copy_from(&sos.c);
    FirstOrderSystem { e, a, b, c }
}

/// Companion-form input matrix of a subsystem: `[0; B]`, `[X0; 0]` or `[0; M V0]`.
///
/// With these inputs the companion transfer function `C_fo (sE − A)⁻¹ B_fo`
/// reproduces `H_SO`, `H_x0` and `H_v0` respectively. They are also `E z(0)`
/// for the initial states `[X0 z0; 0]` and `[0; V0 w0]`.
pub fn subsystem_input_matrix(sos: &SecondOrderSystem, tag: Subsystem) -> DMatrix<f64> {
    let n = sos.n();
    let width = sos.subsystem_width(tag);
    let mut out = DMatrix::zeros(2 * n, width);
    match tag {
        Subsystem::Input => out.view_mut((n, 0), (n, width)).copy_from(&sos.b),
        Subsystem::InitialPosition => out.view_mut((0, 0), (n, width)).copy_from(&sos.x0),
        Subsystem::InitialVelocity => out.view_mut((n, 0), (n, width)).copy_from(&(&sos.m * &sos.v0)),
    }
    out
}

/// Stacked input `[0 X0 0; B 0 M V0]` driving all three subsystems at once.
pub fn combined_input_matrix(sos: &SecondOrderSystem) -> DMatrix<f64> {
    let blocks: Vec<DMatrix<f64>> = Subsystem::ALL.iter().map(|&t| subsystem_input_matrix(sos, t)).collect();
    let width: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(2 * sos.n(), width);
    let mut col = 0;
    for b in &blocks {
        out.view_mut((0, col), (b.nrows(), b.ncols())).copy_from(b);
        col += b.ncols();
    }
    out
}

/// Evaluates `H_SO`, `H_x0` or `H_v0` at `s` with one dense solve against
/// `s²M + sD + K`.
pub fn eval_transfer(sos: &SecondOrderSystem, tag: Subsystem, s: Complex64) -> Result<DMatrix<Complex64>> {
    let cx = |m: &DMatrix<f64>| m.map(|v| Complex64::new(v, 0.0));
    let (m, d, k) = (cx(&sos.m), cx(&sos.d), cx(&sos.k));
    let quad = &m * (s * s) + &d * s + &k;
    let rhs = match tag {
        Subsystem::Input => cx(&sos.b),
        Subsystem::InitialPosition => (&d + &m * s) * cx(&sos.x0),
        Subsystem::InitialVelocity => &m * cx(&sos.v0),
    };
    let solver = LinearSolver::new(quad, "s²M + sD + K").map_err(|_| Error::SingularPencil { re: s.re, im: s.im })?;
    Ok(cx(&sos.c) * solver.solve(&rhs)?)
}

/// Eigenvalues of `E⁻¹A`: stable iff the spectral abscissa is negative.
pub fn stability_check(fos: &FirstOrderSystem) -> Result<Stability> {
    let a = LinearSolver::new(fos.e.clone(), "descriptor matrix E")?.solve(&fos.a)?;
    let (_, t) = real_schur(&a)?;
    let abscissa = quasi_triangular_eigenvalues(&t).iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(Stability { stable: abscissa < 0.0, abscissa })
}

/// Eigenvalues read off the 1x1 and 2x2 diagonal blocks of a real Schur form.
pub(crate) fn quasi_triangular_eigenvalues(t: &DMatrix<f64>) -> Vec<Complex64> {
    let n = t.nrows();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half_tr = 0.5 * (a + d);
            let disc = 0.25 * (a - d) * (a - d) + b * c;
            if disc >= 0.0 {
                out.push(Complex64::new(half_tr + disc.sqrt(), 0.0));
                out.push(Complex64::new(half_tr - disc.sqrt(), 0.0));
            } else {
                out.push(Complex64::new(half_tr, (-disc).sqrt()));
                out.push(Complex64::new(half_tr, -(-disc).sqrt()));
            }
            i += 2;
        } else {
            out.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
        }
    }
    out
}
