//! Shared test fixtures and independent oracles.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use somor::system::{Complex64, SecondOrderSystem, Subsystem};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// `G Gᵀ / n + shift·I`.
pub fn spd(rng: &mut StdRng, n: usize, shift: f64) -> DMatrix<f64> {
    let g = random_matrix(rng, n, n);
    &g * g.transpose() / n as f64 + DMatrix::identity(n, n) * shift
}

/// Random system with SPD `M`, `D`, `K` (hence asymptotically stable),
/// `k0` initial-position and `k1` initial-velocity directions.
pub fn random_system(rng: &mut StdRng, n: usize, m: usize, p: usize, k0: usize, k1: usize) -> SecondOrderSystem {
    let mass = spd(rng, n, 1.0);
    let damping = spd(rng, n, 0.2);
    let stiffness = spd(rng, n, 0.5);
    SecondOrderSystem::new(mass, damping, stiffness, random_matrix(rng, n, m), random_matrix(rng, p, n))
        .unwrap()
        .with_initial_position_basis(random_matrix(rng, n, k0))
        .unwrap()
        .with_initial_velocity_basis(random_matrix(rng, n, k1))
        .unwrap()
}

pub fn random_vector(rng: &mut StdRng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// Solves `A X Eᵀ + E X Aᵀ + F Fᵀ = 0` through its Kronecker form.
pub fn kron_lyapunov(e: &DMatrix<f64>, a: &DMatrix<f64>, f: &DMatrix<f64>) -> DMatrix<f64> {
    kron_sylvester(e, a, f, e, a, f)
}

/// Solves `A X Ê ᵀ + E X Âᵀ + B B̂ᵀ = 0` through its Kronecker form.
pub fn kron_sylvester(
    e: &DMatrix<f64>,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    e_r: &DMatrix<f64>,
    a_r: &DMatrix<f64>,
    b_r: &DMatrix<f64>,
) -> DMatrix<f64> {
    let (n, r) = (a.nrows(), a_r.nrows());
    let op = e_r.kronecker(a) + a_r.kronecker(e);
    let rhs = -(b * b_r.transpose());
    let rhs = DVector::from_column_slice(rhs.as_slice());
    let x = op.lu().solve(&rhs).expect("Kronecker operator is nonsingular");
    DMatrix::from_column_slice(n, r, x.as_slice())
}

/// `(1/2π) ∫_{-∞}^{∞} f(ω) dω` for even `f`, via `ω = tan θ` and
/// double-exponential quadrature on panels of `[0, π/2)`.
pub fn frequency_integral(f: impl Fn(f64) -> f64) -> f64 {
    const PANELS: usize = 64;
    let g = |theta: f64| {
        let w = theta.tan();
        f(w) * (1.0 + w * w)
    };
    let width = std::f64::consts::FRAC_PI_2 / PANELS as f64;
    let total: f64 =
        (0..PANELS).map(|i| quadrature::integrate(g, i as f64 * width, (i + 1) as f64 * width, 1e-13).integral).sum();
    total / std::f64::consts::PI
}

/// Position response `(s²M + sD + K)⁻¹ N(s)` to one subsystem's input,
/// evaluated by a direct complex solve.
pub fn position_response(sos: &SecondOrderSystem, tag: Subsystem, s: Complex64) -> DMatrix<Complex64> {
    let c = |a: &DMatrix<f64>| a.map(|v| Complex64::new(v, 0.0));
    let (m, d, k) = (c(sos.mass()), c(sos.damping()), c(sos.stiffness()));
    let pencil = &m * (s * s) + &d * s + &k;
    let rhs = match tag {
        Subsystem::Input => c(sos.input()),
        Subsystem::InitialPosition => (&m * s + &d) * c(sos.position_basis()),
        Subsystem::InitialVelocity => &m * c(sos.velocity_basis()),
    };
    pencil.lu().solve(&rhs).expect("pencil is regular on the imaginary axis")
}

/// Output response `C (s²M + sD + K)⁻¹ N(s)`.
pub fn output_response(sos: &SecondOrderSystem, tag: Subsystem, s: Complex64) -> DMatrix<Complex64> {
    sos.output().map(|v| Complex64::new(v, 0.0)) * position_response(sos, tag, s)
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
