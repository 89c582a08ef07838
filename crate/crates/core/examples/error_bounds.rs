//! A-posteriori L2 error bounds next to the simulated errors they bound.
//!
//! Run with `cargo run --example error_bounds`.

use nalgebra::dvector;
use somor::analysis::{bound_combined, bound_split};
use somor::bench::{generate_msd, MsdParams};
use somor::gramians::controllability_factors;
use somor::kernels::GRAMIAN_FACTOR_TOL;
use somor::reduction::{reduce_combined, reduce_split, OrderSpec};
use somor::simulate::{l2_error_integral, simulate_rom, simulate_split, simulate_system, InputSignal, TimeGrid};

fn main() -> somor::Result<()> {
    let sos = generate_msd(120, &MsdParams::default())?;
    let factors = controllability_factors(&sos, GRAMIAN_FACTOR_TOL)?;
    let split = reduce_split(&sos, &factors, [OrderSpec::Fixed(12); 3])?;
    let combined = reduce_combined(&sos, &factors, OrderSpec::Fixed(12))?;

    let u = InputSignal::Exponential { alpha: 0.2, beta: -1.0 };
    let u_hinf = u.hinf_norm(sos.inputs())?.expect("closed form");
    let (z0, w0) = (dvector![1.0], dvector![0.5]);
    let grid = TimeGrid::new(0.0, 20.0, 1e-3)?;
    let y = simulate_system(&sos, &z0, &w0, &u, &grid)?;

    let report = bound_split(&sos, &split, u_hinf, &z0, &w0)?;
    for term in &report.terms {
        println!("split {:>2}: H2 error {:.3e} x amplitude {:.3}", term.label, term.h2_error, term.amplitude);
    }
    let err = l2_error_integral(&y, &simulate_split(&split, &z0, &w0, &u, &grid)?)?.last();
    println!("split    : bound {:.3e} >= error {:.3e}", report.total, err);

    let report = bound_combined(&sos, &combined, u_hinf, &z0, &w0)?;
    let err = l2_error_integral(&y, &simulate_rom(&combined, &z0, &w0, &u, &grid)?)?.last();
    println!("combined : bound {:.3e} >= error {:.3e}", report.total, err);
    Ok(())
}
