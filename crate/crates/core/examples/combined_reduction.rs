//! One reduced model from the summed Gramian `P_SO + P_x0 + P_v0`,
//! compared with classical balanced truncation that ignores the initial
//! conditions.
//!
//! Run with `cargo run --example combined_reduction`.

use somor::bench::{generate_msd, MsdParams};
use somor::gramians::controllability_factors;
use somor::kernels::GRAMIAN_FACTOR_TOL;
use somor::reduction::{reduce_combined, reduce_homogeneous_with, OrderSpec};
use somor::simulate::{l2_error_integral, simulate_rom, simulate_system, InputSignal, TimeGrid};

fn main() -> somor::Result<()> {
    let sos = generate_msd(100, &MsdParams::default())?;
    let factors = controllability_factors(&sos, GRAMIAN_FACTOR_TOL)?;
    let order = OrderSpec::Tolerance(1e-4);
    let combined = reduce_combined(&sos, &factors, order)?;
    let homogeneous = reduce_homogeneous_with(&sos, &factors, order)?;

    let u = InputSignal::Exponential { alpha: 0.2, beta: -1.0 };
    let grid = TimeGrid::new(0.0, 20.0, 1e-3)?;
    let (z0, w0) = (nalgebra::dvector![1.0], nalgebra::dvector![1.0]);
    let y = simulate_system(&sos, &z0, &w0, &u, &grid)?;
    for (name, rom) in [("combined", &combined), ("homogeneous", &homogeneous)] {
        let y_hat = simulate_rom(rom, &z0, &w0, &u, &grid)?;
        let err = l2_error_integral(&y, &y_hat)?;
        println!("{name:>11}: order {:>3}, L2 error on [0, 20] = {:.3e}", rom.order(), err.last());
    }
    Ok(())
}
