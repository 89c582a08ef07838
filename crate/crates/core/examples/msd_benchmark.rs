//! The mass-spring-damper experiment: three reduction methods at one
//! Hankel tolerance, their simulated L2 errors and error bounds.
//!
//! Run with `cargo run --release --example msd_benchmark -- [n] [tol]`
//! (defaults: n = 200, tol = 1e-4).

use nalgebra::dvector;
use somor::analysis::{bound_combined, bound_split};
use somor::bench::{generate_msd, MsdParams};
use somor::gramians::controllability_factors;
use somor::kernels::GRAMIAN_FACTOR_TOL;
use somor::reduction::{reduce_combined, reduce_homogeneous_with, reduce_split, OrderSpec};
use somor::simulate::{l2_error_integral, simulate_rom, simulate_split, simulate_system, InputSignal, TimeGrid};

fn main() -> somor::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);
    let tol: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1e-4);

    let sos = generate_msd(n, &MsdParams::default())?;
    let factors = controllability_factors(&sos, GRAMIAN_FACTOR_TOL)?;
    let order = OrderSpec::Tolerance(tol);
    let split = reduce_split(&sos, &factors, [order; 3])?;
    let combined = reduce_combined(&sos, &factors, order)?;
    let homogeneous = reduce_homogeneous_with(&sos, &factors, order)?;

    let u = InputSignal::Exponential { alpha: 0.2, beta: -1.0 };
    let u_hinf = u.hinf_norm(1)?.expect("closed form");
    let (z0, w0) = (dvector![1.0], dvector![1.0]);
    let grid = TimeGrid::new(0.0, 20.0, 1e-3)?;
    let y = simulate_system(&sos, &z0, &w0, &u, &grid)?;

    let e_spl = l2_error_integral(&y, &simulate_split(&split, &z0, &w0, &u, &grid)?)?.last();
    let e_com = l2_error_integral(&y, &simulate_rom(&combined, &z0, &w0, &u, &grid)?)?.last();
    let e_hom = l2_error_integral(&y, &simulate_rom(&homogeneous, &z0, &w0, &u, &grid)?)?.last();
    let b_spl = bound_split(&sos, &split, u_hinf, &z0, &w0)?.total;
    let b_com = bound_combined(&sos, &combined, u_hinf, &z0, &w0)?.total;

    println!("n = {n}, tol = {tol:e}");
    println!(
        "ROM_SPL orders {}/{}/{}: L2 error {e_spl:.4e}, bound {b_spl:.4e}",
        split.rom_so.order(),
        split.rom_x0.order(),
        split.rom_v0.order()
    );
    println!("ROM_COM order {}: L2 error {e_com:.4e}, bound {b_com:.4e}", combined.order());
    println!("ROM_HOM order {}: L2 error {e_hom:.4e}", homogeneous.order());
    Ok(())
}
