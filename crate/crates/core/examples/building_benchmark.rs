//! The building experiment on user-supplied data.
//!
//! The building model (n = 24, one input, one output) is not shipped with
//! this crate. Convert its `M`, `D`, `K`, `B`, `C` to Matrix Market files and
//! write a manifest naming them (no `X0`/`V0`), then run
//!
//! ```text
//! cargo run --example building_benchmark -- path/to/manifest.toml
//! ```
//!
//! The initial position and velocity are both set to the first left singular
//! vector outside the range of the order-10 homogeneous projection `W`, every
//! scheme uses order 10, and the input is `u(t) = 0.2 e^{-t}`.

use nalgebra::dvector;
use somor::analysis::{bound_combined, bound_split};
use somor::bench::with_building_initial_conditions;
use somor::gramians::controllability_factors;
use somor::io::read_manifest;
use somor::kernels::GRAMIAN_FACTOR_TOL;
use somor::reduction::{reduce_combined, reduce_homogeneous_with, reduce_split, OrderSpec};
use somor::simulate::{l2_error_integral, simulate_rom, simulate_split, simulate_system, InputSignal, TimeGrid};

const ORDER: usize = 10;

fn main() -> somor::Result<()> {
    let Some(path) = std::env::args().nth(1) else {
        eprintln!("usage: building_benchmark <manifest.toml>");
        std::process::exit(1);
    };
    let manifest = read_manifest(path)?;
    let sos = with_building_initial_conditions(&manifest.system, ORDER)?;
    let factors = controllability_factors(&sos, GRAMIAN_FACTOR_TOL)?;
    let split = reduce_split(&sos, &factors, [OrderSpec::Fixed(ORDER); 3])?;
    let combined = reduce_combined(&sos, &factors, OrderSpec::Fixed(ORDER))?;
    let homogeneous = reduce_homogeneous_with(&sos, &factors, OrderSpec::Fixed(ORDER))?;

    let u = InputSignal::Exponential { alpha: 0.2, beta: -1.0 };
    let u_hinf = u.hinf_norm(sos.inputs())?.expect("closed form");
    let (z0, w0) = (dvector![1.0], dvector![1.0]);
    println!("bound_split    = {:.4e}", bound_split(&sos, &split, u_hinf, &z0, &w0)?.total);
    println!("bound_combined = {:.4e}", bound_combined(&sos, &combined, u_hinf, &z0, &w0)?.total);

    let grid = TimeGrid::new(0.0, 20.0, 1e-3)?;
    let y = simulate_system(&sos, &z0, &w0, &u, &grid)?;
    let err = |y_hat| l2_error_integral(&y, &y_hat).map(|e| e.last());
    println!("L2 error ROM_SPL = {:.4e}", err(simulate_split(&split, &z0, &w0, &u, &grid)?)?);
    println!("L2 error ROM_COM = {:.4e}", err(simulate_rom(&combined, &z0, &w0, &u, &grid)?)?);
    println!("L2 error ROM_HOM = {:.4e}", err(simulate_rom(&homogeneous, &z0, &w0, &u, &grid)?)?);
    Ok(())
}
