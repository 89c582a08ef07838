//! Split balanced truncation: one reduced model per subsystem.
//!
//! Run with `cargo run --example split_reduction`.

use somor::analysis::hankel_report;
use somor::bench::{generate_msd, MsdParams};
use somor::gramians::controllability_factors;
use somor::kernels::GRAMIAN_FACTOR_TOL;
use somor::reduction::{reduce_split, OrderSpec};
use somor::system::Subsystem;

fn main() -> somor::Result<()> {
    let sos = generate_msd(100, &MsdParams::default())?;
    let factors = controllability_factors(&sos, GRAMIAN_FACTOR_TOL)?;
    let hankel = hankel_report(&factors)?;

    let split = reduce_split(&sos, &factors, [OrderSpec::Tolerance(1e-4); 3])?;
    for tag in Subsystem::ALL {
        let rom = split.get(tag);
        let sigma = hankel.get(tag);
        println!(
            "{tag}: order {:>3} of {}, sigma_1 = {:.3e}, stable = {}",
            rom.order(),
            sos.n(),
            sigma[0],
            rom.is_stable()
        );
    }
    Ok(())
}
