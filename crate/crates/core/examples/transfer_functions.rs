//! Frequency responses of the three subsystems, full and reduced.
//!
//! Run with `cargo run --example transfer_functions`.

use somor::bench::{generate_msd, MsdParams};
use somor::gramians::controllability_factors;
use somor::kernels::GRAMIAN_FACTOR_TOL;
use somor::reduction::{reduce_split, OrderSpec};
use somor::system::{eval_transfer, Complex64, Subsystem};

fn main() -> somor::Result<()> {
    let sos = generate_msd(60, &MsdParams::default())?;
    let factors = controllability_factors(&sos, GRAMIAN_FACTOR_TOL)?;
    let split = reduce_split(&sos, &factors, [OrderSpec::Fixed(10); 3])?;

    println!("{:>8} {:>4} {:>12} {:>12}", "omega", "tag", "|H|", "|H - Hr|");
    for omega in [0.01, 0.1, 0.5, 1.0, 2.0] {
        let s = Complex64::new(0.0, omega);
        for tag in Subsystem::ALL {
            let h = eval_transfer(&sos, tag, s)?;
            let hr = split.get(tag).transfer(tag, s)?;
            println!("{omega:>8} {:>4} {:>12.4e} {:>12.4e}", tag.label(), h[(0, 0)].norm(), (h - hr)[(0, 0)].norm());
        }
    }
    Ok(())
}
