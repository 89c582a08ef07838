//! Tailored Gramians of a small system and the residuals of their Lyapunov
//! equations.
//!
//! Run with `cargo run --example gramians`.

use somor::bench::{generate_msd, MsdParams};
use somor::gramians::{augmented_position_gramian, controllability_factors, SchurPencil};
use somor::kernels::GRAMIAN_FACTOR_TOL;
use somor::system::{companion, subsystem_input_matrix, Subsystem};

fn main() -> somor::Result<()> {
    let sos = generate_msd(30, &MsdParams::default())?;
    let fo = companion(&sos);
    let pencil = SchurPencil::new(&fo.e, &fo.a)?;
    println!("spectral abscissa of the companion pencil: {:.4e}", pencil.abscissa());

    for tag in Subsystem::ALL {
        let f = subsystem_input_matrix(&sos, tag);
        let p = pencil.controllability(&f)?;
        println!(
            "P_{:<2}: trace {:.4e}, residual {:.2e}",
            tag.label(),
            p.trace(),
            pencil.controllability_residual(&p, &f)
        );
    }
    let q = pencil.observability(&fo.c)?;
    println!("Q   : trace {:.4e}, residual {:.2e}", q.trace(), pencil.observability_residual(&q, &fo.c));

    // The three factors together reproduce the Gramian of the stacked input.
    let f = controllability_factors(&sos, GRAMIAN_FACTOR_TOL)?;
    let sum = &f.r_so * f.r_so.transpose() + &f.r_x0 * f.r_x0.transpose() + &f.r_v0 * f.r_v0.transpose();
    let pc = augmented_position_gramian(&sos)?;
    println!("||R Rᵀ sum - P_c|| / ||P_c|| = {:.2e}", (sum - &pc).norm() / pc.norm());
    Ok(())
}
