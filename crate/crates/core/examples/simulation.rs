//! Trapezoidal-rule simulation of a single oscillator against its closed
//! form, with the step-halving convergence ratio.
//!
//! Run with `cargo run --example simulation`.

use nalgebra::{dmatrix, dvector};
use somor::simulate::{simulate, InputSignal, TimeGrid};

fn main() -> somor::Result<()> {
    // x'' + 3x' + 2x = 0, x(0) = 1, x'(0) = 0  =>  x(t) = 2e^{-t} - e^{-2t}.
    let exact = 2.0 * (-1.0f64).exp() - (-2.0f64).exp();
    let run = |h: f64| -> somor::Result<f64> {
        let grid = TimeGrid::new(0.0, 1.0, h)?;
        let y = simulate(
            &dmatrix![1.0],
            &dmatrix![3.0],
            &dmatrix![2.0],
            &dmatrix![0.0],
            &dmatrix![1.0],
            &dvector![1.0],
            &dvector![0.0],
            &InputSignal::Zero,
            &grid,
        )?;
        Ok(y.last())
    };
    let mut previous: Option<f64> = None;
    for h in [0.1, 0.05, 0.025, 0.0125] {
        let e = (run(h)? - exact).abs();
        match previous {
            Some(p) => println!("h = {h:<7} error {e:.3e}  ratio {:.3}", p / e),
            None => println!("h = {h:<7} error {e:.3e}"),
        }
        previous = Some(e);
    }
    Ok(())
}
