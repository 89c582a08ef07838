//! The response splits into input, initial-position and initial-velocity
//! parts: `y = y_SO + y_x0 + y_v0`.
//!
//! Run with `cargo run --example superposition`.

use nalgebra::{dmatrix, dvector, DMatrix};
use somor::simulate::{simulate, superpose, InputSignal, TimeGrid};

fn main() -> somor::Result<()> {
    let m = dmatrix![2.0, 0.0; 0.0, 1.0];
    let d = dmatrix![0.4, -0.1; -0.1, 0.3];
    let k = dmatrix![3.0, -1.0; -1.0, 2.0];
    let b = dmatrix![0.0; 1.0];
    let c = dmatrix![1.0, 1.0];
    let (x0, v0) = (dvector![0.5, -0.2], dvector![0.0, 1.0]);
    let zero = dvector![0.0, 0.0];
    let u = InputSignal::Exponential { alpha: 1.0, beta: -0.5 };
    let grid = TimeGrid::new(0.0, 10.0, 1e-3)?;

    let run = |x: &_, v: &_, u: &_| simulate(&m, &d, &k, &b, &c, x, v, u, &grid);
    let y = run(&x0, &v0, &u)?;
    let parts = superpose(
        &run(&zero, &zero, &u)?,
        &run(&x0, &zero, &InputSignal::Zero)?,
        &run(&zero, &v0, &InputSignal::Zero)?,
    )?;
    let gap: DMatrix<f64> = &y.samples - &parts.samples;
    println!("max |y - (y_SO + y_x0 + y_v0)| = {:.2e}", gap.amax());
    println!("y(10) = {:.6}", y.last());
    Ok(())
}
