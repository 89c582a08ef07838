//! Writing a system to disk as Matrix Market files plus a manifest, and
//! reading it back.
//!
//! Run with `cargo run --example matrix_market -- <dir>`; defaults to a
//! temporary directory under the system temp dir.

use nalgebra::dvector;
use somor::bench::{generate_msd, MsdParams};
use somor::io::{read_manifest, write_manifest, Manifest};
use somor::simulate::{InputSignal, TimeGrid};

fn main() -> somor::Result<()> {
    let dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("somor-mtx-example"));
    let manifest = Manifest {
        system: generate_msd(8, &MsdParams::default())?,
        input: InputSignal::Exponential { alpha: 0.2, beta: -1.0 },
        grid: TimeGrid::new(0.0, 5.0, 1e-2)?,
        z0: dvector![1.0],
        w0: dvector![1.0],
    };
    let path = write_manifest(&dir, &manifest)?;
    let back = read_manifest(&path)?;
    println!("wrote {}", path.display());
    println!("stiffness identical after round trip: {}", back.system.stiffness() == manifest.system.stiffness());
    Ok(())
}
