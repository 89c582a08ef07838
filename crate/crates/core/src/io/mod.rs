//! File formats: Matrix Market matrices, numeric CSV, TOML manifests and
//! reduced-model directories.

mod csv;
mod manifest;
mod mtx;
mod rom;

pub use csv::{format_csv, read_csv, read_vector_csv, write_csv, write_vector_csv};
pub use manifest::{read_manifest, write_manifest, Manifest};
pub use mtx::{format_matrix_market, parse_matrix_market, read_matrix_market, write_matrix_market};
pub use rom::{read_rom_dir, write_rom_dir, RomSet};
