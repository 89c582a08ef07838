//! Reduced models on disk.
//!
//! A ROM directory holds `rom.toml` (`scheme = "split" | "combined" |
//! "homogeneous"`) and, per reduced model, the Matrix Market files
//! `{M,D,K,B,C,X0,V0,W,V}.mtx` plus `retained.csv`. The split scheme stores
//! its three models in the subdirectories `so/`, `x0/` and `v0/`; the other
//! schemes store one model at the top level.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::csv::{read_vector_csv, write_vector_csv};
use super::mtx::{read_matrix_market, write_matrix_market};
use crate::error::{Error, Result};
use crate::reduction::{ReducedModel, Scheme, SplitReduction};
use crate::system::Subsystem;

/// Reduced models of one run.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum RomSet {
    Split(SplitReduction),
    Single(ReducedModel),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RomIndex {
    scheme: String,
}

pub fn write_rom_dir(dir: impl AsRef<Path>, roms: &RomSet) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let scheme = match roms {
        RomSet::Split(split) => {
            for tag in Subsystem::ALL {
                write_model(&dir.join(tag.label()), split.get(tag))?;
            }
            "split"
        }
        RomSet::Single(rom) => {
            write_model(dir, rom)?;
            match rom.scheme {
                Scheme::Homogeneous => "homogeneous",
                _ => "combined",
            }
        }
    };
    let text =
        toml::to_string(&RomIndex { scheme: scheme.into() }).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let index = dir.join("rom.toml");
    fs::write(&index, text).map_err(|e| Error::io(&index, e))
}

pub fn read_rom_dir(dir: impl AsRef<Path>) -> Result<RomSet> {
    let dir = dir.as_ref();
    let index = dir.join("rom.toml");
    let text = fs::read_to_string(&index).map_err(|e| Error::io(&index, e))?;
    let parsed: RomIndex = toml::from_str(&text).map_err(|e| Error::Parse {
        file: index.clone(),
        line: 1,
        message: e.message().to_string(),
    })?;
    match parsed.scheme.as_str() {
        "split" => Ok(RomSet::Split(SplitReduction {
            rom_so: read_model(&dir.join("so"), Scheme::Split(Subsystem::Input))?,
            rom_x0: read_model(&dir.join("x0"), Scheme::Split(Subsystem::InitialPosition))?,
            rom_v0: read_model(&dir.join("v0"), Scheme::Split(Subsystem::InitialVelocity))?,
        })),
        "combined" => Ok(RomSet::Single(read_model(dir, Scheme::Combined)?)),
        "homogeneous" => Ok(RomSet::Single(read_model(dir, Scheme::Homogeneous)?)),
        other => Err(Error::Parse { file: index, line: 1, message: format!("unknown scheme `{other}`") }),
    }
}

const NAMES: [&str; 9] = ["M", "D", "K", "B", "C", "X0", "V0", "W", "V"];

fn write_model(dir: &Path, rom: &ReducedModel) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mats = [&rom.m, &rom.d, &rom.k, &rom.b, &rom.c, &rom.x0, &rom.v0, &rom.w, &rom.v];
    for (name, a) in NAMES.iter().zip(mats) {
        write_matrix_market(dir.join(format!("{name}.mtx")), a)?;
    }
    write_vector_csv(dir.join("retained.csv"), "sigma", &rom.retained_sigma)
}

fn read_model(dir: &Path, scheme: Scheme) -> Result<ReducedModel> {
    let mut mats: Vec<DMatrix<f64>> =
        NAMES.iter().map(|name| read_matrix_market(dir.join(format!("{name}.mtx")))).collect::<Result<_>>()?;
    let mut take = || mats.remove(0);
    let (m, d, k, b, c, x0, v0, w, v) = (take(), take(), take(), take(), take(), take(), take(), take(), take());
    let r = m.nrows();
    let square = [&m, &d, &k].iter().all(|a| a.shape() == (r, r));
    if !square || b.nrows() != r || c.ncols() != r || x0.nrows() != r || v0.nrows() != r {
        return Err(Error::DimensionMismatch(format!("reduced model in {} has inconsistent shapes", dir.display())));
    }
    if w.shape() != v.shape() || w.ncols() != r {
        return Err(Error::DimensionMismatch(format!("projection in {} does not match order {r}", dir.display())));
    }
    let retained_sigma = read_vector_csv(dir.join("retained.csv"))?;
    let mut rom = ReducedModel { m, d, k, b, c, x0, v0, retained_sigma, scheme, w, v, stability: None };
    if r > 0 {
        rom.stability = rom.to_system().and_then(|s| s.stability()).ok();
    }
    Ok(rom)
}
