//! System manifests.
//!
//! A manifest is a TOML file naming the Matrix Market files of a system plus
//! optional simulation settings. Paths are relative to the manifest's
//! directory.
//!
//! ```toml
//! M = "M.mtx"
//! D = "D.mtx"
//! K = "K.mtx"
//! B = "B.mtx"
//! C = "C.mtx"
//! X0 = "X0.mtx"      # optional, n×0 when absent
//! V0 = "V0.mtx"      # optional, n×0 when absent
//! z0 = [1.0]         # optional, all ones when absent
//! w0 = [1.0]         # optional, all ones when absent
//!
//! [input]            # optional, zero input when absent
//! kind = "exponential"
//! alpha = 0.2
//! beta = -1.0
//!
//! [grid]             # optional
//! t_end = 20.0
//! h = 1e-3
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::mtx::{read_matrix_market, write_matrix_market};
use crate::error::{Error, Result};
use crate::simulate::{InputSignal, TimeGrid, DEFAULT_STEP, DEFAULT_T_END};
use crate::system::SecondOrderSystem;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(rename = "M")]
    m: PathBuf,
    #[serde(rename = "D")]
    d: PathBuf,
    #[serde(rename = "K")]
    k: PathBuf,
    #[serde(rename = "B")]
    b: PathBuf,
    #[serde(rename = "C")]
    c: PathBuf,
    #[serde(rename = "X0", default, skip_serializing_if = "Option::is_none")]
    x0: Option<PathBuf>,
    #[serde(rename = "V0", default, skip_serializing_if = "Option::is_none")]
    v0: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    z0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input: Option<RawInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<RawGrid>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawInput {
    Zero,
    Exponential { alpha: f64, beta: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    t_end: f64,
    h: f64,
}

/// A validated system together with its simulation settings.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub system: SecondOrderSystem,
    pub input: InputSignal,
    pub grid: TimeGrid,
    pub z0: DVector<f64>,
    pub w0: DVector<f64>,
}

/// Reads a manifest and every file it references.
///
/// The system is checked for dimensional consistency and for asymptotic
/// stability of its pencil.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: RawManifest = toml::from_str(&text).map_err(|e| {
        let line = e.span().map_or(1, |s| text[..s.start.min(text.len())].lines().count().max(1));
        Error::Parse { file: path.to_path_buf(), line, message: e.message().to_string() }
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let load = |p: &Path| read_matrix_market(base.join(p));

    let m = load(&raw.m)?;
    let n = m.nrows();
    let system = SecondOrderSystem::new(m, load(&raw.d)?, load(&raw.k)?, load(&raw.b)?, load(&raw.c)?)?;
    let optional =
        |p: &Option<PathBuf>| -> Result<DMatrix<f64>> { p.as_deref().map_or_else(|| Ok(DMatrix::zeros(n, 0)), load) };
    let system =
        system.with_initial_position_basis(optional(&raw.x0)?)?.with_initial_velocity_basis(optional(&raw.v0)?)?;

    let stability = system.stability()?;
    if !stability.stable {
        return Err(Error::UnstablePencil { abscissa: stability.abscissa });
    }

    let coefficients = |v: Option<Vec<f64>>, width: usize, name: &str| -> Result<DVector<f64>> {
        let v = v.map_or_else(|| DVector::from_element(width, 1.0), DVector::from_vec);
        if v.len() != width {
            return Err(Error::DimensionMismatch(format!(
                "{name} has length {}, its basis has {width} columns",
                v.len()
            )));
        }
        Ok(v)
    };
    let z0 = coefficients(raw.z0, system.position_basis().ncols(), "z0")?;
    let w0 = coefficients(raw.w0, system.velocity_basis().ncols(), "w0")?;

    let input = match raw.input {
        None | Some(RawInput::Zero) => InputSignal::Zero,
        Some(RawInput::Exponential { alpha, beta }) => InputSignal::Exponential { alpha, beta },
    };
    let grid = match raw.grid {
        None => TimeGrid::new(0.0, DEFAULT_T_END, DEFAULT_STEP)?,
        Some(g) => TimeGrid::new(0.0, g.t_end, g.h)?,
    };
    Ok(Manifest { system, input, grid, z0, w0 })
}

/// Writes the system matrices as `<dir>/{M,D,K,B,C,X0,V0}.mtx` and a
/// `manifest.toml` referencing them. Returns the manifest path.
pub fn write_manifest(dir: impl AsRef<Path>, manifest: &Manifest) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let sys = &manifest.system;
    let files: [(&str, &DMatrix<f64>); 7] = [
        ("M", sys.mass()),
        ("D", sys.damping()),
        ("K", sys.stiffness()),
        ("B", sys.input()),
        ("C", sys.output()),
        ("X0", sys.position_basis()),
        ("V0", sys.velocity_basis()),
    ];
    for (name, a) in files {
        write_matrix_market(dir.join(format!("{name}.mtx")), a)?;
    }
    let file = |name: &str| PathBuf::from(format!("{name}.mtx"));
    let input = match manifest.input {
        InputSignal::Zero => RawInput::Zero,
        InputSignal::Exponential { alpha, beta } => RawInput::Exponential { alpha, beta },
        InputSignal::Tabulated { .. } => {
            return Err(Error::InvalidParameter("tabulated inputs cannot be stored in a manifest".into()))
        }
    };
    let raw = RawManifest {
        m: file("M"),
        d: file("D"),
        k: file("K"),
        b: file("B"),
        c: file("C"),
        x0: Some(file("X0")),
        v0: Some(file("V0")),
        z0: Some(manifest.z0.as_slice().to_vec()),
        w0: Some(manifest.w0.as_slice().to_vec()),
        input: Some(input),
        grid: Some(RawGrid { t_end: manifest.grid.t_end(), h: manifest.grid.step() }),
    };
    let text = toml::to_string(&raw).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let path = dir.join("manifest.toml");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
