//! Command-line front end.
//!
//! ```text
//! somor reduce   --manifest m.toml --scheme split --order 10,10,10 --out rom/
//! somor simulate --manifest m.toml --rom rom/ --out traj.csv
//! somor bound    --manifest m.toml --rom rom/
//! somor hsv      --manifest m.toml [--out dir/]
//! somor generate-msd --n 200 --out msd/
//! ```
//!
//! Exit status is 0 on success, 1 for invalid input and 2 for numerical
//! failures. Errors go to standard error prefixed with `error:`.
//! `SOMOR_THREADS` caps the number of worker threads.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;

use crate::analysis::{bound_combined, bound_split, hankel_report, ErrorBoundReport, HankelReport};
use crate::bench::{generate_msd, MsdParams, Param};
use crate::error::{Error, Result};
use crate::gramians::controllability_factors;
use crate::io::{
    read_manifest, read_rom_dir, write_csv, write_manifest, write_rom_dir, write_vector_csv, Manifest, RomSet,
};
use crate::kernels::GRAMIAN_FACTOR_TOL;
use crate::reduction::{reduce_combined, reduce_homogeneous_with, reduce_split, OrderSpec};
use crate::simulate::{l2_error_integral, simulate_rom, simulate_split, simulate_system, InputSignal, TimeGrid};
use crate::simulate::{DEFAULT_STEP, DEFAULT_T_END};
use crate::system::Subsystem;

#[derive(Parser, Debug)]
#[command(name = "somor", version, about = "Balanced truncation of second-order systems with initial conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce a system and write the reduced matrices.
    Reduce(ReduceArgs),
    /// Simulate full and reduced models and write the output trajectories.
    Simulate(RomArgs),
    /// Print the a-posteriori L2 error bound of a reduced model.
    Bound(RomArgs),
    /// Print or write Hankel singular values.
    Hsv(HsvArgs),
    /// Write a mass-spring-damper chain as a manifest directory.
    GenerateMsd(MsdArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Split,
    Combined,
    Homogeneous,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Reduced order; for the split scheme one value or three (`so,x0,v0`).
    #[arg(long, value_delimiter = ',', conflicts_with = "tol", required_unless_present = "tol")]
    order: Vec<usize>,
    /// Keep Hankel singular values `σ ≥ tol·σ₁`.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RomArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    rom: PathBuf,
    /// Trajectory CSV (simulate only).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HsvArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MsdArgs {
    /// Number of masses.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 1.0)]
    stiffness: f64,
    /// Grounded damper on every mass.
    #[arg(long, default_value_t = 0.0)]
    damper: f64,
    /// Mass-proportional damping.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Stiffness-proportional damping.
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    /// Amplitude of the exponential input written to the manifest.
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    input_alpha: f64,
    /// Rate of the exponential input written to the manifest.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    input_beta: f64,
    #[arg(long, default_value_t = DEFAULT_T_END)]
    t_end: f64,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    h: f64,
    #[arg(long)]
    out: PathBuf,
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn cli_run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if code == 0 {
                let _ = e.print();
            } else {
                let text = e.render().to_string();
                let text = text.trim_end();
                if text.starts_with("error:") {
                    eprintln!("{text}");
                } else {
                    eprintln!("error: {text}");
                }
            }
            return code;
        }
    };
    let result = match thread_pool() {
        Ok(Some(pool)) => pool.install(|| dispatch(cli.command)),
        Ok(None) => dispatch(cli.command),
        Err(e) => Err(e),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>> {
    let Ok(value) = std::env::var("SOMOR_THREADS") else {
        return Ok(None);
    };
    let threads: usize =
        value.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
            Error::InvalidParameter(format!("SOMOR_THREADS must be a positive integer, got `{value}`"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Reduce(args) => reduce(args),
        Command::Simulate(args) => simulate(args),
        Command::Bound(args) => bound(args),
        Command::Hsv(args) => hsv(args),
        Command::GenerateMsd(args) => msd(args),
    }
}

fn order_specs(args: &ReduceArgs) -> Result<[OrderSpec; 3]> {
    if let Some(tol) = args.tol {
        if !(tol > 0.0 && tol <= 1.0) {
            return Err(Error::InvalidParameter(format!("--tol must lie in (0, 1], got {tol}")));
        }
        return Ok([OrderSpec::Tolerance(tol); 3]);
    }
    match (args.scheme, args.order.as_slice()) {
        (_, [r]) => Ok([OrderSpec::Fixed(*r); 3]),
        (SchemeArg::Split, [a, b, c]) => Ok([OrderSpec::Fixed(*a), OrderSpec::Fixed(*b), OrderSpec::Fixed(*c)]),
        (SchemeArg::Split, _) => {
            Err(Error::InvalidParameter("--order takes one or three values for the split scheme".into()))
        }
        _ => Err(Error::InvalidParameter("--order takes a single value for this scheme".into())),
    }
}

fn reduce(args: ReduceArgs) -> Result<()> {
    let orders = order_specs(&args)?;
    let manifest = read_manifest(&args.manifest)?;
    let sos = &manifest.system;
    let factors = controllability_factors(sos, GRAMIAN_FACTOR_TOL)?;
    let hankel = hankel_report(&factors)?;
    let roms = match args.scheme {
        SchemeArg::Split => RomSet::Split(reduce_split(sos, &factors, orders)?),
        SchemeArg::Combined => RomSet::Single(reduce_combined(sos, &factors, orders[0])?),
        SchemeArg::Homogeneous => RomSet::Single(reduce_homogeneous_with(sos, &factors, orders[0])?),
    };
    write_rom_dir(&args.out, &roms)?;
    write_hankel(&args.out, &hankel)?;
    match &roms {
        RomSet::Split(split) => {
            for tag in Subsystem::ALL {
                let rom = split.get(tag);
                println!("order_{}={}", tag.label(), rom.order());
                println!("stable_{}={}", tag.label(), rom.is_stable());
            }
        }
        RomSet::Single(rom) => {
            println!("order={}", rom.order());
            println!("stable={}", rom.is_stable());
        }
    }
    Ok(())
}

fn write_hankel(dir: &Path, hankel: &HankelReport) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for tag in Subsystem::ALL {
        write_vector_csv(dir.join(format!("sigma_{}.csv", tag.label())), "sigma", hankel.get(tag))?;
    }
    write_vector_csv(dir.join("sigma_combined.csv"), "sigma", &hankel.combined)
}

fn simulate_roms(roms: &RomSet, m: &Manifest) -> Result<crate::simulate::Trajectory> {
    match roms {
        RomSet::Split(split) => simulate_split(split, &m.z0, &m.w0, &m.input, &m.grid),
        RomSet::Single(rom) => simulate_rom(rom, &m.z0, &m.w0, &m.input, &m.grid),
    }
}

fn simulate(args: RomArgs) -> Result<()> {
    let out = args.out.ok_or_else(|| Error::InvalidParameter("simulate needs --out <trajectory.csv>".into()))?;
    let manifest = read_manifest(&args.manifest)?;
    let roms = read_rom_dir(&args.rom)?;
    let y = simulate_system(&manifest.system, &manifest.z0, &manifest.w0, &manifest.input, &manifest.grid)?;
    let y_hat = simulate_roms(&roms, &manifest)?;
    if y_hat.outputs() != y.outputs() {
        return Err(Error::DimensionMismatch(format!(
            "reduced model has {} outputs, system has {}",
            y_hat.outputs(),
            y.outputs()
        )));
    }
    let err = l2_error_integral(&y, &y_hat)?;

    let p = y.outputs();
    let mut header = vec!["t".to_string()];
    header.extend((1..=p).map(|i| format!("y_{i}")));
    header.extend((1..=p).map(|i| format!("yhat_{i}")));
    header.push("l2err_running".into());
    let rows: Vec<Vec<f64>> = (0..y.grid.len())
        .map(|k| {
            let mut row = Vec::with_capacity(2 * p + 2);
            row.push(y.grid.time(k));
            row.extend(y.samples.column(k).iter());
            row.extend(y_hat.samples.column(k).iter());
            row.push(err.samples[(0, k)]);
            row
        })
        .collect();
    write_csv(&out, &header, rows.iter().map(Vec::as_slice))?;
    println!("l2_error={:.16e}", err.last());
    Ok(())
}

fn print_bound(report: &ErrorBoundReport) {
    for term in &report.terms {
        println!("h2_error_{}={:.16e}", term.label, term.h2_error);
        println!("amplitude_{}={:.16e}", term.label, term.amplitude);
    }
    println!("u_hinf={:.16e}", report.u_hinf);
    println!("z0_norm={:.16e}", report.z0_norm);
    println!("w0_norm={:.16e}", report.w0_norm);
    println!("bound={:.16e}", report.total);
}

fn bound(args: RomArgs) -> Result<()> {
    let manifest = read_manifest(&args.manifest)?;
    let roms = read_rom_dir(&args.rom)?;
    let sos = &manifest.system;
    let u_hinf = manifest
        .input
        .hinf_norm(sos.inputs())?
        .ok_or_else(|| Error::InvalidParameter("input has no closed-form H-infinity norm".into()))?;
    let report = match &roms {
        RomSet::Split(split) => bound_split(sos, split, u_hinf, &manifest.z0, &manifest.w0)?,
        RomSet::Single(rom) => bound_combined(sos, rom, u_hinf, &manifest.z0, &manifest.w0)?,
    };
    print_bound(&report);
    Ok(())
}

fn hsv(args: HsvArgs) -> Result<()> {
    let manifest = read_manifest(&args.manifest)?;
    let factors = controllability_factors(&manifest.system, GRAMIAN_FACTOR_TOL)?;
    let hankel = hankel_report(&factors)?;
    if let Some(dir) = &args.out {
        write_hankel(dir, &hankel)?;
    }
    let named: [(&str, &DVector<f64>); 4] =
        [("so", &hankel.so), ("x0", &hankel.x0), ("v0", &hankel.v0), ("combined", &hankel.combined)];
    for (name, sigma) in named {
        let list: Vec<String> = sigma.iter().map(|s| format!("{s:.16e}")).collect();
        println!("sigma_{name}={}", list.join(","));
    }
    Ok(())
}

fn msd(args: MsdArgs) -> Result<()> {
    let params = MsdParams {
        masses: Param::Uniform(args.mass),
        stiffnesses: Param::Uniform(args.stiffness),
        dampers: Param::Uniform(args.damper),
        alpha: args.alpha,
        beta: args.beta,
    };
    let system = generate_msd(args.n, &params)?;
    let manifest = Manifest {
        system,
        input: InputSignal::Exponential { alpha: args.input_alpha, beta: args.input_beta },
        grid: TimeGrid::new(0.0, args.t_end, args.h)?,
        z0: DVector::from_element(1, 1.0),
        w0: DVector::from_element(1, 1.0),
    };
    let path = write_manifest(&args.out, &manifest)?;
    println!("manifest={}", path.display());
    Ok(())
}
