//! Manifest parsing, reduced-model persistence and the command-line tool.

use std::fs;
use std::path::Path;
use std::process::Command;

use nalgebra::dmatrix;
use somor::bench::{generate_msd, MsdParams};
use somor::gramians::controllability_factors;
use somor::io::{read_csv, read_manifest, read_rom_dir, write_rom_dir, RomSet};
use somor::kernels::GRAMIAN_FACTOR_TOL;
use somor::reduction::{reduce_split, OrderSpec};
use somor::Error;

const EYE2: &str = "%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n";

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn two_mass_files(dir: &Path) {
    write(dir, "M.mtx", EYE2);
    write(dir, "D.mtx", EYE2);
    write(dir, "K.mtx", "%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 2.0\n2 1 -1.0\n2 2 2.0\n");
    write(dir, "B.mtx", "%%MatrixMarket matrix array real general\n2 1\n0\n1\n");
    write(dir, "C.mtx", "%%MatrixMarket matrix array real general\n1 2\n0\n1\n");
}

#[test]
fn manifest_without_initial_bases() {
    let dir = tempfile::tempdir().unwrap();
    two_mass_files(dir.path());
    write(dir.path(), "m.toml", "M = \"M.mtx\"\nD = \"D.mtx\"\nK = \"K.mtx\"\nB = \"B.mtx\"\nC = \"C.mtx\"\n");
    let m = read_manifest(dir.path().join("m.toml")).unwrap();
    assert_eq!(m.system.position_basis().shape(), (2, 0));
    assert_eq!(m.system.velocity_basis().shape(), (2, 0));
    assert_eq!(m.system.stiffness(), &dmatrix![2.0, -1.0; -1.0, 2.0]);
    assert_eq!(m.z0.len(), 0);
    assert_eq!(m.grid.steps(), 20_000);
}

#[test]
fn manifest_reports_the_mismatched_pair() {
    let dir = tempfile::tempdir().unwrap();
    two_mass_files(dir.path());
    write(dir.path(), "B3.mtx", "%%MatrixMarket matrix array real general\n3 1\n0\n0\n1\n");
    write(dir.path(), "m.toml", "M = \"M.mtx\"\nD = \"D.mtx\"\nK = \"K.mtx\"\nB = \"B3.mtx\"\nC = \"C.mtx\"\n");
    let err = read_manifest(dir.path().join("m.toml")).unwrap_err();
    assert!(matches!(err, Error::DimensionMismatch(_)));
    assert!(err.to_string().contains("B vs M"), "{err}");
}

#[test]
fn manifest_syntax_errors_carry_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    two_mass_files(dir.path());
    write(dir.path(), "m.toml", "M = \"M.mtx\"\nD = \"D.mtx\"\nK = = 3\n");
    let err = read_manifest(dir.path().join("m.toml")).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    assert!(err.to_string().contains("m.toml:3:"), "{err}");

    write(dir.path(), "bad.mtx", "%%MatrixMarket matrix array real general\n2 2\n1\n0\nx\n1\n");
    write(dir.path(), "m.toml", "M = \"M.mtx\"\nD = \"bad.mtx\"\nK = \"K.mtx\"\nB = \"B.mtx\"\nC = \"C.mtx\"\n");
    let err = read_manifest(dir.path().join("m.toml")).unwrap_err();
    assert!(err.to_string().contains("bad.mtx:5:"), "{err}");
}

#[test]
fn manifest_settings_are_read() {
    let dir = tempfile::tempdir().unwrap();
    two_mass_files(dir.path());
    write(dir.path(), "X0.mtx", "%%MatrixMarket matrix array real general\n2 1\n0\n1\n");
    let text = "M = \"M.mtx\"\nD = \"D.mtx\"\nK = \"K.mtx\"\nB = \"B.mtx\"\nC = \"C.mtx\"\nX0 = \"X0.mtx\"\n\
                z0 = [0.5]\n[input]\nkind = \"exponential\"\nalpha = 0.2\nbeta = -1.0\n[grid]\nt_end = 2.0\nh = 0.01\n";
    write(dir.path(), "m.toml", text);
    let m = read_manifest(dir.path().join("m.toml")).unwrap();
    assert_eq!(m.z0.as_slice(), &[0.5]);
    assert_eq!(m.grid.steps(), 200);
    assert_eq!(m.input, somor::simulate::InputSignal::Exponential { alpha: 0.2, beta: -1.0 });
}

#[test]
fn rom_directory_round_trip_is_bitwise() {
    let sos = generate_msd(12, &MsdParams::default()).unwrap();
    let factors = controllability_factors(&sos, GRAMIAN_FACTOR_TOL).unwrap();
    let split = reduce_split(&sos, &factors, [OrderSpec::Fixed(4), OrderSpec::Fixed(3), OrderSpec::Fixed(2)]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_rom_dir(dir.path(), &RomSet::Split(split.clone())).unwrap();
    let RomSet::Split(back) = read_rom_dir(dir.path()).unwrap() else { panic!("scheme lost") };
    for tag in somor::system::Subsystem::ALL {
        let (a, b) = (split.get(tag), back.get(tag));
        for (x, y) in [
            (&a.m, &b.m),
            (&a.d, &b.d),
            (&a.k, &b.k),
            (&a.b, &b.b),
            (&a.c, &b.c),
            (&a.x0, &b.x0),
            (&a.v0, &b.v0),
            (&a.w, &b.w),
        ] {
            assert_eq!(x.shape(), y.shape());
            assert!(x.iter().zip(y.iter()).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
        assert_eq!(a.retained_sigma, b.retained_sigma);
    }
}

fn somor(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_somor")).args(args).output().unwrap()
}

fn stdout(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn key(text: &str, name: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{name}=")))
        .unwrap_or_else(|| panic!("no {name} in {text}"))
        .parse()
        .unwrap()
}

#[test]
fn command_line_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let d = |p: &str| dir.path().join(p).to_string_lossy().into_owned();
    let out = somor(&["generate-msd", "--n", "20", "--t-end", "5", "--h", "0.01", "--out", &d("msd")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = d("msd/manifest.toml");

    let out = somor(&["reduce", "--manifest", &manifest, "--scheme", "split", "--order", "6,5,4", "--out", &d("spl")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(key(&stdout(&out), "order_x0"), 5.0);
    for tag in ["so", "x0", "v0"] {
        assert!(dir.path().join(format!("spl/sigma_{tag}.csv")).exists());
        assert!(dir.path().join(format!("spl/{tag}/M.mtx")).exists());
    }

    let out = somor(&["simulate", "--manifest", &manifest, "--rom", &d("spl"), "--out", &d("traj.csv")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(d("traj.csv")).unwrap();
    assert_eq!(header, ["t", "y_1", "yhat_1", "l2err_running"]);
    assert_eq!(rows.len(), 501);
    assert!(rows.windows(2).all(|w| w[1][3] >= w[0][3]));
    let text = fs::read_to_string(d("traj.csv")).unwrap();
    assert!(!text.contains('\r'));

    let out = somor(&["bound", "--manifest", &manifest, "--rom", &d("spl")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    for k in ["h2_error_so", "h2_error_x0", "h2_error_v0", "bound"] {
        assert!(key(&text, k) >= 0.0);
    }
    assert!(text.lines().all(|l| l.contains('=')));

    for scheme in ["combined", "homogeneous"] {
        let out = somor(&["reduce", "--manifest", &manifest, "--scheme", scheme, "--tol", "1e-3", "--out", &d(scheme)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let out = somor(&["bound", "--manifest", &manifest, "--rom", &d(scheme)]);
        assert!(key(&stdout(&out), "bound") > 0.0);
    }

    let out = somor(&["hsv", "--manifest", &manifest]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("sigma_so="));
}

#[test]
fn exit_codes_and_error_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let d = |p: &str| dir.path().join(p).to_string_lossy().into_owned();

    let out = somor(&["reduce", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = somor(&["hsv", "--manifest", &d("missing.toml")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    // Undamped system: the pencil has eigenvalues on the imaginary axis.
    two_mass_files(dir.path());
    write(dir.path(), "Z.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 0\n");
    write(dir.path(), "m.toml", "M = \"M.mtx\"\nD = \"Z.mtx\"\nK = \"K.mtx\"\nB = \"B.mtx\"\nC = \"C.mtx\"\n");
    let out = somor(&["hsv", "--manifest", &d("m.toml")]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    // Requesting more than the available rank is a numerical failure too.
    somor(&["generate-msd", "--n", "4", "--out", &d("msd")]);
    let out = somor(&[
        "reduce",
        "--manifest",
        &d("msd/manifest.toml"),
        "--scheme",
        "combined",
        "--order",
        "9",
        "--out",
        &d("r"),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn library_entry_point_matches_binary() {
    assert_eq!(somor::cli::cli_run(["somor", "frobnicate"]), 1);
    assert_eq!(somor::cli::cli_run(["somor", "generate-msd", "--n", "1", "--out", "/nonexistent/x"]), 1);
}
