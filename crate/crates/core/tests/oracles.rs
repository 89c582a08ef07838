//! Gramians, blocks and transfer functions against independent oracles:
//! Kronecker-product solves and frequency-domain quadrature.

mod common;

use common::*;
use nalgebra::DMatrix;
use somor::gramians::{extract_position_block, extract_velocity_obs_block, position_gramian, SchurPencil};
use somor::system::{companion, eval_transfer, subsystem_input_matrix, Complex64, FirstOrderSystem, Subsystem};

fn rel_fro(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

#[test]
fn controllability_gramians_match_kronecker_solve() {
    let mut rng = rng(11);
    for n in 1..=6 {
        let sos = random_system(&mut rng, n, 2, 1, 1, 2);
        let fo = companion(&sos);
        let pencil = SchurPencil::new(&fo.e, &fo.a).unwrap();
        for tag in Subsystem::ALL {
            let f = subsystem_input_matrix(&sos, tag);
            let p = pencil.controllability(&f).unwrap();
            let oracle = kron_lyapunov(&fo.e, &fo.a, &f);
            assert!(rel_fro(&p, &oracle) < 1e-10, "n={n} {tag}: {:e}", rel_fro(&p, &oracle));
        }
    }
}

#[test]
fn observability_gramian_matches_kronecker_solve() {
    let mut rng = rng(12);
    for n in 1..=6 {
        let sos = random_system(&mut rng, n, 1, 2, 0, 0);
        let fo = companion(&sos);
        let pencil = SchurPencil::new(&fo.e, &fo.a).unwrap();
        let q = pencil.observability(&fo.c).unwrap();
        // Aᵀ Q E + Eᵀ Q A + Cᵀ C = 0 is the controllability equation of the dual pencil.
        let oracle = kron_lyapunov(&fo.e.transpose(), &fo.a.transpose(), &fo.c.transpose());
        assert!(rel_fro(&q, &oracle) < 1e-10, "n={n}: {:e}", rel_fro(&q, &oracle));
    }
}

#[test]
fn cross_gramian_matches_kronecker_solve() {
    let mut rng = rng(13);
    for (n, r) in [(2, 1), (4, 2), (5, 5), (6, 3)] {
        let full = companion(&random_system(&mut rng, n, 2, 1, 0, 0));
        let red = companion(&random_system(&mut rng, r, 2, 1, 0, 0));
        let pf = SchurPencil::new(&full.e, &full.a).unwrap();
        let pr = SchurPencil::new(&red.e, &red.a).unwrap();
        let x = pf.cross(&full.b, &pr, &red.b).unwrap();
        let oracle = kron_sylvester(&full.e, &full.a, &full.b, &red.e, &red.a, &red.b);
        assert!(rel_fro(&x, &oracle) < 1e-10, "n={n} r={r}: {:e}", rel_fro(&x, &oracle));
    }
}

#[test]
fn position_blocks_match_frequency_integrals() {
    let mut rng = rng(14);
    for n in [1, 2] {
        let sos = random_system(&mut rng, n, 1, 1, 1, 1);
        for tag in Subsystem::ALL {
            let p = position_gramian(&sos, &subsystem_input_matrix(&sos, tag)).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let entry = frequency_integral(|w| {
                        let x = position_response(&sos, tag, Complex64::new(0.0, w));
                        (x.row(i) * x.row(j).adjoint())[(0, 0)].re
                    });
                    assert!(
                        (p[(i, j)] - entry).abs() < 1e-7 * p.norm(),
                        "n={n} {tag} ({i},{j}): {} vs {entry}",
                        p[(i, j)]
                    );
                }
            }
        }
    }
}

#[test]
fn velocity_observability_block_matches_frequency_integral() {
    let mut rng = rng(15);
    let sos = random_system(&mut rng, 2, 1, 1, 0, 0);
    let fo = companion(&sos);
    let q = SchurPencil::new(&fo.e, &fo.a).unwrap().observability(&fo.c).unwrap();
    let q3 = extract_velocity_obs_block(&q).unwrap();
    // Q₃ = (1/2π) ∫ Gᴴ G with G(s) = C (s²M + sD + K)⁻¹.
    let m = sos.mass().map(|v| Complex64::new(v, 0.0));
    let d = sos.damping().map(|v| Complex64::new(v, 0.0));
    let k = sos.stiffness().map(|v| Complex64::new(v, 0.0));
    let c = sos.output().map(|v| Complex64::new(v, 0.0));
    let g = |w: f64| {
        let s = Complex64::new(0.0, w);
        let inv = (&m * (s * s) + &d * s + &k).try_inverse().unwrap();
        &c * inv
    };
    for i in 0..2 {
        for j in 0..2 {
            let entry = frequency_integral(|w| {
                let gw = g(w);
                (gw.column(i).adjoint() * gw.column(j))[(0, 0)].re
            });
            assert!((q3[(i, j)] - entry).abs() < 1e-7 * q3.norm(), "({i},{j}): {} vs {entry}", q3[(i, j)]);
        }
    }
}

#[test]
fn position_block_of_companion_solution() {
    let mut rng = rng(16);
    let sos = random_system(&mut rng, 3, 1, 1, 0, 0);
    let fo = companion(&sos);
    let full = kron_lyapunov(&fo.e, &fo.a, &fo.b);
    let block = extract_position_block(&full).unwrap();
    assert!(rel_fro(&position_gramian(&sos, &fo.b).unwrap(), &block) < 1e-10);
}

#[test]
fn transfer_functions_match_direct_pencil_solve() {
    let mut rng = rng(17);
    for n in 1..=5 {
        let sos = random_system(&mut rng, n, 2, 2, 2, 1);
        for s in [Complex64::new(0.0, 0.3), Complex64::new(-0.1, 2.0), Complex64::new(1.0, -1.0)] {
            for tag in Subsystem::ALL {
                let h = eval_transfer(&sos, tag, s).unwrap();
                let oracle = output_response(&sos, tag, s);
                assert!((&h - &oracle).norm() <= 1e-12 * oracle.norm().max(1.0), "n={n} {tag} s={s}");
            }
        }
    }
}

#[test]
fn first_order_transfer_of_companion_matches_quadratic_form() {
    let mut rng = rng(18);
    let sos = random_system(&mut rng, 4, 1, 1, 1, 1);
    let fo = companion(&sos);
    let s = Complex64::new(0.2, 0.7);
    for tag in Subsystem::ALL {
        let tagged: FirstOrderSystem = fo.with_input(subsystem_input_matrix(&sos, tag)).unwrap();
        let h = tagged.transfer(s).unwrap();
        assert!((h - output_response(&sos, tag, s)).norm() < 1e-12);
    }
}
