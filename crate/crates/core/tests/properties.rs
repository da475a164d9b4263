use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use phasekit::fock::{structure_function_raw, Mode, Representation};
use phasekit::linalg::{max_abs, CMatrix};
use phasekit::mub;
use phasekit::phase_ops::{self, PhaseFamily};
use phasekit::phase_states::{self, StateFamily};
use phasekit::truncated::{self, Window};
use phasekit::{io, FockSpace, KappaSpec};

fn neg(k: usize, phi: f64) -> (KappaSpec, Arc<FockSpace>) {
    let spec = KappaSpec::negative(k, phi);
    (spec, Arc::new(FockSpace::build(&spec)))
}

fn family(i: usize) -> PhaseFamily {
    [PhaseFamily::E1d, PhaseFamily::E2d, PhaseFamily::E3d, PhaseFamily::Ed][i]
}

// Naive Taylor series, independent of the library's diagonal evolution.
fn expm_i(h: &CMatrix, t: f64) -> CMatrix {
    let a = h * C64::new(0.0, -t);
    let n = h.nrows();
    let mut out = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for j in 1..80 {
        term = &term * &a / C64::new(j as f64, 0.0);
        out += &term;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn phase_operators_unitary(k in 1usize..7, phi in -PI..PI, f in 0usize..4) {
        let (spec, space) = neg(k, phi);
        let op = phase_ops::build(family(f), &spec, &space).unwrap();
        prop_assert!(op.op.unitarity_residual() < 1e-12);
    }

    #[test]
    fn phase_states_are_eigenvectors(k in 1usize..7, phi in -PI..PI, f in 0usize..4, l in 0usize..7) {
        let (spec, space) = neg(k, phi);
        let fam = family(f);
        let sf = if fam == PhaseFamily::Ed { StateFamily::Ed } else { StateFamily::with_block(fam, l % (k + 1)) };
        let op = phase_ops::build(fam, &spec, &space).unwrap();
        let states = phase_states::phase_states(&spec, &space, sf, phi).unwrap();
        prop_assert!(phase_states::eigen_residual(&op.op, &states) < 1e-10);
        prop_assert!(phase_states::orthonormality_residual(&states) < 1e-12);
    }

    #[test]
    fn block_overlaps_match_inner_products(
        k in 1usize..6, f in 0usize..3, l in 0usize..6, l2 in 0usize..6,
        m in -8i64..8, m2 in -8i64..8, phi in -PI..PI, phi2 in -PI..PI,
    ) {
        let (spec, space) = neg(k, 0.0);
        let fam = family(f);
        let (l, l2) = (l % (k + 1), l2 % (k + 1));
        let a = phase_states::phase_state(&spec, &space, StateFamily::with_block(fam, l), m, phi).unwrap();
        let b = phase_states::phase_state(&spec, &space, StateFamily::with_block(fam, l2), m2, phi2).unwrap();
        let closed = phase_states::overlap_rho(&spec, fam, l, m, phi, l2, m2, phi2).unwrap();
        prop_assert!((a.inner(&b) - closed).norm() < 1e-10);
    }

    #[test]
    fn ed_overlaps_match_inner_products(k in 1usize..6, m in -30i64..30, m2 in -30i64..30, phi in -PI..PI, phi2 in -PI..PI) {
        let (spec, space) = neg(k, 0.0);
        let a = phase_states::phase_state(&spec, &space, StateFamily::Ed, m, phi).unwrap();
        let b = phase_states::phase_state(&spec, &space, StateFamily::Ed, m2, phi2).unwrap();
        let closed = phase_states::overlap_tau(&spec, m, phi, m2, phi2).unwrap();
        prop_assert!((a.inner(&b) - closed).norm() < 1e-10);
    }

    #[test]
    fn evolution_shifts_phi(k in 1usize..6, phi in -PI..PI, t in -10.0f64..10.0, m in 0i64..30) {
        let (spec, space) = neg(k, phi);
        let v = phase_states::phase_state(&spec, &space, StateFamily::Ed, m, phi).unwrap();
        let w = phase_states::evolve(&spec, &space, &v, t).unwrap();
        let u = expm_i(Representation::build(&spec).unwrap().h.matrix(), t);
        prop_assert!((&u * v.amps() - w.amps()).norm() < 1e-9);
        let target = phase_states::phase_state(&spec, &space, StateFamily::Ed, m, phi + t).unwrap();
        prop_assert!(w.distance(&target) < 1e-12);
    }

    #[test]
    fn structure_function_closed_form(n1 in 0usize..40, n2 in 0usize..40, kappa in -1.0f64..2.0) {
        let want = n1 as f64 * (1.0 + kappa * (n1 as f64 + n2 as f64 - 1.0));
        prop_assert!((structure_function_raw(Mode::One, n1, n2, kappa) - want).abs() <= 1e-12 * want.abs().max(1.0));
    }

    #[test]
    fn truncated_commutators_for_random_kappa(kappa in 0.0f64..3.0, sigma in 1usize..6) {
        let spec = KappaSpec::non_negative(kappa, sigma, 0.0).unwrap();
        let window = Window::for_spec(&spec).unwrap();
        let report = truncated::check_truncated_algebra(&spec, &window, 1e-12).unwrap();
        for e in report.entries.iter().filter(|e| e.name.contains("commutator")) {
            prop_assert!(e.pass, "{}: {}", e.name, e.max_residual);
        }
    }

    #[test]
    fn operator_json_round_trip(k in 1usize..5, phi in -PI..PI, f in 0usize..4) {
        let (spec, space) = neg(k, phi);
        let op = phase_ops::build(family(f), &spec, &space).unwrap();
        let text = io::operator_to_json(&op.op).unwrap();
        let back = io::operator_from_json(&text).unwrap();
        prop_assert_eq!(back.matrix(), op.op.matrix());
        prop_assert_eq!(back.space().states(), space.states());
    }

    #[test]
    fn state_json_round_trip(k in 1usize..5, phi in -PI..PI, m in 0i64..20) {
        let (spec, space) = neg(k, phi);
        let v = phase_states::phase_state(&spec, &space, StateFamily::Ed, m, phi).unwrap();
        let back = io::state_from_json(&io::state_to_json(&v).unwrap()).unwrap();
        prop_assert_eq!(back.amps(), v.amps());
    }
}

// Amplitude on |N-1-n> is exp(i pi (n(N-n)a + 2 n alpha)/N)/sqrt(N); the
// computational basis is B_inf.
fn naive_mub(n: usize) -> Vec<DMatrix<C64>> {
    let nf = n as f64;
    let mut bases = vec![DMatrix::identity(n, n)];
    for a in 0..n {
        bases.push(DMatrix::from_fn(n, n, |row, alpha| {
            let j = n - 1 - row;
            let x = (j * (n - j) * a + 2 * j * alpha) as f64;
            C64::from_polar(1.0 / nf.sqrt(), PI * x / nf)
        }));
    }
    bases
}

fn naive_gauss(u: i64, v: i64, w: i64) -> C64 {
    (0..w.abs()).map(|k| C64::from_polar(1.0, PI * (u * k * k + v * k) as f64 / w as f64)).sum()
}

#[test]
fn mub_overlaps_equal_gauss_sums_up_to_13() {
    for n in 2..=13usize {
        let naive = naive_mub(n);
        for route in [mub::Route::E1, mub::Route::E3] {
            let set = mub::build_mub_set(n, route, 1e-10).unwrap();
            for (i, basis) in set.bases.iter().enumerate() {
                let diff = max_abs(&(basis.matrix() - &naive[i]));
                assert!(diff < 1e-10, "N={n} {route} basis {i}: {diff}");
            }
        }
        for a in 0..n {
            for b in 0..n {
                for alpha in 0..n {
                    for beta in 0..n {
                        let direct = (naive[a + 1].column(alpha).adjoint() * naive[b + 1].column(beta))[(0, 0)];
                        let (ni, ai, bi) = (n as i64, a as i64, b as i64);
                        let s = naive_gauss(ai - bi, -(ai - bi) * ni - 2 * (alpha as i64 - beta as i64), ni) / n as f64;
                        assert!((direct - s).norm() < 1e-10, "N={n} a={a} b={b}");
                        let lib = mub::overlap_gauss(n, a, alpha, b, beta).unwrap();
                        assert!((lib - s).norm() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn prime_dimensions_are_unbiased_and_composites_are_not() {
    for n in 2..=13usize {
        let naive = naive_mub(n);
        let mut worst: f64 = 0.0;
        for i in 0..naive.len() {
            for j in i + 1..naive.len() {
                let g = naive[i].adjoint() * &naive[j];
                for z in g.iter() {
                    worst = worst.max((z.norm() - 1.0 / (n as f64).sqrt()).abs());
                }
            }
        }
        let set = mub::build_mub_set(n, mub::Route::E1, 1e-10).unwrap();
        assert_eq!(set.certificate.prime, worst < 1e-10, "N={n}");
        assert_eq!(set.certificate.complete(), mub::is_prime(n), "N={n}");
    }
}

#[test]
fn evolution_operator_is_diagonal_in_energy() {
    let (spec, _) = neg(3, 0.0);
    let rep = Representation::build(&spec).unwrap();
    let energies: Vec<f64> = rep.space.states().iter().map(|&(a, b)| spec.energy(a, b)).collect();
    let h = CMatrix::from_diagonal(&DVector::from_iterator(energies.len(), energies.iter().map(|&e| C64::new(e, 0.0))));
    assert!(max_abs(&(rep.h.matrix() - h)) < 1e-14);
}
