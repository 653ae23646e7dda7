use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use geogate::qcore::*;
use geogate::tolerances as tol;
use geogate::Error;
use ndarray::array;
use proptest::prelude::*;

fn random_hermitian(n: usize, vals: &[f64]) -> Mat {
    let mut h = zeros(n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            if i == j {
                h[[i, i]] = c64(vals[k % vals.len()], 0.0);
                k += 1;
            } else {
                let z = c64(vals[k % vals.len()], vals[(k + 1) % vals.len()]);
                k += 2;
                h[[i, j]] = z;
                h[[j, i]] = z.conj();
            }
        }
    }
    h
}

/// `exp(−iHdt)` through the Hermitian eigendecomposition.
fn expm_eig(h: &Mat, dt: f64) -> Mat {
    let n = h.nrows();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| nalgebra::Complex::new(h[[i, j]].re, h[[i, j]].im));
    let e = nalgebra::SymmetricEigen::new(m);
    let mut out = zeros(n);
    for k in 0..n {
        let ph = cis(-e.eigenvalues[k] * dt);
        for i in 0..n {
            for j in 0..n {
                let a = e.eigenvectors[(i, k)];
                let b = e.eigenvectors[(j, k)];
                out[[i, j]] += ph * c64(a.re, a.im) * c64(b.re, -b.im);
            }
        }
    }
    out
}

fn sx() -> QOperator {
    QOperator::new(sigma_x()).unwrap()
}

fn sz() -> QOperator {
    QOperator::new(sigma_z()).unwrap()
}

#[test]
fn kron_of_identities_is_identity() {
    let i2 = QOperator::identity(2);
    let k = kron_op(&i2, &i2);
    assert_eq!(k.dim(), 4);
    assert_eq!(k.mat(), &identity(4));
}

#[test]
fn kron_sigma_z_identity_is_diagonal() {
    let k = kron(&sigma_z(), &identity(2));
    let expect = Mat::from_diag(&ndarray::arr1(&[ONE, ONE, -ONE, -ONE]));
    assert_eq!(k, expect);
}

#[test]
fn kron_mixed_product_rule() {
    let a = random_hermitian(2, &[0.3, -1.2, 0.7, 0.1]);
    let b = random_hermitian(2, &[1.1, 0.4, -0.5, 0.9]);
    let c = step_unitary(&random_hermitian(2, &[0.2, 0.8, -0.3, 1.5]), 0.7);
    let d = random_hermitian(2, &[-0.6, 0.2, 0.25, -1.0]);
    let lhs = kron(&a, &b).dot(&kron(&c, &d));
    let rhs = kron(&a.dot(&c), &b.dot(&d));
    assert!(max_abs(&(lhs - rhs)) < 1e-14);
}

#[test]
fn embed_places_operator_on_site() {
    let e = embed(&sigma_z(), 1, &[2, 2, 3]);
    assert_eq!(e.dim(), (12, 12));
    let expect = kron(&kron(&identity(2), &sigma_z()), &identity(3));
    assert_eq!(e, expect);
}

#[test]
fn exponential_of_zero_is_identity() {
    let h = QOperator::hermitian(sigma_x()).unwrap();
    let u = matrix_exponential(&h, 0.0).unwrap();
    assert!(max_abs(&(u.mat() - &identity(2))) < 1e-15);
}

#[test]
fn half_rabi_period_gives_minus_i_sigma_x() {
    let omega = 2.3;
    let h = QOperator::hermitian(sigma_x().mapv(|z| z * (omega / 2.0))).unwrap();
    let u = matrix_exponential(&h, PI / omega).unwrap();
    let expect = sigma_x().mapv(|z| -I * z);
    assert!(max_abs(&(u.mat() - &expect)) < 1e-12);
}

#[test]
fn exponential_matches_eigendecomposition_oracle() {
    let vals = [0.31, -1.7, 2.2, 0.05, -0.9, 1.3, 0.6, -2.4, 0.77, 1.9, -0.12, 0.48, -1.05, 2.8, 0.2, -0.66];
    let h = random_hermitian(4, &vals);
    for dt in [0.01, 0.3, 1.7, 12.0] {
        let u = matrix_exponential(&QOperator::hermitian(h.clone()).unwrap(), dt).unwrap();
        let oracle = expm_eig(&h, dt);
        assert!(max_abs(&(u.mat() - &oracle)) <= 1e-10, "dt = {dt}");
        assert!(unitarity_error(u.mat()) <= tol::EXPM_UNITARY);
    }
}

#[test]
fn exponential_rejects_non_hermitian() {
    let bad = QOperator::new(array![[ONE, ONE], [ZERO, ONE]]).unwrap();
    assert!(matches!(matrix_exponential(&bad, 1.0), Err(Error::InvalidArgument(_))));
    assert!(QOperator::hermitian(array![[ONE, ONE], [ZERO, ONE]]).is_err());
}

#[test]
fn closed_form_two_level_step_matches_series() {
    let h = random_hermitian(2, &[0.4, -2.0, 1.3, 0.7]);
    for dt in [1e-12, 1e-3, 0.4, 3.0] {
        let fast = step_unitary(&h, dt);
        let slow = expm(&h.mapv(|z| -I * z * dt));
        assert!(max_abs(&(fast - slow)) < 1e-13, "dt = {dt}");
    }
}

#[test]
fn constant_hamiltonian_propagation_matches_exponential() {
    let h = random_hermitian(3, &[0.5, 1.1, -0.3, 0.8, 0.2, -1.4, 0.9, 0.1, 0.35]);
    let grid = TimeGrid::new(0.0, 2.5, 0.01).unwrap();
    let u = propagate_tdse(&|_| h.clone(), &grid).unwrap();
    let v = matrix_exponential(&QOperator::hermitian(h.clone()).unwrap(), 2.5).unwrap();
    assert!(max_abs(&(u.mat() - v.mat())) <= 1e-9);
}

fn chirp(t: f64) -> Mat {
    let b = [1.3 * (2.0 * t).cos(), 0.7 * t.sin(), 0.4 + 0.3 * t];
    array![
        [c64(0.5 * b[2], 0.0), c64(0.5 * b[0], -0.5 * b[1])],
        [c64(0.5 * b[0], 0.5 * b[1]), c64(-0.5 * b[2], 0.0)]
    ]
}

#[test]
fn halving_the_step_changes_little() {
    let g = TimeGrid::new(0.0, 3.0, 2e-4).unwrap();
    let a = propagate_tdse(&chirp, &g).unwrap();
    let b = propagate_tdse(&chirp, &g.halved()).unwrap();
    assert!(max_abs(&(a.mat() - b.mat())) <= 1e-8);
}

#[test]
fn propagation_composes_over_adjacent_windows() {
    let whole = propagate_tdse(&chirp, &TimeGrid::new(0.0, 2.0, 1e-3).unwrap()).unwrap();
    let first = propagate_tdse(&chirp, &TimeGrid::new(0.0, 0.8, 1e-3).unwrap()).unwrap();
    let second = propagate_tdse(&chirp, &TimeGrid::new(0.8, 2.0, 1e-3).unwrap()).unwrap();
    let comp = second.dot(&first);
    assert!(max_abs(&(whole.mat() - comp.mat())) <= 1e-8);
}

#[test]
fn propagation_rejects_non_finite_entries() {
    let g = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
    let r = propagate_tdse(&|_| array![[c64(f64::NAN, 0.0), ZERO], [ZERO, ONE]], &g);
    assert!(matches!(r, Err(Error::NumericFailure(_))));
}

#[test]
fn propagation_checks_hermiticity() {
    let g = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
    let r = propagate_tdse(&|_| array![[ZERO, ONE], [ZERO, ZERO]], &g);
    assert!(matches!(r, Err(Error::InvalidArgument(_))));
}

#[test]
fn time_grid_validation() {
    assert!(TimeGrid::new(1.0, 0.0, 0.1).is_err());
    assert!(TimeGrid::new(0.0, 1.0, 0.0).is_err());
    assert!(TimeGrid::new(0.0, 1.0, -1.0).is_err());
    let g = TimeGrid::new(0.0, 1.0, 0.3).unwrap();
    assert_eq!(g.coarse_steps().0, 4);
    assert_eq!(TimeGrid::new(2.0, 2.0, 0.1).unwrap().coarse_steps().0, 0);
}

#[test]
fn distance_of_operator_to_itself_is_zero() {
    let u = QOperator::new(step_unitary(&sigma_x(), 0.4)).unwrap();
    assert_eq!(distance_up_to_global_phase(&u, &u).unwrap(), 0.0);
}

#[test]
fn distance_ignores_global_phase() {
    let u = QOperator::new(step_unitary(&random_hermitian(3, &[0.2, 1.0, -0.4, 0.7, 1.5, 0.3]), 1.1)).unwrap();
    let v = QOperator::new(u.mat().mapv(|z| z * cis(PI / 7.0))).unwrap();
    assert!(distance_up_to_global_phase(&u, &v).unwrap() <= 1e-12);
}

#[test]
fn distance_between_orthogonal_paulis_matches_phase_grid() {
    let d = distance_up_to_global_phase(&sx(), &sz()).unwrap();
    assert!(d > 0.0);
    // brute-force minimum of the max-norm over a fine phase grid
    let mut best = f64::INFINITY;
    let n = 200_000;
    for k in 0..n {
        let ph = cis(2.0 * PI * k as f64 / n as f64);
        let diff = sigma_x() - sigma_z().mapv(|z| z * ph);
        best = best.min(max_abs(&diff));
    }
    assert!((d - best).abs() <= 1e-4, "{d} vs {best}");
}

#[test]
fn distance_rejects_dimension_mismatch() {
    let r = distance_up_to_global_phase(&QOperator::identity(2), &QOperator::identity(3));
    assert!(matches!(r, Err(Error::InvalidArgument(_))));
}

#[test]
fn operator_flags() {
    assert!(QOperator::new(Mat::zeros((2, 3))).is_err());
    assert!(QOperator::unitary(sigma_y()).unwrap().is_unitary());
    assert!(QOperator::unitary(sigma_y().mapv(|z| z * 1.01)).is_err());
    assert!(QOperator::hermitian(sigma_y()).unwrap().is_hermitian());
}

#[test]
fn state_invariants() {
    let v = ndarray::arr1(&[c64(0.6, 0.0), c64(0.0, 0.8)]);
    let s = QState::pure(v.clone()).unwrap();
    assert_eq!(s.dim(), 2);
    let rho = s.to_density();
    assert!(QState::density(rho.clone()).is_ok());
    assert_abs_diff_eq!(trace(&rho).re, 1.0, epsilon = 1e-15);
    assert!(QState::pure(ndarray::arr1(&[ONE, ONE])).is_err());
    let neg = Mat::from_diag(&ndarray::arr1(&[c64(1.1, 0.0), c64(-0.1, 0.0)]));
    assert!(QState::density(neg).is_err());
    let mut non_herm = identity(2).mapv(|z| z * 0.5);
    non_herm[[0, 1]] = c64(0.1, 0.0);
    assert!(QState::density(non_herm).is_err());
    let wrong_trace = identity(2);
    assert!(QState::density(wrong_trace).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn propagators_stay_unitary(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, w in 0.1f64..5.0, t1 in 0.1f64..4.0) {
        let h = move |t: f64| {
            let x = a * (w * t).cos();
            let y = b * (w * t).sin();
            array![[c64(0.5 * c, 0.0), c64(0.5 * x, -0.5 * y)], [c64(0.5 * x, 0.5 * y), c64(-0.5 * c, 0.0)]]
        };
        let u = propagate_tdse(&h, &TimeGrid::new(0.0, t1, 0.01).unwrap()).unwrap();
        prop_assert!(unitarity_error(u.mat()) <= tol::PROPAGATOR_UNITARY);
    }

    #[test]
    fn exponentials_are_unitary(v in proptest::collection::vec(-4.0f64..4.0, 9), dt in -3.0f64..3.0) {
        let h = random_hermitian(3, &v);
        let u = matrix_exponential(&QOperator::hermitian(h).unwrap(), dt).unwrap();
        prop_assert!(unitarity_error(u.mat()) <= tol::EXPM_UNITARY);
    }

    #[test]
    fn global_phase_never_matters(v in proptest::collection::vec(-2.0f64..2.0, 4), th in -10.0f64..10.0) {
        let u = QOperator::new(step_unitary(&random_hermitian(2, &v), 0.9)).unwrap();
        let w = QOperator::new(u.mat().mapv(|z| z * cis(th))).unwrap();
        prop_assert!(distance_up_to_global_phase(&u, &w).unwrap() <= 1e-12);
    }

    #[test]
    fn pure_state_densities_are_valid(re in proptest::collection::vec(-1.0f64..1.0, 3), im in proptest::collection::vec(-1.0f64..1.0, 3)) {
        let raw: Vec<C64> = re.iter().zip(&im).map(|(a, b)| c64(*a, *b)).collect();
        let n = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let v = ndarray::Array1::from_iter(raw.iter().map(|z| z / n));
        let s = QState::pure(v).unwrap();
        prop_assert!(QState::density(s.to_density()).is_ok());
    }
}
