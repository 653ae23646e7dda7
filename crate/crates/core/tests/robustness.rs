use std::f64::consts::PI;

use geogate::geo::{GateName, Profile};
use geogate::qcore::*;
use geogate::robustness::*;
use geogate::tolerances as tol;
use proptest::prelude::*;

fn op(m: Mat) -> QOperator {
    QOperator::new(m).unwrap()
}

#[test]
fn zero_error_leaves_pulse_unchanged() {
    for scheme in [Scheme::Geometric, Scheme::Dynamical] {
        let p = nominal_pulse(scheme, GateName::H, Profile::sine(1.3)).unwrap();
        assert_eq!(inject_errors(&p, &ControlError::default()).unwrap(), p);
    }
}

#[test]
fn amplitude_error_scales_areas() {
    let p = nominal_pulse(Scheme::Geometric, GateName::T, Profile::square(1.0)).unwrap();
    let err = ControlError {
        epsilon: 0.1,
        ..Default::default()
    };
    let q = inject_errors(&p, &err).unwrap();
    for (a, b) in p.areas().iter().zip(q.areas()) {
        assert!((b - 1.1 * a).abs() < 1e-12);
    }
    // the programmed phase and detuning laws are unchanged in time
    for (s, e) in p.segments.iter().zip(&q.segments) {
        for t in [0.0, 0.3 * s.duration(), s.duration()] {
            assert!((s.phi(t) - e.phi(t)).abs() < 1e-12);
            assert!((s.delta(t) - e.delta(t)).abs() < 1e-12);
        }
    }
}

#[test]
fn detuning_error_follows_amplitude() {
    let p = nominal_pulse(Scheme::Dynamical, GateName::H, Profile::square(2.0)).unwrap();
    let err = ControlError {
        eta: 0.05,
        ..Default::default()
    };
    let q = inject_errors(&p, &err).unwrap();
    for s in &q.segments {
        assert!((s.delta(0.1) - 0.05 * s.omega(0.1)).abs() < 1e-15);
    }
}

#[test]
fn injection_rejects_bad_errors() {
    let p = nominal_pulse(Scheme::Dynamical, GateName::S, Profile::square(1.0)).unwrap();
    let bad = ControlError {
        epsilon: -1.0,
        ..Default::default()
    };
    assert!(inject_errors(&p, &bad).is_err());
    let nan = ControlError {
        eta: f64::NAN,
        ..Default::default()
    };
    assert!(inject_errors(&p, &nan).is_err());
}

#[test]
fn trace_fidelity_examples() {
    let u = op(step_unitary(&sigma_y(), 0.8));
    assert!((gate_fidelity_trace(&u, &u).unwrap() - 1.0).abs() < 1e-15);
    let id = QOperator::identity(2);
    for theta in [0.0, 0.4, 2.0, -3.0] {
        let v = op(identity(2).mapv(|z| z * cis(theta)));
        assert!((gate_fidelity_trace(&id, &v).unwrap() - 1.0).abs() < 1e-15);
    }
    let rx = op(sigma_x().mapv(|z| -I * z));
    assert!(gate_fidelity_trace(&id, &rx).unwrap().abs() < 1e-15);
    assert!(gate_fidelity_trace(&id, &QOperator::identity(3)).is_err());
}

#[test]
fn real_part_mode_sees_global_phase() {
    let id = QOperator::identity(2);
    let v = op(identity(2).mapv(|z| z * cis(PI / 3.0)));
    assert!((gate_fidelity_trace_mode(&id, &v, TraceMode::RealPart).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn scans_are_one_at_the_origin() {
    let grid = linspace(-0.1, 0.1, 5);
    for scheme in [Scheme::Geometric, Scheme::Dynamical] {
        for g in GateName::ALL {
            let r = scan2d(scheme, g, &grid, &grid).unwrap();
            assert!(r.failures.is_empty());
            assert!((r.value_at(2, 2) - 1.0).abs() <= 1e-9, "{scheme} {g}");
            for row in &r.values {
                for &v in row {
                    assert!((0.0..=1.0 + 1e-9).contains(&v));
                }
            }
        }
    }
}

#[test]
fn scans_are_deterministic_and_order_independent() {
    let a = [-0.1, 0.0, 0.05];
    let b = [0.05, -0.1, 0.0];
    let eta = [0.02, -0.08];
    let r1 = scan2d(Scheme::Geometric, GateName::T, &a, &eta).unwrap();
    let r2 = scan2d(Scheme::Geometric, GateName::T, &a, &eta).unwrap();
    assert_eq!(r1, r2);
    let r3 = scan2d(Scheme::Geometric, GateName::T, &b, &eta).unwrap();
    // b = a permuted by (1 2 0)
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        assert_eq!(r1.values[i], r3.values[j]);
    }
}

#[test]
fn scan_rejects_empty_grid() {
    assert!(scan2d(Scheme::Dynamical, GateName::H, &[], &[0.0]).is_err());
}

#[test]
fn scan_metadata() {
    let r = scan2d(Scheme::Dynamical, GateName::S, &[0.0], &[0.0, 0.1]).unwrap();
    assert_eq!(r.gate, "S");
    assert_eq!(r.scheme, "dynamical");
    assert_eq!(r.axis1_label, "epsilon");
    assert_eq!(r.axis2_label, "eta");
    assert_eq!(r.values.len(), 1);
    assert_eq!(r.values[0].len(), 2);
}

#[test]
fn geometric_t_beats_dynamical_t_on_single_error_cuts() {
    let pts = [-0.1, -0.05, 0.0, 0.05, 0.1];
    let g = scan2d(Scheme::Geometric, GateName::T, &pts, &pts).unwrap();
    let d = scan2d(Scheme::Dynamical, GateName::T, &pts, &pts).unwrap();
    for k in [0, 1, 3, 4] {
        assert!(g.values[k][2] >= d.values[k][2], "epsilon = {}", pts[k]);
        assert!(g.values[2][k] >= d.values[2][k], "eta = {}", pts[k]);
    }
}

#[test]
fn gate_times_at_unit_amplitude() {
    assert_eq!(gate_time(&Default::default()), 0.0);
    let g = nominal_pulse(Scheme::Geometric, GateName::H, Profile::square(1.0)).unwrap();
    // longitude legs asin(1/6), latitude 3π·cosχ₂·sinχ₂ with cosχ₂ = 1/6
    let expect = 2.0 * (1.0 / 6.0f64).asin() + 3.0 * PI * (1.0 / 6.0) * (35.0f64 / 36.0).sqrt();
    assert!((gate_time(&g) - expect).abs() < 1e-9);
    assert!((gate_time(&g) - 1.884).abs() < 1e-3);
    let d = nominal_pulse(Scheme::Dynamical, GateName::H, Profile::square(1.0)).unwrap();
    assert!((gate_time(&d) - 1.5 * PI).abs() < 1e-12);
}

#[test]
fn area_table_rows() {
    let rows = area_table(1.0).unwrap();
    assert_eq!(rows.len(), 6);
    let h = rows.iter().find(|r| r.gate == GateName::H && r.geometric_time == r.geometric_area).unwrap();
    assert!(h.geometric_area < h.dynamical_area);
    for r in &rows {
        assert!(r.geometric_time > 0.0 && r.dynamical_time > 0.0);
    }
}

#[test]
fn linspace_end_points() {
    let g = linspace(-0.2, 0.2, 41);
    assert_eq!(g.len(), 41);
    assert_eq!(g[0], -0.2);
    assert_eq!(g[40], 0.2);
    assert!(g[20].abs() < 1e-15);
    assert_eq!(linspace(0.3, 0.9, 1), vec![0.3]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn trace_fidelity_is_bounded(eps in -0.2f64..0.2, eta in -0.2f64..0.2) {
        let p = nominal_pulse(Scheme::Geometric, GateName::H, Profile::square(1.0)).unwrap();
        let ideal = p.propagate(tol::PULSE_MAX_STEP).unwrap();
        let q = inject_errors(&p, &ControlError { epsilon: eps, eta, ..Default::default() }).unwrap();
        let f = gate_fidelity_trace(&ideal, &q.propagate(tol::PULSE_MAX_STEP).unwrap()).unwrap();
        prop_assert!((0.0..=1.0 + 1e-9).contains(&f));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn closed_form_propagator_matches_time_stepping(eps in -0.2f64..0.2, eta in -0.2f64..0.2, sine in any::<bool>()) {
        let prof = if sine { Profile::sine(1.4) } else { Profile::square(1.0) };
        for scheme in [Scheme::Geometric, Scheme::Dynamical] {
            let p = nominal_pulse(scheme, GateName::T, prof).unwrap();
            let q = inject_errors(&p, &ControlError { epsilon: eps, eta, ..Default::default() }).unwrap();
            let a = q.propagate_exact().unwrap();
            let b = q.propagate(tol::PULSE_MAX_STEP / 1.4).unwrap();
            prop_assert!(max_abs(&(a.mat() - b.mat())) <= 1e-6);
        }
    }
}
