use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use geogate::dynamical::*;
use geogate::geo::{Envelope, GateName, PulseSequence, Shape};
use geogate::qcore::*;
use geogate::tolerances as tol;
use ndarray::array;

/// `exp(−iθσ_a/2)` written out.
fn rot(axis: Axis, theta: f64) -> Mat {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    match axis {
        Axis::X => array![[c64(c, 0.0), c64(0.0, -s)], [c64(0.0, -s), c64(c, 0.0)]],
        Axis::Y => array![[c64(c, 0.0), c64(-s, 0.0)], [c64(s, 0.0), c64(c, 0.0)]],
    }
}

fn op(m: Mat) -> QOperator {
    QOperator::new(m).unwrap()
}

fn spec(axis: Axis, theta: f64) -> RotationSpec {
    RotationSpec {
        axis,
        theta,
        envelope: Shape::Square,
        omega_peak: 1.0,
    }
}

fn prop(p: &PulseSequence) -> QOperator {
    p.propagate(tol::PULSE_MAX_STEP).unwrap()
}

#[test]
fn x_pi_rotation_is_minus_i_sigma_x() {
    let u = prop(&rotation_pulse(&spec(Axis::X, PI)).unwrap());
    let expect = op(sigma_x().mapv(|z| -I * z));
    assert!(distance_up_to_global_phase(&u, &expect).unwrap() <= 1e-9);
}

#[test]
fn y_half_pi_rotation() {
    let u = prop(&rotation_pulse(&spec(Axis::Y, FRAC_PI_2)).unwrap());
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let expect = op((identity(2) - sigma_y().mapv(|z| I * z)).mapv(|z| z * r));
    assert!(distance_up_to_global_phase(&u, &expect).unwrap() <= 1e-9);
}

#[test]
fn rotation_followed_by_its_inverse_is_identity() {
    for theta in [0.3, 1.0, PI, 1.9 * PI] {
        let p = rotation_pulse(&spec(Axis::X, theta))
            .unwrap()
            .then(&rotation_pulse(&spec(Axis::X, -theta)).unwrap());
        let u = prop(&p);
        assert!(distance_up_to_global_phase(&u, &QOperator::identity(2)).unwrap() <= 1e-9);
    }
}

#[test]
fn rotation_argument_checks() {
    assert!(rotation_pulse(&spec(Axis::X, 7.0)).is_err());
    let mut s = spec(Axis::X, 1.0);
    s.omega_peak = 0.0;
    assert!(rotation_pulse(&s).is_err());
    assert!(rotation_pulse(&spec(Axis::Y, 0.0)).unwrap().segments.is_empty());
}

#[test]
fn composite_areas() {
    let expect = [(GateName::H, 1.5 * PI), (GateName::S, 1.5 * PI), (GateName::T, 1.25 * PI)];
    for (g, area) in expect {
        let p = dynamical_gate(g, Shape::Square, 1.0).unwrap();
        assert!((p.total_area() - area).abs() < 1e-12, "{g}");
        let q = dynamical_gate(g, Shape::Sine, 1.0).unwrap();
        assert!((q.total_area() - area).abs() < 1e-12, "{g}");
    }
}

#[test]
fn compositions_produce_named_gates() {
    for g in GateName::ALL {
        // matrix-product oracle: later rotations multiply from the left
        let mut oracle = identity(2);
        for (axis, theta) in composition(g) {
            oracle = rot(axis, theta).dot(&oracle);
        }
        let target = op(g.target());
        assert!(distance_up_to_global_phase(&op(oracle), &target).unwrap() <= 1e-12, "{g}");
        let u = prop(&dynamical_gate(g, Shape::Square, 1.0).unwrap());
        assert!(distance_up_to_global_phase(&u, &target).unwrap() <= 1e-9, "{g}");
    }
}

#[test]
fn sine_envelope_compositions_match_targets() {
    for g in GateName::ALL {
        let u = dynamical_gate(g, Shape::Sine, 1.0).unwrap().propagate(2e-5).unwrap();
        assert!(distance_up_to_global_phase(&u, &op(g.target())).unwrap() <= 1e-9, "{g}");
    }
}

#[test]
fn s_and_t_relative_phases() {
    let s = prop(&dynamical_gate(GateName::S, Shape::Square, 1.0).unwrap());
    let t = prop(&dynamical_gate(GateName::T, Shape::Square, 1.0).unwrap());
    let rel = |u: &QOperator| (u.mat()[[1, 1]] / u.mat()[[0, 0]]).arg();
    assert!((rel(&s) - FRAC_PI_2).abs() < 1e-9);
    assert!((rel(&t) - FRAC_PI_4).abs() < 1e-9);
}

#[test]
fn sine_envelope_law() {
    let (om, tau) = (PI * PI / 4.0, 1.3);
    let e = sine_envelope(om, tau).unwrap();
    assert_eq!(e.omega(0.0), 0.0);
    assert!(e.omega(tau).abs() < 1e-12);
    assert!((e.omega(tau / 2.0) - om).abs() < 1e-12);
    assert!((e.area() - 2.0 * om * tau / PI).abs() < 1e-12);
    // composite Simpson rule
    let n = 2000;
    let h = tau / n as f64;
    let mut s = e.omega(0.0) + e.omega(tau);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * e.omega(k as f64 * h);
    }
    assert!((s * h / 3.0 - e.area()).abs() <= 1e-10);
    assert!(sine_envelope(0.0, 1.0).is_err());
    assert!(sine_envelope(1.0, -1.0).is_err());
}

fn square_field(bz: f64) -> DriveField {
    DriveField {
        envelope: Envelope::with_area(Shape::Square, 1.2, 2.0),
        phi: 0.4,
        bz,
    }
}

#[test]
fn drag_vanishes_for_constant_transverse_field() {
    let c = drag_correct(square_field(0.0), 3.0).unwrap();
    for t in [0.0, 0.5, 1.0] {
        assert_eq!(c.correction(t), [0.0; 3]);
        assert_eq!(c.b(t), c.base.b(t));
    }
}

#[test]
fn drag_for_sine_envelope() {
    let (om, tau, alpha) = (5.0, 0.8, 2.0 * PI * 240.0);
    let field = DriveField {
        envelope: sine_envelope(om, tau).unwrap(),
        phi: 0.0,
        bz: 0.0,
    };
    let c = drag_correct(field, alpha).unwrap();
    for k in 0..=10 {
        let t = tau * k as f64 / 10.0;
        let d = c.correction(t);
        let expect = PI * om / tau * (PI * t / tau).cos() / (2.0 * alpha);
        assert!(d[0].abs() < 1e-15);
        assert!((d[1] - expect).abs() < 1e-12);
        assert_eq!(d[2], 0.0);
    }
}

#[test]
fn drag_derivative_matches_finite_difference() {
    let field = DriveField {
        envelope: sine_envelope(3.0, 1.1).unwrap(),
        phi: 0.7,
        bz: 0.0,
    };
    let h = 1e-6;
    for t in [0.1, 0.5, 0.9] {
        let db = field.db(t);
        let (p, m) = (field.b(t + h), field.b(t - h));
        for a in 0..2 {
            assert!((db[a] - (p[a] - m[a]) / (2.0 * h)).abs() < 1e-6);
        }
    }
}

#[test]
fn drag_with_longitudinal_field() {
    let c = drag_correct(square_field(0.9), 2.0).unwrap();
    let b = c.base.b(0.3);
    let d = c.correction(0.3);
    assert!((d[0] - 0.9 * b[0] / 4.0).abs() < 1e-15);
    assert!((d[1] - 0.9 * b[1] / 4.0).abs() < 1e-15);
}

#[test]
fn drag_large_anharmonicity_limit() {
    let field = DriveField {
        envelope: sine_envelope(4.0, 0.5).unwrap(),
        phi: 1.1,
        bz: 0.3,
    };
    let c = drag_correct(field, 1e15).unwrap();
    for t in [0.0, 0.2, 0.4] {
        let (a, b) = (c.b(t), field.b(t));
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() <= 1e-12);
        }
    }
}

#[test]
fn drag_rejects_zero_anharmonicity() {
    assert!(drag_correct(square_field(0.0), 0.0).is_err());
    assert!(drag_correct(square_field(0.0), f64::NAN).is_err());
    let u = CorrectedField::uncorrected(square_field(0.0));
    assert_eq!(u.correction(0.2), [0.0; 3]);
}
