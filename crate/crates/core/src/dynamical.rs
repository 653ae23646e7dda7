//! Resonant-rotation baselines and first-order DRAG correction.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{invalid, Result};
use crate::geo::{Envelope, GateName, PulseSequence, Segment, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Resonant rotation `R_a(θ) = exp(−iθσ_a/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationSpec {
    pub axis: Axis,
    pub theta: f64,
    pub envelope: Shape,
    pub omega_peak: f64,
}

/// Single resonant segment realising `spec`. Negative angles flip the phase by π.
pub fn rotation_pulse(spec: &RotationSpec) -> Result<PulseSequence> {
    if !(spec.theta > -2.0 * PI && spec.theta <= 2.0 * PI) {
        return invalid(format!("rotation angle {} outside (−2π, 2π]", spec.theta));
    }
    if !(spec.omega_peak > 0.0) {
        return invalid("rotation peak amplitude must be positive");
    }
    if spec.theta == 0.0 {
        return Ok(PulseSequence::default());
    }
    let mut phi = match spec.axis {
        Axis::X => 0.0,
        Axis::Y => FRAC_PI_2,
    };
    if spec.theta < 0.0 {
        phi += PI;
    }
    Ok(PulseSequence {
        segments: vec![Segment {
            envelope: Envelope::with_area(spec.envelope, spec.omega_peak, spec.theta.abs()),
            phi0: phi,
            phi_per_area: 0.0,
            delta_per_omega: 0.0,
        }],
    })
}

/// Rotation list in time order (rightmost factor of the operator product first).
pub fn composition(name: GateName) -> Vec<(Axis, f64)> {
    match name {
        GateName::H => vec![(Axis::Y, FRAC_PI_2), (Axis::X, PI)],
        GateName::S => vec![(Axis::Y, FRAC_PI_2), (Axis::X, FRAC_PI_2), (Axis::Y, -FRAC_PI_2)],
        GateName::T => vec![(Axis::Y, FRAC_PI_2), (Axis::X, FRAC_PI_4), (Axis::Y, -FRAC_PI_2)],
    }
}

/// Composite resonant pulse for `name`.
pub fn dynamical_gate(name: GateName, envelope: Shape, omega_peak: f64) -> Result<PulseSequence> {
    let mut seq = PulseSequence::default();
    for (axis, theta) in composition(name) {
        let p = rotation_pulse(&RotationSpec {
            axis,
            theta,
            envelope,
            omega_peak,
        })?;
        seq = seq.then(&p);
    }
    Ok(seq)
}

/// `Ω_m sin(πt/τ)` on `[0, τ]`.
pub fn sine_envelope(omega_m: f64, tau: f64) -> Result<Envelope> {
    if !(omega_m > 0.0 && tau > 0.0) {
        return invalid("sine envelope needs positive peak and duration");
    }
    Ok(Envelope {
        shape: Shape::Sine,
        peak: omega_m,
        duration: tau,
    })
}

/// Resonant drive field `B = (Ω cos φ, Ω sin φ, b_z)` with analytic derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveField {
    pub envelope: Envelope,
    pub phi: f64,
    pub bz: f64,
}

impl DriveField {
    pub fn from_segment(seg: &Segment) -> Self {
        Self {
            envelope: seg.envelope,
            phi: seg.phi0,
            bz: 0.0,
        }
    }

    pub fn b(&self, t: f64) -> [f64; 3] {
        let om = self.envelope.omega(t);
        [om * self.phi.cos(), om * self.phi.sin(), self.bz]
    }

    pub fn db(&self, t: f64) -> [f64; 3] {
        let d = self.envelope.derivative(t);
        [d * self.phi.cos(), d * self.phi.sin(), 0.0]
    }
}

/// `B_C = B + B_D` with `B_D = (−Ḃ_y + B_zB_x, Ḃ_x + B_zB_y, 0)/(2α)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectedField {
    pub base: DriveField,
    /// Anharmonicity; `None` leaves the field uncorrected.
    pub alpha: Option<f64>,
}

impl CorrectedField {
    pub fn uncorrected(base: DriveField) -> Self {
        Self { base, alpha: None }
    }

    /// Correction term alone.
    pub fn correction(&self, t: f64) -> [f64; 3] {
        match self.alpha {
            None => [0.0; 3],
            Some(a) => {
                let b = self.base.b(t);
                let db = self.base.db(t);
                [(-db[1] + b[2] * b[0]) / (2.0 * a), (db[0] + b[2] * b[1]) / (2.0 * a), 0.0]
            }
        }
    }

    pub fn b(&self, t: f64) -> [f64; 3] {
        let b = self.base.b(t);
        let d = self.correction(t);
        [b[0] + d[0], b[1] + d[1], b[2] + d[2]]
    }
}

/// Adds the DRAG quadrature for anharmonicity `alpha`.
pub fn drag_correct(field: DriveField, alpha: f64) -> Result<CorrectedField> {
    if alpha == 0.0 || !alpha.is_finite() {
        return invalid("DRAG correction needs a finite nonzero anharmonicity");
    }
    Ok(CorrectedField {
        base: field,
        alpha: Some(alpha),
    })
}
