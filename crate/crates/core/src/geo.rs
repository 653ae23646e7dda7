//! Three-segment geometric paths on the Bloch sphere, the pulses that realise
//! them and their closed-form evolution operators.
//!
//! A state is parametrised as `cos(χ/2)|0⟩ + e^{iξ} sin(χ/2)|1⟩` and the
//! two-level Hamiltonian is `H = ½(Ω cos φ σx + Ω sin φ σy − Δ σz)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use ndarray::array;

use crate::error::{invalid, Error, Result};
use crate::qcore::{self, c64, cis, Mat, QOperator, TimeGrid, Vector, I};
use crate::tolerances as tol;

/// Single-qubit gates with a geometric and a dynamical construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateName {
    H,
    S,
    T,
}

impl GateName {
    pub const ALL: [GateName; 3] = [GateName::H, GateName::S, GateName::T];

    /// Textbook matrix.
    pub fn target(&self) -> Mat {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            GateName::H => array![[c64(r, 0.0), c64(r, 0.0)], [c64(r, 0.0), c64(-r, 0.0)]],
            GateName::S => array![[c64(1.0, 0.0), c64(0.0, 0.0)], [c64(0.0, 0.0), I]],
            GateName::T => array![
                [c64(1.0, 0.0), c64(0.0, 0.0)],
                [c64(0.0, 0.0), cis(PI / 4.0)]
            ],
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateName::H => "H",
            GateName::S => "S",
            GateName::T => "T",
        };
        f.write_str(s)
    }
}

impl FromStr for GateName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "h" => Ok(GateName::H),
            "S" | "s" => Ok(GateName::S),
            "T" | "t" => Ok(GateName::T),
            other => invalid(format!("unknown gate '{other}'")),
        }
    }
}

/// Boundary data of a longitude–latitude–longitude path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSpec {
    pub chi1: f64,
    pub chi2: f64,
    pub xi1: f64,
    pub xi2: f64,
    /// Declared total phase `γ′`, if the path was built from one.
    pub gamma_prime: Option<f64>,
}

impl PathSpec {
    pub fn new(chi1: f64, chi2: f64, xi1: f64, xi2: f64) -> Result<Self> {
        let p = Self {
            chi1,
            chi2,
            xi1,
            xi2,
            gamma_prime: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Path whose latitude is fixed by `γ′` and `Δξ` through [`solve_chi2`].
    pub fn from_phase(gamma_prime: f64, delta_xi: f64, chi1: Option<f64>, xi1: f64) -> Result<Self> {
        let chi2 = solve_chi2(gamma_prime, delta_xi)?;
        let p = Self {
            chi1: chi1.unwrap_or(chi2),
            chi2,
            xi1,
            xi2: xi1 + delta_xi,
            gamma_prime: Some(gamma_prime),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn delta_xi(&self) -> f64 {
        self.xi2 - self.xi1
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("chi1", self.chi1), ("chi2", self.chi2)] {
            if !(0.0..=PI).contains(&v) {
                return invalid(format!("{name} = {v} outside [0, π]"));
            }
        }
        if !(self.xi1.is_finite() && self.xi2.is_finite()) {
            return invalid("xi boundary values must be finite");
        }
        if let Some(g) = self.gamma_prime {
            let dxi = self.delta_xi();
            if dxi == 0.0 || (self.chi2.cos() - 2.0 * g / dxi).abs() > 1e-9 {
                return invalid("chi2 inconsistent with declared gamma_prime");
            }
        }
        Ok(())
    }
}

/// Latitude `χ₂ = arccos(2γ′/Δξ)` that accumulates total phase `γ′`.
pub fn solve_chi2(gamma_prime: f64, delta_xi: f64) -> Result<f64> {
    if delta_xi == 0.0 || !delta_xi.is_finite() {
        return invalid("delta_xi must be finite and nonzero");
    }
    let c = 2.0 * gamma_prime / delta_xi;
    if !c.is_finite() || c.abs() > 1.0 {
        return Err(Error::NoSolution(format!(
            "|2γ′/Δξ| = {} exceeds 1",
            c.abs()
        )));
    }
    Ok(c.acos())
}

/// `γ_g = −(ξ₂ − ξ₁)(1 − cos χ₂)/2`.
pub fn geometric_phase(path: &PathSpec) -> f64 {
    -path.delta_xi() * (1.0 - path.chi2.cos()) / 2.0
}

/// Preset paths for the universal set.
pub fn gate_preset(name: GateName) -> PathSpec {
    let (gp, dxi, chi1) = match name {
        GateName::H => (PI / 4.0, 3.0 * PI, Some(FRAC_PI_2)),
        GateName::S => (PI, 2.5 * PI, None),
        GateName::T => (PI, 9.0 * PI / 4.0, None),
    };
    PathSpec::from_phase(gp, dxi, chi1, -dxi / 2.0).expect("preset paths are valid")
}

/// Closed-form operator of the three-segment path.
pub fn analytic_unitary(path: &PathSpec) -> QOperator {
    let xm = path.delta_xi() / 2.0;
    let xp = (path.xi2 + path.xi1) / 2.0;
    let gp = geometric_phase(path) + xm;
    let (c, s) = (gp.cos(), gp.sin());
    let (c1, s1) = (path.chi1.cos(), path.chi1.sin());
    let m = array![
        [c64(c, s * c1) * cis(-xm), I * s * s1 * cis(-xp)],
        [I * s * s1 * cis(xp), c64(c, -s * c1) * cis(xm)]
    ];
    QOperator::new(m).expect("2x2")
}

/// Operator of a general noncyclic path between `(χ(0), ξ(0))` and
/// `(χ(τ), ξ(τ))` with geometric phase `gamma`.
pub fn general_evolution_operator(chi0: f64, chi_tau: f64, xi0: f64, xi_tau: f64, gamma: f64) -> QOperator {
    let cm = (chi_tau - chi0) / 2.0;
    let cp = (chi_tau + chi0) / 2.0;
    let xm = (xi_tau - xi0) / 2.0;
    let xp = (xi_tau + xi0) / 2.0;
    let gp = gamma + xm;
    let (c, s) = (gp.cos(), gp.sin());
    let m = array![
        [
            c64(c * cm.cos(), s * cp.cos()) * cis(-xm),
            c64(-c * cm.sin(), s * cp.sin()) * cis(-xp)
        ],
        [
            c64(c * cm.sin(), s * cp.sin()) * cis(xp),
            c64(c * cm.cos(), -s * cp.cos()) * cis(xm)
        ]
    ];
    QOperator::new(m).expect("2x2")
}

/// Amplitude profile family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Square,
    /// `Ω(t) = Ω_m sin(πt/τ)`.
    Sine,
}

/// Amplitude law `Ω(t)` on `[0, duration]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub shape: Shape,
    pub peak: f64,
    pub duration: f64,
}

impl Envelope {
    /// Envelope of the given shape and peak that encloses `area`.
    pub fn with_area(shape: Shape, peak: f64, area: f64) -> Self {
        let duration = match shape {
            Shape::Square => area / peak,
            Shape::Sine => PI * area / (2.0 * peak),
        };
        Self {
            shape,
            peak,
            duration,
        }
    }

    pub fn omega(&self, s: f64) -> f64 {
        match self.shape {
            Shape::Square => self.peak,
            Shape::Sine => self.peak * (PI * s / self.duration).sin(),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self.shape {
            Shape::Square => 0.0,
            Shape::Sine => self.peak * PI / self.duration * (PI * s / self.duration).cos(),
        }
    }

    /// `∫₀ˢ Ω dt`.
    pub fn area_until(&self, s: f64) -> f64 {
        match self.shape {
            Shape::Square => self.peak * s,
            Shape::Sine => self.peak * self.duration / PI * (1.0 - (PI * s / self.duration).cos()),
        }
    }

    pub fn area(&self) -> f64 {
        self.area_until(self.duration)
    }
}

/// Amplitude profile requested from the synthesiser.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Profile {
    pub shape: Shape,
    pub peak: f64,
}

impl Profile {
    pub fn square(peak: f64) -> Self {
        Self {
            shape: Shape::Square,
            peak,
        }
    }

    pub fn sine(peak: f64) -> Self {
        Self {
            shape: Shape::Sine,
            peak,
        }
    }
}

/// One control segment. The phase follows the enclosed area,
/// `φ = φ₀ + k_φ·A(s)`, and the detuning follows the amplitude,
/// `Δ = k_Δ·Ω(s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub envelope: Envelope,
    pub phi0: f64,
    pub phi_per_area: f64,
    pub delta_per_omega: f64,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.envelope.duration
    }

    pub fn omega(&self, s: f64) -> f64 {
        self.envelope.omega(s)
    }

    pub fn phi(&self, s: f64) -> f64 {
        self.phi0 + self.phi_per_area * self.envelope.area_until(s)
    }

    pub fn delta(&self, s: f64) -> f64 {
        self.delta_per_omega * self.envelope.omega(s)
    }

    /// Field vector `B = (Ω cos φ, Ω sin φ, −Δ)` at local time `s`.
    pub fn field(&self, s: f64) -> [f64; 3] {
        let om = self.omega(s);
        let ph = self.phi(s);
        [om * ph.cos(), om * ph.sin(), -self.delta(s)]
    }

    /// Two-level Hamiltonian at local time `s`.
    pub fn hamiltonian(&self, s: f64) -> Mat {
        field_hamiltonian(self.field(s))
    }

    /// Closed-form propagator. In the area variable the Hamiltonian is `Ω·h(a)`
    /// with `h` static in the frame co-rotating with φ, so
    /// `U = R(φ(A)) exp(−iA·½(σx − (k_Δ + k_φ)σz)) R(φ₀)†`, `R(φ) = exp(−iφσz/2)`.
    pub fn exact_propagator(&self) -> Mat {
        let a = self.envelope.area();
        let inner = qcore::step_unitary(
            &field_hamiltonian([1.0, 0.0, -(self.delta_per_omega + self.phi_per_area)]),
            a,
        );
        let r = |ph: f64| array![[qcore::cis(-0.5 * ph), qcore::ZERO], [qcore::ZERO, qcore::cis(0.5 * ph)]];
        let r0 = r(self.phi0).mapv(|z| z.conj());
        r(self.phi0 + self.phi_per_area * a).dot(&inner).dot(&r0)
    }
}

/// `½ B·σ`.
pub fn field_hamiltonian(b: [f64; 3]) -> Mat {
    array![
        [c64(0.5 * b[2], 0.0), c64(0.5 * b[0], -0.5 * b[1])],
        [c64(0.5 * b[0], 0.5 * b[1]), c64(-0.5 * b[2], 0.0)]
    ]
}

/// Ordered list of control segments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PulseSequence {
    pub segments: Vec<Segment>,
}

impl PulseSequence {
    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|s| s.duration()).sum()
    }

    pub fn total_area(&self) -> f64 {
        self.segments.iter().map(|s| s.envelope.area()).sum()
    }

    pub fn areas(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.envelope.area()).collect()
    }

    /// Appends `other` after `self` in time.
    pub fn then(mut self, other: &PulseSequence) -> Self {
        self.segments.extend_from_slice(&other.segments);
        self
    }

    /// Propagator of the two-level Hamiltonian, one segment at a time.
    pub fn propagate(&self, max_step: f64) -> Result<QOperator> {
        let mut u = qcore::identity(2);
        for seg in &self.segments {
            let grid = TimeGrid::new(0.0, seg.duration(), max_step)?;
            let us = qcore::propagate_mat(&|s| seg.hamiltonian(s), &grid, 2)?;
            u = us.dot(&u);
        }
        let e = qcore::unitarity_error(&u);
        if e > tol::PROPAGATOR_UNITARY {
            return Err(Error::NumericFailure(format!("pulse propagator lost unitarity ({e:.3e})")));
        }
        QOperator::new(u)
    }

    /// Product of the closed-form segment propagators.
    pub fn propagate_exact(&self) -> Result<QOperator> {
        let mut u = qcore::identity(2);
        for seg in &self.segments {
            u = seg.exact_propagator().dot(&u);
        }
        QOperator::new(u)
    }
}

/// Builds the three-segment pulse for `path` with the given amplitude profile.
/// Zero-area segments are omitted.
pub fn synthesize(path: &PathSpec, profile: Profile) -> Result<PulseSequence> {
    path.validate()?;
    if !(profile.peak > 0.0) || !profile.peak.is_finite() {
        return invalid("amplitude profile must be strictly positive");
    }
    let dxi = path.delta_xi();
    let s2 = (2.0 * path.chi2).sin();
    if dxi != 0.0 && path.chi2.cos().abs() < 1e-12 {
        return Err(Error::InfiniteDetuning(
            "latitude at the equator requires tan χ₂ → ∞".into(),
        ));
    }
    let dchi = path.chi2 - path.chi1;
    let up = dchi > 0.0;
    let mut segs = Vec::new();
    let mut push = |area: f64, phi0: f64, kphi: f64, kdelta: f64| {
        if area > 1e-15 {
            segs.push(Segment {
                envelope: Envelope::with_area(profile.shape, profile.peak, area),
                phi0,
                phi_per_area: kphi,
                delta_per_omega: kdelta,
            });
        }
    };
    let a1 = dchi.abs();
    push(a1, if up { path.xi1 + FRAC_PI_2 } else { path.xi1 - FRAC_PI_2 }, 0.0, 0.0);
    if dxi != 0.0 && s2 != 0.0 {
        let sgn = dxi.signum();
        let a2 = dxi.abs() * s2.abs() / 2.0;
        let kxi = sgn * 2.0 / s2.abs();
        let off = if sgn * s2 > 0.0 { PI } else { 0.0 };
        let kdelta = -kxi * path.chi2.sin().powi(2);
        push(a2, path.xi1 + off, kxi, kdelta);
    }
    push(a1, if up { path.xi2 - FRAC_PI_2 } else { path.xi2 + FRAC_PI_2 }, 0.0, 0.0);
    Ok(PulseSequence { segments: segs })
}

/// Initial evolution state `|Ψ₀(0)⟩` of a path.
pub fn path_state(chi: f64, xi: f64) -> Vector {
    ndarray::arr1(&[c64((chi / 2.0).cos(), 0.0), cis(xi) * (chi / 2.0).sin()])
}

/// Propagates `|Ψ₀⟩` through `pulse` and returns the final state together
/// with `γ_d = −∫⟨Ψ₀|H|Ψ₀⟩dt` (midpoint quadrature on the propagation steps).
pub fn evolve_with_dynamical_phase(pulse: &PulseSequence, path: &PathSpec, max_step: f64) -> Result<(Vector, f64)> {
    let mut psi = path_state(path.chi1, path.xi1);
    let mut gd = 0.0;
    for seg in &pulse.segments {
        let grid = TimeGrid::new(0.0, seg.duration(), max_step)?;
        qcore::midpoint_steps(&|s| seg.hamiltonian(s), &grid, |_, dt, h| {
            let half = qcore::step_unitary(h, 0.5 * dt).dot(&psi);
            let e: f64 = half
                .iter()
                .zip(h.dot(&half).iter())
                .map(|(a, b)| (a.conj() * b).re)
                .sum();
            gd -= e * dt;
            psi = qcore::step_unitary(h, dt).dot(&psi);
            Ok(())
        })?;
    }
    Ok((psi, gd))
}

/// Dynamical phase accumulated by the path's evolution state.
pub fn dynamical_phase(pulse: &PulseSequence, path: &PathSpec) -> Result<f64> {
    Ok(evolve_with_dynamical_phase(pulse, path, tol::PULSE_MAX_STEP)?.1)
}

/// Total phase `f₀(τ)` of the evolution state relative to `|ψ₀(χ₁, ξ₂)⟩`.
pub fn total_phase(pulse: &PulseSequence, path: &PathSpec) -> Result<f64> {
    let (psi, _) = evolve_with_dynamical_phase(pulse, path, tol::PULSE_MAX_STEP)?;
    let end = path_state(path.chi1, path.xi2);
    let ov: num_complex::Complex64 = end.iter().zip(psi.iter()).map(|(a, b)| a.conj() * b).sum();
    Ok(ov.arg())
}
