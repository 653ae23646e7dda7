//! Control-error injection and trace-fidelity scans.

use rayon::prelude::*;

use crate::dynamical::dynamical_gate;
use crate::error::{invalid, Result};
use crate::geo::{gate_preset, synthesize, GateName, Profile, PulseSequence, Shape};
use crate::qcore::{dagger, trace, QOperator};

/// Systematic control errors: amplitude `(1+ε)Ω`, detuning `Δ + ηΩ`, and
/// qubit-frequency drifts `δ₁, δ₂` (rad/µs) consumed by the device models.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ControlError {
    pub epsilon: f64,
    pub eta: f64,
    pub delta1: f64,
    pub delta2: f64,
}

/// Applies amplitude and detuning errors to every segment. The programmed
/// phase law `φ(t)` and the nominal detuning law `Δ(t)` are kept as functions
/// of time; the extra detuning uses the erroneous amplitude.
pub fn inject_errors(pulse: &PulseSequence, err: &ControlError) -> Result<PulseSequence> {
    if !(err.epsilon.is_finite() && err.eta.is_finite()) {
        return invalid("control errors must be finite");
    }
    if err.epsilon <= -1.0 {
        return invalid("amplitude error must exceed −1");
    }
    let k = 1.0 + err.epsilon;
    let segments = pulse
        .segments
        .iter()
        .map(|s| {
            let mut e = *s;
            e.envelope.peak *= k;
            e.phi_per_area /= k;
            e.delta_per_omega = s.delta_per_omega / k + err.eta;
            e
        })
        .collect();
    Ok(PulseSequence { segments })
}

/// How the complex trace overlap is reduced to a real number.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TraceMode {
    #[default]
    Magnitude,
    RealPart,
}

/// `|Tr(U†V)|/dim`.
pub fn gate_fidelity_trace(u_ideal: &QOperator, u_err: &QOperator) -> Result<f64> {
    gate_fidelity_trace_mode(u_ideal, u_err, TraceMode::Magnitude)
}

pub fn gate_fidelity_trace_mode(u_ideal: &QOperator, u_err: &QOperator, mode: TraceMode) -> Result<f64> {
    if u_ideal.dim() != u_err.dim() {
        return invalid("dimension mismatch in trace fidelity");
    }
    let tr = trace(&dagger(u_ideal.mat()).dot(u_err.mat()));
    let n = u_ideal.dim() as f64;
    Ok(match mode {
        TraceMode::Magnitude => tr.norm() / n,
        TraceMode::RealPart => tr.re / n,
    })
}

/// Total duration of a pulse.
pub fn gate_time(pulse: &PulseSequence) -> f64 {
    pulse.total_time()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Geometric,
    Dynamical,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Geometric => "geometric",
            Scheme::Dynamical => "dynamical",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric" => Ok(Scheme::Geometric),
            "dynamical" => Ok(Scheme::Dynamical),
            o => invalid(format!("unknown scheme '{o}'")),
        }
    }
}

/// Ideal two-level pulse of `gate` under `scheme`.
pub fn nominal_pulse(scheme: Scheme, gate: GateName, profile: Profile) -> Result<PulseSequence> {
    match scheme {
        Scheme::Geometric => synthesize(&gate_preset(gate), profile),
        Scheme::Dynamical => dynamical_gate(gate, profile.shape, profile.peak),
    }
}

/// Uniform grid including both end points.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Labeled fidelity grid; `values[i][j]` belongs to `(axis1[i], axis2[j])`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub axis1_label: String,
    pub axis2_label: String,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub gate: String,
    pub scheme: String,
    /// Cells whose evaluation failed, with the error text.
    pub failures: Vec<(usize, usize, String)>,
}

impl ScanResult {
    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }
}

/// Two-level robustness scan over `(ε, η)`.
pub fn scan2d(scheme: Scheme, gate: GateName, eps_grid: &[f64], eta_grid: &[f64]) -> Result<ScanResult> {
    scan2d_with(scheme, gate, eps_grid, eta_grid, Profile::square(1.0), TraceMode::Magnitude)
}

pub fn scan2d_with(
    scheme: Scheme,
    gate: GateName,
    eps_grid: &[f64],
    eta_grid: &[f64],
    profile: Profile,
    mode: TraceMode,
) -> Result<ScanResult> {
    if eps_grid.is_empty() || eta_grid.is_empty() {
        return invalid("scan grids must be nonempty");
    }
    let pulse = nominal_pulse(scheme, gate, profile)?;
    let ideal = pulse.propagate_exact()?;
    let cells: Vec<(usize, usize)> = (0..eps_grid.len())
        .flat_map(|i| (0..eta_grid.len()).map(move |j| (i, j)))
        .collect();
    let out: Vec<Result<f64>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let err = ControlError {
                epsilon: eps_grid[i],
                eta: eta_grid[j],
                ..Default::default()
            };
            let p = inject_errors(&pulse, &err)?;
            let u = p.propagate_exact()?;
            gate_fidelity_trace_mode(&ideal, &u, mode)
        })
        .collect();
    let mut values = vec![vec![f64::NAN; eta_grid.len()]; eps_grid.len()];
    let mut failures = Vec::new();
    for (&(i, j), r) in cells.iter().zip(out) {
        match r {
            Ok(v) => values[i][j] = v,
            Err(e) => failures.push((i, j, e.to_string())),
        }
    }
    Ok(ScanResult {
        axis1_label: "epsilon".into(),
        axis2_label: "eta".into(),
        axis1: eps_grid.to_vec(),
        axis2: eta_grid.to_vec(),
        values,
        gate: gate.to_string(),
        scheme: scheme.to_string(),
        failures,
    })
}

/// Step ceiling scaled to the pulse's own time scale.

/// Pulse areas of both schemes at equal peak amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaRow {
    pub gate: GateName,
    pub shape: Shape,
    pub geometric_area: f64,
    pub dynamical_area: f64,
    pub geometric_time: f64,
    pub dynamical_time: f64,
}

/// Gate-time table at peak amplitude `omega`.
pub fn area_table(omega: f64) -> Result<Vec<AreaRow>> {
    let mut rows = Vec::new();
    for shape in [Shape::Square, Shape::Sine] {
        for gate in GateName::ALL {
            let prof = Profile { shape, peak: omega };
            let g = nominal_pulse(Scheme::Geometric, gate, prof)?;
            let d = nominal_pulse(Scheme::Dynamical, gate, prof)?;
            rows.push(AreaRow {
                gate,
                shape,
                geometric_area: g.total_area(),
                dynamical_area: d.total_area(),
                geometric_time: gate_time(&g),
                dynamical_time: gate_time(&d),
            });
        }
    }
    Ok(rows)
}
