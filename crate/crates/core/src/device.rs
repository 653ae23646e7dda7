//! Parametrically modulated transmon–resonator models.
//!
//! All Hamiltonians live in the interaction picture of the bare device, so a
//! coupling term between levels separated by `ω` carries `e^{iωt}` and the
//! frequency modulation contributes `e^{−iβcos(νt+φ)+iC}`. The constant `C`
//! keeps the accumulated modulation phase continuous across segments.

use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::array;

use crate::dynamical::{composition, drag_correct, CorrectedField, DriveField, RotationSpec};
use crate::error::{invalid, Error, Result};
use crate::geo::{self, analytic_unitary, field_hamiltonian, synthesize, GateName, PathSpec, Profile, PulseSequence, Shape};
use crate::qcore::{self, c64, cis, Mat, QOperator, TimeGrid, ZERO};
use crate::tolerances as tol;

const TWO_PI: f64 = 2.0 * PI;

/// Converts an `ω/2π` value in MHz to rad/µs.
pub fn mhz(f: f64) -> f64 {
    TWO_PI * f
}

/// Bessel function of the first kind, order one.
pub fn bessel_j1(x: f64) -> f64 {
    if x < 0.0 {
        return -bessel_j1(-x);
    }
    if x <= 8.0 {
        let h = x / 2.0;
        let h2 = h * h;
        let mut term = h;
        let mut sum = h;
        for k in 1..60 {
            term *= -h2 / (k as f64 * (k as f64 + 1.0));
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum
    } else {
        // Periodic trapezoid on the integral representation converges
        // geometrically once the node count exceeds |x|.
        let n = 64 + 2 * x.ceil() as usize;
        let mut s = 0.0;
        for k in 0..n {
            let th = TWO_PI * k as f64 / n as f64;
            s += (th - x * th.sin()).cos();
        }
        s / n as f64
    }
}

/// Location of the first maximum of `J₁`.
pub const J1_ARGMAX: f64 = 1.841_183_781_340_659_3;

/// Largest value of `J₁`.
pub fn bessel_j1_max() -> f64 {
    bessel_j1(J1_ARGMAX)
}

/// Smallest `β ≥ 0` with `J₁(β) = y`.
pub fn bessel_j1_inverse(y: f64) -> Result<f64> {
    let ymax = bessel_j1_max();
    if !(0.0..=ymax).contains(&y) {
        return Err(Error::UnreachableAmplitude(format!(
            "J1 = {y} outside [0, {ymax}]"
        )));
    }
    let (mut lo, mut hi) = (0.0, J1_ARGMAX);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j1(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Device couplings, detunings and anharmonicities (rad/µs) with truncations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviceParams {
    pub g_1a: f64,
    pub g_a2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub levels_transmon: usize,
    pub levels_resonator: usize,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            g_1a: mhz(20.0),
            g_a2: mhz(8.0),
            delta1: mhz(180.0),
            delta2: mhz(500.0),
            alpha1: mhz(240.0),
            alpha2: mhz(220.0),
            levels_transmon: 3,
            levels_resonator: 3,
        }
    }
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.g_1a > 0.0 && self.g_a2 > 0.0) {
            return invalid("couplings must be positive");
        }
        if self.levels_transmon < 3 || self.levels_resonator < 3 {
            return invalid("truncations must keep at least three levels");
        }
        Ok(())
    }
}

/// Default modulation indices of the single- and two-qubit operating points.
pub const BETA1: f64 = 2.1;
pub const BETA2: f64 = 1.2;

/// Modulation of one schedule segment on `[t_start, t_end]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulationSettings {
    pub t_start: f64,
    pub t_end: f64,
    pub nu: f64,
    pub beta: f64,
    pub phi: f64,
    /// Constant added to the modulation phase for continuity.
    pub offset: f64,
    /// Slow phase ramp `μ` (single) or `υ` (two-qubit).
    pub mu: f64,
    pub delta_l: f64,
    /// Bare transition frequency the sideband addresses.
    pub resonance: f64,
}

impl ModulationSettings {
    /// `(resonance − ν) + (Δ_L + μ)`, zero by construction.
    pub fn bookkeeping_residual(&self) -> f64 {
        (self.resonance - self.nu) + (self.delta_l + self.mu)
    }

    /// Accumulated modulation phase `−β cos(νt+φ) + C`.
    pub fn mod_phase(&self, t: f64) -> f64 {
        -self.beta * (self.nu * t + self.phi).cos() + self.offset
    }

    /// Single-segment settings starting at `t = 0` with continuous phase.
    pub fn constant(resonance: f64, beta: f64, phi: f64, mu: f64, delta_l: f64, duration: f64) -> Self {
        Self {
            t_start: 0.0,
            t_end: duration,
            nu: resonance + (delta_l + mu),
            beta,
            phi,
            offset: beta * phi.cos(),
            mu,
            delta_l,
            resonance,
        }
    }
}

fn lookup(schedule: &[ModulationSettings], t: f64) -> &ModulationSettings {
    let idx = schedule.partition_point(|m| m.t_end < t);
    &schedule[idx.min(schedule.len() - 1)]
}

/// One transition family `Σ a_k |i⟩⟨j| e^{iωt}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderTerm {
    pub freq: f64,
    pub entries: Vec<(usize, usize, f64)>,
}

/// Modulated coupling Hamiltonian with a static diagonal part.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderModel {
    pub dims: Vec<usize>,
    pub dim: usize,
    pub terms: Vec<LadderTerm>,
    pub diag: Vec<f64>,
    pub schedule: Vec<ModulationSettings>,
}

impl LadderModel {
    pub fn hamiltonian(&self, t: f64) -> Mat {
        let mut h = qcore::zeros(self.dim);
        for (k, &d) in self.diag.iter().enumerate() {
            h[[k, k]] = c64(d, 0.0);
        }
        if self.schedule.is_empty() {
            return h;
        }
        let m = lookup(&self.schedule, t);
        let f = cis(m.mod_phase(t));
        for term in &self.terms {
            let z = f * cis(term.freq * t);
            for &(i, j, a) in &term.entries {
                h[[i, j]] += z * a;
                h[[j, i]] += (z * a).conj();
            }
        }
        h
    }

    pub fn start(&self) -> f64 {
        self.schedule.first().map_or(0.0, |m| m.t_start)
    }

    pub fn end(&self) -> f64 {
        self.schedule.last().map_or(0.0, |m| m.t_end)
    }

    /// Adds `δ·n` for the transmon on register site `site`.
    pub fn add_drift(&mut self, site: usize, delta: f64) {
        for (k, d) in self.diag.iter_mut().enumerate() {
            *d += delta * occupation(k, site, &self.dims) as f64;
        }
    }

    /// Restriction to the basis states `block`. Fails if a coupling links the
    /// block to the rest of the space.
    pub fn restrict(&self, block: &[usize]) -> Result<LadderModel> {
        let pos = |k: usize| block.iter().position(|&b| b == k);
        let mut terms = Vec::new();
        for term in &self.terms {
            let mut entries = Vec::new();
            for &(i, j, a) in &term.entries {
                match (pos(i), pos(j)) {
                    (Some(p), Some(q)) => entries.push((p, q, a)),
                    (None, None) => {}
                    _ => return invalid("coupling leaves the requested block"),
                }
            }
            terms.push(LadderTerm {
                freq: term.freq,
                entries,
            });
        }
        Ok(LadderModel {
            dims: self.dims.clone(),
            dim: block.len(),
            terms,
            diag: block.iter().map(|&k| self.diag[k]).collect(),
            schedule: self.schedule.clone(),
        })
    }
}

/// Index of the product state with local occupations `occ`.
pub fn basis_index(occ: &[usize], dims: &[usize]) -> usize {
    occ.iter().zip(dims).fold(0, |acc, (&n, &d)| acc * d + n)
}

/// Occupation of `site` in the product state with index `k`.
pub fn occupation(k: usize, site: usize, dims: &[usize]) -> usize {
    let stride: usize = dims[site + 1..].iter().product();
    (k / stride) % dims[site]
}

/// Ladder family `g Σ_n √(n+1) |n+1⟩⟨n|_T ⊗ a_R e^{i(Δ−αn)t}` between a transmon
/// on `t_site` and a resonator on `r_site`.
fn sideband_terms(dims: &[usize], t_site: usize, r_site: usize, g: f64, delta: f64, alpha: f64) -> Vec<LadderTerm> {
    let dim: usize = dims.iter().product();
    let lt = dims[t_site];
    (0..lt - 1)
        .map(|n| {
            let mut entries = Vec::new();
            for k in 0..dim {
                if occupation(k, t_site, dims) != n {
                    continue;
                }
                let m = occupation(k, r_site, dims);
                if m == 0 {
                    continue;
                }
                let mut occ: Vec<usize> = (0..dims.len()).map(|s| occupation(k, s, dims)).collect();
                occ[t_site] += 1;
                occ[r_site] -= 1;
                let target = basis_index(&occ, dims);
                entries.push((target, k, g * ((n + 1) as f64).sqrt() * (m as f64).sqrt()));
            }
            LadderTerm {
                freq: delta - alpha * n as f64,
                entries,
            }
        })
        .collect()
}

/// Transmon `T₁` coupled to resonator `R_a`; basis `|n_T n_R⟩`.
pub fn single_logical_model(params: &DeviceParams, schedule: Vec<ModulationSettings>) -> LadderModel {
    let dims = vec![params.levels_transmon, params.levels_resonator];
    let dim = dims.iter().product();
    LadderModel {
        terms: sideband_terms(&dims, 0, 1, params.g_1a, params.delta1, params.alpha1),
        dims,
        dim,
        diag: vec![0.0; dim],
        schedule,
    }
}

/// Single-logical-qubit Hamiltonian at time `t` under one modulation segment.
pub fn single_logical_hamiltonian(params: &DeviceParams, m: &ModulationSettings, t: f64) -> QOperator {
    QOperator::new(single_logical_model(params, vec![*m]).hamiltonian(t)).expect("square")
}

/// Register `T₁ ⊗ R_a ⊗ T₂ ⊗ R_b` with the `R_a`–`T₂` sideband family.
pub fn two_logical_model(params: &DeviceParams, schedule: Vec<ModulationSettings>) -> LadderModel {
    let lt = params.levels_transmon;
    let lr = params.levels_resonator;
    let dims = vec![lt, lr, lt, lr];
    let dim = dims.iter().product();
    LadderModel {
        terms: sideband_terms(&dims, 2, 1, params.g_a2, params.delta2, params.alpha2),
        dims,
        dim,
        diag: vec![0.0; dim],
        schedule,
    }
}

pub fn two_logical_hamiltonian(params: &DeviceParams, m: &ModulationSettings, t: f64) -> QOperator {
    QOperator::new(two_logical_model(params, vec![*m]).hamiltonian(t)).expect("square")
}

/// Computational and auxiliary states of the encodings.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalEncoding {
    pub dims: Vec<usize>,
    pub basis: Vec<usize>,
    pub auxiliary: Option<usize>,
}

impl LogicalEncoding {
    /// `|0⟩_L = |10⟩`, `|1⟩_L = |01⟩`.
    pub fn single(params: &DeviceParams) -> Self {
        let dims = vec![params.levels_transmon, params.levels_resonator];
        Self {
            basis: vec![basis_index(&[1, 0], &dims), basis_index(&[0, 1], &dims)],
            auxiliary: None,
            dims,
        }
    }

    /// `{|1010⟩, |1001⟩, |0110⟩, |0101⟩}` with auxiliary `|0020⟩`.
    pub fn two(params: &DeviceParams) -> Self {
        let lt = params.levels_transmon;
        let lr = params.levels_resonator;
        let dims = vec![lt, lr, lt, lr];
        let b = |o: [usize; 4]| basis_index(&o, &dims);
        Self {
            basis: vec![b([1, 0, 1, 0]), b([1, 0, 0, 1]), b([0, 1, 1, 0]), b([0, 1, 0, 1])],
            auxiliary: Some(b([0, 0, 2, 0])),
            dims,
        }
    }

    /// States with total excitation `n`.
    pub fn excitation_block(dims: &[usize], n: usize) -> Vec<usize> {
        let dim: usize = dims.iter().product();
        (0..dim)
            .filter(|&k| (0..dims.len()).map(|s| occupation(k, s, dims)).sum::<usize>() == n)
            .collect()
    }
}

/// Control of the effective two-level model in the frame rotating at `Δ_L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveControl {
    pub omega_l: f64,
    /// `φ_L(t) = phi_l0 + μ t`.
    pub phi_l0: f64,
    pub mu: f64,
    pub delta_l: f64,
    /// Ratio `|Δ_L + μ| / min(resonance, ν)`; the reduction assumes it is small.
    pub slow_ratio: f64,
}

impl EffectiveControl {
    pub fn phi_l(&self, t: f64) -> f64 {
        self.phi_l0 + self.mu * t
    }

    pub fn hamiltonian(&self, t: f64) -> Mat {
        let p = self.phi_l(t);
        field_hamiltonian([self.omega_l * p.cos(), self.omega_l * p.sin(), -self.delta_l])
    }
}

/// Resonant sideband reduction of a modulation segment; `g_eff` is the
/// matrix element of the addressed transition at `β = 0`.
pub fn effective_control(g_eff: f64, m: &ModulationSettings) -> Result<EffectiveControl> {
    if m.bookkeeping_residual().abs() > 1e-9 * m.nu.abs().max(1.0) {
        return invalid("resonance bookkeeping violated");
    }
    let slow = (m.delta_l + m.mu).abs() / m.resonance.abs().min(m.nu.abs()).max(1e-300);
    Ok(EffectiveControl {
        omega_l: 2.0 * bessel_j1(m.beta) * g_eff,
        phi_l0: m.phi - m.offset + FRAC_PI_2,
        mu: m.mu,
        delta_l: m.delta_l,
        slow_ratio: slow,
    })
}

/// Effective logical control of the single-qubit sideband.
pub fn effective_logical_hamiltonian(params: &DeviceParams, m: &ModulationSettings) -> Result<EffectiveControl> {
    effective_control(params.g_1a, m)
}

/// `exp(−iσ_z θ/2)`.
pub fn z_frame(theta: f64) -> Mat {
    array![[cis(-theta / 2.0), ZERO], [ZERO, cis(theta / 2.0)]]
}

/// Physical-frame propagator of the effective model over a schedule.
pub fn propagate_effective(g_eff: f64, schedule: &[ModulationSettings], max_step: f64) -> Result<Mat> {
    let mut u = qcore::identity(2);
    for m in schedule {
        let ec = effective_control(g_eff, m)?;
        let grid = TimeGrid::new(m.t_start, m.t_end, max_step)?;
        let us = qcore::propagate_mat(&|t| ec.hamiltonian(t), &grid, 2)?;
        let seg = z_frame(m.delta_l * m.t_end)
            .dot(&us)
            .dot(&qcore::dagger(&z_frame(m.delta_l * m.t_start)));
        u = seg.dot(&u);
    }
    Ok(u)
}

/// How the modulation index is chosen per segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaChoice {
    /// Fixed index; segment durations stretch to keep the pulse areas.
    Pinned(f64),
    /// Solve `Ω = 2J₁(β)g` on the rising branch, keeping durations.
    MatchAmplitude,
}

/// Device schedule for a logical pulse.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub settings: Vec<ModulationSettings>,
    /// Logical frame angle `Θ(τ) = Σ Δ_L·duration`.
    pub theta: f64,
    pub total_time: f64,
}

/// Distinct modulation phases `p ∈ [0, 2π)` with
/// `p − β cos(ν t + p) ≡ target (mod 2π)`, in increasing order. There is one
/// root for `β ≤ 1` and up to three beyond.
pub fn continuity_roots(beta: f64, nu_t: f64, target: f64) -> Vec<f64> {
    let f = |p: f64| (0.5 * (p - beta * (nu_t + p).cos() - target)).sin();
    let n = 4096;
    let h = TWO_PI / n as f64;
    let mut roots = Vec::new();
    let mut a = 0.0;
    let mut fa = f(a);
    for k in 1..=n {
        let b = k as f64 * h;
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut x0, mut x1, mut f0) = (a, b, fa);
            for _ in 0..200 {
                let xm = 0.5 * (x0 + x1);
                let fm = f(xm);
                if f0 * fm <= 0.0 {
                    x1 = xm;
                } else {
                    x0 = xm;
                    f0 = fm;
                }
            }
            roots.push(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// Maps square-envelope logical segments onto modulation settings.
///
/// Segment `k` becomes a sideband drive with `μ = φ̇`, `Δ_L` from the
/// segment's detuning law and `ν = resonance + Δ_L + μ`. The modulation phase
/// is chosen so that `−β cos(νt+φ) + C` is continuous, starts at zero, and
/// the coupling phase equals the programmed `φ(t)` plus the frame angle
/// `Θ(t) = ∫Δ_L dt`. Where the continuity condition has several roots the
/// smallest is taken; [`schedule_branches`] lists every choice.
pub fn schedule_from_pulse(pulse: &PulseSequence, resonance: f64, g_eff: f64, beta: BetaChoice) -> Result<Schedule> {
    let segs = segment_drives(pulse, g_eff, beta)?;
    let mut st = Branch::default();
    for d in &segs {
        let m = d.settings(&st, resonance, 0);
        st = st.advance(m);
    }
    Ok(st.finish())
}

/// All schedules obtained by combining the continuity roots of every segment.
pub fn schedule_branches(pulse: &PulseSequence, resonance: f64, g_eff: f64, beta: BetaChoice) -> Result<Vec<Schedule>> {
    let segs = segment_drives(pulse, g_eff, beta)?;
    let mut open = vec![Branch::default()];
    for d in &segs {
        let mut next = Vec::new();
        for st in &open {
            for k in 0..d.root_count(st, resonance) {
                next.push(st.clone().advance(d.settings(st, resonance, k)));
            }
        }
        open = next;
    }
    Ok(open.into_iter().map(Branch::finish).collect())
}

#[derive(Clone, Copy, Debug)]
struct SegmentDrive {
    beta: f64,
    duration: f64,
    mu: f64,
    delta_l: f64,
    phi0: f64,
}

#[derive(Clone, Debug, Default)]
struct Branch {
    t: f64,
    theta: f64,
    mod_phase: f64,
    out: Vec<ModulationSettings>,
}

impl Branch {
    fn advance(mut self, m: ModulationSettings) -> Self {
        self.mod_phase = m.mod_phase(m.t_end);
        self.theta += m.delta_l * (m.t_end - m.t_start);
        self.t = m.t_end;
        self.out.push(m);
        self
    }

    fn finish(self) -> Schedule {
        Schedule {
            settings: self.out,
            theta: self.theta,
            total_time: self.t,
        }
    }
}

impl SegmentDrive {
    fn nu(&self, resonance: f64) -> f64 {
        resonance + (self.delta_l + self.mu)
    }

    fn target(&self, st: &Branch) -> f64 {
        self.phi0 + st.theta - (self.mu + self.delta_l) * st.t - FRAC_PI_2 + st.mod_phase
    }

    fn roots(&self, st: &Branch, resonance: f64) -> Vec<f64> {
        continuity_roots(self.beta, self.nu(resonance) * st.t, self.target(st))
    }

    fn root_count(&self, st: &Branch, resonance: f64) -> usize {
        self.roots(st, resonance).len().max(1)
    }

    fn settings(&self, st: &Branch, resonance: f64, k: usize) -> ModulationSettings {
        let nu = self.nu(resonance);
        let roots = self.roots(st, resonance);
        let phi = roots.get(k).copied().unwrap_or_else(|| self.target(st).rem_euclid(TWO_PI));
        ModulationSettings {
            t_start: st.t,
            t_end: st.t + self.duration,
            nu,
            beta: self.beta,
            phi,
            offset: st.mod_phase + self.beta * (nu * st.t + phi).cos(),
            mu: self.mu,
            delta_l: self.delta_l,
            resonance,
        }
    }
}

fn segment_drives(pulse: &PulseSequence, g_eff: f64, beta: BetaChoice) -> Result<Vec<SegmentDrive>> {
    pulse
        .segments
        .iter()
        .map(|seg| {
            if seg.envelope.shape != Shape::Square {
                return invalid("device schedules need constant-amplitude segments");
            }
            let (b, omega) = match beta {
                BetaChoice::Pinned(b) => {
                    if b < 0.0 {
                        return invalid("modulation index must be non-negative");
                    }
                    (b, 2.0 * bessel_j1(b) * g_eff)
                }
                BetaChoice::MatchAmplitude => {
                    let b = bessel_j1_inverse(seg.envelope.peak / (2.0 * g_eff))?;
                    (b, seg.envelope.peak)
                }
            };
            if !(omega > 0.0) {
                return Err(Error::UnreachableAmplitude("effective coupling vanishes".into()));
            }
            Ok(SegmentDrive {
                beta: b,
                duration: seg.envelope.area() / omega,
                mu: seg.phi_per_area * omega,
                delta_l: seg.delta_per_omega * omega,
                phi0: seg.phi0,
            })
        })
        .collect()
}

/// Geometric single-logical-qubit gate on the device.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricSingle {
    pub gate: GateName,
    pub path: PathSpec,
    pub schedule: Schedule,
    /// Logical gate in the rotating frame.
    pub logical: Mat,
    /// Target in the device frame, `exp(−iσ_zΘ/2)·U_L`.
    pub target: Mat,
}

impl GeometricSingle {
    pub fn new(gate: GateName, params: &DeviceParams, beta: f64) -> Result<Self> {
        params.validate()?;
        let path = geo::gate_preset(gate);
        let omega = 2.0 * bessel_j1(beta) * params.g_1a;
        let pulse = synthesize(&path, Profile::square(omega))?;
        let schedule = schedule_from_pulse(&pulse, params.delta1, params.g_1a, BetaChoice::Pinned(beta))?;
        let logical = analytic_unitary(&path).into_mat();
        let target = z_frame(schedule.theta).dot(&logical);
        Ok(Self {
            gate,
            path,
            schedule,
            logical,
            target,
        })
    }

    /// Same gate with the continuity roots chosen to maximise the
    /// closed-system logical fidelity of the full model.
    pub fn calibrated(gate: GateName, params: &DeviceParams, beta: f64) -> Result<Self> {
        let mut g = Self::new(gate, params, beta)?;
        let omega = 2.0 * bessel_j1(beta) * params.g_1a;
        let pulse = synthesize(&g.path, Profile::square(omega))?;
        let branches = schedule_branches(&pulse, params.delta1, params.g_1a, BetaChoice::Pinned(beta))?;
        let basis = LogicalEncoding::single(params).basis;
        let logical = g.logical.clone();
        let best = best_branch(branches, |s| {
            let model = single_logical_model(params, s.settings.clone());
            let target = z_frame(s.theta).dot(&logical);
            closed_fidelity(&model, &basis, &target)
        })?;
        g.target = z_frame(best.theta).dot(&g.logical);
        g.schedule = best;
        Ok(g)
    }

    pub fn model(&self, params: &DeviceParams) -> LadderModel {
        single_logical_model(params, self.schedule.settings.clone())
    }
}

/// Geometric controlled-phase gate between two encoded qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct CpGate {
    pub zeta: f64,
    pub path: PathSpec,
    pub schedule: Schedule,
    /// Ideal gate in the rotating frame, `diag(1, 1, e^{iζ}, 1)`.
    pub ideal: Mat,
    /// Ideal gate in the device frame, including the frame phase on `|10⟩_L`.
    pub target: Mat,
}

/// Three-segment schedule of the controlled-phase gate `diag(1,1,e^{iζ},1)`.
pub fn cp_gate_schedule(zeta: f64, chi_l2: f64, params: &DeviceParams, beta: f64) -> Result<CpGate> {
    params.validate()?;
    if !(zeta > 0.0 && zeta < TWO_PI) {
        return invalid(format!("phase {zeta} outside (0, 2π)"));
    }
    if !(chi_l2 > 0.0 && chi_l2 < PI) {
        return invalid(format!("latitude {chi_l2} outside (0, π)"));
    }
    if chi_l2.cos().abs() < 1e-12 {
        return Err(Error::InfiniteDetuning("latitude at the equator".into()));
    }
    let xi_l = 2.0 * zeta / (1.0 - chi_l2.cos());
    let path = PathSpec::new(0.0, chi_l2, 0.0, xi_l)?;
    let g_eff = 2f64.sqrt() * params.g_a2;
    let omega = 2.0 * bessel_j1(beta) * g_eff;
    let pulse = synthesize(&path, Profile::square(omega))?;
    let schedule = schedule_from_pulse(&pulse, params.delta2 - params.alpha2, g_eff, BetaChoice::Pinned(beta))?;
    let ideal = Mat::from_diag(&ndarray::arr1(&[qcore::ONE, qcore::ONE, cis(zeta), qcore::ONE]));
    let mut target = ideal.clone();
    target[[2, 2]] *= cis(schedule.theta / 2.0);
    Ok(CpGate {
        zeta,
        path,
        schedule,
        ideal,
        target,
    })
}

/// Controlled phase with the continuity roots chosen to maximise the
/// closed-system fidelity on the two-excitation block.
pub fn cp_gate_calibrated(zeta: f64, chi_l2: f64, params: &DeviceParams, beta: f64) -> Result<CpGate> {
    let mut cp = cp_gate_schedule(zeta, chi_l2, params, beta)?;
    let g_eff = 2f64.sqrt() * params.g_a2;
    let omega = 2.0 * bessel_j1(beta) * g_eff;
    let pulse = synthesize(&cp.path, Profile::square(omega))?;
    let branches = schedule_branches(&pulse, params.delta2 - params.alpha2, g_eff, BetaChoice::Pinned(beta))?;
    let enc = LogicalEncoding::two(params);
    let full_dims = two_logical_model(params, Vec::new()).dims;
    let block = LogicalEncoding::excitation_block(&full_dims, 2);
    let basis: Vec<usize> = enc.basis.iter().map(|b| block.iter().position(|x| x == b).expect("in block")).collect();
    let ideal = cp.ideal.clone();
    let best = best_branch(branches, |s| {
        let model = two_logical_model(params, s.settings.clone()).restrict(&block)?;
        let mut target = ideal.clone();
        target[[2, 2]] *= cis(s.theta / 2.0);
        closed_fidelity(&model, &basis, &target)
    })?;
    cp.target = ideal;
    cp.target[[2, 2]] *= cis(best.theta / 2.0);
    cp.schedule = best;
    Ok(cp)
}

fn best_branch<F>(branches: Vec<Schedule>, score: F) -> Result<Schedule>
where
    F: Fn(&Schedule) -> Result<f64> + Sync,
{
    use rayon::prelude::*;
    let scores: Vec<Result<f64>> = branches.par_iter().map(&score).collect();
    let mut best: Option<(f64, Schedule)> = None;
    for (s, f) in branches.into_iter().zip(scores) {
        let f = f?;
        if best.as_ref().map_or(true, |b| f > b.0) {
            best = Some((f, s));
        }
    }
    best.map(|b| b.1).ok_or_else(|| Error::NoSolution("no modulation schedule".into()))
}

/// Real-amplitude averaged overlap `|⟨ψ|U†V|ψ⟩|²` of the closed-system
/// evolution of `model` on `basis` against `target`.
pub fn closed_fidelity(model: &LadderModel, basis: &[usize], target: &Mat) -> Result<f64> {
    let grid = TimeGrid::new(model.start(), model.end(), tol::DEVICE_MAX_STEP)?;
    let u = qcore::propagate_mat(&|t| model.hamiltonian(t), &grid, model.dim)?;
    let w = qcore::dagger(target).dot(&sub_block(&u, basis));
    Ok(real_average_overlap(&w, 21))
}

/// Average of `|⟨ψ|W|ψ⟩|²` over real product inputs `cos ϑ|0⟩ + sin ϑ|1⟩`
/// (one or two qubits) on a `points`-node trapezoid grid per angle.
pub fn real_average_overlap(w: &Mat, points: usize) -> f64 {
    let nodes = crate::open_system::trapezoid(points);
    let amp = |c: &[f64]| -> f64 {
        let n = c.len();
        let mut s = ZERO;
        for i in 0..n {
            for j in 0..n {
                s += w[[i, j]] * (c[i] * c[j]);
            }
        }
        s.norm_sqr()
    };
    match w.nrows() {
        2 => nodes.iter().map(|&(t, wt)| wt * amp(&[t.cos(), t.sin()])).sum(),
        4 => {
            let mut s = 0.0;
            for &(t1, w1) in &nodes {
                for &(t2, w2) in &nodes {
                    let (a, b) = ([t1.cos(), t1.sin()], [t2.cos(), t2.sin()]);
                    s += w1 * w2 * amp(&[a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]);
                }
            }
            s
        }
        _ => f64::NAN,
    }
}

/// `ξ_L = 2ζ/(1 − cos χ_L)`.
pub fn cp_xi(zeta: f64, chi_l2: f64) -> f64 {
    2.0 * zeta / (1.0 - chi_l2.cos())
}

/// Three-level transmon driven on `|0⟩↔|1⟩` in the frame of the drive.
#[derive(Clone, Debug, PartialEq)]
pub struct TransmonDrive {
    pub fields: Vec<(f64, f64, CorrectedField)>,
    pub alpha: f64,
    pub levels: usize,
    pub drift: f64,
}

impl TransmonDrive {
    pub fn hamiltonian(&self, t: f64) -> Mat {
        let n = self.levels;
        let mut h = qcore::zeros(n);
        for k in 0..n {
            let kf = k as f64;
            h[[k, k]] = c64(self.drift * kf - self.alpha * kf * (kf - 1.0) / 2.0, 0.0);
        }
        let idx = self.fields.partition_point(|f| f.1 < t).min(self.fields.len().saturating_sub(1));
        if let Some((t0, _, field)) = self.fields.get(idx) {
            let b = field.b(t - t0);
            let z = c64(0.5 * b[0], -0.5 * b[1]);
            for k in 0..n - 1 {
                let a = ((k + 1) as f64).sqrt();
                h[[k, k + 1]] += z * a;
                h[[k + 1, k]] += (z * a).conj();
            }
            h[[0, 0]] += c64(0.5 * b[2], 0.0);
            h[[1, 1]] -= c64(0.5 * b[2], 0.0);
        }
        h
    }

    pub fn total_time(&self) -> f64 {
        self.fields.last().map_or(0.0, |f| f.1)
    }
}

/// Composite sine-envelope drive for a dynamical gate on a bare transmon.
pub fn transmon_gate_drive(gate: GateName, omega_peak: f64, alpha: f64, use_drag: bool, epsilon: f64, drift: f64) -> Result<TransmonDrive> {
    let mut t = 0.0;
    let mut fields = Vec::new();
    for (axis, theta) in composition(gate) {
        let seq = crate::dynamical::rotation_pulse(&RotationSpec {
            axis,
            theta,
            envelope: Shape::Sine,
            omega_peak,
        })?;
        for seg in &seq.segments {
            let mut base = DriveField::from_segment(seg);
            base.envelope.peak *= 1.0 + epsilon;
            let field = if use_drag {
                drag_correct(base, alpha)?
            } else {
                CorrectedField::uncorrected(base)
            };
            fields.push((t, t + seg.duration(), field));
            t += seg.duration();
        }
    }
    Ok(TransmonDrive {
        fields,
        alpha,
        levels: 3,
        drift,
    })
}

/// Result of the bare-transmon dynamical gate.
#[derive(Clone, Debug, PartialEq)]
pub struct DragResult {
    /// Computational block of the propagator.
    pub gate: Mat,
    /// Mean final `|2⟩` population over the two computational inputs.
    pub leakage: f64,
    pub total_time: f64,
}

pub fn single_transmon_drag_model(gate: GateName, omega_peak: f64, alpha: f64, use_drag: bool, epsilon: f64) -> Result<DragResult> {
    let drive = transmon_gate_drive(gate, omega_peak, alpha, use_drag, epsilon, 0.0)?;
    let mut u = qcore::identity(3);
    for (t0, t1, _) in &drive.fields {
        let grid = TimeGrid::new(*t0, *t1, tol::DEVICE_MAX_STEP)?;
        u = qcore::propagate_mat(&|t| drive.hamiltonian(t), &grid, 3)?.dot(&u);
    }
    let gate_m = u.slice(ndarray::s![0..2, 0..2]).to_owned();
    let leakage = 0.5 * (u[[2, 0]].norm_sqr() + u[[2, 1]].norm_sqr());
    Ok(DragResult {
        gate: gate_m,
        leakage,
        total_time: drive.total_time(),
    })
}

/// Two bare transmons with a modulated exchange coupling.
pub fn transmon_pair_model(params: &DeviceParams, m: ModulationSettings) -> LadderModel {
    let lt = params.levels_transmon;
    let dims = vec![lt, lt];
    let dim = lt * lt;
    let mut terms = Vec::new();
    for n1 in 0..lt - 1 {
        for n2 in 1..lt {
            let from = basis_index(&[n1, n2], &dims);
            let to = basis_index(&[n1 + 1, n2 - 1], &dims);
            let a = params.g_a2 * ((n1 + 1) as f64).sqrt() * (n2 as f64).sqrt();
            let freq = params.delta2 - params.alpha1 * n1 as f64 + params.alpha2 * (n2 - 1) as f64;
            terms.push(LadderTerm {
                freq,
                entries: vec![(to, from, a)],
            });
        }
    }
    LadderModel {
        dims,
        dim,
        terms,
        diag: vec![0.0; dim],
        schedule: vec![m],
    }
}

/// Detuned cycle of `|11⟩` through the state with both excitations on the
/// second transmon, on two bare transmons.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalCp {
    pub settings: ModulationSettings,
    pub omega_d: f64,
    pub delta_d: f64,
    pub ideal: Mat,
    /// Computational indices `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub basis: Vec<usize>,
}

/// Schedule of the dynamical controlled phase for phase `zeta`.
pub fn dynamical_cp_schedule(params: &DeviceParams, beta: f64, zeta: f64) -> Result<DynamicalCp> {
    params.validate()?;
    if !(zeta > 0.0 && zeta < TWO_PI) {
        return invalid("phase outside (0, 2π)");
    }
    let omega_d = 2.0 * 2f64.sqrt() * bessel_j1(beta) * params.g_a2;
    if omega_d <= 0.0 {
        return invalid("dynamical CP needs a nonzero sideband coupling");
    }
    let x = 1.0 - zeta / PI;
    let delta_d = omega_d * x / (1.0 - x * x).sqrt();
    let tau = TWO_PI / (omega_d * omega_d + delta_d * delta_d).sqrt();
    let resonance = params.delta2 + params.alpha2;
    let settings = ModulationSettings::constant(resonance, beta, 0.0, 0.0, delta_d, tau);
    let lt = params.levels_transmon;
    let dims = [lt, lt];
    let basis = vec![
        basis_index(&[0, 0], &dims),
        basis_index(&[0, 1], &dims),
        basis_index(&[1, 0], &dims),
        basis_index(&[1, 1], &dims),
    ];
    let ideal = Mat::from_diag(&ndarray::arr1(&[qcore::ONE, qcore::ONE, qcore::ONE, cis(zeta)]));
    Ok(DynamicalCp {
        settings,
        omega_d,
        delta_d,
        ideal,
        basis,
    })
}

/// Propagated dynamical controlled-phase gate on the computational block.
pub fn dynamical_cp_baseline(params: &DeviceParams, beta: f64) -> Result<(DynamicalCp, Mat)> {
    let cp = dynamical_cp_schedule(params, beta, FRAC_PI_2)?;
    let model = transmon_pair_model(params, cp.settings);
    let grid = TimeGrid::new(cp.settings.t_start, cp.settings.t_end, tol::DEVICE_MAX_STEP)?;
    let u = qcore::propagate_mat(&|t| model.hamiltonian(t), &grid, model.dim)?;
    let sub = Mat::from_shape_fn((4, 4), |(i, j)| u[[cp.basis[i], cp.basis[j]]]);
    Ok((cp, sub))
}

/// Sub-block of `u` on the listed indices.
pub fn sub_block(u: &Mat, idx: &[usize]) -> Mat {
    Mat::from_shape_fn((idx.len(), idx.len()), |(i, j)| u[[idx[i], idx[j]]])
}
