//! Lindblad master equation and state-averaged gate fidelities.
//!
//! `ρ̇ = −i[H,ρ] + Σ (κ/2)(2AρA† − A†Aρ − ρA†A)`, integrated with fixed-step
//! RK4. Gate fidelities average `⟨ψ_f|ρ_f|ψ_f⟩` over real-amplitude inputs
//! `cos ϑ|0⟩ + sin ϑ|1⟩` (per qubit) with the trapezoid rule on `[0, 2π]`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::device::{
    self, dynamical_cp_schedule, transmon_gate_drive, transmon_pair_model, DeviceParams, GeometricSingle,
    LadderModel, LogicalEncoding,
};
use crate::error::{invalid, Error, Result};
use crate::geo::GateName;
use crate::qcore::{self, dagger, embed, Mat, QState, TimeGrid, C64};
use crate::robustness::ScanResult;
use crate::tolerances as tol;

/// Transmon and resonator decay rates (rad/µs).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    pub kappa_minus: f64,
    pub kappa_z: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
}

impl NoiseParams {
    /// `κ₋ = κ_z = kappa` on transmons and `kappa_r` on both resonators.
    pub fn uniform(kappa: f64, kappa_r: f64) -> Self {
        Self {
            kappa_minus: kappa,
            kappa_z: kappa,
            kappa_a: kappa_r,
            kappa_b: kappa_r,
        }
    }

    pub fn none() -> Self {
        Self::uniform(0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.kappa_minus, self.kappa_z, self.kappa_a, self.kappa_b] {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid("decay rates must be finite and non-negative");
            }
        }
        Ok(())
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::uniform(device::mhz(0.004), device::mhz(0.001))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Transmon,
    Resonator,
}

/// `X₋ = Σ√(j+1)|j⟩⟨j+1|`, `X_z = Σ j|j⟩⟨j|` for a transmon; `Y = Σ|j⟩⟨j+1|`
/// for a resonator.
pub fn collapse_operators(levels: usize, role: Role) -> Result<Vec<Mat>> {
    if levels < 2 {
        return invalid("collapse operators need at least two levels");
    }
    let mut lower = qcore::zeros(levels);
    for j in 0..levels - 1 {
        let w = match role {
            Role::Transmon => ((j + 1) as f64).sqrt(),
            Role::Resonator => 1.0,
        };
        lower[[j, j + 1]] = C64::new(w, 0.0);
    }
    Ok(match role {
        Role::Transmon => {
            let z = Mat::from_diag(&ndarray::Array1::from_iter((0..levels).map(|j| C64::new(j as f64, 0.0))));
            vec![lower, z]
        }
        Role::Resonator => vec![lower],
    })
}

/// Jump operators with their rates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CollapseSet {
    pub operators: Vec<(Mat, f64)>,
}

impl CollapseSet {
    pub fn validate(&self, dim: usize) -> Result<()> {
        for (a, k) in &self.operators {
            if a.dim() != (dim, dim) {
                return invalid("collapse operator dimension mismatch");
            }
            if !(*k >= 0.0 && k.is_finite()) {
                return invalid("collapse rates must be non-negative");
            }
        }
        Ok(())
    }

    pub fn max_rate(&self) -> f64 {
        self.operators.iter().map(|o| o.1).fold(0.0, f64::max)
    }

    /// Transmon channels on `site` of a register.
    pub fn add_transmon(&mut self, dims: &[usize], site: usize, kappa_minus: f64, kappa_z: f64) {
        let ops = collapse_operators(dims[site], Role::Transmon).expect("levels ≥ 2");
        self.push(embed(&ops[0], site, dims), kappa_minus);
        self.push(embed(&ops[1], site, dims), kappa_z);
    }

    pub fn add_resonator(&mut self, dims: &[usize], site: usize, kappa: f64) {
        let ops = collapse_operators(dims[site], Role::Resonator).expect("levels ≥ 2");
        self.push(embed(&ops[0], site, dims), kappa);
    }

    fn push(&mut self, a: Mat, k: f64) {
        if k > 0.0 {
            self.operators.push((a, k));
        }
    }

    /// Restriction to an invariant block: jumps become `PAP` and the
    /// no-jump damping keeps the full `PA†AP`.
    pub fn restrict(&self, block: &[usize]) -> Lindblad {
        let jumps = self
            .operators
            .iter()
            .filter_map(|(a, k)| {
                let pa = device::sub_block(a, block);
                (qcore::max_abs(&pa) > 0.0).then(|| (pa, *k))
            })
            .collect::<Vec<_>>();
        let n = block.len();
        let mut damp = qcore::zeros(n);
        for (a, k) in &self.operators {
            let ada = dagger(a).dot(a);
            damp = damp + device::sub_block(&ada, block).mapv(|z| z * (0.5 * k));
        }
        Lindblad::from_parts(jumps, damp)
    }
}

/// Precomputed dissipator: sparse jump operators and the damping term
/// `Σ (κ/2) A†A`.
#[derive(Clone, Debug)]
pub struct Lindblad {
    dim: usize,
    jumps: Vec<(Sparse, f64)>,
    damp: Mat,
    max_rate: f64,
}

/// Nonzero entries `(row, col, value)` of a matrix.
#[derive(Clone, Debug, Default)]
struct Sparse(Vec<(usize, usize, C64)>);

impl Sparse {
    fn from_dense(a: &Mat) -> Self {
        let mut out = Vec::new();
        for ((i, j), &z) in a.indexed_iter() {
            if z != qcore::ZERO {
                out.push((i, j, z));
            }
        }
        Sparse(out)
    }
}

impl Lindblad {
    pub fn new(c: &CollapseSet, dim: usize) -> Self {
        let mut damp = qcore::zeros(dim);
        for (a, k) in &c.operators {
            damp = damp + dagger(a).dot(a).mapv(|z| z * (0.5 * k));
        }
        Self::from_parts(c.operators.clone(), damp)
    }

    fn from_parts(jumps: Vec<(Mat, f64)>, damp: Mat) -> Self {
        let max_rate = jumps.iter().map(|j| j.1).fold(0.0, f64::max);
        let dim = damp.nrows();
        let jumps = jumps.iter().map(|(a, k)| (Sparse::from_dense(a), *k)).collect();
        Self {
            dim,
            jumps,
            damp,
            max_rate,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_rate(&self) -> f64 {
        self.max_rate
    }

    /// `H_eff = H − i Σ (κ/2) A†A` in sparse form.
    fn effective(&self, h: &Mat) -> Sparse {
        let i = qcore::I;
        let heff = h - &self.damp.mapv(|z| z * i);
        Sparse::from_dense(&heff)
    }

    /// `out = −i(H_eff X − X H_eff†) + Σ κ A X A†` on row-major buffers.
    fn rhs(&self, heff: &Sparse, x: &[C64], out: &mut [C64]) {
        let d = self.dim;
        out.fill(qcore::ZERO);
        let mi = -qcore::I;
        for &(r, c, v) in &heff.0 {
            let a = mi * v;
            let b = (mi * v).conj();
            for l in 0..d {
                // (−i H X)[r, l] and (i X H†)[l, r]
                out[r * d + l] += a * x[c * d + l];
                out[l * d + r] += b * x[l * d + c];
            }
        }
        for (jump, k) in &self.jumps {
            for &(i1, k1, v1) in &jump.0 {
                let w = v1 * *k;
                for &(i2, k2, v2) in &jump.0 {
                    out[i1 * d + i2] += w * x[k1 * d + k2] * v2.conj();
                }
            }
        }
    }
}

/// RK4 on the linear map `X ↦ E_t(X)`; `X` need not be a state.
pub fn evolve_operator<F>(h_of_t: &F, lind: &Lindblad, x0: Mat, grid: &TimeGrid) -> Result<Mat>
where
    F: Fn(f64) -> Mat + ?Sized,
{
    Ok(evolve_operators(h_of_t, lind, vec![x0], grid)?.pop().expect("one operator"))
}

/// Evolves several operators through the same map, sharing the Hamiltonian
/// evaluations. Each result is independent of the others in the batch.
pub fn evolve_operators<F>(h_of_t: &F, lind: &Lindblad, xs: Vec<Mat>, grid: &TimeGrid) -> Result<Vec<Mat>>
where
    F: Fn(f64) -> Mat + ?Sized,
{
    let d = lind.dim;
    if xs.iter().any(|x| x.dim() != (d, d)) {
        return invalid("operator dimension does not match the dissipator");
    }
    let mut g = *grid;
    if lind.max_rate > 0.0 {
        g.max_step = g.max_step.min(tol::STEP_DECAY_CAP / lind.max_rate);
    }
    let (n, h) = g.coarse_steps();
    let mut states: Vec<Vec<C64>> = xs.iter().map(|x| x.iter().copied().collect()).collect();
    let zero = vec![qcore::ZERO; d * d];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero);
    for s in 0..n {
        let ta = g.t0 + s as f64 * h;
        let hn = qcore::norm_inf(&h_of_t(ta + 0.5 * h));
        if !hn.is_finite() {
            return Err(Error::NumericFailure(format!("non-finite Hamiltonian at t = {ta}")));
        }
        let sub = ((hn * h) / tol::STEP_PHASE_CAP).ceil().max(1.0) as usize;
        let hs = h / sub as f64;
        for j in 0..sub {
            let t = ta + j as f64 * hs;
            let h1 = lind.effective(&h_of_t(t));
            let h2 = lind.effective(&h_of_t(t + 0.5 * hs));
            let h4 = lind.effective(&h_of_t(t + hs));
            for x in states.iter_mut() {
                lind.rhs(&h1, x, &mut k1);
                axpy(&mut tmp, x, 0.5 * hs, &k1);
                lind.rhs(&h2, &tmp, &mut k2);
                axpy(&mut tmp, x, 0.5 * hs, &k2);
                lind.rhs(&h2, &tmp, &mut k3);
                axpy(&mut tmp, x, hs, &k3);
                lind.rhs(&h4, &tmp, &mut k4);
                let w = hs / 6.0;
                for q in 0..d * d {
                    x[q] += (k1[q] + (k2[q] + k3[q]) * 2.0 + k4[q]) * w;
                }
            }
        }
    }
    Ok(states
        .into_iter()
        .map(|v| Mat::from_shape_vec((d, d), v).expect("square buffer"))
        .collect())
}

fn axpy(out: &mut [C64], x: &[C64], a: f64, y: &[C64]) {
    for ((o, &xv), &yv) in out.iter_mut().zip(x).zip(y) {
        *o = xv + yv * a;
    }
}

/// Density-matrix evolution with positivity and trace checks. A positivity
/// violation triggers up to two retries at half the step ceiling.
pub fn evolve_master<F>(h_of_t: &F, collapse: &CollapseSet, rho0: &QState, grid: &TimeGrid) -> Result<QState>
where
    F: Fn(f64) -> Mat + ?Sized,
{
    rho0.validate()?;
    let dim = rho0.dim();
    collapse.validate(dim)?;
    let lind = Lindblad::new(collapse, dim);
    let mut g = *grid;
    let mut last = String::new();
    for _ in 0..3 {
        let rho = evolve_operator(h_of_t, &lind, rho0.to_density(), &g)?;
        let drift = (qcore::trace(&rho) - qcore::ONE).norm();
        let eig = qcore::min_eigenvalue(&rho);
        if eig >= tol::MASTER_POSITIVITY && drift <= tol::MASTER_TRACE_DRIFT {
            let herm = (&rho + &dagger(&rho)).mapv(|z| z * 0.5);
            return Ok(QState::Density(herm));
        }
        last = format!("min eigenvalue {eig:.3e}, trace drift {drift:.3e}");
        g = g.halved();
    }
    Err(Error::NumericFailure(format!("master equation failed after retries: {last}")))
}

/// Trapezoid nodes and weights on `[0, 2π]` normalised to unit sum.
pub fn trapezoid(points: usize) -> Vec<(f64, f64)> {
    assert!(points >= 2);
    let n = points - 1;
    (0..points)
        .map(|k| {
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            (2.0 * PI * k as f64 / n as f64, w / n as f64)
        })
        .collect()
}

/// Images `E(|b_i⟩⟨b_j|)` of the computational operators, restricted to the
/// computational block: `m[i][j][k][l] = ⟨b_k|E(|b_i⟩⟨b_j|)|b_l⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelBlock {
    pub n: usize,
    pub m: Vec<C64>,
}

impl ChannelBlock {
    fn at(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        let n = self.n;
        self.m[((i * n + j) * n + k) * n + l]
    }

    /// Output of the channel on the input amplitudes `c`, projected on `d`.
    pub fn overlap(&self, c: &[C64], d: &[C64]) -> f64 {
        let n = self.n;
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let cij = c[i] * c[j].conj();
                if cij.norm() == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        s += cij * d[k].conj() * self.at(i, j, k, l) * d[l];
                    }
                }
            }
        }
        s.re
    }
}

/// Evolves every `|b_i⟩⟨b_j|` through the consecutive `grids` and keeps the
/// computational block. Inputs are split into one batch per worker thread.
pub fn channel_block<F>(h_of_t: &F, lind: &Lindblad, basis: &[usize], grids: &[TimeGrid]) -> Result<ChannelBlock>
where
    F: Fn(f64) -> Mat + Sync + ?Sized,
{
    let n = basis.len();
    let dim = lind.dim();
    let inputs: Vec<Mat> = (0..n * n)
        .map(|p| {
            let mut x = qcore::zeros(dim);
            x[[basis[p / n], basis[p % n]]] = qcore::ONE;
            x
        })
        .collect();
    let chunk = inputs.len().div_ceil(rayon::current_num_threads().max(1));
    let batches: Vec<Result<Vec<Mat>>> = inputs
        .par_chunks(chunk)
        .map(|batch| {
            let mut xs = batch.to_vec();
            for g in grids {
                xs = evolve_operators(h_of_t, lind, xs, g)?;
            }
            Ok(xs)
        })
        .collect();
    let mut m = vec![C64::new(0.0, 0.0); n * n * n * n];
    let mut p = 0;
    for batch in batches {
        for img in batch? {
            for k in 0..n {
                for l in 0..n {
                    m[(p * n + k) * n + l] = img[[basis[k], basis[l]]];
                }
            }
            p += 1;
        }
    }
    Ok(ChannelBlock { n, m })
}

/// Real-amplitude average of `⟨ψ_f|E(ψψ†)|ψ_f⟩` with `ψ_f = target·ψ`, for one
/// or two qubits (`points` nodes per angle).
pub fn average_fidelity(ch: &ChannelBlock, target: &Mat, points: usize) -> f64 {
    let nodes = trapezoid(points);
    let apply = |c: &[C64]| -> Vec<C64> {
        (0..ch.n).map(|k| (0..ch.n).map(|l| target[[k, l]] * c[l]).sum()).collect()
    };
    match ch.n {
        2 => nodes
            .iter()
            .map(|&(th, w)| {
                let c = [C64::new(th.cos(), 0.0), C64::new(th.sin(), 0.0)];
                w * ch.overlap(&c, &apply(&c))
            })
            .sum(),
        4 => {
            let mut s = 0.0;
            for &(t1, w1) in &nodes {
                for &(t2, w2) in &nodes {
                    let a = [t1.cos(), t1.sin()];
                    let b = [t2.cos(), t2.sin()];
                    let c: Vec<C64> = (0..4).map(|k| C64::new(a[k / 2] * b[k % 2], 0.0)).collect();
                    s += w1 * w2 * ch.overlap(&c, &apply(&c));
                }
            }
            s
        }
        _ => f64::NAN,
    }
}

/// Numerical settings of a fidelity run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityNumerics {
    pub max_step: f64,
    pub points_single: usize,
    pub points_two: usize,
}

impl Default for FidelityNumerics {
    fn default() -> Self {
        Self {
            max_step: tol::DEVICE_MAX_STEP,
            points_single: 101,
            points_two: 21,
        }
    }
}

/// Device-level gate fidelity with its convergence companion.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityReport {
    pub fidelity: f64,
    /// Same average on a grid with half the node density.
    pub fidelity_coarse: f64,
    pub gate_time: f64,
    pub channel: ChannelBlock,
}

fn report(ch: ChannelBlock, target: &Mat, points: usize, gate_time: f64) -> FidelityReport {
    let coarse = (points - 1) / 2 + 1;
    FidelityReport {
        fidelity: average_fidelity(&ch, target, points),
        fidelity_coarse: average_fidelity(&ch, target, coarse.max(2)),
        gate_time,
        channel: ch,
    }
}

/// Operating conditions of a device simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviceRun {
    pub params: DeviceParams,
    pub noise: NoiseParams,
    pub beta1: f64,
    pub beta2: f64,
    pub drift1: f64,
    pub drift2: f64,
    pub numerics: FidelityNumerics,
}

impl Default for DeviceRun {
    fn default() -> Self {
        Self {
            params: DeviceParams::default(),
            noise: NoiseParams::default(),
            beta1: device::BETA1,
            beta2: device::BETA2,
            drift1: 0.0,
            drift2: 0.0,
            numerics: FidelityNumerics::default(),
        }
    }
}

/// One grid per schedule segment, so no step straddles a frequency change.
fn model_grids(model: &LadderModel, max_step: f64) -> Result<Vec<TimeGrid>> {
    model
        .schedule
        .iter()
        .map(|m| TimeGrid::new(m.t_start, m.t_end, max_step))
        .collect()
}

/// Encoded geometric single-qubit gate under the full sideband model.
pub fn single_logical_gate_fidelity(gate: GateName, run: &DeviceRun) -> Result<FidelityReport> {
    run.noise.validate()?;
    let g = GeometricSingle::calibrated(gate, &run.params, run.beta1)?;
    let mut model = g.model(&run.params);
    model.add_drift(0, run.drift1);
    let enc = LogicalEncoding::single(&run.params);
    let mut c = CollapseSet::default();
    c.add_transmon(&model.dims, 0, run.noise.kappa_minus, run.noise.kappa_z);
    c.add_resonator(&model.dims, 1, run.noise.kappa_a);
    let lind = Lindblad::new(&c, model.dim);
    let grids = model_grids(&model, run.numerics.max_step)?;
    let ch = channel_block(&|t| model.hamiltonian(t), &lind, &enc.basis, &grids)?;
    Ok(report(ch, &g.target, run.numerics.points_single, g.schedule.total_time))
}

/// Encoded geometric controlled phase, evolved on the two-excitation block.
pub fn two_logical_gate_fidelity(run: &DeviceRun, chi_l2: f64) -> Result<FidelityReport> {
    run.noise.validate()?;
    let cp = device::cp_gate_calibrated(PI / 2.0, chi_l2, &run.params, run.beta2)?;
    let mut full = device::two_logical_model(&run.params, cp.schedule.settings.clone());
    full.add_drift(0, run.drift1);
    full.add_drift(2, run.drift2);
    let block = LogicalEncoding::excitation_block(&full.dims, 2);
    let model = full.restrict(&block)?;
    let enc = LogicalEncoding::two(&run.params);
    let basis: Vec<usize> = enc.basis.iter().map(|b| block.iter().position(|x| x == b).expect("in block")).collect();
    let mut c = CollapseSet::default();
    c.add_transmon(&full.dims, 0, run.noise.kappa_minus, run.noise.kappa_z);
    c.add_resonator(&full.dims, 1, run.noise.kappa_a);
    c.add_transmon(&full.dims, 2, run.noise.kappa_minus, run.noise.kappa_z);
    c.add_resonator(&full.dims, 3, run.noise.kappa_b);
    let lind = c.restrict(&block);
    let grids = model_grids(&model, run.numerics.max_step)?;
    let ch = channel_block(&|t| model.hamiltonian(t), &lind, &basis, &grids)?;
    Ok(report(ch, &cp.target, run.numerics.points_two, cp.schedule.total_time))
}

/// Peak amplitude used for the bare-transmon baseline: the encoded qubit's
/// effective coupling at the same modulation index.
pub fn dynamical_peak(run: &DeviceRun) -> f64 {
    2.0 * device::bessel_j1(run.beta1) * run.params.g_1a
}

/// DRAG-corrected dynamical gate on a bare three-level transmon.
pub fn dynamical_single_fidelity(gate: GateName, run: &DeviceRun) -> Result<FidelityReport> {
    run.noise.validate()?;
    let drive = transmon_gate_drive(gate, dynamical_peak(run), run.params.alpha1, true, 0.0, run.drift1)?;
    let dims = [drive.levels];
    let mut c = CollapseSet::default();
    c.add_transmon(&dims, 0, run.noise.kappa_minus, run.noise.kappa_z);
    let lind = Lindblad::new(&c, drive.levels);
    // Segment by segment so no step straddles a pulse boundary.
    let grids = drive
        .fields
        .iter()
        .map(|(t0, t1, _)| TimeGrid::new(*t0, *t1, run.numerics.max_step))
        .collect::<Result<Vec<_>>>()?;
    let ch = channel_block(&|t| drive.hamiltonian(t), &lind, &[0, 1], &grids)?;
    Ok(report(ch, &gate.target(), run.numerics.points_single, drive.total_time()))
}

/// Dynamical controlled phase on two bare transmons.
pub fn dynamical_cp_fidelity(run: &DeviceRun) -> Result<FidelityReport> {
    run.noise.validate()?;
    let cp = dynamical_cp_schedule(&run.params, run.beta2, PI / 2.0)?;
    let mut model = transmon_pair_model(&run.params, cp.settings);
    model.add_drift(0, run.drift1);
    model.add_drift(1, run.drift2);
    let mut c = CollapseSet::default();
    c.add_transmon(&model.dims, 0, run.noise.kappa_minus, run.noise.kappa_z);
    c.add_transmon(&model.dims, 1, run.noise.kappa_minus, run.noise.kappa_z);
    let lind = Lindblad::new(&c, model.dim);
    let grids = model_grids(&model, run.numerics.max_step)?;
    let ch = channel_block(&|t| model.hamiltonian(t), &lind, &cp.basis, &grids)?;
    Ok(report(ch, &cp.ideal, run.numerics.points_two, cp.settings.t_end - cp.settings.t_start))
}

/// Default latitude of the controlled-phase path.
pub const CP_CHI: f64 = 0.56 * PI;

/// Encoded-geometric and bare-dynamical fidelities along one swept axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub label: String,
    pub x: Vec<f64>,
    pub geometric: Vec<f64>,
    pub dynamical: Vec<f64>,
}

/// Which register a sweep runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Register {
    Single(GateName),
    Two,
}

fn pair(reg: Register, run: &DeviceRun) -> Result<(f64, f64)> {
    Ok(match reg {
        Register::Single(g) => (
            single_logical_gate_fidelity(g, run)?.fidelity,
            dynamical_single_fidelity(g, run)?.fidelity,
        ),
        Register::Two => (
            two_logical_gate_fidelity(run, CP_CHI)?.fidelity,
            dynamical_cp_fidelity(run)?.fidelity,
        ),
    })
}

/// Fidelities versus the transmon rate `κ₋ = κ_z = κ`; resonator rates stay
/// at their configured values.
pub fn kappa_sweep(reg: Register, run: &DeviceRun, kappas: &[f64]) -> Result<Sweep> {
    let mut s = Sweep {
        label: "kappa".into(),
        x: kappas.to_vec(),
        geometric: Vec::new(),
        dynamical: Vec::new(),
    };
    for &k in kappas {
        let mut r = *run;
        r.noise.kappa_minus = k;
        r.noise.kappa_z = k;
        let (g, d) = pair(reg, &r)?;
        s.geometric.push(g);
        s.dynamical.push(d);
    }
    Ok(s)
}

/// Fidelities versus the drift `δ₁` of the first transmon.
pub fn drift_sweep(reg: Register, run: &DeviceRun, deltas: &[f64]) -> Result<Sweep> {
    let mut s = Sweep {
        label: "delta1".into(),
        x: deltas.to_vec(),
        geometric: Vec::new(),
        dynamical: Vec::new(),
    };
    for &d in deltas {
        let r = DeviceRun { drift1: d, ..*run };
        let (g, dy) = pair(reg, &r)?;
        s.geometric.push(g);
        s.dynamical.push(dy);
    }
    Ok(s)
}

/// Two-qubit fidelities on a `(δ₁, δ₂)` grid, as `(geometric, dynamical)`.
pub fn drift_grid(run: &DeviceRun, d1: &[f64], d2: &[f64]) -> Result<(ScanResult, ScanResult)> {
    let mut geo = vec![vec![0.0; d2.len()]; d1.len()];
    let mut dyn_ = geo.clone();
    for (i, &a) in d1.iter().enumerate() {
        for (j, &b) in d2.iter().enumerate() {
            let r = DeviceRun {
                drift1: a,
                drift2: b,
                ..*run
            };
            let (g, d) = pair(Register::Two, &r)?;
            geo[i][j] = g;
            dyn_[i][j] = d;
        }
    }
    let make = |values: Vec<Vec<f64>>, scheme: &str| ScanResult {
        axis1_label: "delta1".into(),
        axis2_label: "delta2".into(),
        axis1: d1.to_vec(),
        axis2: d2.to_vec(),
        values,
        gate: "CP".into(),
        scheme: scheme.into(),
        failures: Vec::new(),
    };
    Ok((make(geo, "geometric"), make(dyn_, "dynamical")))
}
