//! Dense complex linear algebra, time-ordered propagation and phase-blind
//! operator distances.

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::tolerances as tol;

pub type C64 = Complex64;
pub type Mat = Array2<C64>;
pub type Vector = Array1<C64>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn identity(n: usize) -> Mat {
    Mat::eye(n)
}

pub fn zeros(n: usize) -> Mat {
    Mat::zeros((n, n))
}

pub fn dagger(a: &Mat) -> Mat {
    a.t().mapv(|z| z.conj())
}

pub fn trace(a: &Mat) -> C64 {
    a.diag().sum()
}

/// Largest entry modulus.
pub fn max_abs(a: &Mat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Induced ∞-norm (largest absolute row sum), an upper bound on the
/// spectral norm of a Hermitian matrix.
pub fn norm_inf(a: &Mat) -> f64 {
    a.axis_iter(Axis(0))
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn norm_one(a: &Mat) -> f64 {
    a.axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn hermiticity_error(a: &Mat) -> f64 {
    let n = a.nrows();
    let mut e: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            e = e.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    e
}

pub fn unitarity_error(a: &Mat) -> f64 {
    max_abs(&(dagger(a).dot(a) - identity(a.nrows())))
}

fn hermitian_ok(a: &Mat) -> bool {
    let scale = max_abs(a).max(1.0);
    hermiticity_error(a) <= tol::HERMITIAN.max(tol::HERMITIAN_REL * scale)
}

pub fn sigma_x() -> Mat {
    ndarray::array![[ZERO, ONE], [ONE, ZERO]]
}

pub fn sigma_y() -> Mat {
    ndarray::array![[ZERO, -I], [I, ZERO]]
}

pub fn sigma_z() -> Mat {
    ndarray::array![[ONE, ZERO], [ZERO, -ONE]]
}

/// Square complex operator with optional structural checks.
#[derive(Clone, Debug, PartialEq)]
pub struct QOperator {
    m: Mat,
}

impl QOperator {
    pub fn new(m: Mat) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return invalid(format!("operator must be square, got {:?}", m.dim()));
        }
        Ok(Self { m })
    }

    /// Accepts `m` only if it is Hermitian within tolerance.
    pub fn hermitian(m: Mat) -> Result<Self> {
        let op = Self::new(m)?;
        if !hermitian_ok(&op.m) {
            return invalid(format!(
                "operator is not hermitian (error {:.3e})",
                hermiticity_error(&op.m)
            ));
        }
        Ok(op)
    }

    /// Accepts `m` only if it is unitary within tolerance.
    pub fn unitary(m: Mat) -> Result<Self> {
        let op = Self::new(m)?;
        let e = unitarity_error(&op.m);
        if e > tol::UNITARY {
            return invalid(format!("operator is not unitary (error {e:.3e})"));
        }
        Ok(op)
    }

    pub fn identity(n: usize) -> Self {
        Self { m: identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn mat(&self) -> &Mat {
        &self.m
    }

    pub fn into_mat(self) -> Mat {
        self.m
    }

    pub fn dagger(&self) -> Self {
        Self { m: dagger(&self.m) }
    }

    pub fn dot(&self, other: &Self) -> Self {
        Self {
            m: self.m.dot(&other.m),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        hermitian_ok(&self.m)
    }

    pub fn is_unitary(&self) -> bool {
        unitarity_error(&self.m) <= tol::UNITARY
    }
}

impl From<QOperator> for Mat {
    fn from(op: QOperator) -> Mat {
        op.m
    }
}

/// Quantum state as a density matrix or a normalised ket.
#[derive(Clone, Debug, PartialEq)]
pub enum QState {
    Density(Mat),
    Pure(Vector),
}

impl QState {
    pub fn density(rho: Mat) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return invalid("density matrix must be square");
        }
        let s = QState::Density(rho);
        s.validate()?;
        Ok(s)
    }

    pub fn pure(v: Vector) -> Result<Self> {
        let s = QState::Pure(v);
        s.validate()?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        match self {
            QState::Density(r) => r.nrows(),
            QState::Pure(v) => v.len(),
        }
    }

    pub fn to_density(&self) -> Mat {
        match self {
            QState::Density(r) => r.clone(),
            QState::Pure(v) => outer(v, v),
        }
    }

    /// Checks the invariants of the stored representation.
    pub fn validate(&self) -> Result<()> {
        match self {
            QState::Pure(v) => {
                let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if (n - 1.0).abs() > tol::STATE_NORM {
                    return invalid(format!("state norm {n} differs from 1"));
                }
            }
            QState::Density(r) => {
                let tr = trace(r);
                if (tr - ONE).norm() > tol::DENSITY_TRACE {
                    return invalid(format!("density trace {tr} differs from 1"));
                }
                let h = hermiticity_error(r);
                if h > tol::DENSITY_HERMITIAN {
                    return invalid(format!("density matrix not hermitian ({h:.3e})"));
                }
                let e = min_eigenvalue(r);
                if e < tol::DENSITY_MIN_EIG {
                    return invalid(format!("density matrix has eigenvalue {e:.3e}"));
                }
            }
        }
        Ok(())
    }
}

/// `|a⟩⟨b|`.
pub fn outer(a: &Vector, b: &Vector) -> Mat {
    let n = a.len();
    let m = b.len();
    Mat::from_shape_fn((n, m), |(i, j)| a[i] * b[j].conj())
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &Mat) -> f64 {
    let n = a.nrows();
    let h = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let z = 0.5 * (a[[i, j]] + a[[j, i]].conj());
        nalgebra::Complex::new(z.re, z.im)
    });
    let eig = nalgebra::SymmetricEigen::new(h);
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Time window and propagation step ceiling, in µs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub max_step: f64,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, max_step: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && max_step.is_finite()) {
            return invalid("time grid values must be finite");
        }
        if t1 < t0 {
            return invalid(format!("t1 = {t1} precedes t0 = {t0}"));
        }
        if max_step <= 0.0 {
            return invalid("max_step must be positive");
        }
        Ok(Self { t0, t1, max_step })
    }

    pub fn span(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Same window with half the step ceiling.
    pub fn halved(&self) -> Self {
        Self {
            max_step: 0.5 * self.max_step,
            ..*self
        }
    }

    /// Number of coarse steps and their width.
    pub fn coarse_steps(&self) -> (usize, f64) {
        let span = self.span();
        if span == 0.0 {
            return (0, 0.0);
        }
        let n = (span / self.max_step).ceil().max(1.0) as usize;
        (n, span / n as f64)
    }
}

/// Tensor product with standard ordering.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Mat::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let s = a[[i, j]];
            if s == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[[i * rb + k, j * cb + l]] = s * b[[k, l]];
                }
            }
        }
    }
    out
}

/// `kron` on checked operators.
pub fn kron_op(a: &QOperator, b: &QOperator) -> QOperator {
    QOperator { m: kron(a.mat(), b.mat()) }
}

/// Places `op` on subsystem `site` of a register with local dimensions `dims`.
pub fn embed(op: &Mat, site: usize, dims: &[usize]) -> Mat {
    let mut out = identity(1);
    for (k, &d) in dims.iter().enumerate() {
        let factor = if k == site { op.clone() } else { identity(d) };
        out = kron(&out, &factor);
    }
    out
}

/// General matrix exponential `e^A` by scaling and squaring with a Taylor core.
pub fn expm(a: &Mat) -> Mat {
    let n = a.nrows();
    let norm = norm_one(a);
    let mut s = 0u32;
    if norm > 0.5 {
        s = (norm / 0.5).log2().ceil() as u32;
    }
    let scale = 0.5f64.powi(s as i32);
    let b = a.mapv(|z| z * scale);
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=40 {
        term = term.dot(&b).mapv(|z| z / k as f64);
        sum = sum + &term;
        if norm_one(&term) <= 1e-18 * norm_one(&sum) {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.dot(&sum);
    }
    sum
}

/// `exp(−i H dt)` for a Hermitian `H`.
pub fn matrix_exponential(h: &QOperator, dt: f64) -> Result<QOperator> {
    if !h.is_hermitian() {
        return invalid("matrix_exponential requires a hermitian generator");
    }
    if !dt.is_finite() {
        return invalid("time step must be finite");
    }
    let u = expm(&h.mat().mapv(|z| -I * z * dt));
    Ok(QOperator { m: u })
}

/// Step propagator `exp(−i H dt)` without checks, for hot loops.
pub fn step_unitary(h: &Mat, dt: f64) -> Mat {
    if h.dim() == (2, 2) {
        return step_unitary_2x2(h, dt);
    }
    expm(&h.mapv(|z| -I * z * dt))
}

/// Closed form `e^{−iadt}(cos(|b|dt) − i sin(|b|dt) b̂·σ)` for `H = a + b·σ`.
fn step_unitary_2x2(h: &Mat, dt: f64) -> Mat {
    let a = 0.5 * (h[[0, 0]].re + h[[1, 1]].re);
    let bz = 0.5 * (h[[0, 0]].re - h[[1, 1]].re);
    let bx = 0.5 * (h[[0, 1]] + h[[1, 0]]).re;
    let by = 0.5 * (h[[1, 0]] - h[[0, 1]]).im;
    let nb = (bx * bx + by * by + bz * bz).sqrt();
    let (c, sinc) = if nb * dt.abs() < 1e-8 {
        (1.0 - 0.5 * (nb * dt).powi(2), dt)
    } else {
        ((nb * dt).cos(), (nb * dt).sin() / nb)
    };
    let g = cis(-a * dt);
    let m = |z: C64| g * z;
    ndarray::array![
        [m(c64(c, -sinc * bz)), m(c64(-sinc * by, -sinc * bx))],
        [m(c64(sinc * by, -sinc * bx)), m(c64(c, sinc * bz))]
    ]
}

fn check_finite(h: &Mat, t: f64) -> Result<()> {
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericFailure(format!(
            "non-finite Hamiltonian entry at t = {t}"
        )));
    }
    Ok(())
}

/// Walks the midpoint rule over `grid`, calling `visit(t_mid, dt, H(t_mid))`
/// on every sub-step. Coarse steps of width ≤ `max_step` are split further so
/// that `‖H‖·Δt ≤ 0.05`.
pub fn midpoint_steps<F, V>(h_of_t: &F, grid: &TimeGrid, mut visit: V) -> Result<()>
where
    F: Fn(f64) -> Mat + ?Sized,
    V: FnMut(f64, f64, &Mat) -> Result<()>,
{
    let (n, h) = grid.coarse_steps();
    for i in 0..n {
        let ta = grid.t0 + i as f64 * h;
        let hm = h_of_t(ta + 0.5 * h);
        check_finite(&hm, ta + 0.5 * h)?;
        if !hermitian_ok(&hm) {
            return invalid(format!("Hamiltonian not hermitian at t = {}", ta + 0.5 * h));
        }
        let k = ((norm_inf(&hm) * h) / tol::STEP_PHASE_CAP).ceil().max(1.0) as usize;
        if k == 1 {
            visit(ta + 0.5 * h, h, &hm)?;
        } else {
            let hs = h / k as f64;
            for j in 0..k {
                let tm = ta + (j as f64 + 0.5) * hs;
                let hj = h_of_t(tm);
                check_finite(&hj, tm)?;
                if !hermitian_ok(&hj) {
                    return invalid(format!("Hamiltonian not hermitian at t = {tm}"));
                }
                visit(tm, hs, &hj)?;
            }
        }
    }
    Ok(())
}

/// Time-ordered propagator as a raw matrix of dimension `dim`.
pub fn propagate_mat<F>(h_of_t: &F, grid: &TimeGrid, dim: usize) -> Result<Mat>
where
    F: Fn(f64) -> Mat + ?Sized,
{
    let mut u = identity(dim);
    midpoint_steps(h_of_t, grid, |_, dt, h| {
        u = step_unitary(h, dt).dot(&u);
        Ok(())
    })?;
    Ok(u)
}

/// Total evolution operator `U(t1, t0)` of the Schrödinger equation.
pub fn propagate_tdse<F>(h_of_t: &F, grid: &TimeGrid) -> Result<QOperator>
where
    F: Fn(f64) -> Mat + ?Sized,
{
    let dim = h_of_t(grid.t0).nrows();
    let u = propagate_mat(h_of_t, grid, dim)?;
    let e = unitarity_error(&u);
    if e > tol::PROPAGATOR_UNITARY {
        return Err(Error::NumericFailure(format!(
            "propagator lost unitarity ({e:.3e})"
        )));
    }
    Ok(QOperator { m: u })
}

/// `min_θ ‖U − e^{iθ}V‖_max`, aligned through `Tr(V†U)`.
pub fn distance_up_to_global_phase(u: &QOperator, v: &QOperator) -> Result<f64> {
    distance_mat(u.mat(), v.mat())
}

/// Matrix form of [`distance_up_to_global_phase`].
pub fn distance_mat(u: &Mat, v: &Mat) -> Result<f64> {
    if u.dim() != v.dim() {
        return invalid(format!("dimension mismatch {:?} vs {:?}", u.dim(), v.dim()));
    }
    let tr = trace(&dagger(v).dot(u));
    if tr.norm() > 1e-14 {
        let ph = tr / tr.norm();
        return Ok(max_abs(&(u - &v.mapv(|z| z * ph))));
    }
    let steps = (2.0 * std::f64::consts::PI / tol::PHASE_GRID).ceil() as usize;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..steps {
        let th = k as f64 * tol::PHASE_GRID;
        let ph = cis(th);
        let fro: f64 = u
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - ph * b).norm_sqr())
            .sum();
        if fro < best.0 {
            best = (fro, th);
        }
    }
    let ph = cis(best.1);
    Ok(max_abs(&(u - &v.mapv(|z| z * ph))))
}
