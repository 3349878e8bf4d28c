//! Lindblad evolution, explicit superoperators and steady states.
//!
//! Density matrices are integrated as column-major `d×d` arrays through the
//! matrix-free [`Generator`]. The explicit [`LiouvillianMatrix`] acts on the
//! column stacking vec(ρ) and is only built for small spaces.

mod generator;
mod integrator;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use generator::Generator;
pub use integrator::IntegratorOptions;

use crate::error::{Error, Result};
use crate::fock::{check_dim, hermitize, DensityMatrix, Operator, C64, IM, ONE, ZERO};
use crate::models::SystemModel;
use integrator::Dopri5;

/// Largest superoperator side (d²) [`liouvillian_matrix`] will allocate.
pub const MAX_SUPEROPERATOR_DIM: usize = 4096;

/// −i[H,ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ}) without forming any d²×d² object.
pub fn lindblad_rhs(model: &SystemModel, rho: &DensityMatrix) -> Result<Operator> {
    check_dim(model.dim(), rho.dim())?;
    let gen = Generator::new(model);
    let d = model.dim();
    let mut out = vec![ZERO; d * d];
    gen.apply(rho.matrix().as_slice(), &mut out, &mut Vec::new());
    Ok(Operator::new_unchecked(
        DMatrix::from_vec(d, d, out),
        rho.dims(),
    ))
}

/// Superoperator on column-stacked ρ.
#[derive(Clone, Debug)]
pub struct LiouvillianMatrix {
    matrix: DMatrix<C64>,
    dim: usize,
}

impl LiouvillianMatrix {
    /// Side of the underlying ρ.
    pub fn state_dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let v = DVector::from_column_slice(rho.as_slice());
        let out = &self.matrix * v;
        DMatrix::from_column_slice(self.dim, self.dim, out.as_slice())
    }

    /// All eigenvalues, via a complex Schur decomposition.
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        let schur = self.matrix.clone().schur();
        let values = schur
            .eigenvalues()
            .ok_or_else(|| Error::Numerical("Schur form is not triangular".into()))?;
        Ok(values.iter().copied().collect())
    }
}

/// vec(AXB) = (Bᵀ ⊗ A) vec(X).
pub fn liouvillian_matrix(model: &SystemModel) -> Result<LiouvillianMatrix> {
    let d = model.dim();
    if d * d > MAX_SUPEROPERATOR_DIM {
        return Err(Error::TooLarge {
            dim: d * d,
            limit: MAX_SUPEROPERATOR_DIM,
        });
    }
    let id = DMatrix::<C64>::identity(d, d);
    let h = model.hamiltonian().matrix();
    let mut l = id.kronecker(h) * (-IM) + h.transpose().kronecker(&id) * IM;
    for j in model.jumps() {
        let m = j.matrix();
        let k = m.adjoint() * m;
        l += m.conjugate().kronecker(m);
        l -= id.kronecker(&k) * C64::new(0.5, 0.0);
        l -= k.transpose().kronecker(&id) * C64::new(0.5, 0.0);
    }
    Ok(LiouvillianMatrix { matrix: l, dim: d })
}

/// Per-sample integrator record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleDiagnostics {
    /// |Tr ρ(t) − 1|; states are never renormalized.
    pub trace_drift: f64,
    /// Accepted steps since t = 0.
    pub steps: usize,
    pub rejected_steps: usize,
    /// Smallest eigenvalue, when positivity checks are enabled.
    pub min_eigenvalue: Option<f64>,
}

/// Time-ordered samples of an evolution.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: Vec<SampleDiagnostics>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.trace_drift).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub integrator: IntegratorOptions,
    /// Compute the minimum eigenvalue of every sample.
    pub check_positivity: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorOptions::default(),
            check_positivity: true,
        }
    }
}

impl From<IntegratorOptions> for EvolveOptions {
    fn from(integrator: IntegratorOptions) -> Self {
        Self {
            integrator,
            ..Self::default()
        }
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidParameter("sample times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("sample times must be strictly increasing".into()));
    }
    Ok(())
}

fn sample(
    y: &[C64],
    dims: crate::fock::Dims,
    steps: usize,
    rejected: usize,
    check_positivity: bool,
) -> (DensityMatrix, SampleDiagnostics) {
    let d = dims.total();
    let rho = DensityMatrix::new_unchecked(Operator::new_unchecked(
        DMatrix::from_column_slice(d, d, y),
        dims,
    ));
    let tr = rho.trace();
    let diag = SampleDiagnostics {
        trace_drift: (tr - ONE).norm(),
        steps,
        rejected_steps: rejected,
        min_eigenvalue: check_positivity.then(|| rho.min_eigenvalue()),
    };
    (rho, diag)
}

/// Integrates from ρ(0) = `rho0` and samples at `times`.
pub fn evolve(
    model: &SystemModel,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    let (traj, err) = evolve_partial(model, rho0, times, opts)?;
    match err {
        Some(e) => Err(e),
        None => Ok(traj),
    }
}

/// Like [`evolve`], but an integrator failure mid-run returns the samples
/// reached so far alongside the error.
pub fn evolve_partial(
    model: &SystemModel,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<(Trajectory, Option<Error>)> {
    check_dim(model.dim(), rho0.dim())?;
    check_times(times)?;
    opts.integrator.validate()?;
    let dims = rho0.dims();
    let gen = Generator::new(model);
    let mut scratch = Vec::new();
    let f = move |y: &[C64], dy: &mut [C64]| gen.apply(y, dy, &mut scratch);
    let mut solver = Dopri5::new(f, 0.0, rho0.matrix().as_slice().to_vec(), opts.integrator);

    let mut traj = Trajectory {
        times: Vec::with_capacity(times.len()),
        states: Vec::with_capacity(times.len()),
        diagnostics: Vec::with_capacity(times.len()),
    };
    let t_final = times.last().copied().unwrap_or(0.0);
    let mut buf = vec![ZERO; dims.total() * dims.total()];
    let mut next = 0;
    while next < times.len() {
        // Emit every requested time covered by the current step.
        while next < times.len() && times[next] <= solver.t() {
            solver.interpolate(times[next], &mut buf);
            let (rho, diag) = sample(&buf, dims, solver.steps, solver.rejected, opts.check_positivity);
            traj.times.push(times[next]);
            traj.states.push(rho);
            traj.diagnostics.push(diag);
            next += 1;
        }
        if next == times.len() {
            break;
        }
        if let Err(e) = solver.step(t_final) {
            return Ok((traj, Some(e)));
        }
    }
    Ok((traj, None))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyStateMethod {
    /// Null vector of the explicit Liouvillian.
    Kernel,
    /// Time integration until the generator residual is small.
    Propagate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyStateOptions {
    /// Propagate stops once max|rhs(ρ)| < tol.
    pub tol: f64,
    /// Propagate gives up past this time.
    pub t_max: f64,
    pub integrator: IntegratorOptions,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            t_max: 1e4,
            integrator: IntegratorOptions::default(),
        }
    }
}

impl SteadyStateOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Stationary state of `model`.
///
/// `Kernel` fails with [`Error::DegenerateKernel`] when the stationary manifold
/// is more than one-dimensional (no single-photon loss); `Propagate` then
/// selects the stationary state reached from `rho0`.
pub fn steady_state(
    model: &SystemModel,
    method: SteadyStateMethod,
    rho0: Option<&DensityMatrix>,
    opts: &SteadyStateOptions,
) -> Result<DensityMatrix> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("steady-state tolerance must be positive".into()));
    }
    match method {
        SteadyStateMethod::Kernel => kernel_steady_state(model),
        SteadyStateMethod::Propagate => {
            let rho0 = rho0.ok_or_else(|| {
                Error::InvalidParameter("propagate steady state needs an initial state".into())
            })?;
            propagate_steady_state(model, rho0, opts)
        }
    }
}

/// Degeneracy threshold for the kernel method, relative to the spectral radius.
pub const KERNEL_DEGENERACY: f64 = 1e-8;

fn kernel_steady_state(model: &SystemModel) -> Result<DensityMatrix> {
    let lv = liouvillian_matrix(model)?;
    let d = lv.state_dim();
    let mut eig = lv.eigenvalues()?;
    eig.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let radius = eig.last().map(|z| z.norm()).unwrap_or(0.0);
    if eig.len() > 1 {
        let threshold = KERNEL_DEGENERACY * radius;
        if eig[1].norm() < threshold {
            return Err(Error::DegenerateKernel {
                second: eig[1].norm(),
                threshold,
            });
        }
    }
    // Inverse iteration with a shift just off the smallest eigenvalue.
    let shift = eig[0] + C64::new(1e-10 * radius.max(1.0), 0.0);
    let n = d * d;
    let shifted = lv.matrix() - DMatrix::<C64>::identity(n, n) * shift;
    let lu = shifted.lu();
    let mut x = DVector::from_fn(n, |k, _| if k % (d + 1) == 0 { ONE } else { ZERO });
    for _ in 0..6 {
        x = lu
            .solve(&x)
            .ok_or_else(|| Error::Numerical("singular shifted Liouvillian".into()))?;
        let norm = x.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Numerical("inverse iteration diverged".into()));
        }
        x /= C64::new(norm, 0.0);
    }
    let rho = hermitize(&DMatrix::from_column_slice(d, d, x.as_slice()));
    let tr = rho.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::Numerical("kernel vector has vanishing trace".into()));
    }
    Ok(DensityMatrix::new_unchecked(Operator::new_unchecked(
        rho / tr,
        model.dims(),
    )))
}

/// Integrator tolerance relative to `tol / rate_bound` in propagation.
const PROPAGATE_TOL_RATIO: f64 = 0.1;

fn propagate_steady_state(
    model: &SystemModel,
    rho0: &DensityMatrix,
    opts: &SteadyStateOptions,
) -> Result<DensityMatrix> {
    check_dim(model.dim(), rho0.dim())?;
    opts.integrator.validate()?;
    // Near stationarity the step size sits at the stability limit and errors
    // of order the integrator tolerance persist in the fastest decaying
    // directions, so the residual floors near tolerance × fastest rate.
    let gen = Generator::new(model);
    let floor = PROPAGATE_TOL_RATIO * opts.tol / gen.rate_bound().max(1.0);
    let mut iopts = opts.integrator;
    iopts.abs_tol = iopts.abs_tol.min(floor);
    iopts.rel_tol = iopts.rel_tol.min(floor);
    let mut scratch = Vec::new();
    let f = move |y: &[C64], dy: &mut [C64]| gen.apply(y, dy, &mut scratch);
    let mut solver = Dopri5::new(f, 0.0, rho0.matrix().as_slice().to_vec(), iopts);
    let residual = |s: &[C64]| s.iter().map(|z| z.norm()).fold(0.0, f64::max);
    loop {
        let r = residual(solver.derivative());
        if r < opts.tol {
            let d = model.dim();
            return Ok(DensityMatrix::new_unchecked(Operator::new_unchecked(
                DMatrix::from_column_slice(d, d, solver.y()),
                rho0.dims(),
            )));
        }
        if solver.t() >= opts.t_max {
            return Err(Error::NonConvergence {
                t: solver.t(),
                residual: r,
            });
        }
        solver.step(opts.t_max)?;
    }
}
