//! Dense complex operators on truncated Fock spaces.
//!
//! A single mode of truncation `N` uses the basis `|0⟩ … |N−1⟩`. Two modes use
//! the product basis with mode `a` major: `|i_a, i_b⟩` sits at index
//! `i_a * N_b + i_b`. Every bipartite routine in the crate relies on that
//! ordering.

use std::ops::{Add, Deref, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub(crate) const IM: C64 = C64 { re: 0.0, im: 1.0 };

/// Truncated single-mode Fock space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockSpace {
    n: usize,
}

impl FockSpace {
    pub const MIN_TRUNCATION: usize = 2;

    pub fn new(n: usize) -> Result<Self> {
        if n < Self::MIN_TRUNCATION {
            return Err(Error::Truncation {
                min: Self::MIN_TRUNCATION,
                got: n,
            });
        }
        Ok(Self { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> Dims {
        Dims::Mode(self.n)
    }
}

/// Shape tag carried by operators and states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dims {
    /// Untagged space of the given dimension.
    Flat(usize),
    /// One bosonic mode with the given truncation.
    Mode(usize),
    /// Two modes `(N_a, N_b)`, mode `a` major.
    Pair(usize, usize),
}

impl Dims {
    pub fn total(&self) -> usize {
        match *self {
            Dims::Flat(d) | Dims::Mode(d) => d,
            Dims::Pair(a, b) => a * b,
        }
    }

    pub fn pair(&self) -> Option<(usize, usize)> {
        match *self {
            Dims::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn is_bipartite(&self) -> bool {
        matches!(self, Dims::Pair(..))
    }
}

/// Which factor of a bipartite space an operation addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// Validation thresholds for states. The defaults are the documented
/// contract values; callers may loosen or tighten them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Max |ρ − ρ†| relative to max(1, max|ρ|).
    pub hermitian: f64,
    /// Max |Tr ρ − 1|.
    pub trace: f64,
    /// Smallest eigenvalue must be ≥ −positivity.
    pub positivity: f64,
    /// Max |‖ψ‖ − 1| for state vectors.
    pub norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            trace: 1e-10,
            positivity: 1e-8,
            norm: 1e-12,
        }
    }
}

/// Square complex matrix with a shape tag.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
    dims: Dims,
}

impl Operator {
    pub fn new(matrix: DMatrix<C64>, dims: Dims) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if dims.total() != rows {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                got: rows,
            });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator entries"));
        }
        Ok(Self { matrix, dims })
    }

    /// Wraps a square matrix with a [`Dims::Flat`] tag.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        let d = matrix.nrows();
        Self::new(matrix, Dims::Flat(d))
    }

    pub(crate) fn new_unchecked(matrix: DMatrix<C64>, dims: Dims) -> Self {
        debug_assert_eq!(matrix.nrows(), dims.total());
        Self { matrix, dims }
    }

    pub fn identity(dims: Dims) -> Self {
        let d = dims.total();
        Self::new_unchecked(DMatrix::identity(d, d), dims)
    }

    pub fn zeros(dims: Dims) -> Self {
        let d = dims.total();
        Self::new_unchecked(DMatrix::zeros(d, d), dims)
    }

    pub fn from_diagonal(diag: &[C64], dims: Dims) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)), dims)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// Retags the operator; the new tag must have the same total dimension.
    pub fn with_dims(mut self, dims: Dims) -> Result<Self> {
        if dims.total() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dims.total(),
            });
        }
        self.dims = dims;
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        Self::new_unchecked(self.matrix.adjoint(), self.dims)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of |M − M†|.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..=j {
                let diff = self.matrix[(i, j)] - self.matrix[(j, i)].conj();
                worst = worst.max(diff.norm());
            }
        }
        worst
    }

    /// Hermitian within `tol · max(1, max|M|)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol * self.max_abs().max(1.0)
    }

    /// (M + M†)/2.
    pub fn hermitian_part(&self) -> Self {
        Self::new_unchecked(hermitize(&self.matrix), self.dims)
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::new_unchecked(&self.matrix * factor, self.dims)
    }

    pub fn apply(&self, psi: &StateVector) -> Result<DVector<C64>> {
        check_dim(self.dim(), psi.dim())?;
        Ok(&self.matrix * psi.amplitudes())
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }
}

pub(crate) fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

fn merge_dims(a: Dims, b: Dims) -> Dims {
    if a == b {
        a
    } else {
        Dims::Flat(a.total())
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn mul(self, rhs: &'a Operator) -> Operator {
        Operator::new_unchecked(&self.matrix * &rhs.matrix, merge_dims(self.dims, rhs.dims))
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn add(self, rhs: &'a Operator) -> Operator {
        Operator::new_unchecked(&self.matrix + &rhs.matrix, merge_dims(self.dims, rhs.dims))
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn sub(self, rhs: &'a Operator) -> Operator {
        Operator::new_unchecked(&self.matrix - &rhs.matrix, merge_dims(self.dims, rhs.dims))
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: f64) -> Operator {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Normalized ket.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
    dims: Dims,
}

impl StateVector {
    /// Accepts amplitudes whose norm is 1 within the default tolerance.
    pub fn new(amplitudes: DVector<C64>, dims: Dims) -> Result<Self> {
        check_dim(dims.total(), amplitudes.len())?;
        let norm = amplitudes.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite("state amplitudes"));
        }
        if (norm - 1.0).abs() > Tolerances::default().norm {
            return Err(Error::InvalidState(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Divides by the norm; rejects the null vector.
    pub fn normalized(amplitudes: DVector<C64>, dims: Dims) -> Result<Self> {
        check_dim(dims.total(), amplitudes.len())?;
        let norm = amplitudes.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite("state amplitudes"));
        }
        if norm < 1e-300 {
            return Err(Error::InvalidState("null vector cannot be normalized".into()));
        }
        Ok(Self {
            amplitudes: amplitudes / C64::new(norm, 0.0),
            dims,
        })
    }

    pub fn fock(dims: Dims, k: usize) -> Result<Self> {
        let d = dims.total();
        if k >= d {
            return Err(Error::InvalidParameter(format!(
                "Fock index {k} outside truncation {d}"
            )));
        }
        let mut v = DVector::zeros(d);
        v[k] = ONE;
        Ok(Self { amplitudes: v, dims })
    }

    /// Truncated coherent state, renormalized after truncation.
    pub fn coherent(alpha: C64, space: FockSpace) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::NonFinite("coherent amplitude"));
        }
        warn_truncation(alpha, space.dim());
        Self::normalized(coherent_amplitudes(alpha, space.dim()), space.dims())
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let dims = match (self.dims, other.dims) {
            (Dims::Mode(a), Dims::Mode(b)) => Dims::Pair(a, b),
            (a, b) => Dims::Flat(a.total() * b.total()),
        };
        StateVector {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            dims,
        }
    }

    /// |ψ⟩⟨ψ|.
    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::new_unchecked(Operator::new_unchecked(m, self.dims))
    }
}

/// Unnormalized truncated coherent amplitudes e^{−|α|²/2} αⁿ/√n!.
pub(crate) fn coherent_amplitudes(alpha: C64, n: usize) -> DVector<C64> {
    let mut v = DVector::zeros(n);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for k in 0..n {
        if k > 0 {
            c = c * alpha / (k as f64).sqrt();
        }
        v[k] = c;
    }
    v
}

pub(crate) fn warn_truncation(alpha: C64, n: usize) {
    if alpha.norm_sqr() > n as f64 / 4.0 {
        log::warn!(
            "|alpha|^2 = {:.3} exceeds N/4 = {:.3}; truncation error may be significant",
            alpha.norm_sqr(),
            n as f64 / 4.0
        );
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        Self::with_tolerances(op, &Tolerances::default())
    }

    pub fn with_tolerances(op: Operator, tol: &Tolerances) -> Result<Self> {
        let scale = op.max_abs().max(1.0);
        let herm = op.hermiticity_error();
        if herm > tol.hermitian * scale {
            return Err(Error::NotHermitian(herm));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidState(format!(
                "trace {} + {}i is not 1",
                tr.re, tr.im
            )));
        }
        let rho = Self(op);
        let min = rho.min_eigenvalue();
        if min < -tol.positivity {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min:e} is negative"
            )));
        }
        Ok(rho)
    }

    pub(crate) fn new_unchecked(op: Operator) -> Self {
        Self(op)
    }

    pub fn from_state(psi: &StateVector) -> Self {
        psi.to_density()
    }

    pub fn fock(dims: Dims, k: usize) -> Result<Self> {
        Ok(StateVector::fock(dims, k)?.to_density())
    }

    pub fn maximally_mixed(dims: Dims) -> Self {
        let d = dims.total() as f64;
        Self(Operator::identity(dims).scale(C64::new(1.0 / d, 0.0)))
    }

    /// Σ p_i ρ_i; probabilities must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let dims = first.1.dims();
        let mut acc = DMatrix::zeros(dims.total(), dims.total());
        let mut total = 0.0;
        for (p, rho) in parts {
            if !(*p >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative probability {p}")));
            }
            check_dim(dims.total(), rho.dim())?;
            acc += rho.matrix() * C64::new(*p, 0.0);
            total += p;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "mixture probabilities sum to {total}"
            )));
        }
        Ok(Self(Operator::new_unchecked(acc, dims)))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let e = hermitize(self.0.matrix()).symmetric_eigenvalues();
        e.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self(tensor_product(&self.0, &other.0))
    }
}

impl Deref for DensityMatrix {
    type Target = Operator;

    fn deref(&self) -> &Operator {
        &self.0
    }
}

/// Bosonic operators of one truncated mode.
#[derive(Clone, Debug)]
pub struct LadderOperators {
    pub annihilation: Operator,
    pub creation: Operator,
    pub number: Operator,
    pub parity: Operator,
}

pub fn ladder_operators(space: FockSpace) -> LadderOperators {
    let n = space.dim();
    let dims = space.dims();
    let mut a = DMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    let number = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            ZERO
        }
    });
    let parity = DMatrix::from_fn(n, n, |i, j| {
        if i != j {
            ZERO
        } else if i % 2 == 0 {
            ONE
        } else {
            -ONE
        }
    });
    LadderOperators {
        creation: Operator::new_unchecked(a.adjoint(), dims),
        annihilation: Operator::new_unchecked(a, dims),
        number: Operator::new_unchecked(number, dims),
        parity: Operator::new_unchecked(parity, dims),
    }
}

/// D(α) = exp(α a† − α* a) from the Laguerre closed form.
pub fn displacement(alpha: C64, space: FockSpace) -> Result<Operator> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::NonFinite("displacement amplitude"));
    }
    warn_truncation(alpha, space.dim());
    Ok(Operator::new_unchecked(
        displacement_matrix(alpha, space.dim()),
        space.dims(),
    ))
}

/// Matrix elements ⟨m|D(β)|n⟩ for m, n < dim.
///
/// For m = n + k the element is √(n!/m!) β^k e^{−|β|²/2} L_n^{(k)}(|β|²). The
/// recurrence runs on f_n = √(n!/(n+k)!) |β|^k e^{−|β|²/2} L_n^{(k)}(|β|²),
/// which stays O(1) where the bare polynomial would overflow.
pub(crate) fn displacement_matrix(beta: C64, dim: usize) -> DMatrix<C64> {
    let mut d = DMatrix::zeros(dim, dim);
    fill_displacement(beta, dim, &mut d, &mut vec![0.0; dim]);
    d
}

pub(crate) fn fill_displacement(beta: C64, dim: usize, out: &mut DMatrix<C64>, f: &mut [f64]) {
    let x = beta.norm_sqr();
    let r = x.sqrt();
    let unit = if r > 0.0 { beta / r } else { ONE };
    let half_ln_x = if x > 0.0 { 0.5 * x.ln() } else { f64::NEG_INFINITY };
    let mut ln_fact = 0.0; // ln k!
    let mut phase = ONE; // unit^k
    for k in 0..dim {
        if k > 0 {
            ln_fact += (k as f64).ln();
            phase *= unit;
        }
        let len = dim - k;
        f[0] = if k == 0 {
            (-0.5 * x).exp()
        } else if x == 0.0 {
            0.0
        } else {
            (k as f64 * half_ln_x - 0.5 * x - 0.5 * ln_fact).exp()
        };
        if len > 1 {
            f[1] = (1.0 + k as f64 - x) * f[0] / (1.0 + k as f64).sqrt();
        }
        for j in 1..len.saturating_sub(1) {
            let jf = j as f64;
            let kf = k as f64;
            f[j + 1] = ((2.0 * jf + 1.0 + kf - x) * f[j] - (jf * (jf + kf)).sqrt() * f[j - 1])
                / ((jf + 1.0) * (jf + 1.0 + kf)).sqrt();
        }
        let lower = phase;
        let upper = if k % 2 == 0 { phase.conj() } else { -phase.conj() };
        for j in 0..len {
            out[(j + k, j)] = lower * f[j];
            if k > 0 {
                out[(j, j + k)] = upper * f[j];
            }
        }
    }
}

/// Kronecker product, `a` major. Two single-mode tags combine into a pair tag.
pub fn tensor_product(a: &Operator, b: &Operator) -> Operator {
    let dims = match (a.dims, b.dims) {
        (Dims::Mode(x), Dims::Mode(y)) => Dims::Pair(x, y),
        (x, y) => Dims::Flat(x.total() * y.total()),
    };
    Operator::new_unchecked(a.matrix.kronecker(&b.matrix), dims)
}

/// Lifts a single-mode operator into a two-mode space.
pub fn embed(op: &Operator, on: Subsystem, dims: (usize, usize)) -> Result<Operator> {
    let (na, nb) = dims;
    match on {
        Subsystem::A => {
            check_dim(na, op.dim())?;
            Ok(tensor_product(op, &Operator::identity(Dims::Mode(nb))))
        }
        Subsystem::B => {
            check_dim(nb, op.dim())?;
            Ok(tensor_product(&Operator::identity(Dims::Mode(na)), op))
        }
    }
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `values`.
    pub vectors: DMatrix<C64>,
}

pub fn hermitian_eigensystem(m: &Operator) -> Result<Eigensystem> {
    let err = m.hermiticity_error();
    if err > Tolerances::default().hermitian * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(err));
    }
    Ok(eigh(&hermitize(m.matrix())))
}

pub(crate) fn eigh(m: &DMatrix<C64>) -> Eigensystem {
    let e = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| e.eigenvectors[(r, order[c])]);
    Eigensystem { values, vectors }
}

/// e^M by scaling and squaring with a Padé core.
pub fn matrix_exponential(m: &Operator) -> Operator {
    Operator::new_unchecked(m.matrix.clone().exp(), m.dims)
}

fn bipartite_check(op: &Operator, dims: (usize, usize)) -> Result<()> {
    check_dim(dims.0 * dims.1, op.dim())
}

/// Reduced state of the kept subsystem.
pub fn partial_trace(
    rho: &DensityMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(partial_trace_operator(
        rho, dims, keep,
    )?))
}

pub fn partial_trace_operator(
    op: &Operator,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<Operator> {
    bipartite_check(op, dims)?;
    let (na, nb) = dims;
    let m = op.matrix();
    let out = match keep {
        Subsystem::A => DMatrix::from_fn(na, na, |i, j| {
            (0..nb).map(|k| m[(i * nb + k, j * nb + k)]).sum()
        }),
        Subsystem::B => DMatrix::from_fn(nb, nb, |i, j| {
            (0..na).map(|k| m[(k * nb + i, k * nb + j)]).sum()
        }),
    };
    let kept = match keep {
        Subsystem::A => na,
        Subsystem::B => nb,
    };
    Ok(Operator::new_unchecked(out, Dims::Mode(kept)))
}

/// Transposes the indices of one factor: for `moved = B`,
/// ⟨i,k|ρ^{T_B}|j,l⟩ = ⟨i,l|ρ|j,k⟩.
pub fn partial_transpose(op: &Operator, dims: (usize, usize), moved: Subsystem) -> Result<Operator> {
    bipartite_check(op, dims)?;
    let (na, nb) = dims;
    let m = op.matrix();
    let out = DMatrix::from_fn(na * nb, na * nb, |r, c| {
        let (i, k) = (r / nb, r % nb);
        let (j, l) = (c / nb, c % nb);
        match moved {
            Subsystem::B => m[(i * nb + l, j * nb + k)],
            Subsystem::A => m[(j * nb + k, i * nb + l)],
        }
    });
    Ok(Operator::new_unchecked(out, Dims::Pair(na, nb)))
}
