//! Scalar diagnostics of density matrices. Entropies use the natural log.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::Result;
use crate::fock::{
    check_dim, eigh, hermitize, partial_trace, partial_transpose, DensityMatrix, Dims, Operator,
    StateVector, Subsystem, C64, ZERO,
};

/// Eigenvalues below this are treated as exact zeros inside logarithms.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Tr[op·ρ].
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> Result<C64> {
    check_dim(op.dim(), rho.dim())?;
    let (a, b) = (op.matrix(), rho.matrix());
    let d = a.nrows();
    let mut acc = ZERO;
    for j in 0..d {
        for i in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(acc)
}

fn spectrum(m: &DMatrix<C64>) -> DVector<f64> {
    hermitize(m).symmetric_eigenvalues()
}

fn entropy_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .filter(|&l| l > EIGENVALUE_FLOOR)
        .map(|l| -l * l.ln())
        .sum()
}

/// −Tr ρ ln ρ.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of(spectrum(rho.matrix()).iter().copied()).max(0.0)
}

/// Tr ρ².
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr ρ² = Σ|ρ_ij|² for Hermitian ρ.
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// ⟨ψ|ρ|ψ⟩.
pub fn fidelity_pure(psi: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), psi.dim())?;
    let v = psi.amplitudes();
    Ok((v.adjoint() * rho.matrix() * v)[(0, 0)].re)
}

fn bipartite_dims(rho: &DensityMatrix, dims: Option<(usize, usize)>) -> Result<(usize, usize)> {
    let dims = match dims.or_else(|| rho.dims().pair()) {
        Some(d) => d,
        None => return Err(crate::Error::BipartiteInput),
    };
    check_dim(dims.0 * dims.1, rho.dim())?;
    Ok(dims)
}

/// Σ|λ| over negative eigenvalues of the partial transpose on mode `b`.
///
/// `dims` may be omitted when `rho` carries a two-mode shape.
pub fn negativity(rho: &DensityMatrix, dims: Option<(usize, usize)>) -> Result<f64> {
    negativity_on(rho, dims, Subsystem::B)
}

/// [`negativity`] with the transpose taken on a chosen side.
pub fn negativity_on(
    rho: &DensityMatrix,
    dims: Option<(usize, usize)>,
    side: Subsystem,
) -> Result<f64> {
    let dims = bipartite_dims(rho, dims)?;
    let pt = partial_transpose(rho, dims, side)?;
    Ok(spectrum(pt.matrix()).iter().filter(|&&l| l < 0.0).map(|l| -l).sum())
}

/// S_A + S_B − S_AB, clamped at zero.
pub fn mutual_information(rho: &DensityMatrix, dims: Option<(usize, usize)>) -> Result<f64> {
    let dims = bipartite_dims(rho, dims)?;
    let sa = von_neumann_entropy(&partial_trace(rho, dims, Subsystem::A)?);
    let sb = von_neumann_entropy(&partial_trace(rho, dims, Subsystem::B)?);
    let sab = von_neumann_entropy(rho);
    Ok((sa + sb - sab).max(0.0))
}

/// One term of the spectral decomposition of ρ.
#[derive(Clone, Debug, Serialize)]
pub struct EigenComponent {
    pub weight: f64,
    #[serde(skip)]
    pub state: StateVector,
}

/// Partition of the basis into groups that ρ never connects.
fn decoupled_blocks(m: &DMatrix<C64>) -> Vec<Vec<usize>> {
    let d = m.nrows();
    let cutoff = 1e-14 * m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for j in 0..d {
        for i in 0..j {
            if m[(i, j)].norm() > cutoff {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; d];
    for i in 0..d {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// The `k` largest eigenpairs of ρ, heaviest first.
///
/// Blocks of the basis that ρ does not couple (parity sectors, for instance)
/// are diagonalized separately, so degenerate weights never mix eigenvectors
/// across them.
pub fn dominant_eigencomponents(rho: &DensityMatrix, k: usize) -> Result<Vec<EigenComponent>> {
    if k == 0 {
        return Err(crate::Error::InvalidParameter("k must be at least 1".into()));
    }
    let m = hermitize(rho.matrix());
    let d = m.nrows();
    let mut pairs: Vec<(f64, DVector<C64>)> = Vec::with_capacity(d);
    for block in decoupled_blocks(&m) {
        let sub = DMatrix::from_fn(block.len(), block.len(), |r, c| m[(block[r], block[c])]);
        let e = eigh(&sub);
        for (c, &w) in e.values.iter().enumerate() {
            let mut v = DVector::zeros(d);
            for (r, &idx) in block.iter().enumerate() {
                v[idx] = e.vectors[(r, c)];
            }
            pairs.push((w, v));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
        .into_iter()
        .take(k.min(d))
        .map(|(w, v)| {
            Ok(EigenComponent {
                weight: w.max(0.0),
                state: StateVector::normalized(fix_phase(v), rho.dims())?,
            })
        })
        .collect()
}

/// Makes the largest-magnitude amplitude real and positive.
fn fix_phase(mut v: DVector<C64>) -> DVector<C64> {
    let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm()));
    if let Some(p) = pivot {
        if p.norm() > 0.0 {
            let phase = p.conj() / p.norm();
            v.iter_mut().for_each(|z| *z *= phase);
        }
    }
    v
}

/// Bundle of per-sample scalars written to time series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub n_a: f64,
    pub parity_a: f64,
    pub entropy: f64,
    pub purity: f64,
    pub n_b: Option<f64>,
    pub negativity: Option<f64>,
    pub mutual_information: Option<f64>,
}

/// Computes [`Summary`] for a one- or two-mode state.
pub fn summarize(rho: &DensityMatrix) -> Result<Summary> {
    let entropy = von_neumann_entropy(rho);
    let purity = purity(rho);
    match rho.dims() {
        Dims::Pair(na, nb) => {
            let ra = partial_trace(rho, (na, nb), Subsystem::A)?;
            let rb = partial_trace(rho, (na, nb), Subsystem::B)?;
            let (n_a, parity_a) = number_and_parity(&ra);
            let (n_b, _) = number_and_parity(&rb);
            let sa = von_neumann_entropy(&ra);
            let sb = von_neumann_entropy(&rb);
            Ok(Summary {
                n_a,
                parity_a,
                entropy,
                purity,
                n_b: Some(n_b),
                negativity: Some(negativity(rho, Some((na, nb)))?),
                mutual_information: Some((sa + sb - entropy).max(0.0)),
            })
        }
        _ => {
            let (n_a, parity_a) = number_and_parity(rho);
            Ok(Summary {
                n_a,
                parity_a,
                entropy,
                purity,
                n_b: None,
                negativity: None,
                mutual_information: None,
            })
        }
    }
}

/// ⟨n⟩ and ⟨(−1)^n⟩ of a single mode from the diagonal.
pub fn number_and_parity(rho: &DensityMatrix) -> (f64, f64) {
    let m = rho.matrix();
    (0..m.nrows()).fold((0.0, 0.0), |(n, p), k| {
        let pop = m[(k, k)].re;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        (n + k as f64 * pop, p + sign * pop)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ladder_operators, FockSpace};
    use crate::models::{cat_state, CatParity};
    use approx::assert_abs_diff_eq;

    fn bell() -> DensityMatrix {
        let mut v = DVector::zeros(4);
        v[0] = C64::new(1.0, 0.0);
        v[3] = C64::new(1.0, 0.0);
        StateVector::normalized(v, Dims::Pair(2, 2)).unwrap().to_density()
    }

    fn cat_mixture(n: usize) -> DensityMatrix {
        let xi = C64::new(2.0, 0.0);
        let e = cat_state(xi, CatParity::Even, n).unwrap().to_density();
        let o = cat_state(xi, CatParity::Odd, n).unwrap().to_density();
        DensityMatrix::mixture(&[(0.5, &e), (0.5, &o)]).unwrap()
    }

    #[test]
    fn expectation_examples() {
        let n = 30;
        let l = ladder_operators(FockSpace::new(n).unwrap());
        let vac = DensityMatrix::fock(Dims::Mode(n), 0).unwrap();
        assert_eq!(expectation(&l.number, &vac).unwrap(), ZERO);
        let alpha = C64::new(1.0, -0.5);
        let coh = StateVector::coherent(alpha, FockSpace::new(n).unwrap()).unwrap().to_density();
        let nbar = expectation(&l.number, &coh).unwrap();
        assert_abs_diff_eq!(nbar.re, alpha.norm_sqr(), epsilon = 1e-10);
        assert!(nbar.im.abs() < 1e-12);
        for (par, want) in [(CatParity::Even, 1.0), (CatParity::Odd, -1.0)] {
            let cat = cat_state(C64::new(2.0, 0.0), par, n).unwrap().to_density();
            assert_abs_diff_eq!(expectation(&l.parity, &cat).unwrap().re, want, epsilon = 1e-12);
        }
        let wrong = DensityMatrix::fock(Dims::Mode(4), 0).unwrap();
        assert!(expectation(&l.number, &wrong).is_err());
    }

    #[test]
    fn entropy_and_purity_examples() {
        let n = 30;
        let pure = DensityMatrix::fock(Dims::Mode(n), 3).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&pure), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(purity(&pure), 1.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(Dims::Mode(7));
        assert_abs_diff_eq!(von_neumann_entropy(&mixed), 7f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(purity(&mixed), 1.0 / 7.0, epsilon = 1e-12);
        let m = cat_mixture(n);
        assert_abs_diff_eq!(von_neumann_entropy(&m), 0.693147, epsilon = 1e-6);
        assert_abs_diff_eq!(purity(&m), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn fidelity_examples() {
        let psi = cat_state(C64::new(1.5, 0.5), CatParity::Even, 25).unwrap();
        assert_abs_diff_eq!(fidelity_pure(&psi, &psi.to_density()).unwrap(), 1.0, epsilon = 1e-12);
        let odd = cat_state(C64::new(1.5, 0.5), CatParity::Odd, 25).unwrap();
        assert_abs_diff_eq!(fidelity_pure(&psi, &odd.to_density()).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bell_state_oracles() {
        let b = bell();
        assert_abs_diff_eq!(negativity(&b, None).unwrap(), 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(negativity_on(&b, None, Subsystem::A).unwrap(), 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(mutual_information(&b, None).unwrap(), 2.0 * 2f64.ln(), epsilon = 1e-10);
    }

    #[test]
    fn bipartite_routines_need_shape() {
        let rho = DensityMatrix::fock(Dims::Mode(4), 0).unwrap();
        assert!(negativity(&rho, None).is_err());
        assert!(negativity(&rho, Some((3, 2))).is_err());
        assert!(negativity(&rho, Some((2, 2))).is_ok());
    }

    #[test]
    fn eigencomponents_of_pure_and_mixed() {
        let n = 30;
        let psi = cat_state(C64::new(0.0, 2.0), CatParity::Odd, n).unwrap();
        let c = dominant_eigencomponents(&psi.to_density(), 1).unwrap();
        assert_eq!(c.len(), 1);
        assert_abs_diff_eq!(c[0].weight, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(psi.inner(&c[0].state).unwrap().norm(), 1.0, epsilon = 1e-12);

        let comps = dominant_eigencomponents(&cat_mixture(n), 2).unwrap();
        for comp in &comps {
            assert_abs_diff_eq!(comp.weight, 0.5, epsilon = 1e-12);
        }
        // Exactly degenerate, yet each component stays inside one parity sector.
        let even = cat_state(C64::new(2.0, 0.0), CatParity::Even, n).unwrap();
        let odd = cat_state(C64::new(2.0, 0.0), CatParity::Odd, n).unwrap();
        let overlaps: Vec<f64> = comps
            .iter()
            .map(|c| even.inner(&c.state).unwrap().norm_sqr() + odd.inner(&c.state).unwrap().norm_sqr())
            .collect();
        for o in overlaps {
            assert_abs_diff_eq!(o, 1.0, epsilon = 1e-10);
        }
        let fe: f64 = comps.iter().map(|c| even.inner(&c.state).unwrap().norm_sqr()).sum();
        assert_abs_diff_eq!(fe, 1.0, epsilon = 1e-10);
        assert!(comps.iter().all(|c| {
            let f = even.inner(&c.state).unwrap().norm_sqr();
            f > 1.0 - 1e-10 || f < 1e-10
        }));
        assert!(dominant_eigencomponents(&cat_mixture(n), 0).is_err());
    }

    #[test]
    fn summary_of_bell_state() {
        let s = summarize(&bell()).unwrap();
        assert_abs_diff_eq!(s.n_a, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.parity_a, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.negativity.unwrap(), 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(s.mutual_information.unwrap(), 2.0 * 2f64.ln(), epsilon = 1e-10);
        let one = summarize(&DensityMatrix::fock(Dims::Mode(5), 3).unwrap()).unwrap();
        assert_eq!((one.n_a, one.parity_a), (3.0, -1.0));
        assert!(one.n_b.is_none());
    }
}
