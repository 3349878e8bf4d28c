//! Matrix-free Lindblad right-hand side.
//!
//! The generator terms are ladder-operator polynomials with a handful of
//! nonzeros per row, so they are held as compressed rows/columns and applied
//! to the dense ρ directly. Cost per evaluation is O(nnz · d) instead of the
//! O(d³) of dense products.

use nalgebra::DMatrix;

use crate::fock::{C64, IM, ZERO};
use crate::models::SystemModel;

#[derive(Clone, Debug)]
struct Sparse {
    /// cols[k] = [(i, M[i,k])].
    cols: Vec<Vec<(usize, C64)>>,
    /// rows[i] = [(k, M[i,k])].
    rows: Vec<Vec<(usize, C64)>>,
}

impl Sparse {
    fn from_dense(m: &DMatrix<C64>) -> Self {
        let d = m.nrows();
        let mut cols = vec![Vec::new(); d];
        let mut rows = vec![Vec::new(); d];
        for k in 0..d {
            for i in 0..d {
                let v = m[(i, k)];
                if v != ZERO {
                    cols[k].push((i, v));
                    rows[i].push((k, v));
                }
            }
        }
        Self { cols, rows }
    }

    /// out = M · x, both column-major d×d.
    fn left_mul(&self, x: &[C64], out: &mut [C64], d: usize) {
        out.fill(ZERO);
        for j in 0..d {
            let xc = &x[j * d..(j + 1) * d];
            let oc = &mut out[j * d..(j + 1) * d];
            for (k, &r) in xc.iter().enumerate() {
                if r == ZERO {
                    continue;
                }
                for &(i, m) in &self.cols[k] {
                    oc[i] += m * r;
                }
            }
        }
    }
}

/// Precomputed generator of `model`, acting on Hermitian ρ stored column-major.
#[derive(Clone, Debug)]
pub struct Generator {
    dim: usize,
    /// −2i H_eff = −2i H − Σ L†L.
    drift: Sparse,
    jumps: Vec<Sparse>,
}

impl Generator {
    pub fn new(model: &SystemModel) -> Self {
        let d = model.dim();
        let mut drift = model.hamiltonian().matrix() * (IM * -2.0);
        for l in model.jumps() {
            drift -= l.matrix().adjoint() * l.matrix();
        }
        Self {
            dim: d,
            drift: Sparse::from_dense(&drift),
            jumps: model.jumps().iter().map(|l| Sparse::from_dense(l.matrix())).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper bound on the generator's ∞-norm, i.e. on its fastest rate.
    pub fn rate_bound(&self) -> f64 {
        let row_sum = |m: &Sparse| {
            m.rows
                .iter()
                .map(|r| r.iter().map(|(_, v)| v.norm()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        let col_sum = |m: &Sparse| {
            m.cols
                .iter()
                .map(|c| c.iter().map(|(_, v)| v.norm()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        // Rough bound for scaling tolerances: ‖H_eff‖ + Σ ‖L‖_∞ ‖L‖_1.
        row_sum(&self.drift) + self.jumps.iter().map(|l| row_sum(l) * col_sum(l)).sum::<f64>()
    }

    /// Writes −i[H,ρ] + Σ(LρL† − ½{L†L,ρ}) into `out`.
    ///
    /// With X = −2i H_eff ρ + Σ LρL†, the result is (X + X†)/2 for Hermitian
    /// ρ; forming it that way keeps the output exactly Hermitian.
    pub fn apply(&self, rho: &[C64], out: &mut [C64], scratch: &mut Vec<C64>) {
        let d = self.dim;
        debug_assert_eq!(rho.len(), d * d);
        scratch.resize(d * d, ZERO);
        self.drift.left_mul(rho, out, d);
        for l in &self.jumps {
            l.left_mul(rho, scratch, d);
            // out[:, j] += Σ_k conj(L[j,k]) · (Lρ)[:, k]
            for j in 0..d {
                for &(k, v) in &l.rows[j] {
                    let c = v.conj();
                    let src = &scratch[k * d..(k + 1) * d];
                    let dst = &mut out[j * d..(j + 1) * d];
                    for (o, s) in dst.iter_mut().zip(src) {
                        *o += c * s;
                    }
                }
            }
        }
        for j in 0..d {
            for i in 0..j {
                let a = out[j * d + i];
                let b = out[i * d + j];
                let h = (a + b.conj()) * 0.5;
                out[j * d + i] = h;
                out[i * d + j] = h.conj();
            }
            let diag = &mut out[j * d + j];
            *diag = C64::new(diag.re, 0.0);
        }
    }
}
