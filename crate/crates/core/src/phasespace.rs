//! Wigner functions and quadrature distributions.
//!
//! W(α) = (2/π) Tr[ρ D(α) P D†(α)] with P the parity operator and α = x + ip,
//! normalized so that ∫W dx dp = 1 and |W| ≤ 2/π. Since D(α) P D†(α) = D(2α) P, each grid point
//! costs one truncated displacement matrix and an O(N²) contraction.
//!
//! Quadratures use X_φ with ⟨n|X,φ⟩ = ψ_n(X) e^{inφ}, where ψ_n are normalized
//! Hermite functions. A coherent state |ξ⟩ with real ξ peaks at X = √2 ξ for φ = 0.

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{check_dim, fill_displacement, DensityMatrix, C64};
use crate::models::CatParity;

/// Real values sampled on a rectangular grid, indexed (im, re).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    /// Row-major: `values[i][j]` sits at (re_axis[j], im_axis[i]).
    #[serde(with = "rows")]
    pub values: DMatrix<f64>,
}

mod rows {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let nc = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != nc) {
            return Err(serde::de::Error::custom("ragged grid rows"));
        }
        Ok(DMatrix::from_fn(rows.len(), nc, |i, j| rows[i][j]))
    }
}

/// `n` uniformly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn check_axis(axis: &[f64], name: &'static str) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} is empty")));
    }
    if axis.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(name));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("{name} must be strictly ascending")));
    }
    Ok(())
}

fn spacing(axis: &[f64]) -> f64 {
    if axis.len() < 2 {
        0.0
    } else {
        (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64
    }
}

fn single_mode(rho: &DensityMatrix) -> Result<usize> {
    if rho.dims().is_bipartite() {
        return Err(Error::BipartiteInput);
    }
    Ok(rho.dim())
}

impl PhaseSpaceGrid {
    /// Riemann sum of the values times the cell area.
    pub fn integral(&self) -> f64 {
        self.values.sum() * spacing(&self.re_axis) * spacing(&self.im_axis)
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.amax()
    }

    /// Integral over the imaginary axis at each real-axis sample.
    pub fn re_marginal(&self) -> Vec<f64> {
        let dy = spacing(&self.im_axis);
        self.values.column_iter().map(|c| c.sum() * dy).collect()
    }

    /// Long-format CSV: header `re,im,w`, rows ordered im-major.
    pub fn to_csv(&self, value_name: &str) -> String {
        let mut out = format!("re,im,{value_name}\n");
        for (i, y) in self.im_axis.iter().enumerate() {
            for (j, x) in self.re_axis.iter().enumerate() {
                let _ = writeln!(out, "{x},{y},{}", self.values[(i, j)]);
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path, value_name: &str) -> io::Result<()> {
        std::fs::write(path, self.to_csv(value_name))
    }

    pub fn write_json(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)
    }
}

/// Square grid with `points` samples per axis spanning ±`half_width`.
pub fn square_axes(half_width: f64, points: usize) -> (Vec<f64>, Vec<f64>) {
    let a = linspace(-half_width, half_width, points);
    (a.clone(), a)
}

/// Numeric Wigner function of a single-mode state.
pub fn wigner(rho: &DensityMatrix, re_axis: &[f64], im_axis: &[f64]) -> Result<PhaseSpaceGrid> {
    let n = single_mode(rho)?;
    check_axis(re_axis, "re_axis")?;
    check_axis(im_axis, "im_axis")?;
    let m = rho.matrix();
    // ρ_{nm} (−1)^n, so W = (2/π) Σ_{m,n} D_{mn} · r_{nm}.
    let r = DMatrix::from_fn(n, n, |i, j| if i % 2 == 0 { m[(i, j)] } else { -m[(i, j)] });
    let rows: Vec<Vec<f64>> = im_axis
        .par_iter()
        .map_init(
            || (DMatrix::<C64>::zeros(n, n), vec![0.0; n]),
            |(d, f), &y| {
                re_axis
                    .iter()
                    .map(|&x| {
                        fill_displacement(C64::new(2.0 * x, 2.0 * y), n, d, f);
                        let mut acc = 0.0;
                        for col in 0..n {
                            for row in 0..n {
                                // Re(D_{row,col} r_{col,row}); the sum is real.
                                let (a, b) = (d[(row, col)], r[(col, row)]);
                                acc += a.re * b.re - a.im * b.im;
                            }
                        }
                        FRAC_2_PI * acc
                    })
                    .collect()
            },
        )
        .collect();
    let values = DMatrix::from_fn(im_axis.len(), re_axis.len(), |i, j| rows[i][j]);
    Ok(PhaseSpaceGrid {
        re_axis: re_axis.to_vec(),
        im_axis: im_axis.to_vec(),
        values,
    })
}

/// Closed-form Wigner function of the untruncated cat (|ξ⟩ ± |−ξ⟩)/√𝒩,
/// 𝒩 = 2(1 ± e^{−2|ξ|²}).
pub fn wigner_cat_analytic(
    xi: C64,
    parity: CatParity,
    re_axis: &[f64],
    im_axis: &[f64],
) -> Result<PhaseSpaceGrid> {
    check_axis(re_axis, "re_axis")?;
    check_axis(im_axis, "im_axis")?;
    if !xi.re.is_finite() || !xi.im.is_finite() {
        return Err(Error::NonFinite("cat amplitude"));
    }
    let s = match parity {
        CatParity::Even => 1.0,
        CatParity::Odd => -1.0,
    };
    if s < 0.0 && xi.norm() == 0.0 {
        return Err(Error::InvalidParameter("odd cat with zero amplitude".into()));
    }
    let norm = 2.0 * (1.0 + s * (-2.0 * xi.norm_sqr()).exp());
    let values = DMatrix::from_fn(im_axis.len(), re_axis.len(), |i, j| {
        let a = C64::new(re_axis[j], im_axis[i]);
        let g = |z: C64| (-2.0 * z.norm_sqr()).exp();
        let fringe = 2.0 * g(a) * (4.0 * (a.conj() * xi).im).cos();
        FRAC_2_PI / norm * (g(a - xi) + g(a + xi) + s * fringe)
    });
    Ok(PhaseSpaceGrid {
        re_axis: re_axis.to_vec(),
        im_axis: im_axis.to_vec(),
        values,
    })
}

/// Normalized Hermite functions ψ_0..ψ_{n−1} at `x`.
pub fn hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = x * 2f64.sqrt() * out[0];
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = x * (2.0 / (kf + 1.0)).sqrt() * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// Probability density of one quadrature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureDistribution {
    pub phase: f64,
    pub xs: Vec<f64>,
    pub density: Vec<f64>,
}

impl QuadratureDistribution {
    pub fn integral(&self) -> f64 {
        self.density.iter().sum::<f64>() * spacing(&self.xs)
    }

    /// ∫|𝒫(X) − 𝒫(−X)| dX. Needs a grid symmetric about zero.
    pub fn asymmetry(&self) -> Result<f64> {
        let n = self.xs.len();
        let tol = 1e-9 * self.xs.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        if (0..n).any(|i| (self.xs[i] + self.xs[n - 1 - i]).abs() > tol) {
            return Err(Error::InvalidParameter("grid is not symmetric about zero".into()));
        }
        let sum: f64 = (0..n)
            .map(|i| (self.density[i] - self.density[n - 1 - i]).abs())
            .sum();
        Ok(sum * spacing(&self.xs))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,p\n");
        for (x, p) in self.xs.iter().zip(&self.density) {
            let _ = writeln!(out, "{x},{p}");
        }
        out
    }
}

/// 𝒫(X) = Σ_{mn} ρ_{mn} ψ_m(X) ψ_n(X) e^{i(n−m)φ}.
pub fn quadrature_distribution(
    rho: &DensityMatrix,
    phi: f64,
    xs: &[f64],
) -> Result<QuadratureDistribution> {
    let n = single_mode(rho)?;
    check_axis(xs, "xs")?;
    if !phi.is_finite() {
        return Err(Error::NonFinite("phi"));
    }
    let m = rho.matrix();
    let phases: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, k as f64 * phi)).collect();
    let mut psi = vec![0.0; n];
    let density = xs
        .iter()
        .map(|&x| {
            hermite_functions(x, &mut psi);
            // u_n = ψ_n e^{inφ}; 𝒫 = u† ρ u.
            let mut acc = C64::new(0.0, 0.0);
            for col in 0..n {
                let uc = phases[col] * psi[col];
                let mut inner = C64::new(0.0, 0.0);
                for row in 0..n {
                    inner += phases[row].conj() * psi[row] * m[(row, col)];
                }
                acc += inner * uc;
            }
            acc.re
        })
        .collect();
    Ok(QuadratureDistribution {
        phase: phi,
        xs: xs.to_vec(),
        density,
    })
}

/// ⟨X_a, X_b|ρ|X_a, X_b⟩ at φ = 0 for both modes, indexed (a, b).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointQuadrature {
    pub xa: Vec<f64>,
    pub xb: Vec<f64>,
    #[serde(with = "rows")]
    pub density: DMatrix<f64>,
}

impl JointQuadrature {
    pub fn integral(&self) -> f64 {
        self.density.sum() * spacing(&self.xa) * spacing(&self.xb)
    }

    /// Marginal density of X_a.
    pub fn marginal_a(&self) -> Vec<f64> {
        let db = spacing(&self.xb);
        self.density.row_iter().map(|r| r.sum() * db).collect()
    }

    /// Marginal density of X_b.
    pub fn marginal_b(&self) -> Vec<f64> {
        let da = spacing(&self.xa);
        self.density.column_iter().map(|c| c.sum() * da).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("xa,xb,p\n");
        for (j, xb) in self.xb.iter().enumerate() {
            for (i, xa) in self.xa.iter().enumerate() {
                let _ = writeln!(out, "{xa},{xb},{}", self.density[(i, j)]);
            }
        }
        out
    }
}

/// Joint quadrature distribution of a two-mode state.
pub fn joint_quadrature_distribution(
    rho: &DensityMatrix,
    dims: Option<(usize, usize)>,
    xa: &[f64],
    xb: &[f64],
) -> Result<JointQuadrature> {
    let (na, nb) = match dims.or_else(|| rho.dims().pair()) {
        Some(d) => d,
        None => return Err(Error::InvalidParameter("joint distribution needs two modes".into())),
    };
    check_dim(na * nb, rho.dim())?;
    check_axis(xa, "xa")?;
    check_axis(xb, "xb")?;
    let m = rho.matrix();
    let psi_a: Vec<Vec<f64>> = xa
        .iter()
        .map(|&x| {
            let mut v = vec![0.0; na];
            hermite_functions(x, &mut v);
            v
        })
        .collect();
    let cols: Vec<Vec<f64>> = xb
        .par_iter()
        .map(|&x| {
            let mut pb = vec![0.0; nb];
            hermite_functions(x, &mut pb);
            // Contract mode b: M[i, j] = Σ_{k,l} ψ_k ρ_{(i,k),(j,l)} ψ_l.
            let red = DMatrix::from_fn(na, na, |i, j| {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..nb {
                    let mut inner = C64::new(0.0, 0.0);
                    for k in 0..nb {
                        inner += m[(i * nb + k, j * nb + l)] * pb[k];
                    }
                    acc += inner * pb[l];
                }
                acc
            });
            psi_a
                .iter()
                .map(|pa| {
                    let mut acc = 0.0;
                    for j in 0..na {
                        for i in 0..na {
                            acc += pa[i] * red[(i, j)].re * pa[j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(JointQuadrature {
        xa: xa.to_vec(),
        xb: xb.to_vec(),
        density: DMatrix::from_fn(xa.len(), xb.len(), |i, j| cols[j][i]),
    })
}

/// Default grid half-width for a state of mean photon number `nbar`.
pub fn default_half_width(nbar: f64) -> f64 {
    nbar.max(0.0).sqrt() + 3.0
}

/// Axis spanning ±(√(2⟨n⟩) + 5) for quadratures.
pub fn default_quadrature_axis(nbar: f64, points: usize) -> Vec<f64> {
    let h = (2.0 * nbar.max(0.0)).sqrt() + 5.0;
    linspace(-h, h, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{Dims, FockSpace, StateVector};
    use crate::models::cat_state;
    use approx::assert_abs_diff_eq;

    fn coherent(alpha: C64, n: usize) -> DensityMatrix {
        StateVector::coherent(alpha, FockSpace::new(n).unwrap()).unwrap().to_density()
    }

    #[test]
    fn vacuum_peak() {
        let vac = DensityMatrix::fock(Dims::Mode(10), 0).unwrap();
        let w = wigner(&vac, &[0.0], &[0.0]).unwrap();
        assert_abs_diff_eq!(w.values[(0, 0)], FRAC_2_PI, epsilon = 1e-14);
    }

    #[test]
    fn coherent_state_gaussian() {
        let xi = C64::new(1.0, 0.0);
        let rho = coherent(xi, 30);
        let axis = linspace(-2.0, 3.0, 21);
        let w = wigner(&rho, &axis, &axis).unwrap();
        for (i, &y) in axis.iter().enumerate() {
            for (j, &x) in axis.iter().enumerate() {
                let want = FRAC_2_PI * (-2.0 * (C64::new(x, y) - xi).norm_sqr()).exp();
                assert_abs_diff_eq!(w.values[(i, j)], want, epsilon = 1e-10);
            }
        }
        assert!(w.min() > -1e-8);
    }

    #[test]
    fn even_cat_matches_closed_form() {
        let xi = C64::new(2.0, 0.0);
        let rho = cat_state(xi, CatParity::Even, 40).unwrap().to_density();
        let axis = linspace(-4.0, 4.0, 41);
        let num = wigner(&rho, &axis, &axis).unwrap();
        let ana = wigner_cat_analytic(xi, CatParity::Even, &axis, &axis).unwrap();
        let err = (&num.values - &ana.values).amax();
        assert!(err < 1e-8, "{err}");
        assert!(num.min() < -0.1);
    }

    #[test]
    fn analytic_origin_values() {
        let xi = C64::new(3.0, 0.0);
        let e = wigner_cat_analytic(xi, CatParity::Even, &[0.0], &[0.0]).unwrap();
        let o = wigner_cat_analytic(xi, CatParity::Odd, &[0.0], &[0.0]).unwrap();
        assert_abs_diff_eq!(e.values[(0, 0)], 0.636620, epsilon = 1e-6);
        assert_abs_diff_eq!(o.values[(0, 0)], -0.636620, epsilon = 1e-6);
        assert!(wigner_cat_analytic(C64::new(0.0, 0.0), CatParity::Odd, &[0.0], &[0.0]).is_err());
        let axis = linspace(-6.0, 6.0, 241);
        let g = wigner_cat_analytic(C64::new(1.0, 1.5), CatParity::Odd, &axis, &axis).unwrap();
        assert_abs_diff_eq!(g.integral(), 1.0, epsilon = 1e-3);
    }

    #[test]
    fn wigner_rejects_bad_input() {
        let two = DensityMatrix::fock(Dims::Pair(2, 2), 0).unwrap();
        assert!(matches!(wigner(&two, &[0.0], &[0.0]), Err(Error::BipartiteInput)));
        let vac = DensityMatrix::fock(Dims::Mode(4), 0).unwrap();
        assert!(wigner(&vac, &[1.0, 0.0], &[0.0]).is_err());
        assert!(wigner(&vac, &[f64::NAN], &[0.0]).is_err());
    }

    #[test]
    fn vacuum_quadrature() {
        let vac = DensityMatrix::fock(Dims::Mode(8), 0).unwrap();
        let q = quadrature_distribution(&vac, 0.0, &[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(q.density[0], 0.564190, epsilon = 1e-6);
        assert_abs_diff_eq!(q.density[1], (-1.0f64).exp() / PI.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn odd_cat_node_and_normalization() {
        let rho = cat_state(C64::new(2.0, 0.0), CatParity::Odd, 40).unwrap().to_density();
        let xs = default_quadrature_axis(4.0, 401);
        let q = quadrature_distribution(&rho, 0.0, &xs).unwrap();
        assert_abs_diff_eq!(q.integral(), 1.0, epsilon = 1e-4);
        assert!(q.density[200].abs() < 1e-10);
        assert!(q.asymmetry().unwrap() < 1e-10);
    }

    #[test]
    fn coherent_peak_location_and_phase() {
        let xi = C64::new(1.5, 0.0);
        let rho = coherent(xi, 30);
        let xs = linspace(-6.0, 6.0, 1201);
        let peak = |q: &QuadratureDistribution| {
            let i = (0..q.xs.len()).max_by(|&a, &b| q.density[a].total_cmp(&q.density[b])).unwrap();
            q.xs[i]
        };
        let q0 = quadrature_distribution(&rho, 0.0, &xs).unwrap();
        assert_abs_diff_eq!(peak(&q0), 2f64.sqrt() * 1.5, epsilon = 0.01);
        // Rotating the state by e^{iθ} is undone by φ = θ.
        let theta = 0.7;
        let rot = coherent(C64::from_polar(1.5, theta), 30);
        let qr = quadrature_distribution(&rot, theta, &xs).unwrap();
        for (a, b) in q0.density.iter().zip(&qr.density) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn wigner_marginal_is_quadrature() {
        let rho = cat_state(C64::new(1.2, 0.4), CatParity::Even, 30).unwrap().to_density();
        let axis = linspace(-5.0, 5.0, 201);
        let w = wigner(&rho, &axis, &axis).unwrap();
        let marg = w.re_marginal();
        let xs: Vec<f64> = axis.iter().map(|a| a * 2f64.sqrt()).collect();
        let q = quadrature_distribution(&rho, 0.0, &xs).unwrap();
        for (m, p) in marg.iter().zip(&q.density) {
            // X = √2 Re α.
            assert_abs_diff_eq!(*m, p * 2f64.sqrt(), epsilon = 1e-3);
        }
    }

    #[test]
    fn joint_quadrature_of_product() {
        let na = 6;
        let nb = 5;
        let vac = DensityMatrix::fock(Dims::Mode(na), 0)
            .unwrap()
            .tensor(&DensityMatrix::fock(Dims::Mode(nb), 0).unwrap());
        let j = joint_quadrature_distribution(&vac, None, &[0.0], &[0.0]).unwrap();
        assert_abs_diff_eq!(j.density[(0, 0)], 0.318310, epsilon = 1e-6);

        let ra = cat_state(C64::new(1.0, 0.3), CatParity::Odd, na).unwrap().to_density();
        let rb = coherent(C64::new(-0.4, 0.2), nb);
        let prod = ra.tensor(&rb);
        let xs = linspace(-3.0, 3.0, 13);
        let j = joint_quadrature_distribution(&prod, None, &xs, &xs).unwrap();
        let qa = quadrature_distribution(&ra, 0.0, &xs).unwrap();
        let qb = quadrature_distribution(&rb, 0.0, &xs).unwrap();
        for i in 0..xs.len() {
            for k in 0..xs.len() {
                assert_abs_diff_eq!(j.density[(i, k)], qa.density[i] * qb.density[k], epsilon = 1e-10);
            }
        }
        let single = DensityMatrix::fock(Dims::Mode(4), 0).unwrap();
        assert!(joint_quadrature_distribution(&single, None, &xs, &xs).is_err());
    }

    #[test]
    fn grid_serialization() {
        let g = PhaseSpaceGrid {
            re_axis: vec![0.0, 1.0],
            im_axis: vec![-1.0],
            values: DMatrix::from_row_slice(1, 2, &[0.5, 0.25]),
        };
        assert_eq!(g.to_csv("w"), "re,im,w\n0,-1,0.5\n1,-1,0.25\n");
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"re_axis":[0.0,1.0],"im_axis":[-1.0],"values":[[0.5,0.25]]}"#);
        let back: PhaseSpaceGrid = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }
}
