//! The connecting operator C^T = (W^T)*W^T: Gram matrix of the S-basis,
//! spectral and dynamic kernel representations, and their application to
//! controls.
//!
//! On the S-basis the operator is exact N-dimensional algebra: a control
//! with coefficients c maps to the control with k-th coefficient (Gc)_k/ρ_k.
//! The grid path applies the dynamic kernel — built from the response
//! function alone — by quadrature, which is the data-driven route.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::dd;
use crate::grid::{self, TimeGrid};
use crate::jacobi::SpectralData;
use crate::kernel::{gram_entry, wave_kernel, wave_kernel_integral};
use crate::par;
use crate::wave::Control;

/// Gram matrix G_{jk} = ∫₀ᵀ S_j(T−s)S_k(T−s) ds of the S-basis on (0,T).
///
/// Symmetric positive definite whenever the spectral data is consistent;
/// that is the quantitative form of the boundary controllability of the
/// system.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    matrix: DMatrix<f64>,
    /// Rows as plain slices (the matrix is symmetric) for compensated dots.
    rows: Vec<Vec<f64>>,
    t_final: f64,
    chol: Cholesky<f64, Dyn>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn entry(&self, j: usize, k: usize) -> f64 {
        self.matrix[(j, k)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Real right-hand sides; the Krein recursion stays real end to end.
    ///
    /// Cholesky solve followed by two steps of iterative refinement with
    /// compensated residuals — the Gram can reach κ ~ 1e13 at N = 5 and the
    /// refinement restores near-ε forward accuracy of what G·x reproduces.
    pub fn solve_real(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.size(), "right-hand side size mismatch");
        let mut x: Vec<f64> = {
            let v = DVector::from_column_slice(rhs);
            self.chol.solve(&v).iter().copied().collect()
        };
        for _ in 0..2 {
            let r: Vec<f64> = (0..self.size())
                .map(|j| dd::residual(rhs[j], &self.rows[j], &x))
                .collect();
            let dx = self.chol.solve(&DVector::from_column_slice(&r));
            for (xi, di) in x.iter_mut().zip(dx.iter()) {
                *xi += di;
            }
        }
        x
    }

    /// Solves G x = rhs componentwise (real and imaginary parts share the
    /// Cholesky factor).
    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(rhs.len(), self.size(), "right-hand side size mismatch");
        let re: Vec<f64> = rhs.iter().map(|c| c.re).collect();
        let im: Vec<f64> = rhs.iter().map(|c| c.im).collect();
        let xr = self.solve_real(&re);
        let xi = self.solve_real(&im);
        xr.iter().zip(&xi).map(|(&r, &i)| Complex64::new(r, i)).collect()
    }

    /// G c for a real coefficient vector, compensated.
    pub fn apply_real(&self, c: &[f64]) -> Vec<f64> {
        assert_eq!(c.len(), self.size(), "coefficient size mismatch");
        self.rows.iter().map(|row| dd::dot(row, c)).collect()
    }

    /// xᵀ G y for real vectors — the L²(0,T) pairing of S-basis functions.
    pub fn bilinear_real(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.size());
        let gy = self.apply_real(y);
        dd::dot(x, &gy)
    }

    /// G c for a complex coefficient vector, compensated per component.
    pub fn apply(&self, c: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(c.len(), self.size(), "coefficient size mismatch");
        let re: Vec<f64> = c.iter().map(|z| z.re).collect();
        let im: Vec<f64> = c.iter().map(|z| z.im).collect();
        self.rows
            .iter()
            .map(|row| Complex64::new(dd::dot(row, &re), dd::dot(row, &im)))
            .collect()
    }

    /// L²(0,T) inner product of two S-basis controls:
    /// (f, g) = Σ_{jk} c_j conj(c'_k) G_{jk}.
    pub fn control_inner(&self, c: &[Complex64], d: &[Complex64]) -> Complex64 {
        let n = self.size();
        assert_eq!(c.len(), n);
        assert_eq!(d.len(), n);
        let gd = self.apply(&d.iter().map(|z| z.conj()).collect::<Vec<_>>());
        let cr: Vec<f64> = c.iter().map(|z| z.re).collect();
        let ci: Vec<f64> = c.iter().map(|z| z.im).collect();
        let gr: Vec<f64> = gd.iter().map(|z| z.re).collect();
        let gi: Vec<f64> = gd.iter().map(|z| z.im).collect();
        Complex64::new(
            dd::dot(&cr, &gr) - dd::dot(&ci, &gi),
            dd::dot(&cr, &gi) + dd::dot(&ci, &gr),
        )
    }

    /// Smallest eigenvalue and condition number, for diagnostics.
    pub fn conditioning(&self) -> (f64, f64) {
        let eig = self.matrix.clone().symmetric_eigen();
        let mut evs: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        evs.sort_by(f64::total_cmp);
        let min = evs[0];
        let max = evs[evs.len() - 1];
        (min, if min > 0.0 { max / min } else { f64::INFINITY })
    }
}

/// Assembles the Gram matrix from the closed-form entries.
pub fn gram_matrix(sd: &SpectralData, t_final: f64) -> Result<GramMatrix> {
    assert!(t_final > 0.0, "final time must be positive");
    let n = sd.size();
    let rows = par::map_collect(n, |j| {
        (0..n)
            .map(|k| gram_entry(t_final, sd.lambdas()[j], sd.lambdas()[k]))
            .collect::<Vec<f64>>()
    });
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (j, row) in rows.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            // Symmetrize: the closed forms agree to rounding either way.
            m[(j, k)] = if j <= k { v } else { rows[k][j] };
        }
    }
    let chol = Cholesky::new(m.clone()).ok_or(Error::SingularGram)?;
    let rows_plain = (0..n)
        .map(|j| (0..n).map(|k| m[(j, k)]).collect::<Vec<f64>>())
        .collect();
    Ok(GramMatrix {
        matrix: m,
        rows: rows_plain,
        t_final,
        chol,
    })
}

/// Spectral kernel of C^T: Σ_k S_k(T−t)S_k(T−s)/ρ_k.
pub fn ct_kernel_spectral(sd: &SpectralData, t_final: f64, t: f64, s: f64) -> f64 {
    sd.lambdas()
        .iter()
        .zip(sd.rhos())
        .map(|(&lk, &rk)| wave_kernel(t_final - t, lk) * wave_kernel(t_final - s, lk) / rk)
        .sum()
}

/// Dynamic kernel of C^T: (1/2)∫_{|t−s|}^{2T−s−t} r(τ) dτ, evaluated in
/// closed form by integrating the response function termwise.
pub fn ct_kernel_dynamic(sd: &SpectralData, t_final: f64, t: f64, s: f64) -> f64 {
    let upper = 2.0 * t_final - s - t;
    let lower = (t - s).abs();
    0.5 * sd
        .lambdas()
        .iter()
        .zip(sd.rhos())
        .map(|(&lk, &rk)| {
            (wave_kernel_integral(upper, lk) - wave_kernel_integral(lower, lk)) / rk
        })
        .sum::<f64>()
}

/// C^T on the S-basis: coefficients c ↦ (Gc)_k/ρ_k.
pub fn apply_ct(sd: &SpectralData, gram: &GramMatrix, control: &Control) -> Control {
    let Control::SBasis { coeffs } = control else {
        panic!("apply_ct expects an S-basis control; sample-based controls go through apply_ct_grid");
    };
    assert_eq!(coeffs.len(), sd.size(), "control size mismatch");
    let gc = gram.apply(coeffs);
    Control::SBasis {
        coeffs: gc.iter().zip(sd.rhos()).map(|(x, &r)| x / r).collect(),
    }
}

/// C^T on grid samples via the dynamic kernel and Simpson quadrature.
pub fn apply_ct_grid(
    sd: &SpectralData,
    grid: TimeGrid,
    values: &[Complex64],
) -> Result<Vec<Complex64>> {
    if grid.len() < 3 {
        return Err(Error::GridTooCoarse { m: grid.len() });
    }
    assert_eq!(values.len(), grid.len());
    let t_final = grid.t_final();
    let pts = grid.points();
    let w = grid::simpson_weights(grid.len(), grid.spacing());
    Ok(par::map_collect(grid.len(), |i| {
        let mut acc = Complex64::ZERO;
        for j in 0..grid.len() {
            acc += values[j] * (w[j] * ct_kernel_dynamic(sd, t_final, pts[i], pts[j]));
        }
        acc
    }))
}

/// Least-squares projection of grid samples onto the S-basis:
/// solves G c = β with β_k = (f, S_k(T−·)) by Simpson quadrature.
pub fn project_to_sbasis(
    sd: &SpectralData,
    gram: &GramMatrix,
    grid: TimeGrid,
    values: &[Complex64],
) -> Vec<Complex64> {
    assert_eq!(values.len(), grid.len());
    let t_final = grid.t_final();
    let h = grid.spacing();
    let pts = grid.points();
    let beta: Vec<Complex64> = (0..sd.size())
        .map(|k| {
            let lk = sd.lambdas()[k];
            let basis: Vec<Complex64> = pts
                .iter()
                .map(|&t| Complex64::new(wave_kernel(t_final - t, lk), 0.0))
                .collect();
            grid::grid_inner(values, &basis, h)
        })
        .collect();
    gram.solve(&beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::JacobiMatrix;
    use crate::wave::control_operator;
    use approx::assert_abs_diff_eq;

    fn fixture_n1() -> SpectralData {
        JacobiMatrix::new(vec![], vec![0.0]).unwrap().spectral_decomposition().unwrap()
    }

    fn fixture_n2() -> SpectralData {
        JacobiMatrix::new(vec![1.0], vec![0.0, 0.0]).unwrap().spectral_decomposition().unwrap()
    }

    #[test]
    fn gram_hand_values() {
        let g = gram_matrix(&fixture_n1(), 1.0).unwrap();
        assert_abs_diff_eq!(g.entry(0, 0), 1.0 / 3.0, epsilon = 1e-14);

        // N = 2 symmetric, T = 1: G_11 = ∫₀¹ sinh²u du = sinh(2)/4 − 1/2.
        let g = gram_matrix(&fixture_n2(), 1.0).unwrap();
        let exact = 2.0f64.sinh() / 4.0 - 0.5;
        assert_abs_diff_eq!(g.entry(0, 0), exact, epsilon = 1e-13);
    }

    #[test]
    fn gram_matches_quadrature_oracle() {
        let j = JacobiMatrix::random(5, 17, (-4.0, 4.0), (0.3, 4.0));
        let sd = j.spectral_decomposition().unwrap();
        let t_final = 1.0;
        let g = gram_matrix(&sd, t_final).unwrap();
        let m = 4001;
        let h = t_final / (m - 1) as f64;
        for jdx in 0..5 {
            for k in 0..5 {
                let (lj, lk) = (sd.lambdas()[jdx], sd.lambdas()[k]);
                let vals: Vec<f64> = (0..m)
                    .map(|i| {
                        let u = i as f64 * h;
                        wave_kernel(u, lj) * wave_kernel(u, lk)
                    })
                    .collect();
                let oracle = grid::grid_inner_real(&vals, &vec![1.0; m], h);
                assert_abs_diff_eq!(g.entry(jdx, k), oracle, epsilon = 1e-9 * oracle.abs().max(1.0));
            }
        }
    }

    #[test]
    fn kernels_match_hand_case() {
        let sd = fixture_n1();
        for &(t, s) in &[(0.2, 0.9), (0.5, 0.5), (0.0, 1.0)] {
            assert_abs_diff_eq!(
                ct_kernel_spectral(&sd, 1.0, t, s),
                (1.0 - t) * (1.0 - s),
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(
                ct_kernel_dynamic(&sd, 1.0, t, s),
                (1.0 - t) * (1.0 - s),
                epsilon = 1e-13
            );
        }
        // Kernel vanishes when either argument hits T.
        assert_abs_diff_eq!(ct_kernel_spectral(&sd, 1.0, 1.0, 0.3), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dynamic_equals_spectral_kernel() {
        for seed in [3u64, 8, 15] {
            let j = JacobiMatrix::random(4, seed, (-5.0, 5.0), (0.3, 5.0));
            let sd = j.spectral_decomposition().unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..50 {
                for k in 0..50 {
                    let t = i as f64 / 49.0;
                    let s = k as f64 / 49.0;
                    let d = ct_kernel_dynamic(&sd, 1.0, t, s);
                    let sp = ct_kernel_spectral(&sd, 1.0, t, s);
                    worst = worst.max((d - sp).abs());
                }
            }
            assert!(worst < 1e-10, "sup |dynamic − spectral| = {worst:e}");
        }
    }

    #[test]
    fn kernel_symmetric_in_t_s() {
        let j = JacobiMatrix::random(3, 4, (-2.0, 2.0), (0.5, 2.0));
        let sd = j.spectral_decomposition().unwrap();
        for &(t, s) in &[(0.1, 0.8), (0.33, 0.52)] {
            assert_eq!(
                ct_kernel_spectral(&sd, 1.0, t, s),
                ct_kernel_spectral(&sd, 1.0, s, t)
            );
        }
    }

    #[test]
    fn apply_ct_hand_value() {
        let sd = fixture_n1();
        let g = gram_matrix(&sd, 1.0).unwrap();
        let out = apply_ct(&sd, &g, &Control::SBasis { coeffs: vec![Complex64::new(1.0, 0.0)] });
        let Control::SBasis { coeffs } = out else { unreachable!() };
        assert_abs_diff_eq!(coeffs[0].re, 1.0 / 3.0, epsilon = 1e-14);

        let out = apply_ct(&sd, &g, &Control::zero_sbasis(1));
        let Control::SBasis { coeffs } = out else { unreachable!() };
        assert_eq!(coeffs[0], Complex64::ZERO);
    }

    #[test]
    fn ct_defining_identity_and_self_adjointness() {
        // (C^Tf, g) = (W^Tf, W^Tg) and (C^Tf, g) = conj((C^Tg, f)).
        let j = JacobiMatrix::random(4, 31, (-3.0, 3.0), (0.4, 3.0));
        let sd = j.spectral_decomposition().unwrap();
        let g = gram_matrix(&sd, 1.0).unwrap();
        let cf = vec![
            Complex64::new(0.3, -0.7),
            Complex64::new(1.2, 0.1),
            Complex64::new(-0.5, 0.6),
            Complex64::new(0.0, -0.2),
        ];
        let cg = vec![
            Complex64::new(-0.8, 0.2),
            Complex64::new(0.4, 0.4),
            Complex64::new(0.9, -0.1),
            Complex64::new(-0.3, 0.0),
        ];
        let ctf = apply_ct(&sd, &g, &Control::SBasis { coeffs: cf.clone() });
        let Control::SBasis { coeffs: ctf } = ctf else { unreachable!() };
        let lhs = g.control_inner(&ctf, &cg);

        let wf = control_operator(&sd, &Control::SBasis { coeffs: cf.clone() }, 1.0).unwrap();
        let wg = control_operator(&sd, &Control::SBasis { coeffs: cg.clone() }, 1.0).unwrap();
        let rhs: Complex64 = wf.iter().zip(&wg).map(|(a, b)| a * b.conj()).sum();
        assert_abs_diff_eq!(lhs.re, rhs.re, epsilon = 1e-10 * rhs.norm().max(1.0));
        assert_abs_diff_eq!(lhs.im, rhs.im, epsilon = 1e-10 * rhs.norm().max(1.0));

        let ctg = apply_ct(&sd, &g, &Control::SBasis { coeffs: cg.clone() });
        let Control::SBasis { coeffs: ctg } = ctg else { unreachable!() };
        let sym = g.control_inner(&ctg, &cf);
        assert_abs_diff_eq!(lhs.re, sym.re, epsilon = 1e-12 * lhs.norm().max(1.0));
        assert_abs_diff_eq!(lhs.im, -sym.im, epsilon = 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn grid_path_constant_control() {
        // N = 1, b = 0, f ≡ 1, T = 1: (C^Tf)(t) = (1 − t)/2.
        let sd = fixture_n1();
        let grid = TimeGrid::new(1.0, 801).unwrap();
        let out = apply_ct_grid(&sd, grid, &vec![Complex64::new(1.0, 0.0); 801]).unwrap();
        for (i, &t) in grid.points().iter().enumerate() {
            assert_abs_diff_eq!(out[i].re, (1.0 - t) / 2.0, epsilon = 1e-9);
        }
        let zero = apply_ct_grid(&sd, grid, &vec![Complex64::ZERO; 801]).unwrap();
        assert!(zero.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn grid_path_matches_sbasis_path() {
        let j = JacobiMatrix::random(3, 12, (-3.0, 3.0), (0.5, 3.0));
        let sd = j.spectral_decomposition().unwrap();
        let g = gram_matrix(&sd, 1.0).unwrap();
        let coeffs = vec![
            Complex64::new(0.9, 0.0),
            Complex64::new(-0.4, 0.0),
            Complex64::new(0.2, 0.0),
        ];
        let f = Control::SBasis { coeffs: coeffs.clone() };
        let grid = TimeGrid::new(1.0, 2001).unwrap();
        let sampled = f.sample(&sd, grid).unwrap();
        let grid_out = apply_ct_grid(&sd, grid, &sampled).unwrap();
        let exact = apply_ct(&sd, &g, &f);
        let exact_vals = exact.sample(&sd, grid).unwrap();
        let mut sup: f64 = 0.0;
        for (a, b) in grid_out.iter().zip(&exact_vals) {
            sup = sup.max((a - b).norm());
        }
        assert!(sup < 1e-6, "sup |grid − exact| = {sup:e}");
    }

    #[test]
    fn projection_recovers_sbasis_coefficients() {
        // Coefficient recovery is limited by cond(G)·ε, so the fixture stays
        // at N = 3 where the Gram is still well conditioned.
        let j = JacobiMatrix::random(3, 44, (-3.0, 3.0), (0.4, 3.0));
        let sd = j.spectral_decomposition().unwrap();
        let g = gram_matrix(&sd, 1.0).unwrap();
        let coeffs = vec![
            Complex64::new(1.0, 0.3),
            Complex64::new(-0.6, 0.0),
            Complex64::new(0.1, -0.8),
        ];
        let f = Control::SBasis { coeffs: coeffs.clone() };
        let grid = TimeGrid::new(1.0, 2001).unwrap();
        let sampled = f.sample(&sd, grid).unwrap();
        let back = project_to_sbasis(&sd, &g, grid, &sampled);
        for (c, b) in coeffs.iter().zip(&back) {
            assert_abs_diff_eq!(c.re, b.re, epsilon = 1e-7);
            assert_abs_diff_eq!(c.im, b.im, epsilon = 1e-7);
        }
    }

    #[test]
    fn gram_is_positive_definite() {
        let j = JacobiMatrix::random(5, 7, (-5.0, 5.0), (0.2, 5.0));
        let sd = j.spectral_decomposition().unwrap();
        let g = gram_matrix(&sd, 1.0).unwrap();
        let (min, cond) = g.conditioning();
        assert!(min > 0.0);
        assert!(cond.is_finite());
    }
}
