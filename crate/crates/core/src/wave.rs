//! Forward problem for the boundary-controlled system: spectral
//! representation of the solution, response function/operator and the
//! control operator.
//!
//! The solution reached by a control f is u^f(t) = Σ_k h_k(t) φ(λ_k) with
//! h_k(t) = (1/ρ_k) ∫₀ᵗ f(τ) S_k(t−τ) dτ. Controls either live in the
//! S-basis {S_k(T−t)} (the N-dimensional subspace reachable controls span)
//! or as samples on a uniform grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, TimeGrid};
use crate::jacobi::SpectralData;
use crate::kernel::{cross_integral, wave_kernel};
use crate::par;

/// A boundary control on (0, T).
#[derive(Debug, Clone)]
pub enum Control {
    /// f(t) = Σ_k c_k S_k(T−t); needs the spectral data of matching size.
    SBasis { coeffs: Vec<Complex64> },
    /// Samples on a uniform grid.
    Sampled { grid: TimeGrid, values: Vec<Complex64> },
}

impl Control {
    pub fn constant_one(grid: TimeGrid) -> Self {
        Control::Sampled {
            values: vec![Complex64::new(1.0, 0.0); grid.len()],
            grid,
        }
    }

    pub fn zero_sbasis(n: usize) -> Self {
        Control::SBasis {
            coeffs: vec![Complex64::ZERO; n],
        }
    }

    /// Pointwise evaluation; S-basis controls need (sd, T) for the kernels.
    pub fn eval(&self, sd: &SpectralData, t_final: f64, t: f64) -> Result<Complex64> {
        match self {
            Control::SBasis { coeffs } => {
                assert_eq!(coeffs.len(), sd.size(), "control size mismatch");
                Ok(sd
                    .lambdas()
                    .iter()
                    .zip(coeffs)
                    .map(|(&lk, c)| c * wave_kernel(t_final - t, lk))
                    .sum())
            }
            Control::Sampled { grid, values } => {
                let i = grid.index_of(t)?;
                Ok(values[i])
            }
        }
    }

    /// Samples the control on `grid` (identity for matching sampled controls).
    pub fn sample(&self, sd: &SpectralData, grid: TimeGrid) -> Result<Vec<Complex64>> {
        match self {
            Control::SBasis { coeffs } => {
                assert_eq!(coeffs.len(), sd.size(), "control size mismatch");
                let t_final = grid.t_final();
                Ok(grid
                    .points()
                    .iter()
                    .map(|&t| {
                        sd.lambdas()
                            .iter()
                            .zip(coeffs)
                            .map(|(&lk, c)| c * wave_kernel(t_final - t, lk))
                            .sum()
                    })
                    .collect())
            }
            Control::Sampled { grid: g, values } => {
                if g != &grid {
                    return Err(Error::OffGridTime { t: grid.t_final() });
                }
                Ok(values.clone())
            }
        }
    }
}

/// Response function r(t) = Σ_k S_k(t)/ρ_k — the convolution kernel of the
/// response operator, and the dynamic inverse data of the system.
pub fn response_function(sd: &SpectralData, t: f64) -> f64 {
    sd.lambdas()
        .iter()
        .zip(sd.rhos())
        .map(|(&lk, &rk)| wave_kernel(t, lk) / rk)
        .sum()
}

/// h_k(t) for an S-basis control, in closed form through the cross integrals.
fn sbasis_h_at(
    sd: &SpectralData,
    t_final: f64,
    coeffs: &[Complex64],
    t: f64,
) -> Vec<Complex64> {
    let n = sd.size();
    (0..n)
        .map(|j| {
            let lj = sd.lambdas()[j];
            let s: Complex64 = sd
                .lambdas()
                .iter()
                .zip(coeffs)
                .map(|(&lk, c)| c * cross_integral(t_final, t, lk, lj))
                .sum();
            s / sd.rhos()[j]
        })
        .collect()
}

/// h_k(t) for a sampled control by prefix quadrature of the convolution.
fn sampled_h_at(
    sd: &SpectralData,
    grid: &TimeGrid,
    values: &[Complex64],
    i: usize,
) -> Vec<Complex64> {
    let h = grid.spacing();
    let t = grid.point(i);
    sd.lambdas()
        .iter()
        .zip(sd.rhos())
        .map(|(&lk, &rk)| {
            let re: Vec<f64> = (0..=i)
                .map(|j| values[j].re * wave_kernel(t - grid.point(j), lk))
                .collect();
            let im: Vec<f64> = (0..=i)
                .map(|j| values[j].im * wave_kernel(t - grid.point(j), lk))
                .collect();
            Complex64::new(
                grid::prefix_integral(&re, h, i),
                grid::prefix_integral(&im, h, i),
            ) / rk
        })
        .collect()
}

/// Solution u^f(t) of the forward problem, 0 ≤ t ≤ T.
///
/// S-basis controls evaluate the convolution in closed form; sampled
/// controls use composite quadrature on the grid (t must be a grid point).
pub fn solve_forward(
    sd: &SpectralData,
    control: &Control,
    t_final: f64,
    t: f64,
) -> Result<Vec<Complex64>> {
    if t < 0.0 || t > t_final * (1.0 + 1e-12) {
        return Err(Error::TimeOutOfRange { t, t_final });
    }
    let h = match control {
        Control::SBasis { coeffs } => {
            assert_eq!(coeffs.len(), sd.size(), "control size mismatch");
            sbasis_h_at(sd, t_final, coeffs, t)
        }
        Control::Sampled { grid, values } => {
            if grid.len() < 3 {
                return Err(Error::GridTooCoarse { m: grid.len() });
            }
            assert_eq!(values.len(), grid.len());
            let i = grid.index_of(t)?;
            sampled_h_at(sd, grid, values, i)
        }
    };
    Ok(sd.state_from_eigen_coeffs(&h))
}

/// Full trajectory u^f(t_i) over the grid.
pub fn solve_forward_trajectory(
    sd: &SpectralData,
    control: &Control,
    grid: TimeGrid,
) -> Result<Vec<Vec<Complex64>>> {
    let t_final = grid.t_final();
    match control {
        Control::SBasis { coeffs } => {
            assert_eq!(coeffs.len(), sd.size(), "control size mismatch");
            let pts = grid.points();
            Ok(par::map_collect(grid.len(), |i| {
                sd.state_from_eigen_coeffs(&sbasis_h_at(sd, t_final, coeffs, pts[i]))
            }))
        }
        Control::Sampled { grid: g, values } => {
            if g.len() < 3 {
                return Err(Error::GridTooCoarse { m: g.len() });
            }
            if g != &grid {
                return Err(Error::OffGridTime { t: grid.t_final() });
            }
            Ok(par::map_collect(grid.len(), |i| {
                sd.state_from_eigen_coeffs(&sampled_h_at(sd, g, values, i))
            }))
        }
    }
}

/// Response operator (R^Tf)(t_i) = ∫₀^{t_i} r(t_i−s) f(s) ds on the grid.
///
/// Always goes through the convolution quadrature, independently of the
/// closed-form forward path, so the two can cross-check each other.
pub fn apply_response(
    sd: &SpectralData,
    control: &Control,
    grid: TimeGrid,
) -> Result<Vec<Complex64>> {
    if grid.len() < 3 {
        return Err(Error::GridTooCoarse { m: grid.len() });
    }
    let f = control.sample(sd, grid)?;
    let h = grid.spacing();
    let pts = grid.points();
    Ok(par::map_collect(grid.len(), |i| {
        let t = pts[i];
        let re: Vec<f64> = (0..=i).map(|j| f[j].re * response_function(sd, t - pts[j])).collect();
        let im: Vec<f64> = (0..=i).map(|j| f[j].im * response_function(sd, t - pts[j])).collect();
        Complex64::new(grid::prefix_integral(&re, h, i), grid::prefix_integral(&im, h, i))
    }))
}

/// Control operator W^T f = u^f(T).
pub fn control_operator(
    sd: &SpectralData,
    control: &Control,
    t_final: f64,
) -> Result<Vec<Complex64>> {
    let t = match control {
        Control::Sampled { grid, .. } => grid.t_final(),
        Control::SBasis { .. } => t_final,
    };
    solve_forward(sd, control, t_final, t)
}
