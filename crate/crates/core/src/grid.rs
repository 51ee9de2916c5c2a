//! Uniform time grids and the quadrature/differentiation rules used on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid t_i = i·T/(m−1), i = 0..m−1 on [0, T].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_final: f64,
    m: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::GridTooCoarse { m });
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::TimeOutOfRange { t: t_final, t_final });
        }
        Ok(Self { t_final, m })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.t_final / (self.m - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.m);
        i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.point(i)).collect()
    }

    /// Index of `t` if it lies on the grid (within 1e−9·T), else an error.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let h = self.spacing();
        let i = (t / h).round() as isize;
        if i < 0 || i as usize >= self.m || (t - i as f64 * h).abs() > 1e-9 * self.t_final {
            return Err(Error::OffGridTime { t });
        }
        Ok(i as usize)
    }
}

/// Composite Simpson weights for an odd number of points; for an even count
/// the last three intervals get the 3/8 rule. O(h⁴) either way.
pub fn simpson_weights(m: usize, h: f64) -> Vec<f64> {
    assert!(m >= 3, "need at least 3 quadrature points");
    let mut w = vec![0.0f64; m];
    let intervals = m - 1;
    let simpson_end = if intervals % 2 == 0 { m - 1 } else { m - 4 };
    // Simpson over [0, simpson_end]
    if simpson_end >= 2 {
        w[0] += h / 3.0;
        w[simpson_end] += h / 3.0;
        for (i, wi) in w.iter_mut().enumerate().take(simpson_end).skip(1) {
            *wi += if i % 2 == 1 { 4.0 * h / 3.0 } else { 2.0 * h / 3.0 };
        }
    }
    if intervals % 2 == 1 {
        // 3/8 rule on the trailing three intervals.
        w[m - 4] += 3.0 * h / 8.0;
        w[m - 3] += 9.0 * h / 8.0;
        w[m - 2] += 9.0 * h / 8.0;
        w[m - 1] += 3.0 * h / 8.0;
    }
    w
}

/// ∫₀^{t_i} g dτ for a single prefix of a uniform grid.
///
/// Even prefixes use composite Simpson, odd ones Simpson plus a trailing
/// 3/8 block; the one-interval prefix falls back to the trapezoid (its O(h³)
/// local error is below every tolerance used on these grids).
pub fn prefix_integral(values: &[f64], h: f64, i: usize) -> f64 {
    debug_assert!(i < values.len());
    match i {
        0 => 0.0,
        1 => 0.5 * h * (values[0] + values[1]),
        _ => {
            let w = simpson_weights(i + 1, h);
            values[..=i].iter().zip(&w).map(|(v, w)| v * w).sum()
        }
    }
}

/// Cumulative integral R[j] = ∫₀^{t_j} f dτ on a uniform grid, fourth order.
///
/// Each interval contributes the exact integral of the cubic through its
/// four nearest nodes (Adams–Moulton-style end corrections at the borders).
pub fn cumulative_integral(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 4, "cumulative integral needs at least 4 samples");
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    let mut acc = 0.0;
    for j in 0..n - 1 {
        let seg = if j == 0 {
            h / 24.0 * (9.0 * values[0] + 19.0 * values[1] - 5.0 * values[2] + values[3])
        } else if j == n - 2 {
            h / 24.0
                * (9.0 * values[n - 1] + 19.0 * values[n - 2] - 5.0 * values[n - 3]
                    + values[n - 4])
        } else {
            h / 24.0
                * (-values[j - 1] + 13.0 * values[j] + 13.0 * values[j + 1] - values[j + 2])
        };
        acc += seg;
        out.push(acc);
    }
    out
}

/// Second derivative on a uniform grid, five-point central stencil with
/// fourth-order one-sided stencils on the two points at each boundary.
pub fn second_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 6, "second derivative stencil needs at least 6 samples");
    let hh = 12.0 * h * h;
    let v = values;
    let mut out = vec![0.0; n];
    out[0] = (45.0 * v[0] - 154.0 * v[1] + 214.0 * v[2] - 156.0 * v[3] + 61.0 * v[4]
        - 10.0 * v[5])
        / hh;
    out[1] =
        (10.0 * v[0] - 15.0 * v[1] - 4.0 * v[2] + 14.0 * v[3] - 6.0 * v[4] + v[5]) / hh;
    for i in 2..n - 2 {
        out[i] = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) / hh;
    }
    out[n - 2] = (10.0 * v[n - 1] - 15.0 * v[n - 2] - 4.0 * v[n - 3] + 14.0 * v[n - 4]
        - 6.0 * v[n - 5]
        + v[n - 6])
        / hh;
    out[n - 1] = (45.0 * v[n - 1] - 154.0 * v[n - 2] + 214.0 * v[n - 3] - 156.0 * v[n - 4]
        + 61.0 * v[n - 5]
        - 10.0 * v[n - 6])
        / hh;
    out
}

/// Weighted L²(0,T) inner product Σ w_i f_i conj(g_i) with Simpson weights.
pub fn grid_inner(f: &[Complex64], g: &[Complex64], h: f64) -> Complex64 {
    assert_eq!(f.len(), g.len());
    let w = simpson_weights(f.len(), h);
    f.iter()
        .zip(g)
        .zip(&w)
        .map(|((fi, gi), wi)| fi * gi.conj() * *wi)
        .sum()
}

/// Real-valued variant of [`grid_inner`].
pub fn grid_inner_real(f: &[f64], g: &[f64], h: f64) -> f64 {
    assert_eq!(f.len(), g.len());
    let w = simpson_weights(f.len(), h);
    f.iter().zip(g).zip(&w).map(|((fi, gi), wi)| fi * gi * wi).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_points_and_lookup() {
        let g = TimeGrid::new(1.0, 5).unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.index_of(0.75).unwrap(), 3);
        assert!(g.index_of(0.3).is_err());
        assert!(TimeGrid::new(1.0, 1).is_err());
    }

    #[test]
    fn simpson_exact_for_cubics() {
        for &m in &[5usize, 9, 11, 8, 6] {
            let h = 1.0 / (m - 1) as f64;
            let w = simpson_weights(m, h);
            let integral: f64 = (0..m)
                .map(|i| {
                    let t = i as f64 * h;
                    w[i] * (t * t * t - 2.0 * t + 1.0)
                })
                .sum();
            // ∫₀¹ (t³ − 2t + 1) dt = 1/4 − 1 + 1 = 1/4
            assert_abs_diff_eq!(integral, 0.25, epsilon = 1e-14);
        }
    }

    #[test]
    fn prefix_integral_converges() {
        let m = 2001;
        let h = 1.0 / (m - 1) as f64;
        let vals: Vec<f64> = (0..m).map(|i| (3.0 * i as f64 * h).sin()).collect();
        for &i in &[1usize, 2, 7, 100, 2000] {
            let t = i as f64 * h;
            let exact = (1.0 - (3.0 * t).cos()) / 3.0;
            assert_abs_diff_eq!(prefix_integral(&vals, h, i), exact, epsilon = 1e-10);
        }
    }

    #[test]
    fn cumulative_integral_fourth_order() {
        let m = 1001;
        let h = 2.0 / (m - 1) as f64;
        let vals: Vec<f64> = (0..m).map(|i| (2.5 * i as f64 * h).cos()).collect();
        let cum = cumulative_integral(&vals, h);
        for &j in &[1usize, 2, 500, 999, 1000] {
            let t = j as f64 * h;
            assert_abs_diff_eq!(cum[j], (2.5 * t).sin() / 2.5, epsilon = 1e-11);
        }
    }

    #[test]
    fn second_derivative_stencils() {
        let m = 201;
        let h = 1.0 / (m - 1) as f64;
        let vals: Vec<f64> = (0..m).map(|i| (3.0 * i as f64 * h).sin()).collect();
        let d2 = second_derivative(&vals, h);
        for (i, d) in d2.iter().enumerate() {
            let t = i as f64 * h;
            let exact = -9.0 * (3.0 * t).sin();
            // One-sided stencils at the edges carry a larger constant.
            let tol = if i < 2 || i >= m - 2 { 5e-5 } else { 1e-6 };
            assert_abs_diff_eq!(*d, exact, epsilon = tol);
        }
    }
}
