//! Finite Jacobi matrices, their three-term-recurrence polynomials and
//! spectral data {λ_k, ρ_k}.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::tolerances;

/// Symmetric tridiagonal matrix with positive off-diagonal entries.
///
/// `a` holds the N−1 off-diagonal entries a_1..a_{N−1}, `b` the N diagonal
/// entries b_1..b_N. The boundary conventions a_0 = a_N = 1 of the
/// polynomial recurrence are implicit and not stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JacobiMatrixRaw", into = "JacobiMatrixRaw")]
pub struct JacobiMatrix {
    a: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct JacobiMatrixRaw {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TryFrom<JacobiMatrixRaw> for JacobiMatrix {
    type Error = Error;
    fn try_from(raw: JacobiMatrixRaw) -> Result<Self> {
        JacobiMatrix::new(raw.a, raw.b)
    }
}

impl From<JacobiMatrix> for JacobiMatrixRaw {
    fn from(m: JacobiMatrix) -> Self {
        JacobiMatrixRaw { a: m.a, b: m.b }
    }
}

impl JacobiMatrix {
    /// Validates |a| = |b| − 1, |b| ≥ 1 and a_k > 0.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidMatrix {
                reason: "diagonal is empty".into(),
            });
        }
        if a.len() + 1 != b.len() {
            return Err(Error::InvalidMatrix {
                reason: format!("expected |a| = |b| − 1, got |a| = {}, |b| = {}", a.len(), b.len()),
            });
        }
        if let Some(bad) = a.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidMatrix {
                reason: format!("off-diagonal entry {bad} is not a positive finite number"),
            });
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix {
                reason: "diagonal entry is not finite".into(),
            });
        }
        Ok(Self { a, b })
    }

    /// Draws b_k uniformly from `b_range` and a_k from `a_range` (left edge
    /// clamped above zero). Deterministic in `seed`.
    pub fn random(n: usize, seed: u64, b_range: (f64, f64), a_range: (f64, f64)) -> Self {
        assert!(n >= 1, "matrix size must be at least 1");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(b_range.0..=b_range.1)).collect();
        let lo = a_range.0.max(f64::MIN_POSITIVE);
        let a: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(lo..=a_range.1)).collect();
        Self::new(a, b).expect("randomly generated matrix is valid")
    }

    pub fn size(&self) -> usize {
        self.b.len()
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.a
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.b
    }

    /// Tridiagonal matrix-vector product Av.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        assert_eq!(v.len(), n, "vector length {} does not match matrix size {n}", v.len());
        (0..n)
            .map(|i| {
                let mut s = self.b[i] * v[i];
                if i > 0 {
                    s += self.a[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.a[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Real-vector variant of [`apply`](Self::apply).
    pub fn apply_real(&self, v: &[f64]) -> Vec<f64> {
        let n = self.size();
        assert_eq!(v.len(), n);
        (0..n)
            .map(|i| {
                let mut s = self.b[i] * v[i];
                if i > 0 {
                    s += self.a[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.a[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Values (φ_1(λ), …, φ_{N+1}(λ)) of the recurrence polynomials.
    ///
    /// φ_1 = 1 and a_n φ_{n+1} = (λ − b_n)φ_n − a_{n−1}φ_{n−1} with the
    /// boundary convention a_0 = a_N = 1; φ_k has degree k−1 and the
    /// eigenvalues of the matrix are the roots of φ_{N+1}.
    pub fn eval_polynomials(&self, lambda: f64) -> Vec<f64> {
        let n = self.size();
        let mut phi = Vec::with_capacity(n + 1);
        phi.push(1.0);
        for k in 0..n {
            let prev = if k == 0 { 0.0 } else { phi[k - 1] };
            let a_prev = if k == 0 { 1.0 } else { self.a[k - 1] };
            let a_next = if k + 1 < n { self.a[k] } else { 1.0 };
            phi.push(((lambda - self.b[k]) * phi[k] - a_prev * prev) / a_next);
        }
        phi
    }

    /// Complex-argument variant of [`eval_polynomials`](Self::eval_polynomials).
    pub fn eval_polynomials_complex(&self, lambda: Complex64) -> Vec<Complex64> {
        let n = self.size();
        let mut phi = Vec::with_capacity(n + 1);
        phi.push(Complex64::new(1.0, 0.0));
        for k in 0..n {
            let prev = if k == 0 { Complex64::ZERO } else { phi[k - 1] };
            let a_prev = if k == 0 { 1.0 } else { self.a[k - 1] };
            let a_next = if k + 1 < n { self.a[k] } else { 1.0 };
            phi.push(((lambda - self.b[k]) * phi[k] - a_prev * prev) / a_next);
        }
        phi
    }

    /// Polynomial values and λ-derivatives at a complex point, from the
    /// differentiated recurrence.
    pub fn eval_polynomials_complex_with_derivative(
        &self,
        lambda: Complex64,
    ) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.size();
        let mut phi = Vec::with_capacity(n + 1);
        let mut dphi = Vec::with_capacity(n + 1);
        phi.push(Complex64::new(1.0, 0.0));
        dphi.push(Complex64::ZERO);
        for k in 0..n {
            let (prev, dprev) = if k == 0 {
                (Complex64::ZERO, Complex64::ZERO)
            } else {
                (phi[k - 1], dphi[k - 1])
            };
            let a_prev = if k == 0 { 1.0 } else { self.a[k - 1] };
            let a_next = if k + 1 < n { self.a[k] } else { 1.0 };
            phi.push(((lambda - self.b[k]) * phi[k] - a_prev * prev) / a_next);
            dphi.push((phi[k] + (lambda - self.b[k]) * dphi[k] - a_prev * dprev) / a_next);
        }
        (phi, dphi)
    }

    /// φ_{N+1}(λ) together with its λ-derivative, for Newton polishing.
    fn char_poly_with_derivative(&self, lambda: f64) -> (f64, f64) {
        let n = self.size();
        let (mut p_prev, mut p) = (0.0f64, 1.0f64);
        let (mut d_prev, mut d) = (0.0f64, 0.0f64);
        for k in 0..n {
            let a_prev = if k == 0 { 1.0 } else { self.a[k - 1] };
            let a_next = if k + 1 < n { self.a[k] } else { 1.0 };
            let p_next = ((lambda - self.b[k]) * p - a_prev * p_prev) / a_next;
            let d_next = ((lambda - self.b[k]) * d + p - a_prev * d_prev) / a_next;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
        }
        (p, d)
    }

    /// φ_{N+1}(λ) in double-double arithmetic: f64 eigenvalues carry a
    /// representation error ε·|λ| that the polynomial matrix inherits
    /// amplified by φ′; polishing the root beyond f64 and evaluating the
    /// column at the polished root removes that term.
    fn char_poly_dd(&self, lambda: Dd) -> Dd {
        let n = self.size();
        let mut p_prev = Dd::ZERO;
        let mut p = Dd::from_f64(1.0);
        for k in 0..n {
            let a_prev = if k == 0 { 1.0 } else { self.a[k - 1] };
            let a_next = if k + 1 < n { self.a[k] } else { 1.0 };
            let next = (lambda.sub_f64(self.b[k]) * p - p_prev.mul_f64(a_prev)).div_f64(a_next);
            p_prev = p;
            p = next;
        }
        p
    }

    /// Polynomial column (φ_1..φ_N) and its norm² at a double-double root.
    fn eval_column_dd(&self, lambda: Dd) -> (Vec<f64>, f64) {
        let n = self.size();
        let mut col = Vec::with_capacity(n);
        let mut norm_sq = Dd::ZERO;
        let mut prev = Dd::ZERO;
        let mut cur = Dd::from_f64(1.0);
        for k in 0..n {
            col.push(cur.to_f64());
            norm_sq = norm_sq + cur * cur;
            let a_prev = if k == 0 { 1.0 } else { self.a[k - 1] };
            let a_next = if k + 1 < n { self.a[k] } else { 1.0 };
            let next = (lambda.sub_f64(self.b[k]) * cur - prev.mul_f64(a_prev)).div_f64(a_next);
            prev = cur;
            cur = next;
        }
        (col, norm_sq.to_f64())
    }

    /// Number of eigenvalues strictly below λ (Sturm count via LDLT pivots).
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let n = self.size();
        let mut count = 0;
        let mut q = self.b[0] - lambda;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let q_safe = if q.abs() < 1e-300 {
                if q >= 0.0 { 1e-300 } else { -1e-300 }
            } else {
                q
            };
            q = (self.b[i] - lambda) - self.a[i - 1] * self.a[i - 1] / q_safe;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.size();
        let mut lo = f64::MAX;
        let mut hi = f64::MIN;
        for i in 0..n {
            let left = if i > 0 { self.a[i - 1] } else { 0.0 };
            let right = if i < n - 1 { self.a[i] } else { 0.0 };
            lo = lo.min(self.b[i] - left - right);
            hi = hi.max(self.b[i] + left + right);
        }
        (lo - 1.0, hi + 1.0)
    }

    /// An upper bound for ‖A‖ (Gershgorin radius).
    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin_bounds();
        lo.abs().max(hi.abs())
    }

    /// Eigenvalues, weights ρ_k = ‖φ(λ_k)‖² and the polynomial-value matrix.
    ///
    /// Roots of φ_{N+1} are first separated by bisection on the Sturm count,
    /// then polished by safeguarded Newton on φ_{N+1} itself.
    pub fn spectral_decomposition(&self) -> Result<SpectralData> {
        let n = self.size();
        let (lo, hi) = self.gershgorin_bounds();
        let mut lambdas = Vec::with_capacity(n);
        for k in 0..n {
            let (mut a, mut b) = (lo, hi);
            // Bisection: narrow to an interval holding exactly λ_{k+1}.
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                if self.sturm_count(mid) <= k {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            // Newton polish inside [a, b], bisection fallback if it strays.
            let mut x = 0.5 * (a + b);
            let mut converged = false;
            for _ in 0..100 {
                let (p, d) = self.char_poly_with_derivative(x);
                let step = if d != 0.0 { p / d } else { f64::MAX };
                let next = x - step;
                let next = if next <= a || next >= b { 0.5 * (a + b) } else { next };
                if self.sturm_count(next) <= k {
                    a = a.max(next.min(b));
                } else {
                    b = b.min(next.max(a));
                }
                let scale = x.abs().max(1.0);
                if (next - x).abs() <= 2.0 * f64::EPSILON * scale || (b - a) <= 4.0 * f64::EPSILON * scale {
                    x = next;
                    converged = true;
                    break;
                }
                x = next;
            }
            if !converged && (b - a) > 1e-10 * x.abs().max(1.0) {
                return Err(Error::RootNotConverged { index: k });
            }
            lambdas.push(x);
        }
        lambdas.sort_by(f64::total_cmp);

        let mut phi = DMatrix::<f64>::zeros(n, n);
        let mut rhos = Vec::with_capacity(n);
        for (k, &lk) in lambdas.iter().enumerate() {
            // Two double-double Newton steps past the f64 limit, then the
            // column evaluated at the polished root.
            let mut root = Dd::from_f64(lk);
            for _ in 0..2 {
                let p = self.char_poly_dd(root);
                let (_, dp) = self.char_poly_with_derivative(root.hi);
                if dp != 0.0 {
                    root = root - p.div_f64(dp);
                }
            }
            let (col, norm_sq) = self.eval_column_dd(root);
            for m in 0..n {
                phi[(m, k)] = col[m];
            }
            rhos.push(norm_sq);
        }
        Ok(SpectralData {
            matrix: self.clone(),
            lambdas,
            rhos,
            phi,
        })
    }
}

/// Spectral data of a Jacobi matrix: eigenvalues λ_1 < … < λ_N, weights
/// ρ_k = ‖φ(λ_k)‖² and the matrix of polynomial values φ_m(λ_k).
///
/// The originating matrix is kept so that the recurrence polynomials can be
/// evaluated at arbitrary (complex) points downstream.
#[derive(Debug, Clone)]
pub struct SpectralData {
    matrix: JacobiMatrix,
    lambdas: Vec<f64>,
    rhos: Vec<f64>,
    phi: DMatrix<f64>,
}

impl SpectralData {
    pub fn size(&self) -> usize {
        self.lambdas.len()
    }

    pub fn matrix(&self) -> &JacobiMatrix {
        &self.matrix
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rhos
    }

    /// φ_{m+1}(λ_{k+1}) with zero-based indices.
    pub fn phi(&self, m: usize, k: usize) -> f64 {
        self.phi[(m, k)]
    }

    /// The spectral step function ρ(λ) = Σ_{λ_k < λ} 1/ρ_k.
    ///
    /// Right-continuous from the strict inequality; 0 below the spectrum and,
    /// by Parseval, 1 above it.
    pub fn spectral_function(&self, lambda: f64) -> f64 {
        self.lambdas
            .iter()
            .zip(&self.rhos)
            .filter(|(l, _)| **l < lambda)
            .map(|(_, r)| 1.0 / r)
            .sum()
    }

    /// State coordinates u from φ-basis coefficients h: u = Φh.
    pub fn state_from_eigen_coeffs(&self, h: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        assert_eq!(h.len(), n);
        (0..n)
            .map(|m| (0..n).map(|k| self.phi[(m, k)] * h[k]).sum())
            .collect()
    }

    /// Φᵀu — used by the Krein solves, where c = G⁻¹Φᵀ(target).
    pub fn phi_transpose_apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        assert_eq!(u.len(), n);
        (0..n)
            .map(|k| (0..n).map(|m| self.phi[(m, k)] * u[m]).sum())
            .collect()
    }

    /// Coefficients in the φ-basis from values at the eigenvalues:
    /// g_m = Σ_k v_k φ_m(λ_k)/ρ_k. Exact inverse of evaluation by the
    /// weighted row orthonormality of Φ.
    pub fn coeffs_from_eigen_values(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        assert_eq!(values.len(), n);
        (0..n)
            .map(|m| {
                (0..n)
                    .map(|k| values[k] * (self.phi[(m, k)] / self.rhos[k]))
                    .sum()
            })
            .collect()
    }

    /// Values at the eigenvalues from φ-basis coefficients.
    pub fn eigen_values_from_coeffs(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        assert_eq!(coeffs.len(), n);
        (0..n)
            .map(|k| (0..n).map(|m| coeffs[m] * self.phi[(m, k)]).sum())
            .collect()
    }

    /// Max violation of the quantitative invariants carried by this type:
    /// strict eigenvalue ordering, ρ_k = Σ_m φ_m(λ_k)², Parseval Σ 1/ρ_k = 1
    /// and the eigen-residual bound. Returns the worst relative defect.
    pub fn validate(&self) -> Result<()> {
        let n = self.size();
        for k in 1..n {
            if self.lambdas[k] <= self.lambdas[k - 1] {
                return Err(Error::InvalidMatrix {
                    reason: format!("eigenvalues not strictly increasing at index {k}"),
                });
            }
        }
        let parseval: f64 = self.rhos.iter().map(|r| 1.0 / r).sum();
        if (parseval - 1.0).abs() > tolerances::PARSEVAL {
            return Err(Error::InvalidMatrix {
                reason: format!("Parseval sum 1/ρ deviates from 1 by {:.3e}", parseval - 1.0),
            });
        }
        let norm = self.matrix.norm_bound();
        for (k, (&lk, &rk)) in self.lambdas.iter().zip(&self.rhos).enumerate() {
            let col: Vec<f64> = (0..n).map(|m| self.phi[(m, k)]).collect();
            let av = self.matrix.apply_real(&col);
            let resid: f64 = av
                .iter()
                .zip(&col)
                .map(|(x, p)| (x - lk * p) * (x - lk * p))
                .sum::<f64>()
                .sqrt();
            if resid / rk.sqrt() > tolerances::EIGEN_RESIDUAL * (norm + lk.abs()) {
                return Err(Error::InvalidMatrix {
                    reason: format!("eigen-residual too large for λ_{}", k + 1),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn complex_vec(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn polynomials_hand_recurrence() {
        // N = 1, b = (5): φ_2(λ) = λ − b_1 vanishes at the eigenvalue.
        let j = JacobiMatrix::new(vec![], vec![5.0]).unwrap();
        let phi = j.eval_polynomials(5.0);
        assert_eq!(phi, vec![1.0, 0.0]);

        // N = 2, a = (1), b = (0,0): φ_2 = λ, φ_3 = λ² − 1.
        let j = JacobiMatrix::new(vec![1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(j.eval_polynomials(2.0), vec![1.0, 2.0, 3.0]);
        assert_eq!(j.eval_polynomials(1.0), vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn apply_hand_values() {
        let j = JacobiMatrix::new(vec![1.0], vec![0.0, 0.0]).unwrap();
        let out = j.apply(&complex_vec(&[1.0, 0.0]));
        assert_eq!(out, complex_vec(&[0.0, 1.0]));
        let out = j.apply(&complex_vec(&[1.0, 1.0]));
        assert_eq!(out, complex_vec(&[1.0, 1.0]));

        let j = JacobiMatrix::new(vec![1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        let out = j.apply(&complex_vec(&[1.0, 1.0, 1.0]));
        assert_eq!(out, complex_vec(&[2.0, 5.0, 5.0]));
    }

    #[test]
    fn spectral_decomposition_small_cases() {
        let j = JacobiMatrix::new(vec![], vec![5.0]).unwrap();
        let sd = j.spectral_decomposition().unwrap();
        assert_abs_diff_eq!(sd.lambdas()[0], 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sd.rhos()[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sd.phi(0, 0), 1.0, epsilon = 1e-14);

        let j = JacobiMatrix::new(vec![1.0], vec![0.0, 0.0]).unwrap();
        let sd = j.spectral_decomposition().unwrap();
        assert_abs_diff_eq!(sd.lambdas()[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sd.lambdas()[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sd.rhos()[0], 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(sd.rhos()[1], 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(sd.phi(1, 0), -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(sd.phi(1, 1), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn eigenvalues_match_dense_oracle() {
        // Dense symmetric eigensolver oracle, independent of the Sturm path.
        for seed in 0..12u64 {
            let n = 2 + (seed as usize % 11);
            let j = JacobiMatrix::random(n, seed, (-5.0, 5.0), (1e-3, 5.0));
            let mut dense = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                dense[(i, i)] = j.diagonal()[i];
                if i + 1 < n {
                    dense[(i, i + 1)] = j.off_diagonal()[i];
                    dense[(i + 1, i)] = j.off_diagonal()[i];
                }
            }
            let mut oracle: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
            oracle.sort_by(f64::total_cmp);
            let sd = j.spectral_decomposition().unwrap();
            for (got, want) in sd.lambdas().iter().zip(&oracle) {
                assert_abs_diff_eq!(got, want, epsilon = 1e-10);
            }
            sd.validate().unwrap();
        }
    }

    #[test]
    fn parseval_and_orthonormality() {
        let j = JacobiMatrix::random(7, 99, (-5.0, 5.0), (0.1, 5.0));
        let sd = j.spectral_decomposition().unwrap();
        let n = sd.size();
        let parseval: f64 = sd.rhos().iter().map(|r| 1.0 / r).sum();
        assert_abs_diff_eq!(parseval, 1.0, epsilon = 1e-12);
        // Weighted rows are orthonormal, weighted columns orthogonal.
        for m in 0..n {
            for p in 0..n {
                let s: f64 = (0..n).map(|k| sd.phi(m, k) * sd.phi(p, k) / sd.rhos()[k]).sum();
                let expect = if m == p { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(s, expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn polynomials_reproduce_phi_columns() {
        let j = JacobiMatrix::random(9, 5, (-5.0, 5.0), (0.1, 5.0));
        let sd = j.spectral_decomposition().unwrap();
        for k in 0..sd.size() {
            let col = j.eval_polynomials(sd.lambdas()[k]);
            for m in 0..sd.size() {
                let scale = sd.phi(m, k).abs().max(1.0);
                assert_abs_diff_eq!(col[m], sd.phi(m, k), epsilon = 1e-12 * scale);
            }
        }
    }

    #[test]
    fn spectral_function_steps() {
        let j = JacobiMatrix::new(vec![1.0], vec![0.0, 0.0]).unwrap();
        let sd = j.spectral_decomposition().unwrap();
        assert_abs_diff_eq!(sd.spectral_function(0.0), 0.5, epsilon = 1e-13);
        assert_eq!(sd.spectral_function(-2.0), 0.0);
        assert_abs_diff_eq!(sd.spectral_function(2.0), 1.0, epsilon = 1e-13);
        // Strict inequality: the value at an eigenvalue excludes its weight.
        assert_abs_diff_eq!(sd.spectral_function(-1.0), 0.0, epsilon = 0.0);
    }

    #[test]
    fn complex_polynomials_match_real_axis() {
        let j = JacobiMatrix::random(5, 3, (-2.0, 2.0), (0.5, 2.0));
        let real = j.eval_polynomials(0.7);
        let complex = j.eval_polynomials_complex(Complex64::new(0.7, 0.0));
        for (r, c) in real.iter().zip(&complex) {
            assert_abs_diff_eq!(*r, c.re, epsilon = 1e-15 * r.abs().max(1.0));
            assert_eq!(c.im, 0.0);
        }
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert!(JacobiMatrix::new(vec![], vec![]).is_err());
        assert!(JacobiMatrix::new(vec![1.0], vec![0.0]).is_err());
        assert!(JacobiMatrix::new(vec![0.0], vec![0.0, 0.0]).is_err());
        assert!(JacobiMatrix::new(vec![-1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn transforms_roundtrip() {
        let j = JacobiMatrix::random(6, 11, (-3.0, 3.0), (0.3, 3.0));
        let sd = j.spectral_decomposition().unwrap();
        let coeffs: Vec<Complex64> = (0..6)
            .map(|i| Complex64::new(0.3 * i as f64 - 1.0, 0.1 * i as f64))
            .collect();
        let values = sd.eigen_values_from_coeffs(&coeffs);
        let back = sd.coeffs_from_eigen_values(&values);
        for (c, b) in coeffs.iter().zip(&back) {
            assert_abs_diff_eq!(c.re, b.re, epsilon = 1e-11);
            assert_abs_diff_eq!(c.im, b.im, epsilon = 1e-11);
        }
    }
}
