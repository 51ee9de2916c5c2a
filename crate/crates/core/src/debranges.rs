//! The space of Fourier images of reachable states: polynomials of degree
//! ≤ N−1 in the φ-basis, with the norm transported from control space.
//!
//! Because the spectral measure has exactly N atoms, every inner product is
//! a finite sum Σ_k H(λ_k)conj(G(λ_k))/ρ_k, and the φ-basis coefficients are
//! orthonormal coordinates. The reproducing kernel at z has coefficients
//! conj(φ_m(z)) — the same element the special control j_z reaches — and
//! feeds the Hermite–Biehler structure function E(z) = √π(1−iz)J_i(z)/‖J_i‖.
//!
//! Conjugation convention: all inner products are conjugate-linear in the
//! second argument, so the reproducing identity reads (G, J_z) = G(z).

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::connecting::GramMatrix;
use crate::error::{Error, Result};
use crate::jacobi::SpectralData;
use crate::krein::point_evaluation_control;
use crate::quadrature::gauss_legendre;
use crate::tolerances::WEIGHTED_INNER_ABS;
use crate::wave::control_operator;

/// Element of the space: coefficients g_m of G(λ) = Σ_m g_m φ_m(λ).
#[derive(Debug, Clone)]
pub struct BElement {
    coeffs: Vec<Complex64>,
}

impl BElement {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// G(z) = Σ_m g_m φ_m(z).
    pub fn eval(&self, sd: &SpectralData, z: Complex64) -> Complex64 {
        assert_eq!(self.coeffs.len(), sd.size(), "element size mismatch");
        let phi = sd.matrix().eval_polynomials_complex(z);
        self.coeffs.iter().zip(&phi).map(|(g, p)| g * p).sum()
    }

    /// (G(z), G'(z)).
    pub fn eval_with_derivative(&self, sd: &SpectralData, z: Complex64) -> (Complex64, Complex64) {
        assert_eq!(self.coeffs.len(), sd.size(), "element size mismatch");
        let (phi, dphi) = sd.matrix().eval_polynomials_complex_with_derivative(z);
        let v = self.coeffs.iter().zip(&phi).map(|(g, p)| g * p).sum();
        let d = self.coeffs.iter().zip(&dphi).map(|(g, p)| g * p).sum();
        (v, d)
    }

    /// G^#(z) = conj(G(conj z)): coefficientwise conjugation in the real
    /// φ-basis.
    pub fn conjugate(&self) -> BElement {
        BElement {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }
}

/// Fourier image of a state vector: the coefficients are the state
/// coordinates.
pub fn fourier_image(sd: &SpectralData, state: &[Complex64]) -> BElement {
    assert_eq!(state.len(), sd.size(), "state size mismatch");
    BElement {
        coeffs: state.to_vec(),
    }
}

/// Orthogonal projection onto the span of φ_1..φ_N in L²(dρ): since the
/// measure is purely atomic with atoms 1/ρ_j at λ_j, the coefficients are
/// the finite sums (a, φ_m) = Σ_j a(λ_j)φ_m(λ_j)/ρ_j.
pub fn project<F: Fn(f64) -> Complex64>(sd: &SpectralData, a: F) -> BElement {
    let values: Vec<Complex64> = sd.lambdas().iter().map(|&l| a(l)).collect();
    BElement {
        coeffs: sd.coeffs_from_eigen_values(&values),
    }
}

/// Inner product of the space: Σ_k H(λ_k)conj(G(λ_k))/ρ_k, evaluated as the
/// equal coefficient sum Σ_m h_m conj(g_m) (weighted orthonormality of the
/// φ-basis). The coefficient form stays exact at large N, where the atomic
/// sum cancels through huge polynomial values; [`inner_atomic`] keeps the
/// defining formula for cross-checks.
pub fn inner(sd: &SpectralData, h: &BElement, g: &BElement) -> Complex64 {
    assert_eq!(h.coeffs.len(), sd.size());
    assert_eq!(g.coeffs.len(), sd.size());
    h.coeffs.iter().zip(&g.coeffs).map(|(x, y)| x * y.conj()).sum()
}

/// The defining atomic-measure sum Σ_k H(λ_k)conj(G(λ_k))/ρ_k.
pub fn inner_atomic(sd: &SpectralData, h: &BElement, g: &BElement) -> Complex64 {
    let hv = sd.eigen_values_from_coeffs(&h.coeffs);
    let gv = sd.eigen_values_from_coeffs(&g.coeffs);
    hv.iter()
        .zip(&gv)
        .zip(sd.rhos())
        .map(|((x, y), &r)| x * y.conj() / r)
        .sum()
}

pub fn norm(sd: &SpectralData, g: &BElement) -> f64 {
    inner(sd, g, g).re.max(0.0).sqrt()
}

/// Reproducing kernel at z, direct route: coefficients conj(φ_m(z)), the
/// Christoffel–Darboux-type sum Σ_m conj(φ_m(z))φ_m(λ).
pub fn reproducing_kernel(sd: &SpectralData, z: Complex64) -> BElement {
    let phi = sd.matrix().eval_polynomials_complex(z);
    BElement {
        coeffs: phi[..sd.size()].iter().map(|p| p.conj()).collect(),
    }
}

/// Reproducing kernel at z, control route: the Fourier image of the state
/// reached by the point-evaluation control j_z. Exercises the Gram solve and
/// the forward map; agreement with the direct route is the substantive test
/// of that machinery.
pub fn reproducing_kernel_via_control(
    sd: &SpectralData,
    gram: &GramMatrix,
    z: Complex64,
) -> Result<BElement> {
    let jz = point_evaluation_control(sd, gram, z);
    let state = control_operator(sd, &jz, gram.t_final())?;
    Ok(fourier_image(sd, &state))
}

/// Multiplies an element of degree ≤ N−2 by (λ − ω), staying inside the
/// space. Multiplication by λ acts on φ-basis coefficients as the Jacobi
/// matrix itself (the three-term recurrence), so the product is exact
/// coefficient arithmetic: (A − ωI)h, with the boundary term vanishing
/// because the top coefficient is zero.
pub fn multiply_by_linear(sd: &SpectralData, h: &BElement, omega: Complex64) -> BElement {
    let n = sd.size();
    assert_eq!(h.coeffs.len(), n);
    let scale: f64 = h.coeffs.iter().map(|c| c.norm()).sum();
    assert!(
        h.coeffs[n - 1].norm() <= 1e-12 * scale.max(1e-300),
        "element has full degree; the product would leave the space"
    );
    let lambda_h = sd.matrix().apply(&h.coeffs);
    BElement {
        coeffs: lambda_h
            .iter()
            .zip(&h.coeffs)
            .map(|(lh, hc)| lh - omega * hc)
            .collect(),
    }
}

/// The Hermite–Biehler structure function E(z) = √π (1−iz) J_i(z) / ‖J_i‖.
#[derive(Debug, Clone)]
pub struct HermiteBiehlerFn {
    kernel_at_i: BElement,
    norm: f64,
    sd: SpectralData,
}

/// Builds E from the reproducing kernel at i; ‖J_i‖² = J_i(i) is real and
/// positive.
pub fn hermite_biehler(sd: &SpectralData) -> HermiteBiehlerFn {
    let ji = reproducing_kernel(sd, Complex64::I);
    let norm_sq = ji.eval(sd, Complex64::I).re;
    debug_assert!(norm_sq > 0.0);
    HermiteBiehlerFn {
        kernel_at_i: ji,
        norm: norm_sq.sqrt(),
        sd: sd.clone(),
    }
}

impl HermiteBiehlerFn {
    pub fn kernel_at_i(&self) -> &BElement {
        &self.kernel_at_i
    }

    /// ‖J_i‖ = √(J_i(i)).
    pub fn kernel_norm(&self) -> f64 {
        self.norm
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let pre = std::f64::consts::PI.sqrt() / self.norm;
        (Complex64::ONE - Complex64::I * z) * self.kernel_at_i.eval(&self.sd, z) * pre
    }

    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let pre = std::f64::consts::PI.sqrt() / self.norm;
        let (ji, dji) = self.kernel_at_i.eval_with_derivative(&self.sd, z);
        let lin = Complex64::ONE - Complex64::I * z;
        (lin * ji * pre, (lin * dji - Complex64::I * ji) * pre)
    }

    /// Kernel form J_z(ξ) = [conj(E(z))E(ξ) − E(z̄)conj(E(ξ̄))]/(2i(z̄−ξ)),
    /// with the derivative (L'Hôpital) form once ξ approaches z̄.
    pub fn reproducing_kernel(&self, z: Complex64, xi: Complex64) -> Complex64 {
        let zbar = z.conj();
        let ez = self.eval(z);
        let ezbar = self.eval(zbar);
        if (zbar - xi).norm() < 1e-8 {
            let (_, de_at_zbar) = self.eval_with_derivative(zbar);
            let (_, de_at_z) = self.eval_with_derivative(z);
            // d/dξ[conj(E(ξ̄))] = conj(E'(ξ̄)); denominator slope is −2i.
            return (ez.conj() * de_at_zbar - ezbar * de_at_z.conj())
                / Complex64::new(0.0, -2.0);
        }
        let exi = self.eval(xi);
        let exibar_conj = self.eval(xi.conj()).conj();
        (ez.conj() * exi - ezbar * exibar_conj) / (Complex64::new(0.0, 2.0) * (zbar - xi))
    }
}

/// Result of the sampled Hermite–Biehler inequality check.
#[derive(Debug, Clone, Serialize)]
pub struct HbReport {
    pub min_margin: f64,
    pub samples: usize,
    pub worst_re: f64,
    pub worst_im: f64,
}

/// Checks |E(z)| − |E(conj z)| > 0 at every sample in the open upper half
/// plane; any non-positive margin is a failure of the construction.
pub fn verify_hb(e: &HermiteBiehlerFn, samples: &[Complex64]) -> HbReport {
    assert!(!samples.is_empty());
    let mut min_margin = f64::INFINITY;
    let mut worst = samples[0];
    for &z in samples {
        assert!(z.im > 0.0, "sample {z} not in the open upper half-plane");
        let margin = e.eval(z).norm() - e.eval(z.conj()).norm();
        if margin < min_margin {
            min_margin = margin;
            worst = z;
        }
    }
    HbReport {
        min_margin,
        samples: samples.len(),
        worst_re: worst.re,
        worst_im: worst.im,
    }
}

/// Winding number of E around a rectangle in the upper half plane — the
/// argument-principle count of zeros inside. Panics if the sampling ever
/// takes an argument step ≥ π/2 (contour too close to a zero).
pub fn count_zeros_in_rectangle(
    e: &HermiteBiehlerFn,
    re_range: (f64, f64),
    im_range: (f64, f64),
    samples_per_edge: usize,
) -> i64 {
    let corners = [
        Complex64::new(re_range.0, im_range.0),
        Complex64::new(re_range.1, im_range.0),
        Complex64::new(re_range.1, im_range.1),
        Complex64::new(re_range.0, im_range.1),
    ];
    let mut total = 0.0;
    let mut prev_arg = e.eval(corners[0]).arg();
    for edge in 0..4 {
        let from = corners[edge];
        let to = corners[(edge + 1) % 4];
        for s in 1..=samples_per_edge {
            let z = from + (to - from) * (s as f64 / samples_per_edge as f64);
            let arg = e.eval(z).arg();
            let mut step = arg - prev_arg;
            while step > std::f64::consts::PI {
                step -= 2.0 * std::f64::consts::PI;
            }
            while step < -std::f64::consts::PI {
                step += 2.0 * std::f64::consts::PI;
            }
            assert!(
                step.abs() < std::f64::consts::FRAC_PI_2,
                "argument step {step} too large; refine the contour sampling"
            );
            total += step;
            prev_arg = arg;
        }
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

/// (1/π)∫ F(λ)conj(G(λ)) dλ/|E(λ)|² over ℝ via λ = tanθ and Gauss–Legendre
/// panels. Degrees ≤ N−1 guarantee a λ^{−2} tail, so the substituted
/// integrand is bounded; zeros of E just below the real axis show up as
/// narrow near-poles, which the panels resolve by local bisection (each
/// panel's 64- vs 32-point disagreement is its error estimate).
pub fn weighted_inner(
    sd: &SpectralData,
    f: &BElement,
    g: &BElement,
    e: &HermiteBiehlerFn,
) -> Result<Complex64> {
    let (nodes64, weights64) = gauss_legendre(64);
    let (nodes32, weights32) = gauss_legendre(32);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let integrand = |theta: f64| -> Complex64 {
        let lambda = theta.tan();
        let sec2 = 1.0 / (theta.cos() * theta.cos());
        let z = Complex64::new(lambda, 0.0);
        let denom = e.eval(z).norm_sqr();
        f.eval(sd, z) * g.eval(sd, z).conj() * (sec2 / denom)
    };
    let panel = |lo: f64, hi: f64| -> (Complex64, f64) {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut fine = Complex64::ZERO;
        for (x, w) in nodes64.iter().zip(&weights64) {
            fine += integrand(mid + half * x) * *w;
        }
        let mut coarse = Complex64::ZERO;
        for (x, w) in nodes32.iter().zip(&weights32) {
            coarse += integrand(mid + half * x) * *w;
        }
        (fine * half, (fine - coarse).norm() * half)
    };

    // Error budget proportional to panel width; 30 bisection levels resolve
    // near-poles down to widths ~1e−9.
    let budget = WEIGHTED_INNER_ABS * std::f64::consts::PI;
    let mut total = Complex64::ZERO;
    let mut achieved = 0.0;
    let mut stack: Vec<(f64, f64, u32)> = (0..8)
        .map(|p| {
            let w = std::f64::consts::PI / 8.0;
            (-half_pi + p as f64 * w, -half_pi + (p + 1) as f64 * w, 0u32)
        })
        .collect();
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = panel(lo, hi);
        let share = budget * (hi - lo) / std::f64::consts::PI;
        // The 64/32 disagreement bottoms out at rounding noise; accept that.
        let noise = 1e-15 * value.norm().max(1e-30);
        if err <= share.max(noise) || depth >= 30 {
            total += value;
            achieved += err;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    let achieved = achieved / std::f64::consts::PI;
    if achieved > WEIGHTED_INNER_ABS {
        return Err(Error::QuadratureTolerance {
            achieved,
            requested: WEIGHTED_INNER_ABS,
        });
    }
    Ok(total / std::f64::consts::PI)
}

/// Measured convention constants: κ_E is the ratio of the kernel-form
/// reproducing kernel to the direct one, κ_B the ratio of the 1/|E|²
/// weighted inner product to the atomic one. Both must be constants and
/// multiply to 1 for the reproducing machinery of B(E) to close.
#[derive(Debug, Clone, Serialize)]
pub struct KappaReport {
    pub kappa_e: f64,
    pub kappa_e_spread: f64,
    pub kappa_b: f64,
    pub kappa_b_spread: f64,
    pub product_defect: f64,
}

pub fn measure_kappas(sd: &SpectralData, seed: u64, pairs: usize) -> Result<KappaReport> {
    let e = hermite_biehler(sd);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sd.size();
    let rand_z =
        |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0));

    let mut ratios_e = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let z = rand_z(&mut rng);
        let xi = rand_z(&mut rng);
        let direct = reproducing_kernel(sd, z).eval(sd, xi);
        if direct.norm() < 1e-6 {
            continue;
        }
        let from_e = e.reproducing_kernel(z, xi);
        ratios_e.push((from_e / direct).re);
    }

    let mut ratios_b = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let fc: Vec<Complex64> = (0..n).map(|_| rand_z(&mut rng)).collect();
        let gc: Vec<Complex64> = (0..n).map(|_| rand_z(&mut rng)).collect();
        let f = BElement::new(fc);
        let g = BElement::new(gc);
        let atomic = inner(sd, &f, &g);
        if atomic.norm() < 1e-3 {
            continue;
        }
        let weighted = weighted_inner(sd, &f, &g, &e)?;
        ratios_b.push((weighted / atomic).re);
    }

    let stats = |v: &[f64]| -> (f64, f64) {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / v.len() as f64;
        (mean, var.sqrt() / mean.abs())
    };
    let (kappa_e, kappa_e_spread) = stats(&ratios_e);
    let (kappa_b, kappa_b_spread) = stats(&ratios_b);
    Ok(KappaReport {
        kappa_e,
        kappa_e_spread,
        kappa_b,
        kappa_b_spread,
        product_defect: (kappa_e * kappa_b - 1.0).abs(),
    })
}

/// Quantitative check of the three reproducing-kernel-space axioms.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    /// min over trials of (‖J_z‖‖G‖ − |G(z)|)/(‖J_z‖‖G‖); ≥ 0 is a pass.
    pub point_evaluation_margin: f64,
    /// max relative defect |‖G^#‖ − ‖G‖|/‖G‖.
    pub conjugation_defect: f64,
    /// max relative defect of the Blaschke-factor norm equality; stays zero
    /// when N = 1 (no room for a zero inside the space).
    pub blaschke_defect: f64,
    pub trials: usize,
}

pub fn verify_axioms(sd: &SpectralData, seed: u64, trials: usize) -> AxiomReport {
    let n = sd.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rand_c =
        |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));

    let mut point_margin = f64::INFINITY;
    let mut conj_defect: f64 = 0.0;
    let mut blaschke_defect: f64 = 0.0;

    for _ in 0..trials {
        let g = BElement::new((0..n).map(|_| rand_c(&mut rng)).collect());
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0));

        // 1) point evaluation bound |G(z)| ≤ ‖J_z‖·‖G‖ with ‖J_z‖ = √J_z(z).
        let jz = reproducing_kernel(sd, z);
        let bound = jz.eval(sd, z).re.max(0.0).sqrt() * norm(sd, &g);
        let margin = (bound - g.eval(sd, z).norm()) / bound.max(1e-300);
        point_margin = point_margin.min(margin);

        // 2) ‖G^#‖ = ‖G‖.
        let ng = norm(sd, &g);
        let nconj = norm(sd, &g.conjugate());
        conj_defect = conj_defect.max((ng - nconj).abs() / ng.max(1e-300));

        // 3) Blaschke invariance: G = (λ−ω)H vanishes at ω, and
        //    (λ−ω̄)H has the same norm (|λ−ω| = |λ−ω̄| on the real axis).
        if n >= 2 {
            let mut hc: Vec<Complex64> = (0..n).map(|_| rand_c(&mut rng)).collect();
            hc[n - 1] = Complex64::ZERO;
            let h = BElement::new(hc);
            let omega = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0));
            let g_zero = multiply_by_linear(sd, &h, omega);
            debug_assert!(g_zero.eval(sd, omega).norm() < 1e-9);
            let flipped = multiply_by_linear(sd, &h, omega.conj());
            let n0 = norm(sd, &g_zero);
            let n1 = norm(sd, &flipped);
            blaschke_defect = blaschke_defect.max((n0 - n1).abs() / n0.max(1e-300));
        }
    }

    AxiomReport {
        point_evaluation_margin: point_margin,
        conjugation_defect: conj_defect,
        blaschke_defect,
        trials,
    }
}
