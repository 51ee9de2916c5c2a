//! The wave kernel S(t,λ), its derivative and antiderivative, and the
//! closed-form convolution integrals built from them.
//!
//! S(·,λ) solves S'' + λS = 0 with S(0) = 0, S'(0) = 1, which gives
//! sin(√λ t)/√λ for λ > 0, sinh(√|λ| t)/√|λ| for λ < 0 and t at λ = 0.
//! As a function of λ the kernel is entire, so every branch below is one
//! closed form of the same power series; the series itself takes over when
//! |λ|·t² is small enough for the closed forms to cancel.

use crate::tolerances::{COINCIDENT_REL, KERNEL_SERIES};

/// S(t,λ): sin(√λ t)/√λ, sinh(√|λ| t)/√|λ| or t depending on the sign of λ.
pub fn wave_kernel(t: f64, lambda: f64) -> f64 {
    let x = lambda * t * t;
    if x.abs() < KERNEL_SERIES {
        // t·(1 − x/6 + x²/120 − x³/5040)
        t * (1.0 - x / 6.0 * (1.0 - x / 20.0 * (1.0 - x / 42.0)))
    } else if lambda > 0.0 {
        let w = lambda.sqrt();
        (w * t).sin() / w
    } else {
        let w = (-lambda).sqrt();
        (w * t).sinh() / w
    }
}

/// ∂S/∂t: cos(√λ t), cosh(√|λ| t) or 1.
pub fn wave_kernel_slope(t: f64, lambda: f64) -> f64 {
    let x = lambda * t * t;
    if x.abs() < KERNEL_SERIES {
        // 1 − x/2 + x²/24 − x³/720
        1.0 - x / 2.0 * (1.0 - x / 12.0 * (1.0 - x / 30.0))
    } else if lambda > 0.0 {
        (lambda.sqrt() * t).cos()
    } else {
        ((-lambda).sqrt() * t).cosh()
    }
}

/// ∫₀ᵗ S(τ,λ) dτ: (1 − cos(√λ t))/λ, (cosh(√|λ| t) − 1)/|λ| or t²/2.
///
/// The closed forms cancel catastrophically as λ → 0, so a four-term series
/// in x = λt² is used when |x| < 1e−4.
pub fn wave_kernel_integral(t: f64, lambda: f64) -> f64 {
    let x = lambda * t * t;
    if x.abs() < KERNEL_SERIES {
        // (t²/2)·(1 − x/12 + x²/360 − x³/20160)
        0.5 * t * t * (1.0 - x / 12.0 * (1.0 - x / 30.0 * (1.0 - x / 56.0)))
    } else if lambda > 0.0 {
        (1.0 - (lambda.sqrt() * t).cos()) / lambda
    } else {
        (((-lambda).sqrt() * t).cosh() - 1.0) / -lambda
    }
}

/// Divided difference [S(t,μ) − S(t,λ)]/(μ − λ), stable for μ ≈ λ.
///
/// Away from coincidence this is the literal quotient; near coincidence it is
/// summed from the series Σ_{n≥1} (−1)ⁿ t^{2n+1}/(2n+1)! · h_{n−1}(λ,μ) with
/// h_k the complete homogeneous symmetric polynomials.
pub fn wave_kernel_dd(t: f64, lambda: f64, mu: f64) -> f64 {
    let scale = 1.0f64.max(lambda.abs()).max(mu.abs());
    if (mu - lambda).abs() >= COINCIDENT_REL * scale {
        (wave_kernel(t, mu) - wave_kernel(t, lambda)) / (mu - lambda)
    } else {
        dd_series(t, lambda, mu, SeriesKind::Kernel)
    }
}

/// Divided difference of the slope, [C(t,μ) − C(t,λ)]/(μ − λ).
pub fn wave_kernel_slope_dd(t: f64, lambda: f64, mu: f64) -> f64 {
    let scale = 1.0f64.max(lambda.abs()).max(mu.abs());
    if (mu - lambda).abs() >= COINCIDENT_REL * scale {
        (wave_kernel_slope(t, mu) - wave_kernel_slope(t, lambda)) / (mu - lambda)
    } else {
        dd_series(t, lambda, mu, SeriesKind::Slope)
    }
}

enum SeriesKind {
    Kernel,
    Slope,
}

fn dd_series(t: f64, lambda: f64, mu: f64, kind: SeriesKind) -> f64 {
    // coef_n = (−1)ⁿ t^{2n+1}/(2n+1)!  (kernel)  or (−1)ⁿ t^{2n}/(2n)! (slope)
    let t2 = t * t;
    let mut coef = match kind {
        SeriesKind::Kernel => -t2 * t / 6.0,
        SeriesKind::Slope => -t2 / 2.0,
    };
    let mut h = 1.0; // h_0(λ,μ)
    let mut mu_pow = 1.0;
    let mut sum = coef * h;
    for n in 2..=100 {
        coef *= match kind {
            SeriesKind::Kernel => -t2 / ((2 * n) as f64 * (2 * n + 1) as f64),
            SeriesKind::Slope => -t2 / ((2 * n - 1) as f64 * (2 * n) as f64),
        };
        mu_pow *= mu;
        h = lambda * h + mu_pow; // h_{n−1}
        let term = coef * h;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// ∫₀ᵗ S(T−t+σ, λ) · S(σ, μ) dσ — the convolution block of the forward
/// solution for S-basis controls. At t = T this is the Gram entry
/// ∫₀ᵀ S(σ,λ)S(σ,μ) dσ.
///
/// For λ ≠ μ integration by parts against S'' = −λS gives
///   [C(T,λ)S(t,μ) − S(T,λ)C(t,μ) + S(T−t,λ)] / (μ − λ),
/// valid across every sign combination. Near λ = μ the quotient is replaced
/// by divided differences, and the exact diagonal falls back to the
/// product-to-sum antiderivatives.
pub fn cross_integral(t_final: f64, t: f64, lambda: f64, mu: f64) -> f64 {
    debug_assert!(t >= 0.0 && t <= t_final + 1e-12 * t_final.max(1.0));
    let a = (t_final - t).max(0.0);
    let scale = 1.0f64.max(lambda.abs()).max(mu.abs());
    if (mu - lambda).abs() >= COINCIDENT_REL * scale {
        (wave_kernel_slope(t_final, lambda) * wave_kernel(t, mu)
            - wave_kernel(t_final, lambda) * wave_kernel_slope(t, mu)
            + wave_kernel(a, lambda))
            / (mu - lambda)
    } else if lambda == mu && lambda.abs() * t_final * t_final >= KERNEL_SERIES {
        cross_integral_diagonal(a, t, lambda)
    } else {
        wave_kernel_slope(t_final, lambda) * wave_kernel_dd(t, lambda, mu)
            - wave_kernel(t_final, lambda) * wave_kernel_slope_dd(t, lambda, mu)
    }
}

/// ∫₀ᵗ S(a+σ,λ)S(σ,λ) dσ by product-to-sum, one branch per sign of λ.
fn cross_integral_diagonal(a: f64, t: f64, lambda: f64) -> f64 {
    if lambda > 0.0 {
        let w = lambda.sqrt();
        // sin(ω(a+σ))sin(ωσ) = ½[cos(ωa) − cos(ω(a+2σ))]
        (t * (w * a).cos() - ((w * (a + 2.0 * t)).sin() - (w * a).sin()) / (2.0 * w))
            / (2.0 * lambda)
    } else {
        let w = (-lambda).sqrt();
        // sinh(ν(a+σ))sinh(νσ) = ½[cosh(ν(a+2σ)) − cosh(νa)]
        (((w * (a + 2.0 * t)).sinh() - (w * a).sinh()) / (2.0 * w) - t * (w * a).cosh())
            / (2.0 * -lambda)
    }
}

/// Gram entry ∫₀ᵀ S(σ,λ)S(σ,μ) dσ of the S-basis on (0,T).
pub fn gram_entry(t_final: f64, lambda: f64, mu: f64) -> f64 {
    cross_integral(t_final, t_final, lambda, mu)
}
