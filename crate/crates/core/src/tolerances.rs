//! Numerical tolerances and thresholds used across the crate.
//!
//! Everything data-dependent is collected here so that the verification
//! suite, the acceptance tests and the library agree on one set of numbers.

/// Relative accuracy of eigenvalue root finding.
pub const EIGENVALUE_REL: f64 = 1e-12;

/// Eigen-residual bound: ‖Aφ − λφ‖/‖φ‖ ≤ this × (‖A‖ + |λ|).
pub const EIGEN_RESIDUAL: f64 = 1e-10;

/// Σ 1/ρ_k = 1 (Parseval for the first coordinate vector).
pub const PARSEVAL: f64 = 1e-12;

/// Weighted row orthonormality of the polynomial matrix.
pub const ROW_ORTHONORMALITY: f64 = 1e-10;

/// Switch from closed forms to power series when |λ|·t² falls below this.
pub const KERNEL_SERIES: f64 = 1e-4;

/// Relative λ-separation below which divided differences use the series path.
pub const COINCIDENT_REL: f64 = 1e-4;

/// Agreement of the dynamic and spectral connecting-kernel representations.
pub const CT_KERNEL_EQUALITY: f64 = 1e-10;

/// Gram matrix vs. quadrature oracle.
pub const GRAM_VS_QUADRATURE: f64 = 1e-9;

/// Exact-path Krein round trip ‖W f₁ − d₁‖.
pub const KREIN_ROUNDTRIP: f64 = 1e-9;

/// Gram test matrix of the special controls vs. identity.
pub const SPECIAL_CONTROLS_IDENTITY: f64 = 1e-8;

/// Residual of the Krein difference system with true coefficients.
pub const KREIN_SYSTEM_RESIDUAL: f64 = 1e-9;

/// Exact-path reconstruction of {a_k, b_k}.
pub const RECONSTRUCT_EXACT: f64 = 1e-8;

/// Grid-path reconstruction, relative, at m = 4001.
pub const RECONSTRUCT_GRID_REL: f64 = 1e-3;

/// Truncated-SVD cut: keep σ > this × σ_max.
pub const SVD_RELATIVE_CUT: f64 = 1e-10;

/// Reproducing identity |(G, J_z) − G(z)|.
pub const REPRODUCING: f64 = 1e-10;

/// Control route vs. direct route for the reproducing kernel.
pub const KERNEL_ROUTES: f64 = 1e-9;

/// Constancy (relative spread) of the κ convention constants and |κ_E·κ_B − 1|.
pub const KAPPA: f64 = 1e-6;

/// de Branges axiom checks.
pub const AXIOMS: f64 = 1e-10;

/// Quadrature target for the 1/|E|²-weighted inner product.
pub const WEIGHTED_INNER_ABS: f64 = 1e-8;

/// Component-1 consistency of the response operator with the forward solution.
pub const RESPONSE_CONSISTENCY: f64 = 1e-8;

/// Agreement of the two f₁ solves (exact Gram solve vs. grid least squares).
pub const F1_UNIQUENESS: f64 = 1e-5;

/// Grid path of C^T vs. exact S-basis path, sup norm, m ≥ 2001.
pub const CT_GRID_VS_EXACT: f64 = 1e-6;
