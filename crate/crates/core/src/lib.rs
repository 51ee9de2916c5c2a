//! Boundary-control dynamics for finite Jacobi matrices.
//!
//! The crate builds, end to end, the discrete dynamical system attached to a
//! symmetric tridiagonal matrix with positive off-diagonal entries:
//!
//! - spectral data {λ_k, ρ_k} of the matrix via the three-term-recurrence
//!   polynomials ([`jacobi`]);
//! - the forward problem, response function and control operator driven by
//!   the sin/sinh wave kernel ([`wave`], [`kernel`]);
//! - the connecting operator C^T in its spectral and data-driven forms
//!   ([`connecting`]);
//! - Krein control equations, special controls and inverse reconstruction of
//!   the matrix from response samples ([`krein`]);
//! - the space of Fourier images of reachable states with its reproducing
//!   kernel and Hermite–Biehler structure function, plus numerical
//!   verification of the de Branges axioms ([`debranges`]).
//!
//! Grid kernels fan out over rayon when the `parallel` feature (default) is
//! enabled; disabling it gives a sequential build with bit-identical output.

pub mod connecting;
pub mod dd;
pub mod debranges;
pub mod error;
pub mod grid;
pub mod io;
pub mod jacobi;
pub mod kernel;
pub mod krein;
mod par;
pub mod quadrature;
pub mod tolerances;
pub mod verification;
pub mod wave;

pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use jacobi::{JacobiMatrix, SpectralData};
