//! Numerical toolkit for the 1D Swift-Hohenberg equation coupled to a
//! conservation law,
//!
//! ```text
//! ∂_t u = -(1 + ∂_x²)² u + α u + u v - u³,
//! ∂_t v = ∂_x² v + γ ∂_x²(u²),
//! ```
//!
//! near its Turing bifurcation α = ε²α₀. The crate covers the full analysis
//! pipeline for pattern-invading fronts:
//!
//! * [`spectral`]: spatial-dynamics block matrices in the comoving frame,
//!   their exact and asymptotic eigenvalues, the O(ε)/O(ε^{1/2}) spectral-gap
//!   classification and the adjoint eigenvector pairing,
//! * [`periodic`]: bifurcating stationary periodic states (leading order plus
//!   Newton refinement of the truncated Fourier system),
//! * [`reduced`]: the three-dimensional reduced flow (Â, B̂, Ŵ₀), its fixed
//!   points, linearizations, Lyapunov function and heteroclinic shooting,
//! * [`front`]: reconstruction of modulating-front fields from a reduced
//!   trajectory,
//! * [`pde`]: pseudo-spectral time stepping of the full system and of the
//!   amplitude system, with conservation/front diagnostics.
//!
//! Shared containers live in [`params`] and [`field`]; the small dense linear
//! algebra and root-finding kernels backing the eigenvalue work live in
//! [`linalg`] and [`poly`].

pub mod error;
pub mod field;
pub mod front;
pub mod interp;
pub mod linalg;
pub mod ode;
pub mod output;
pub mod params;
pub mod pde;
pub mod periodic;
pub mod poly;
pub mod reduced;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{make_grid, FieldPair, Grid};
pub use params::ModelParams;
