//! Numerical laboratory for realizations of `A = -Δ + m²` on flat model
//! geometries.
//!
//! The domain is either a slab `T^{n-1} × (0, ℓ)` or a half-cylinder
//! `T^{n-1} × (0, ∞)` with `2π`-periodic cross-section. Every operator in the
//! extension theory (Dirichlet realization, Poisson and Dirichlet-to-Neumann
//! operators, boundary operators `L`, `L^λ`, M-functions, Kreĭn resolvent
//! differences) is diagonal over the cross-section Fourier modes `ξ' ∈ ℤ^{n-1}`,
//! so the whole theory reduces to families of one-dimensional fiber problems
//! in the normal variable `x_n`.
//!
//! Modules:
//! - [`fiber_model`]: exact fiber solvers and an independent finite-difference oracle.
//! - [`extension_engine`]: boundary symbols, realizations, `L^λ`, M-functions,
//!   the Kreĭn formula and fiber-level consistency checks.
//! - [`spectral_asymptotics`]: singular values of resolvent differences,
//!   counting functions and power-law fits.
//! - [`lower_bounds`]: lower bounds of boundary operators and realizations.

pub mod error;
pub mod extension_engine;
pub mod fiber_model;
pub mod lattice;
pub mod lower_bounds;
pub mod spectral_asymptotics;

pub use error::{LabError, Result};

pub use fiber_model::{
    BoundaryCondition, Discretization1D, FiberSolution, Geometry, GeometryKind, GridFunction, Mode,
    ModelOperator,
};

pub use extension_engine::{BoundarySymbol, MFunctionSample, Realization};
pub use lower_bounds::{GardingReport, LowerBoundReport};
pub use spectral_asymptotics::{FitResult, SingularValueSeries};

pub use num_complex::Complex64;

