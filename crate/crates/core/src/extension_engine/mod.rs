//! Realizations `Ã ↔ L`, shifted operators `L^λ`, M-functions and the Kreĭn
//! resolvent formula, all acting diagonally over boundary modes.
//!
//! Conventions: the `Z`-fiber basis is normalized by `γ₀z = 1`, so the
//! boundary operator `L` is represented by its multiplier `l(ξ') = c(ξ') − p⁰(ξ')`.
//! `A` is formally self-adjoint, so `K' = K` and `ν₁' = ν₁`.

mod checks;
mod krein;
mod realization;
mod symbol;

pub use checks::{diagram_check, reduced_green_check, DiagramResidual, FiberFunction, NullSolution, TrialFunction};
pub use krein::{krein_apply, krein_apply_fiber};
pub use realization::{
    cauchy_residual, dtn_difference_bound, l_symbol, m_function, shifted_l_roots, shifted_l_symbol,
    MFunctionSample, Realization,
};
pub use symbol::{BoundarySymbol, DtnTerm};
