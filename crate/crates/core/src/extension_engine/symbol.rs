use crate::error::{LabError, Result};
use crate::fiber_model::{dtn_symbol, Geometry, Mode};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// One Dirichlet-to-Neumann term `weight · p^λ` of a [`BoundarySymbol`].
#[derive(Debug, Clone, PartialEq)]
pub struct DtnTerm {
    pub weight: f64,
    pub lambda: Complex64,
}

/// A Fourier multiplier `ξ' ↦ c(ξ')` on the boundary, diagonal over modes.
///
/// Multipliers are closed under adding multiples of `p^λ`, which is how
/// `L = C − P⁰`, `L^λ = C − P^λ` and `Q^μ = P⁰ − P^μ` are represented.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySymbol {
    /// The constant `b` (order 0).
    RobinConstant(f64),
    /// `Σ_k c_k ⟨ξ'⟩^k` with at most a linear term.
    PolynomialInBracket(Vec<f64>),
    /// Explicit per-mode values with a declared order.
    Tabulated {
        values: BTreeMap<Vec<i64>, Complex64>,
        order: i32,
    },
    /// `base + Σ weight · p^λ`.
    DtnCombination {
        base: Box<BoundarySymbol>,
        terms: Vec<DtnTerm>,
    },
}

impl BoundarySymbol {
    pub fn robin(b: f64) -> Self {
        BoundarySymbol::RobinConstant(b)
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() > 2 {
            return Err(LabError::invalid("polynomial boundary symbols are limited to order <= 1"));
        }
        Ok(BoundarySymbol::PolynomialInBracket(coefficients))
    }

    pub fn tabulated(values: BTreeMap<Vec<i64>, Complex64>, order: i32) -> Result<Self> {
        if order > 1 {
            return Err(LabError::invalid("boundary symbols are limited to order <= 1"));
        }
        Ok(BoundarySymbol::Tabulated { values, order })
    }

    /// `p⁰ + self`, e.g. `C = P⁰ + ⟨ξ'⟩` for which `L = ⟨ξ'⟩`.
    pub fn dtn_plus(self) -> Self {
        self.plus_dtn(1.0, Complex64::new(0.0, 0.0))
    }

    /// `self + weight · p^λ`, merged with existing terms at the same `λ`.
    pub fn plus_dtn(self, weight: f64, lambda: Complex64) -> Self {
        let (base, mut terms) = match self {
            BoundarySymbol::DtnCombination { base, terms } => (base, terms),
            other => (Box::new(other), Vec::new()),
        };
        match terms.iter_mut().find(|t| t.lambda == lambda) {
            Some(t) => t.weight += weight,
            None => terms.push(DtnTerm { weight, lambda }),
        }
        terms.retain(|t| t.weight != 0.0);
        if terms.is_empty() {
            *base
        } else {
            BoundarySymbol::DtnCombination { base, terms }
        }
    }

    pub fn eval(&self, mode: &Mode, geom: &Geometry) -> Result<Complex64> {
        match self {
            BoundarySymbol::RobinConstant(b) => Ok(Complex64::new(*b, 0.0)),
            BoundarySymbol::PolynomialInBracket(c) => {
                let br = mode.bracket();
                Ok(Complex64::new(c.iter().rev().fold(0.0, |acc, ck| acc * br + ck), 0.0))
            }
            BoundarySymbol::Tabulated { values, .. } => values
                .get(&mode.xi)
                .copied()
                .ok_or_else(|| LabError::invalid(format!("tabulated symbol has no value for mode {:?}", mode.xi))),
            BoundarySymbol::DtnCombination { base, terms } => {
                let mut v = base.eval(mode, geom)?;
                for t in terms {
                    v += t.weight * dtn_symbol(mode, t.lambda, geom)?;
                }
                Ok(v)
            }
        }
    }

    /// Coefficient `γ` with `symbol = γ⟨ξ'⟩ + o(⟨ξ'⟩)`; `None` for tabulated
    /// symbols, whose asymptotics are unknown.
    pub fn principal_coefficient(&self) -> Option<f64> {
        match self {
            BoundarySymbol::RobinConstant(_) => Some(0.0),
            BoundarySymbol::PolynomialInBracket(c) => Some(c.get(1).copied().unwrap_or(0.0)),
            BoundarySymbol::Tabulated { order, .. } => (*order < 1).then_some(0.0),
            // p^λ = −|ξ'| + O(1)
            BoundarySymbol::DtnCombination { base, terms } => {
                base.principal_coefficient().map(|b| b - terms.iter().map(|t| t.weight).sum::<f64>())
            }
        }
    }

    /// Order tag.
    pub fn order(&self) -> i32 {
        match self {
            BoundarySymbol::RobinConstant(_) => 0,
            BoundarySymbol::PolynomialInBracket(c) => c.len().saturating_sub(1) as i32,
            BoundarySymbol::Tabulated { order, .. } => *order,
            BoundarySymbol::DtnCombination { base, terms } => {
                if self.principal_coefficient().is_some_and(|g| g != 0.0) {
                    return 1;
                }
                let base_is_zero = matches!(**base, BoundarySymbol::RobinConstant(b) if b == 0.0);
                // a weight-balanced combination of DtN symbols is of order −1
                let dtn_order = if terms.iter().map(|t| t.weight).sum::<f64>() == 0.0 { -1 } else { 1 };
                if base_is_zero {
                    dtn_order
                } else {
                    base.order().min(0).max(dtn_order)
                }
            }
        }
    }
}
