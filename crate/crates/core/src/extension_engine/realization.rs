use super::symbol::BoundarySymbol;
use crate::error::{LabError, Result};
use crate::fiber_model::{dtn_symbol, Geometry, Mode, ModelOperator};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

/// Realization `Ã` defined by the Neumann-type condition `ν₁u = Cγ₀u` on the
/// modes of `mode_subset` (all modes when `None`) and by the Dirichlet
/// condition on the remaining modes.
///
/// The subset realizes `X = Y = span{e^{iξ'·x'} : ξ' ∈ S}`; the boundary
/// operator is then `L = C − P⁰` restricted to `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub c: BoundarySymbol,
    pub mode_subset: Option<BTreeSet<Vec<i64>>>,
}

impl Realization {
    pub fn new(c: BoundarySymbol) -> Self {
        Realization { c, mode_subset: None }
    }

    pub fn robin(b: f64) -> Self {
        Self::new(BoundarySymbol::robin(b))
    }

    pub fn with_subset(mut self, subset: impl IntoIterator<Item = Vec<i64>>) -> Self {
        self.mode_subset = Some(subset.into_iter().collect());
        self
    }

    pub fn contains(&self, xi: &[i64]) -> bool {
        self.mode_subset.as_ref().is_none_or(|s| s.contains(xi))
    }

    /// Whether `D(Ã)` is `H²`-regular: total subset and `C − P⁰` elliptic of
    /// order one.
    pub fn is_elliptic(&self) -> bool {
        self.mode_subset.is_none() && l_symbol(self).principal_coefficient().is_some_and(|g| g != 0.0)
    }
}

/// `L = C − P⁰`.
pub fn l_symbol(realization: &Realization) -> BoundarySymbol {
    realization.c.clone().plus_dtn(-1.0, Complex64::new(0.0, 0.0))
}

/// `L^λ = L + P⁰ − P^λ = C − P^λ`.
pub fn shifted_l_symbol(realization: &Realization, lambda: Complex64) -> BoundarySymbol {
    realization.c.clone().plus_dtn(-1.0, lambda)
}

/// `sup_{|ξ'| ≤ R} |p⁰ − p^λ|·⟨ξ'⟩` and the mode attaining it; finite because
/// `P⁰ − P^λ` maps `H^{-1/2}` boundedly into `H^{1/2}`.
pub fn dtn_difference_bound(
    lambda: Complex64,
    geom: &Geometry,
    op: &ModelOperator,
    radius: f64,
) -> Result<(f64, Vec<i64>)> {
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for mode in op.modes(geom, radius) {
        let q = dtn_symbol(&mode, Complex64::new(0.0, 0.0), geom)? - dtn_symbol(&mode, lambda, geom)?;
        let v = q.norm() * mode.bracket();
        if v > best.0 {
            best = (v, mode.xi.clone());
        }
    }
    Ok(best)
}

/// Near-pole threshold for `|l^λ(ξ')|`.
pub(crate) fn pole_tolerance(mode: &Mode) -> f64 {
    1e-10 * mode.bracket()
}

/// `l^λ(ξ')` for a mode of the subset, failing near eigenvalues of `Ã`.
pub(crate) fn checked_shifted_value(
    realization: &Realization,
    lambda: Complex64,
    mode: &Mode,
    geom: &Geometry,
) -> Result<Complex64> {
    let v = shifted_l_symbol(realization, lambda).eval(mode, geom)?;
    if v.norm() < pole_tolerance(mode) {
        return Err(LabError::NearEigenvalue {
            mode: mode.xi.clone(),
            lambda: lambda.to_string(),
            modulus: v.norm(),
        });
    }
    Ok(v)
}

/// Per-mode samples of the M-function `M_L(λ) = −(L^λ)^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MFunctionSample {
    pub lambda: Complex64,
    pub values: BTreeMap<Vec<i64>, Complex64>,
}

/// `M_L(λ)` on the subset modes with `|ξ'| ≤ radius`. A mode where `L^λ` is
/// (numerically) singular is reported as an eigenvalue of `Ã`.
pub fn m_function(
    realization: &Realization,
    lambda: Complex64,
    radius: f64,
    geom: &Geometry,
    op: &ModelOperator,
) -> Result<MFunctionSample> {
    let modes: Vec<Mode> = op
        .modes(geom, radius)
        .into_iter()
        .filter(|m| realization.contains(&m.xi))
        .collect();
    let values: Vec<Result<(Vec<i64>, Complex64)>> = modes
        .par_iter()
        .map(|m| checked_shifted_value(realization, lambda, m, geom).map(|l| (m.xi.clone(), -1.0 / l)))
        .collect();
    Ok(MFunctionSample {
        lambda,
        values: values.into_iter().collect::<Result<_>>()?,
    })
}

/// Holomorphy proxy: the largest deviation over modes between `M(λ₀)` and the
/// trapezoidal Cauchy mean of `M` over `points` nodes on `|λ − λ₀| = r`.
pub fn cauchy_residual(
    realization: &Realization,
    center: Complex64,
    r: f64,
    points: usize,
    radius: f64,
    geom: &Geometry,
    op: &ModelOperator,
) -> Result<f64> {
    let at_center = m_function(realization, center, radius, geom, op)?;
    let mut mean: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
    for k in 0..points {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / points as f64;
        let lam = center + Complex64::from_polar(r, theta);
        for (xi, v) in m_function(realization, lam, radius, geom, op)?.values {
            *mean.entry(xi).or_default() += v / points as f64;
        }
    }
    Ok(at_center
        .values
        .iter()
        .map(|(xi, v)| (v - mean[xi]).norm())
        .fold(0.0, f64::max))
}

/// Real roots of `λ ↦ l^λ(ξ')` in `(lo, hi)`, located by a sign scan on
/// `samples` points and refined by bisection. Sign changes across poles of the
/// DtN symbol are discarded.
pub fn shifted_l_roots(
    realization: &Realization,
    mode: &Mode,
    geom: &Geometry,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<Vec<f64>> {
    let sym = |lam: f64| -> Option<f64> {
        shifted_l_symbol(realization, Complex64::new(lam, 0.0))
            .eval(mode, geom)
            .ok()
            .map(|v| v.re)
    };
    let mut roots = Vec::new();
    let step = (hi - lo) / samples as f64;
    let mut prev: Option<(f64, f64)> = None;
    for k in 1..samples {
        let x = lo + k as f64 * step;
        let Some(v) = sym(x) else {
            prev = None;
            continue;
        };
        if v == 0.0 {
            roots.push(x);
        } else if let Some((px, pv)) = prev {
            if pv * v < 0.0 {
                let (mut a, mut b, mut fa) = (px, x, pv);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    match sym(m) {
                        Some(fm) if fm * fa > 0.0 => {
                            a = m;
                            fa = fm;
                        }
                        Some(_) => b = m,
                        None => break,
                    }
                }
                let root = 0.5 * (a + b);
                // a genuine zero, not a jump across a pole
                if sym(root).is_some_and(|f| f.abs() < 1e-6 * (1.0 + pv.abs().min(v.abs()))) {
                    roots.push(root);
                }
            }
        }
        prev = Some((x, v));
    }
    Ok(roots)
}
