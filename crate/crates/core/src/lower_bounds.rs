//! Lower bounds of numerical ranges: boundary multipliers, the `Q^μ` scan on
//! the half-cylinder, the Birman-type transfer bound and Gårding tests.

use crate::error::{LabError, Result};
use crate::extension_engine::{l_symbol, BoundarySymbol, Realization};
use crate::fiber_model::{
    fiber_eigenvalues, fiber_ground_state, poisson_fiber_normsq, BoundaryCondition, Discretization1D, Geometry,
    Mode, ModelOperator,
};
use num_complex::Complex64;
use rayon::prelude::*;

/// `inf_{|ξ'| ≤ R} Re l(ξ')·⟨ξ'⟩` and its first minimizing mode in lattice
/// order: the lower bound of `l` in the fixed `H^{-1/2}` norm.
pub fn lower_bound_symbol(
    l: &BoundarySymbol,
    geom: &Geometry,
    op: &ModelOperator,
    radius: f64,
) -> Result<(f64, Vec<i64>)> {
    let values: Vec<f64> = op
        .modes(geom, radius)
        .par_iter()
        .map(|m| l.eval(m, geom).map(|v| v.re * m.bracket()))
        .collect::<Result<_>>()?;
    let modes = op.modes(geom, radius);
    let (k, v) = argmin(&values).ok_or_else(|| LabError::invalid("empty lattice"))?;
    Ok((v, modes[k].xi.clone()))
}

fn argmin(values: &[f64]) -> Option<(usize, f64)> {
    values
        .iter()
        .copied()
        .enumerate()
        .fold(None, |best, (k, v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((k, v)),
        })
}

/// One row of [`q_mu_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct QMuRow {
    pub mu: f64,
    /// `m_{-1/2}(Q^μ) = inf q(ξ')⟨ξ'⟩` over the truncated lattice.
    pub bound: f64,
    pub minimizer: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QMuScan {
    /// Rows sorted by decreasing `μ`.
    pub rows: Vec<QMuRow>,
    /// Whether the bound strictly increases as `μ` decreases.
    pub monotone: bool,
    pub warnings: Vec<String>,
}

/// Lower bounds of `Q^μ = P⁰ − P^μ` for each `μ < 0`.
pub fn q_mu_scan(mus: &[f64], geom: &Geometry, op: &ModelOperator, radius: f64) -> Result<QMuScan> {
    if let Some(mu) = mus.iter().find(|&&mu| mu >= 0.0 || mu.is_nan()) {
        return Err(LabError::invalid(format!("q_mu_scan needs mu < 0 (got {mu})")));
    }
    let mut sorted = mus.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let zero = Complex64::new(0.0, 0.0);
    let rows: Vec<QMuRow> = sorted
        .par_iter()
        .map(|&mu| {
            let q = BoundarySymbol::robin(0.0)
                .plus_dtn(1.0, zero)
                .plus_dtn(-1.0, Complex64::new(mu, 0.0));
            let (bound, minimizer) = lower_bound_symbol(&q, geom, op, radius)?;
            Ok(QMuRow { mu, bound, minimizer })
        })
        .collect::<Result<_>>()?;
    let monotone = rows.windows(2).all(|w| w[1].bound > w[0].bound);
    let edge = radius.floor() - 1.0;
    let warnings = rows
        .iter()
        .filter(|r| crate::lattice::norm_sq(&r.minimizer).sqrt() > edge)
        .map(|r| format!("mu = {}: minimizer {:?} sits at the lattice edge (raise R)", r.mu, r.minimizer))
        .collect();
    Ok(QMuScan { rows, monotone, warnings })
}

/// Outcome of [`birman_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    /// Lowest Dirichlet fiber eigenvalue (Richardson-refined FD).
    pub m_a_gamma: f64,
    /// `inf Re l·⟨ξ'⟩` over the subset modes (fixed `H^{-1/2}` norm).
    pub m_l_minus_half: f64,
    /// `inf Re l/‖k⁰‖²` over the subset modes: the lower bound of `T` on
    /// `Z = ker A_max` with the `L²(Ω)` norm; `+∞` for an empty subset.
    pub m_t: f64,
    /// Minimum over `|ξ'| ≤ R` of the Richardson-refined FD ground states of `Ã`.
    pub m_realization: f64,
    /// `m(T)m(A_γ)/(m(T) + m(A_γ))`, `None` when `m(T) ≤ −m(A_γ)`.
    pub birman_bound: Option<f64>,
    /// `m_realization − birman_bound`.
    pub margin: Option<f64>,
    /// Largest `|λ_h − λ_Richardson|` among the ground states used.
    pub discretization_error: f64,
    /// `Some(true)` when the bound holds within the discretization error.
    pub holds: Option<bool>,
    pub radius: f64,
    pub trial_space: String,
}

fn refined_ground(mode: &Mode, bc: BoundaryCondition, disc: &Discretization1D, geom: &Geometry) -> Result<(f64, f64)> {
    let fine = fiber_eigenvalues(mode, bc, disc, geom, 1)?[0];
    let coarse = fiber_eigenvalues(mode, bc, &disc.coarsened()?, geom, 1)?[0];
    let refined = (4.0 * fine - coarse) / 3.0;
    Ok((refined, (fine - refined).abs()))
}

/// Checks `m(Ã) ≥ m(T)m(A_γ)/(m(T) + m(A_γ))` on the slab for a realization
/// with a real boundary multiplier, using `cells` FD cells per fiber.
pub fn birman_check(
    realization: &Realization,
    geom: &Geometry,
    op: &ModelOperator,
    radius: f64,
    cells: usize,
) -> Result<LowerBoundReport> {
    if !geom.is_slab() {
        return Err(LabError::invalid("birman_check needs the slab"));
    }
    let disc = Discretization1D::new(cells, geom.ell)?;
    let l = l_symbol(realization);
    let modes = op.modes(geom, radius);
    struct PerMode {
        ground: f64,
        error: f64,
        l_half: f64,
        t: f64,
    }
    let per_mode: Vec<PerMode> = modes
        .par_iter()
        .map(|m| {
            if !realization.contains(&m.xi) {
                let (ground, error) = refined_ground(m, BoundaryCondition::Dirichlet, &disc, geom)?;
                return Ok(PerMode {
                    ground,
                    error,
                    l_half: f64::INFINITY,
                    t: f64::INFINITY,
                });
            }
            let c = realization.c.eval(m, geom)?;
            if c.im != 0.0 {
                return Err(LabError::invalid("birman_check needs a real boundary multiplier"));
            }
            let (ground, error) = refined_ground(m, BoundaryCondition::Robin(c.re), &disc, geom)?;
            let lv = l.eval(m, geom)?.re;
            Ok(PerMode {
                ground,
                error,
                l_half: lv * m.bracket(),
                t: lv / poisson_fiber_normsq(m, 0.0, geom)?,
            })
        })
        .collect::<Result<_>>()?;
    let lowest = modes
        .iter()
        .min_by(|a, b| a.a.total_cmp(&b.a))
        .ok_or_else(|| LabError::invalid("empty lattice"))?;
    let (m_a_gamma, dir_error) = refined_ground(lowest, BoundaryCondition::Dirichlet, &disc, geom)?;
    let fold_min = |f: fn(&PerMode) -> f64| per_mode.iter().map(f).fold(f64::INFINITY, f64::min);
    let m_realization = fold_min(|p| p.ground);
    let m_t = fold_min(|p| p.t);
    let m_l_minus_half = fold_min(|p| p.l_half);
    let discretization_error = per_mode.iter().map(|p| p.error).fold(dir_error, f64::max);
    let birman_bound = if m_t == f64::INFINITY {
        Some(m_a_gamma)
    } else if m_t > -m_a_gamma {
        Some(m_t * m_a_gamma / (m_t + m_a_gamma))
    } else {
        None
    };
    let margin = birman_bound.map(|b| m_realization - b);
    Ok(LowerBoundReport {
        m_a_gamma,
        m_l_minus_half,
        m_t,
        m_realization,
        birman_bound,
        margin,
        discretization_error,
        holds: margin.map(|g| g >= -discretization_error),
        radius,
        trial_space: format!(
            "FD fiber ground states, {cells} cells on [0, {}], Richardson-refined, |xi'| <= {radius}",
            geom.ell
        ),
    })
}

/// Sizes for [`garding_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GardingOptions {
    /// Lattice radius for the symbol test.
    pub symbol_radius: f64,
    /// Lattice radius for the form test.
    pub form_radius: f64,
    /// FD cells per unit length per unit of `form_radius`.
    pub cells_per_unit: f64,
}

impl Default for GardingOptions {
    fn default() -> Self {
        GardingOptions {
            symbol_radius: 1000.0,
            form_radius: 64.0,
            cells_per_unit: 40.0,
        }
    }
}

/// Result of one of the two Gårding tests, on a sampled ratio `ρ(ξ')`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellTest {
    pub holds: bool,
    /// Constant of the lower estimate (half the outer-shell minimum of `ρ`).
    pub c: f64,
    /// Smallest `k ≥ 0` making the estimate hold on every sampled mode.
    pub k: f64,
    /// Outer-shell minimizer of `ρ`, reported when the test fails.
    pub witness: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GardingReport {
    /// `Re l ≥ c'⟨ξ'⟩ − k'`.
    pub symbol: ShellTest,
    /// `Re(Ãu, u) ≥ c‖u‖₁² − k‖u‖₀²` on the FD ground states.
    pub form: ShellTest,
}

impl GardingReport {
    pub fn agree(&self) -> bool {
        self.symbol.holds == self.form.holds
    }
}

const RHO_FLOOR: f64 = 1e-5;

/// Shell test on `ρ = value/weight`: the estimate `value ≥ c·weight − k` with
/// `c > 0` holds when `ρ` on `R/2 < |ξ'| ≤ R` stays positive and does not
/// drop below 0.7 times its minimum on `R/4 < |ξ'| ≤ R/2`.
fn shell_test(samples: &[(Vec<i64>, f64, f64)], radius: f64) -> ShellTest {
    let shell_min = |lo: f64, hi: f64| {
        samples
            .iter()
            .filter(|(xi, _, _)| {
                let r = crate::lattice::norm_sq(xi).sqrt();
                r > lo && r <= hi
            })
            .map(|(xi, v, w)| (xi, v / w))
            .fold(None::<(&Vec<i64>, f64)>, |best, (xi, rho)| match best {
                Some((_, b)) if b <= rho => best,
                _ => Some((xi, rho)),
            })
    };
    let outer = shell_min(radius / 2.0, radius);
    let inner = shell_min(radius / 4.0, radius / 2.0);
    let (witness, outer_min) = match outer {
        Some((xi, v)) => (xi.clone(), v),
        None => {
            return ShellTest {
                holds: false,
                c: 0.0,
                k: 0.0,
                witness: None,
            }
        }
    };
    let inner_min = inner.map_or(outer_min, |(_, v)| v);
    let holds = outer_min > RHO_FLOOR && outer_min >= 0.7 * inner_min;
    let c = if holds { 0.5 * outer_min } else { 0.0 };
    let k = samples.iter().map(|(_, v, w)| c * w - v).fold(0.0, f64::max);
    ShellTest {
        holds,
        c,
        k,
        witness: (!holds).then_some(witness),
    }
}

/// Tests whether the multiplier `L` is elliptic of order one (symbol test)
/// and whether `Ã`, defined by `ν₁u = (L + P⁰)γ₀u`, satisfies a Gårding
/// inequality on its per-mode FD ground states (form test, Richardson-refined
/// eigenvalues). Slab only.
pub fn garding_check(
    l: &BoundarySymbol,
    geom: &Geometry,
    op: &ModelOperator,
    options: GardingOptions,
) -> Result<GardingReport> {
    if !geom.is_slab() {
        return Err(LabError::invalid("garding_check needs the slab"));
    }
    let symbol_samples: Vec<(Vec<i64>, f64, f64)> = op
        .modes(geom, options.symbol_radius)
        .par_iter()
        .map(|m| Ok((m.xi.clone(), l.eval(m, geom)?.re, m.bracket())))
        .collect::<Result<_>>()?;
    let c = l.clone().dtn_plus();
    let cells = ((options.cells_per_unit * options.form_radius.max(1.0) * geom.ell).ceil() as usize).max(200);
    let disc = Discretization1D::new(cells, geom.ell)?;
    let h = disc.h();
    let form_samples: Vec<(Vec<i64>, f64, f64)> = op
        .modes(geom, options.form_radius)
        .par_iter()
        .map(|m| {
            let cv = c.eval(m, geom)?;
            if cv.im != 0.0 {
                return Err(LabError::invalid("garding_check needs a real boundary multiplier"));
            }
            let bc = BoundaryCondition::Robin(cv.re);
            let (mu_fine, u) = fiber_ground_state(m, bc, &disc)?;
            let mu_coarse = fiber_eigenvalues(m, bc, &disc.coarsened()?, geom, 1)?[0];
            let mu = (4.0 * mu_fine - mu_coarse) / 3.0;
            let grad: f64 = u.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / h;
            // ‖u‖₀ = 1, ‖u‖₁² = ‖u'‖² + ⟨ξ'⟩²‖u‖²
            Ok((m.xi.clone(), mu, grad + m.bracket().powi(2)))
        })
        .collect::<Result<_>>()?;
    Ok(GardingReport {
        symbol: shell_test(&symbol_samples, options.symbol_radius),
        form: shell_test(&form_samples, options.form_radius),
    })
}

/// The symbol suite used by the Gårding experiments: elliptic and
/// non-elliptic multipliers `L`, with a label for each.
pub fn garding_suite() -> Vec<(String, BoundarySymbol)> {
    let zero = Complex64::new(0.0, 0.0);
    let mut suite = Vec::new();
    for b in [-5.0, -1.0, 0.0, 1.0, 2.0, 10.0] {
        // Robin b: L = b − P⁰
        suite.push((format!("robin b={b}"), BoundarySymbol::robin(b).plus_dtn(-1.0, zero)));
    }
    for (c0, c1) in [(0.0, -3.0), (0.0, -2.0), (0.0, -0.5), (0.0, 0.5), (0.0, 1.0), (1.0, -1.0)] {
        suite.push((
            format!("C = {c0} + {c1}<xi>"),
            BoundarySymbol::PolynomialInBracket(vec![c0, c1]).plus_dtn(-1.0, zero),
        ));
    }
    for (c0, c1) in [(0.0, 1.0), (0.0, -1.0), (0.0, 2.0), (1.0, 0.0), (-3.0, 0.0), (-2.0, 0.5), (0.0, 0.0)] {
        suite.push((format!("L = {c0} + {c1}<xi>"), BoundarySymbol::PolynomialInBracket(vec![c0, c1])));
    }
    suite.push((
        "C = P^-10 + <xi>".into(),
        BoundarySymbol::PolynomialInBracket(vec![0.0, 1.0])
            .plus_dtn(1.0, Complex64::new(-10.0, 0.0))
            .plus_dtn(-1.0, zero),
    ));
    suite
}
