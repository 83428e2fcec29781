//! Singular values of resolvent differences, counting functions and
//! power-law fits.
//!
//! For the diagonal (multiplier) differences each mode contributes one
//! rank-one block, so the series is a sort of closed-form per-mode values.
//! Iterated differences `Ã^{-N} − A_γ^{-N}` go through the finite-difference
//! fiber operators instead.

use crate::error::{LabError, Result};
use crate::extension_engine::{shifted_l_symbol, BoundarySymbol, Realization};
use crate::fiber_model::{poisson_fiber_normsq, tridiag, Geometry, Mode, ModelOperator};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Sorted s-numbers `s_1 ≥ s_2 ≥ …`, one per retained lattice mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularValueSeries {
    pub values: Vec<f64>,
    /// Mode that produced each entry of `values`.
    pub modes: Vec<Vec<i64>>,
    /// Which difference produced the series.
    pub operator: String,
    /// Lattice truncation `|ξ'| ≤ radius`.
    pub radius: f64,
    pub warnings: Vec<String>,
}

impl SingularValueSeries {
    fn from_modes(mut entries: Vec<(Vec<i64>, f64)>, operator: String, radius: f64) -> Self {
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let (modes, values) = entries.into_iter().unzip();
        SingularValueSeries {
            values,
            modes,
            operator,
            radius,
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Σ_j s_j^p`, summed from the smallest term up.
    pub fn schatten_sum(&self, p: f64) -> f64 {
        self.values.iter().rev().map(|s| s.powf(p)).sum()
    }
}

fn collect_modes<F>(op: &ModelOperator, geom: &Geometry, radius: f64, f: F) -> Result<Vec<(Vec<i64>, f64)>>
where
    F: Fn(&Mode) -> Result<f64> + Sync,
{
    op.modes(geom, radius)
        .par_iter()
        .map(|m| f(m).map(|s| (m.xi.clone(), s)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn shifted_modulus(c: &BoundarySymbol, lambda: f64, mode: &Mode, geom: &Geometry) -> Result<f64> {
    let r = Realization::new(c.clone());
    let v = shifted_l_symbol(&r, Complex64::new(lambda, 0.0)).eval(mode, geom)?.norm();
    if v < 1e-10 * mode.bracket() {
        return Err(LabError::NearEigenvalue {
            mode: mode.xi.clone(),
            lambda: lambda.to_string(),
            modulus: v,
        });
    }
    Ok(v)
}

/// s-numbers of `(Ã − λ)^{-1} − (A_γ − λ)^{-1}`: on each mode of the subset
/// the difference is `k^λ (l^λ)^{-1} ⟨·, k^λ⟩`, of norm `‖k^λ‖²/|l^λ|`.
pub fn svalues_vs_dirichlet(
    realization: &Realization,
    lambda: f64,
    radius: f64,
    geom: &Geometry,
    op: &ModelOperator,
) -> Result<SingularValueSeries> {
    let entries = collect_modes(op, geom, radius, |m| {
        if !realization.contains(&m.xi) {
            return Ok(0.0);
        }
        Ok(poisson_fiber_normsq(m, lambda, geom)? / shifted_modulus(&realization.c, lambda, m, geom)?)
    })?;
    Ok(SingularValueSeries::from_modes(
        entries,
        format!("(A~ - lambda)^-1 - (A_gamma - lambda)^-1 at lambda = {lambda}"),
        radius,
    ))
}

/// s-numbers of `(Ã₁ − λ)^{-1} − (Ã₂ − λ)^{-1}` for two Robin conditions:
/// `‖k^λ‖²·|b₂ − b₁| / (|l₁^λ|·|l₂^λ|)` per mode.
pub fn svalues_robin_pair(
    b1: f64,
    b2: f64,
    lambda: f64,
    radius: f64,
    geom: &Geometry,
    op: &ModelOperator,
) -> Result<SingularValueSeries> {
    let (c1, c2) = (BoundarySymbol::robin(b1), BoundarySymbol::robin(b2));
    let entries = collect_modes(op, geom, radius, |m| {
        if b1 == b2 {
            return Ok(0.0);
        }
        let l1 = shifted_modulus(&c1, lambda, m, geom)?;
        let l2 = shifted_modulus(&c2, lambda, m, geom)?;
        Ok(poisson_fiber_normsq(m, lambda, geom)? * (b2 - b1).abs() / (l1 * l2))
    })?;
    Ok(SingularValueSeries::from_modes(
        entries,
        format!("Robin pair b1 = {b1}, b2 = {b2} at lambda = {lambda}"),
        radius,
    ))
}

/// Largest s-number per mode of `Ã^{-N} − A_γ^{-N}` from the FD fiber
/// operators on `grid` cells (slab only, `N ≤ 3`).
pub fn svalues_iterates(
    realization: &Realization,
    power: u32,
    radius: f64,
    geom: &Geometry,
    op: &ModelOperator,
    grid: usize,
) -> Result<SingularValueSeries> {
    if !geom.is_slab() {
        return Err(LabError::invalid("iterated differences need the slab"));
    }
    if !(1..=3).contains(&power) {
        return Err(LabError::invalid(format!("iterate power {power} must be 1, 2 or 3")));
    }
    if grid < 16 {
        return Err(LabError::invalid("iterate grid needs at least 16 cells"));
    }
    let entries = collect_modes(op, geom, radius, |m| {
        if !realization.contains(&m.xi) {
            return Ok(0.0);
        }
        let c = realization.c.eval(m, geom)?;
        if c.im != 0.0 {
            return Err(LabError::invalid("iterated differences need a real boundary multiplier"));
        }
        largest_iterate_svalue(m, c.re, power, geom.ell, grid)
    })?;
    let mut series = SingularValueSeries::from_modes(
        entries,
        format!("A~^-{power} - A_gamma^-{power} (finite differences, {grid} cells)"),
        radius,
    );
    let h = geom.ell / grid as f64;
    let kh = (radius * radius + op.msq).sqrt() * h;
    if kh > 0.5 {
        series.warnings.push(format!(
            "grid under-resolves the largest modes: kappa*h = {kh:.3}, estimated relative error {:.1e}",
            kh * kh / 12.0
        ));
    }
    Ok(series)
}

/// FD fiber inverses in symmetrized coordinates `y = M^{1/2}u`,
/// `M = diag(1/2, 1, …, 1)`, where both are symmetric matrices.
struct FiberInverses {
    robin_sub: Vec<Complex64>,
    robin_diag: Vec<Complex64>,
    dir_sub: Vec<Complex64>,
    dir_diag: Vec<Complex64>,
}

impl FiberInverses {
    fn new(a: f64, c: f64, ell: f64, n: usize) -> Self {
        let h = ell / n as f64;
        let ih2 = 1.0 / (h * h);
        let mut robin_diag = vec![Complex64::new(2.0 * ih2 + a, 0.0); n];
        robin_diag[0] = Complex64::new(ih2 + c / h + a / 2.0, 0.0);
        FiberInverses {
            robin_sub: vec![Complex64::new(-ih2, 0.0); n - 1],
            robin_diag,
            dir_sub: vec![Complex64::new(-ih2, 0.0); n - 2],
            dir_diag: vec![Complex64::new(2.0 * ih2 + a, 0.0); n - 1],
        }
    }

    fn robin(&self, y: &[f64]) -> Option<Vec<f64>> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut x: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        x[0] *= s;
        let mut w: Vec<f64> = tridiag::solve(&self.robin_sub, &self.robin_diag, &self.robin_sub, &x)?
            .into_iter()
            .map(|z| z.re)
            .collect();
        w[0] *= s;
        Some(w)
    }

    fn dirichlet(&self, y: &[f64]) -> Option<Vec<f64>> {
        let x: Vec<Complex64> = y[1..].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let w = tridiag::solve(&self.dir_sub, &self.dir_diag, &self.dir_sub, &x)?;
        Some(std::iter::once(0.0).chain(w.into_iter().map(|z| z.re)).collect())
    }

    fn difference(&self, y: &[f64], power: u32) -> Option<Vec<f64>> {
        let mut r = y.to_vec();
        let mut d = y.to_vec();
        for _ in 0..power {
            r = self.robin(&r)?;
            d = self.dirichlet(&d)?;
        }
        Some(r.iter().zip(&d).map(|(a, b)| a - b).collect())
    }
}

fn mode_seed(xi: &[i64]) -> u64 {
    xi.iter().fold(0x9e37_79b9_7f4a_7c15u64, |h, &k| {
        (h ^ (k as u64)).wrapping_mul(0x0100_0000_01b3).rotate_left(17)
    })
}

/// The difference has rank at most `power + 1`, so a randomized range
/// finder with a few extra samples captures it; the compressed symmetric
/// matrix is then diagonalized.
fn largest_iterate_svalue(mode: &Mode, c: f64, power: u32, ell: f64, n: usize) -> Result<f64> {
    let inv = FiberInverses::new(mode.a, c, ell, n);
    let singular = || LabError::SingularSystem {
        mode: mode.xi.clone(),
        lambda: "0".into(),
    };
    let samples = power as usize + 5;
    let mut rng = ChaCha8Rng::seed_from_u64(mode_seed(&mode.xi));
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(samples);
    let mut max_norm: f64 = 0.0;
    for _ in 0..samples {
        let omega: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut y = inv.difference(&omega, power).ok_or_else(singular)?;
        let norm0 = dot(&y, &y).sqrt();
        max_norm = max_norm.max(norm0);
        for _ in 0..2 {
            for q in &basis {
                let p = dot(q, &y);
                y.iter_mut().zip(q).for_each(|(a, b)| *a -= p * b);
            }
        }
        let norm = dot(&y, &y).sqrt();
        if norm > 1e-10 * max_norm {
            basis.push(y.into_iter().map(|v| v / norm).collect());
        }
    }
    if basis.is_empty() {
        return Ok(0.0);
    }
    let k = basis.len();
    let images: Vec<Vec<f64>> = basis
        .iter()
        .map(|q| inv.difference(q, power).ok_or_else(singular))
        .collect::<Result<_>>()?;
    let h = DMatrix::from_fn(k, k, |i, j| 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i])));
    let eig = h.symmetric_eigen();
    Ok(eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least-squares power law `s_j ≈ C j^{exponent}` on the tail window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub exponent: f64,
    pub constant: f64,
    /// 1-based inclusive index range `[len/2, 9·len/10]` used by the fit.
    pub window: (usize, usize),
    /// `max |s_j / (C j^exponent) − 1|` over the window.
    pub residual: f64,
    /// `median(s_j · j^decay)` over the window when a decay rate was given.
    pub plateau: Option<f64>,
}

/// Fits `log s_j = log C + exponent · log j` over `j ∈ [len/2, 9·len/10]`.
/// `expected_decay` is the positive rate `p` in `s_j ~ c j^{−p}`.
pub fn weyl_fit(values: &[f64], expected_decay: Option<f64>) -> Result<FitResult> {
    let len = values.len();
    if len < 200 {
        return Err(LabError::invalid(format!("power-law fit needs at least 200 values (got {len})")));
    }
    let (start, end) = (len / 2, len * 9 / 10);
    let window: Vec<(f64, f64)> = (start..=end).map(|j| (j as f64, values[j - 1])).collect();
    if let Some((j, _)) = window.iter().find(|(_, s)| *s <= 0.0 || s.is_nan()) {
        return Err(LabError::invalid(format!("series has a non-positive value at j = {j} in the fit window")));
    }
    let pts: Vec<(f64, f64)> = window.iter().map(|(j, s)| (j.ln(), s.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let exponent = sxy / sxx;
    let constant = (my - exponent * mx).exp();
    let residual = window
        .iter()
        .map(|(j, s)| (s / (constant * j.powf(exponent)) - 1.0).abs())
        .fold(0.0, f64::max);
    let plateau = expected_decay.map(|p| {
        let mut v: Vec<f64> = window.iter().map(|(j, s)| s * j.powf(p)).collect();
        v.sort_by(f64::total_cmp);
        let k = v.len();
        if k % 2 == 1 {
            v[k / 2]
        } else {
            0.5 * (v[k / 2 - 1] + v[k / 2])
        }
    });
    Ok(FitResult {
        exponent,
        constant,
        window: (start, end),
        residual,
        plateau,
    })
}

/// `N'(t) = #{j : s_j ≥ 1/t}`.
pub fn counting_function(values: &[f64], t: f64) -> usize {
    let threshold = 1.0 / t;
    values.iter().filter(|&&s| s >= threshold).count()
}

/// Counting function of the Dirichlet realization on the slab.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletWeyl {
    /// `(t, N(t))` with `N(t) = #{λ_j ≤ t}`.
    pub table: Vec<(f64, u64)>,
    /// `c_A = vol(Ω)·ω_n/(2π)^n` with `vol(Ω) = (2π)^{n−1}ℓ`.
    pub c_a: f64,
    /// Largest `t` for which the truncated enumeration is exact.
    pub ceiling: f64,
}

/// Volume of the unit ball in `ℝ^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    // ω_n = π^{n/2} / Γ(n/2 + 1), via ω_n = 2π/n · ω_{n−2}
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Enumerates `λ_{ξ',k} = |ξ'|² + m² + (kπ/ℓ)²` for `|ξ'| ≤ radius`,
/// `1 ≤ k ≤ k_max` and counts them below each `t`.
pub fn dirichlet_weyl(
    radius: f64,
    k_max: u64,
    geom: &Geometry,
    op: &ModelOperator,
    ts: &[f64],
) -> Result<DirichletWeyl> {
    if !geom.is_slab() {
        return Err(LabError::invalid("the Dirichlet counting function needs the slab"));
    }
    let step = std::f64::consts::PI / geom.ell;
    let ceiling = (radius.floor() + 1.0).powi(2).min(((k_max + 1) as f64 * step).powi(2)) + op.msq;
    if let Some(t) = ts.iter().find(|&&t| t >= ceiling) {
        return Err(LabError::invalid(format!(
            "t = {t} is above the truncation ceiling {ceiling} (raise the lattice radius or k_max)"
        )));
    }
    let modes = op.modes(geom, radius);
    let table = ts
        .iter()
        .map(|&t| {
            let count: u64 = modes
                .iter()
                .map(|m| {
                    if t < m.a {
                        0
                    } else {
                        let mut k = ((t - m.a).sqrt() / step).floor() as u64;
                        while k > 0 && m.a + (k as f64 * step).powi(2) > t {
                            k -= 1;
                        }
                        while m.a + ((k + 1) as f64 * step).powi(2) <= t {
                            k += 1;
                        }
                        k.min(k_max)
                    }
                })
                .sum();
            (t, count)
        })
        .collect();
    let n = geom.n;
    let c_a = geom.ell * unit_ball_volume(n) / (2.0 * std::f64::consts::PI);
    Ok(DirichletWeyl { table, c_a, ceiling })
}
