//! Closed-form fiber operators: the Poisson fiber `k^λ`, its pairing with
//! data, and the Dirichlet resolvent through its Green's function.
//!
//! Grid data are interpolated by local quadratics and integrated exactly
//! against the exponentials of the Green's function, so the only error is the
//! `O(h³)` interpolation error of the data. All exponentials are written with
//! non-positive real exponents (`Re κ ≥ 0`), so nothing overflows for large
//! `|ξ'|`.

use super::{Discretization1D, FiberSolution, Geometry, GeometryKind, Mode, POLE_TOL};
use crate::error::{LabError, Result};
use num_complex::Complex64;

type C = Complex64;

const ONE: C = C::new(1.0, 0.0);
const ZERO: C = C::new(0.0, 0.0);

/// `m_k(z) = ∫₀¹ s^k e^{−zs} ds` for `k = 0, 1, 2`.
fn moments(z: C) -> [C; 3] {
    if z.norm() < 0.5 {
        let mut out = [ZERO; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            // Σ_j (−z)^j / (j! (j + k + 1))
            let mut term = ONE;
            let mut acc = ZERO;
            for j in 0..30 {
                acc += term / (j + k + 1) as f64;
                term *= -z / (j + 1) as f64;
            }
            *slot = acc;
        }
        out
    } else {
        let e = (-z).exp();
        let m0 = (ONE - e) / z;
        let m1 = (ONE - e * (ONE + z)) / (z * z);
        let m2 = (2.0 * ONE - e * (z * z + 2.0 * z + 2.0)) / (z * z * z);
        [m0, m1, m2]
    }
}

/// Local quadratic on cell `[x_i, x_{i+1}]` in the variable `s ∈ [0, 1]`
/// measured from the left end.
fn cell_poly(f: &[C], i: usize) -> [C; 3] {
    if i == 0 {
        let (f0, f1, f2) = (f[0], f[1], f[2]);
        [f0, (-3.0 * f0 + 4.0 * f1 - f2) / 2.0, (f0 - 2.0 * f1 + f2) / 2.0]
    } else {
        let (fm, f0, fp) = (f[i - 1], f[i], f[i + 1]);
        [f0, (fp - fm) / 2.0, (fp - 2.0 * f0 + fm) / 2.0]
    }
}

struct Sweep {
    kappa: C,
    disc: Discretization1D,
    /// `∫₀^{x_i} e^{−κ(x_i − y)} f dy`
    i1: Vec<C>,
    /// `∫₀^{x_i} e^{−κy} f dy`
    j: Vec<C>,
    /// `∫_{x_i}^{X} e^{−κ(y − x_i)} f dy`
    i3: Vec<C>,
    /// `∫_{x_i}^{X} e^{−κ(X − y)} f dy`
    k: Vec<C>,
}

impl Sweep {
    fn new(kappa: C, disc: Discretization1D, f: &[C]) -> Self {
        let n = disc.n;
        let h = disc.h();
        let m = moments(kappa * h);
        let step = (-kappa * h).exp();
        let mut left = Vec::with_capacity(n);
        let mut right = Vec::with_capacity(n);
        for i in 0..n {
            let c = cell_poly(f, i);
            let q = [c[0] + c[1] + c[2], -c[1] - 2.0 * c[2], c[2]];
            left.push((c[0] * m[0] + c[1] * m[1] + c[2] * m[2]) * h);
            right.push((q[0] * m[0] + q[1] * m[1] + q[2] * m[2]) * h);
        }
        let mut i1 = vec![ZERO; n + 1];
        let mut j = vec![ZERO; n + 1];
        for i in 0..n {
            i1[i + 1] = step * i1[i] + right[i];
            j[i + 1] = j[i] + (-kappa * disc.x(i)).exp() * left[i];
        }
        let mut i3 = vec![ZERO; n + 1];
        let mut k = vec![ZERO; n + 1];
        let len = disc.length;
        for i in (0..n).rev() {
            i3[i] = step * i3[i + 1] + left[i];
            k[i] = k[i + 1] + (-kappa * (len - disc.x(i + 1))).exp() * right[i];
        }
        Sweep { kappa, disc, i1, j, i3, k }
    }
}

/// Validates `λ` for the exact fiber formulas and returns `(κ, D)` with
/// `D = 1 − e^{−2κℓ}` (slab) or `1` (half-cylinder).
fn fiber_kappa(mode: &Mode, lambda: C, geom: &Geometry) -> Result<(C, C)> {
    let kappa = mode.kappa(lambda);
    match geom.kind {
        GeometryKind::HalfCylinder => {
            if kappa.re <= 0.0 {
                return Err(LabError::domain(&mode.xi, lambda, "lambda on the branch cut [a, inf)"));
            }
            Ok((kappa, ONE))
        }
        GeometryKind::Slab => {
            if kappa.norm() * geom.ell < 1e-6 {
                return Err(LabError::domain(&mode.xi, lambda, "kappa too close to 0 for the exponential Green's function"));
            }
            let d = ONE - (-2.0 * kappa * geom.ell).exp();
            if d.norm() < POLE_TOL {
                return Err(LabError::domain(&mode.xi, lambda, "lambda is a Dirichlet fiber eigenvalue"));
            }
            Ok((kappa, d))
        }
    }
}

fn check_grid(geom: &Geometry, disc: &Discretization1D, f: &[C]) -> Result<()> {
    if f.len() != disc.n + 1 {
        return Err(LabError::invalid(format!("grid function has {} values, grid has {} nodes", f.len(), disc.n + 1)));
    }
    if geom.is_slab() && (disc.length - geom.ell).abs() > 1e-12 * geom.ell {
        return Err(LabError::invalid("slab grid must span [0, ell]"));
    }
    Ok(())
}

/// Poisson fiber `k^λ` with `γ₀k^λ = 1` sampled on `disc`:
/// slab `sinh(κ(ℓ−x))/sinh(κℓ)`, half-cylinder `e^{−κx}`.
pub fn poisson_fiber(mode: &Mode, lambda: C, geom: &Geometry, disc: &Discretization1D) -> Result<Vec<C>> {
    let (kappa, d) = fiber_kappa(mode, lambda, geom)?;
    Ok(disc.sample(|x| match geom.kind {
        GeometryKind::HalfCylinder => (-kappa * x).exp(),
        GeometryKind::Slab => {
            let ell = geom.ell;
            if (kappa * ell).re > 10.0 {
                (-kappa * x).exp() * (ONE - (-2.0 * kappa * (ell - x)).exp()) / d
            } else {
                (kappa * (ell - x)).sinh() / (kappa * ell).sinh()
            }
        }
    }))
}

/// `∫ f · k^λ dx`, which equals `(f, k^{λ̄})` for real `a`. This is the
/// adjoint Poisson operator applied to `f` and also `ν₁(A_γ − λ)^{−1}f`.
pub fn poisson_pairing(mode: &Mode, lambda: C, geom: &Geometry, disc: &Discretization1D, f: &[C]) -> Result<C> {
    check_grid(geom, disc, f)?;
    let (kappa, d) = fiber_kappa(mode, lambda, geom)?;
    let sw = Sweep::new(kappa, *disc, f);
    Ok(pairing_from(&sw, geom, d))
}

fn pairing_from(sw: &Sweep, geom: &Geometry, d: C) -> C {
    let n = sw.disc.n;
    match geom.kind {
        GeometryKind::HalfCylinder => sw.j[n],
        GeometryKind::Slab => (sw.j[n] - (-sw.kappa * geom.ell).exp() * sw.k[0]) / d,
    }
}

/// Fiber of `(A_γ − λ)^{−1} f` from the Dirichlet Green's function of
/// `−∂² + (a − λ)`. On the half-cylinder `f` is taken to vanish beyond the
/// grid.
pub fn dirichlet_resolvent_fiber(
    mode: &Mode,
    lambda: C,
    f: &[C],
    disc: &Discretization1D,
    geom: &Geometry,
) -> Result<FiberSolution> {
    check_grid(geom, disc, f)?;
    let (kappa, d) = fiber_kappa(mode, lambda, geom)?;
    let sw = Sweep::new(kappa, *disc, f);
    let n = disc.n;
    let mut values = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = disc.x(i);
        let near = sw.i1[i] - (-kappa * x).exp() * sw.j[i];
        let v = match geom.kind {
            GeometryKind::HalfCylinder => (near + (ONE - (-2.0 * kappa * x).exp()) * sw.i3[i]) / (2.0 * kappa),
            GeometryKind::Slab => {
                let ell = geom.ell;
                let far = sw.i3[i] - (-kappa * (ell - x)).exp() * sw.k[i];
                ((ONE - (-2.0 * kappa * (ell - x)).exp()) * near + (ONE - (-2.0 * kappa * x).exp()) * far) / (2.0 * kappa * d)
            }
        };
        values.push(v);
    }
    values[0] = ZERO;
    if geom.is_slab() {
        values[n] = ZERO;
    }
    Ok(FiberSolution {
        disc: *disc,
        values,
        gamma0: ZERO,
        nu1: pairing_from(&sw, geom, d),
    })
}
