//! Per-mode (fiber) solvers.
//!
//! On the mode `ξ'` the operator `A − λ` becomes `−∂² + (a − λ)` in the normal
//! variable `x ∈ (0, ℓ)` (slab) or `x ∈ (0, ∞)` (half-cylinder), with
//! `a = |ξ'|² + m²`. The slab always carries a homogeneous Dirichlet condition
//! at `x = ℓ`, so the boundary `Σ` is the single face `x = 0`.
//!
//! Boundary data at `x = 0` are `γ₀u = u(0)` and `ν₁u = +u'(0)`, the
//! derivative pointing into the domain. With this orientation the fiber
//! Green's formula reads
//! `(Au, v) − (u, Av) = ν₁u·conj(γ₀v) − γ₀u·conj(ν₁v)`.

mod exact;
mod oracle;
pub(crate) mod tridiag;

pub use exact::{dirichlet_resolvent_fiber, poisson_fiber, poisson_pairing};
pub use oracle::{
    fd_apply, fiber_eigenvalues, fiber_eigenvalues_in, fiber_ground_state, oracle_solve,
    oracle_solve_richardson, richardson_eigenvalues_in,
};

use crate::error::{LabError, Result};
use crate::lattice;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    Slab,
    HalfCylinder,
}

/// Domain `T^{n-1} × (0, ℓ)` or `T^{n-1} × (0, ∞)`, cross-section periods `2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub kind: GeometryKind,
    pub n: usize,
    /// Slab thickness; ignored for the half-cylinder.
    pub ell: f64,
}

impl Geometry {
    pub fn slab(n: usize, ell: f64) -> Result<Self> {
        let g = Geometry {
            kind: GeometryKind::Slab,
            n,
            ell,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn half_cylinder(n: usize) -> Result<Self> {
        let g = Geometry {
            kind: GeometryKind::HalfCylinder,
            n,
            ell: f64::INFINITY,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(LabError::invalid(format!("dimension n = {} must be >= 2", self.n)));
        }
        if self.kind == GeometryKind::Slab && !(self.ell > 0.0 && self.ell.is_finite()) {
            return Err(LabError::invalid(format!("slab length {} must be positive", self.ell)));
        }
        Ok(())
    }

    /// Dimension of the cross-section lattice, `n − 1`.
    pub fn boundary_dim(&self) -> usize {
        self.n - 1
    }

    pub fn is_slab(&self) -> bool {
        self.kind == GeometryKind::Slab
    }
}

/// The constant-coefficient operator `A = −Δ + m²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOperator {
    pub msq: f64,
}

impl ModelOperator {
    pub fn new(msq: f64) -> Result<Self> {
        if !(msq > 0.0 && msq.is_finite()) {
            return Err(LabError::invalid(format!("mass m^2 = {msq} must be positive")));
        }
        Ok(ModelOperator { msq })
    }

    pub fn mode(&self, xi: Vec<i64>) -> Mode {
        Mode::new(xi, self.msq)
    }

    /// All lattice modes with `|ξ'| ≤ radius`, lexicographically ordered.
    pub fn modes(&self, geom: &Geometry, radius: f64) -> Vec<Mode> {
        lattice::lattice_points(geom.boundary_dim(), radius)
            .into_iter()
            .map(|xi| self.mode(xi))
            .collect()
    }
}

/// A cross-section frequency `ξ'` together with `a = |ξ'|² + m²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub xi: Vec<i64>,
    pub a: f64,
}

impl Mode {
    pub fn new(xi: Vec<i64>, msq: f64) -> Self {
        let a = lattice::norm_sq(&xi) + msq;
        Mode { xi, a }
    }

    /// Principal square root of `a − λ`; `Re κ ≥ 0`.
    pub fn kappa(&self, lambda: Complex64) -> Complex64 {
        (Complex64::new(self.a, 0.0) - lambda).sqrt()
    }

    /// `⟨ξ'⟩ = (1 + |ξ'|²)^{1/2}`.
    pub fn bracket(&self) -> f64 {
        lattice::bracket(&self.xi)
    }

    pub fn modulus(&self) -> f64 {
        lattice::norm_sq(&self.xi).sqrt()
    }
}

/// Uniform grid `x_i = i·h`, `i = 0..=n`, on `[0, length]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization1D {
    pub n: usize,
    pub length: f64,
}

impl Discretization1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 2 || !(length > 0.0 && length.is_finite()) {
            return Err(LabError::invalid(format!(
                "grid needs n >= 2 and positive finite length (got n = {n}, length = {length})"
            )));
        }
        Ok(Discretization1D { n, length })
    }

    /// Grid for one fiber: `[0, ℓ]` on the slab, `[0, X_cut]` on the
    /// half-cylinder with `X_cut = max(10 / Re κ, 10)`.
    pub fn for_fiber(geom: &Geometry, mode: &Mode, lambda: Complex64, n: usize) -> Result<Self> {
        match geom.kind {
            GeometryKind::Slab => Self::new(n, geom.ell),
            GeometryKind::HalfCylinder => {
                let re = mode.kappa(lambda).re;
                if re <= 0.0 {
                    return Err(LabError::domain(&mode.xi, lambda, "no decay on the half-cylinder (Re kappa = 0)"));
                }
                Self::new(n, (10.0 / re).max(10.0))
            }
        }
    }

    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.x(i)).collect()
    }

    /// The grid with every other node, `n / 2` cells.
    pub fn coarsened(&self) -> Result<Self> {
        if !self.n.is_multiple_of(2) {
            return Err(LabError::invalid("Richardson coarsening needs an even cell count"));
        }
        Self::new(self.n / 2, self.length)
    }

    pub fn sample(&self, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        (0..=self.n).map(|i| f(self.x(i))).collect()
    }

    /// Composite Simpson (even `n`) or trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.h();
        let n = self.n;
        let mut w = vec![0.0; n + 1];
        if n.is_multiple_of(2) {
            for (i, wi) in w.iter_mut().enumerate() {
                *wi = if i == 0 || i == n {
                    h / 3.0
                } else if i % 2 == 1 {
                    4.0 * h / 3.0
                } else {
                    2.0 * h / 3.0
                };
            }
        } else {
            for (i, wi) in w.iter_mut().enumerate() {
                *wi = if i == 0 || i == n { h / 2.0 } else { h };
            }
        }
        w
    }

    /// `∫ u · conj(v) dx` by the grid quadrature.
    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        self.weights()
            .iter()
            .zip(u.iter().zip(v))
            .map(|(w, (a, b))| a * b.conj() * *w)
            .sum()
    }

    pub fn norm(&self, u: &[Complex64]) -> f64 {
        self.inner(u, u).re.max(0.0).sqrt()
    }
}

/// Fiber data sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub disc: Discretization1D,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn sample(disc: Discretization1D, f: impl Fn(f64) -> Complex64) -> Self {
        GridFunction {
            values: disc.sample(f),
            disc,
        }
    }
}

/// Boundary condition at `x = 0` for the oracle: `ν₁u = c·γ₀u + g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// `γ₀u = g`.
    Dirichlet,
    /// `ν₁u = b·γ₀u + g`, real `b`.
    Robin(f64),
    /// `ν₁u = c·γ₀u + g`, `c` the value of a boundary multiplier on this mode.
    NeumannType(Complex64),
}

impl BoundaryCondition {
    pub(crate) fn coefficient(&self) -> Option<Complex64> {
        match *self {
            BoundaryCondition::Dirichlet => None,
            BoundaryCondition::Robin(b) => Some(Complex64::new(b, 0.0)),
            BoundaryCondition::NeumannType(c) => Some(c),
        }
    }
}

/// A fiber function on a grid together with its boundary data at `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSolution {
    pub disc: Discretization1D,
    pub values: Vec<Complex64>,
    pub gamma0: Complex64,
    pub nu1: Complex64,
}

impl FiberSolution {
    pub fn zeros(disc: Discretization1D) -> Self {
        FiberSolution {
            disc,
            values: vec![Complex64::new(0.0, 0.0); disc.n + 1],
            gamma0: Complex64::new(0.0, 0.0),
            nu1: Complex64::new(0.0, 0.0),
        }
    }

    /// Relative L² distance to `other` on the nodes of the coarser of the two
    /// grids. The grids must be nested.
    pub fn relative_l2_distance(&self, other: &FiberSolution) -> Result<f64> {
        let (fine, coarse) = if self.disc.n >= other.disc.n {
            (self, other)
        } else {
            (other, self)
        };
        if fine.disc.n % coarse.disc.n != 0 || (fine.disc.length - coarse.disc.length).abs() > 1e-12 * coarse.disc.length {
            return Err(LabError::invalid("grids are not nested"));
        }
        let stride = fine.disc.n / coarse.disc.n;
        let diff: Vec<Complex64> = coarse
            .values
            .iter()
            .enumerate()
            .map(|(i, c)| fine.values[i * stride] - c)
            .collect();
        let denom = coarse.disc.norm(&coarse.values);
        let num = coarse.disc.norm(&diff);
        Ok(if denom == 0.0 { num } else { num / denom })
    }
}

/// Smallest `|1 − e^{−2κℓ}|` accepted before `coth(κℓ)` is declared a pole.
const POLE_TOL: f64 = 1e-10;

/// `κ·coth(κℓ)`, stable for `Re κ ≥ 0` and analytic through `κ = 0`.
pub(crate) fn kappa_coth(kappa: Complex64, ell: f64) -> Option<Complex64> {
    let z = kappa * ell;
    if z.norm() < 1e-3 {
        // z coth z = 1 + z²/3 − z⁴/45 + 2z⁶/945
        let z2 = z * z;
        let series = Complex64::new(1.0, 0.0) + z2 / 3.0 - z2 * z2 / 45.0 + z2 * z2 * z2 * 2.0 / 945.0;
        return Some(series / ell);
    }
    let e = (-2.0 * z).exp();
    let denom = Complex64::new(1.0, 0.0) - e;
    if denom.norm() < POLE_TOL {
        return None;
    }
    Some(kappa * (Complex64::new(1.0, 0.0) + e) / denom)
}

/// Dirichlet-to-Neumann symbol `p^λ(ξ')`: `ν₁` of the `(A − λ)`-null solution
/// with `γ₀ = 1`. Half-cylinder: `−κ`; slab: `−κ coth(κℓ)`.
pub fn dtn_symbol(mode: &Mode, lambda: Complex64, geom: &Geometry) -> Result<Complex64> {
    match geom.kind {
        GeometryKind::HalfCylinder => {
            if lambda.im == 0.0 && lambda.re >= mode.a {
                return Err(LabError::domain(&mode.xi, lambda, "lambda on the branch cut [a, inf)"));
            }
            Ok(-mode.kappa(lambda))
        }
        GeometryKind::Slab => kappa_coth(mode.kappa(lambda), geom.ell)
            .map(|v| -v)
            .ok_or_else(|| LabError::domain(&mode.xi, lambda, "lambda is a Dirichlet fiber eigenvalue (pole of coth)")),
    }
}

/// `‖k^λ‖²` for the Poisson fiber with `γ₀k^λ = 1`, real `λ` below the fiber
/// spectrum. Half-cylinder: `1/(2κ)`; slab:
/// `(sinh(2κℓ) − 2κℓ)/(4κ sinh²(κℓ)) = coth(κℓ)/(2κ) − ℓ/(2 sinh²(κℓ))`.
pub fn poisson_fiber_normsq(mode: &Mode, lambda: f64, geom: &Geometry) -> Result<f64> {
    let bottom = match geom.kind {
        GeometryKind::HalfCylinder => mode.a,
        GeometryKind::Slab => mode.a + (std::f64::consts::PI / geom.ell).powi(2),
    };
    if lambda >= bottom || lambda.is_nan() {
        return Err(LabError::domain(&mode.xi, lambda, "lambda not below the fiber spectrum"));
    }
    let q = mode.a - lambda;
    match geom.kind {
        GeometryKind::HalfCylinder => Ok(0.5 / q.sqrt()),
        GeometryKind::Slab => {
            let ell = geom.ell;
            let z2 = q * ell * ell;
            if z2.abs() < 1e-4 {
                // (ℓ/2)(2/3 − 4z²/45 + 4z⁴/945), z² = (a − λ)ℓ²
                return Ok(0.5 * ell * (2.0 / 3.0 - 4.0 * z2 / 45.0 + 4.0 * z2 * z2 / 945.0));
            }
            if q > 0.0 {
                let k = q.sqrt();
                let z = k * ell;
                let e = (-2.0 * z).exp();
                let coth = (1.0 + e) / (1.0 - e);
                // 1/sinh²z = 4e/(1−e)²
                let inv_sinh2 = 4.0 * e / ((1.0 - e) * (1.0 - e));
                Ok(coth / (2.0 * k) - ell * inv_sinh2 / 2.0)
            } else {
                // κ = iθ: ∫ sin²(θ(ℓ−x))/sin²(θℓ) dx
                let t = (-q).sqrt();
                let s = (t * ell).sin();
                Ok((ell / 2.0 - (2.0 * t * ell).sin() / (4.0 * t)) / (s * s))
            }
        }
    }
}
