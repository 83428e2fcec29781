//! Fiber-level checks of the reduced Green's formula and of the relation
//! between `T` and `T^λ` through the maps `E^λ` and `F^λ`.

use super::realization::{l_symbol, shifted_l_symbol, Realization};
use crate::error::{LabError, Result};
use crate::fiber_model::{
    dirichlet_resolvent_fiber, dtn_symbol, poisson_fiber, Discretization1D, Geometry, GeometryKind, Mode,
};
use num_complex::Complex64;
use rand::Rng;

type C = Complex64;

/// A smooth fiber function with first and second derivatives.
pub trait FiberFunction {
    fn value(&self, x: f64) -> C;
    fn d1(&self, x: f64) -> C;
    fn d2(&self, x: f64) -> C;
}

/// `scale · k^λ`, the `(A − λ)`-null solution with `γ₀ = scale`.
#[derive(Debug, Clone)]
pub struct NullSolution {
    kappa: C,
    ell: Option<f64>,
    denom: C,
    scale: C,
}

impl NullSolution {
    pub fn new(mode: &Mode, lambda: C, geom: &Geometry, scale: C) -> Self {
        let kappa = mode.kappa(lambda);
        let ell = geom.is_slab().then_some(geom.ell);
        let denom = ell.map_or(C::new(1.0, 0.0), |l| C::new(1.0, 0.0) - (-2.0 * kappa * l).exp());
        NullSolution { kappa, ell, denom, scale }
    }

    /// `e^{−κx}(1 ∓ e^{−2κ(ℓ−x)})/D`: the `sinh` and `cosh` ratios.
    fn parts(&self, x: f64) -> (C, C) {
        let e = (-self.kappa * x).exp();
        match self.ell {
            None => (e, e),
            Some(l) => {
                let r = (-2.0 * self.kappa * (l - x)).exp();
                (e * (1.0 - r) / self.denom, e * (1.0 + r) / self.denom)
            }
        }
    }
}

impl FiberFunction for NullSolution {
    fn value(&self, x: f64) -> C {
        self.scale * self.parts(x).0
    }
    fn d1(&self, x: f64) -> C {
        -self.scale * self.kappa * self.parts(x).1
    }
    fn d2(&self, x: f64) -> C {
        self.scale * self.kappa * self.kappa * self.parts(x).0
    }
}

/// `E(x)·Σ_k (α_k cos kx + β_k sin kx)` with envelope `E = 1 − x/ℓ` on the
/// slab (vanishing at the far face) and `E = e^{−x}` on the half-cylinder.
#[derive(Debug, Clone)]
pub struct TrialFunction {
    envelope: GeometryKind,
    ell: f64,
    cos: Vec<C>,
    sin: Vec<C>,
}

impl TrialFunction {
    pub fn new(geom: &Geometry, cos: Vec<C>, sin: Vec<C>) -> Self {
        TrialFunction {
            envelope: geom.kind,
            ell: geom.ell,
            cos,
            sin,
        }
    }

    pub fn random<R: Rng>(rng: &mut R, geom: &Geometry, terms: usize) -> Self {
        let mut draw = || C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let cos = (0..terms).map(|_| draw()).collect();
        let sin = (0..terms).map(|_| draw()).collect();
        Self::new(geom, cos, sin)
    }

    /// Same function with the trace at `x = 0` removed.
    pub fn without_trace(mut self) -> Self {
        let s: C = self.cos.iter().sum();
        if let Some(c0) = self.cos.first_mut() {
            *c0 -= s;
        }
        self
    }

    fn env(&self, x: f64) -> (f64, f64, f64) {
        match self.envelope {
            GeometryKind::Slab => (1.0 - x / self.ell, -1.0 / self.ell, 0.0),
            GeometryKind::HalfCylinder => {
                let e = (-x).exp();
                (e, -e, e)
            }
        }
    }

    fn trig(&self, x: f64) -> (C, C, C) {
        let mut t = (C::default(), C::default(), C::default());
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let kf = k as f64;
            let (s, c) = (kf * x).sin_cos();
            t.0 += a * c + b * s;
            t.1 += kf * (-a * s + b * c);
            t.2 += -kf * kf * (a * c + b * s);
        }
        t
    }
}

impl FiberFunction for TrialFunction {
    fn value(&self, x: f64) -> C {
        self.env(x).0 * self.trig(x).0
    }
    fn d1(&self, x: f64) -> C {
        let (e, e1, _) = self.env(x);
        let (t, t1, _) = self.trig(x);
        e1 * t + e * t1
    }
    fn d2(&self, x: f64) -> C {
        let (e, e1, e2) = self.env(x);
        let (t, t1, t2) = self.trig(x);
        e2 * t + 2.0 * e1 * t1 + e * t2
    }
}

/// `|(Au, w) − (Γu, γ₀w)|` with `Γu = ν₁u − p⁰γ₀u`, for a null solution `w`
/// of `A` on this mode. The inner product uses the grid quadrature of `disc`.
pub fn reduced_green_check(
    u: &dyn FiberFunction,
    w: &dyn FiberFunction,
    mode: &Mode,
    geom: &Geometry,
    disc: &Discretization1D,
) -> Result<f64> {
    let au = disc.sample(|x| -u.d2(x) + mode.a * u.value(x));
    let wv = disc.sample(|x| w.value(x));
    let lhs = disc.inner(&au, &wv);
    let p0 = dtn_symbol(mode, C::new(0.0, 0.0), geom)?;
    let gamma_u = u.d1(0.0) - p0 * u.value(0.0);
    let rhs = gamma_u * w.value(0.0).conj();
    Ok((lhs - rhs).norm())
}

/// Residuals of the fiber-level `T ↔ T^λ` diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramResidual {
    /// `|l^λ − (l − λ(E^λz, z))|`: the scalar form of
    /// `(E'^{λ̄})* T^λ E^λ = T + G^λ` with `G^λ = −λ pr_W E^λ`.
    pub shifted_form: f64,
    /// Relative L² distance between `E^λz` and the `(A − λ)`-null solution.
    pub null_solution: f64,
    /// `max |F^λE^λz − z| / max |z|` with `F^λ = I − λA_γ^{-1}`.
    pub inversion: f64,
}

impl DiagramResidual {
    pub fn max(&self) -> f64 {
        self.shifted_form.max(self.null_solution)
    }
}

/// Checks the diagram on one mode for the normalized `Z`-fiber `z`
/// (`Az = 0`, `γ₀z = 1`), with `E^λz = z + λ(A_γ − λ)^{-1}z` computed by the
/// Dirichlet Green's function.
pub fn diagram_check(
    realization: &Realization,
    lambda: C,
    mode: &Mode,
    disc: &Discretization1D,
    geom: &Geometry,
) -> Result<DiagramResidual> {
    if !realization.contains(&mode.xi) {
        return Err(LabError::invalid(format!("mode {:?} is outside the realization's subset", mode.xi)));
    }
    let zero = C::new(0.0, 0.0);
    let z = poisson_fiber(mode, zero, geom, disc)?;
    let rz = dirichlet_resolvent_fiber(mode, lambda, &z, disc, geom)?;
    let ez: Vec<C> = z.iter().zip(&rz.values).map(|(a, b)| a + lambda * b).collect();

    let k_lambda = poisson_fiber(mode, lambda, geom, disc)?;
    let diff: Vec<C> = ez.iter().zip(&k_lambda).map(|(a, b)| a - b).collect();
    let null_solution = disc.norm(&diff) / disc.norm(&k_lambda);

    let l = l_symbol(realization).eval(mode, geom)?;
    let l_shift = shifted_l_symbol(realization, lambda).eval(mode, geom)?;
    let rhs = l - lambda * disc.inner(&ez, &z);
    let shifted_form = (l_shift - rhs).norm();

    let r0 = dirichlet_resolvent_fiber(mode, zero, &ez, disc, geom)?;
    let zmax = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let inversion = ez
        .iter()
        .zip(&r0.values)
        .zip(&z)
        .map(|((e, r), zv)| (e - lambda * r - zv).norm())
        .fold(0.0, f64::max)
        / zmax;
    Ok(DiagramResidual {
        shifted_form,
        null_solution,
        inversion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn null_solution_derivatives() {
        let g = Geometry::slab(2, 1.0).unwrap();
        let m = Mode::new(vec![1], 1.0);
        let w = NullSolution::new(&m, C::new(-1.0, 0.0), &g, C::new(1.0, 0.0));
        assert!((w.value(0.0) - 1.0).norm() < 1e-15);
        assert!(w.value(1.0).norm() < 1e-15);
        let p = dtn_symbol(&m, C::new(-1.0, 0.0), &g).unwrap();
        assert!((w.d1(0.0) - p).norm() < 1e-13);
    }

    #[test]
    fn trial_derivatives_by_differences() {
        let g = Geometry::half_cylinder(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = TrialFunction::random(&mut rng, &g, 4);
        let (x, h) = (0.7, 1e-4);
        let fd1 = (u.value(x + h) - u.value(x - h)) / (2.0 * h);
        let fd2 = (u.value(x + h) - 2.0 * u.value(x) + u.value(x - h)) / (h * h);
        assert!((fd1 - u.d1(x)).norm() < 1e-6);
        assert!((fd2 - u.d2(x)).norm() < 1e-4);
        assert!(u.clone().without_trace().value(0.0).norm() < 1e-15);
    }

    #[test]
    fn reduced_green_on_null_pair() {
        let g = Geometry::slab(2, 1.0).unwrap();
        let m = Mode::new(vec![2], 1.0);
        let zero = C::new(0.0, 0.0);
        let u = NullSolution::new(&m, zero, &g, C::new(2.0, -1.0));
        let w = NullSolution::new(&m, zero, &g, C::new(1.0, 0.0));
        let disc = Discretization1D::new(1000, 1.0).unwrap();
        assert!(reduced_green_check(&u, &w, &m, &g, &disc).unwrap() < 1e-12);
    }

    #[test]
    fn diagram_trivial_at_zero() {
        let g = Geometry::slab(2, 1.0).unwrap();
        let m = Mode::new(vec![1], 1.0);
        let disc = Discretization1D::new(200, 1.0).unwrap();
        let r = diagram_check(&Realization::robin(1.0), C::new(0.0, 0.0), &m, &disc, &g).unwrap();
        assert_eq!(r.shifted_form, 0.0);
        assert_eq!(r.null_solution, 0.0);
        assert_eq!(r.inversion, 0.0);
    }
}
