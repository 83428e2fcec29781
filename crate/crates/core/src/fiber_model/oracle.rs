//! Second-order finite-difference oracle for the fiber problems.
//!
//! Nodes `x_i = i·h`, `i = 0..=N`, with homogeneous Dirichlet at `x_N` (the
//! far face of the slab, or the truncation point of the half-cylinder).
//! Boundary rows at `x = 0` use a ghost node, so Robin conditions stay
//! second order and the matrix is symmetric after halving the first row.
//! This path shares no code with the closed-form solvers in `exact`.

use super::tridiag::{self, SymTridiag};
use super::{BoundaryCondition, Discretization1D, FiberSolution, Geometry, GeometryKind, Mode};
use crate::error::{LabError, Result};
use num_complex::Complex64;

type C = Complex64;

fn check(mode: &Mode, lambda: C, disc: &Discretization1D, geom: &Geometry) -> Result<()> {
    if disc.n < 100 {
        return Err(LabError::invalid(format!("oracle grid needs N >= 100 (got {})", disc.n)));
    }
    match geom.kind {
        GeometryKind::Slab => {
            if (disc.length - geom.ell).abs() > 1e-12 * geom.ell {
                return Err(LabError::invalid("slab grid must span [0, ell]"));
            }
        }
        GeometryKind::HalfCylinder => {
            let re = mode.kappa(lambda).re;
            if re <= 0.0 || disc.length < 10.0 / re * (1.0 - 1e-12) {
                return Err(LabError::invalid(format!(
                    "half-cylinder truncation X_cut = {} is below 10/Re(kappa)",
                    disc.length
                )));
            }
        }
    }
    Ok(())
}

/// FD solution of `(−∂² + a − λ)u = f` with the boundary condition `bc` at
/// `x = 0` (inhomogeneous datum `datum`) and `u = 0` at the far node.
pub fn oracle_solve(
    mode: &Mode,
    lambda: C,
    bc: BoundaryCondition,
    f: &[C],
    datum: C,
    disc: &Discretization1D,
    geom: &Geometry,
) -> Result<FiberSolution> {
    check(mode, lambda, disc, geom)?;
    let n = disc.n;
    if f.len() != n + 1 {
        return Err(LabError::invalid("grid function length does not match the grid"));
    }
    let h = disc.h();
    let ih2 = 1.0 / (h * h);
    let q = C::new(mode.a, 0.0) - lambda;
    let singular = || LabError::SingularSystem {
        mode: mode.xi.clone(),
        lambda: lambda.to_string(),
    };
    let mut values = vec![C::new(0.0, 0.0); n + 1];
    match bc.coefficient() {
        None => {
            // unknowns 1..N−1
            let m = n - 1;
            let diag = vec![2.0 * ih2 + q; m];
            let off = vec![C::new(-ih2, 0.0); m - 1];
            let mut rhs: Vec<C> = f[1..n].to_vec();
            rhs[0] += datum * ih2;
            let u = tridiag::solve(&off, &diag, &off, &rhs).ok_or_else(singular)?;
            values[0] = datum;
            values[1..n].copy_from_slice(&u);
            let nu1 = (values[1] - values[0]) / h + (f[0] - q * values[0]) * (h / 2.0);
            Ok(FiberSolution {
                disc: *disc,
                values,
                gamma0: datum,
                nu1,
            })
        }
        Some(c) => {
            // unknowns 0..N−1, first row halved
            let mut diag = vec![2.0 * ih2 + q; n];
            diag[0] = ih2 + c / h + q / 2.0;
            let off = vec![C::new(-ih2, 0.0); n - 1];
            let mut rhs: Vec<C> = f[..n].to_vec();
            rhs[0] = f[0] / 2.0 - datum / h;
            let u = tridiag::solve(&off, &diag, &off, &rhs).ok_or_else(singular)?;
            values[..n].copy_from_slice(&u);
            Ok(FiberSolution {
                disc: *disc,
                gamma0: values[0],
                nu1: c * values[0] + datum,
                values,
            })
        }
    }
}

/// [`oracle_solve`] on `disc` and on the grid with half the cells, combined
/// as `(4u_h − u_{2h})/3` on the coarse nodes.
pub fn oracle_solve_richardson(
    mode: &Mode,
    lambda: C,
    bc: BoundaryCondition,
    f: &[C],
    datum: C,
    disc: &Discretization1D,
    geom: &Geometry,
) -> Result<FiberSolution> {
    let coarse = disc.coarsened()?;
    let fine_sol = oracle_solve(mode, lambda, bc, f, datum, disc, geom)?;
    let fc: Vec<C> = f.iter().step_by(2).copied().collect();
    let coarse_sol = oracle_solve(mode, lambda, bc, &fc, datum, &coarse, geom)?;
    let values = coarse_sol
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| (4.0 * fine_sol.values[2 * i] - v) / 3.0)
        .collect();
    Ok(FiberSolution {
        disc: coarse,
        values,
        gamma0: (4.0 * fine_sol.gamma0 - coarse_sol.gamma0) / 3.0,
        nu1: (4.0 * fine_sol.nu1 - coarse_sol.nu1) / 3.0,
    })
}

/// Applies the FD operator `−D² + (a − λ)` at interior nodes; boundary entries
/// are left at zero.
pub fn fd_apply(mode: &Mode, lambda: C, u: &[C], disc: &Discretization1D) -> Vec<C> {
    let h2 = disc.h() * disc.h();
    let q = C::new(mode.a, 0.0) - lambda;
    let mut out = vec![C::new(0.0, 0.0); u.len()];
    for i in 1..u.len() - 1 {
        out[i] = (2.0 * u[i] - u[i - 1] - u[i + 1]) / h2 + q * u[i];
    }
    out
}

/// Symmetrized FD fiber matrix (spectral parameter removed) and whether the
/// first unknown is the boundary node.
fn fiber_matrix(mode: &Mode, bc: BoundaryCondition, disc: &Discretization1D) -> Result<(SymTridiag, bool)> {
    let n = disc.n;
    let h = disc.h();
    let ih2 = 1.0 / (h * h);
    match bc.coefficient() {
        None => Ok((
            SymTridiag {
                diag: vec![2.0 * ih2 + mode.a; n - 1],
                off: vec![-ih2; n - 2],
            },
            false,
        )),
        Some(c) => {
            if c.im != 0.0 {
                return Err(LabError::invalid("fiber eigenvalues need a real boundary coefficient"));
            }
            let mut diag = vec![2.0 * ih2 + mode.a; n];
            diag[0] = 2.0 * ih2 + 2.0 * c.re / h + mode.a;
            let mut off = vec![-ih2; n - 1];
            off[0] = -std::f64::consts::SQRT_2 * ih2;
            Ok((SymTridiag { diag, off }, true))
        }
    }
}

fn require_slab(geom: &Geometry) -> Result<()> {
    if geom.is_slab() {
        Ok(())
    } else {
        Err(LabError::invalid("fiber eigenvalues need the slab (discrete fiber spectrum)"))
    }
}

/// The `count` lowest eigenvalues of the discretized fiber operator, ascending.
pub fn fiber_eigenvalues(
    mode: &Mode,
    bc: BoundaryCondition,
    disc: &Discretization1D,
    geom: &Geometry,
    count: usize,
) -> Result<Vec<f64>> {
    require_slab(geom)?;
    let (t, _) = fiber_matrix(mode, bc, disc)?;
    Ok((0..count.min(t.len())).map(|k| t.eigenvalue(k)).collect())
}

/// Discrete fiber eigenvalues in `[lo, hi)`, ascending.
pub fn fiber_eigenvalues_in(
    mode: &Mode,
    bc: BoundaryCondition,
    disc: &Discretization1D,
    geom: &Geometry,
    lo: f64,
    hi: f64,
) -> Result<Vec<f64>> {
    require_slab(geom)?;
    let (t, _) = fiber_matrix(mode, bc, disc)?;
    Ok(t.eigenvalues_in(lo, hi))
}

/// Richardson-refined eigenvalues: the fine-grid eigenvalues in `[lo, hi)`
/// paired by index with the grid of half the cells, `(4λ_h − λ_{2h})/3`.
pub fn richardson_eigenvalues_in(
    mode: &Mode,
    bc: BoundaryCondition,
    disc: &Discretization1D,
    geom: &Geometry,
    lo: f64,
    hi: f64,
) -> Result<Vec<f64>> {
    require_slab(geom)?;
    let (fine, _) = fiber_matrix(mode, bc, disc)?;
    let (coarse, _) = fiber_matrix(mode, bc, &disc.coarsened()?)?;
    let first = fine.count_below(lo);
    let last = fine.count_below(hi);
    Ok((first..last)
        .map(|k| (4.0 * fine.eigenvalue(k) - coarse.eigenvalue(k)) / 3.0)
        .collect())
}

/// Lowest FD eigenvalue with its eigenvector as nodal values on `disc`
/// (far node zero, boundary node zero for Dirichlet), normalized in the
/// discrete L² norm.
pub fn fiber_ground_state(
    mode: &Mode,
    bc: BoundaryCondition,
    disc: &Discretization1D,
) -> Result<(f64, Vec<f64>)> {
    let (t, robin) = fiber_matrix(mode, bc, disc)?;
    let lam = t.eigenvalue(0);
    let y = t.eigenvector(lam);
    let n = disc.n;
    let h = disc.h();
    let mut u = vec![0.0; n + 1];
    if robin {
        u[0] = y[0] * std::f64::consts::SQRT_2;
        u[1..n].copy_from_slice(&y[1..]);
    } else {
        u[1..n].copy_from_slice(&y);
    }
    // ‖u‖² = h(u₀²/2 + Σ u_i²) = h‖y‖²
    let norm = (h * y.iter().map(|v| v * v).sum::<f64>()).sqrt();
    u.iter_mut().for_each(|v| *v /= norm);
    Ok((lam, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn robin_zero_with_unit_flux() {
        // −u'' + u = 0, u'(0) = 1, u(1) = 0: u = −sinh(1−x)/cosh(1)
        let g = Geometry::slab(2, 1.0).unwrap();
        let m = Mode::new(vec![0], 1.0);
        let disc = Discretization1D::new(2000, 1.0).unwrap();
        let zero = vec![c(0.0); 2001];
        let u = oracle_solve_richardson(&m, c(0.0), BoundaryCondition::Robin(0.0), &zero, c(1.0), &disc, &g).unwrap();
        assert_relative_eq!(u.gamma0.re, -1f64.tanh(), epsilon = 1e-10);
        for (i, v) in u.values.iter().enumerate() {
            let x = u.disc.x(i);
            assert!((v.re + (1.0 - x).sinh() / 1f64.cosh()).abs() < 1e-10);
        }
    }

    #[test]
    fn second_order_convergence() {
        let g = Geometry::slab(2, 1.0).unwrap();
        let m = Mode::new(vec![1], 1.0);
        let exact = -1f64.tanh();
        let err = |n: usize| {
            let disc = Discretization1D::new(n, 1.0).unwrap();
            let zero = vec![c(0.0); n + 1];
            let m0 = Mode::new(vec![0], 1.0);
            let u = oracle_solve(&m0, c(0.0), BoundaryCondition::Robin(0.0), &zero, c(1.0), &disc, &g).unwrap();
            (u.gamma0.re - exact).abs()
        };
        let _ = m;
        let ratio = err(200) / err(400);
        assert!((ratio - 4.0).abs() < 0.05, "ratio = {ratio}");
    }

    #[test]
    fn dirichlet_eigenvalues() {
        let g = Geometry::slab(2, 1.0).unwrap();
        let m = Mode::new(vec![0], 1.0);
        let disc = Discretization1D::new(1000, 1.0).unwrap();
        let ev = fiber_eigenvalues(&m, BoundaryCondition::Dirichlet, &disc, &g, 3).unwrap();
        for (k, e) in ev.iter().enumerate() {
            let exact = 1.0 + ((k + 1) as f64 * PI).powi(2);
            let kk = (k + 1) as f64;
            assert!((e - exact).abs() < 2.0 * (kk * PI).powi(4) / (12.0 * 1e6));
        }
        assert_relative_eq!(ev[0], 1.0 + PI * PI, epsilon = 1e-4);
    }

    #[test]
    fn robin_eigenvalues_approach_dirichlet() {
        let g = Geometry::slab(2, 1.0).unwrap();
        let m = Mode::new(vec![0], 1.0);
        let disc = Discretization1D::new(4000, 1.0).unwrap();
        let dir = 1.0 + PI * PI;
        let mut prev = f64::NEG_INFINITY;
        for b in [10.0, 100.0, 1000.0] {
            let e = richardson_eigenvalues_in(&m, BoundaryCondition::Robin(b), &disc, &g, -1e9, dir + 1e-9).unwrap();
            let low = e[0];
            assert!(low > prev && low < dir);
            prev = low;
        }
        assert!((dir - prev) / dir < 0.01);
    }

    #[test]
    fn ground_state_is_normalized() {
        let g = Geometry::slab(2, 1.0).unwrap();
        let m = Mode::new(vec![2], 1.0);
        let disc = Discretization1D::new(400, 1.0).unwrap();
        let (lam, u) = fiber_ground_state(&m, BoundaryCondition::Robin(0.0), &disc).unwrap();
        let low = fiber_eigenvalues(&m, BoundaryCondition::Robin(0.0), &disc, &g, 1).unwrap()[0];
        assert_relative_eq!(lam, low);
        let h = disc.h();
        let norm2 = h * (u[0] * u[0] / 2.0 + u[1..].iter().map(|v| v * v).sum::<f64>());
        assert_relative_eq!(norm2, 1.0, epsilon = 1e-12);
        // Neumann-type ground state at ξ = 2: a + (π/2)²
        assert_relative_eq!(lam, 5.0 + PI * PI / 4.0, epsilon = 1e-4);
    }
}
