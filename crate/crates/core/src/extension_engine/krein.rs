use super::realization::{checked_shifted_value, Realization};
use crate::error::{LabError, Result};
use crate::fiber_model::{
    dirichlet_resolvent_fiber, dtn_symbol, poisson_fiber, FiberSolution, Geometry, GridFunction, ModelOperator,
};
use crate::fiber_model::Mode;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Fiber of `(Ã − λ)^{-1} f` from the Kreĭn formula
/// `(Ã − λ)^{-1} = (A_γ − λ)^{-1} + K^λ (L^λ)^{-1} (K^{λ̄})*`.
///
/// On a mode outside the subset only the Dirichlet resolvent acts.
pub fn krein_apply_fiber(
    realization: &Realization,
    lambda: Complex64,
    mode: &Mode,
    f: &GridFunction,
    geom: &Geometry,
) -> Result<FiberSolution> {
    let base = dirichlet_resolvent_fiber(mode, lambda, &f.values, &f.disc, geom)?;
    if !realization.contains(&mode.xi) {
        return Ok(base);
    }
    let l = checked_shifted_value(realization, lambda, mode, geom)?;
    let k = poisson_fiber(mode, lambda, geom, &f.disc)?;
    // base.nu1 = ∫ f k^λ = (K^{λ̄})* f
    let alpha = base.nu1 / l;
    let values = base.values.iter().zip(&k).map(|(u, kv)| u + alpha * kv).collect();
    Ok(FiberSolution {
        disc: f.disc,
        values,
        gamma0: alpha,
        nu1: base.nu1 + alpha * dtn_symbol(mode, lambda, geom)?,
    })
}

/// [`krein_apply_fiber`] over mode-resolved data, evaluated in parallel and
/// returned in mode order.
pub fn krein_apply(
    realization: &Realization,
    lambda: Complex64,
    data: &BTreeMap<Vec<i64>, GridFunction>,
    geom: &Geometry,
    op: &ModelOperator,
) -> Result<BTreeMap<Vec<i64>, FiberSolution>> {
    if let Some(xi) = data.keys().find(|xi| xi.len() != geom.boundary_dim()) {
        return Err(LabError::invalid(format!("mode {xi:?} has the wrong dimension")));
    }
    let entries: Vec<(&Vec<i64>, &GridFunction)> = data.iter().collect();
    entries
        .par_iter()
        .map(|(xi, f)| {
            let mode = op.mode((*xi).clone());
            krein_apply_fiber(realization, lambda, &mode, f, geom).map(|u| ((*xi).clone(), u))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber_model::Discretization1D;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn modes_outside_subset_get_dirichlet_resolvent() {
        let g = Geometry::slab(2, 1.0).unwrap();
        let op = ModelOperator::new(1.0).unwrap();
        let r = Realization::robin(2.0).with_subset([vec![0]]);
        let disc = Discretization1D::new(500, 1.0).unwrap();
        let f = GridFunction::sample(disc, |x| c(1.0 + x));
        let mode = op.mode(vec![3]);
        let u = krein_apply_fiber(&r, c(-1.0), &mode, &f, &g).unwrap();
        let d = dirichlet_resolvent_fiber(&mode, c(-1.0), &f.values, &disc, &g).unwrap();
        assert_eq!(u, d);
    }

    #[test]
    fn boundary_condition_holds() {
        let g = Geometry::slab(2, 1.0).unwrap();
        let op = ModelOperator::new(1.0).unwrap();
        let b = 1.7;
        let r = Realization::robin(b);
        let disc = Discretization1D::new(500, 1.0).unwrap();
        let f = GridFunction::sample(disc, |x| Complex64::new(x.cos(), x));
        let u = krein_apply_fiber(&r, Complex64::new(-2.0, 0.5), &op.mode(vec![1]), &f, &g).unwrap();
        assert!((u.nu1 - b * u.gamma0).norm() < 1e-12);
        assert_eq!(u.values[0], u.gamma0);
    }

    #[test]
    fn large_b_approaches_dirichlet() {
        let g = Geometry::slab(2, 1.0).unwrap();
        let op = ModelOperator::new(1.0).unwrap();
        let disc = Discretization1D::new(400, 1.0).unwrap();
        let f = GridFunction::sample(disc, |_| c(1.0));
        let mode = op.mode(vec![0]);
        let d = dirichlet_resolvent_fiber(&mode, c(0.0), &f.values, &disc, &g).unwrap();
        let mut prev = f64::INFINITY;
        for b in [1e2, 1e4, 1e6] {
            let u = krein_apply_fiber(&Realization::robin(b), c(0.0), &mode, &f, &g).unwrap();
            let corr = u.values.iter().zip(&d.values).map(|(a, e)| (a - e).norm()).fold(0.0, f64::max);
            assert!(corr < prev / 50.0);
            prev = corr;
        }
        assert!(prev < 1e-6);
    }
}
