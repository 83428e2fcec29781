//! Tridiagonal kernels: complex Thomas elimination and Sturm-sequence
//! bisection for real symmetric tridiagonal matrices.

use num_complex::Complex64;

/// Solves `T x = rhs` for the tridiagonal `T` with sub-diagonal `sub`
/// (`sub[i] = T[i+1][i]`), diagonal `diag` and super-diagonal `sup`.
/// Returns `None` when a pivot vanishes relative to the row scale.
pub(crate) fn solve(sub: &[Complex64], diag: &[Complex64], sup: &[Complex64], rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = diag.len();
    debug_assert!(sub.len() + 1 == n && sup.len() + 1 == n && rhs.len() == n);
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let scale = |i: usize| {
        let mut s = diag[i].norm();
        if i > 0 {
            s = s.max(sub[i - 1].norm());
        }
        if i + 1 < n {
            s = s.max(sup[i].norm());
        }
        s
    };
    let mut piv = diag[0];
    if piv.norm() <= 1e-14 * scale(0) {
        return None;
    }
    if n > 1 {
        c[0] = sup[0] / piv;
    }
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - sub[i - 1] * c[i - 1];
        if piv.norm() <= 1e-14 * scale(i) {
            return None;
        }
        if i + 1 < n {
            c[i] = sup[i] / piv;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Some(d)
}

/// Real symmetric tridiagonal matrix: diagonal `diag`, off-diagonal `off`.
#[derive(Debug, Clone)]
pub(crate) struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.len() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            d = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.len() {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < self.len() {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues in `[lo, hi)`, ascending.
    pub fn eigenvalues_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let first = self.count_below(lo);
        let last = self.count_below(hi);
        (first..last).map(|k| self.eigenvalue(k)).collect()
    }

    /// Eigenvector for the (simple) eigenvalue `lambda` by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let shift = lambda - 1e-10 * (lambda.abs() + 1.0);
        let sub: Vec<Complex64> = self.off.iter().map(|&b| Complex64::new(b, 0.0)).collect();
        let diag: Vec<Complex64> = self.diag.iter().map(|&d| Complex64::new(d - shift, 0.0)).collect();
        let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + 0.01 * (i % 7) as f64, 0.0)).collect();
        for _ in 0..3 {
            let Some(w) = solve(&sub, &diag, &sub, &v) else { break };
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v = w.into_iter().map(|z| z / norm).collect();
        }
        v.into_iter().map(|z| z.re).collect()
    }

    #[cfg(test)]
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}
