//! Enumeration of cross-section lattice modes `ξ' ∈ ℤ^{n-1}` with `|ξ'| ≤ R`.

/// All integer points of dimension `dim` with `|ξ|² ≤ radius²`, in
/// lexicographic order.
pub fn lattice_points(dim: usize, radius: f64) -> Vec<Vec<i64>> {
    let r2 = radius * radius;
    let rmax = radius.floor() as i64;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(dim);
    fill(dim, rmax, r2, 0, &mut cur, &mut out);
    out
}

fn fill(dim: usize, rmax: i64, r2: f64, used: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if cur.len() == dim {
        out.push(cur.clone());
        return;
    }
    for k in -rmax..=rmax {
        let s = used + k * k;
        if (s as f64) > r2 {
            continue;
        }
        cur.push(k);
        fill(dim, rmax, r2, s, cur, out);
        cur.pop();
    }
}

/// `⟨ξ⟩ = (1 + |ξ|²)^{1/2}`.
pub fn bracket(xi: &[i64]) -> f64 {
    (1.0 + norm_sq(xi)).sqrt()
}

pub fn norm_sq(xi: &[i64]) -> f64 {
    xi.iter().map(|&k| (k * k) as f64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_small_disks() {
        assert_eq!(lattice_points(1, 3.0).len(), 7);
        // Gauss circle: N(2) = 13
        assert_eq!(lattice_points(2, 2.0).len(), 13);
        assert_eq!(lattice_points(2, 0.5), vec![vec![0, 0]]);
    }

    #[test]
    fn order_is_lexicographic() {
        let pts = lattice_points(2, 5.0);
        let mut sorted = pts.clone();
        sorted.sort();
        assert_eq!(pts, sorted);
    }
}
