//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints its `criterion N: PASS|FAIL ...` line.

use kreinlab::extension_engine::{diagram_check, krein_apply, shifted_l_roots};
use kreinlab::fiber_model::{oracle_solve_richardson, richardson_eigenvalues_in};
use kreinlab::lower_bounds::{birman_check, garding_check, garding_suite, q_mu_scan, GardingOptions};
use kreinlab::spectral_asymptotics::{
    dirichlet_weyl, svalues_iterates, svalues_robin_pair, svalues_vs_dirichlet, weyl_fit,
};
use kreinlab::{
    BoundaryCondition, Complex64, Discretization1D, Geometry, GridFunction, ModelOperator, Realization,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::Instant;

fn report(n: u32, pass: bool, detail: String) {
    println!("criterion {n:>2}: {} {detail}", if pass { "PASS" } else { "FAIL" });
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn slab(n: usize) -> Geometry {
    Geometry::slab(n, 1.0).unwrap()
}

fn op(msq: f64) -> ModelOperator {
    ModelOperator::new(msq).unwrap()
}

fn criterion_01_krein_formula() {
    let start = Instant::now();
    let (g, op) = (slab(2), op(1.0));
    let r = Realization::robin(2.0);
    let lambda = c(-5.0);
    let disc = Discretization1D::new(10_000, 1.0).unwrap();
    let data: BTreeMap<Vec<i64>, GridFunction> = op
        .modes(&g, 50.0)
        .into_iter()
        .map(|m| {
            let k = m.xi[0] as f64;
            let f = GridFunction::sample(disc, move |x| Complex64::new((3.0 * x).cos() + x * x, 0.1 * k * x));
            (m.xi, f)
        })
        .collect();
    let sol = krein_apply(&r, lambda, &data, &g, &op).unwrap();
    let mut worst = (0.0f64, vec![]);
    for (xi, u) in &sol {
        let m = op.mode(xi.clone());
        let f = &data[xi];
        let oracle =
            oracle_solve_richardson(&m, lambda, BoundaryCondition::Robin(2.0), &f.values, c(0.0), &disc, &g).unwrap();
        let d = u.relative_l2_distance(&oracle).unwrap();
        if d > worst.0 {
            worst = (d, xi.clone());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst.0 <= 1e-6 && secs <= 30.0;
    report(
        1,
        pass,
        format!("max relative L2 discrepancy {:.2e} at mode {:?} over {} modes, {secs:.1} s", worst.0, worst.1, sol.len()),
    );
    assert!(pass);
}

fn criterion_02_weyl_robin_vs_dirichlet() {
    let r = Realization::robin(1.0);
    let mut lines = Vec::new();
    let mut pass = true;
    for (n, radius) in [(2usize, 2000.0), (3, 200.0)] {
        let start = Instant::now();
        let g = slab(n);
        let expected = 2.0 / (n as f64 - 1.0);
        let fit = |rad: f64| {
            let s = svalues_vs_dirichlet(&r, 0.0, rad, &g, &op(1.0)).unwrap();
            weyl_fit(&s.values, Some(expected)).unwrap()
        };
        let (full, half) = (fit(radius), fit(radius / 2.0));
        let exp_err = (full.exponent + expected).abs() / expected;
        let plateau_drift = (full.plateau.unwrap() / half.plateau.unwrap() - 1.0).abs();
        let secs = start.elapsed().as_secs_f64();
        let ok = exp_err <= 0.05 && plateau_drift <= 0.10 && secs <= 60.0;
        pass &= ok;
        lines.push(format!(
            "n={n} R={radius}: exponent {:.4} (rel err {exp_err:.3}), plateau {:.4} vs {:.4} at R/2, {secs:.1} s",
            full.exponent,
            full.plateau.unwrap(),
            half.plateau.unwrap()
        ));
    }
    report(2, pass, lines.join("; "));
    assert!(pass);
}

fn criterion_03_robin_pair() {
    let mut lines = Vec::new();
    let mut pass = true;
    for (n, radius) in [(2usize, 2000.0), (3, 200.0)] {
        let g = slab(n);
        let expected = 3.0 / (n as f64 - 1.0);
        let s = svalues_robin_pair(0.0, 1.0, 0.0, radius, &g, &op(1.0)).unwrap();
        let fit = weyl_fit(&s.values, Some(expected)).unwrap();
        let exp_err = (fit.exponent + expected).abs() / expected;
        pass &= exp_err <= 0.05;
        lines.push(format!("n={n} R={radius}: exponent {:.4} (rel err {exp_err:.3})", fit.exponent));
    }
    let g = slab(2);
    let s = svalues_robin_pair(0.0, 1.0, 0.0, 1000.0, &g, &op(1.0)).unwrap();
    let k = s.modes.iter().position(|xi| xi == &vec![1000]).unwrap();
    let scaled = s.values[k] * 1e9;
    let const_err = (scaled / 0.5 - 1.0).abs();
    pass &= const_err <= 0.10;
    lines.push(format!("s*|xi|^3 at |xi|=1000: {scaled:.5} (target 0.5)"));
    report(3, pass, lines.join("; "));
    assert!(pass);
}

fn criterion_04_iterates() {
    let start = Instant::now();
    let g = slab(2);
    let s = svalues_iterates(&Realization::robin(1.0), 2, 300.0, &g, &op(1.0), 800).unwrap();
    let fit = weyl_fit(&s.values, Some(4.0)).unwrap();
    let err = (fit.exponent + 4.0).abs() / 4.0;
    let secs = start.elapsed().as_secs_f64();
    let pass = err <= 0.10 && secs <= 300.0;
    report(
        4,
        pass,
        format!("N=2 exponent {:.4} (rel err {err:.3}), residual {:.2e}, {secs:.1} s", fit.exponent, fit.residual),
    );
    assert!(pass);
}

fn criterion_05_dirichlet_weyl() {
    let g = slab(2);
    let t = 1e4;
    let mut ratios = Vec::new();
    for msq in [1.0, 4.0] {
        let w = dirichlet_weyl(150.0, 60, &g, &op(msq), &[t]).unwrap();
        ratios.push((msq, w.table[0].1 as f64 / (w.c_a * t), w.c_a));
    }
    let pass = ratios.iter().all(|(_, q, _)| (0.95..=1.05).contains(q));
    let detail = ratios
        .iter()
        .map(|(m, q, ca)| format!("msq={m}: N(t)/(c_A t) = {q:.4} (c_A = {ca:.4})"))
        .collect::<Vec<_>>()
        .join("; ");
    report(5, pass, detail);
    assert!(pass);
}

fn criterion_06_pole_eigenvalue_duality() {
    let g = slab(2);
    let (msq, lo) = (1.0, -50.0);
    let op = op(msq);
    let disc = Discretization1D::new(2000, 1.0).unwrap();
    let bs = [-1.2, -1.5, -2.0, -2.5, -3.5, -4.0, -5.0, -6.0, -7.5, -9.0];
    let mut worst = 0.0f64;
    let mut count = 0usize;
    let mut mismatched = Vec::new();
    for b in bs {
        let r = Realization::robin(b);
        for m in op.modes(&g, 10.0) {
            let roots = shifted_l_roots(&r, &m, &g, lo, msq, 4000).unwrap();
            let eigs = richardson_eigenvalues_in(&m, BoundaryCondition::Robin(b), &disc, &g, lo, msq).unwrap();
            if roots.len() != eigs.len() {
                mismatched.push((b, m.xi.clone(), roots.len(), eigs.len()));
                continue;
            }
            for (x, y) in roots.iter().zip(&eigs) {
                worst = worst.max((x - y).abs());
                count += 1;
            }
        }
    }
    let pass = mismatched.is_empty() && worst <= 1e-4 && count > 0;
    report(
        6,
        pass,
        format!("{count} root/eigenvalue pairs over 10 Robin configurations, max gap {worst:.2e}, count mismatches {mismatched:?}"),
    );
    assert!(pass);
}

fn criterion_07_q_mu_growth() {
    let g = Geometry::half_cylinder(2).unwrap();
    let mus = [-10.0, -1e2, -1e3, -1e4, -1e5, -1e6];
    let scan = q_mu_scan(&mus, &g, &op(1.0), 100.0).unwrap();
    let growth = scan
        .rows
        .iter()
        .filter(|r| r.mu <= -100.0)
        .all(|r| r.bound >= 0.5 * r.mu.abs().sqrt());
    let pass = scan.monotone && growth;
    let table = scan
        .rows
        .iter()
        .map(|r| format!("{:.0e}:{:.3}", r.mu, r.bound))
        .collect::<Vec<_>>()
        .join(" ");
    report(7, pass, format!("monotone={} growth>=0.5sqrt|mu|={growth} [{table}]", scan.monotone));
    assert!(pass);
}

fn criterion_08_birman() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_808);
    let mut min_margin = f64::INFINITY;
    let mut max_disc = 0.0f64;
    let mut violations = 0;
    for _ in 0..50 {
        let b = rng.gen_range(0.0..10.0);
        let ell = rng.gen_range(0.5..2.0);
        let msq = rng.gen_range(0.25..4.0);
        let g = Geometry::slab(2, ell).unwrap();
        let rep = birman_check(&Realization::robin(b), &g, &op(msq), 6.0, 400).unwrap();
        if rep.holds != Some(true) {
            violations += 1;
        }
        min_margin = min_margin.min(rep.margin.unwrap_or(f64::NEG_INFINITY));
        max_disc = max_disc.max(rep.discretization_error);
    }
    let pass = violations == 0;
    report(
        8,
        pass,
        format!("50 random configurations, {violations} violations, min margin {min_margin:.4e}, max FD error {max_disc:.2e}"),
    );
    assert!(pass);
}

fn criterion_09_garding() {
    let (g, op) = (slab(2), op(1.0));
    let mut disagree = Vec::new();
    let (mut elliptic, mut non_elliptic) = (0, 0);
    let mut missing_witness = Vec::new();
    for (name, l) in garding_suite() {
        let rep = garding_check(&l, &g, &op, GardingOptions::default()).unwrap();
        if !rep.agree() {
            disagree.push(name.clone());
        }
        if rep.symbol.holds {
            elliptic += 1;
        } else {
            non_elliptic += 1;
            if rep.symbol.witness.is_none() || rep.form.witness.is_none() {
                missing_witness.push(name);
            }
        }
    }
    let pass = disagree.is_empty() && missing_witness.is_empty() && elliptic > 0 && non_elliptic > 0;
    report(
        9,
        pass,
        format!("{elliptic} elliptic, {non_elliptic} non-elliptic; disagreements {disagree:?}; missing witnesses {missing_witness:?}"),
    );
    assert!(pass);
}

fn criterion_10_schatten_boundary() {
    let g = slab(3);
    let r = Realization::robin(1.0);
    let levels = [25.0, 50.0, 100.0, 200.0];
    let series: Vec<_> = levels
        .iter()
        .map(|&rad| svalues_vs_dirichlet(&r, 0.0, rad, &g, &op(1.0)).unwrap())
        .collect();
    let increments = |p: f64| -> Vec<f64> {
        let sums: Vec<f64> = series.iter().map(|s| s.schatten_sum(p)).collect();
        sums.windows(2).map(|w| w[1] - w[0]).collect()
    };
    let (conv, div) = (increments(1.1), increments(0.9));
    let shrinking = conv.windows(2).all(|w| w[1] < w[0]);
    let growing = div.windows(2).all(|w| w[1] > w[0]);
    let pass = shrinking && growing;
    report(
        10,
        pass,
        format!("tail increments p=1.1 {conv:.4?} (decreasing={shrinking}); p=0.9 {div:.4?} (increasing={growing})"),
    );
    assert!(pass);
}

fn criterion_11_abstract_diagram() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let op = op(1.0);
    let (mut worst, mut worst_inv) = (0.0f64, 0.0f64);
    for k in 0..50 {
        let g = if k % 2 == 0 { slab(2) } else { Geometry::half_cylinder(2).unwrap() };
        let xi = vec![rng.gen_range(-30i64..=30)];
        let lambda = Complex64::new(rng.gen_range(-20.0..0.5), rng.gen_range(-5.0..5.0));
        let b = rng.gen_range(-2.0..5.0);
        let m = op.mode(xi);
        // the half-cylinder truncation error is of size exp(-Re(kappa) X_cut)
        let decay = m.kappa(c(0.0)).re.min(m.kappa(lambda).re);
        let disc = match g.is_slab() {
            true => Discretization1D::new(4000, 1.0).unwrap(),
            false => Discretization1D::new(20_000, 25.0 / decay).unwrap(),
        };
        let res = diagram_check(&Realization::robin(b), lambda, &m, &disc, &g).unwrap();
        worst = worst.max(res.max());
        worst_inv = worst_inv.max(res.inversion);
    }
    let pass = worst <= 1e-6 && worst_inv <= 1e-8;
    report(11, pass, format!("50 (mode, lambda) pairs: max diagram residual {worst:.2e}, max E/F inversion residual {worst_inv:.2e}"));
    assert!(pass);
}

fn main() {
    let criteria: [(&str, fn()); 11] = [
        ("krein formula", criterion_01_krein_formula),
        ("weyl robin vs dirichlet", criterion_02_weyl_robin_vs_dirichlet),
        ("robin pair", criterion_03_robin_pair),
        ("iterates", criterion_04_iterates),
        ("dirichlet weyl", criterion_05_dirichlet_weyl),
        ("pole/eigenvalue duality", criterion_06_pole_eigenvalue_duality),
        ("q_mu growth", criterion_07_q_mu_growth),
        ("birman", criterion_08_birman),
        ("garding", criterion_09_garding),
        ("schatten boundary", criterion_10_schatten_boundary),
        ("abstract diagram", criterion_11_abstract_diagram),
    ];
    let failed: Vec<&str> = criteria
        .iter()
        .filter(|(_, f)| std::panic::catch_unwind(f).is_err())
        .map(|(name, _)| *name)
        .collect();
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
