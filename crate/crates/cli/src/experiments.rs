//! Dispatch from a resolved [`ExperimentConfig`] to the library. Every
//! number in a table comes from a library call.

use crate::config::{BoundarySpec, ExperimentConfig, ExperimentKind};
use crate::output::{mode_cells, mode_columns, Cell, Table};
use kreinlab::extension_engine::{diagram_check, krein_apply, m_function};
use kreinlab::fiber_model::oracle_solve_richardson;
use kreinlab::lower_bounds::{birman_check, garding_check, garding_suite, q_mu_scan, GardingOptions};
use kreinlab::spectral_asymptotics::{
    dirichlet_weyl, svalues_iterates, svalues_robin_pair, svalues_vs_dirichlet, weyl_fit, SingularValueSeries,
};
use kreinlab::{
    BoundaryCondition, Complex64, Discretization1D, Geometry, GridFunction, LabError, ModelOperator, Realization,
    Result,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use toml::Value;

/// Table plus scalar results of one experiment.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub table: Table,
    pub summary: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
    /// Failed assertions; non-empty means exit code 3.
    pub failures: Vec<String>,
}

impl Outcome {
    fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_owned(), value.into());
    }
}

struct Setup {
    geom: Geometry,
    op: ModelOperator,
    radius: f64,
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup> {
    Ok(Setup {
        geom: cfg.geometry.unwrap_or_default().build()?,
        op: ModelOperator::new(cfg.msq.unwrap_or(1.0))?,
        radius: cfg.radius.unwrap_or(50.0),
    })
}

fn header(dim: usize, before: &[&str], after: &[&str]) -> Table {
    let mut cols: Vec<String> = before.iter().map(|s| s.to_string()).collect();
    cols.extend(mode_columns(dim));
    cols.extend(after.iter().map(|s| s.to_string()));
    Table { columns: cols, rows: Vec::new() }
}

/// Runs one experiment; `cfg` must be resolved.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    match cfg.kind {
        ExperimentKind::KreinCheck => krein(cfg, &s),
        ExperimentKind::MfunctionScan => mfunction(cfg, &s),
        ExperimentKind::WeylRobinDirichlet => {
            let lambda = cfg.lambdas()[0].re;
            let series = svalues_vs_dirichlet(&cfg.realization()?, lambda, s.radius, &s.geom, &s.op)?;
            Ok(series_outcome(series, 2.0 / (s.geom.n as f64 - 1.0)))
        }
        ExperimentKind::WeylRobinPair => {
            let b1 = cfg.boundary.as_ref().and_then(BoundarySpec::robin_coefficient).unwrap_or(0.0);
            let b2 = cfg.b2.unwrap_or(0.0);
            let series = svalues_robin_pair(b1, b2, cfg.lambdas()[0].re, s.radius, &s.geom, &s.op)?;
            Ok(series_outcome(series, 3.0 / (s.geom.n as f64 - 1.0)))
        }
        ExperimentKind::WeylIterates => {
            let power = cfg.power.unwrap_or(2);
            let grid = cfg.grid.unwrap_or(1000);
            let series = svalues_iterates(&cfg.realization()?, power, s.radius, &s.geom, &s.op, grid)?;
            Ok(series_outcome(series, 2.0 * power as f64 / (s.geom.n as f64 - 1.0)))
        }
        ExperimentKind::DirichletWeyl => dirichlet(cfg, &s),
        ExperimentKind::LowerboundScan => lowerbound(cfg, &s),
        ExperimentKind::BirmanCheck => birman(cfg, &s),
        ExperimentKind::GardingCheck => garding(cfg, &s),
        ExperimentKind::DiagramCheck => diagram(cfg, &s),
    }
}

/// Right-hand side used by `krein-check` on every mode.
fn krein_datum(x: f64) -> Complex64 {
    Complex64::new((3.0 * x).cos() + x * x, 0.0)
}

fn krein(cfg: &ExperimentConfig, s: &Setup) -> Result<Outcome> {
    let r = cfg.realization()?;
    let grid = cfg.grid.unwrap_or(1000);
    let tol = cfg.tolerance.unwrap_or(1e-6);
    let mut out = Outcome {
        table: header(s.geom.boundary_dim(), &["lambda_re", "lambda_im"], &["relative_l2_discrepancy"]),
        ..Default::default()
    };
    let mut worst: f64 = 0.0;
    for lambda in cfg.lambdas() {
        let modes = s.op.modes(&s.geom, s.radius);
        let data: BTreeMap<Vec<i64>, GridFunction> = modes
            .iter()
            .map(|m| {
                let disc = Discretization1D::for_fiber(&s.geom, m, lambda, grid)?;
                Ok((m.xi.clone(), GridFunction::sample(disc, krein_datum)))
            })
            .collect::<Result<_>>()?;
        let solutions = krein_apply(&r, lambda, &data, &s.geom, &s.op)?;
        for m in &modes {
            let f = &data[&m.xi];
            let c = r.c.eval(m, &s.geom)?;
            let bc = BoundaryCondition::NeumannType(c);
            let zero = Complex64::new(0.0, 0.0);
            let oracle = oracle_solve_richardson(m, lambda, bc, &f.values, zero, &f.disc, &s.geom)?;
            let d = solutions[&m.xi].relative_l2_distance(&oracle)?;
            worst = worst.max(d);
            if d > tol {
                out.failures.push(format!("mode {:?}, lambda {lambda}: discrepancy {d:e} > {tol:e}", m.xi));
            }
            let mut row: Vec<Cell> = vec![lambda.re.into(), lambda.im.into()];
            row.extend(mode_cells(&m.xi));
            row.push(d.into());
            out.table.push(row);
        }
    }
    out.set("datum", "f(x) = cos(3x) + x^2 on every mode");
    out.set("oracle", "second-order FD with Richardson extrapolation");
    out.set("max_discrepancy", worst);
    Ok(out)
}

fn mfunction(cfg: &ExperimentConfig, s: &Setup) -> Result<Outcome> {
    let r = cfg.realization()?;
    let mut out = Outcome {
        table: header(s.geom.boundary_dim(), &["lambda_re", "lambda_im"], &["m_re", "m_im"]),
        ..Default::default()
    };
    for lambda in cfg.lambdas() {
        let sample = m_function(&r, lambda, s.radius, &s.geom, &s.op)?;
        for (xi, v) in &sample.values {
            let mut row: Vec<Cell> = vec![lambda.re.into(), lambda.im.into()];
            row.extend(mode_cells(xi));
            row.extend([v.re.into(), v.im.into()]);
            out.table.push(row);
        }
    }
    Ok(out)
}

fn series_outcome(series: SingularValueSeries, decay: f64) -> Outcome {
    let dim = series.modes.first().map_or(0, Vec::len);
    let scaled = format!("s_j_times_j^{decay}");
    let mut out = Outcome {
        table: header(dim, &["j"], &["s_j", &scaled]),
        warnings: series.warnings.clone(),
        ..Default::default()
    };
    for (k, (xi, v)) in series.modes.iter().zip(&series.values).enumerate() {
        let j = k + 1;
        let mut row: Vec<Cell> = vec![j.into()];
        row.extend(mode_cells(xi));
        row.extend([(*v).into(), (v * (j as f64).powf(decay)).into()]);
        out.table.push(row);
    }
    out.set("operator", series.operator.clone());
    out.set("radius", series.radius);
    out.set("series_length", series.len() as i64);
    out.set("expected_exponent", -decay);
    match weyl_fit(&series.values, Some(decay)) {
        Ok(fit) => {
            out.set("fit_exponent", fit.exponent);
            out.set("fit_constant", fit.constant);
            out.set("fit_window_start", fit.window.0 as i64);
            out.set("fit_window_end", fit.window.1 as i64);
            out.set("fit_residual", fit.residual);
            if let Some(p) = fit.plateau {
                out.set("plateau", p);
            }
        }
        Err(e) => out.warnings.push(format!("no power-law fit: {e}")),
    }
    out
}

fn dirichlet(cfg: &ExperimentConfig, s: &Setup) -> Result<Outcome> {
    let ts = cfg.t.clone().unwrap_or_default();
    let w = dirichlet_weyl(s.radius, cfg.k_max.unwrap_or(100), &s.geom, &s.op, &ts)?;
    let exponent = s.geom.n as f64 / 2.0;
    let mut out = Outcome {
        table: Table::new(&["t", "count", "c_a_t_pow", "ratio"]),
        ..Default::default()
    };
    for &(t, count) in &w.table {
        let weyl = w.c_a * t.powf(exponent);
        out.table.push(vec![t.into(), (count as i64).into(), weyl.into(), (count as f64 / weyl).into()]);
    }
    out.set("c_a", w.c_a);
    out.set("ceiling", w.ceiling);
    out.set("t_exponent", exponent);
    Ok(out)
}

fn lowerbound(cfg: &ExperimentConfig, s: &Setup) -> Result<Outcome> {
    let scan = q_mu_scan(&cfg.mu.clone().unwrap_or_default(), &s.geom, &s.op, s.radius)?;
    let mut out = Outcome {
        table: header(s.geom.boundary_dim(), &["mu", "bound"], &["half_sqrt_abs_mu"]),
        warnings: scan.warnings.clone(),
        ..Default::default()
    };
    for r in &scan.rows {
        let mut row: Vec<Cell> = vec![r.mu.into(), r.bound.into()];
        row.extend(mode_cells(&r.minimizer));
        row.push((0.5 * r.mu.abs().sqrt()).into());
        out.table.push(row);
    }
    out.set("monotone", scan.monotone);
    if !scan.monotone {
        out.failures.push("the bound is not strictly increasing as mu decreases".into());
    }
    Ok(out)
}

fn birman(cfg: &ExperimentConfig, s: &Setup) -> Result<Outcome> {
    let configs: Vec<f64> = match cfg.boundary.as_ref() {
        Some(bc) => vec![bc.robin_coefficient().unwrap_or(f64::NAN)],
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
            (0..cfg.samples.unwrap_or(50)).map(|_| rng.gen_range(0.0..10.0)).collect()
        }
    };
    let mut out = Outcome {
        table: Table::new(&[
            "index",
            "b",
            "m_a_gamma",
            "m_t",
            "m_l_minus_half",
            "m_realization",
            "birman_bound",
            "margin",
            "fd_error",
            "holds",
        ]),
        ..Default::default()
    };
    let grid = cfg.grid.unwrap_or(1000);
    for (k, b) in configs.into_iter().enumerate() {
        let r = match cfg.boundary.as_ref() {
            Some(_) => cfg.realization()?,
            None => Realization::robin(b),
        };
        let rep = birman_check(&r, &s.geom, &s.op, s.radius, grid)?;
        let opt = |v: Option<f64>| v.map_or(Cell::Text(String::new()), Cell::Float);
        let holds = match rep.holds {
            Some(true) => "true",
            Some(false) => "false",
            None => "hypothesis fails",
        };
        if rep.holds == Some(false) {
            out.failures.push(format!("configuration {k} (b = {b}): margin {:?}", rep.margin));
        }
        out.table.push(vec![
            k.into(),
            b.into(),
            rep.m_a_gamma.into(),
            rep.m_t.into(),
            rep.m_l_minus_half.into(),
            rep.m_realization.into(),
            opt(rep.birman_bound),
            opt(rep.margin),
            rep.discretization_error.into(),
            holds.into(),
        ]);
        if k == 0 {
            out.set("trial_space", rep.trial_space.clone());
        }
    }
    Ok(out)
}

fn garding(cfg: &ExperimentConfig, s: &Setup) -> Result<Outcome> {
    let suite = match &cfg.boundary {
        Some(bc) => vec![(format!("{bc:?}"), bc.l_symbol()?)],
        None => garding_suite(),
    };
    let options = GardingOptions {
        symbol_radius: s.radius,
        form_radius: cfg.form_radius.unwrap_or(64.0),
        ..GardingOptions::default()
    };
    let mut out = Outcome {
        table: Table::new(&[
            "label",
            "symbol_holds",
            "c_prime",
            "k_prime",
            "symbol_witness",
            "form_holds",
            "c",
            "k",
            "form_witness",
            "agree",
        ]),
        ..Default::default()
    };
    let witness = |w: &Option<Vec<i64>>| {
        w.as_ref()
            .map(|xi| xi.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))
            .unwrap_or_default()
    };
    for (label, l) in suite {
        let rep = garding_check(&l, &s.geom, &s.op, options)?;
        if !rep.agree() {
            out.failures.push(format!("{label}: symbol and form tests disagree"));
        }
        out.table.push(vec![
            label.into(),
            rep.symbol.holds.into(),
            rep.symbol.c.into(),
            rep.symbol.k.into(),
            witness(&rep.symbol.witness).into(),
            rep.form.holds.into(),
            rep.form.c.into(),
            rep.form.k.into(),
            witness(&rep.form.witness).into(),
            rep.agree().into(),
        ]);
    }
    Ok(out)
}

fn diagram(cfg: &ExperimentConfig, s: &Setup) -> Result<Outcome> {
    let r = cfg.realization()?;
    let grid = cfg.grid.unwrap_or(1000);
    let tol = cfg.tolerance.unwrap_or(1e-6);
    let inv_tol = cfg.inversion_tolerance.unwrap_or(1e-8);
    let modes = s.op.modes(&s.geom, s.radius);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    let mut out = Outcome {
        table: header(
            s.geom.boundary_dim(),
            &["index"],
            &["lambda_re", "lambda_im", "shifted_form", "null_solution", "inversion"],
        ),
        ..Default::default()
    };
    for k in 0..cfg.samples.unwrap_or(50) {
        let m = &modes[rng.gen_range(0..modes.len())];
        let lambda = Complex64::new(rng.gen_range(-20.0..0.5 * s.op.msq), rng.gen_range(-5.0..5.0));
        let disc = if s.geom.is_slab() {
            Discretization1D::new(grid, s.geom.ell)?
        } else {
            let zero = Complex64::new(0.0, 0.0);
            let decay = m.kappa(zero).re.min(m.kappa(lambda).re);
            if decay <= 0.0 {
                return Err(LabError::Domain {
                    mode: m.xi.clone(),
                    lambda: lambda.to_string(),
                    reason: "no decay on the half-cylinder".into(),
                });
            }
            Discretization1D::new(grid, 25.0 / decay)?
        };
        let res = diagram_check(&r, lambda, m, &disc, &s.geom)?;
        if res.max() > tol || res.inversion > inv_tol {
            out.failures.push(format!("pair {k}, mode {:?}, lambda {lambda}: {res:?}", m.xi));
        }
        let mut row: Vec<Cell> = vec![k.into()];
        row.extend(mode_cells(&m.xi));
        row.extend([
            lambda.re.into(),
            lambda.im.into(),
            res.shifted_form.into(),
            res.null_solution.into(),
            res.inversion.into(),
        ]);
        out.table.push(row);
    }
    Ok(out)
}
