//! Experiment configuration files.
//!
//! ```toml
//! output_dir = "results"
//!
//! [[experiment]]
//! name = "krein"
//! kind = "krein-check"
//! geometry = { kind = "slab", n = 2, ell = 1.0 }
//! boundary = { robin = 2.0 }
//! lambda = [-5.0]
//! radius = 50
//! grid = 10000
//! ```
//!
//! Every key except `name` and `kind` has a default; [`ExperimentConfig::resolved`]
//! fills them in so the effective configuration can be echoed verbatim.

use crate::CliError;
use kreinlab::extension_engine::BoundarySymbol;
use kreinlab::{Complex64, Geometry, ModelOperator, Realization};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    KreinCheck,
    MfunctionScan,
    WeylRobinDirichlet,
    WeylRobinPair,
    WeylIterates,
    DirichletWeyl,
    LowerboundScan,
    BirmanCheck,
    GardingCheck,
    DiagramCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::KreinCheck,
        ExperimentKind::MfunctionScan,
        ExperimentKind::WeylRobinDirichlet,
        ExperimentKind::WeylRobinPair,
        ExperimentKind::WeylIterates,
        ExperimentKind::DirichletWeyl,
        ExperimentKind::LowerboundScan,
        ExperimentKind::BirmanCheck,
        ExperimentKind::GardingCheck,
        ExperimentKind::DiagramCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::KreinCheck => "krein-check",
            ExperimentKind::MfunctionScan => "mfunction-scan",
            ExperimentKind::WeylRobinDirichlet => "weyl-robin-dirichlet",
            ExperimentKind::WeylRobinPair => "weyl-robin-pair",
            ExperimentKind::WeylIterates => "weyl-iterates",
            ExperimentKind::DirichletWeyl => "dirichlet-weyl",
            ExperimentKind::LowerboundScan => "lowerbound-scan",
            ExperimentKind::BirmanCheck => "birman-check",
            ExperimentKind::GardingCheck => "garding-check",
            ExperimentKind::DiagramCheck => "diagram-check",
        }
    }

    /// Keys without a default.
    pub fn required_keys(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::KreinCheck | ExperimentKind::MfunctionScan => &["boundary", "lambda"],
            ExperimentKind::WeylRobinDirichlet | ExperimentKind::WeylIterates => &["boundary"],
            ExperimentKind::WeylRobinPair => &["boundary", "b2"],
            ExperimentKind::DirichletWeyl => &["t"],
            ExperimentKind::LowerboundScan => &["mu"],
            ExperimentKind::BirmanCheck
            | ExperimentKind::GardingCheck
            | ExperimentKind::DiagramCheck => &[],
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::KreinCheck => "Krein resolvent formula vs FD oracle",
            ExperimentKind::MfunctionScan => "M-function and its poles",
            ExperimentKind::WeylRobinDirichlet => "s-number asymptotics, Robin vs Dirichlet (order -2)",
            ExperimentKind::WeylRobinPair => "s-number asymptotics, two Robin conditions (order -3)",
            ExperimentKind::WeylIterates => "s-number asymptotics of iterated resolvent differences",
            ExperimentKind::DirichletWeyl => "Dirichlet eigenvalue counting, area term",
            ExperimentKind::LowerboundScan => "growth of m_{-1/2}(Q^mu) as mu -> -infinity",
            ExperimentKind::BirmanCheck => "Birman-type lower bound m(A~) >= m(T)m(A_gamma)/(m(T)+m(A_gamma))",
            ExperimentKind::GardingCheck => "Garding inequality vs ellipticity of L",
            ExperimentKind::DiagramCheck => "T <-> T^lambda diagram and E/F inversion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKindSpec {
    Slab,
    HalfCylinder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub kind: GeometryKindSpec,
    pub n: usize,
    /// Slab thickness; ignored on the half-cylinder.
    #[serde(default = "one")]
    pub ell: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for GeometrySpec {
    fn default() -> Self {
        GeometrySpec {
            kind: GeometryKindSpec::Slab,
            n: 2,
            ell: 1.0,
        }
    }
}

impl GeometrySpec {
    pub fn build(&self) -> kreinlab::Result<Geometry> {
        match self.kind {
            GeometryKindSpec::Slab => Geometry::slab(self.n, self.ell),
            GeometryKindSpec::HalfCylinder => Geometry::half_cylinder(self.n),
        }
    }
}

/// Boundary condition `ν₁u = Cγ₀u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    /// `C = b`.
    Robin(f64),
    /// `C = c₀ + c₁⟨ξ'⟩`.
    Polynomial(Vec<f64>),
    /// `L = c₀ + c₁⟨ξ'⟩`, i.e. `C = P⁰ + c₀ + c₁⟨ξ'⟩`.
    LPolynomial(Vec<f64>),
}

impl BoundarySpec {
    pub fn c_symbol(&self) -> kreinlab::Result<BoundarySymbol> {
        match self {
            BoundarySpec::Robin(b) => Ok(BoundarySymbol::robin(*b)),
            BoundarySpec::Polynomial(c) => BoundarySymbol::polynomial(c.clone()),
            BoundarySpec::LPolynomial(c) => Ok(BoundarySymbol::polynomial(c.clone())?.dtn_plus()),
        }
    }

    pub fn l_symbol(&self) -> kreinlab::Result<BoundarySymbol> {
        Ok(self.c_symbol()?.plus_dtn(-1.0, Complex64::new(0.0, 0.0)))
    }

    pub fn robin_coefficient(&self) -> Option<f64> {
        match self {
            BoundarySpec::Robin(b) => Some(*b),
            _ => None,
        }
    }
}

/// One `[[experiment]]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub geometry: Option<GeometrySpec>,
    pub msq: Option<f64>,
    /// Lattice truncation `|ξ'| ≤ radius`.
    pub radius: Option<f64>,
    pub boundary: Option<BoundarySpec>,
    /// Second Robin coefficient for `weyl-robin-pair`.
    pub b2: Option<f64>,
    /// Real parts of the spectral parameters.
    pub lambda: Option<Vec<f64>>,
    /// Imaginary parts, same length as `lambda`.
    pub lambda_imag: Option<Vec<f64>>,
    /// FD cells per fiber.
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub inversion_tolerance: Option<f64>,
    /// Power `N` of the iterated difference.
    pub power: Option<u32>,
    pub k_max: Option<u64>,
    pub t: Option<Vec<f64>>,
    pub mu: Option<Vec<f64>>,
    /// Random configurations drawn by the randomized checks.
    pub samples: Option<usize>,
    /// Lattice radius of the Gårding form test.
    pub form_radius: Option<f64>,
}

/// Top-level configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Output directory, relative to the config file.
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub experiment: Vec<ExperimentConfig>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(".")
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        let mut cfg: ConfigFile = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        if cfg.output_dir.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.experiment.is_empty() {
            return Err(CliError::Validation("the config lists no experiments".into()));
        }
        let mut names = std::collections::BTreeSet::new();
        for e in &self.experiment {
            if !names.insert(&e.name) {
                return Err(CliError::Validation(format!("duplicate experiment name {:?}", e.name)));
            }
            e.validate()?;
        }
        Ok(())
    }
}

fn invalid(name: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("experiment {name:?}: {msg}"))
}

impl ExperimentConfig {
    /// The configuration with every default made explicit.
    pub fn resolved(&self) -> ExperimentConfig {
        let mut r = self.clone();
        r.geometry.get_or_insert_with(GeometrySpec::default);
        r.msq.get_or_insert(1.0);
        r.radius.get_or_insert(50.0);
        r.lambda.get_or_insert_with(|| vec![0.0]);
        let len = r.lambda.as_ref().map_or(1, Vec::len);
        r.lambda_imag.get_or_insert_with(|| vec![0.0; len]);
        r.grid.get_or_insert(1000);
        r.seed.get_or_insert(0);
        r.tolerance.get_or_insert(1e-6);
        r.inversion_tolerance.get_or_insert(1e-8);
        r.power.get_or_insert(2);
        r.k_max.get_or_insert(100);
        r.samples.get_or_insert(50);
        r.form_radius.get_or_insert(64.0);
        if matches!(self.kind, ExperimentKind::DiagramCheck) {
            r.boundary.get_or_insert(BoundarySpec::Robin(1.0));
        }
        r
    }

    fn validate(&self) -> Result<(), CliError> {
        let name = &self.name;
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(invalid(name, "name must be non-empty and use only [A-Za-z0-9._-]"));
        }
        let present = |key: &str| match key {
            "boundary" => self.boundary.is_some(),
            "lambda" => self.lambda.is_some(),
            "b2" => self.b2.is_some(),
            "t" => self.t.is_some(),
            "mu" => self.mu.is_some(),
            _ => true,
        };
        if let Some(key) = self.kind.required_keys().iter().find(|k| !present(k)) {
            return Err(invalid(name, format!("{} needs the key `{key}`", self.kind.name())));
        }
        let r = self.resolved();
        let geometry = r.geometry.unwrap();
        geometry.build().map_err(|e| invalid(name, e))?;
        ModelOperator::new(r.msq.unwrap()).map_err(|e| invalid(name, e))?;
        if r.radius.unwrap() < 0.0 || r.radius.unwrap().is_nan() {
            return Err(invalid(name, "radius must be >= 0"));
        }
        if r.lambda_imag.as_ref().unwrap().len() != r.lambda.as_ref().unwrap().len() {
            return Err(invalid(name, "lambda_imag must have the same length as lambda"));
        }
        if r.lambda.as_ref().unwrap().is_empty() {
            return Err(invalid(name, "lambda must not be empty"));
        }
        if let Some(b) = &r.boundary {
            b.c_symbol().map_err(|e| invalid(name, e))?;
        }
        let slab_only = matches!(
            self.kind,
            ExperimentKind::WeylIterates
                | ExperimentKind::DirichletWeyl
                | ExperimentKind::BirmanCheck
                | ExperimentKind::GardingCheck
        );
        if slab_only && geometry.kind != GeometryKindSpec::Slab {
            return Err(invalid(name, format!("{} needs the slab geometry", self.kind.name())));
        }
        match self.kind {
            ExperimentKind::KreinCheck if r.grid.unwrap() < 200 || !r.grid.unwrap().is_multiple_of(2) => {
                return Err(invalid(name, "krein-check needs an even grid of at least 200 cells"));
            }
            ExperimentKind::WeylRobinPair
                if r.boundary.as_ref().and_then(BoundarySpec::robin_coefficient).is_none() =>
            {
                return Err(invalid(name, "weyl-robin-pair needs boundary = { robin = b1 }"));
            }
            ExperimentKind::LowerboundScan if r.mu.as_ref().unwrap().iter().any(|&m| m >= 0.0 || m.is_nan()) => {
                return Err(invalid(name, "every mu must be negative"));
            }
            ExperimentKind::DirichletWeyl if r.t.as_ref().unwrap().is_empty() => {
                return Err(invalid(name, "t must not be empty"));
            }
            ExperimentKind::BirmanCheck | ExperimentKind::DiagramCheck if r.samples.unwrap() == 0 => {
                return Err(invalid(name, "samples must be positive"));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn realization(&self) -> kreinlab::Result<Realization> {
        let bc = self.boundary.as_ref().ok_or_else(|| kreinlab::LabError::InvalidInput("no boundary condition".into()))?;
        Ok(Realization::new(bc.c_symbol()?))
    }

    pub fn lambdas(&self) -> Vec<Complex64> {
        let re = self.lambda.as_deref().unwrap_or(&[0.0]);
        let im = self.lambda_imag.clone().unwrap_or_else(|| vec![0.0; re.len()]);
        re.iter().zip(im).map(|(&a, b)| Complex64::new(a, b)).collect()
    }
}
