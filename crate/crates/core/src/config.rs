//! The JSON run configuration shared by all CLI commands.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficient::{require_positive, CoefficientError, CoefficientField, Family};
use crate::geometry::Vec3;
use crate::mesh::{ball_layers, DomainGeometry, MeshError, SurfaceMesh, VolumeMesh};
use crate::potentials::{BoundaryDensity, DomainDensity};
use crate::quadrature::{QuadratureError, SingularPolicy};
use crate::system::{PointSource, RightHandSide, SolverMethod, DEFAULT_TOL};
use crate::verification::{build_meshes, builtin_case, ManufacturedCase};

/// Largest dense system (cells + panels) a run may request.
pub const MAX_DENSE_UNKNOWNS: usize = 16_000;

/// Samples of the positivity check on the bounding box of the domain.
const POSITIVITY_SAMPLES: usize = 17;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("level {level} gives {unknowns} unknowns, above the dense limit of {MAX_DENSE_UNKNOWNS}")]
    TooLarge { level: usize, unknowns: usize },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Ball,
    Cube,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: GeometryKind,
    /// Radius of the ball or half-width of the cube.
    #[serde(default = "one")]
    pub size: f64,
    /// Icosphere refinement for the ball, divisions per edge for the cube.
    pub refinement: usize,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    pub family: Family,
    pub params: Vec<f64>,
    /// Declared bounds; measured on the domain's bounding box when omitted.
    #[serde(default)]
    pub a_min: Option<f64>,
    #[serde(default)]
    pub a_max: Option<f64>,
}

/// A scalar function of `x`: a number or one of the names in [`NAMED_FUNCTIONS`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Constant(f64),
    Named(String),
}

pub const NAMED_FUNCTIONS: [&str; 8] = ["zero", "one", "x1", "x2", "x3", "x1_squared", "two_x1", "exp_x1_2_plus_2x1"];

impl FunctionSpec {
    pub fn resolve(&self) -> Result<Box<dyn Fn(&Vec3) -> f64 + Send + Sync>, ConfigError> {
        Ok(match self {
            Self::Constant(c) => {
                let c = *c;
                if !c.is_finite() {
                    return Err(ConfigError::Invalid("function constants must be finite".into()));
                }
                Box::new(move |_| c)
            }
            Self::Named(name) => match name.as_str() {
                "zero" => Box::new(|_| 0.0),
                "one" => Box::new(|_| 1.0),
                "x1" => Box::new(|x| x[0]),
                "x2" => Box::new(|x| x[1]),
                "x3" => Box::new(|x| x[2]),
                "x1_squared" => Box::new(|x| x[0] * x[0]),
                "two_x1" => Box::new(|x| 2.0 * x[0]),
                "exp_x1_2_plus_2x1" => Box::new(|x| x[0].exp() * (2.0 + 2.0 * x[0])),
                other => {
                    return Err(ConfigError::Invalid(format!(
                        "unknown function {other:?}; expected a number or one of {NAMED_FUNCTIONS:?}"
                    )))
                }
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub location: [f64; 3],
    #[serde(default = "one")]
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RhsConfig {
    Density { function: FunctionSpec },
    PointSources { sources: Vec<SourceConfig> },
}

impl Default for RhsConfig {
    fn default() -> Self {
        Self::Density {
            function: FunctionSpec::Constant(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub method: SolverMethod,
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: SolverMethod::DirectLu,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    /// A builtin manufactured case (`C1`..`C4`); it supplies coefficient, source and trace.
    #[serde(default)]
    pub case: Option<String>,
    #[serde(default)]
    pub coefficient: Option<CoefficientConfig>,
    #[serde(default)]
    pub rhs: Option<RhsConfig>,
    #[serde(default)]
    pub dirichlet: Option<FunctionSpec>,
    #[serde(default)]
    pub quadrature: SingularPolicy,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("bdie-output")
}

/// Cells plus panels of the mesh at `level`, without building it.
pub fn dense_unknowns(kind: GeometryKind, level: usize) -> usize {
    match kind {
        GeometryKind::Ball => {
            let panels = 20usize.saturating_mul(4usize.saturating_pow(level as u32));
            panels.saturating_mul(2 + 3 * (ball_layers(level) - 1))
        }
        GeometryKind::Cube => 6 * level.pow(3) + 12 * level.pow(2),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn domain(&self) -> DomainGeometry {
        match self.geometry.kind {
            GeometryKind::Ball => DomainGeometry::ball(self.geometry.size),
            GeometryKind::Cube => DomainGeometry::cube(self.geometry.size),
        }
    }

    pub fn manufactured_case(&self) -> Result<Option<ManufacturedCase>, ConfigError> {
        self.case
            .as_deref()
            .map(|label| {
                builtin_case(label, self.domain())
                    .ok_or_else(|| ConfigError::Invalid(format!("unknown case {label:?}; expected C1..C4")))
            })
            .transpose()
    }

    /// Checks everything that can be checked before meshing.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.geometry.size > 0.0 && self.geometry.size.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "geometry size must be positive, got {}",
                self.geometry.size
            )));
        }
        self.quadrature.validate()?;
        if !(self.solver.tol > 0.0 && self.solver.tol < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "solver tolerance must lie in (0, 1), got {}",
                self.solver.tol
            )));
        }
        self.check_level(self.geometry.refinement)?;
        match self.manufactured_case()? {
            Some(_) => {
                if self.coefficient.is_some() || self.rhs.is_some() || self.dirichlet.is_some() {
                    return Err(ConfigError::Invalid(
                        "a manufactured case supplies coefficient, rhs and dirichlet; remove them".into(),
                    ));
                }
            }
            None => {
                if self.coefficient.is_none() {
                    return Err(ConfigError::Invalid("missing coefficient (or a manufactured case)".into()));
                }
                if let Some(RhsConfig::Density { function }) = &self.rhs {
                    drop(function.resolve()?);
                }
                if let Some(d) = &self.dirichlet {
                    drop(d.resolve()?);
                }
            }
        }
        let field = self.field()?;
        require_positive(&field, &self.domain().bounding_box(), POSITIVITY_SAMPLES)?;
        Ok(())
    }

    /// Rejects levels whose dense system would exceed [`MAX_DENSE_UNKNOWNS`].
    pub fn check_level(&self, level: usize) -> Result<(), ConfigError> {
        if self.geometry.kind == GeometryKind::Cube && level == 0 {
            return Err(ConfigError::Invalid("a cube needs at least one division per edge".into()));
        }
        let unknowns = dense_unknowns(self.geometry.kind, level);
        if unknowns > MAX_DENSE_UNKNOWNS {
            return Err(ConfigError::TooLarge { level, unknowns });
        }
        Ok(())
    }

    pub fn field(&self) -> Result<CoefficientField, ConfigError> {
        if let Some(case) = self.manufactured_case()? {
            return Ok(case.field);
        }
        let c = self
            .coefficient
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("missing coefficient".into()))?;
        Ok(match (c.a_min, c.a_max) {
            (Some(lo), Some(hi)) => CoefficientField::new(c.family, &c.params, lo, hi)?,
            (None, None) => {
                CoefficientField::fitted(c.family, &c.params, &self.domain().bounding_box(), POSITIVITY_SAMPLES)?
            }
            _ => return Err(ConfigError::Invalid("give both a_min and a_max, or neither".into())),
        })
    }

    pub fn meshes(&self, level: usize) -> Result<(SurfaceMesh, VolumeMesh), ConfigError> {
        self.check_level(level)?;
        Ok(build_meshes(&self.domain(), level)?)
    }

    pub fn point_sources(&self) -> Vec<PointSource> {
        match &self.rhs {
            Some(RhsConfig::PointSources { sources }) => sources
                .iter()
                .map(|s| PointSource {
                    location: Vec3::from(s.location),
                    strength: s.strength,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn rhs_on(&self, volume: &VolumeMesh) -> Result<RightHandSide, ConfigError> {
        if let Some(case) = self.manufactured_case()? {
            return Ok(RightHandSide::Density(case.source(volume)));
        }
        Ok(match self.rhs.clone().unwrap_or_default() {
            RhsConfig::Density { function } => RightHandSide::Density(DomainDensity::sample(volume, function.resolve()?)),
            RhsConfig::PointSources { .. } => RightHandSide::PointSources(self.point_sources()),
        })
    }

    pub fn dirichlet_on(&self, surface: &SurfaceMesh) -> Result<BoundaryDensity, ConfigError> {
        if let Some(case) = self.manufactured_case()? {
            return Ok(case.phi0(surface));
        }
        let spec = self.dirichlet.clone().unwrap_or(FunctionSpec::Constant(0.0));
        Ok(BoundaryDensity::sample(surface, spec.resolve()?))
    }
}
