//! Input documents (JSON or TOML) and the pipeline configuration.

use std::path::{Path, PathBuf};

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{parse_rat, Rat, ScalarError, ScalarField, ScalarLiteral};
use crate::toric::{DiscClass, Mode, Superpotential, ToricData, ToricError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Toric(#[from] ToricError),
}

/// `"rational"` or `{"char": p, "degree": k}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Named(String),
    Finite {
        char: u64,
        #[serde(default = "one")]
        degree: usize,
    },
}

fn one() -> usize {
    1
}

impl FieldSpec {
    pub fn build(&self) -> Result<ScalarField, ConfigError> {
        match self {
            FieldSpec::Named(s) if s == "rational" => Ok(ScalarField::Rational),
            FieldSpec::Named(s) => Err(ConfigError::Invalid(format!("unknown field {s:?}"))),
            FieldSpec::Finite { char, degree } => Ok(ScalarField::finite(*char, *degree)?),
        }
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Named("rational".into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionDoc {
    pub area: ScalarLiteral,
    pub boundary: Vec<i64>,
    pub coeff: ScalarLiteral,
    #[serde(default)]
    pub pairing: Option<Vec<i64>>,
}

/// The toric input document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricDocument {
    pub dimension: usize,
    pub normals: Vec<Vec<i64>>,
    pub areas: Vec<ScalarLiteral>,
    #[serde(default)]
    pub corrections: Vec<CorrectionDoc>,
    #[serde(default)]
    pub field: FieldSpec,
    #[serde(default)]
    pub precision: Option<ScalarLiteral>,
    #[serde(default = "monotone")]
    pub mode: Mode,
}

fn monotone() -> Mode {
    Mode::Monotone
}

impl ToricDocument {
    pub fn toric(&self) -> Result<ToricData, ConfigError> {
        let areas = self.areas.iter().map(|a| a.to_rat()).collect::<Result<Vec<_>, _>>()?;
        if let Some(bad) = areas.iter().find(|a| !a.is_positive()) {
            return Err(ConfigError::Invalid(format!("area {bad} is not positive")));
        }
        Ok(ToricData::new(self.dimension, self.normals.clone(), areas)?)
    }

    pub fn corrections(&self, field: &ScalarField) -> Result<Vec<DiscClass>, ConfigError> {
        self.corrections
            .iter()
            .map(|c| {
                Ok(DiscClass {
                    area: c.area.to_rat()?,
                    boundary: c.boundary.clone(),
                    coeff: c.coeff.to_scalar(field)?,
                    pairing: c.pairing.clone(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl std::str::FromStr for Level {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(ConfigError::Invalid(format!("unknown level {s:?}"))),
        }
    }
}

/// Either a path (relative to the configuration file) or an inline document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ToricRef {
    Path(String),
    Inline(ToricDocument),
}

/// The on-disk pipeline configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigFile {
    pub toric: ToricRef,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub precision: Option<ScalarLiteral>,
    #[serde(default)]
    pub level: Option<Level>,
    #[serde(default)]
    pub bracket_bound: Option<u32>,
    #[serde(default)]
    pub pearl_bound: Option<u32>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub cache: Option<PathBuf>,
}

pub const DEFAULT_BRACKET_BOUND: u32 = 6;
pub const DEFAULT_PEARL_BOUND: u32 = 3;

/// A validated pipeline configuration.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub document: ToricDocument,
    pub level: Level,
    pub bracket_bound: u32,
    pub pearl_bound: u32,
    pub seed: u64,
    pub cache: Option<PathBuf>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub precision: Option<String>,
    pub level: Option<Level>,
    pub cache: Option<PathBuf>,
}

fn parse_text<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, ConfigError> {
    let toml = path.extension().is_some_and(|e| e == "toml");
    let parsed = if toml {
        toml::from_str(text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(text).map_err(|e| e.to_string())
    };
    parsed.map_err(|message| ConfigError::Parse { path: path.to_path_buf(), message })
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })
}

pub fn load_document(path: &Path) -> Result<ToricDocument, ConfigError> {
    parse_text(path, &read(path)?)
}

impl PipelineConfig {
    /// Reads either a pipeline configuration (with a `toric` entry) or a bare
    /// toric document, then applies `overrides` and validates.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, ConfigError> {
        let text = read(path)?;
        let file: ConfigFile = match parse_text::<ConfigFile>(path, &text) {
            Ok(f) => f,
            Err(_) => ConfigFile {
                toric: ToricRef::Inline(parse_text(path, &text)?),
                field: None,
                precision: None,
                level: None,
                bracket_bound: None,
                pearl_bound: None,
                seed: None,
                cache: None,
            },
        };
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_file(file, base, overrides)
    }

    pub fn from_file(file: ConfigFile, base: &Path, overrides: &Overrides) -> Result<Self, ConfigError> {
        let mut document = match file.toric {
            ToricRef::Path(p) => load_document(&base.join(p))?,
            ToricRef::Inline(d) => d,
        };
        if let Some(f) = file.field {
            document.field = f;
        }
        if let Some(p) = file.precision {
            document.precision = Some(p);
        }
        if let Some(p) = &overrides.precision {
            document.precision = Some(ScalarLiteral::Text(p.clone()));
        }
        let config = PipelineConfig {
            document,
            level: overrides.level.or(file.level).unwrap_or(Level::Quick),
            bracket_bound: file.bracket_bound.unwrap_or(DEFAULT_BRACKET_BOUND),
            pearl_bound: file.pearl_bound.unwrap_or(DEFAULT_PEARL_BOUND),
            seed: overrides.seed.or(file.seed).unwrap_or(0),
            cache: overrides.cache.clone().or(file.cache.map(|c| base.join(c))),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_document(document: ToricDocument) -> Result<Self, ConfigError> {
        let config = PipelineConfig {
            document,
            level: Level::Quick,
            bracket_bound: DEFAULT_BRACKET_BOUND,
            pearl_bound: DEFAULT_PEARL_BOUND,
            seed: 0,
            cache: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn precision(&self) -> Result<Option<Rat>, ConfigError> {
        self.document.precision.as_ref().map(|p| p.to_rat().map_err(ConfigError::from)).transpose()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let field = self.document.field.build()?;
        let toric = self.document.toric()?;
        Superpotential::build(&toric, &field, self.document.mode, self.document.corrections(&field)?)?;
        if self.bracket_bound == 0 || self.pearl_bound == 0 {
            return Err(ConfigError::Invalid("bounds must be positive".into()));
        }
        match (self.document.mode, self.precision()?) {
            (Mode::Novikov, None) => Err(ConfigError::Invalid("Novikov mode needs a precision".into())),
            (_, Some(p)) if !p.is_positive() => Err(ConfigError::Invalid(format!("precision {p} is not positive"))),
            _ => Ok(()),
        }
    }
}

/// Parses a `p/q` precision given on the command line.
pub fn parse_precision(s: &str) -> Result<Rat, ConfigError> {
    let p = parse_rat(s)?;
    if !p.is_positive() {
        return Err(ConfigError::Invalid(format!("precision {p} is not positive")));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_json(areas: &str) -> String {
        format!(r#"{{"dimension": 1, "normals": [[1], [-1]], "areas": [{areas}], "field": {{"char": 5}}}}"#)
    }

    #[test]
    fn bare_document_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("line.json");
        std::fs::write(&path, line_json(r#""1", "1""#)).unwrap();
        let c = PipelineConfig::load(&path, &Overrides::default()).unwrap();
        assert_eq!(c.document.field, FieldSpec::Finite { char: 5, degree: 1 });
        assert_eq!(c.bracket_bound, DEFAULT_BRACKET_BOUND);
    }

    #[test]
    fn zero_area_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("line.json");
        std::fs::write(&path, line_json(r#""0", "1""#)).unwrap();
        assert!(matches!(PipelineConfig::load(&path, &Overrides::default()), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn toml_config_with_reference() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("line.json"), line_json(r#""1", "1""#)).unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "toric = \"line.json\"\nseed = 4\nlevel = \"full\"\n").unwrap();
        let o = Overrides { seed: Some(9), ..Overrides::default() };
        let c = PipelineConfig::load(&path, &o).unwrap();
        assert_eq!((c.seed, c.level), (9, Level::Full));
    }
}
