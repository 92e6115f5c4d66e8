//! End-to-end run: input document, superpotential, Jacobian ring, summands,
//! Floer checks, and the pearl oracle, assembled into one JSON report.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::cache::{content_hash, GroebnerCache};
use crate::config::{ConfigError, CorrectionDoc, FieldSpec, Level, PipelineConfig};
use crate::floer::{self, Action, BoundingCochain, FloerError, FloerModel, Model};
use crate::groupring;
use crate::jacobian::{self, eigen, mpoly, JacobianError, QuotientAlgebra, Summand, DEFAULT_STEP_BUDGET};
use crate::pearl::{self, CheckItem, MorseData, OracleReport, PearlError};
use crate::scalar::{Field, NovikovField, Rat, ScalarField};
use crate::toric::{Mode, Superpotential, ToricData, ToricError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("toric: {0}")]
    Toric(#[from] ToricError),
    #[error("jacobian: {0}")]
    Jacobian(#[from] JacobianError),
    #[error("floer: {0}")]
    Floer(#[from] FloerError),
    #[error("pearl: {0}")]
    Pearl(#[from] PearlError),
    #[error("cache: {0}")]
    Cache(#[from] std::io::Error),
}

impl PipelineError {
    /// `2` for problems with the input (including a field that does not split
    /// the spectrum), `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Toric(_) | PipelineError::Jacobian(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputSummary {
    pub hash: String,
    pub field: String,
    pub mode: Mode,
    pub precision: Option<String>,
    pub dimension: usize,
    pub facets: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JacobianSummary {
    pub dim: usize,
    pub groebner: Vec<String>,
    pub basis: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub model: String,
    pub potential: String,
    pub potential_matches: bool,
    pub differential: Vec<String>,
    pub differential_matches: bool,
    pub differential_zero: bool,
    pub co_values: Vec<String>,
    pub co_projections: Vec<String>,
    pub co_matches: bool,
    pub co_rank: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummandReport {
    pub index: usize,
    pub dim: usize,
    pub eigenvalues: Vec<String>,
    pub xi: Vec<String>,
    pub valuation: Vec<String>,
    pub interior: bool,
    pub generalised_eigenspace: bool,
    pub exp_log: Option<bool>,
    pub models: Vec<ModelReport>,
    /// Three-way check of the brackets of every basic class, `|c| <=` the
    /// bracket bound.
    pub brackets_checked: usize,
    pub bracket_failures: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PearlSection {
    pub q: Vec<String>,
    pub v: Vec<String>,
    pub lambda: String,
    pub checks: Vec<CheckItem>,
    pub oracle: Vec<OracleReport>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub input: InputSummary,
    pub potential: String,
    pub jacobian: JacobianSummary,
    pub summands: Vec<SummandReport>,
    pub pearl: Option<PearlSection>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise") + "\n"
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

/// Every input that changes the Groebner basis.
#[derive(Serialize)]
struct CacheKey<'a> {
    normals: &'a [Vec<i64>],
    areas: Vec<String>,
    corrections: &'a [CorrectionDoc],
    field: &'a FieldSpec,
    precision: Option<String>,
    mode: Mode,
}

/// Input data resolved from a configuration.
pub struct Prepared {
    pub toric: ToricData,
    pub base: ScalarField,
    pub w: Superpotential,
    pub precision: Option<Rat>,
    pub hash: String,
}

pub fn prepare(config: &PipelineConfig) -> Result<Prepared, PipelineError> {
    let doc = &config.document;
    let base = doc.field.build()?;
    let mut toric = doc.toric()?;
    if doc.mode == Mode::Monotone {
        toric = toric.monotone_normalize()?.data;
    }
    let w = Superpotential::build(&toric, &base, doc.mode, doc.corrections(&base)?)?;
    let precision = config.precision()?;
    let key = CacheKey {
        normals: toric.normals(),
        areas: toric.areas().iter().map(|a| a.to_string()).collect(),
        corrections: &doc.corrections,
        field: &doc.field,
        precision: precision.map(|p| p.to_string()),
        mode: doc.mode,
    };
    Ok(Prepared { hash: content_hash(&key), toric, base, w, precision })
}

/// Builds `A/I`, reusing a cached Groebner basis when one is present.
pub fn quotient<F: Field>(field: &F, prepared: &Prepared, cache: Option<&Path>) -> Result<QuotientAlgebra<F>, PipelineError> {
    let w = &prepared.w;
    let vars = w.rank() + 1;
    let generators = jacobian::jacobian_ideal(field, w);
    let store = cache.map(GroebnerCache::new).transpose()?;
    if let Some(gb) = store.as_ref().and_then(|s| s.load(field, &prepared.hash, vars)) {
        log::info!("Groebner cache hit {}", prepared.hash);
        return Ok(QuotientAlgebra::from_groebner(field, w.rank(), generators, gb)?);
    }
    let gb = mpoly::groebner(field, &generators, DEFAULT_STEP_BUDGET).ok_or(JacobianError::Budget(DEFAULT_STEP_BUDGET))?;
    if let Some(s) = &store {
        s.store(field, &prepared.hash, vars, &gb)?;
        log::info!("Groebner cache stored {}", prepared.hash);
    }
    Ok(QuotientAlgebra::from_groebner(field, w.rank(), generators, gb)?)
}

fn fmt_all<F: Field>(field: &F, xs: &[F::Elem]) -> Vec<String> {
    xs.iter().map(|x| field.format(x)).collect()
}

fn model_report<F: Field>(
    w: &Superpotential,
    q: &QuotientAlgebra<F>,
    s: &Summand<F>,
    action: &Action<F>,
    model: Model,
) -> Result<ModelReport, PipelineError> {
    let alg = &action.algebra;
    let fm = FloerModel::new(w, action)?;
    let delta = BoundingCochain::for_action(action, model)?;
    let pot = fm.weak_bounding_check(&delta)?;
    let diff = fm.deformed_differential(&delta)?;
    let co = floer::co_against_projection(&fm, &delta, q, s)?;
    let differential_matches = diff.iter().all(|d| d.agree);
    let differential_zero = diff.iter().all(|d| alg.is_zero(&d.definition));
    let passed = pot.agree && differential_matches && differential_zero && co.agree && co.rank == s.dim();
    Ok(ModelReport {
        model: format!("{model:?}"),
        potential: alg.format(&pot.definition),
        potential_matches: pot.agree,
        differential: diff.iter().map(|d| alg.format(&d.definition)).collect(),
        differential_matches,
        differential_zero,
        co_values: co.values.iter().map(|v| alg.format(v)).collect(),
        co_projections: co.projections.iter().map(|v| alg.format(v)).collect(),
        co_matches: co.agree,
        co_rank: co.rank,
        passed,
    })
}

fn summand_report<F: Field>(
    config: &PipelineConfig,
    prepared: &Prepared,
    q: &QuotientAlgebra<F>,
    index: usize,
    s: &Summand<F>,
    morse: Option<&MorseData>,
) -> Result<SummandReport, PipelineError> {
    let field = s.field();
    let action = Action::from_summand(s);
    let models = match config.level {
        Level::Full => Model::available(field.characteristic()),
        Level::Quick => vec![Model::Pearl],
    };
    let models = models
        .into_iter()
        .map(|m| model_report(&prepared.w, q, s, &action, m))
        .collect::<Result<Vec<_>, _>>()?;
    let (mut checked, mut failures) = (0, Vec::new());
    if let Some(md) = morse {
        let basic = &prepared.w.classes()[..prepared.w.basic_count()];
        let sweep = pearl::oracle_compare(md, field, &s.xi, basic, config.bracket_bound, 1, config.seed)?;
        checked = sweep.entries.len();
        failures = sweep
            .entries
            .iter()
            .filter(|e| !e.passed)
            .map(|e| format!("facet {} c {:?}: {} vs {}", e.facet, e.c, e.bracket, e.closed_form))
            .collect();
    }
    let interior = prepared.toric.interior_contains(&s.valuation);
    let generalised_eigenspace = s.is_generalised_eigenspace();
    let exp_log = s.exp_log_holds();
    let passed = interior
        && generalised_eigenspace
        && exp_log != Some(false)
        && failures.is_empty()
        && models.iter().all(|m| m.passed);
    Ok(SummandReport {
        index,
        dim: s.dim(),
        eigenvalues: fmt_all(field, &s.eigenvalues),
        xi: fmt_all(field, &s.xi),
        valuation: s.valuation.iter().map(|v| v.to_string()).collect(),
        interior,
        generalised_eigenspace,
        exp_log,
        models,
        brackets_checked: checked,
        bracket_failures: failures,
        passed,
    })
}

/// Samples of random offsets drawn per `(beta, c)` by the pearl oracle.
pub fn oracle_samples(level: Level) -> usize {
    match level {
        Level::Quick => 5,
        Level::Full => 20,
    }
}

fn pearl_section<F: Field>(
    config: &PipelineConfig,
    prepared: &Prepared,
    md: &MorseData,
    summands: &[Summand<F>],
) -> Result<PearlSection, PipelineError> {
    let normals = prepared.toric.normals();
    let checks = pearl::emptiness_checks(md, normals);
    let basic = &prepared.w.classes()[..prepared.w.basic_count()];
    let oracle = summands
        .iter()
        .map(|s| {
            pearl::oracle_compare(md, s.field(), &s.xi, basic, config.pearl_bound, oracle_samples(config.level), config.seed)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let passed = checks.iter().all(|c| c.passed) && oracle.iter().all(|o| o.passed);
    Ok(PearlSection {
        q: md.q.iter().map(|x| x.to_string()).collect(),
        v: md.v.iter().map(|x| x.to_string()).collect(),
        lambda: md.lambda.to_string(),
        checks,
        oracle,
        passed,
    })
}

fn run_with<F: Field>(field: F, config: &PipelineConfig, prepared: &Prepared) -> Result<VerificationReport, PipelineError> {
    let w = &prepared.w;
    let q = quotient(&field, prepared, config.cache.as_deref())?;
    let summands = eigen::decompose(&q)?;
    let morse = pearl::choose_morse_data(prepared.toric.normals(), config.seed)?;
    let reports = summands
        .iter()
        .enumerate()
        .map(|(i, s)| summand_report(config, prepared, &q, i, s, Some(&morse)))
        .collect::<Result<Vec<_>, _>>()?;
    let pearl = pearl_section(config, prepared, &morse, &summands)?;
    let potential = groupring::format(&field, &potential_of(&field, w));
    let passed = reports.iter().all(|r| r.passed) && pearl.passed;
    Ok(VerificationReport {
        input: input_summary(config, prepared),
        potential,
        jacobian: jacobian_summary(&q),
        summands: reports,
        pearl: Some(pearl),
        passed,
    })
}

fn input_summary(config: &PipelineConfig, prepared: &Prepared) -> InputSummary {
    InputSummary {
        hash: prepared.hash.clone(),
        field: prepared.base.to_string(),
        mode: config.document.mode,
        precision: prepared.precision.map(|p| p.to_string()),
        dimension: prepared.toric.dimension(),
        facets: prepared.toric.facets(),
        seed: config.seed,
    }
}

fn potential_of<F: Field>(field: &F, w: &Superpotential) -> groupring::Laurent<F::Elem> {
    (0..w.classes().len()).fold(groupring::Laurent::zero(w.rank()), |acc, i| {
        groupring::add(field, &acc, &w.class_term(field, i)).expect("same rank")
    })
}

pub fn jacobian_summary<F: Field>(q: &QuotientAlgebra<F>) -> JacobianSummary {
    JacobianSummary {
        dim: q.dim(),
        groebner: q.groebner().iter().map(|p| mpoly::format(q.field(), p)).collect(),
        basis: (0..q.dim()).map(|i| q.format(&q.algebra().basis(i))).collect(),
    }
}

/// The full verification run. Deterministic in the configuration and seed.
pub fn run_pipeline(config: &PipelineConfig) -> Result<VerificationReport, PipelineError> {
    let prepared = prepare(config)?;
    match config.document.mode {
        Mode::Monotone => run_with(prepared.base.clone(), config, &prepared),
        Mode::Novikov => {
            let e = prepared.precision.expect("validated");
            run_with(NovikovField::new(prepared.base.clone(), e), config, &prepared)
        }
    }
}

/// The superpotential as text, in the coefficient field of the run.
pub fn potential_text(config: &PipelineConfig) -> Result<String, PipelineError> {
    let p = prepare(config)?;
    Ok(match config.document.mode {
        Mode::Monotone => groupring::format(&p.base, &potential_of(&p.base, &p.w)),
        Mode::Novikov => {
            let f = NovikovField::new(p.base.clone(), p.precision.expect("validated"));
            groupring::format(&f, &potential_of(&f, &p.w))
        }
    })
}

/// The Jacobian ring alone.
pub fn jacobian_only(config: &PipelineConfig) -> Result<JacobianSummary, PipelineError> {
    let p = prepare(config)?;
    Ok(match config.document.mode {
        Mode::Monotone => jacobian_summary(&quotient(&p.base, &p, config.cache.as_deref())?),
        Mode::Novikov => {
            let f = NovikovField::new(p.base.clone(), p.precision.expect("validated"));
            jacobian_summary(&quotient(&f, &p, config.cache.as_deref())?)
        }
    })
}
