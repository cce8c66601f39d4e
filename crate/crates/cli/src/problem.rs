//! Problem-file schema and parsing.
//!
//! A problem file is JSON with a top-level `schema: 1`, a list of state
//! records, and optional solver options. Each record carries a prior and
//! exactly one of `bloch` (a real 3-vector) or `rho` (a 2x2 complex matrix
//! as `[re, im]` pairs, row major).

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use discrim_core::{density_to_bloch, BlochVector, QubitDensity, WeightedEnsemble};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: u32,
    pub states: Vec<StateRecord>,
    #[serde(default)]
    pub options: SolveOptions,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveOptions {
    /// Verification gap tolerance; overridden by `--tol`.
    pub tol: Option<f64>,
    /// Whether to run the oracle verification; overridden by the flags.
    pub verify: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub prior: f64,
    #[serde(default)]
    pub bloch: Option<[f64; 3]>,
    #[serde(default)]
    pub rho: Option<[[[f64; 2]; 2]; 2]>,
}

/// A parsed problem: the validated ensemble plus provenance.
pub struct Problem {
    pub ensemble: WeightedEnsemble,
    /// `sha256:<hex>` over the raw file bytes.
    pub digest: String,
    pub options: SolveOptions,
}

pub fn file_digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

fn record_to_bloch(index: usize, record: &StateRecord) -> Result<BlochVector> {
    match (&record.bloch, &record.rho) {
        (Some(_), Some(_)) => {
            bail!("state {index}: exactly one of `bloch` or `rho` must be given, found both")
        }
        (None, None) => {
            bail!("state {index}: exactly one of `bloch` or `rho` must be given, found neither")
        }
        (Some(v), None) => Ok(BlochVector::from(*v)),
        (None, Some(m)) => {
            let herm_eps = 1e-9;
            if m[0][0][1].abs() > herm_eps || m[1][1][1].abs() > herm_eps {
                bail!("state {index}: rho has complex diagonal entries");
            }
            if (m[0][1][0] - m[1][0][0]).abs() > herm_eps
                || (m[0][1][1] + m[1][0][1]).abs() > herm_eps
            {
                bail!("state {index}: rho is not Hermitian");
            }
            let rho = QubitDensity::new(m[0][0][0], m[1][1][0], m[0][1][0], m[0][1][1])
                .with_context(|| format!("state {index}"))?;
            Ok(density_to_bloch(&rho))
        }
    }
}

pub fn load_problem(path: &std::path::Path) -> Result<Problem> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("cannot read problem file {}", path.display()))?;
    let digest = file_digest(&bytes);
    let parsed: ProblemFile = serde_json::from_slice(&bytes)
        .with_context(|| format!("cannot parse {}", path.display()))?;
    if parsed.schema != SCHEMA_VERSION {
        bail!("unsupported schema {} (expected {})", parsed.schema, SCHEMA_VERSION);
    }
    if parsed.states.is_empty() {
        bail!("problem file lists no states");
    }
    let mut raw = Vec::with_capacity(parsed.states.len());
    for (i, record) in parsed.states.iter().enumerate() {
        raw.push((record.prior, record_to_bloch(i, record)?));
    }
    let ensemble = WeightedEnsemble::new(&raw).context("invalid ensemble")?;
    Ok(Problem { ensemble, digest, options: parsed.options })
}
