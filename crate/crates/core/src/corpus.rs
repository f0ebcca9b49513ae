//! The shipped example programs and their manifest.
//!
//! The corpus is embedded at compile time; [`Corpus::load`] reads the same
//! layout (a `manifest.toml` next to the `.tier` files) from disk.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::operators::Registry;
use crate::parser::{parse, ParseError};
use crate::semantics::{Oracle, OracleSpec, Store};
use crate::syntax::{Program, Var};
use crate::tiers::{Tier, TypedTriple, VarEnv};
use crate::word::{AlphabetError, Word};

const EMBEDDED_MANIFEST: &str = include_str!("../corpus/manifest.toml");

const EMBEDDED_SOURCES: &[(&str, &str)] = &[
    ("add.tier", include_str!("../corpus/add.tier")),
    ("exp.tier", include_str!("../corpus/exp.tier")),
    ("multi.tier", include_str!("../corpus/multi.tier")),
    ("oracle_dec.tier", include_str!("../corpus/oracle_dec.tier")),
    ("oracle_swap.tier", include_str!("../corpus/oracle_swap.tier")),
    ("oracle_inc.tier", include_str!("../corpus/oracle_inc.tier")),
    ("multi_oracle.tier", include_str!("../corpus/multi_oracle.tier")),
    ("it_phi.tier", include_str!("../corpus/it_phi.tier")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Typable,
    Untypable,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub name: String,
    pub file: String,
    pub expect: Verdict,
    pub t_max: Option<Tier>,
    pub gamma: Option<BTreeMap<String, Tier>>,
    pub triple: Option<[Tier; 3]>,
    pub scale: Option<String>,
    #[serde(default)]
    pub fixed: BTreeMap<String, String>,
    pub oracle: Option<OracleSpec>,
    pub degree: Option<u32>,
    pub max_lr: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct Manifest {
    program: Vec<ManifestEntry>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("manifest: {0}")]
    Manifest(#[from] toml::de::Error),
    #[error("{file}: {source}")]
    Io {
        file: String,
        source: std::io::Error,
    },
    #[error("{file}: missing from the corpus")]
    Missing { file: String },
    #[error("{file}:{source}")]
    Parse { file: String, source: ParseError },
    #[error("{name}: {source}")]
    Word { name: String, source: AlphabetError },
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub meta: ManifestEntry,
    pub source: String,
    pub program: Program,
}

impl CorpusEntry {
    pub fn name(&self) -> &str {
        &self.meta.name
    }

    pub fn gamma(&self) -> Option<VarEnv> {
        self.meta
            .gamma
            .as_ref()
            .map(|g| g.iter().map(|(x, &t)| (Var::new(x), t)).collect())
    }

    pub fn triple(&self) -> Option<TypedTriple> {
        self.meta.triple.map(|[t, i, o]| TypedTriple::new(t, i, o))
    }

    pub fn has_oracle_calls(&self) -> bool {
        self.program.oracle.is_some()
    }

    /// Oracle for step-count sweeps; the constant-ε oracle if none is set.
    pub fn sweep_oracle(&self) -> Oracle {
        self.meta
            .oracle
            .clone()
            .map(Oracle::from_spec)
            .unwrap_or_default()
    }

    /// Inputs at scale `n`: the scale variable bound to `1ⁿ`, fixed
    /// bindings as given.
    pub fn inputs_at(&self, n: usize) -> Store {
        let mut s = Store::new();
        for (x, w) in &self.meta.fixed {
            let w: Word = w.parse().expect("fixed inputs are validated on load");
            s.set(Var::new(x), w);
        }
        if let Some(x) = &self.meta.scale {
            s.set(Var::new(x), Word::unary(n));
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn embedded(registry: &Registry) -> Result<Corpus, CorpusError> {
        Corpus::build(EMBEDDED_MANIFEST, registry, |file| {
            EMBEDDED_SOURCES
                .iter()
                .find(|(f, _)| *f == file)
                .map(|(_, s)| s.to_string())
                .ok_or_else(|| CorpusError::Missing {
                    file: file.to_string(),
                })
        })
    }

    pub fn load(dir: &Path, registry: &Registry) -> Result<Corpus, CorpusError> {
        let read = |file: &str| {
            let path = dir.join(file);
            std::fs::read_to_string(&path).map_err(|source| CorpusError::Io {
                file: path.display().to_string(),
                source,
            })
        };
        let manifest = read("manifest.toml")?;
        Corpus::build(&manifest, registry, read)
    }

    fn build(
        manifest: &str,
        registry: &Registry,
        read: impl Fn(&str) -> Result<String, CorpusError>,
    ) -> Result<Corpus, CorpusError> {
        let m: Manifest = toml::from_str(manifest)?;
        let mut entries = Vec::new();
        for meta in m.program {
            let source = read(&meta.file)?;
            let program = parse(&source, registry).map_err(|source| CorpusError::Parse {
                file: meta.file.clone(),
                source,
            })?;
            for w in meta.fixed.values() {
                w.parse::<Word>().map_err(|source| CorpusError::Word {
                    name: meta.name.clone(),
                    source,
                })?;
            }
            entries.push(CorpusEntry {
                meta,
                source,
                program,
            });
        }
        Ok(Corpus { entries })
    }

    pub fn get(&self, name: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.meta.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CorpusEntry> {
        self.entries.iter()
    }
}
