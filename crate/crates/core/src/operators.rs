//! Operator registry: semantics `⟦op⟧`, arity and the neutral/positive
//! classification that drives the admissible operator types.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::word::Word;

pub type Semantics = Arc<dyn Fn(&[Word]) -> Word + Send + Sync>;

/// Which clause of neutrality an operator relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeutralKind {
    /// arity 0
    Constant,
    /// range within `{0,1}`
    Predicate,
    /// result is a subword of some argument
    Subword,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum Classification {
    Neutral { kind: NeutralKind },
    Positive { c_op: usize },
}

impl Classification {
    pub fn is_positive(self) -> bool {
        matches!(self, Classification::Positive { .. })
    }

    /// Length slack `c` such that `|⟦op⟧(w̅)| ≤ maxᵢ|wᵢ| + c`. Neutral
    /// operators are positive with `c = 1`.
    pub fn length_slack(self) -> usize {
        match self {
            Classification::Neutral { .. } => 1,
            Classification::Positive { c_op } => c_op,
        }
    }
}

#[derive(Clone)]
pub struct OperatorSpec {
    pub name: String,
    pub arity: usize,
    pub semantics: Semantics,
    pub classification: Classification,
}

impl OperatorSpec {
    pub fn new<F>(name: &str, arity: usize, classification: Classification, f: F) -> Self
    where
        F: Fn(&[Word]) -> Word + Send + Sync + 'static,
    {
        OperatorSpec {
            name: name.to_string(),
            arity,
            semantics: Arc::new(f),
            classification,
        }
    }

    pub fn apply(&self, args: &[Word]) -> Word {
        debug_assert_eq!(args.len(), self.arity, "arity of {}", self.name);
        (self.semantics)(args)
    }

    pub fn is_positive(&self) -> bool {
        self.classification.is_positive()
    }
}

impl fmt::Debug for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorSpec")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("classification", &self.classification)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("operator `{0}` is already registered")]
    Duplicate(String),
    #[error("`{0}` is not a valid operator name")]
    BadName(String),
    #[error("operator `{0}` is declared constant but has arity {1}")]
    ConstantArity(String, usize),
}

/// Immutable-after-construction set of operators keyed by name.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    ops: BTreeMap<String, OperatorSpec>,
}

fn bit(b: bool) -> Word {
    if b {
        Word::one()
    } else {
        Word::zero()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry::default()
    }

    /// The built-in operators: `pred`, `suc0`, `suc1`, `eq`, `gt0`, `geq`,
    /// `lmin`, `maxlen` and the constants `zero`, `one`, `eps`.
    pub fn builtin() -> Self {
        use Classification::*;
        use NeutralKind::*;

        let mut r = Registry::empty();
        let ops = [
            OperatorSpec::new("pred", 1, Neutral { kind: Subword }, |a| a[0].tail()),
            OperatorSpec::new("suc0", 1, Positive { c_op: 1 }, |a| a[0].prepend(b'0')),
            OperatorSpec::new("suc1", 1, Positive { c_op: 1 }, |a| a[0].prepend(b'1')),
            OperatorSpec::new("eq", 2, Neutral { kind: Predicate }, |a| bit(a[0] == a[1])),
            OperatorSpec::new("gt0", 1, Neutral { kind: Predicate }, |a| bit(!a[0].is_empty())),
            OperatorSpec::new("geq", 2, Neutral { kind: Predicate }, |a| {
                bit(a[0].len() >= a[1].len())
            }),
            OperatorSpec::new("lmin", 2, Neutral { kind: Subword }, |a| {
                if a[0].len() < a[1].len() {
                    a[0].clone()
                } else {
                    a[1].clone()
                }
            }),
            OperatorSpec::new("maxlen", 2, Neutral { kind: Subword }, |a| {
                if a[0].len() > a[1].len() {
                    a[0].clone()
                } else {
                    a[1].clone()
                }
            }),
            OperatorSpec::new("zero", 0, Neutral { kind: Constant }, |_| Word::zero()),
            OperatorSpec::new("one", 0, Neutral { kind: Constant }, |_| Word::one()),
            OperatorSpec::new("eps", 0, Neutral { kind: Constant }, |_| Word::empty()),
        ];
        for op in ops {
            r.register(op).expect("builtin operators are distinct");
        }
        r
    }

    /// Extension hook for additional operators.
    pub fn register(&mut self, spec: OperatorSpec) -> Result<(), RegistryError> {
        let valid = spec
            .name
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && spec.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid || crate::syntax::is_keyword(&spec.name) {
            return Err(RegistryError::BadName(spec.name));
        }
        if let Classification::Neutral {
            kind: NeutralKind::Constant,
        } = spec.classification
        {
            if spec.arity != 0 {
                return Err(RegistryError::ConstantArity(spec.name, spec.arity));
            }
        }
        if self.ops.contains_key(&spec.name) {
            return Err(RegistryError::Duplicate(spec.name));
        }
        self.ops.insert(spec.name.clone(), spec);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&OperatorSpec> {
        self.ops.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &OperatorSpec> {
        self.ops.values()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub args: Vec<Word>,
    pub output: Word,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub operator: String,
    pub samples: usize,
    pub counterexample: Option<Counterexample>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let syms: Vec<u8> = (0..len)
        .map(|_| if rng.gen::<bool>() { b'1' } else { b'0' })
        .collect();
    Word::from_symbols(&syms)
}

/// Spot-checks the declared classification of `spec` on `samples` random
/// argument tuples with lengths in `0..=64`.
///
/// A pass is evidence only: neutrality is not decidable from the semantics.
pub fn validate_classification(spec: &OperatorSpec, samples: usize, seed: u64) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut constant: Option<Word> = None;
    for done in 0..samples {
        let args: Vec<Word> = (0..spec.arity).map(|_| random_word(&mut rng, 64)).collect();
        let output = spec.apply(&args);
        let max_len = args.iter().map(Word::len).max().unwrap_or(0);
        let failure = match spec.classification {
            Classification::Neutral { kind } => match kind {
                NeutralKind::Constant => {
                    let first = constant.get_or_insert_with(|| output.clone());
                    if spec.arity != 0 {
                        Some(format!("declared constant with arity {}", spec.arity))
                    } else if *first != output {
                        Some(format!("constant produced both {first} and {output}"))
                    } else {
                        None
                    }
                }
                NeutralKind::Predicate => (!output.is_bit())
                    .then(|| format!("predicate output {:?} is not in {{0,1}}", output.to_string())),
                NeutralKind::Subword => (!args.iter().any(|a| output.is_subword_of(a)))
                    .then(|| "output is not a subword of any argument".to_string()),
            },
            Classification::Positive { c_op } => (output.len() > max_len + c_op).then(|| {
                format!(
                    "|output| = {} exceeds max argument length {} + {}",
                    output.len(),
                    max_len,
                    c_op
                )
            }),
        };
        if let Some(reason) = failure {
            return ValidationReport {
                operator: spec.name.clone(),
                samples: done + 1,
                counterexample: Some(Counterexample {
                    args,
                    output,
                    reason,
                }),
            };
        }
    }
    ValidationReport {
        operator: spec.name.clone(),
        samples,
        counterexample: None,
    }
}
