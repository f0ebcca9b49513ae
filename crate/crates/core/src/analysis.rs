//! Dynamic measurements: lookahead revisions, step-count growth and
//! randomized non-interference.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::operators::Registry;
use crate::semantics::{run_program, DefaultRule, Oracle, RuntimeError, Store};
use crate::syntax::{Program, Var};
use crate::tiers::{check_any, Tier, TypeError, VarEnv};
use crate::word::Word;

/// Number of queries strictly longer than every earlier query; the first
/// query always counts.
pub fn count_lookahead_revisions(query_lengths: &[usize]) -> usize {
    let mut best: Option<usize> = None;
    let mut count = 0;
    for &l in query_lengths {
        if best.is_none_or(|b| l > b) {
            count += 1;
            best = Some(l);
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub steps: u64,
    pub m: usize,
    pub lr: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of `log steps` against `log m` over the
    /// completed points; `None` when `m` does not vary.
    pub slope: Option<f64>,
    pub max_lr: usize,
}

impl SweepReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>8} {:>12} {:>8} {:>4}", "n", "steps", "m", "lr");
        for p in &self.points {
            match &p.error {
                None => {
                    let _ = writeln!(s, "{:>8} {:>12} {:>8} {:>4}", p.n, p.steps, p.m, p.lr);
                }
                Some(e) => {
                    let _ = writeln!(s, "{:>8} {e}", p.n);
                }
            }
        }
        match self.slope {
            Some(k) => {
                let _ = writeln!(s, "slope(log steps / log m) = {k:.3}");
            }
            None => s.push_str("slope(log steps / log m) = n/a\n"),
        }
        let _ = writeln!(s, "max lr = {}", self.max_lr);
        s
    }

    /// Two-column `m<TAB>steps` rows for plotting.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("m\tsteps\n");
        for p in self.points.iter().filter(|p| p.error.is_none()) {
            let _ = writeln!(s, "{}\t{}", p.m, p.steps);
        }
        s
    }
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn least_squares_slope(xy: &[(f64, f64)]) -> Option<f64> {
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= f64::EPSILON {
        None
    } else {
        Some(sxy / sxx)
    }
}

pub fn loglog_slope(points: &[SweepPoint]) -> Option<f64> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.error.is_none() && p.m > 0 && p.steps > 0)
        .map(|p| ((p.m as f64).ln(), (p.steps as f64).ln()))
        .collect();
    least_squares_slope(&xy)
}

/// Runs `p` once per scale and records steps, `m` and lookahead revisions.
pub fn sweep(
    p: &Program,
    registry: &Registry,
    inputs: impl Fn(usize) -> Store,
    phi: &Oracle,
    scales: &[usize],
    fuel: Option<u64>,
) -> SweepReport {
    let mut points = Vec::with_capacity(scales.len());
    for &n in scales {
        let point = match run_program(p, &inputs(n), registry, phi, fuel) {
            Ok(r) => SweepPoint {
                n,
                steps: r.trace.steps,
                m: r.trace.m,
                lr: count_lookahead_revisions(&r.trace.query_lengths()),
                error: None,
            },
            Err(e) => SweepPoint {
                n,
                steps: 0,
                m: 0,
                lr: 0,
                error: Some(e.to_string()),
            },
        };
        points.push(point);
    }
    SweepReport {
        slope: loglog_slope(&points),
        max_lr: points.iter().map(|p| p.lr).max().unwrap_or(0),
        points,
    }
}

pub fn random_word(rng: &mut impl Rng, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let syms: Vec<u8> = (0..len).map(|_| if rng.gen() { b'1' } else { b'0' }).collect();
    Word::from_symbols(&syms)
}

/// A table oracle with answers for every query of length up to
/// `max_query_len` and a random constant default; answers have length at
/// most `max_answer_len`.
pub fn random_table_oracle(rng: &mut impl Rng, max_query_len: usize, max_answer_len: usize) -> Oracle {
    let mut phi = Oracle::new(DefaultRule::Constant {
        value: random_word(rng, max_answer_len),
    });
    for len in 0..=max_query_len {
        for bits in 0..(1u64 << len) {
            let q: Vec<u8> = (0..len)
                .map(|i| if bits >> i & 1 == 1 { b'1' } else { b'0' })
                .collect();
            phi.insert(Word::from_symbols(&q), random_word(rng, max_answer_len));
        }
    }
    phi
}

/// Sampling parameters for [`noninterference_test`].
#[derive(Debug, Clone, Copy)]
pub struct NiConfig {
    pub max_input_len: usize,
    pub max_query_len: usize,
    pub max_answer_len: usize,
    pub fuel: u64,
}

impl Default for NiConfig {
    fn default() -> Self {
        NiConfig {
            max_input_len: 12,
            max_query_len: 6,
            max_answer_len: 64,
            fuel: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NiCounterexample {
    pub trial: usize,
    pub first: Vec<(Var, Word)>,
    pub second: Vec<(Var, Word)>,
    pub differing: Var,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NiReport {
    pub tier: Tier,
    pub trials: usize,
    /// Trials where either run hit a runtime error; they say nothing about
    /// final stores.
    pub inconclusive: usize,
    pub counterexample: Option<NiCounterexample>,
}

impl NiReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NiError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("the program is not safe under the given environment")]
    NotSafe,
}

/// Samples pairs of stores that agree on every variable of tier at least
/// `t` under `Γ`, runs `p` from both under one random oracle, and checks
/// that the final stores still agree there.
pub fn noninterference_test(
    p: &Program,
    registry: &Registry,
    gamma: &VarEnv,
    t: Tier,
    trials: usize,
    seed: u64,
    cfg: NiConfig,
) -> Result<NiReport, NiError> {
    if check_any(p, gamma, registry)?.is_none() {
        return Err(NiError::NotSafe);
    }
    let vars: Vec<(Var, Tier)> = p
        .variables()
        .into_iter()
        .map(|x| {
            let t = gamma.get(&x).expect("check_any validated Γ");
            (x, t)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = NiReport {
        tier: t,
        trials,
        inconclusive: 0,
        counterexample: None,
    };
    for trial in 0..trials {
        let phi = random_table_oracle(&mut rng, cfg.max_query_len, cfg.max_answer_len);
        let mut mu1 = Store::new();
        let mut mu2 = Store::new();
        for (x, tx) in &vars {
            let w = random_word(&mut rng, cfg.max_input_len);
            let w2 = if *tx < t {
                random_word(&mut rng, cfg.max_input_len)
            } else {
                w.clone()
            };
            mu1.set(x.clone(), w);
            mu2.set(x.clone(), w2);
        }
        let r1 = run_program(p, &mu1, registry, &phi, Some(cfg.fuel));
        let r2 = run_program(p, &mu2, registry, &phi, Some(cfg.fuel));
        let (s1, s2) = match (r1, r2) {
            (Ok(a), Ok(b)) => (a.store, b.store),
            _ => {
                report.inconclusive += 1;
                continue;
            }
        };
        let high = vars.iter().filter(|(_, tx)| *tx >= t);
        if let Some((x, _)) = high.into_iter().find(|(x, _)| s1.get(x) != s2.get(x)) {
            let dump = |s: &Store| vars.iter().map(|(v, _)| (v.clone(), s.get(v))).collect();
            report.counterexample = Some(NiCounterexample {
                trial,
                first: dump(&mu1),
                second: dump(&mu2),
                differing: x.clone(),
            });
            return Ok(report);
        }
    }
    Ok(report)
}

/// Seed-derived random oracle tables, for lookahead-revision checks.
pub fn oracle_family(seed: u64, count: usize, max_query_len: usize, max_answer_len: usize) -> Vec<Oracle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_table_oracle(&mut rng, max_query_len, max_answer_len))
        .collect()
}

/// `lr` of one run, or the runtime error it hit.
pub fn lookahead_revisions(
    p: &Program,
    registry: &Registry,
    inputs: &Store,
    phi: &Oracle,
    fuel: Option<u64>,
) -> Result<usize, RuntimeError> {
    let r = run_program(p, inputs, registry, phi, fuel)?;
    Ok(count_lookahead_revisions(&r.trace.query_lengths()))
}
