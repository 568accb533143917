//! Instance supply and sweeps.
//!
//! Labeled enumerations are index-addressable: the unordered pairs
//! `(1,2), (1,3), ..., (n-1,n)` are digits of the index, the first pair most
//! significant. A digit of the all-digraph stream is 0 (no arc), 1 (`i -> j`)
//! or 2 (`j -> i`); a tournament digit is 0 (`i -> j`) or 1 (`j -> i`).
//!
//! Random samples use ChaCha8 seeded with the sweep seed, one stream per
//! sample index, so sample `k` is the same whichever worker draws it.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Signed;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::conjecture::{consistency_check, kl_prune, ConjectureId, Status};
use crate::digraph::{Arc, Digraph};
use crate::linalg::{format_rational, rat, Rational};

pub const DIGRAPH_CAP: usize = 6;
pub const TOURNAMENT_CAP: usize = 7;
pub const CANONICAL_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("n = {n} exceeds the {what} cap of {cap}")]
    SizeCapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },
    #[error("invalid probabilities: p_forward = {0}, p_backward = {1}")]
    InvalidProbability(String, String),
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    All,
    Tournaments,
    Random,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::All => "all",
            Mode::Tournaments => "tournaments",
            Mode::Random => "random",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = SearchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Mode::All),
            "tournaments" => Ok(Mode::Tournaments),
            "random" => Ok(Mode::Random),
            other => Err(SearchError::InvalidSpec(format!("unknown mode `{other}`"))),
        }
    }
}

fn pair_count(n: usize) -> u32 {
    (n * n.saturating_sub(1) / 2) as u32
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
}

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<(), SearchError> {
    if n > cap {
        Err(SearchError::SizeCapExceeded { what, n, cap })
    } else {
        Ok(())
    }
}

/// `3^(n(n-1)/2)`, or `None` on overflow.
pub fn digraph_count(n: usize) -> Option<u64> {
    3u64.checked_pow(pair_count(n))
}

/// `2^(n(n-1)/2)`, or `None` on overflow.
pub fn tournament_count(n: usize) -> Option<u64> {
    2u64.checked_pow(pair_count(n))
}

fn decode(
    n: usize,
    mut index: u64,
    base: u64,
    digit_arc: impl Fn(u64, usize, usize) -> Option<Arc>,
) -> Digraph {
    let ps: Vec<(usize, usize)> = pairs(n).collect();
    let mut arcs = Vec::with_capacity(ps.len());
    for &(i, j) in ps.iter().rev() {
        let digit = index % base;
        index /= base;
        arcs.extend(digit_arc(digit, i, j));
    }
    Digraph::new(n, arcs).expect("one arc per pair at most")
}

/// The `index`-th labeled digraph on `n` vertices.
pub fn digraph_at(n: usize, index: u64) -> Digraph {
    decode(n, index, 3, |d, i, j| match d {
        1 => Some(Arc::new(i, j)),
        2 => Some(Arc::new(j, i)),
        _ => None,
    })
}

/// The `index`-th labeled tournament on `n` vertices.
pub fn tournament_at(n: usize, index: u64) -> Digraph {
    decode(n, index, 2, |d, i, j| {
        Some(if d == 0 {
            Arc::new(i, j)
        } else {
            Arc::new(j, i)
        })
    })
}

/// All `3^(n(n-1)/2)` labeled digraphs in index order.
pub fn enumerate_digraphs(n: usize) -> Result<impl Iterator<Item = Digraph>, SearchError> {
    enumerate_digraphs_capped(n, DIGRAPH_CAP)
}

pub fn enumerate_digraphs_capped(
    n: usize,
    cap: usize,
) -> Result<impl Iterator<Item = Digraph>, SearchError> {
    check_positive(n)?;
    check_cap("all-digraph", n, cap)?;
    let count = digraph_count(n).ok_or(SearchError::SizeCapExceeded {
        what: "all-digraph",
        n,
        cap,
    })?;
    Ok((0..count).map(move |k| digraph_at(n, k)))
}

/// All `2^(n(n-1)/2)` labeled tournaments in index order.
pub fn enumerate_tournaments(n: usize) -> Result<impl Iterator<Item = Digraph>, SearchError> {
    enumerate_tournaments_capped(n, TOURNAMENT_CAP)
}

pub fn enumerate_tournaments_capped(
    n: usize,
    cap: usize,
) -> Result<impl Iterator<Item = Digraph>, SearchError> {
    check_positive(n)?;
    check_cap("tournament", n, cap)?;
    let count = tournament_count(n).ok_or(SearchError::SizeCapExceeded {
        what: "tournament",
        n,
        cap,
    })?;
    Ok((0..count).map(move |k| tournament_at(n, k)))
}

fn check_positive(n: usize) -> Result<(), SearchError> {
    if n == 0 {
        Err(SearchError::InvalidSpec("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn check_probabilities(pf: &Rational, pb: &Rational) -> Result<(), SearchError> {
    let one = rat(1, 1);
    if pf.is_negative() || pb.is_negative() || pf + pb > one {
        return Err(SearchError::InvalidProbability(
            format_rational(pf),
            format_rational(pb),
        ));
    }
    Ok(())
}

/// `u / 2^64 < p`, exactly.
fn unit_below(u: u64, p: &Rational) -> bool {
    BigInt::from(u) * p.denom() < (p.numer() << 64u32)
}

fn sample_digraph(n: usize, pf: &Rational, pb: &Rational, seed: u64, stream: u64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let both = pf + pb;
    let arcs: Vec<Arc> = pairs(n)
        .filter_map(|(i, j)| {
            let u = rng.next_u64();
            if unit_below(u, pf) {
                Some(Arc::new(i, j))
            } else if unit_below(u, &both) {
                Some(Arc::new(j, i))
            } else {
                None
            }
        })
        .collect();
    Digraph::new(n, arcs).expect("one arc per pair at most")
}

/// Each unordered pair `i < j` independently becomes `i -> j` with
/// probability `p_forward`, `j -> i` with `p_backward`, else stays absent.
pub fn random_digraph(
    n: usize,
    p_forward: &Rational,
    p_backward: &Rational,
    seed: u64,
) -> Result<Digraph, SearchError> {
    check_probabilities(p_forward, p_backward)?;
    Ok(sample_digraph(n, p_forward, p_backward, seed, 0))
}

/// Lexicographically least sorted arc list over all relabelings.
pub fn canonicalize(d: &Digraph) -> Result<Digraph, SearchError> {
    canonicalize_capped(d, CANONICAL_CAP)
}

pub fn canonicalize_capped(d: &Digraph, cap: usize) -> Result<Digraph, SearchError> {
    let n = d.vertex_count();
    check_cap("canonicalization", n, cap)?;
    let arcs: Vec<Arc> = d.arcs().collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    for perm in (1..=n).permutations(n) {
        let mut enc: Vec<(usize, usize)> = arcs
            .iter()
            .map(|a| (perm[a.tail - 1], perm[a.head - 1]))
            .collect();
        enc.sort_unstable();
        if best.as_ref().is_none_or(|b| enc < *b) {
            best = Some(enc);
        }
    }
    let best = best.unwrap_or_default();
    Ok(Digraph::new(n, best).expect("relabeling preserves validity"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumSpec {
    pub n: usize,
    pub mode: Mode,
    /// Random mode only.
    pub samples: u64,
    pub seed: u64,
    pub p_forward: Rational,
    pub p_backward: Rational,
    /// Keep one representative per isomorphism class.
    pub dedup: bool,
    /// Skip instances rejected by [`kl_prune`].
    pub prune: bool,
    /// Lift the size caps.
    pub allow_oversize: bool,
}

impl EnumSpec {
    pub fn new(n: usize, mode: Mode) -> Self {
        EnumSpec {
            n,
            mode,
            samples: 1,
            seed: 0,
            p_forward: rat(1, 3),
            p_backward: rat(1, 3),
            dedup: false,
            prune: false,
            allow_oversize: false,
        }
    }

    pub fn random(n: usize, samples: u64, seed: u64) -> Self {
        EnumSpec {
            samples,
            seed,
            ..Self::new(n, Mode::Random)
        }
    }

    fn cap(&self, cap: usize) -> usize {
        if self.allow_oversize {
            usize::MAX
        } else {
            cap
        }
    }

    /// Validates the spec and returns the length of its instance stream.
    pub fn instance_count(&self) -> Result<u64, SearchError> {
        check_positive(self.n)?;
        if self.dedup {
            check_cap("canonicalization", self.n, self.cap(CANONICAL_CAP))?;
        }
        match self.mode {
            Mode::All => {
                check_cap("all-digraph", self.n, self.cap(DIGRAPH_CAP))?;
                digraph_count(self.n)
                    .ok_or(SearchError::InvalidSpec("instance count overflows".into()))
            }
            Mode::Tournaments => {
                check_cap("tournament", self.n, self.cap(TOURNAMENT_CAP))?;
                tournament_count(self.n)
                    .ok_or(SearchError::InvalidSpec("instance count overflows".into()))
            }
            Mode::Random => {
                if self.samples == 0 {
                    return Err(SearchError::InvalidSpec(
                        "random mode needs samples >= 1".into(),
                    ));
                }
                check_probabilities(&self.p_forward, &self.p_backward)?;
                Ok(self.samples)
            }
        }
    }

    /// Instance `index` of this spec's stream.
    pub fn instance(&self, index: u64) -> Digraph {
        match self.mode {
            Mode::All => digraph_at(self.n, index),
            Mode::Tournaments => tournament_at(self.n, index),
            Mode::Random => {
                sample_digraph(self.n, &self.p_forward, &self.p_backward, self.seed, index)
            }
        }
    }

    fn to_json(&self) -> Value {
        let mut v = json!({
            "n": self.n,
            "mode": self.mode.as_str(),
            "dedup": self.dedup,
            "prune": self.prune,
        });
        if self.mode == Mode::Random {
            v["samples"] = json!(self.samples);
            v["seed"] = json!(self.seed);
            v["p_forward"] = json!(format_rational(&self.p_forward));
            v["p_backward"] = json!(format_rational(&self.p_backward));
        }
        v
    }
}

/// Resume point: `mode n next_index violations_so_far`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub mode: Mode,
    pub n: usize,
    pub next_index: u64,
    pub violations: u64,
}

impl Checkpoint {
    pub fn to_text(&self) -> String {
        format!(
            "{} {} {} {}\n",
            self.mode, self.n, self.next_index, self.violations
        )
    }

    pub fn parse(text: &str) -> Result<Checkpoint, SearchError> {
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [mode, n, next, viol] = fields[..] else {
            return Err(SearchError::Checkpoint(
                "expected `mode n next_index violations_so_far`".into(),
            ));
        };
        let num = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| SearchError::Checkpoint(format!("`{s}` is not a number")))
        };
        Ok(Checkpoint {
            mode: mode.parse()?,
            n: num(n)? as usize,
            next_index: num(next)?,
            violations: num(viol)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub spec: EnumSpec,
    /// First index processed by this run (nonzero after a resume).
    pub start_index: u64,
    pub generated: u64,
    pub examined: u64,
    pub skipped_duplicates: u64,
    pub skipped_pruned: u64,
    /// Indices of instances failing each conjecture.
    pub counterexamples: BTreeMap<ConjectureId, Vec<u64>>,
    /// Violations carried over from a checkpoint plus those found here.
    pub violations: u64,
    pub violating_instances: Vec<(u64, Vec<String>)>,
    pub wall_time: Duration,
}

impl SearchReport {
    pub fn counterexample_total(&self) -> usize {
        self.counterexamples.values().map(Vec::len).sum()
    }

    pub fn is_clean(&self) -> bool {
        self.counterexample_total() == 0 && self.violations == 0
    }

    fn label(&self) -> String {
        format!("sweep:{}:n={}", self.spec.mode, self.spec.n)
    }

    /// One record per conjecture plus a summary record. Wall time is left
    /// out so that output is reproducible.
    pub fn to_json_lines(&self) -> Vec<Value> {
        let label = self.label();
        let mut out: Vec<Value> = ConjectureId::ALL
            .iter()
            .map(|c| {
                let idx = self.counterexamples.get(c).cloned().unwrap_or_default();
                json!({
                    "instance": label,
                    "conjecture": c.as_str(),
                    "status": if idx.is_empty() { Status::Satisfied.as_str() } else { Status::Fails.as_str() },
                    "evidence_kind": "counterexample_indices",
                    "evidence": idx,
                    "violations": Vec::<String>::new(),
                })
            })
            .collect();
        let violations: Vec<String> = self
            .violating_instances
            .iter()
            .flat_map(|(k, names)| names.iter().map(move |r| format!("{k}:{r}")))
            .collect();
        out.push(json!({
            "instance": label,
            "conjecture": "summary",
            "status": if self.is_clean() { "pass" } else { "fail" },
            "evidence_kind": "sweep_summary",
            "evidence": {
                "spec": self.spec.to_json(),
                "start_index": self.start_index,
                "generated": self.generated,
                "skipped_duplicates": self.skipped_duplicates,
                "skipped_pruned": self.skipped_pruned,
                "violation_count": self.violations,
            },
            "instances": self.examined,
            "counterexamples": self.counterexample_total(),
            "violations": violations,
        }));
        out
    }
}

enum Outcome {
    Duplicate,
    Pruned,
    Checked {
        failing: Vec<ConjectureId>,
        violations: Vec<String>,
    },
}

const CHUNK: u64 = 4096;

/// Runs [`consistency_check`] over the whole stream of `spec`.
pub fn sweep(spec: &EnumSpec) -> Result<SearchReport, SearchError> {
    sweep_from(spec, None, |_| {})
}

/// Sweep starting at `resume` (if any), reporting a checkpoint after every
/// chunk. Chunks are evaluated on the ambient rayon pool and merged in
/// index order.
pub fn sweep_from<F>(
    spec: &EnumSpec,
    resume: Option<&Checkpoint>,
    mut on_chunk: F,
) -> Result<SearchReport, SearchError>
where
    F: FnMut(&Checkpoint),
{
    let started = Instant::now();
    let total = spec.instance_count()?;
    let (start, prior) = match resume {
        Some(cp) => {
            if cp.mode != spec.mode || cp.n != spec.n {
                return Err(SearchError::Checkpoint(format!(
                    "checkpoint is for {} n={}, sweep is {} n={}",
                    cp.mode, cp.n, spec.mode, spec.n
                )));
            }
            if cp.next_index > total {
                return Err(SearchError::Checkpoint(format!(
                    "next_index {} beyond stream length {total}",
                    cp.next_index
                )));
            }
            (cp.next_index, cp.violations)
        }
        None => (0, 0),
    };

    // random samples have no labeled structure to exploit, so repeated
    // isomorphism classes are found by first occurrence in sample order
    let first_occurrence: Option<Vec<bool>> =
        (spec.dedup && spec.mode == Mode::Random).then(|| {
            let forms: Vec<Digraph> = (0..total)
                .into_par_iter()
                .map(|k| canonicalize_capped(&spec.instance(k), usize::MAX).expect("uncapped"))
                .collect();
            let mut seen = HashSet::new();
            forms.into_iter().map(|f| seen.insert(f)).collect()
        });

    let process = |k: u64| -> Outcome {
        let d = spec.instance(k);
        if spec.dedup {
            let keep = match &first_occurrence {
                Some(flags) => flags[k as usize],
                None => canonicalize_capped(&d, usize::MAX).expect("uncapped") == d,
            };
            if !keep {
                return Outcome::Duplicate;
            }
        }
        if spec.prune && !kl_prune(&d) {
            return Outcome::Pruned;
        }
        let report = consistency_check(&d).expect("n >= 1");
        Outcome::Checked {
            failing: report
                .verdicts
                .iter()
                .filter(|v| v.status == Status::Fails)
                .map(|v| v.conjecture)
                .collect(),
            violations: report.violations,
        }
    };

    let mut report = SearchReport {
        spec: spec.clone(),
        start_index: start,
        generated: 0,
        examined: 0,
        skipped_duplicates: 0,
        skipped_pruned: 0,
        counterexamples: BTreeMap::new(),
        violations: prior,
        violating_instances: Vec::new(),
        wall_time: Duration::ZERO,
    };
    let mut next = start;
    while next < total {
        let end = (next + CHUNK).min(total);
        let outcomes: Vec<Outcome> = (next..end).into_par_iter().map(process).collect();
        for (k, o) in (next..end).zip(outcomes) {
            report.generated += 1;
            match o {
                Outcome::Duplicate => report.skipped_duplicates += 1,
                Outcome::Pruned => report.skipped_pruned += 1,
                Outcome::Checked {
                    failing,
                    violations,
                } => {
                    report.examined += 1;
                    for c in failing {
                        report.counterexamples.entry(c).or_default().push(k);
                    }
                    if !violations.is_empty() {
                        report.violations += 1;
                        report.violating_instances.push((k, violations));
                    }
                }
            }
        }
        next = end;
        on_chunk(&Checkpoint {
            mode: spec.mode,
            n: spec.n,
            next_index: next,
            violations: report.violations,
        });
    }
    report.wall_time = started.elapsed();
    Ok(report)
}
