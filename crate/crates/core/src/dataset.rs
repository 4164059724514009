//! Example records, corpus generation, persistence, statistics and audit.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::church::church_encode;
use crate::generate::{generate_term, generate_type, ConfigError, GenConfig};
use crate::par;
use crate::reduce::{is_dnf, is_whnf, reduce_both, FuelExhausted, Renaming, Strategy};
use crate::syntax::{parse, print};
use crate::term::{rename_vr, Lang, Term};
use crate::tokens::{TokenCounter, VocabError};
use crate::types::{type_frequency_order, Ty};

/// One corpus row. Field order is the serialized order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleRecord {
    pub id: u64,
    pub ty: String,
    pub lc1_src: String,
    pub lc2_src: String,
    pub lc1_whnf_vr: String,
    pub lc1_whnf_nvr: String,
    pub lc1_dnf_vr: String,
    pub lc1_dnf_nvr: String,
    pub lc2_whnf_vr: String,
    pub lc2_whnf_nvr: String,
    pub lc2_dnf_vr: String,
    pub lc2_dnf_nvr: String,
    pub steps_whnf_lc1: u64,
    pub steps_dnf_lc1: u64,
    pub steps_whnf_lc2: u64,
    pub steps_dnf_lc2: u64,
    pub len_lc1_src: usize,
    pub len_lc2_src: usize,
    pub len_lc1_whnf_vr: usize,
    pub len_lc1_whnf_nvr: usize,
    pub len_lc1_dnf_vr: usize,
    pub len_lc1_dnf_nvr: usize,
    pub len_lc2_whnf_vr: usize,
    pub len_lc2_whnf_nvr: usize,
    pub len_lc2_dnf_vr: usize,
    pub len_lc2_dnf_nvr: usize,
}

/// A (language, strategy, renaming) training task, written `lc1,whnf,vr`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Task {
    pub lang: Lang,
    pub strategy: Strategy,
    pub renaming: Renaming,
}

impl Task {
    pub fn all() -> impl Iterator<Item = Task> {
        Strategy::ALL.into_iter().flat_map(|strategy| {
            Renaming::ALL.into_iter().flat_map(move |renaming| {
                Lang::ALL.into_iter().map(move |lang| Task {
                    lang,
                    strategy,
                    renaming,
                })
            })
        })
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.lang, self.strategy, self.renaming)
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [lang, strategy, renaming] = parts.as_slice() else {
            return Err(format!("task `{s}` must look like lc1,whnf,vr"));
        };
        Ok(Task {
            lang: lang.parse()?,
            strategy: strategy.parse()?,
            renaming: renaming.parse()?,
        })
    }
}

impl ExampleRecord {
    pub fn source(&self, lang: Lang) -> &str {
        match lang {
            Lang::Lc1 => &self.lc1_src,
            Lang::Lc2 => &self.lc2_src,
        }
    }

    pub fn source_len(&self, lang: Lang) -> usize {
        match lang {
            Lang::Lc1 => self.len_lc1_src,
            Lang::Lc2 => self.len_lc2_src,
        }
    }

    pub fn target(&self, task: Task) -> &str {
        use {Lang::*, Renaming::*, Strategy::*};
        match (task.lang, task.strategy, task.renaming) {
            (Lc1, Whnf, Vr) => &self.lc1_whnf_vr,
            (Lc1, Whnf, Nvr) => &self.lc1_whnf_nvr,
            (Lc1, Dnf, Vr) => &self.lc1_dnf_vr,
            (Lc1, Dnf, Nvr) => &self.lc1_dnf_nvr,
            (Lc2, Whnf, Vr) => &self.lc2_whnf_vr,
            (Lc2, Whnf, Nvr) => &self.lc2_whnf_nvr,
            (Lc2, Dnf, Vr) => &self.lc2_dnf_vr,
            (Lc2, Dnf, Nvr) => &self.lc2_dnf_nvr,
        }
    }

    pub fn target_len(&self, task: Task) -> usize {
        use {Lang::*, Renaming::*, Strategy::*};
        match (task.lang, task.strategy, task.renaming) {
            (Lc1, Whnf, Vr) => self.len_lc1_whnf_vr,
            (Lc1, Whnf, Nvr) => self.len_lc1_whnf_nvr,
            (Lc1, Dnf, Vr) => self.len_lc1_dnf_vr,
            (Lc1, Dnf, Nvr) => self.len_lc1_dnf_nvr,
            (Lc2, Whnf, Vr) => self.len_lc2_whnf_vr,
            (Lc2, Whnf, Nvr) => self.len_lc2_whnf_nvr,
            (Lc2, Dnf, Vr) => self.len_lc2_dnf_vr,
            (Lc2, Dnf, Nvr) => self.len_lc2_dnf_nvr,
        }
    }

    pub fn steps(&self, lang: Lang, strategy: Strategy) -> u64 {
        match (lang, strategy) {
            (Lang::Lc1, Strategy::Whnf) => self.steps_whnf_lc1,
            (Lang::Lc1, Strategy::Dnf) => self.steps_dnf_lc1,
            (Lang::Lc2, Strategy::Whnf) => self.steps_whnf_lc2,
            (Lang::Lc2, Strategy::Dnf) => self.steps_dnf_lc2,
        }
    }

    pub fn parsed_ty(&self) -> Result<Ty, crate::types::TyParseError> {
        self.ty.parse()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serialization cannot fail")
    }
}

/// Why a drawn example did not make it into the corpus.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Rejection {
    #[error("{field} has {len} tokens (limit {limit})")]
    TooLong {
        field: &'static str,
        len: usize,
        limit: usize,
    },
    #[error("duplicate of an earlier example")]
    Duplicate,
    #[error("term generation failed")]
    GenerationFailure,
    #[error(transparent)]
    Fuel(#[from] FuelExhausted),
}

/// Length caps and reduction fuel applied when evaluating a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_input_tokens: usize,
    pub max_output_tokens: usize,
    pub fuel: u64,
}

impl From<&GenConfig> for Limits {
    fn from(cfg: &GenConfig) -> Self {
        Limits {
            max_input_tokens: cfg.max_input_tokens,
            max_output_tokens: cfg.max_output_tokens,
            fuel: cfg.fuel,
        }
    }
}

const TARGET_FIELDS: [(&str, Lang, Strategy, Renaming); 8] = [
    ("lc1_whnf_vr", Lang::Lc1, Strategy::Whnf, Renaming::Vr),
    ("lc1_whnf_nvr", Lang::Lc1, Strategy::Whnf, Renaming::Nvr),
    ("lc1_dnf_vr", Lang::Lc1, Strategy::Dnf, Renaming::Vr),
    ("lc1_dnf_nvr", Lang::Lc1, Strategy::Dnf, Renaming::Nvr),
    ("lc2_whnf_vr", Lang::Lc2, Strategy::Whnf, Renaming::Vr),
    ("lc2_whnf_nvr", Lang::Lc2, Strategy::Whnf, Renaming::Nvr),
    ("lc2_dnf_vr", Lang::Lc2, Strategy::Dnf, Renaming::Vr),
    ("lc2_dnf_nvr", Lang::Lc2, Strategy::Dnf, Renaming::Nvr),
];

struct Evaluated {
    whnf_nvr: String,
    whnf_vr: String,
    dnf_nvr: String,
    dnf_vr: String,
    steps_whnf: u64,
    steps_dnf: u64,
}

fn check_len(
    field: &'static str,
    s: &str,
    limit: usize,
    counter: &TokenCounter,
) -> Result<usize, Rejection> {
    let len = counter.count(s);
    if len > limit {
        Err(Rejection::TooLong { field, len, limit })
    } else {
        Ok(len)
    }
}

fn evaluate_one(
    t: &Term,
    lang: Lang,
    limits: &Limits,
    counter: &TokenCounter,
) -> Result<Evaluated, Rejection> {
    let (whnf, dnf) = reduce_both(t, limits.fuel)?;
    let out = Evaluated {
        whnf_vr: print(&rename_vr(&whnf.normal_form)),
        whnf_nvr: print(&whnf.normal_form),
        dnf_vr: print(&rename_vr(&dnf.normal_form)),
        dnf_nvr: print(&dnf.normal_form),
        steps_whnf: whnf.steps,
        steps_dnf: dnf.steps,
    };
    let names: [&'static str; 4] = match lang {
        Lang::Lc1 => ["lc1_whnf_vr", "lc1_whnf_nvr", "lc1_dnf_vr", "lc1_dnf_nvr"],
        Lang::Lc2 => ["lc2_whnf_vr", "lc2_whnf_nvr", "lc2_dnf_vr", "lc2_dnf_nvr"],
    };
    for (name, s) in names.into_iter().zip([&out.whnf_vr, &out.whnf_nvr, &out.dnf_vr, &out.dnf_nvr]) {
        check_len(name, s, limits.max_output_tokens, counter)?;
    }
    Ok(out)
}

/// Builds the full record for a sugared term whose binders are already in
/// preorder numbering. The id is left at 0 for the caller to assign.
pub fn evaluate_term(
    lc2: &Term,
    ty: &Ty,
    limits: &Limits,
    counter: &TokenCounter,
) -> Result<ExampleRecord, Rejection> {
    let lc2_src = print(lc2);
    let len_lc2_src = check_len("lc2_src", &lc2_src, limits.max_input_tokens, counter)?;
    let lc1 = church_encode(lc2);
    let lc1_src = print(&lc1);
    let len_lc1_src = check_len("lc1_src", &lc1_src, limits.max_input_tokens, counter)?;
    let e2 = evaluate_one(lc2, Lang::Lc2, limits, counter)?;
    let e1 = evaluate_one(&lc1, Lang::Lc1, limits, counter)?;
    let n = |s: &str| counter.count(s);
    Ok(ExampleRecord {
        id: 0,
        ty: ty.to_string(),
        len_lc1_src,
        len_lc2_src,
        len_lc1_whnf_vr: n(&e1.whnf_vr),
        len_lc1_whnf_nvr: n(&e1.whnf_nvr),
        len_lc1_dnf_vr: n(&e1.dnf_vr),
        len_lc1_dnf_nvr: n(&e1.dnf_nvr),
        len_lc2_whnf_vr: n(&e2.whnf_vr),
        len_lc2_whnf_nvr: n(&e2.whnf_nvr),
        len_lc2_dnf_vr: n(&e2.dnf_vr),
        len_lc2_dnf_nvr: n(&e2.dnf_nvr),
        lc1_src,
        lc2_src,
        lc1_whnf_vr: e1.whnf_vr,
        lc1_whnf_nvr: e1.whnf_nvr,
        lc1_dnf_vr: e1.dnf_vr,
        lc1_dnf_nvr: e1.dnf_nvr,
        lc2_whnf_vr: e2.whnf_vr,
        lc2_whnf_nvr: e2.whnf_nvr,
        lc2_dnf_vr: e2.dnf_vr,
        lc2_dnf_nvr: e2.dnf_nvr,
        steps_whnf_lc1: e1.steps_whnf,
        steps_dnf_lc1: e1.steps_dnf,
        steps_whnf_lc2: e2.steps_whnf,
        steps_dnf_lc2: e2.steps_dnf,
    })
}

/// Draws example number `index` of the stream defined by `cfg.seed`.
///
/// Deduplication is the caller's job; this never returns `Duplicate`.
pub fn generate_example(
    cfg: &GenConfig,
    counter: &TokenCounter,
    index: u64,
) -> Result<ExampleRecord, Rejection> {
    let mut rng = cfg.rng_for(index);
    let ty = generate_type(cfg, &mut rng);
    let term = generate_term(&ty, cfg, &mut rng).map_err(|_| Rejection::GenerationFailure)?;
    evaluate_term(&rename_vr(&term), &ty, &Limits::from(cfg), counter)
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error("example {index}: {source}")]
    Fuel {
        index: u64,
        #[source]
        source: FuelExhausted,
    },
    #[error("acceptance rate {accepted}/{attempts} is below 1%; check the generator configuration")]
    LowAcceptance { accepted: usize, attempts: u64 },
}

/// Counters gathered while building a corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub attempts: u64,
    pub accepted: usize,
    pub rejected_too_long: u64,
    pub rejected_duplicate: u64,
    pub rejected_generation_failure: u64,
}

impl BuildStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempts as f64
        }
    }
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub records: Vec<ExampleRecord>,
    pub stats: BuildStats,
}

const BATCH: u64 = 2048;
const MIN_ATTEMPTS_FOR_RATE_CHECK: u64 = 1000;

/// Generates `n` unique records in id order.
///
/// Candidates are drawn in parallel batches of example indices and merged in
/// index order, so the output depends only on the configuration.
pub fn build_corpus(
    cfg: &GenConfig,
    n: usize,
    counter: &TokenCounter,
) -> Result<Corpus, PipelineError> {
    build_corpus_with(cfg, n, counter, |range, f| par::map_range(range, f))
}

/// Same as [`build_corpus`] but strictly single-threaded.
pub fn build_corpus_seq(
    cfg: &GenConfig,
    n: usize,
    counter: &TokenCounter,
) -> Result<Corpus, PipelineError> {
    build_corpus_with(cfg, n, counter, |range, f| par::map_range_seq(range, f))
}

type Candidate = Result<ExampleRecord, Rejection>;

fn build_corpus_with<M>(
    cfg: &GenConfig,
    n: usize,
    counter: &TokenCounter,
    map: M,
) -> Result<Corpus, PipelineError>
where
    M: Fn(std::ops::Range<u64>, &(dyn Fn(u64) -> Candidate + Sync + Send)) -> Vec<Candidate>,
{
    cfg.validate()?;
    let mut stats = BuildStats::default();
    let mut records = Vec::with_capacity(n);
    let mut seen: HashSet<String> = HashSet::with_capacity(n);
    let mut next_index = 0u64;
    let draw = |i: u64| generate_example(cfg, counter, i);
    while records.len() < n {
        let batch = map(next_index..next_index + BATCH, &draw);
        for (offset, candidate) in batch.into_iter().enumerate() {
            let index = next_index + offset as u64;
            stats.attempts += 1;
            match candidate {
                Ok(mut rec) => {
                    if seen.insert(rec.lc2_src.clone()) {
                        rec.id = records.len() as u64;
                        records.push(rec);
                    } else {
                        stats.rejected_duplicate += 1;
                    }
                }
                Err(Rejection::TooLong { .. }) => stats.rejected_too_long += 1,
                Err(Rejection::GenerationFailure) => stats.rejected_generation_failure += 1,
                Err(Rejection::Duplicate) => stats.rejected_duplicate += 1,
                Err(Rejection::Fuel(source)) => return Err(PipelineError::Fuel { index, source }),
            }
            if records.len() == n {
                break;
            }
        }
        next_index += BATCH;
        stats.accepted = records.len();
        if stats.attempts >= MIN_ATTEMPTS_FOR_RATE_CHECK && stats.acceptance_rate() < 0.01 {
            return Err(PipelineError::LowAcceptance {
                accepted: stats.accepted,
                attempts: stats.attempts,
            });
        }
    }
    stats.accepted = records.len();
    Ok(Corpus { records, stats })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: id {id} is not greater than the previous id {prev}")]
    UnorderedIds { line: usize, id: u64, prev: u64 },
}

/// Serializes records, one JSON object per line.
pub fn corpus_to_string(records: &[ExampleRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.to_json_line());
        out.push('\n');
    }
    out
}

pub fn corpus_from_str(text: &str) -> Result<Vec<ExampleRecord>, CorpusError> {
    let mut out: Vec<ExampleRecord> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ExampleRecord = serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        if let Some(prev) = out.last() {
            if rec.id <= prev.id {
                return Err(CorpusError::UnorderedIds {
                    line: i + 1,
                    id: rec.id,
                    prev: prev.id,
                });
            }
        }
        out.push(rec);
    }
    Ok(out)
}

/// Median of integer samples; the mean of the two middle values for even sizes.
pub fn median(values: &mut [u64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid] as f64
    } else {
        (values[mid - 1] + values[mid]) as f64 / 2.0
    })
}

pub const STEP_FIELDS: [(&str, Lang, Strategy); 4] = [
    ("steps_whnf_lc1", Lang::Lc1, Strategy::Whnf),
    ("steps_whnf_lc2", Lang::Lc2, Strategy::Whnf),
    ("steps_dnf_lc1", Lang::Lc1, Strategy::Dnf),
    ("steps_dnf_lc2", Lang::Lc2, Strategy::Dnf),
];

fn length_fields(r: &ExampleRecord) -> [(&'static str, usize); 10] {
    [
        ("len_lc1_src", r.len_lc1_src),
        ("len_lc2_src", r.len_lc2_src),
        ("len_lc1_whnf_vr", r.len_lc1_whnf_vr),
        ("len_lc1_whnf_nvr", r.len_lc1_whnf_nvr),
        ("len_lc1_dnf_vr", r.len_lc1_dnf_vr),
        ("len_lc1_dnf_nvr", r.len_lc1_dnf_nvr),
        ("len_lc2_whnf_vr", r.len_lc2_whnf_vr),
        ("len_lc2_whnf_nvr", r.len_lc2_whnf_nvr),
        ("len_lc2_dnf_vr", r.len_lc2_dnf_vr),
        ("len_lc2_dnf_nvr", r.len_lc2_dnf_nvr),
    ]
}

/// Distributional summary of a corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusStats {
    pub n: usize,
    pub type_counts: Vec<(Ty, usize)>,
    /// step field name → (step count → records)
    pub step_histograms: BTreeMap<&'static str, BTreeMap<u64, usize>>,
    pub step_medians: BTreeMap<&'static str, f64>,
    /// length field name → (length → records)
    pub length_histograms: BTreeMap<&'static str, BTreeMap<usize, usize>>,
    pub length_means: BTreeMap<&'static str, f64>,
}

impl CorpusStats {
    pub fn compute(records: &[ExampleRecord]) -> Self {
        let types: Vec<Ty> = records.iter().filter_map(|r| r.parsed_ty().ok()).collect();
        let mut step_histograms = BTreeMap::new();
        let mut step_medians = BTreeMap::new();
        for (name, lang, strategy) in STEP_FIELDS {
            let mut values: Vec<u64> = records.iter().map(|r| r.steps(lang, strategy)).collect();
            let hist: &mut BTreeMap<u64, usize> = step_histograms.entry(name).or_default();
            for v in &values {
                *hist.entry(*v).or_default() += 1;
            }
            if let Some(m) = median(&mut values) {
                step_medians.insert(name, m);
            }
        }
        let mut length_histograms: BTreeMap<&'static str, BTreeMap<usize, usize>> = BTreeMap::new();
        let mut sums: BTreeMap<&'static str, usize> = BTreeMap::new();
        for r in records {
            for (name, len) in length_fields(r) {
                *length_histograms.entry(name).or_default().entry(len).or_default() += 1;
                *sums.entry(name).or_default() += len;
            }
        }
        let length_means = sums
            .into_iter()
            .map(|(k, s)| (k, s as f64 / records.len().max(1) as f64))
            .collect();
        CorpusStats {
            n: records.len(),
            type_counts: type_frequency_order(&types),
            step_histograms,
            step_medians,
            length_histograms,
            length_means,
        }
    }

    /// Plain-text `key = value` report.
    pub fn report(&self, build: Option<&BuildStats>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "records = {}", self.n);
        if let Some(b) = build {
            let _ = writeln!(out, "attempts = {}", b.attempts);
            let _ = writeln!(out, "acceptance_rate = {:.4}", b.acceptance_rate());
            let _ = writeln!(out, "rejected_too_long = {}", b.rejected_too_long);
            let _ = writeln!(out, "rejected_duplicate = {}", b.rejected_duplicate);
            let _ = writeln!(out, "rejected_generation_failure = {}", b.rejected_generation_failure);
        }
        for (name, m) in &self.step_medians {
            let _ = writeln!(out, "median_{name} = {m}");
        }
        for (name, m) in &self.length_means {
            let _ = writeln!(out, "mean_{name} = {m:.3}");
        }
        let ratio = |a: &str, b: &str| self.length_means[a] / self.length_means[b].max(f64::MIN_POSITIVE);
        if self.n > 0 {
            let _ = writeln!(out, "length_ratio_src = {:.3}", ratio("len_lc1_src", "len_lc2_src"));
            let _ = writeln!(out, "length_ratio_dnf_vr = {:.3}", ratio("len_lc1_dnf_vr", "len_lc2_dnf_vr"));
        }
        let _ = writeln!(out, "distinct_types = {}", self.type_counts.len());
        for (rank, (ty, count)) in self.type_counts.iter().take(10).enumerate() {
            let _ = writeln!(out, "type_rank_{} = {} ({})", rank + 1, ty, count);
        }
        out
    }

    /// `steps,<field>...` with one row per step count.
    pub fn steps_csv(&self) -> String {
        let keys: std::collections::BTreeSet<u64> = self
            .step_histograms
            .values()
            .flat_map(|h| h.keys().copied())
            .collect();
        let mut out = String::from("steps");
        for (name, _, _) in STEP_FIELDS {
            let _ = write!(out, ",{name}");
        }
        out.push('\n');
        for k in keys {
            let _ = write!(out, "{k}");
            for (name, _, _) in STEP_FIELDS {
                let c = self.step_histograms.get(name).and_then(|h| h.get(&k)).unwrap_or(&0);
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }

    /// Long format: `field,length,count`.
    pub fn lengths_csv(&self) -> String {
        let mut out = String::from("field,length,count\n");
        for (name, hist) in &self.length_histograms {
            for (len, count) in hist {
                let _ = writeln!(out, "{name},{len},{count}");
            }
        }
        out
    }

    pub fn types_csv(&self) -> String {
        let mut out = String::from("type,count\n");
        for (ty, count) in &self.type_counts {
            let _ = writeln!(out, "\"{ty}\",{count}");
        }
        out
    }
}

/// A discrepancy found by [`audit`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditIssue {
    pub id: u64,
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for AuditIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "record {}: {}: {}", self.id, self.field, self.message)
    }
}

/// Recomputes every derived field from `lc2_src` and compares.
pub fn audit_record(rec: &ExampleRecord, limits: &Limits, counter: &TokenCounter) -> Vec<AuditIssue> {
    let mut issues = Vec::new();
    let mut issue = |field: &'static str, message: String| {
        issues.push(AuditIssue {
            id: rec.id,
            field,
            message,
        })
    };
    let ty = match rec.parsed_ty() {
        Ok(t) => t,
        Err(e) => {
            issue("ty", e.to_string());
            return issues;
        }
    };
    let lc2 = match parse(&rec.lc2_src, Lang::Lc2) {
        Ok(t) => t,
        Err(e) => {
            issue("lc2_src", e.to_string());
            return issues;
        }
    };
    if !lc2.is_closed() {
        issue("lc2_src", "term has free variables".into());
    }
    if print(&lc2) != rec.lc2_src {
        issue("lc2_src", "not in canonical form".into());
    }
    let fresh = match evaluate_term(&lc2, &ty, limits, counter) {
        Ok(r) => r,
        Err(e) => {
            issue("lc2_src", format!("re-evaluation rejected: {e}"));
            return issues;
        }
    };
    let expected = ExampleRecord { id: rec.id, ..fresh };
    if expected.lc1_src != rec.lc1_src {
        issue("lc1_src", "differs from the encoding of lc2_src".into());
    }
    for (name, lang, strategy, renaming) in TARGET_FIELDS {
        let task = Task {
            lang,
            strategy,
            renaming,
        };
        if expected.target(task) != rec.target(task) {
            issue(name, format!("stored `{}`, recomputed `{}`", rec.target(task), expected.target(task)));
            continue;
        }
        match parse(rec.target(task), lang) {
            Ok(t) => {
                let normal = match strategy {
                    Strategy::Whnf => is_whnf(&t),
                    Strategy::Dnf => is_dnf(&t),
                };
                if !normal {
                    issue(name, "not in normal form".into());
                }
            }
            Err(e) => issue(name, e.to_string()),
        }
    }
    for (name, lang, strategy) in STEP_FIELDS {
        if expected.steps(lang, strategy) != rec.steps(lang, strategy) {
            issue(name, format!("stored {}, recomputed {}", rec.steps(lang, strategy), expected.steps(lang, strategy)));
        }
    }
    for lang in Lang::ALL {
        if rec.steps(lang, Strategy::Whnf) > rec.steps(lang, Strategy::Dnf) {
            issue("steps", format!("{lang}: WHNF steps exceed DNF steps"));
        }
    }
    if length_fields(&expected) != length_fields(rec) {
        issue("len_*", "stored token lengths differ from recomputed ones".into());
    }
    issues
}

/// Audits every record and checks corpus-wide uniqueness of `lc2_src`.
pub fn audit(records: &[ExampleRecord], limits: &Limits, counter: &TokenCounter) -> Vec<AuditIssue> {
    let mut issues: Vec<AuditIssue> = par::map_slice(records, |r| audit_record(r, limits, counter))
        .into_iter()
        .flatten()
        .collect();
    let mut seen = HashSet::new();
    for r in records {
        if !seen.insert(r.lc2_src.as_str()) {
            issues.push(AuditIssue {
                id: r.id,
                field: "lc2_src",
                message: "duplicate source".into(),
            });
        }
    }
    issues
}
