//! Train/test partitions: random, by type, by function composition and by
//! number of reduction steps, plus the manifest file format.
//!
//! A manifest is a JSON header line followed by tab-separated entries:
//!
//! ```text
//! {"kind":"by-steps","seed":0,"strategy":"whnf","params":{...},"warnings":[]}
//! train	17	lc1
//! test	42	lc2
//! record	{...synthesized ExampleRecord...}
//! compose	100000	12	873
//! ```
//!
//! The optional third column restricts an entry to one language. `record`
//! and `compose` lines only appear in composition manifests.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::dataset::{evaluate_term, ExampleRecord, Limits, Rejection};
use crate::reduce::{FuelExhausted, Strategy};
use crate::syntax::parse;
use crate::term::{rename_vr, Lang, Term, Var};
use crate::tokens::TokenCounter;
use crate::types::{check, type_frequency_order, Ty, TypeEnv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitKind {
    Random,
    ByType,
    ByComposition,
    BySteps,
}

impl SplitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitKind::Random => "random",
            SplitKind::ByType => "by-type",
            SplitKind::ByComposition => "by-composition",
            SplitKind::BySteps => "by-steps",
        }
    }
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(SplitKind::Random),
            "type" | "by-type" => Ok(SplitKind::ByType),
            "composition" | "by-composition" => Ok(SplitKind::ByComposition),
            "steps" | "by-steps" => Ok(SplitKind::BySteps),
            _ => Err(format!("unknown split kind `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Train,
    Test,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Train => "train",
            Side::Test => "test",
        }
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Side::Train),
            "test" => Ok(Side::Test),
            _ => Err(format!("unknown side `{s}` (expected train or test)")),
        }
    }
}

/// One manifest line. `lang = None` means the entry is valid for both languages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Entry {
    pub id: u64,
    pub lang: Option<Lang>,
}

impl Entry {
    pub fn any(id: u64) -> Self {
        Entry { id, lang: None }
    }

    pub fn applies_to(&self, lang: Lang) -> bool {
        self.lang.is_none_or(|l| l == lang)
    }
}

/// Provenance of a synthesized composition record: `id = e1 e2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Composition {
    pub id: u64,
    pub e1: u64,
    pub e2: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Header {
    kind: String,
    seed: u64,
    strategy: Option<String>,
    params: Value,
    warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitManifest {
    pub kind: SplitKind,
    pub seed: u64,
    pub strategy: Option<Strategy>,
    pub params: Value,
    pub warnings: Vec<String>,
    pub train: Vec<Entry>,
    pub test: Vec<Entry>,
    /// Synthesized records (composition only), referenced by `test` entries.
    pub records: Vec<ExampleRecord>,
    pub compositions: Vec<Composition>,
}

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("corpus has {available} records but {requested} were requested")]
    InsufficientCorpus { requested: usize, available: usize },
    #[error("the {0} side is empty")]
    EmptySide(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("record {id}: {message}")]
    BadRecord { id: u64, message: String },
    #[error("composition {e1} {e2}: {source}")]
    Fuel {
        e1: u64,
        e2: u64,
        #[source]
        source: FuelExhausted,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ManifestError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("id {0} appears on both sides for the same language")]
    Overlap(u64),
    #[error("id {0} is not in the corpus")]
    UnknownId(u64),
    #[error("manifest has no header line")]
    MissingHeader,
}

fn sorted(mut v: Vec<Entry>) -> Vec<Entry> {
    v.sort();
    v
}

fn sample<T: Copy>(items: &[T], n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut v = items.to_vec();
    let (chosen, _) = v.partial_shuffle(rng, n.min(items.len()));
    chosen.to_vec()
}

impl SplitManifest {
    fn new(kind: SplitKind, seed: u64, strategy: Option<Strategy>, params: Value) -> Self {
        SplitManifest {
            kind,
            seed,
            strategy,
            params,
            warnings: Vec::new(),
            train: Vec::new(),
            test: Vec::new(),
            records: Vec::new(),
            compositions: Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let header = Header {
            kind: self.kind.to_string(),
            seed: self.seed,
            strategy: self.strategy.map(|s| s.to_string()),
            params: self.params.clone(),
            warnings: self.warnings.clone(),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for (side, entries) in [(Side::Train, &self.train), (Side::Test, &self.test)] {
            for e in entries {
                let _ = write!(out, "{}\t{}", side.as_str(), e.id);
                if let Some(l) = e.lang {
                    let _ = write!(out, "\t{l}");
                }
                out.push('\n');
            }
        }
        for r in &self.records {
            let _ = writeln!(out, "record\t{}", r.to_json_line());
        }
        for c in &self.compositions {
            let _ = writeln!(out, "compose\t{}\t{}\t{}", c.id, c.e1, c.e2);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ManifestError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(ManifestError::MissingHeader)?;
        let bad = |line: usize, message: String| ManifestError::Malformed { line: line + 1, message };
        let header: Header = serde_json::from_str(first).map_err(|e| bad(0, e.to_string()))?;
        let kind = header.kind.parse().map_err(|e| bad(0, e))?;
        let strategy = header
            .strategy
            .as_deref()
            .map(str::parse)
            .transpose()
            .map_err(|e| bad(0, e))?;
        let mut m = SplitManifest::new(kind, header.seed, strategy, header.params);
        m.warnings = header.warnings;
        for (i, line) in lines {
            let (tag, rest) = line.split_once('\t').ok_or_else(|| bad(i, "missing tab".into()))?;
            let id = |s: &str| s.parse::<u64>().map_err(|e| bad(i, format!("bad id `{s}`: {e}")));
            match tag {
                "train" | "test" => {
                    let mut cols = rest.split('\t');
                    let entry = Entry {
                        id: id(cols.next().unwrap_or(""))?,
                        lang: cols.next().map(str::parse).transpose().map_err(|e| bad(i, e))?,
                    };
                    if cols.next().is_some() {
                        return Err(bad(i, "too many columns".into()));
                    }
                    if tag == "train" {
                        m.train.push(entry);
                    } else {
                        m.test.push(entry);
                    }
                }
                "record" => {
                    m.records
                        .push(serde_json::from_str(rest).map_err(|e| bad(i, e.to_string()))?);
                }
                "compose" => {
                    let cols: Vec<&str> = rest.split('\t').collect();
                    let [a, b, c] = cols.as_slice() else {
                        return Err(bad(i, "compose needs three ids".into()));
                    };
                    m.compositions.push(Composition {
                        id: id(a)?,
                        e1: id(b)?,
                        e2: id(c)?,
                    });
                }
                other => return Err(bad(i, format!("unknown tag `{other}`"))),
            }
        }
        Ok(m)
    }

    /// Entries of one side that apply to `lang`.
    pub fn ids(&self, side: Side, lang: Lang) -> Vec<u64> {
        let entries = match side {
            Side::Train => &self.train,
            Side::Test => &self.test,
        };
        entries.iter().filter(|e| e.applies_to(lang)).map(|e| e.id).collect()
    }

    /// Looks up the records of one side for `lang`, in manifest order.
    pub fn resolve<'a>(
        &'a self,
        corpus: &'a [ExampleRecord],
        side: Side,
        lang: Lang,
    ) -> Result<Vec<&'a ExampleRecord>, ManifestError> {
        let index = RecordIndex::new(corpus, &self.records);
        self.ids(side, lang)
            .into_iter()
            .map(|id| index.get(id).ok_or(ManifestError::UnknownId(id)))
            .collect()
    }

    /// Checks that every id resolves and no id sits on both sides of a language.
    pub fn validate(&self, corpus: &[ExampleRecord]) -> Result<(), ManifestError> {
        let index = RecordIndex::new(corpus, &self.records);
        for e in self.train.iter().chain(&self.test) {
            if index.get(e.id).is_none() {
                return Err(ManifestError::UnknownId(e.id));
            }
        }
        for lang in Lang::ALL {
            let train: HashSet<u64> = self.ids(Side::Train, lang).into_iter().collect();
            if let Some(id) = self.ids(Side::Test, lang).into_iter().find(|id| train.contains(id)) {
                return Err(ManifestError::Overlap(id));
            }
        }
        Ok(())
    }
}

struct RecordIndex<'a> {
    by_id: HashMap<u64, &'a ExampleRecord>,
}

impl<'a> RecordIndex<'a> {
    fn new(corpus: &'a [ExampleRecord], extra: &'a [ExampleRecord]) -> Self {
        RecordIndex {
            by_id: corpus.iter().chain(extra).map(|r| (r.id, r)).collect(),
        }
    }

    fn get(&self, id: u64) -> Option<&'a ExampleRecord> {
        self.by_id.get(&id).copied()
    }
}

pub const DEFAULT_RANDOM_TRAIN: usize = 90_000;
pub const DEFAULT_TYPE_TRAIN: usize = 80_000;
pub const DEFAULT_TEST: usize = 500;

/// Uniform sample without replacement.
pub fn random_split(
    corpus: &[ExampleRecord],
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<SplitManifest, SplitError> {
    if n_train + n_test > corpus.len() {
        return Err(SplitError::InsufficientCorpus {
            requested: n_train + n_test,
            available: corpus.len(),
        });
    }
    if n_train == 0 || n_test == 0 {
        return Err(SplitError::EmptySide(if n_train == 0 { "train" } else { "test" }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<u64> = corpus.iter().map(|r| r.id).collect();
    let chosen = sample(&ids, n_train + n_test, &mut rng);
    let mut m = SplitManifest::new(
        SplitKind::Random,
        seed,
        None,
        json!({ "n_train": n_train, "n_test": n_test }),
    );
    m.train = sorted(chosen[..n_train].iter().map(|&id| Entry::any(id)).collect());
    m.test = sorted(chosen[n_train..].iter().map(|&id| Entry::any(id)).collect());
    Ok(m)
}

/// Types ranked by frequency; the most common ones, up to and including the
/// type at which the cumulative share first reaches `train_frac`, go to train.
pub fn train_types(counts: &[(Ty, usize)], train_frac: f64) -> (Vec<Ty>, Vec<Ty>) {
    let total: usize = counts.iter().map(|(_, c)| c).sum();
    let mut cumulative = 0usize;
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (ty, c) in counts {
        if (cumulative as f64) < train_frac * total as f64 {
            train.push(ty.clone());
            cumulative += c;
        } else {
            test.push(ty.clone());
        }
    }
    (train, test)
}

pub fn split_by_type(
    corpus: &[ExampleRecord],
    train_frac: f64,
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<SplitManifest, SplitError> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(SplitError::InvalidParam(format!("train_frac {train_frac} must be in (0, 1)")));
    }
    let types = corpus
        .iter()
        .map(|r| {
            r.parsed_ty().map_err(|e| SplitError::BadRecord {
                id: r.id,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<Ty>, _>>()?;
    let counts = type_frequency_order(&types);
    let (train_tys, test_tys) = train_types(&counts, train_frac);
    let mut m = SplitManifest::new(
        SplitKind::ByType,
        seed,
        None,
        json!({
            "train_frac": train_frac,
            "n_train": n_train,
            "n_test": n_test,
            "train_types": train_tys.iter().map(Ty::to_string).collect::<Vec<_>>(),
            "test_type_count": test_tys.len(),
        }),
    );
    let total = corpus.len() as f64;
    if let Some((ty, c)) = counts.first() {
        if *c as f64 > train_frac * total {
            m.warnings
                .push(format!("type {ty} alone covers {:.3} of the corpus", *c as f64 / total));
        }
    }
    let train_set: HashSet<&Ty> = train_tys.iter().collect();
    let (mut pool_train, mut pool_test) = (Vec::new(), Vec::new());
    for (r, ty) in corpus.iter().zip(&types) {
        if train_set.contains(ty) {
            pool_train.push(r.id);
        } else {
            pool_test.push(r.id);
        }
    }
    if pool_test.is_empty() {
        return Err(SplitError::EmptySide("test"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (pool, n, side) in [(&pool_train, n_train, "train"), (&pool_test, n_test, "test")] {
        if pool.len() < n {
            m.warnings
                .push(format!("{side} pool has {} records, fewer than the requested {n}", pool.len()));
        }
    }
    m.train = sorted(sample(&pool_train, n_train, &mut rng).into_iter().map(Entry::any).collect());
    m.test = sorted(sample(&pool_test, n_test, &mut rng).into_iter().map(Entry::any).collect());
    if m.train.is_empty() {
        return Err(SplitError::EmptySide("train"));
    }
    Ok(m)
}

/// Step-count bands for [`split_by_steps`]. Both bands are inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepBands {
    pub train_max: u64,
    pub test_min: u64,
    pub test_max: u64,
}

impl StepBands {
    pub fn default_for(strategy: Strategy) -> Self {
        match strategy {
            Strategy::Whnf => StepBands {
                train_max: 6,
                test_min: 7,
                test_max: 12,
            },
            Strategy::Dnf => StepBands {
                train_max: 8,
                test_min: 9,
                test_max: 32,
            },
        }
    }
}

/// Partitions each language's view by its own step count, then subsamples so
/// both languages get the same number of records per step count.
///
/// `max_train` / `max_test` optionally cap each language's side; the per-step
/// counts are scaled down together so the histograms stay identical.
pub fn split_by_steps(
    corpus: &[ExampleRecord],
    strategy: Strategy,
    bands: StepBands,
    max_train: Option<usize>,
    max_test: Option<usize>,
    seed: u64,
) -> Result<SplitManifest, SplitError> {
    if !(bands.train_max < bands.test_min && bands.test_min <= bands.test_max) {
        return Err(SplitError::InvalidParam(format!(
            "need train_max < test_min <= test_max, got {} / {} / {}",
            bands.train_max, bands.test_min, bands.test_max
        )));
    }
    let mut m = SplitManifest::new(
        SplitKind::BySteps,
        seed,
        Some(strategy),
        json!({
            "train_max": bands.train_max,
            "test_min": bands.test_min,
            "test_max": bands.test_max,
            "max_train": max_train,
            "max_test": max_test,
        }),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sides = [
        (Side::Train, 0..=bands.train_max, max_train),
        (Side::Test, bands.test_min..=bands.test_max, max_test),
    ];
    for (side, band, cap) in sides {
        let mut buckets: [BTreeMap<u64, Vec<u64>>; 2] = Default::default();
        for r in corpus {
            for (k, lang) in Lang::ALL.into_iter().enumerate() {
                let s = r.steps(lang, strategy);
                if band.contains(&s) {
                    buckets[k].entry(s).or_default().push(r.id);
                }
            }
        }
        let mut quota: BTreeMap<u64, usize> = band
            .clone()
            .map(|s| {
                let n = |k: usize| buckets[k].get(&s).map_or(0, Vec::len);
                (s, n(0).min(n(1)))
            })
            .filter(|(_, n)| *n > 0)
            .collect();
        let total: usize = quota.values().sum();
        if let Some(cap) = cap {
            if total > cap {
                for n in quota.values_mut() {
                    *n = *n * cap / total;
                }
            }
        }
        if quota.values().all(|n| *n == 0) {
            return Err(SplitError::EmptySide(side.as_str()));
        }
        let mut entries = Vec::new();
        for (k, lang) in Lang::ALL.into_iter().enumerate() {
            for (s, n) in &quota {
                for id in sample(&buckets[k][s], *n, &mut rng) {
                    entries.push(Entry { id, lang: Some(lang) });
                }
            }
        }
        match side {
            Side::Train => m.train = sorted(entries),
            Side::Test => m.test = sorted(entries),
        }
    }
    Ok(m)
}

/// Parameters of [`compose_split`].
#[derive(Clone, Debug)]
pub struct ComposeParams {
    pub n_out: usize,
    pub max_uses: usize,
    pub seed: u64,
}

impl Default for ComposeParams {
    fn default() -> Self {
        ComposeParams {
            n_out: 500,
            max_uses: 3,
            seed: 0,
        }
    }
}

/// Whether `e1 e2` type-checks given the recorded types of its parts.
///
/// Stored sources carry no annotations, so the check runs on the skeleton
/// `f a` with `f : ty1, a : ty2`.
pub fn composition_type(ty1: &Ty, ty2: &Ty) -> Option<Ty> {
    let (f, a) = (Var(0), Var(1));
    let env = TypeEnv::new().with(f, ty1.clone()).with(a, ty2.clone());
    check(&env, &crate::term::app(Term::Var(f), Term::Var(a))).ok()
}

/// Synthesizes up to `n_out` new records `e1 e2` from `train` records.
///
/// `existing` holds source strings the output must avoid (the training
/// set, or the whole corpus). New ids start after `first_id - 1`.
pub fn compose_split(
    train: &[&ExampleRecord],
    existing: &HashSet<&str>,
    first_id: u64,
    params: &ComposeParams,
    limits: &Limits,
    counter: &TokenCounter,
) -> Result<SplitManifest, SplitError> {
    if params.n_out == 0 || params.max_uses == 0 {
        return Err(SplitError::InvalidParam("n_out and max_uses must be positive".into()));
    }
    let parsed = train
        .iter()
        .map(|r| {
            let ty = r.parsed_ty().map_err(|e| SplitError::BadRecord {
                id: r.id,
                message: e.to_string(),
            })?;
            let t = parse(&r.lc2_src, Lang::Lc2).map_err(|e| SplitError::BadRecord {
                id: r.id,
                message: e.to_string(),
            })?;
            Ok((ty, t))
        })
        .collect::<Result<Vec<(Ty, Term)>, SplitError>>()?;
    let mut by_type: HashMap<&Ty, Vec<usize>> = HashMap::new();
    for (i, (ty, _)) in parsed.iter().enumerate() {
        by_type.entry(ty).or_default().push(i);
    }
    let functions: Vec<usize> = (0..parsed.len())
        .filter(|&i| match &parsed[i].0 {
            Ty::Arrow(dom, _) => by_type.contains_key(dom.as_ref()),
            _ => false,
        })
        .collect();

    let mut m = SplitManifest::new(
        SplitKind::ByComposition,
        params.seed,
        None,
        json!({ "n_out": params.n_out, "max_uses": params.max_uses }),
    );
    m.train = train.iter().map(|r| Entry::any(r.id)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut uses = vec![0usize; parsed.len()];
    let mut seen: HashSet<String> = HashSet::new();
    let max_attempts = 1000 * params.n_out;
    let mut attempts = 0;
    let mut rejected_type = 0usize;
    let mut rejected_dup = 0usize;
    let mut rejected_long = 0usize;
    while m.records.len() < params.n_out && attempts < max_attempts && !functions.is_empty() {
        attempts += 1;
        let i = functions[rng.random_range(0..functions.len())];
        let Ty::Arrow(dom, _) = &parsed[i].0 else { unreachable!() };
        let args = &by_type[dom.as_ref()];
        let j = args[rng.random_range(0..args.len())];
        if uses[i] >= params.max_uses || uses[j] >= params.max_uses {
            continue;
        }
        let Some(ty) = composition_type(&parsed[i].0, &parsed[j].0) else {
            rejected_type += 1;
            continue;
        };
        let term = rename_vr(&crate::term::app(parsed[i].1.clone(), parsed[j].1.clone()));
        let src = crate::syntax::print(&term);
        if existing.contains(src.as_str()) || seen.contains(&src) {
            rejected_dup += 1;
            continue;
        }
        let mut rec = match evaluate_term(&term, &ty, limits, counter) {
            Ok(r) => r,
            Err(Rejection::Fuel(source)) => {
                return Err(SplitError::Fuel {
                    e1: train[i].id,
                    e2: train[j].id,
                    source,
                })
            }
            Err(_) => {
                rejected_long += 1;
                continue;
            }
        };
        rec.id = first_id + m.records.len() as u64;
        uses[i] += 1;
        uses[j] += 1;
        seen.insert(src);
        m.compositions.push(Composition {
            id: rec.id,
            e1: train[i].id,
            e2: train[j].id,
        });
        m.test.push(Entry::any(rec.id));
        m.records.push(rec);
    }
    if let Some(obj) = m.params.as_object_mut() {
        obj.insert("attempts".into(), json!(attempts));
        obj.insert("rejected_type".into(), json!(rejected_type));
        obj.insert("rejected_duplicate".into(), json!(rejected_dup));
        obj.insert("rejected_too_long".into(), json!(rejected_long));
    }
    if m.records.len() < params.n_out {
        m.warnings.push(format!(
            "exhausted after {attempts} attempts with {} of {} records",
            m.records.len(),
            params.n_out
        ));
    }
    if m.records.is_empty() {
        return Err(SplitError::EmptySide("test"));
    }
    Ok(m)
}

/// How many times each source id is used across compositions.
pub fn composition_uses(compositions: &[Composition]) -> BTreeMap<u64, usize> {
    let mut uses = BTreeMap::new();
    for c in compositions {
        *uses.entry(c.e1).or_default() += 1;
        *uses.entry(c.e2).or_default() += 1;
    }
    uses
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::build_corpus;
    use crate::generate::GenConfig;

    fn corpus(n: usize) -> Vec<ExampleRecord> {
        build_corpus(&GenConfig::default(), n, &TokenCounter::Whitespace)
            .unwrap()
            .records
    }

    #[test]
    fn random_split_is_disjoint_and_seeded() {
        let c = corpus(4);
        let m = random_split(&c, 2, 2, 9).unwrap();
        assert_eq!((m.train.len(), m.test.len()), (2, 2));
        m.validate(&c).unwrap();
        assert_eq!(m, random_split(&c, 2, 2, 9).unwrap());
        assert!(matches!(
            random_split(&c, 3, 2, 9),
            Err(SplitError::InsufficientCorpus { .. })
        ));
    }

    #[test]
    fn greedy_cutoff_includes_boundary_type() {
        let counts = vec![
            (Ty::Bool, 8),
            (Ty::Unit, 1),
            (Ty::list(Ty::Bool), 1),
        ];
        let (train, test) = train_types(&counts, 0.8);
        assert_eq!(train, vec![Ty::Bool]);
        assert_eq!(test, vec![Ty::Unit, Ty::list(Ty::Bool)]);
        let (train, _) = train_types(&counts, 0.85);
        assert_eq!(train, vec![Ty::Bool, Ty::Unit]);
    }

    #[test]
    fn type_split_sides_have_disjoint_types() {
        let c = corpus(400);
        let m = split_by_type(&c, 0.8, 200, 50, 1).unwrap();
        m.validate(&c).unwrap();
        let tys = |side| -> HashSet<String> {
            m.resolve(&c, side, Lang::Lc1).unwrap().iter().map(|r| r.ty.clone()).collect()
        };
        assert!(tys(Side::Train).is_disjoint(&tys(Side::Test)));
    }

    #[test]
    fn steps_split_bands_and_equal_histograms() {
        let c = corpus(1000);
        let bands = StepBands::default_for(Strategy::Whnf);
        let m = split_by_steps(&c, Strategy::Whnf, bands, None, None, 3).unwrap();
        m.validate(&c).unwrap();
        for (side, range) in [(Side::Train, 0..=6), (Side::Test, 7..=12)] {
            let mut hists = Vec::new();
            for lang in Lang::ALL {
                let mut h = BTreeMap::new();
                for r in m.resolve(&c, side, lang).unwrap() {
                    let s = r.steps(lang, Strategy::Whnf);
                    assert!(range.contains(&s));
                    *h.entry(s).or_insert(0) += 1;
                }
                hists.push(h);
            }
            assert_eq!(hists[0], hists[1]);
        }
        let capped = split_by_steps(&c, Strategy::Whnf, bands, Some(50), None, 3).unwrap();
        assert!(capped.ids(Side::Train, Lang::Lc1).len() <= 50);
    }

    #[test]
    fn composition_example() {
        assert_eq!(
            composition_type(&Ty::arrow(Ty::Unit, Ty::Unit), &Ty::Unit),
            Some(Ty::Unit)
        );
        assert_eq!(composition_type(&Ty::arrow(Ty::Unit, Ty::Unit), &Ty::Bool), None);
        assert_eq!(composition_type(&Ty::Unit, &Ty::Unit), None);
    }

    #[test]
    fn composition_respects_use_cap_and_uniqueness() {
        let c = corpus(2000);
        let train: Vec<&ExampleRecord> = c.iter().collect();
        let existing: HashSet<&str> = c.iter().map(|r| r.lc2_src.as_str()).collect();
        let params = ComposeParams {
            n_out: 50,
            ..ComposeParams::default()
        };
        let cfg = GenConfig::default();
        let m = compose_split(&train, &existing, 2000, &params, &Limits::from(&cfg), &TokenCounter::Whitespace)
            .unwrap();
        assert_eq!(m.records.len(), 50);
        assert!(composition_uses(&m.compositions).values().all(|&u| u <= 3));
        assert!(m.records.iter().all(|r| !existing.contains(r.lc2_src.as_str())));
        assert_eq!(m.records[0].id, 2000);
        m.validate(&c).unwrap();
    }

    #[test]
    fn manifest_text_round_trip() {
        let c = corpus(300);
        let m = split_by_steps(&c, Strategy::Dnf, StepBands::default_for(Strategy::Dnf), None, None, 5)
            .unwrap();
        let text = m.to_text();
        assert_eq!(SplitManifest::from_text(&text).unwrap(), m);
        let train: Vec<&ExampleRecord> = c.iter().collect();
        let existing = HashSet::new();
        let cm = compose_split(
            &train,
            &existing,
            300,
            &ComposeParams {
                n_out: 5,
                ..Default::default()
            },
            &Limits::from(&GenConfig::default()),
            &TokenCounter::Whitespace,
        )
        .unwrap();
        assert_eq!(SplitManifest::from_text(&cm.to_text()).unwrap(), cm);
    }

    #[test]
    fn manifest_rejects_garbage() {
        assert_eq!(SplitManifest::from_text(""), Err(ManifestError::MissingHeader));
        let header = r#"{"kind":"random","seed":0,"strategy":null,"params":{},"warnings":[]}"#;
        assert!(SplitManifest::from_text(&format!("{header}\nvalid\t1\n")).is_err());
        assert!(SplitManifest::from_text(&format!("{header}\ntrain\tx\n")).is_err());
        let overlap = SplitManifest::from_text(&format!("{header}\ntrain\t0\ntest\t0\n")).unwrap();
        assert_eq!(overlap.validate(&corpus(2)), Err(ManifestError::Overlap(0)));
    }
}
