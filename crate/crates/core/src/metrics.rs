//! Exact-match scoring, length buckets and the results table.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::dataset::{ExampleRecord, Task};
use crate::reduce::{Renaming, Strategy};
use crate::syntax::parse;
use crate::term::{alpha_eq, Lang};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("predictions line {line}: expected `id<TAB>prediction`")]
    Malformed { line: usize },
    #[error("prediction id {0} appears more than once")]
    DuplicateId(u64),
    #[error("prediction id {0} is not in the gold set")]
    UnknownId(u64),
    #[error("cannot make {k} buckets from {n} rows (need k >= 2 and n >= k)")]
    Buckets { k: usize, n: usize },
}

fn trim_newline(s: &str) -> &str {
    s.strip_suffix('\n').unwrap_or(s)
}

/// Parses `id<TAB>prediction` lines. The prediction may be empty.
pub fn parse_predictions(text: &str) -> Result<BTreeMap<u64, String>, MetricsError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.split_inclusive('\n').enumerate() {
        let line = trim_newline(line);
        if line.is_empty() {
            continue;
        }
        let (id, pred) = line.split_once('\t').ok_or(MetricsError::Malformed { line: i + 1 })?;
        let id: u64 = id.trim().parse().map_err(|_| MetricsError::Malformed { line: i + 1 })?;
        if out.insert(id, pred.to_string()).is_some() {
            return Err(MetricsError::DuplicateId(id));
        }
    }
    Ok(out)
}

/// Verdict for a single gold example.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub id: u64,
    pub correct: bool,
    pub missing: bool,
    /// Wrong as a string but alpha-equal to the gold term.
    pub alpha_equal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchResult {
    pub total: usize,
    pub correct: usize,
    pub verdicts: Vec<Verdict>,
}

impl MatchResult {
    pub fn score(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    pub fn alpha_equal_mismatches(&self) -> usize {
        self.verdicts.iter().filter(|v| v.alpha_equal).count()
    }

    /// Share of mismatches that are alpha-equal to gold; diagnostic only.
    pub fn alpha_share(&self) -> f64 {
        let wrong = self.total - self.correct;
        if wrong == 0 {
            0.0
        } else {
            self.alpha_equal_mismatches() as f64 / wrong as f64
        }
    }
}

/// Byte-exact comparison after removing one trailing newline from each side.
/// Missing predictions count as wrong. `lang` enables the alpha diagnostic.
pub fn exact_match(
    gold: &[(u64, &str)],
    preds: &BTreeMap<u64, String>,
    lang: Option<Lang>,
) -> Result<MatchResult, MetricsError> {
    let gold_ids: HashSet<u64> = gold.iter().map(|(id, _)| *id).collect();
    if let Some(id) = preds.keys().find(|id| !gold_ids.contains(id)) {
        return Err(MetricsError::UnknownId(*id));
    }
    let mut verdicts = Vec::with_capacity(gold.len());
    for &(id, g) in gold {
        let g = trim_newline(g);
        let v = match preds.get(&id) {
            None => Verdict {
                id,
                correct: false,
                missing: true,
                alpha_equal: false,
            },
            Some(p) => {
                let p = trim_newline(p);
                let correct = p == g;
                let alpha_equal = !correct
                    && lang.is_some_and(|l| match (parse(p, l), parse(g, l)) {
                        (Ok(a), Ok(b)) => alpha_eq(&a, &b),
                        _ => false,
                    });
                Verdict {
                    id,
                    correct,
                    missing: false,
                    alpha_equal,
                }
            }
        };
        verdicts.push(v);
    }
    Ok(MatchResult {
        total: gold.len(),
        correct: verdicts.iter().filter(|v| v.correct).count(),
        verdicts,
    })
}

/// Splits `(length, correct)` rows into `k` equal-population buckets by
/// length and returns `(mean length, exact match)` per bucket.
pub fn length_buckets(rows: &[(usize, bool)], k: usize) -> Result<Vec<(f64, f64)>, MetricsError> {
    let n = rows.len();
    if k < 2 || n < k {
        return Err(MetricsError::Buckets { k, n });
    }
    let mut sorted = rows.to_vec();
    sorted.sort_by_key(|(len, _)| *len);
    Ok((0..k)
        .map(|b| {
            let chunk = &sorted[b * n / k..(b + 1) * n / k];
            let len: usize = chunk.iter().map(|(l, _)| l).sum();
            let ok = chunk.iter().filter(|(_, c)| *c).count();
            (len as f64 / chunk.len() as f64, ok as f64 / chunk.len() as f64)
        })
        .collect())
}

pub fn buckets_csv(buckets: &[(f64, f64)]) -> String {
    let mut out = String::from("mean_length,exact_match\n");
    for (len, em) in buckets {
        let _ = writeln!(out, "{len:.3},{em:.4}");
    }
    out
}

/// Scores for one task, with the length-bucket tables.
#[derive(Clone, Debug)]
pub struct TaskScore {
    pub task: Task,
    pub result: MatchResult,
    pub input_buckets: Option<Vec<(f64, f64)>>,
    pub output_buckets: Option<Vec<(f64, f64)>>,
}

pub const DEFAULT_BUCKETS: usize = 10;

/// Scores predictions for `task` against the given gold records.
pub fn score_task(
    task: Task,
    gold: &[&ExampleRecord],
    preds: &BTreeMap<u64, String>,
    k: usize,
) -> Result<TaskScore, MetricsError> {
    let pairs: Vec<(u64, &str)> = gold.iter().map(|r| (r.id, r.target(task))).collect();
    let result = exact_match(&pairs, preds, Some(task.lang))?;
    let rows = |len: &dyn Fn(&ExampleRecord) -> usize| -> Vec<(usize, bool)> {
        gold.iter().zip(&result.verdicts).map(|(r, v)| (len(r), v.correct)).collect()
    };
    let input = rows(&|r| r.source_len(task.lang));
    let output = rows(&|r| r.target_len(task));
    Ok(TaskScore {
        task,
        input_buckets: length_buckets(&input, k).ok(),
        output_buckets: length_buckets(&output, k).ok(),
        result,
    })
}

/// Results table in the layout of the paper's tables: strategies as rows,
/// language and renaming as columns, `---` where nothing was scored.
pub fn render_report(scores: &[TaskScore], header: &str) -> String {
    let by_task: BTreeMap<Task, &TaskScore> = scores.iter().map(|s| (s.task, s)).collect();
    let columns: Vec<(Lang, Renaming)> = Lang::ALL
        .into_iter()
        .flat_map(|l| Renaming::ALL.into_iter().map(move |r| (l, r)))
        .collect();
    let mut out = String::new();
    if !header.is_empty() {
        let _ = writeln!(out, "{header}");
    }
    let _ = write!(out, "{:<6}", "");
    for (l, r) in &columns {
        let _ = write!(out, " {:>9}", format!("{} {}", l.as_str().to_uppercase(), r.as_str().to_uppercase()));
    }
    out.push('\n');
    for strategy in Strategy::ALL {
        let _ = write!(out, "{:<6}", strategy.as_str().to_uppercase());
        for &(lang, renaming) in &columns {
            let task = Task {
                lang,
                strategy,
                renaming,
            };
            match by_task.get(&task) {
                Some(s) => {
                    let _ = write!(out, " {:>9.4}", s.result.score());
                }
                None => {
                    let _ = write!(out, " {:>9}", "---");
                }
            }
        }
        out.push('\n');
    }
    out.push('\n');
    for s in scores {
        let r = &s.result;
        let _ = writeln!(
            out,
            "{}: exact_match = {:.4} ({}/{}), missing = {}, alpha_equal_mismatches = {} ({:.4} of mismatches)",
            s.task,
            r.score(),
            r.correct,
            r.total,
            r.verdicts.iter().filter(|v| v.missing).count(),
            r.alpha_equal_mismatches(),
            r.alpha_share(),
        );
    }
    out
}
