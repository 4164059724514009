//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod support;

use std::collections::{BTreeMap, HashSet};
use std::process::Command;
use std::time::{Duration, Instant};

use lambda_corpus::church::church_encode;
use lambda_corpus::dataset::{audit_record, build_corpus, median, ExampleRecord, Limits};
use lambda_corpus::generate::{generate_term, generate_type, GenConfig};
use lambda_corpus::metrics::exact_match;
use lambda_corpus::reduce::{reduce, reduce_dnf, Renaming, Strategy, DEFAULT_FUEL};
use lambda_corpus::splits::{
    composition_type, composition_uses, compose_split, random_split, split_by_steps, split_by_type,
    ComposeParams, Side, StepBands, DEFAULT_RANDOM_TRAIN, DEFAULT_TEST, DEFAULT_TYPE_TRAIN,
};
use lambda_corpus::syntax::{parse, parse1, parse2, print};
use lambda_corpus::term::{alpha_eq, rename_vr, Lang, Term};
use lambda_corpus::tokens::TokenCounter;
use lambda_corpus::types::{type_frequency_order, Ty};

const FIXTURES: &str = include_str!("fixtures/five_examples.txt");
const CORPUS_SIZE: usize = 100_000;

struct Suite {
    failed: Vec<&'static str>,
}

impl Suite {
    fn record(&mut self, name: &'static str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(name);
        }
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn generated_terms(n: usize) -> Vec<(Ty, Term)> {
    let cfg = GenConfig::default();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while out.len() < n {
        let mut rng = cfg.rng_for(i);
        let ty = generate_type(&cfg, &mut rng);
        if let Ok(t) = generate_term(&ty, &cfg, &mut rng) {
            out.push((ty, rename_vr(&t)));
        }
        i += 1;
    }
    out
}

fn golden(s: &mut Suite) {
    let start = Instant::now();
    let rows: Vec<Vec<&str>> = FIXTURES.split("\n\n").map(|b| b.lines().collect()).collect();
    let (mut a, mut b, mut c, mut enc) = (0, 0, 0, 0);
    for row in &rows {
        let [lc1, lc1_dnf, lc2, lc2_dnf] = row[..] else { panic!("bad fixture row") };
        let t1 = parse1(lc1).unwrap();
        let t2 = parse2(lc2).unwrap();
        let dnf = |t: &Term| print(&reduce(t, Strategy::Dnf, Renaming::Vr, DEFAULT_FUEL).unwrap().normal_form);
        a += (dnf(&t1) == lc1_dnf) as usize;
        b += (dnf(&t2) == lc2_dnf) as usize;
        c += [(lc1, Lang::Lc1), (lc1_dnf, Lang::Lc1), (lc2, Lang::Lc2), (lc2_dnf, Lang::Lc2)]
            .iter()
            .all(|(src, lang)| parse(src, *lang).map(|t| print(&t)).as_deref() == Ok(*src))
            as usize;
        enc += (print(&church_encode(&t2)) == lc1) as usize;
    }
    let n = rows.len();
    let elapsed = start.elapsed();
    s.record(
        "golden-five-examples",
        n == 5 && a == n && b == n && c == n && elapsed < Duration::from_secs(1),
        format!(
            "(a) LC1 DNF {a}/{n}, (b) LC2 DNF {b}/{n}, (c) round-trip {c}/{n}; encoder reproduces LC1 input {enc}/{n}; {}",
            secs(elapsed)
        ),
    );
}

fn whnf_examples(s: &mut Suite) {
    let run = |src: &str, strategy, renaming| {
        let r = reduce(&parse1(src).unwrap(), strategy, renaming, DEFAULT_FUEL).unwrap();
        (print(&r.normal_form), r.steps)
    };
    let id_app = r"(\x0 -> x0) (\x1 -> x1)";
    let fixed = r"\x1 -> (\x0 -> x0) x1";
    let checks = [
        run(id_app, Strategy::Whnf, Renaming::Nvr) == (r"\x1 -> x1".into(), 1),
        run(id_app, Strategy::Whnf, Renaming::Vr) == (r"\x0 -> x0".into(), 1),
        run(fixed, Strategy::Whnf, Renaming::Nvr) == (fixed.into(), 0),
        run(id_app, Strategy::Dnf, Renaming::Vr).0 == r"\x0 -> x0",
        run(fixed, Strategy::Dnf, Renaming::Vr).0 == r"\x0 -> x0",
    ];
    let ok = checks.iter().filter(|c| **c).count();
    s.record("whnf-examples", ok == checks.len(), format!("{ok}/{} checks", checks.len()));
}

fn oracle_equivalence(s: &mut Suite, terms: &[(Ty, Term)]) {
    let start = Instant::now();
    let small = support::closed_terms_up_to(7);
    let mut mismatches = 0;
    for db in &small {
        let t = support::from_db(db);
        let oracle = support::normalize(db, 10_000);
        let ours = reduce_dnf(&t, DEFAULT_FUEL).ok();
        match (oracle, ours) {
            (Some((nf, n)), Some(r)) if support::to_db(&r.normal_form) == nf && r.steps as usize == n => {}
            _ => mismatches += 1,
        }
    }
    for (_, t) in terms {
        let lc1 = church_encode(t);
        let oracle = support::normalize(&support::to_db(&lc1), 1_000_000);
        let ours = reduce_dnf(&lc1, DEFAULT_FUEL).ok();
        match (oracle, ours) {
            (Some((nf, n)), Some(r)) if alpha_eq(&support::from_db(&nf), &r.normal_form) && r.steps as usize == n => {}
            _ => mismatches += 1,
        }
    }
    let elapsed = start.elapsed();
    s.record(
        "oracle-equivalence",
        mismatches == 0 && elapsed < Duration::from_secs(120),
        format!(
            "{} enumerated + {} generated LC1 terms, {mismatches} mismatches in normal form or step count; {}",
            small.len(),
            terms.len(),
            secs(elapsed)
        ),
    );
}

fn church_commutation(s: &mut Suite, terms: &[(Ty, Term)]) {
    let start = Instant::now();
    let vr_dnf = |t: &Term| reduce(t, Strategy::Dnf, Renaming::Vr, DEFAULT_FUEL).unwrap().normal_form;
    let failures = terms
        .iter()
        .filter(|(_, t)| {
            let direct = vr_dnf(&church_encode(t));
            let evaluated = reduce_dnf(t, DEFAULT_FUEL).unwrap().normal_form;
            !alpha_eq(&direct, &vr_dnf(&church_encode(&evaluated)))
        })
        .count();
    let elapsed = start.elapsed();
    s.record(
        "church-commutation",
        failures == 0 && elapsed < Duration::from_secs(300),
        format!("{failures}/{} terms disagree; {}", terms.len(), secs(elapsed)),
    );
}

fn monotonicity(s: &mut Suite, records: &[ExampleRecord]) {
    let sample = &records[..10_000.min(records.len())];
    let bad: Vec<usize> = Lang::ALL
        .iter()
        .map(|&l| {
            sample
                .iter()
                .filter(|r| r.steps(l, Strategy::Whnf) > r.steps(l, Strategy::Dnf))
                .count()
        })
        .collect();
    s.record(
        "step-monotonicity",
        sample.len() == 10_000 && bad.iter().all(|b| *b == 0),
        format!("violations on {} records: LC1 {}, LC2 {}", sample.len(), bad[0], bad[1]),
    );
}

fn medians(s: &mut Suite, records: &[ExampleRecord], build_time: Duration) {
    let med = |l, st| {
        let mut v: Vec<u64> = records.iter().map(|r| r.steps(l, st)).collect();
        median(&mut v).unwrap()
    };
    let w = (med(Lang::Lc1, Strategy::Whnf), med(Lang::Lc2, Strategy::Whnf));
    let d = (med(Lang::Lc1, Strategy::Dnf), med(Lang::Lc2, Strategy::Dnf));
    let near = |x: f64, p: f64| (x - p).abs() <= 2.0;
    let calibrated = near(w.0, 4.0) && near(w.1, 3.0) && near(d.0, 6.0) && near(d.1, 4.0);
    s.record(
        "median-step-ordering",
        w.0 >= w.1 && d.0 >= d.1 && build_time < Duration::from_secs(1800),
        format!(
            "WHNF LC1/LC2 = {}/{} (paper 4/3), DNF LC1/LC2 = {}/{} (paper 6/4), within ±2: {}; corpus of {} built in {}",
            w.0,
            w.1,
            d.0,
            d.1,
            if calibrated { "yes" } else { "no" },
            records.len(),
            secs(build_time)
        ),
    );
}

fn length_ratio(s: &mut Suite, records: &[ExampleRecord]) {
    let mean = |f: fn(&ExampleRecord) -> usize| records.iter().map(f).sum::<usize>() as f64 / records.len() as f64;
    let input = mean(|r| r.len_lc1_src) / mean(|r| r.len_lc2_src);
    let dnf_vr = mean(|r| r.len_lc1_dnf_vr) / mean(|r| r.len_lc2_dnf_vr);
    let dnf_nvr = mean(|r| r.len_lc1_dnf_nvr) / mean(|r| r.len_lc2_dnf_nvr);
    let within = |x: f64| (1.8..=3.5).contains(&x);
    s.record(
        "length-ratio",
        within(input) && within(dnf_vr) && within(dnf_nvr),
        format!("LC1/LC2 mean tokens: inputs {input:.3}, DNF-VR targets {dnf_vr:.3}, DNF-NVR targets {dnf_nvr:.3} (band [1.8, 3.5], paper about 2.5)"),
    );
}

fn type_split(s: &mut Suite, records: &[ExampleRecord]) {
    let m = split_by_type(records, 0.8, DEFAULT_TYPE_TRAIN, DEFAULT_TEST, 0).unwrap();
    let ty_of = |side| -> HashSet<String> {
        m.resolve(records, side, Lang::Lc2).unwrap().iter().map(|r| r.ty.clone()).collect()
    };
    let disjoint = ty_of(Side::Train).is_disjoint(&ty_of(Side::Test));
    let types: Vec<Ty> = records.iter().map(|r| r.parsed_ty().unwrap()).collect();
    let ranking = type_frequency_order(&types);
    let train_types: Vec<String> = m.params["train_types"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let prefix = ranking.iter().zip(&train_types).all(|((t, _), name)| &t.to_string() == name);
    let target = 0.8 * records.len() as f64;
    let cum = |k: usize| ranking[..k].iter().map(|(_, c)| c).sum::<usize>() as f64;
    let k = train_types.len();
    let boundary = k >= 1 && cum(k - 1) < target && cum(k) >= target;
    let footnote = ["Bool", "Unit", "[Bool]", "[Unit]", "Unit -> Bool", "Bool -> Unit"];
    let rank = |name: &str| ranking.iter().position(|(t, _)| t.to_string() == name).map_or(0, |p| p + 1);
    let all_in_train = footnote.iter().all(|t| train_types.iter().any(|x| x == t));
    s.record(
        "type-split",
        disjoint && prefix && boundary && all_in_train,
        format!(
            "{k} train types covering {:.3}, {} test types; disjoint {disjoint}; boundary {boundary}; six footnote types in train {all_in_train} (ranks {})",
            cum(k) / records.len() as f64,
            ranking.len() - k,
            footnote.iter().map(|t| format!("{t}:{}", rank(t))).collect::<Vec<_>>().join(", ")
        ),
    );
}

fn composition_split(s: &mut Suite, records: &[ExampleRecord]) {
    let cfg = GenConfig::default();
    let limits = Limits::from(&cfg);
    let counter = TokenCounter::Whitespace;
    let random = random_split(records, DEFAULT_RANDOM_TRAIN, DEFAULT_TEST, 0).unwrap();
    let train = random.resolve(records, Side::Train, Lang::Lc2).unwrap();
    let train_src: HashSet<&str> = train.iter().map(|r| r.lc2_src.as_str()).collect();
    let existing: HashSet<&str> = records.iter().map(|r| r.lc2_src.as_str()).collect();
    let first_id = records.last().unwrap().id + 1;
    let m = compose_split(&train, &existing, first_id, &ComposeParams::default(), &limits, &counter).unwrap();
    let by_id: BTreeMap<u64, &ExampleRecord> = records.iter().map(|r| (r.id, r)).collect();
    let typed = m.compositions.iter().zip(&m.records).all(|(c, r)| {
        let t1 = by_id[&c.e1].parsed_ty().unwrap();
        let t2 = by_id[&c.e2].parsed_ty().unwrap();
        composition_type(&t1, &t2) == r.parsed_ty().ok() && c.id == r.id
    });
    let consistent = m.records.iter().all(|r| audit_record(r, &limits, &counter).is_empty());
    let dups = m.records.iter().filter(|r| train_src.contains(r.lc2_src.as_str())).count();
    let max_uses = composition_uses(&m.compositions).values().copied().max().unwrap_or(0);
    let within_caps = m.records.iter().all(|r| {
        [Lang::Lc1, Lang::Lc2].iter().all(|&l| counter.count(r.source(l)) <= 512)
            && lambda_corpus::dataset::Task::all().all(|t| counter.count(r.target(t)) <= 256)
    });
    let unique: HashSet<&str> = m.records.iter().map(|r| r.lc2_src.as_str()).collect();
    s.record(
        "composition-split",
        m.records.len() == 500 && typed && consistent && dups == 0 && max_uses <= 3 && within_caps && unique.len() == 500,
        format!(
            "{} records; type-check {typed}; targets recompute {consistent}; {dups} duplicate training strings; max uses {max_uses}; within 512/256 caps {within_caps}",
            m.records.len()
        ),
    );
}

fn steps_split(s: &mut Suite, records: &[ExampleRecord]) {
    let mut details = Vec::new();
    let mut ok = true;
    for strategy in Strategy::ALL {
        let bands = StepBands::default_for(strategy);
        let m = split_by_steps(records, strategy, bands, None, None, 0).unwrap();
        ok &= m.validate(records).is_ok();
        for (side, lo, hi) in [(Side::Train, 0, bands.train_max), (Side::Test, bands.test_min, bands.test_max)] {
            let mut hists = Vec::new();
            for lang in Lang::ALL {
                let mut h: BTreeMap<u64, usize> = BTreeMap::new();
                for r in m.resolve(records, side, lang).unwrap() {
                    let n = r.steps(lang, strategy);
                    ok &= (lo..=hi).contains(&n);
                    *h.entry(n).or_default() += 1;
                }
                hists.push(h);
            }
            let (t1, t2) = (hists[0].values().sum::<usize>(), hists[1].values().sum::<usize>());
            let keys: HashSet<u64> = hists.iter().flat_map(|h| h.keys().copied()).collect();
            let proportional = keys.iter().all(|k| {
                let (a, b) = (hists[0].get(k).copied().unwrap_or(0), hists[1].get(k).copied().unwrap_or(0));
                (a * t2).abs_diff(b * t1) <= t1.max(t2)
            });
            ok &= proportional && t1 > 0 && t2 > 0;
            details.push(format!(
                "{} {} [{lo}, {hi}]: {t1}/{t2} per language, proportional {proportional}",
                strategy.as_str().to_uppercase(),
                side.as_str()
            ));
        }
    }
    s.record("steps-split", ok, details.join("; "));
}

fn metric(s: &mut Suite, records: &[ExampleRecord]) {
    let task: lambda_corpus::dataset::Task = "lc1,dnf,vr".parse().unwrap();
    let gold: Vec<(u64, &str)> = records[..500].iter().map(|r| (r.id, r.target(task))).collect();
    let preds: BTreeMap<u64, String> = gold.iter().map(|(i, g)| (*i, g.to_string())).collect();
    let self_score = exact_match(&gold, &preds, Some(Lang::Lc1)).unwrap().score();
    let four = [(0, "()"), (1, "True"), (2, r"\x0 -> x0"), (3, "[()]")];
    let p4: BTreeMap<u64, String> = [(0, "()"), (1, "True"), (2, r"\x0 -> x0"), (3, "[]")]
        .into_iter()
        .map(|(i, p)| (i, p.to_string()))
        .collect();
    let three_of_four = exact_match(&four, &p4, Some(Lang::Lc2)).unwrap().score();
    let alpha = exact_match(
        &[(0, r"\x0 -> x0")],
        &BTreeMap::from([(0, r"\x1 -> x1".to_string())]),
        Some(Lang::Lc1),
    )
    .unwrap();
    s.record(
        "metric",
        self_score == 1.0 && three_of_four == 0.75 && alpha.score() == 0.0 && alpha.alpha_equal_mismatches() == 1,
        format!(
            "gold vs gold {self_score}; 3 of 4 {three_of_four}; alpha-equal pair scores {} (flagged alpha-equal: {})",
            alpha.score(),
            alpha.alpha_equal_mismatches()
        ),
    );
}

fn determinism(s: &mut Suite) {
    let dir = tempfile::tempdir().unwrap();
    let gen = |out: &str, workers: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_lambda-corpus"))
            .args(["generate", "--n", "5000", "--seed", "11", "--out", out, "--workers", workers])
            .env_remove("LAMBDA_CORPUS_CONFIG")
            .current_dir(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(dir.path().join(out)).unwrap()
    };
    let a = gen("a.jsonl", "1");
    let b = gen("b.jsonl", "1");
    let c = gen("c.jsonl", "8");
    let d = gen("d.jsonl", "8");
    s.record(
        "determinism",
        a == b && a == c && c == d && !a.is_empty(),
        format!(
            "5000-record corpora, {} bytes; rerun identical {}; --workers 1 vs 8 identical {}",
            a.len(),
            a == b && c == d,
            a == c
        ),
    );
}

fn main() {
    let mut s = Suite { failed: Vec::new() };
    golden(&mut s);
    whnf_examples(&mut s);
    let terms = generated_terms(10_000);
    oracle_equivalence(&mut s, &terms);
    church_commutation(&mut s, &terms);

    let start = Instant::now();
    let corpus = build_corpus(&GenConfig::default(), CORPUS_SIZE, &TokenCounter::Whitespace).unwrap();
    let build_time = start.elapsed();
    let records = &corpus.records;
    println!(
        "     default corpus: {} records, acceptance rate {:.4}, {} attempts",
        records.len(),
        corpus.stats.acceptance_rate(),
        corpus.stats.attempts
    );
    monotonicity(&mut s, records);
    medians(&mut s, records, build_time);
    length_ratio(&mut s, records);
    type_split(&mut s, records);
    composition_split(&mut s, records);
    steps_split(&mut s, records);
    metric(&mut s, records);
    determinism(&mut s);

    if s.failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: {} failed: {}", s.failed.len(), s.failed.join(", "));
        std::process::exit(1);
    }
}
