use std::fmt::Write as _;
use std::io::{Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lambda_corpus::church::church_encode;
use lambda_corpus::dataset::{
    audit, build_corpus, corpus_from_str, corpus_to_string, CorpusStats, Limits, PipelineError, Task,
};
use lambda_corpus::generate::GenConfig;
use lambda_corpus::metrics::{buckets_csv, parse_predictions, render_report, score_task, DEFAULT_BUCKETS};
use lambda_corpus::par::with_workers;
use lambda_corpus::reduce::{reduce, Renaming, Strategy, DEFAULT_FUEL};
use lambda_corpus::splits::{
    compose_split, random_split, split_by_steps, split_by_type, ComposeParams, Side, SplitKind,
    SplitManifest, StepBands, DEFAULT_RANDOM_TRAIN, DEFAULT_TEST, DEFAULT_TYPE_TRAIN,
};
use lambda_corpus::syntax::{parse, print};
use lambda_corpus::term::Lang;
use lambda_corpus::tokens::TokenCounter;

/// Reference interpreter and dataset tool for the LC1/LC2 lambda calculi.
#[derive(Parser)]
#[command(name = "lambda-corpus", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArg {
    /// Generator config (TOML). Missing keys take their defaults.
    #[arg(long, env = "LAMBDA_CORPUS_CONFIG")]
    config: Option<PathBuf>,
    /// Overrides the seed from the config file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a corpus of unique examples.
    Generate {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the stats report (and CSV sidecars next to it).
        #[arg(long)]
        stats: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Reduce one term per input line.
    Reduce {
        #[arg(long)]
        lang: Lang,
        #[arg(long)]
        strategy: Strategy,
        #[arg(long, default_value = "nvr")]
        renaming: Renaming,
        /// Append `<TAB>steps` to every output line.
        #[arg(long)]
        steps: bool,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Church-encode LC2 terms, one per line.
    Encode {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recompute every record of a corpus and report inconsistencies.
    Check {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Build a train/test split manifest.
    Split(SplitArgs),
    /// Write aligned `id<TAB>term` source and target files for one task.
    Export {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// lang,strategy,renaming, e.g. lc1,whnf,vr
        #[arg(long)]
        task: Task,
        #[arg(long, default_value = "train")]
        side: Side,
        #[arg(long, num_args = 2, value_names = ["SRC", "TGT"])]
        out: Vec<PathBuf>,
    },
    /// Score predictions on the test side of a manifest.
    Score {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Repeatable; paired in order with --preds.
        #[arg(long, required = true)]
        task: Vec<Task>,
        #[arg(long, required = true)]
        preds: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUCKETS)]
        buckets: usize,
    },
    /// Corpus histograms and medians.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        /// Report path; CSV sidecars are written next to it. Stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    kind: SplitKind,
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    cfg: ConfigArg,
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long)]
    n_test: Option<usize>,
    #[arg(long, default_value_t = 0.8)]
    train_frac: f64,
    #[arg(long, default_value = "whnf")]
    strategy: Strategy,
    #[arg(long)]
    train_max: Option<u64>,
    #[arg(long)]
    test_min: Option<u64>,
    #[arg(long)]
    test_max: Option<u64>,
    /// Composition only: take source terms from this manifest's train side.
    #[arg(long)]
    from: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    n_out: usize,
    #[arg(long, default_value_t = 3)]
    max_uses: usize,
}

struct CliError {
    code: &'static str,
    exit: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: "E_USAGE",
            exit: 2,
            message: message.into(),
        }
    }

    fn data(code: &'static str, message: impl ToString) -> Self {
        CliError {
            code,
            exit: 3,
            message: message.to_string(),
        }
    }

    fn internal(code: &'static str, message: impl ToString) -> Self {
        CliError {
            code,
            exit: 4,
            message: message.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::data("E_IO", format!("{}: {e}", path.display())))
}

fn read_input(path: Option<&Path>) -> CliResult<String> {
    match path {
        Some(p) => read_text(p),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::data("E_IO", format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io_err = |e: std::io::Error| CliError::data("E_IO", format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn write_output(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::data("E_IO", format!("stdout: {e}"))),
    }
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load_config(arg: &ConfigArg) -> CliResult<GenConfig> {
    let mut cfg = match &arg.config {
        Some(p) => toml::from_str(&read_text(p)?)
            .map_err(|e| CliError::data("E_CONFIG", format!("{}: {e}", p.display())))?,
        None => GenConfig::default(),
    };
    if let Some(seed) = arg.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| CliError::data("E_CONFIG", e))?;
    Ok(cfg)
}

fn token_counter(cfg: &GenConfig) -> CliResult<TokenCounter> {
    TokenCounter::from_mode(cfg.token_counter, cfg.vocab_path.as_deref())
        .map_err(|e| CliError::data("E_CONFIG", e))
}

fn load_corpus(path: &Path) -> CliResult<Vec<lambda_corpus::ExampleRecord>> {
    corpus_from_str(&read_text(path)?)
        .map_err(|e| CliError::data("E_CORPUS", format!("{}: {e}", path.display())))
}

fn load_manifest(path: &Path) -> CliResult<SplitManifest> {
    SplitManifest::from_text(&read_text(path)?)
        .map_err(|e| CliError::data("E_MANIFEST", format!("{}: {e}", path.display())))
}

fn write_stats(path: &Path, stats: &CorpusStats, report: &str) -> CliResult<()> {
    write_atomic(&sidecar(path, ".steps.csv"), &stats.steps_csv())?;
    write_atomic(&sidecar(path, ".lengths.csv"), &stats.lengths_csv())?;
    write_atomic(&sidecar(path, ".types.csv"), &stats.types_csv())?;
    write_atomic(path, report)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate {
            cfg,
            n,
            out,
            stats,
            workers,
        } => {
            if n == 0 {
                return Err(CliError::usage("--n must be at least 1"));
            }
            let cfg = load_config(&cfg)?;
            let counter = token_counter(&cfg)?;
            let corpus = with_workers(workers, || build_corpus(&cfg, n, &counter)).map_err(|e| match e {
                PipelineError::Fuel { .. } => CliError::internal("E_FUEL", e),
                PipelineError::LowAcceptance { .. } => CliError::data("E_ACCEPTANCE", e),
                _ => CliError::data("E_CONFIG", e),
            })?;
            write_atomic(&out, &corpus_to_string(&corpus.records))?;
            if let Some(path) = stats {
                let s = CorpusStats::compute(&corpus.records);
                write_stats(&path, &s, &s.report(Some(&corpus.stats)))?;
            }
            eprintln!(
                "wrote {} records ({} attempts, acceptance {:.4})",
                corpus.records.len(),
                corpus.stats.attempts,
                corpus.stats.acceptance_rate()
            );
            Ok(())
        }
        Command::Reduce {
            lang,
            strategy,
            renaming,
            steps,
            fuel,
            input,
            output,
        } => {
            let text = read_input(input.as_deref())?;
            let mut out = String::new();
            for (i, line) in text.lines().enumerate() {
                let t = parse(line, lang)
                    .map_err(|e| CliError::data("E_PARSE", format!("line {}: {e}", i + 1)))?;
                let r = reduce(&t, strategy, renaming, fuel)
                    .map_err(|e| CliError::data("E_FUEL", format!("line {}: {e}", i + 1)))?;
                out.push_str(&print(&r.normal_form));
                if steps {
                    let _ = write!(out, "\t{}", r.steps);
                }
                out.push('\n');
            }
            write_output(output.as_deref(), &out)
        }
        Command::Encode { input, output } => {
            let text = read_input(input.as_deref())?;
            let mut out = String::new();
            for (i, line) in text.lines().enumerate() {
                let t = parse(line, Lang::Lc2)
                    .map_err(|e| CliError::data("E_PARSE", format!("line {}: {e}", i + 1)))?;
                out.push_str(&print(&church_encode(&t)));
                out.push('\n');
            }
            write_output(output.as_deref(), &out)
        }
        Command::Check { corpus, cfg, workers } => {
            let cfg = load_config(&cfg)?;
            let counter = token_counter(&cfg)?;
            let records = load_corpus(&corpus)?;
            let issues = with_workers(workers, || audit(&records, &Limits::from(&cfg), &counter));
            for issue in &issues {
                println!("{issue}");
            }
            if issues.is_empty() {
                eprintln!("{} records consistent", records.len());
                Ok(())
            } else {
                Err(CliError::data(
                    "E_AUDIT",
                    format!("{} inconsistencies in {} records", issues.len(), records.len()),
                ))
            }
        }
        Command::Split(args) => run_split(args),
        Command::Export {
            corpus,
            manifest,
            task,
            side,
            out,
        } => {
            let records = load_corpus(&corpus)?;
            let m = load_manifest(&manifest)?;
            let chosen = m
                .resolve(&records, side, task.lang)
                .map_err(|e| CliError::data("E_MANIFEST", e))?;
            let (mut src, mut tgt) = (String::new(), String::new());
            for r in chosen {
                let _ = writeln!(src, "{}\t{}", r.id, r.source(task.lang));
                let _ = writeln!(tgt, "{}\t{}", r.id, r.target(task));
            }
            write_atomic(&out[0], &src)?;
            write_atomic(&out[1], &tgt)
        }
        Command::Score {
            gold,
            manifest,
            task,
            preds,
            out,
            buckets,
        } => {
            if task.len() != preds.len() {
                return Err(CliError::usage(format!(
                    "{} --task flags but {} --preds flags",
                    task.len(),
                    preds.len()
                )));
            }
            let records = load_corpus(&gold)?;
            let m = load_manifest(&manifest)?;
            let mut scores = Vec::new();
            for (task, path) in task.into_iter().zip(&preds) {
                let p = parse_predictions(&read_text(path)?)
                    .map_err(|e| CliError::data("E_PREDS", format!("{}: {e}", path.display())))?;
                let gold = m
                    .resolve(&records, Side::Test, task.lang)
                    .map_err(|e| CliError::data("E_MANIFEST", e))?;
                let s = score_task(task, &gold, &p, buckets)
                    .map_err(|e| CliError::data("E_PREDS", format!("{}: {e}", path.display())))?;
                scores.push(s);
            }
            for s in &scores {
                let tag = s.task.to_string().replace(',', "_");
                if let Some(b) = &s.input_buckets {
                    write_atomic(&sidecar(&out, &format!(".{tag}.input_buckets.csv")), &buckets_csv(b))?;
                }
                if let Some(b) = &s.output_buckets {
                    write_atomic(&sidecar(&out, &format!(".{tag}.output_buckets.csv")), &buckets_csv(b))?;
                }
            }
            let header = format!("split = {} (seed {})", m.kind, m.seed);
            let report = render_report(&scores, &header);
            print!("{report}");
            write_atomic(&out, &report)
        }
        Command::Stats { corpus, out } => {
            let records = load_corpus(&corpus)?;
            let s = CorpusStats::compute(&records);
            let report = s.report(None);
            match out {
                Some(path) => write_stats(&path, &s, &report),
                None => write_output(None, &report),
            }
        }
    }
}

fn run_split(a: SplitArgs) -> CliResult<()> {
    let records = load_corpus(&a.corpus)?;
    let seed = a.cfg.seed.unwrap_or(0);
    let split_err = |e: lambda_corpus::splits::SplitError| match e {
        lambda_corpus::splits::SplitError::Fuel { .. } => CliError::internal("E_FUEL", e),
        _ => CliError::data("E_SPLIT", e),
    };
    let m = match a.kind {
        SplitKind::Random => random_split(
            &records,
            a.n_train.unwrap_or(DEFAULT_RANDOM_TRAIN),
            a.n_test.unwrap_or(DEFAULT_TEST),
            seed,
        ),
        SplitKind::ByType => split_by_type(
            &records,
            a.train_frac,
            a.n_train.unwrap_or(DEFAULT_TYPE_TRAIN),
            a.n_test.unwrap_or(DEFAULT_TEST),
            seed,
        ),
        SplitKind::BySteps => {
            let d = StepBands::default_for(a.strategy);
            let bands = StepBands {
                train_max: a.train_max.unwrap_or(d.train_max),
                test_min: a.test_min.unwrap_or(d.test_min),
                test_max: a.test_max.unwrap_or(d.test_max),
            };
            split_by_steps(&records, a.strategy, bands, a.n_train, a.n_test, seed)
        }
        SplitKind::ByComposition => {
            let cfg = load_config(&a.cfg)?;
            let counter = token_counter(&cfg)?;
            let from = a.from.as_deref().map(load_manifest).transpose()?;
            let train = match &from {
                Some(m) => m
                    .resolve(&records, Side::Train, Lang::Lc2)
                    .map_err(|e| CliError::data("E_MANIFEST", e))?,
                None => records.iter().collect(),
            };
            let existing = records.iter().map(|r| r.lc2_src.as_str()).collect();
            let first_id = records.last().map_or(0, |r| r.id + 1);
            let params = ComposeParams {
                n_out: a.n_out,
                max_uses: a.max_uses,
                seed,
            };
            compose_split(&train, &existing, first_id, &params, &Limits::from(&cfg), &counter)
        }
    }
    .map_err(split_err)?;
    for w in &m.warnings {
        eprintln!("warning: {w}");
    }
    write_atomic(&a.out, &m.to_text())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("error[E_USAGE]: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code, e.message);
            ExitCode::from(e.exit)
        }
    }
}
