use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use timinf::allen::{compose_sets, RelationSet, TemporalNetwork};
use timinf::annotation::{parse_corpus, AdverbialTable, Corpus, NeLexicon};
use timinf::eval::{error_report, kappa, parse_causes, parse_labels, score, ScoreReport};
use timinf::lexicon::{Lexicon, Stoplist};
use timinf::resources::{self, Resources};
use timinf::rules::{Engine, EngineConfig};
use timinf::values::CalendarDate;

#[derive(Parser)]
#[command(name = "timinf", version, about = "Temporal entailment over annotated text pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct EngineArgs {
    /// Word relations, `a<TAB>b<TAB>synonym|antonym|hypernym` (default: bundled)
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Function words, one per line (default: bundled)
    #[arg(long)]
    stoplist: Option<PathBuf>,
    /// Named entities with a time value (default: bundled)
    #[arg(long)]
    ne_lexicon: Option<PathBuf>,
    /// TOML file with engine settings
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tolerance_years: Option<u32>,
    #[arg(long)]
    many_days_threshold: Option<u32>,
    /// Count hypernyms and hyponyms as equivalent events
    #[arg(long)]
    generalization: bool,
    #[arg(long)]
    reference_date: Option<CalendarDate>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Score a corpus against its gold labels
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
        /// Per-pair error causes, `id<TAB>cause`
        #[arg(long)]
        causes: Option<PathBuf>,
    },
    /// Judge a single pair
    CheckPair {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        id: u32,
        /// Print the derivation
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Agreement between two label files, one TRUE/FALSE per line
    Kappa {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Interval algebra debugging
    Allen {
        #[command(subcommand)]
        command: AllenCommand,
    },
}

#[derive(Subcommand)]
enum AllenCommand {
    /// Compose two relations or relation sets
    Compose { r1: String, r2: String },
    /// Close a network given as `A rel[,rel] B` lines
    Closure { netfile: PathBuf },
}

enum Failure {
    Usage(anyhow::Error),
    Input(anyhow::Error),
    Invariant(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Input(e) | Failure::Invariant(e) => e,
        }
    }
}

trait InputContext<T> {
    fn input(self) -> Result<T, Failure>;
}

impl<T> InputContext<T> for Result<T> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(Failure::Input)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let corpus = parse_corpus(&bytes).with_context(|| format!("in {}", path.display()))?;
    log::info!("{} pairs from {}", corpus.pairs.len(), path.display());
    Ok(corpus)
}

fn build_engine(args: &EngineArgs) -> Result<Engine> {
    let lexicon = match &args.lexicon {
        Some(p) => Lexicon::parse(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => Lexicon::parse(resources::SEED_LEXICON)?,
    };
    let stoplist = match &args.stoplist {
        Some(p) => Stoplist::parse(&read(p)?),
        None => Stoplist::parse(resources::STOPLIST),
    };
    let ne_lexicon = match &args.ne_lexicon {
        Some(p) => NeLexicon::parse(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => NeLexicon::parse(resources::NE_LEXICON)?,
    };
    let mut config: EngineConfig = match &args.config {
        Some(p) => toml::from_str(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => EngineConfig::default(),
    };
    if let Some(t) = args.tolerance_years {
        config.tolerance_years = t;
    }
    if let Some(t) = args.many_days_threshold {
        config.many_days_threshold = t;
    }
    if args.generalization {
        config.generalization_as_equivalence = true;
    }
    if let Some(d) = args.reference_date {
        config.reference_date = d;
    }
    let resources = Resources {
        lexicon,
        stoplist,
        ne_lexicon,
        adverbials: AdverbialTable::standard(),
    };
    Ok(Engine::new(resources, config))
}

fn check_report(r: &ScoreReport) -> Result<(), Failure> {
    let ok = r.matches <= r.total
        && r.confusion.total() == r.total
        && (0.0..=1.0).contains(&r.accuracy)
        && r.rows.windows(2).all(|w| w[0].id <= w[1].id);
    if ok {
        Ok(())
    } else {
        Err(Failure::Invariant(anyhow!("inconsistent score report")))
    }
}

fn eval(
    corpus: &Path,
    engine: &EngineArgs,
    format: ReportFormat,
    causes: Option<&Path>,
) -> Result<(), Failure> {
    let engine = build_engine(engine).input()?;
    let corpus = load_corpus(corpus).input()?;
    let causes = match causes {
        Some(p) => parse_causes(&read(p).input()?)
            .with_context(|| format!("in {}", p.display()))
            .input()?,
        None => Default::default(),
    };
    let report = score(&corpus, &engine);
    check_report(&report)?;
    let breakdown = error_report(&report, &causes);
    match format {
        ReportFormat::Text => {
            print!("{}", report.render_text());
            if breakdown.errors > 0 {
                print!("\n{}", breakdown.render_text());
            }
        }
        ReportFormat::Json => {
            let out = serde_json::json!({ "score": report, "errors": breakdown });
            println!("{}", serde_json::to_string_pretty(&out).map_err(|e| Failure::Invariant(e.into()))?);
        }
    }
    Ok(())
}

fn check_pair(corpus: &Path, id: u32, trace: bool, engine: &EngineArgs) -> Result<(), Failure> {
    let engine = build_engine(engine).input()?;
    let corpus = load_corpus(corpus).input()?;
    let pair = corpus
        .pairs
        .iter()
        .find(|p| p.id == id)
        .ok_or_else(|| Failure::Usage(anyhow!("no pair with id {id}")))?;
    let reference = corpus.reference.unwrap_or(engine.config().reference_date);
    let verdict = engine.supervise_at(pair, &reference);
    println!(
        "pair {id}: {} ({}), gold {}",
        if verdict.decision.as_bool() { "TRUE" } else { "FALSE" },
        verdict.reason,
        if pair.gold { "TRUE" } else { "FALSE" }
    );
    for o in &verdict.fired {
        println!("  {o}");
    }
    if trace {
        println!("trace:");
        for l in &verdict.trace {
            println!("  {l}");
        }
        if let Ok(a) = engine.analyze(pair, &reference) {
            println!("network:");
            for (from, set, to) in a.network.constraints() {
                println!("  {from} {set} {to}");
            }
        }
    }
    Ok(())
}

fn kappa_cmd(a: &Path, b: &Path) -> Result<(), Failure> {
    let la = parse_labels(&read(a).input()?).with_context(|| format!("in {}", a.display())).input()?;
    let lb = parse_labels(&read(b).input()?).with_context(|| format!("in {}", b.display())).input()?;
    let k = kappa(&la, &lb).map_err(|e| Failure::Input(e.into()))?;
    println!("items {}", la.len());
    println!("po {:.4}", k.po);
    println!("pe {:.4}", k.pe);
    match k.kappa {
        Some(v) => println!("kappa {v:.4}"),
        None => println!("kappa undefined"),
    }
    Ok(())
}

fn parse_set(s: &str) -> Result<RelationSet, Failure> {
    s.parse().map_err(|e| Failure::Usage(anyhow!("{e}")))
}

fn parse_network(src: &str) -> Result<TemporalNetwork> {
    let mut net = TemporalNetwork::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [a, rel, b] = parts[..] else {
            bail!("line {}: expected `A rel[,rel] B`", i + 1);
        };
        let set: RelationSet = rel.parse().map_err(|e| anyhow!("line {}: {e}", i + 1))?;
        net.constrain_names(a, b, set).map_err(|e| anyhow!("line {}: {e}", i + 1))?;
    }
    Ok(net)
}

fn allen(cmd: &AllenCommand) -> Result<(), Failure> {
    match cmd {
        AllenCommand::Compose { r1, r2 } => {
            println!("{}", compose_sets(parse_set(r1)?, parse_set(r2)?));
        }
        AllenCommand::Closure { netfile } => {
            let net = parse_network(&read(netfile).input()?)
                .with_context(|| format!("in {}", netfile.display()))
                .input()?;
            let closed = net.closure().map_err(|e| Failure::Input(e.into()))?;
            for (from, set, to) in closed.constraints() {
                println!("{from} {set} {to}");
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Eval {
            corpus,
            engine,
            report,
            causes,
        } => eval(corpus, engine, *report, causes.as_deref()),
        Command::CheckPair {
            corpus,
            id,
            trace,
            engine,
        } => check_pair(corpus, *id, *trace, engine),
        Command::Kappa { a, b } => kappa_cmd(a, b),
        Command::Allen { command } => allen(command),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
