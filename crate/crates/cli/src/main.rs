use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use currents_core::checks::selftest;
use currents_core::dynamics::{self, sample_walk_current};
use currents_core::limits::DEFAULT_CAP;
use currents_core::parse::{parse_automorphism, parse_current, parse_tree};
use currents_core::{fmt_q, Basis, ConvergenceReport, CyclicWord, Error, RationalCurrent, Word};

const EXIT_ASSERTION: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;

#[derive(Parser)]
#[command(name = "currents-lab", version, about = "Exact computations with geodesic currents and Dehn-twist trees")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunConfig {
    /// Rank of the free basis a, b, c, ...
    #[arg(long, global = true, default_value_t = 5)]
    rank: usize,
    /// Word length used for projective comparisons.
    #[arg(long, global = true, default_value_t = 2)]
    level: usize,
    /// Number of orbit iterations.
    #[arg(long, global = true, default_value_t = 20)]
    iters: usize,
    /// Iteration cap for exact limit extraction.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Seed for randomized suites and samples.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also export report tables as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Freely reduce a word; with --cyclic print its canonical cyclic word.
    Reduce {
        word: String,
        #[arg(long)]
        cyclic: bool,
    },
    /// Apply an automorphism n times (negative n applies the inverse).
    Apply {
        #[arg(long)]
        aut: String,
        #[arg(short, long)]
        word: String,
        #[arg(short, long, default_value_t = 1, allow_hyphen_values = true)]
        n: i64,
    },
    /// Cylinder coordinate (v; nu).
    Coord {
        #[arg(short)]
        v: String,
        #[arg(short, long)]
        current: String,
    },
    /// Translation length of g on a tree.
    Length {
        #[arg(long)]
        tree: String,
        #[arg(short, long)]
        g: String,
        #[arg(long, value_enum, default_value_t = Method::Britton)]
        method: Method,
    },
    /// Intersection number I(T, nu).
    Intersect {
        #[arg(long)]
        tree: String,
        #[arg(short, long)]
        current: String,
    },
    /// Iterate an automorphism on a current and report the orbit.
    Iterate {
        #[arg(long)]
        aut: String,
        #[arg(short, long)]
        current: String,
        #[arg(long)]
        target: Option<String>,
    },
    /// Run a named experiment and emit its report.
    Experiment {
        id: ExperimentId,
        /// Word u for primitive-limit.
        #[arg(long, default_value = "ab")]
        u: String,
        /// Word g for off-critical.
        #[arg(short, long, default_value = "abaB")]
        g: String,
        /// Word f for off-critical.
        #[arg(short, long, default_value = "a")]
        f: String,
        /// Starting current for minimality-walk; sampled from --seed if absent.
        #[arg(short, long)]
        current: Option<String>,
    },
    /// Run the seeded invariant suites over ranks 2, 3 and 5.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Britton,
    Limit,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentId {
    TheoremMain,
    TheoremBack,
    ProductMinimal,
    PrimitiveLimit,
    OffCritical,
    OutlookIdentity,
    MinimalityWalk,
}

enum Failure {
    Core { input: Option<String>, err: Error },
    Io(io::Error),
    Csv(csv::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Csv(e)
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::Core { input: None, err }
    }
}

/// Attaches the literal being parsed so parse errors can point into it.
trait WithInput<T> {
    fn input(self, s: &str) -> Result<T, Failure>;
}

impl<T> WithInput<T> for currents_core::Result<T> {
    fn input(self, s: &str) -> Result<T, Failure> {
        self.map_err(|err| Failure::Core {
            input: Some(s.to_string()),
            err,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var("CURRENTS_LAB_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ASSERTION),
        Err(Failure::Core { input, err }) => {
            eprintln!("error[{}]: {err}", err.code());
            if let (Error::Parse { pos, .. }, Some(s)) = (&err, input) {
                eprintln!("  {s}");
                eprintln!("  {}^", " ".repeat(s[..(*pos).min(s.len())].chars().count()));
            }
            ExitCode::from(match err {
                Error::Parse { .. } => EXIT_PARSE,
                _ => EXIT_PRECONDITION,
            })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error[io]: {e}");
            ExitCode::from(EXIT_PRECONDITION)
        }
        Err(Failure::Csv(e)) => {
            eprintln!("error[csv]: {e}");
            ExitCode::from(EXIT_PRECONDITION)
        }
    }
}

/// Returns whether every assertion passed.
fn run(cli: Cli) -> Result<bool, Failure> {
    let cfg = cli.config;
    let basis = Basis::new(cfg.rank)?;
    let word = |s: &str| -> Result<Word, Failure> {
        let w = Word::parse(s).input(s)?;
        basis.check_word(&w)?;
        Ok(w)
    };
    let current = |s: &str| parse_current(basis, s).input(s);
    match cli.command {
        Command::Reduce { word: s, cyclic } => {
            let w = word(&s)?;
            if cyclic {
                println!("{}", CyclicWord::of(&w)?);
            } else if w.is_identity() {
                println!("1");
            } else {
                println!("{w}");
            }
        }
        Command::Apply { aut, word: s, n } => {
            let phi = parse_automorphism(basis, &aut).input(&aut)?;
            let image = phi.power(n).apply(&word(&s)?)?;
            println!("{}", if image.is_identity() { "1".to_string() } else { image.to_string() });
        }
        Command::Coord { v, current: c } => {
            let v = word(&v)?;
            println!("{}", fmt_q(&current(&c)?.coordinate(&v)));
        }
        Command::Length { tree, g, method } => {
            let t = parse_tree(basis, &tree).input(&tree)?;
            let g = word(&g)?;
            let len = match method {
                Method::Britton => t.length_britton(&g)?,
                Method::Limit => t.length_limit(&g, cfg.cap)?,
            };
            println!("{}", fmt_q(&len));
        }
        Command::Intersect { tree, current: c } => {
            let t = parse_tree(basis, &tree).input(&tree)?;
            println!("{}", fmt_q(&t.intersection(&current(&c)?)?));
        }
        Command::Iterate { aut, current: c, target } => {
            let phi = parse_automorphism(basis, &aut).input(&aut)?;
            let nu = current(&c)?;
            let target = target.as_deref().map(current).transpose()?;
            let report = dynamics::iterate_current(&phi, &nu, cfg.iters, cfg.level, target.as_ref())?;
            return emit(&report, &cfg);
        }
        Command::Experiment { id, u, g, f, current: c } => {
            let report = match id {
                ExperimentId::TheoremMain => dynamics::run_theorem_main(basis, cfg.iters, cfg.level, cfg.cap)?,
                ExperimentId::TheoremBack => dynamics::run_theorem_back(basis)?,
                ExperimentId::ProductMinimal => dynamics::run_product_minimal(basis, cfg.iters, cfg.level, cfg.cap)?,
                ExperimentId::PrimitiveLimit => dynamics::run_primitive_limit(basis, &word(&u)?, cfg.iters, cfg.level)?,
                ExperimentId::OffCritical => {
                    dynamics::run_off_critical_perturbation(basis, &word(&g)?, &word(&f)?, cfg.iters, cfg.level)?
                }
                ExperimentId::OutlookIdentity => dynamics::run_outlook_identity(basis, cfg.iters, cfg.seed)?,
                ExperimentId::MinimalityWalk => {
                    let nu: RationalCurrent = match c {
                        Some(s) => current(&s)?,
                        None => sample_walk_current(basis, cfg.seed),
                    };
                    dynamics::run_minimality_walk(&nu, cfg.iters)?
                }
            };
            return emit(&report, &cfg);
        }
        Command::Selftest => {
            let results = selftest(cfg.seed);
            let mut ok = true;
            for r in &results {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                println!("{status} rank={} {}::{} trials={}", r.rank, r.suite, r.name, r.trials);
                if let Some(w) = &r.witness {
                    println!("  witness: {w}");
                    ok = false;
                }
            }
            let failed = results.iter().filter(|r| !r.passed()).count();
            println!("{} checks, {} failed", results.len(), failed);
            return Ok(ok);
        }
    }
    Ok(true)
}

fn emit(report: &ConvergenceReport, cfg: &RunConfig) -> Result<bool, Failure> {
    let json = report.to_json();
    match &cfg.out {
        Some(path) => {
            let mut file = File::create(path)?;
            writeln!(file, "{json}")?;
        }
        None => println!("{json}"),
    }
    if let Some(path) = &cfg.csv {
        write_csv(report, path)?;
    }
    for a in &report.assertions {
        eprintln!("{} {}", if a.passed { "PASS" } else { "FAIL" }, a.name);
    }
    Ok(report.all_passed())
}

/// One CSV record per table row, prefixed by the table name; each table
/// starts with a header record whose first field is `table`.
fn write_csv(report: &ConvergenceReport, path: &Path) -> Result<(), Failure> {
    let mut out = csv::WriterBuilder::new().flexible(true).from_path(path)?;
    for t in &report.tables {
        out.write_record(std::iter::once("table").chain(t.columns.iter().map(String::as_str)))?;
        for row in &t.rows {
            out.write_record(std::iter::once(t.name.as_str()).chain(row.iter().map(String::as_str)))?;
        }
    }
    out.flush()?;
    Ok(())
}
