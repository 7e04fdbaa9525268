use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use derivlex::bench::{self, growth_exponent, parse_sizes, run_suite, Suite};
use derivlex::output::{error_line, token_json, token_tsv};
use derivlex::{load_ir, load_spec, save_ir};
use derivlex_core::{LexerId, LexerTable, Runner, ScoreMode, Storage, DEFAULT_FUEL};

/// Derivative-based lexer generator and runner.
#[derive(Parser)]
#[command(name = "derivlex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a .vl specification to an IR file.
    Gen {
        spec: PathBuf,
        /// Output path; standard output when omitted.
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Tokenize a file with a compiled lexer (an IR file or a .vl spec).
    Run {
        table: PathBuf,
        /// Input file, or `-` for standard input.
        input: PathBuf,
        /// Starting fuel of every lexing step (also accepted as `-fuel N`).
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
        /// Entry lexer; the first lexer of the table by default.
        #[arg(long)]
        lexer: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Fast)]
        mode: Mode,
    },
    /// Measure symbol reads and wall time on a generated input ladder.
    Bench {
        /// json, xml or adversarial.
        suite: Suite,
        /// Sizes such as `1k,4k` or a doubling range `1k..64k`.
        sizes: String,
        #[arg(long, value_enum, default_value_t = BenchMode::Fast)]
        mode: BenchMode,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Parse and compile a specification, reporting any diagnostics.
    Check { spec: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Naive,
    Fast,
}

impl From<Mode> for ScoreMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Naive => ScoreMode::Naive,
            Mode::Fast => ScoreMode::Fast,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchMode {
    Naive,
    Fast,
    Both,
}

enum Failure {
    Diagnostic(String),
    Io(String),
    Lexing,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Diagnostic(_) => 1,
            Failure::Io(_) => 2,
            Failure::Lexing => 3,
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    let reason = match e.kind() {
        io::ErrorKind::NotFound => "file not found".to_string(),
        _ => e.to_string(),
    };
    Failure::Io(format!("{}: {reason}", path.display()))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| io_failure(path, e))?;
        return Ok(buf);
    }
    fs::read(path).map_err(|e| io_failure(path, e))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read(path)?)
        .map_err(|_| Failure::Diagnostic(format!("{}: not valid UTF-8", path.display())))
}

fn compile(path: &Path) -> Result<LexerTable, Failure> {
    let text = read_text(path)?;
    load_spec(&text).map_err(|e| Failure::Diagnostic(format!("{}:{e}", path.display())))
}

/// IR files are recognized by their first line; anything else is compiled
/// as a specification.
fn load_table(path: &Path) -> Result<LexerTable, Failure> {
    let text = read_text(path)?;
    if text.starts_with(derivlex::ir::MAGIC) {
        load_ir(&text).map_err(|e| Failure::Diagnostic(format!("{}: {e}", path.display())))
    } else {
        load_spec(&text).map_err(|e| Failure::Diagnostic(format!("{}:{e}", path.display())))
    }
}

fn summary(table: &LexerTable) -> String {
    let rules: usize = table
        .lexers
        .iter()
        .map(|l| l.re_rules.len() + l.fn_rules.len())
        .sum();
    format!(
        "{} lexer(s), {rules} rule(s), {} token kind(s)",
        table.lexers.len(),
        table.kinds.len()
    )
}

fn write_out(
    path: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let file = fs::File::create(p).map_err(|e| io_failure(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| io_failure(p, e))
        }
        None => {
            let mut w = io::stdout().lock();
            f(&mut w).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Gen { spec, out } => {
            let table = compile(&spec)?;
            let ir = save_ir(&table);
            write_out(out.as_deref(), |w| w.write_all(ir.as_bytes()))?;
            eprintln!("{}", summary(&table));
        }
        Command::Check { spec } => {
            let table = compile(&spec)?;
            println!("{}", summary(&table));
        }
        Command::Run {
            table,
            input,
            fuel,
            format,
            lexer,
            mode,
        } => {
            let table = load_table(&table)?;
            let entry = match &lexer {
                Some(name) => table
                    .lexer_id(name)
                    .ok_or_else(|| Failure::Diagnostic(format!("no lexer named `{name}`")))?,
                None if table.lexers.is_empty() => {
                    return Err(Failure::Diagnostic("the table has no lexers".into()))
                }
                None => LexerId(0),
            };
            let input = read(&input)?;
            let runner = Runner::with_meter(&table, mode.into(), ());
            let stream = runner.tokenize_all(entry, &input, fuel, Storage::new());
            write_out(None, |w| {
                for t in &stream.tokens {
                    let line = match format {
                        Format::Tsv => token_tsv(&table, t),
                        Format::Json => token_json(&table, t),
                    };
                    writeln!(w, "{line}")?;
                }
                Ok(())
            })?;
            if let Some(line) = error_line(&stream.halt) {
                eprintln!("{line}");
                return Err(Failure::Lexing);
            }
        }
        Command::Bench {
            suite,
            sizes,
            mode,
            csv,
        } => {
            let sizes: Vec<usize> = parse_sizes(&sizes)
                .map_err(Failure::Diagnostic)?
                .into_iter()
                .filter(|&n| n > 0)
                .collect();
            let modes: &[ScoreMode] = match mode {
                BenchMode::Naive => &[ScoreMode::Naive],
                BenchMode::Fast => &[ScoreMode::Fast],
                BenchMode::Both => &[ScoreMode::Fast, ScoreMode::Naive],
            };
            let mut rows = Vec::new();
            for &m in modes {
                rows.extend(run_suite(suite, &sizes, m));
            }
            write_out(csv.as_deref(), |w| bench::write_csv(w, &rows))?;
            for &m in modes {
                let points: Vec<_> = rows
                    .iter()
                    .filter(|r| r.mode == m)
                    .map(|r| (r.size, r.char_reads))
                    .collect();
                if let Some(k) = growth_exponent(&points) {
                    eprintln!(
                        "{suite} {}: char_reads growth exponent {k:.2}",
                        bench::mode_name(m)
                    );
                }
            }
        }
    }
    Ok(())
}

/// Accepts the single-dash `-fuel N` and `-fuel=N` spellings.
fn normalize_args(args: impl Iterator<Item = String>) -> Vec<String> {
    args.map(|a| match a.strip_prefix("-fuel") {
        Some(rest) if rest.is_empty() || rest.starts_with('=') => format!("--fuel{rest}"),
        _ => a,
    })
    .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(normalize_args(std::env::args())) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Diagnostic(m) | Failure::Io(m) => eprintln!("derivlex: {m}"),
                Failure::Lexing => {}
            }
            ExitCode::from(f.code())
        }
    }
}
