//! The `pfgame` command line.
//!
//! Exit codes: 0 success, 1 axiom failure, 2 game-file parse error,
//! 64 invalid invocation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};

use crate::axioms::{run_suite, SuiteConfig};
use crate::error::Error;
use crate::game::{parse_game, serialize_game, Game, ParseMode, ValueVector};
use crate::marginality::{mc_vector, PartyGame, SchemeKind, WeightScheme};
use crate::partitions::{enumerate_embedded, enumerate_partitions, MAX_AGENTS};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::values::{
    decompose, project_free, shapley, value_extended, value_full_basis, ExtendedMethod,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_AXIOM_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "pfgame", version)]
#[command(about = "Shapley-value extensions for games with externalities", long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output layout
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Require every embedded coalition to be listed in the game file
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable
    Table,
    /// One `key<TAB>value` pair per line
    Rows,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ValueMethod {
    Free,
    Mcquillin,
    FullBasis,
    ShapleyChar,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Bolger,
    Free,
    Steady,
    Huyang,
}

impl From<SchemeArg> for SchemeKind {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Bolger => SchemeKind::Bolger,
            SchemeArg::Free => SchemeKind::Free,
            SchemeArg::Steady => SchemeKind::Steady,
            SchemeArg::Huyang => SchemeKind::HuYang,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Per-agent payoffs of a game
    Value {
        #[arg(long, value_enum)]
        method: ValueMethod,
        /// Game file, or `-` for standard input
        #[arg(default_value = "-")]
        input: String,
    },
    /// Non-zero coefficients in the constant-coalition basis
    Decompose {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Marginal contributions of one agent to every embedded coalition containing it
    Mc {
        /// Agent (1-indexed)
        #[arg(long)]
        agent: usize,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long)]
        normalized: bool,
        #[arg(default_value = "-")]
        input: String,
    },
    /// All four marginality schemes side by side
    CompareMarginality {
        /// Agent (1-indexed)
        #[arg(long)]
        agent: usize,
        #[arg(long)]
        normalized: bool,
        #[arg(default_value = "-")]
        input: String,
    },
    /// Run the axiom checks on basis games and seeded random games
    CheckAxioms {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Agent count; defaults to 2, 3 and 4
        #[arg(long)]
        n: Option<usize>,
    },
    /// Emit the political-party game family as a game file
    PartyGame {
        #[arg(long)]
        parties: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Stand-alone party values (default 0 each)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        base: Option<Vec<String>>,
    },
    /// List partitions or embedded coalitions in canonical order
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        embedded: bool,
    },
}

/// A failure that maps to an exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => EXIT_PARSE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output {
            text,
            code: EXIT_OK,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { stdout } else { stderr };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(&cli, stdin) {
        Ok(out) => {
            if stdout.write_all(out.text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            out.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn read_game(input: &str, strict: bool, stdin: &mut dyn Read) -> Result<Game, Failure> {
    let mut text = String::new();
    if input == "-" {
        stdin
            .read_to_string(&mut text)
            .map_err(|e| Failure::usage(format!("reading standard input: {e}")))?;
    } else {
        text = std::fs::read_to_string(input)
            .map_err(|e| Failure::usage(format!("reading {input}: {e}")))?;
    }
    let mode = if strict {
        ParseMode::Strict
    } else {
        ParseMode::Permissive
    };
    Ok(parse_game(&text, mode)?)
}

fn agent_index(agent: usize, game: &Game) -> Result<usize, Failure> {
    if agent == 0 || agent > game.n() {
        return Err(Failure::usage(format!(
            "--agent {agent} out of range 1..={}",
            game.n()
        )));
    }
    Ok(agent - 1)
}

fn render_vector(v: &ValueVector, format: Format) -> String {
    match format {
        Format::Table => format!("{v}\n"),
        Format::Rows => v
            .iter()
            .enumerate()
            .map(|(i, x)| format!("{}\t{}\n", i + 1, format_rational(x)))
            .collect(),
    }
}

fn render_entries<'a, I>(entries: I, format: Format) -> String
where
    I: IntoIterator<Item = (String, &'a Rational)>,
{
    let mut out = String::new();
    for (key, x) in entries {
        match format {
            Format::Table => writeln!(out, "{key} = {}", format_rational(x)),
            Format::Rows => writeln!(out, "{key}\t{}", format_rational(x)),
        }
        .unwrap();
    }
    out
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Output, Failure> {
    let format = cli.format;
    match &cli.command {
        Command::Value { method, input } => {
            let game = read_game(input, cli.strict, stdin)?;
            let payoff = match method {
                ValueMethod::Free => value_extended(&game, ExtendedMethod::Free),
                ValueMethod::Mcquillin => value_extended(&game, ExtendedMethod::McQuillin),
                ValueMethod::FullBasis => value_full_basis(&game),
                ValueMethod::ShapleyChar => {
                    if game.has_externalities() {
                        return Err(Failure::usage(
                            "shapley-char needs a game without externalities",
                        ));
                    }
                    shapley(&project_free(&game))
                }
            };
            Ok(Output::ok(render_vector(&payoff, format)))
        }
        Command::Decompose { input } => {
            let game = read_game(input, cli.strict, stdin)?;
            let coeffs = decompose(&game).nonzero();
            Ok(Output::ok(render_entries(
                coeffs.iter().map(|(ec, a)| (ec.to_string(), a)),
                format,
            )))
        }
        Command::Mc {
            agent,
            scheme,
            normalized,
            input,
        } => {
            let game = read_game(input, cli.strict, stdin)?;
            let i = agent_index(*agent, &game)?;
            let scheme = WeightScheme::named((*scheme).into())?.with_normalization(*normalized);
            let mc = mc_vector(&game, i, &scheme)?;
            Ok(Output::ok(render_entries(
                mc.entries.iter().map(|(ec, x)| (ec.to_string(), x)),
                format,
            )))
        }
        Command::CompareMarginality {
            agent,
            normalized,
            input,
        } => {
            let game = read_game(input, cli.strict, stdin)?;
            let i = agent_index(*agent, &game)?;
            let columns = SchemeKind::NAMED
                .iter()
                .map(|&k| {
                    let scheme = WeightScheme::named(k)?.with_normalization(*normalized);
                    mc_vector(&game, i, &scheme)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Output::ok(render_comparison(&columns, format)))
        }
        Command::CheckAxioms { trials, seed, n } => {
            let sizes = match n {
                Some(n) if *n == 0 || *n > MAX_AGENTS => {
                    return Err(Failure::usage(format!(
                        "--n {n} out of range 1..={MAX_AGENTS}"
                    )))
                }
                Some(n) => vec![*n],
                None => vec![2, 3, 4],
            };
            let config = SuiteConfig {
                sizes,
                trials: *trials,
                seed: *seed,
                ..SuiteConfig::default()
            };
            let reports = run_suite(&config)?;
            let mut text = String::new();
            let mut failures = 0;
            for r in &reports {
                if !r.passed() {
                    failures += 1;
                }
                writeln!(text, "{r}").unwrap();
            }
            Ok(Output {
                text,
                code: if failures == 0 {
                    EXIT_OK
                } else {
                    EXIT_AXIOM_FAILURE
                },
            })
        }
        Command::PartyGame {
            parties,
            sizes,
            base,
        } => {
            if *parties != sizes.len() {
                return Err(Failure::usage(format!(
                    "--parties {parties} but {} sizes given",
                    sizes.len()
                )));
            }
            let base = match base {
                None => vec![Rational::from_integer(0.into()); sizes.len()],
                Some(values) => values
                    .iter()
                    .map(|t| {
                        parse_rational(t)
                            .ok_or_else(|| Failure::usage(format!("bad --base value `{t}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            };
            let pg = PartyGame::new(sizes, &base)?;
            Ok(Output::ok(serialize_game(&pg.game)))
        }
        Command::Enumerate { n, embedded } => {
            let lines: Vec<String> = if *embedded {
                enumerate_embedded(*n)?
                    .iter()
                    .map(|e| e.to_string())
                    .collect()
            } else {
                enumerate_partitions(*n)?
                    .iter()
                    .map(|p| p.to_string())
                    .collect()
            };
            let mut text = String::new();
            for (k, line) in lines.iter().enumerate() {
                match format {
                    Format::Table => writeln!(text, "{line}"),
                    Format::Rows => writeln!(text, "{}\t{line}", k + 1),
                }
                .unwrap();
            }
            Ok(Output::ok(text))
        }
    }
}

fn render_comparison(columns: &[crate::marginality::MarginalVector], format: Format) -> String {
    let mut out = String::new();
    let rows = columns[0].entries.len();
    match format {
        Format::Rows => {
            for r in 0..rows {
                let key = columns[0].entries[r].0.to_string();
                for (kind, col) in SchemeKind::NAMED.iter().zip(columns) {
                    writeln!(out, "{kind}:{key}\t{}", format_rational(&col.entries[r].1)).unwrap();
                }
            }
        }
        Format::Table => {
            let cells: Vec<Vec<String>> = (0..rows)
                .map(|r| {
                    std::iter::once(columns[0].entries[r].0.to_string())
                        .chain(columns.iter().map(|c| format_rational(&c.entries[r].1)))
                        .collect()
                })
                .collect();
            let header: Vec<String> = std::iter::once("embedded coalition".to_string())
                .chain(SchemeKind::NAMED.iter().map(|k| k.name().to_string()))
                .collect();
            let widths: Vec<usize> = (0..header.len())
                .map(|c| {
                    cells
                        .iter()
                        .map(|row| row[c].chars().count())
                        .chain(std::iter::once(header[c].len()))
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            for row in std::iter::once(&header).chain(cells.iter()) {
                let line: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .map(|(cell, w)| format!("{cell:<w$}"))
                    .collect();
                writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
            }
        }
    }
    out
}
