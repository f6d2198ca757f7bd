//! The `pga` command line.
//!
//! Exit codes: 0 for success (and "equal"/"member"), 1 for "not equal" or
//! "not a member", 2 for any usage, parse or validation error.

use std::ffi::OsString;

use clap::{Parser, Subcommand, ValueEnum};

use crate::canonical::{decide_sc, decide_spc, minimize_first, minimize_second, second_canonical, Verdict};
use crate::projection::{kernel_check, pgla2pga};
use crate::spi::{to_canon_l, to_canon_pga, unfold, CanonSpi, LCanon, NotInK};
use crate::syntax::{parse_l, parse_pga, LSeq, PgaTerm};
use crate::thread::{extract, minimize, thread_equal, to_dot, to_equations, RegularThread};

/// Largest `#0` padding or unfold length the CLI will materialize.
const MATERIALIZE_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DialectArg {
    Pga,
    Pgla,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Form {
    First,
    FirstMin,
    Second,
    SecondMin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RelationArg {
    Spc,
    Sc,
    Thread,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ThreadFormat {
    Equations,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "pga", about = "Program algebra workbench for PGA terms and PGLA sequences")]
struct Cli {
    /// Input notation; inferred from `^w` / `\##` markers when omitted.
    #[arg(long, global = true, value_enum)]
    dialect: Option<DialectArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and print in canonical spelling.
    Parse {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Print a canonical form in the input's notation.
    Normalize {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, value_enum, default_value = "first-min")]
        form: Form,
    },
    /// Decide an equivalence between two programs.
    Eq {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
        #[arg(long, value_enum, default_value = "spc")]
        relation: RelationArg,
    },
    /// Print the extracted thread.
    Extract {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, value_enum, default_value = "equations")]
        format: ThreadFormat,
        /// Use ASCII operators in equations.
        #[arg(long)]
        ascii: bool,
    },
    /// Project a PGLA sequence to PGA.
    Project {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Check membership of the kernel K.
    Member {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Print the first N instructions.
    Unfold {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        length: usize,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { code: 0, stdout, stderr: String::new() }
    }

    fn status(code: i32, stdout: String) -> Outcome {
        Outcome { code, stdout, stderr: String::new() }
    }

    fn error(message: impl std::fmt::Display) -> Outcome {
        Outcome { code: 2, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

/// A parsed program in either notation.
enum Program {
    Pga(PgaTerm),
    L(LSeq),
}

impl Program {
    fn dialect(&self) -> DialectArg {
        match self {
            Program::Pga(_) => DialectArg::Pga,
            Program::L(_) => DialectArg::Pgla,
        }
    }

    fn canon(&self) -> Result<CanonSpi, String> {
        match self {
            Program::Pga(t) => Ok(to_canon_pga(t)),
            Program::L(s) => match to_canon_l(s) {
                LCanon::Kernel(c) => Ok(c),
                LCanon::NotInK(n) => Err(not_in_k(&n)),
            },
        }
    }

    /// Thread semantics; L-sequences outside K go through pgla2pga.
    fn thread(&self) -> Result<RegularThread, String> {
        match self {
            Program::L(s) => {
                if let LCanon::NotInK(n) = to_canon_l(s) {
                    check_padding(&n)?;
                    return Ok(extract(&pgla2pga(s).canon()));
                }
                Ok(extract(&self.canon()?))
            }
            Program::Pga(_) => Ok(extract(&self.canon()?)),
        }
    }
}

fn not_in_k(n: &NotInK) -> String {
    format!("{} is not in the kernel K (repeater lacks {} preceding instruction(s))", n.first_form, n.deficit)
}

fn check_padding(n: &NotInK) -> Result<(), String> {
    if n.deficit > MATERIALIZE_LIMIT {
        return Err(format!("padding of {} instructions exceeds the limit of {MATERIALIZE_LIMIT}", n.deficit));
    }
    Ok(())
}

/// Infers the notation from `^w` and repeater markers.
pub fn infer_dialect(text: &str) -> Result<DialectArg, String> {
    let pga = text.contains("^w");
    let pgla = text.contains("##");
    match (pga, pgla) {
        (true, true) => Err("input mixes '^w' and repeat instructions".to_string()),
        (false, true) => Ok(DialectArg::Pgla),
        _ => Ok(DialectArg::Pga),
    }
}

fn read(text: &str, dialect: Option<DialectArg>) -> Result<Program, String> {
    let dialect = match dialect {
        Some(d) => d,
        None => infer_dialect(text)?,
    };
    match dialect {
        DialectArg::Pga => parse_pga(text).map(Program::Pga).map_err(|e| e.to_string()),
        DialectArg::Pgla => parse_l(text).map(Program::L).map_err(|e| e.to_string()),
    }
}

fn render(c: &CanonSpi, dialect: DialectArg) -> String {
    match dialect {
        DialectArg::Pga => c.to_pga_term().to_string(),
        DialectArg::Pgla => c.to_kform().to_string(),
    }
}

fn verdict_outcome(v: Verdict) -> Outcome {
    Outcome::status(if v.equal { 0 } else { 1 }, format!("{v}\n"))
}

fn execute(cli: Cli, stdin: &str) -> Result<Outcome, String> {
    let input = |expr: &str| -> String {
        if expr == "-" {
            stdin.trim_end_matches(['\n', '\r']).to_string()
        } else {
            expr.to_string()
        }
    };
    let dialect = cli.dialect;
    match cli.command {
        Command::Parse { expr } => {
            let text = match read(&input(&expr), dialect)? {
                Program::Pga(t) => t.to_string(),
                Program::L(s) => s.to_string(),
            };
            Ok(Outcome::ok(text + "\n"))
        }
        Command::Normalize { expr, form } => {
            let program = read(&input(&expr), dialect)?;
            if let Program::L(s) = &program {
                if let LCanon::NotInK(n) = to_canon_l(s) {
                    // no axiom beyond truncation applies outside K
                    return Ok(Outcome::ok(format!("{}\n", n.first_form)));
                }
            }
            let c = program.canon()?;
            let out = match form {
                Form::First => c,
                Form::FirstMin => minimize_first(&c),
                Form::Second => second_canonical(&c),
                Form::SecondMin => minimize_second(&c),
            };
            Ok(Outcome::ok(render(&out, program.dialect()) + "\n"))
        }
        Command::Eq { left, right, relation } => {
            let a = read(&input(&left), dialect)?;
            let b = read(&input(&right), dialect)?;
            let verdict = match relation {
                RelationArg::Spc => decide_spc(&a.canon()?, &b.canon()?),
                RelationArg::Sc => decide_sc(&a.canon()?, &b.canon()?),
                RelationArg::Thread => thread_equal(&a.thread()?, &b.thread()?),
            };
            Ok(verdict_outcome(verdict))
        }
        Command::Extract { expr, format, ascii } => {
            let t = minimize(&read(&input(&expr), dialect)?.thread()?);
            let text = match format {
                ThreadFormat::Equations if ascii => to_equations(&t).to_ascii(),
                ThreadFormat::Equations => to_equations(&t).to_string(),
                ThreadFormat::Dot => to_dot(&t),
            };
            Ok(Outcome::ok(text))
        }
        Command::Project { expr, format } => {
            let seq = match read(&input(&expr), Some(dialect.unwrap_or(DialectArg::Pgla)))? {
                Program::L(s) => s,
                Program::Pga(_) => return Err("project expects a PGLA sequence".into()),
            };
            if let LCanon::NotInK(n) = to_canon_l(&seq) {
                check_padding(&n)?;
            }
            let report = pgla2pga(&seq);
            Ok(Outcome::ok(match format {
                ReportFormat::Text => report.to_string(),
                ReportFormat::Json => report.to_json() + "\n",
            }))
        }
        Command::Member { expr } => {
            let seq = match read(&input(&expr), Some(dialect.unwrap_or(DialectArg::Pgla)))? {
                Program::L(s) => s,
                Program::Pga(_) => return Err("member expects a PGLA sequence".into()),
            };
            let check = kernel_check(&seq);
            Ok(Outcome::status(if check.member { 0 } else { 1 }, format!("{check}\n")))
        }
        Command::Unfold { expr, length } => {
            if length > MATERIALIZE_LIMIT {
                return Err(format!("length {length} exceeds the limit of {MATERIALIZE_LIMIT}"));
            }
            let c = read(&input(&expr), dialect)?.canon()?;
            let prefix = unfold(&c, length);
            let mut tokens: Vec<String> = prefix.iter().map(ToString::to_string).collect();
            if c.at(prefix.len()).is_some() {
                tokens.push("...".into());
            }
            Ok(Outcome::ok(tokens.join(" ") + "\n"))
        }
    }
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, stdin: &str) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(e.to_string()),
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: e.to_string(),
                },
                _ => {
                    let rendered = e.to_string();
                    let line = rendered.lines().next().unwrap_or("invalid arguments");
                    Outcome { code: 2, stdout: String::new(), stderr: format!("{line}\n") }
                }
            };
        }
    };
    match execute(cli, stdin) {
        Ok(out) => out,
        Err(message) => Outcome::error(message),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pga(args: &[&str]) -> Outcome {
        let mut argv = vec!["pga"];
        argv.extend_from_slice(args);
        run(argv, "")
    }

    #[test]
    fn parse_echoes() {
        assert_eq!(pga(&["parse", "a ; ( b ; c ) ^w"]).stdout, "a;(b;c)^w\n");
        assert_eq!(pga(&["parse", "-a;b"]).stdout, "-a;b\n");
        assert_eq!(pga(&["parse", "a;##1"]).stdout, "a;\\##1\n");
        let out = pga(&["parse", "a;;b"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("column 3"), "{}", out.stderr);
    }

    #[test]
    fn eq_exit_codes() {
        let out = pga(&["eq", "+a;-b;#4;-b;#4;\\##4", "+a;-b;#4;\\##2", "--relation", "spc"]);
        assert_eq!(out.code, 0, "{out:?}");
        assert_eq!(pga(&["eq", "a", "a;!"]).code, 1);
        assert_eq!(pga(&["eq", "#0", "#0;#0", "--relation", "thread"]).code, 0);
        assert_eq!(pga(&["eq", "#0", "#0;#0", "--relation", "sc"]).code, 1);
        assert_eq!(pga(&["eq", "a;\\##2", "a", "--relation", "spc"]).code, 2);
        // mixed notations
        assert_eq!(pga(&["eq", "a^w", "a;\\##1"]).code, 0);
    }

    #[test]
    fn extract_equations() {
        let out = pga(&["extract", "#4;a;(#2;b;+c)^w", "--format", "equations"]);
        assert_eq!(out.stdout, "X0 = X0 ⊴ c ⊵ b∘X0\n");
        let out = pga(&["extract", "a;#2;\\##3"]);
        assert_eq!(out.stdout, "X0 = a∘X0\n");
        let out = pga(&["extract", "+a;#3", "--format", "dot"]);
        assert!(out.stdout.starts_with("digraph"));
    }

    #[test]
    fn project_report() {
        let out = pga(&["project", "a;#2;\\##3"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("padding_added: 1"));
        assert!(out.stdout.contains("result: (a;#2;#0)^w"));
        let out = pga(&["project", "a;#2;\\##3", "--format", "json"]);
        assert!(out.stdout.contains("\"padding_added\": 1"));
        assert_eq!(pga(&["project", "\\##4294967295"]).code, 2);
    }

    #[test]
    fn member_and_unfold() {
        assert_eq!(pga(&["member", "a;b;\\##2"]).code, 0);
        let out = pga(&["member", "#7;+a;\\##5"]);
        assert_eq!(out.code, 1);
        assert!(out.stdout.contains('3'));
        assert_eq!(pga(&["unfold", "a;(b;c)^w", "--length", "5"]).stdout, "a b c b c ...\n");
        assert_eq!(pga(&["unfold", "a;b", "--length", "5"]).stdout, "a b\n");
        assert_eq!(pga(&["unfold", "a;b", "--length", "2"]).stdout, "a b\n");
        assert_eq!(pga(&["unfold", "a;b", "--length", "1"]).stdout, "a ...\n");
    }

    #[test]
    fn normalize_forms() {
        let n = |e: &str, f: &str| pga(&["normalize", e, "--form", f]).stdout;
        assert_eq!(n("+a;#2;(+b;#2;-c;#2)^w", "second-min"), "+a;(#0;+b;#0;-c)^w\n");
        assert_eq!(n("+a;#2;+b;#2;-c;#2;\\##4", "second-min"), "+a;#0;+b;#0;-c;\\##4\n");
        assert_eq!(n("+a;-b;#4;-b;#4;\\##4", "first-min"), "+a;-b;#4;\\##2\n");
        assert_eq!(n("a;\\##2;b", "second-min"), "a;\\##2\n");
        assert_eq!(n("a^w;b", "first"), "a^w\n");
    }

    #[test]
    fn errors_exit_two() {
        assert_eq!(pga(&[]).code, 2);
        assert_eq!(pga(&["frobnicate"]).code, 2);
        assert_eq!(pga(&["parse", "a^w;\\##1"]).code, 2);
        assert_eq!(pga(&["unfold", "a", "--length", "x"]).code, 2);
        assert_eq!(pga(&["--help"]).code, 0);
    }

    #[test]
    fn stdin_input() {
        let out = run(["pga", "parse", "-"], "a;b\n");
        assert_eq!(out.stdout, "a;b\n");
    }
}
