//! Argument grammar and subcommand dispatch.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use choco_core::verify::{self, OutcomeFilter};
use choco_core::{Bounds, Check, GrundyMemo, GrundyTable, Outcome, Position, RuleSet, VerificationReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cache::{self, TableCache};
use crate::io;

/// Exit status for successful runs and passed verifications.
pub const EXIT_OK: i32 = 0;
/// Exit status for verifications with discrepancies.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for usage and input errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "choco", version, about = "Grundy values and P-positions of chocolate-bar games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grundy value of a single position.
    Grundy {
        #[command(flatten)]
        rules: RulesArgs,
        #[arg(long, value_parser = parse_position)]
        position: Position,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Outcome class (P or N) of a single position.
    Outcome {
        #[command(flatten)]
        rules: RulesArgs,
        #[arg(long, value_parser = parse_position)]
        position: Position,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Export the full Grundy table over a bounded domain.
    Table {
        #[command(flatten)]
        rules: RulesArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[command(flatten)]
        build: BuildArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List positions by outcome class.
    Enumerate {
        #[command(flatten)]
        rules: RulesArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long, value_enum, default_value_t = FilterArg::P)]
        filter: FilterArg,
        #[command(flatten)]
        build: BuildArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Count positions whose Grundy value equals the nim-sum.
    Compare {
        #[command(flatten)]
        rules: RulesArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
        /// Also list the positions where they differ.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        build: BuildArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exhaustive checks of the nim-sum characterizations.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// P-positions are the nim-sum-zero positions (k = 4m+3).
    Char(CheckArgs),
    /// Nim-sum-zero positions only reach nonzero ones and vice versa (k = 4m+3).
    Closure(CheckArgs),
    /// P-positions satisfy (x-1)^y^(z-1) = 0 for x, z >= 1 (k = 4m+1).
    Conj41(CheckArgs),
    /// Rectangular bars: Grundy value equals x^y^z.
    Rect {
        #[command(flatten)]
        bounds: BoundsArgs,
        #[command(flatten)]
        build: BuildArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub k: u64,
    #[command(flatten)]
    pub bounds: BoundsArgs,
    #[command(flatten)]
    pub build: BuildArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RulesArg {
    Rect,
    Tri,
}

#[derive(Debug, Args)]
pub struct RulesArgs {
    #[arg(long, value_enum, default_value_t = RulesArg::Tri)]
    pub rules: RulesArg,
    /// Slope parameter for triangular rules.
    #[arg(long)]
    pub k: Option<u64>,
}

impl RulesArgs {
    fn resolve(&self) -> Result<RuleSet, String> {
        match (self.rules, self.k) {
            (RulesArg::Rect, None) => Ok(RuleSet::Rectangular),
            (RulesArg::Rect, Some(_)) => Err("--k only applies to --rules tri".into()),
            (RulesArg::Tri, None) => Err("--k is required for --rules tri".into()),
            (RulesArg::Tri, Some(k)) => RuleSet::triangular(k).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Uniform bound for all three coordinates.
    #[arg(long)]
    pub max: Option<u64>,
    #[arg(long)]
    pub max_x: Option<u64>,
    #[arg(long)]
    pub max_y: Option<u64>,
    #[arg(long)]
    pub max_z: Option<u64>,
}

impl BoundsArgs {
    fn resolve(&self) -> Result<Bounds, String> {
        let pick = |axis: Option<u64>, name: &str| {
            axis.or(self.max).ok_or_else(|| format!("missing bound: pass --max or --max-{name}"))
        };
        Ok(Bounds::new(pick(self.max_x, "x")?, pick(self.max_y, "y")?, pick(self.max_z, "z")?))
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Worker threads for table builds (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Reuse tables stored in the cache directory ($CHOCO_CACHE_DIR).
    #[arg(long)]
    pub cache: bool,
    /// Re-check every entry of a cached table against the mex recursion.
    #[arg(long)]
    pub validate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    #[value(name = "P")]
    P,
    #[value(name = "N")]
    N,
    All,
}

impl From<FilterArg> for OutcomeFilter {
    fn from(f: FilterArg) -> Self {
        match f {
            FilterArg::P => OutcomeFilter::P,
            FilterArg::N => OutcomeFilter::N,
            FilterArg::All => OutcomeFilter::All,
        }
    }
}

fn parse_position(s: &str) -> Result<Position, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y, z] = parts.as_slice() else {
        return Err(format!("expected x,y,z but got {s:?}"));
    };
    let num = |v: &str| v.parse::<u64>().map_err(|e| format!("bad coordinate {v:?}: {e}"));
    Ok(Position::new(num(x)?, num(y)?, num(z)?))
}

/// Input or runtime failure; reported on stderr with exit status 2.
#[derive(Debug)]
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Emitted {
    body: String,
    exit: i32,
}

impl Emitted {
    fn ok(body: String) -> Self {
        Emitted { body, exit: EXIT_OK }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Results go to `stdout` unless `--out` is given; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let rendered = e.to_string();
            let line = rendered.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(stderr, "{line}");
            return EXIT_USAGE;
        }
    };
    let (out_path, result) = dispatch(cli.command);
    let emitted = match result {
        Ok(e) => e,
        Err(Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let written = match out_path {
        Some(path) => File::create(&path)
            .map(BufWriter::new)
            .and_then(|mut f| f.write_all(emitted.body.as_bytes()).and_then(|_| f.flush()))
            .map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(emitted.body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_USAGE;
    }
    emitted.exit
}

fn dispatch(cmd: Command) -> (Option<PathBuf>, Result<Emitted, Usage>) {
    match cmd {
        Command::Grundy { rules, position, output } => (output.out.clone(), single(&rules, position, &output, false)),
        Command::Outcome { rules, position, output } => (output.out.clone(), single(&rules, position, &output, true)),
        Command::Table { rules, bounds, build, output } => {
            (output.out.clone(), table(&rules, &bounds, &build, &output))
        }
        Command::Enumerate { rules, bounds, filter, build, output } => {
            (output.out.clone(), enumerate(&rules, &bounds, filter, &build, &output))
        }
        Command::Compare { rules, bounds, list, build, output } => {
            let res = (|| {
                let t = load_table(rules.resolve()?, bounds.resolve()?, &build)?;
                emit_report(&verify::compare_grundy_nimsum(&t, list), &output)
            })();
            (output.out.clone(), res)
        }
        Command::Verify { check } => match check {
            VerifyCommand::Char(a) => {
                (a.output.out.clone(), check_with_table(&a, Check::Characterization, verify::check_characterization))
            }
            VerifyCommand::Conj41(a) => {
                (a.output.out.clone(), check_with_table(&a, Check::Conjecture4m1, verify::check_conjecture_4m1))
            }
            VerifyCommand::Closure(a) => {
                let res = (|| {
                    let r = verify::verify_move_closure(a.k, a.bounds.resolve()?)?;
                    emit_report(&r, &a.output)
                })();
                (a.output.out.clone(), res)
            }
            VerifyCommand::Rect { bounds, build, output } => {
                let res = (|| {
                    let t = load_table(RuleSet::Rectangular, bounds.resolve()?, &build)?;
                    emit_report(&verify::check_rectangular(&t)?, &output)
                })();
                (output.out.clone(), res)
            }
        },
    }
}

fn check_with_table(
    a: &CheckArgs,
    kind: Check,
    check: fn(&GrundyTable) -> Result<VerificationReport, verify::VerifyError>,
) -> Result<Emitted, Usage> {
    let rules = RuleSet::triangular(a.k)?;
    let bounds = a.bounds.resolve()?;
    kind.accepts(rules)?;
    let t = load_table(rules, bounds, &a.build)?;
    emit_report(&check(&t)?, &a.output)
}

/// Builds the table, going through the cache when `--cache` is set.
pub fn load_table(rules: RuleSet, bounds: Bounds, build: &BuildArgs) -> Result<GrundyTable, String> {
    let cache = build.cache.then(|| TableCache::new(cache::default_dir()));
    if let Some(c) = &cache {
        if let Some(t) = c.load(rules, bounds).map_err(|e| e.to_string())? {
            if build.validate {
                t.validate().map_err(|e| format!("cached table failed validation: {e}"))?;
            }
            return Ok(t);
        }
    }
    let t = crate::parallel::build_table(rules, bounds, build.threads).map_err(|e| e.to_string())?;
    if let Some(c) = &cache {
        c.store(&t).map_err(|e| e.to_string())?;
    }
    Ok(t)
}

fn single(rules: &RulesArgs, p: Position, output: &OutputArgs, outcome_only: bool) -> Result<Emitted, Usage> {
    let rules = rules.resolve()?;
    let g = choco_core::grundy(rules, p, &mut GrundyMemo::new())?;
    let o = Outcome::from_grundy(g);
    let body = match output.format.unwrap_or(Format::Text) {
        Format::Text if outcome_only => format!("{o}\n"),
        Format::Text => format!("{g}\n"),
        Format::Csv => format!("{}\n{},{},{},{g},{},{o}\n", io::CSV_HEADER.join(","), p.x, p.y, p.z, p.nim_sum()),
        Format::Json => {
            let v = json!({"position": [p.x, p.y, p.z], "grundy": g, "nim_sum": p.nim_sum(), "outcome": o.as_str()});
            format!("{v}\n")
        }
    };
    Ok(Emitted::ok(body))
}

fn table(rules: &RulesArgs, bounds: &BoundsArgs, build: &BuildArgs, output: &OutputArgs) -> Result<Emitted, Usage> {
    let t = load_table(rules.resolve()?, bounds.resolve()?, build)?;
    let body = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_table_csv(&t, &mut buf)?;
            String::from_utf8(buf)?
        }
        Format::Json => {
            let rows: Vec<_> = t.iter().map(|(p, g)| json!([p.x, p.y, p.z, g])).collect();
            format!("{}\n", serde_json::Value::Array(rows))
        }
        Format::Text => t.iter().map(|(p, g)| format!("{p} {g}\n")).collect(),
    };
    Ok(Emitted::ok(body))
}

fn enumerate(
    rules: &RulesArgs,
    bounds: &BoundsArgs,
    filter: FilterArg,
    build: &BuildArgs,
    output: &OutputArgs,
) -> Result<Emitted, Usage> {
    let t = load_table(rules.resolve()?, bounds.resolve()?, build)?;
    let ps = verify::enumerate_outcomes(&t, filter.into());
    let body = match output.format.unwrap_or(Format::Json) {
        Format::Json => format!("{}\n", io::positions_json(&ps)),
        Format::Csv => {
            let mut s = String::from("x,y,z\n");
            for p in &ps {
                s.push_str(&format!("{},{},{}\n", p.x, p.y, p.z));
            }
            s
        }
        Format::Text => ps.iter().map(|p| format!("{p}\n")).collect(),
    };
    Ok(Emitted::ok(body))
}

fn emit_report(r: &VerificationReport, output: &OutputArgs) -> Result<Emitted, Usage> {
    let body = match output.format.unwrap_or(Format::Json) {
        Format::Json => format!("{}\n", io::report_json(r)),
        Format::Text => io::report_text(r),
        Format::Csv => return Err(Usage("reports are available as json or text".into())),
    };
    Ok(Emitted { body, exit: exit_code(r) })
}

/// Exit status for a finished verification.
pub fn exit_code(r: &VerificationReport) -> i32 {
    if r.passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
