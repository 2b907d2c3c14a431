use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use realizer::cli::{parse_workspace, run, Command, Flags, Workspace};
use realizer::Fuel;

const USAGE_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "realizer", version, about = "Realizability toolkit over the SK combinatory algebra")]
struct Args {
    /// Workspace file with let, assembly, per and map declarations
    #[arg(short, long, global = true)]
    workspace: Option<PathBuf>,
    /// Reduction steps allowed per convertibility check
    #[arg(long, global = true, default_value_t = Fuel::DEFAULT.0)]
    fuel: u64,
    /// Samples per law family
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a term to weak normal form
    Normalize { term: String },
    /// Compile a lambda term to S and K
    Compile { term: String },
    /// Check that no two elements of an assembly share a realizer
    CheckModest { assembly: String },
    /// Check that the classes of a per are pairwise disjoint
    CheckPer { per: String },
    /// Check that a map's tracker tracks it
    CheckTracker { map: String },
    /// Build the subquotient modest set of a per
    Subquotient { per: String },
    /// Build the canonical per of a modest set
    CanonicalPer { assembly: String },
    /// Check that a modest set is isomorphic to its canonical subquotient
    CheckIso { assembly: String },
    /// Isomorphism plus full faithfulness instances for each assembly
    CheckEquivalence {
        #[arg(required = true)]
        assemblies: Vec<String>,
    },
    /// Run the randomized law suites
    Laws,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Normalize { term } => Command::Normalize(term),
            Cmd::Compile { term } => Command::Compile(term),
            Cmd::CheckModest { assembly } => Command::CheckModest(assembly),
            Cmd::CheckPer { per } => Command::CheckPer(per),
            Cmd::CheckTracker { map } => Command::CheckTracker(map),
            Cmd::Subquotient { per } => Command::Subquotient(per),
            Cmd::CanonicalPer { assembly } => Command::CanonicalPer(assembly),
            Cmd::CheckIso { assembly } => Command::CheckIso(assembly),
            Cmd::CheckEquivalence { assemblies } => Command::CheckEquivalence(assemblies),
            Cmd::Laws => Command::Laws,
        }
    }
}

fn load(path: Option<&PathBuf>) -> Result<Workspace, String> {
    let Some(path) = path else {
        return Ok(Workspace::default());
    };
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_workspace(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ws = match load(args.workspace.as_ref()) {
        Ok(ws) => ws,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_ERROR);
        }
    };
    let flags = Flags { fuel: Fuel(args.fuel), samples: args.samples, seed: args.seed };
    match run(&args.command.into(), &ws, &flags) {
        Ok(report) => {
            match args.format {
                Format::Text => print!("{report}"),
                Format::Json => println!("{}", report.to_json()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}
