use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use hopfdef::cli::{self, CliError, Outcome, DEFAULT_CEILING};
use hopfdef::complexes::Plane;
use hopfdef::exact_linalg::FieldSpec;
use hopfdef::hopf_structures::{example_catalog, Kind, CATALOG};

/// Deformation complexes of module and comodule (co/bi)algebras.
#[derive(Parser)]
#[command(name = "hopfdef", version)]
struct Args {
    /// Read the package over this field instead of its own (0 for Q, or a prime).
    #[arg(long, global = true)]
    field: Option<u64>,
    /// Largest cochain space a command may build.
    #[arg(long, global = true, default_value_t = DEFAULT_CEILING)]
    ceiling: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    report_out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms of a package.
    Validate { package: PathBuf },
    /// Check every clause identity, square and anticommutation.
    Verify {
        package: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        kind: Option<Kind>,
        #[arg(long, default_value_t = 4)]
        cutoff: usize,
    },
    /// Total cohomology with representatives.
    Cohomology {
        package: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        kind: Option<Kind>,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Boundary plane of a tricomplex: p=1, q=1 or r=0.
        #[arg(long, value_parser = parse_plane)]
        plane: Option<Plane>,
    },
    /// Extend an infinitesimal deformation order by order.
    Deform {
        package: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        kind: Option<Kind>,
        /// Infinitesimal file; the zero infinitesimal when omitted.
        #[arg(long)]
        infinitesimal: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
    },
    /// Probe rigidity through the given order.
    Rigidity {
        package: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        kind: Option<Kind>,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
        #[arg(long, default_value_t = 8)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a catalog package in the package file format.
    Export {
        /// Catalog name; lists the names when omitted.
        name: Option<String>,
    },
}

fn parse_kind(s: &str) -> Result<Kind, String> {
    Kind::parse(s).ok_or_else(|| format!("unknown kind `{s}` (MA, MC, CA, CC, MB, CB)"))
}

fn parse_plane(s: &str) -> Result<Plane, String> {
    Plane::parse(s).ok_or_else(|| format!("unknown plane `{s}` (p=1, q=1, r=0)"))
}

fn field_of(c: Option<u64>) -> Result<Option<FieldSpec>, CliError> {
    c.map(|c| FieldSpec::from_characteristic(c).map_err(|e| CliError::Usage(e.to_string()))).transpose()
}

fn load(path: &PathBuf, field: Option<FieldSpec>) -> Result<hopfdef::hopf_structures::StructurePackage, CliError> {
    let text = std::fs::read_to_string(path)?;
    cli::parse_package(&text, field)
}

fn run(args: &Args) -> Result<Outcome, CliError> {
    let field = field_of(args.field)?;
    let ceiling = args.ceiling;
    match &args.command {
        Command::Validate { package } => cli::cmd_validate(&load(package, field)?),
        Command::Verify { package, kind, cutoff } => cli::cmd_verify(&load(package, field)?, *kind, *cutoff, ceiling),
        Command::Cohomology { package, kind, n_max, plane } => {
            cli::cmd_cohomology(&load(package, field)?, *kind, *n_max, *plane, ceiling)
        }
        Command::Deform { package, kind, infinitesimal, max_order } => {
            let text = infinitesimal.as_ref().map(std::fs::read_to_string).transpose()?;
            cli::cmd_deform(&load(package, field)?, *kind, text.as_deref(), *max_order, ceiling)
        }
        Command::Rigidity { package, kind, max_order, trials, seed } => {
            cli::cmd_rigidity(&load(package, field)?, *kind, *max_order, *trials, *seed, ceiling)
        }
        Command::Export { .. } => unreachable!("handled before run"),
    }
}

fn export(name: Option<&str>, field: Option<u64>) -> anyhow::Result<()> {
    let Some(name) = name else {
        for n in CATALOG {
            println!("{n}");
        }
        return Ok(());
    };
    let f = FieldSpec::from_characteristic(field.unwrap_or(0))?;
    let pkg = example_catalog(name, f).with_context(|| format!("catalog entry `{name}`"))?;
    print!("{}", cli::write_package(&pkg));
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Command::Export { name } = &args.command {
        return match export(name.as_deref(), args.field) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        };
    }
    match run(&args) {
        Ok(outcome) => {
            let text = outcome.render();
            match &args.report_out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
