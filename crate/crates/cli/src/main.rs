mod angle;
mod commands;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use angle::{parse_angle, AngleArg};
use table::Table;

#[derive(Parser, Debug)]
#[command(name = "aewalk", version, about = "Quantum walk with a cutting edge: simulation, spectra, topology and limit laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Boundary distribution nu_n(j), or the column-resolved nu_n(j, m) with --full.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Write every arc column instead of the boundary only.
        #[arg(long)]
        full: bool,
    },
    /// Bulk band edge and edge band per wave number.
    Dispersion(Common),
    /// nu_2d and sign class over an (alpha, beta) grid.
    Phase(Common),
    /// Limit law of the regime selected by the angles against simulation.
    Limits(Common),
    /// Edge group velocity recovered from a simulated boundary distribution.
    Velocity {
        #[command(flatten)]
        common: Common,
        /// Fixed support edge instead of the detected one.
        #[arg(long = "r-hat")]
        r_hat: Option<f64>,
    },
    /// Winding numbers of both chiral families and the boundary chiral check.
    Topology {
        #[command(flatten)]
        common: Common,
        #[arg(long = "shift-variant", value_enum, default_value_t = Variant::Moving)]
        shift_variant: Variant,
        /// Integer in beta = +-alpha + n pi.
        #[arg(long = "family-n", default_value_t = 0)]
        family_n: i64,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Angle in radians or as a*pi/b.
    #[arg(long, value_parser = parse_angle, default_value = "pi/4", allow_hyphen_values = true)]
    alpha: AngleArg,
    #[arg(long, value_parser = parse_angle, default_value = "pi/6", allow_hyphen_values = true)]
    beta: AngleArg,
    /// Number of double steps.
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// Wave-number grid size (simulation) or sample count (sweeps).
    #[arg(long)]
    grid: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Polynomial order of the cumulative fit.
    #[arg(long, default_value_t = 5)]
    order: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Variant {
    /// L turns into R on the boundary.
    Moving,
    /// L turns into i R on the boundary.
    MovingPhase,
}

/// Failure categories with their exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Validation(_) => 3,
        }
    }
}

impl From<aewalk::WalkError> for Failure {
    fn from(e: aewalk::WalkError) -> Self {
        use aewalk::WalkError as E;
        match e {
            E::Domain(_) | E::Regime { .. } | E::Aliasing { .. } | E::OddTime { .. } => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Validation(e.to_string()),
        }
    }
}

fn emit(table: &Table, common: &Common) -> io::Result<()> {
    let sink: Box<dyn Write> = match &common.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match common.format {
        Format::Csv => table.write_csv(sink),
        Format::Json => table.write_json(sink),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, common) = match &cli.command {
        Command::Simulate { common, full } => (commands::simulate(common, *full), common),
        Command::Dispersion(c) => (commands::dispersion(c), c),
        Command::Phase(c) => (commands::phase(c), c),
        Command::Limits(c) => (commands::limits(c), c),
        Command::Velocity { common, r_hat } => (commands::velocity(common, *r_hat), common),
        Command::Topology {
            common,
            shift_variant,
            family_n,
        } => (commands::topology(common, *shift_variant, *family_n), common),
    };
    let (table, failure) = match result {
        Ok(t) => (t, None),
        Err(commands::Partial { table, failure }) => (table, Some(failure)),
    };
    if let Some(t) = &table {
        if let Err(e) = emit(t, common).or_else(|e| match e.kind() {
            io::ErrorKind::BrokenPipe => Ok(()),
            _ => Err(e),
        }) {
            eprintln!("error: cannot write output: {e}");
            return ExitCode::from(2);
        }
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(f) => {
            match &f {
                Failure::Config(m) => eprintln!("configuration error: {m}"),
                Failure::Validation(m) => eprintln!("validation failure: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
