//! `dreadlock`: command-line front end for portraits, sectors, itineraries,
//! landing classes and exponential ray tracing.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "dreadlock", version, about = "Landing combinatorics of dreadlocks")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Tsv, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Below,
    Exact,
    Above,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ItineraryKind {
    Left,
    Right,
    Full,
    Class,
}

#[derive(Args)]
pub struct PortraitArg {
    /// Portrait file (JSON).
    #[arg(long)]
    portrait: PathBuf,
}

#[derive(Args)]
pub struct WindowArgs {
    /// Symbol index range `lo..hi`.
    #[arg(long, default_value = "-2..2", allow_hyphen_values = true)]
    window: String,
    #[arg(long, default_value_t = 1)]
    max_preperiod: usize,
    #[arg(long, default_value_t = 2)]
    max_period: usize,
}

#[derive(Args)]
pub struct NumericArgs {
    /// Parameter λ of `E(z) = λ·e^z` as `re,im`; defaults to 2πi.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, default_value_t = 60)]
    depth: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 40.0)]
    start_potential: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Linear order of two addresses, or cyclic order of three.
    Order {
        #[arg(long)]
        portrait: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
    },
    /// Sector containing an address.
    Sector {
        #[command(flatten)]
        portrait: PortraitArg,
        #[arg(long, allow_hyphen_values = true)]
        address: Vec<String>,
        #[arg(long, value_enum, default_value_t = SideArg::Exact)]
        side: SideArg,
    },
    /// Itinerary of an address.
    Itinerary {
        #[command(flatten)]
        portrait: PortraitArg,
        #[arg(long, allow_hyphen_values = true)]
        address: Vec<String>,
        #[arg(long, value_enum, default_value_t = ItineraryKind::Left)]
        kind: ItineraryKind,
    },
    /// Whether two addresses land together.
    Equiv {
        #[command(flatten)]
        portrait: PortraitArg,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Landing classes of all addresses in a window.
    Classes {
        #[command(flatten)]
        portrait: PortraitArg,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Address realizing a one-sided itinerary.
    Realize {
        #[command(flatten)]
        portrait: PortraitArg,
        #[arg(long, allow_hyphen_values = true)]
        itinerary: String,
    },
    /// Numerical landing estimates for exponential rays.
    Trace {
        #[arg(long, allow_hyphen_values = true, required = true)]
        address: Vec<String>,
        #[command(flatten)]
        numeric: NumericArgs,
        /// Also print every pullback point.
        #[arg(long)]
        points: bool,
        #[arg(long)]
        emit_svg: Option<PathBuf>,
    },
    /// Compares landing predictions with numerical estimates.
    Verify {
        #[command(flatten)]
        portrait: PortraitArg,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        numeric: NumericArgs,
        #[arg(long, default_value_t = 1e-6)]
        match_tol: f64,
        /// Include periodic addresses in the sample.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        emit_svg: Option<PathBuf>,
    },
    /// Validation and simplicity report for a portrait.
    CheckSimple {
        #[command(flatten)]
        portrait: PortraitArg,
    },
}

fn configure_threads() {
    if let Some(n) = std::env::var("DREADLOCK_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match commands::run(cli.command, cli.format) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
