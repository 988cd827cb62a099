mod commands;
mod config;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use movwall::Error;

#[derive(Parser)]
#[command(name = "movwall", version, about = "Exact walls and chambers for slope stability on P(X)")]
struct Cli {
    /// Worker threads for the data-parallel stages.
    #[arg(long, env = "MW_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
pub struct Input {
    /// Catalog entry (p2, p3, p1xp1, p1xp2, p1cubed, proj-bundle-p2).
    #[arg(long, conflicts_with = "lattice")]
    pub catalog: Option<String>,
    /// Lattice JSON file.
    #[arg(long)]
    pub lattice: Option<String>,
    /// Cohomology model JSON file.
    #[arg(long)]
    pub model: Option<String>,
    /// Sheaf invariants: a JSON file or a catalog sheaf name.
    #[arg(long)]
    pub sheaf: Option<String>,
    /// Region: `default`, a catalog region name, a JSON file, or
    /// `around <divisor> radius <rational>`.
    #[arg(long, default_value = "default")]
    pub region: String,
    /// Safety factor on the enumeration radius (rational, at least 1).
    #[arg(long, default_value = "2")]
    pub safety: String,
    /// Maximum number of enumeration candidates.
    #[arg(long, default_value_t = 2_000_000)]
    pub budget: usize,
    /// Seed for sampled classes and points.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    N1,
    Amp,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the walls of a sheaf's invariants that meet a region.
    Walls(Input),
    /// Decompose a region into sign-vector cells of the wall arrangement.
    Chambers {
        #[command(flatten)]
        input: Input,
        /// Complete-intersection representatives A^{n-2}B for every cell.
        #[arg(long)]
        representatives: bool,
        /// Presented sheaf (JSON file or catalog name) to evaluate per cell.
        #[arg(long)]
        presented: Option<String>,
        /// Verdict samples per cell for the constancy check.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        /// Plane (JSON file or catalog slice name) to rasterize.
        #[arg(long)]
        slice: Option<String>,
        #[arg(long, default_value_t = 100)]
        grid: usize,
        /// CSV path for the raster.
        #[arg(long, default_value = "slice.csv")]
        csv: String,
    },
    /// Crossing parameters of walls along a segment.
    Cross {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
        /// Preset segment and wall (e.g. schmitt-demo).
        #[arg(long)]
        preset: Option<String>,
        /// Segment start, comma-separated rationals (an ample class).
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
        /// Treat --from/--to as curve classes (N1 mode only).
        #[arg(long)]
        curves: bool,
        /// Wall normal, comma-separated integers; repeatable. Without it the
        /// walls are enumerated from --sheaf and --region.
        #[arg(long, allow_hyphen_values = true)]
        wall: Vec<String>,
    },
    /// Check the K-theoretic identities for a list of classes.
    Kverify {
        #[command(flatten)]
        input: Input,
        /// Class list JSON; seeded random classes when absent.
        #[arg(long)]
        classes: Option<String>,
        /// Number of random classes.
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Inspect the built-in catalog.
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// Run the seeded invariant suite.
    Selfcheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    List,
    Show { name: String },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::Io { .. }
        | Error::InvalidInput(_)
        | Error::DimensionMismatch(_)
        | Error::ModelMismatch(..)
        | Error::RegionNotInP { .. } => 2,
        Error::EnumerationBudgetExceeded { .. } => 3,
        Error::InternalInconsistency(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        movwall::par::init_threads(t.max(1));
    }
    let result = match cli.command {
        Command::Walls(input) => commands::walls(&input),
        Command::Chambers {
            input,
            representatives,
            presented,
            samples,
            slice,
            grid,
            csv,
        } => commands::chambers(
            &input,
            &commands::ChamberOptions {
                representatives,
                presented,
                samples,
                slice,
                grid,
                csv,
            },
        ),
        Command::Cross {
            input,
            mode,
            preset,
            from,
            to,
            curves,
            wall,
        } => commands::cross(
            &input,
            &commands::CrossOptions {
                mode,
                preset,
                from,
                to,
                curves,
                walls: wall,
            },
        ),
        Command::Kverify { input, classes, count } => commands::kverify(&input, classes.as_deref(), count),
        Command::Catalog(CatalogCommand::List) => commands::catalog_list(),
        Command::Catalog(CatalogCommand::Show { name }) => commands::catalog_show(&name),
        Command::Selfcheck { seed, out } => commands::selfcheck(seed, out.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
