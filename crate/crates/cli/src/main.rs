use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use shatterlab_cli::run::{
    self, CliError, Ctx, Format, DEFAULT_T_MAX, DEFAULT_T_MIN,
};
use shatterlab_core::pipeline::ReduceOptions;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "shatterlab",
    version,
    about = "Exact shatter-function experiments on semilinear families"
)]
struct Cli {
    /// Seed of every randomized search; reports are byte-identical per seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for the report and its artifacts (written atomically).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format on stdout and under --out.
    #[arg(long, global = true, value_parser = ["json", "csv"], default_value = "json")]
    format: String,
    /// Cap on dyadic radius refinements in the window searches.
    #[arg(long = "budget-windows", global = true)]
    budget_windows: Option<usize>,
    /// Cap on cells/regions the synthesizers may enumerate.
    #[arg(long = "budget-subsets", global = true)]
    budget_subsets: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace-count sweep of a family over one or more sizes t.
    Shatter {
        /// Corpus entry name or path to a family JSON file.
        #[arg(long)]
        family: String,
        /// Sizes to sweep (repeatable or comma-separated).
        #[arg(long = "t", value_delimiter = ',')]
        t: Vec<usize>,
        /// Start of a sweep range (with --t-max).
        #[arg(long)]
        t_min: Option<usize>,
        /// End of a sweep range (with --t-min).
        #[arg(long)]
        t_max: Option<usize>,
    },
    /// Shatter-function exponent: exact for simple families, a log-log
    /// estimate for parameterized ones.
    Exponent {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = DEFAULT_T_MIN)]
        t_min: usize,
        #[arg(long, default_value_t = DEFAULT_T_MAX)]
        t_max: usize,
    },
    /// Full symbolic reduction to a simple family, with replayable trace.
    Pipeline {
        #[arg(long)]
        family: String,
        /// Where to write the reduction trace (default: under --out).
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Grid edge counts of a block relation.
    Delta {
        #[arg(long)]
        family: String,
        /// Evaluate the cube grid [k]^w per block.
        #[arg(long)]
        k: Option<i64>,
        /// Randomized search at total grid size t.
        #[arg(long)]
        t: Option<usize>,
        /// Index labels J (for simple-family payloads).
        #[arg(long, value_delimiter = ',')]
        j: Vec<String>,
        /// Index labels J' ⊆ J (for simple-family payloads).
        #[arg(long, value_delimiter = ',')]
        jp: Vec<String>,
    },
    /// Re-run a corpus entry's documented checks and compare.
    Reproduce {
        /// Corpus entry name.
        id: String,
        /// Override the cube grid side (delta entries only).
        #[arg(long)]
        k: Option<i64>,
    },
    /// List the corpus.
    List,
}

fn init_threads() {
    if let Ok(v) = std::env::var("SHATTERLAB_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                // A failure means a pool already exists; keep that one.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn command_echo() -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, a) in std::env::args().enumerate() {
        if i == 0 {
            let name = std::path::Path::new(&a)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or(a);
            parts.push(name);
        } else {
            parts.push(a);
        }
    }
    parts.join(" ")
}

fn dispatch(cli: Cli, ctx: &Ctx) -> Result<(), CliError> {
    let output = match &cli.command {
        Command::Shatter {
            family,
            t,
            t_min,
            t_max,
        } => {
            let mut ts = t.clone();
            match (t_min, t_max) {
                (Some(lo), Some(hi)) if lo <= hi => ts.extend(*lo..=*hi),
                (None, None) => {}
                _ => return Err(CliError::Input("need --t-min <= --t-max".into())),
            }
            if ts.is_empty() {
                return Err(CliError::Input(
                    "need at least one size: --t or --t-min/--t-max".into(),
                ));
            }
            run::cmd_shatter(ctx, family, &ts)?
        }
        Command::Exponent {
            family,
            t_min,
            t_max,
        } => run::cmd_exponent(ctx, family, *t_min, *t_max)?,
        Command::Pipeline { family, trace_out } => {
            run::cmd_pipeline(ctx, family, trace_out.as_deref())?
        }
        Command::Delta { family, k, t, j, jp } => run::cmd_delta(ctx, family, *k, *t, j, jp)?,
        Command::Reproduce { id, k } => run::cmd_reproduce(ctx, id, *k)?,
        Command::List => {
            print!("{}", run::cmd_list());
            return Ok(());
        }
    };
    let (report, space, stem) = output;
    let text = run::emit(ctx, &report, space.as_ref(), &stem)?;
    print!("{text}");
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    init_threads();
    let defaults = ReduceOptions::default();
    let ctx = Ctx {
        command: command_echo(),
        seed: cli.seed,
        out: cli.out.clone(),
        format: if cli.format == "csv" {
            Format::Csv
        } else {
            Format::Json
        },
        opts: ReduceOptions {
            cell_budget: cli.budget_subsets.unwrap_or(defaults.cell_budget),
            window_depth: cli.budget_windows.unwrap_or(defaults.window_depth),
        },
    };
    let started = std::time::Instant::now();
    match dispatch(cli, &ctx) {
        Ok(()) => {
            eprintln!("elapsed {} ms", started.elapsed().as_millis());
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
