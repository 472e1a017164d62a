use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use covercraft::cover::ExponentBound;
use covercraft_cli::config::{parse_list, OffsetSpec};
use covercraft_cli::{
    cmd_analyze, cmd_cover, cmd_oracle, cmd_pairs, cmd_search, cmd_verify, exit, CliError, CliResult, RunConfig,
};

/// Covering-congruence obstructions for k·m + j·a^i + l: mine pairs, build
/// a covering system, search prime windows and check the prime sums.
#[derive(Parser, Debug)]
#[command(name = "covercraft", version)]
struct Cli {
    /// TOML run configuration; explicit flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for the parallel stages.
    #[arg(long, global = true, env = "COVERCRAFT_THREADS")]
    threads: Option<usize>,

    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    #[arg(long = "K", global = true)]
    k: Option<u64>,
    #[arg(long = "M", global = true)]
    m_bound: Option<u64>,
    /// Offsets: `5,7`, `multiples`, `multiples:<prime>` or `factorial`.
    #[arg(long = "L-N", global = true, allow_hyphen_values = true)]
    offsets: Option<String>,
    #[arg(long, global = true)]
    p_max: Option<u64>,
    #[arg(long = "N", global = true)]
    n: Option<u64>,
    #[arg(long, global = true)]
    upper: Option<u64>,
    /// Exclusive exponent bound `i < K ln N` instead of `i <= ceil(K ln N)`.
    #[arg(long, global = true)]
    exclusive_exponents: bool,
    /// Seed for the sampled divisibility checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Output file; stdout when neither this nor the config names one.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mine anchor/covering prime pairs.
    Pairs {
        /// Bases to mine (repeatable); all of 2..=K by default.
        #[arg(long = "a")]
        bases: Vec<u64>,
        /// Demand enough anchors per base for every class.
        #[arg(long)]
        require_full: bool,
    },
    /// Partition pairs, solve the CRT system and verify it.
    Cover {
        #[arg(long)]
        pairs: Option<PathBuf>,
    },
    /// Search the window for primes of the class and classify their forms.
    Search {
        #[arg(long)]
        system: Option<PathBuf>,
        /// Also run the brute-force oracle and check containment.
        #[arg(long)]
        check_oracle: bool,
        /// Record wall time in the report trailer.
        #[arg(long)]
        timing: bool,
    },
    /// Brute-force survivors of the window, without a covering system.
    Oracle,
    /// Prime-sum diagnostics over a grid of x values.
    Analyze {
        /// Comma-separated x values.
        #[arg(long)]
        grid: Option<String>,
        /// Comma-separated Brun multipliers.
        #[arg(long = "brun")]
        brun_multipliers: Option<String>,
        /// Truncation point of the order sums.
        #[arg(long = "D")]
        d_max: Option<u64>,
    },
    /// Re-verify a covering system file and print an itemized report.
    Verify {
        #[arg(long)]
        system: Option<PathBuf>,
        /// Accept systems that leave some class without a covering prime.
        #[arg(long)]
        allow_incomplete: bool,
    },
}

fn parse_grid(flag: &str, s: &str) -> CliResult<Vec<u64>> {
    parse_list(s).map_err(|e| CliError::new(exit::CONFIG, format!("{flag}: {e}")))
}

fn effective_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let o = &cli.overrides;
    if let Some(v) = o.k {
        cfg.k = v;
    }
    if let Some(v) = o.m_bound {
        cfg.m_bound = v;
    }
    if let Some(v) = &o.offsets {
        cfg.offsets = v
            .parse::<OffsetSpec>()
            .map_err(|e| CliError::new(exit::CONFIG, format!("--L-N: {e}")))?;
    }
    if let Some(v) = o.p_max {
        cfg.p_max = v;
    }
    if let Some(v) = o.n {
        cfg.n = v;
    }
    if o.upper.is_some() {
        cfg.upper = o.upper;
    }
    if o.exclusive_exponents {
        cfg.exponent_bound = ExponentBound::Exclusive;
    }
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if let Some(v) = o.samples {
        cfg.samples = v;
    }
    let out = o.out.clone();
    match &cli.command {
        Command::Pairs { bases, .. } => {
            if !bases.is_empty() {
                cfg.bases = Some(bases.clone());
            }
            cfg.outputs.pairs = out.or(cfg.outputs.pairs.take());
        }
        Command::Cover { .. } => cfg.outputs.system = out.or(cfg.outputs.system.take()),
        Command::Search { .. } => cfg.outputs.report = out.or(cfg.outputs.report.take()),
        Command::Oracle => cfg.outputs.oracle = out.or(cfg.outputs.oracle.take()),
        Command::Analyze {
            grid,
            brun_multipliers,
            d_max,
        } => {
            if let Some(g) = grid {
                cfg.grid = parse_grid("--grid", g)?;
            }
            if let Some(b) = brun_multipliers {
                cfg.brun_multipliers = parse_grid("--brun", b)?;
            }
            if let Some(d) = d_max {
                cfg.order_sum.d_max = *d;
            }
            cfg.outputs.diagnostics = out.or(cfg.outputs.diagnostics.take());
        }
        Command::Verify { .. } => {}
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> CliResult<u8> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::new(exit::CONFIG, format!("--threads: {e}")))?;
    }
    let cfg = effective_config(cli)?;
    if cli.print_config {
        print!("{}", cfg.to_toml());
        return Ok(exit::OK);
    }
    match &cli.command {
        Command::Pairs { require_full, .. } => cmd_pairs(&cfg, *require_full),
        Command::Cover { pairs } => cmd_cover(&cfg, pairs.as_ref()),
        Command::Search {
            system,
            check_oracle,
            timing,
        } => cmd_search(&cfg, system.as_ref(), *check_oracle, *timing),
        Command::Oracle => cmd_oracle(&cfg),
        Command::Analyze { .. } => cmd_analyze(&cfg),
        Command::Verify {
            system,
            allow_incomplete,
        } => cmd_verify(&cfg, system.as_ref(), *allow_incomplete, cli.overrides.out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprint!("{e}");
            ExitCode::from(e.code)
        }
    }
}
