use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qbattery_cli::config::load_config;
use qbattery_cli::sweep::{run_sweep, simulate, SweepOptions, INDEX_FILE};
use qbattery_cli::validate::{validate, Fault, ValidateOptions};
use qbattery_cli::{presets, CliError, CliResult};

#[derive(Parser)]
#[command(name = "qbattery", version, about = "Frequency-modulated quantum battery simulator")]
#[command(after_help = "Output goes to --out, else `output_dir` from the config, else $QBATTERY_OUT/<label>.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single parameter point.
    Simulate {
        /// Config file or preset name.
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the cartesian grid of a config.
    Sweep {
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0: one per core).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Also compare every point against the quadrature oracle.
        #[arg(long)]
        check: bool,
    },
    /// Run the oracle cross-checks.
    Validate {
        #[arg(long)]
        fast: bool,
        /// Take tolerances and quadrature_dt from this config.
        #[arg(long)]
        config: Option<String>,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
    /// List or print the built-in presets.
    Presets {
        #[arg(long, conflicts_with = "show")]
        list: bool,
        #[arg(long)]
        show: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    FlipSign,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { config, out } => {
            let mut spec = load_config(&config)?;
            if let Some(dir) = out {
                spec.output_dir = dir;
            }
            let record = simulate(&spec)?;
            let s = record.summary.expect("successful run has a summary");
            println!("max_dE_B       {:.6}", s.max_d_e_b);
            println!("t_at_max       {:.4}", s.t_at_max);
            println!("max_W_ratio    {:.6}", s.max_w_ratio);
            println!("settle_time    {:.4}", s.settle_time);
            println!("terminal_dE_B  {:.6}", s.terminal_d_e_b);
            println!("series         {}", record.series_path.expect("written").display());
        }
        Command::Sweep { config, out, workers, check } => {
            let mut spec = load_config(&config)?;
            if let Some(dir) = out {
                spec.output_dir = dir;
            }
            let records = run_sweep(&spec, &SweepOptions { workers, check })?;
            let failed = records.iter().filter(|r| !r.succeeded()).count();
            for r in &records {
                let p = &r.params;
                match (&r.summary, &r.error) {
                    (Some(s), _) => {
                        let residual = r.diagnostics.oracle_residual.map(|x| format!("  oracle {x:.1e}")).unwrap_or_default();
                        println!(
                            "R={:<5} delta={:<4} d={:<4} Omega={:<5} max_dE_B={:.4} max_W={:.4} settle={:.2}{residual}",
                            p.rabi, p.detuning, p.mod_amplitude, p.mod_frequency, s.max_d_e_b, s.max_w_ratio, s.settle_time
                        );
                    }
                    (None, Some(e)) => println!("R={} delta={} d={} Omega={} FAILED: {e}", p.rabi, p.detuning, p.mod_amplitude, p.mod_frequency),
                    (None, None) => unreachable!("a record either has a summary or an error"),
                }
            }
            println!("index: {}", spec.output_dir.join(INDEX_FILE).display());
            if failed > 0 {
                return Err(CliError::PartialSweep { failed, total: records.len() });
            }
        }
        Command::Validate { fast, config, inject_fault } => {
            let mut opts = ValidateOptions { fast, ..Default::default() };
            if let Some(config) = config {
                opts.cfg = load_config(&config)?.cfg;
            }
            opts.fault = inject_fault.map(|FaultArg::FlipSign| Fault::FlipMemorySign);
            let outcomes = validate(&opts)?;
            for o in &outcomes {
                println!("{o}");
            }
            let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
            if !failed.is_empty() {
                return Err(CliError::ChecksFailed(failed.join(", ")));
            }
        }
        Command::Presets { list: _, show } => match show {
            Some(name) => {
                let text = presets::get(&name).ok_or_else(|| CliError::Usage(format!("no preset named `{name}`")))?;
                print!("{text}");
            }
            None => {
                for name in presets::names() {
                    println!("{name}");
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
