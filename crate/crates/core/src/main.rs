use adafilter::cli::{
    analyze, read_metrics, read_pvalue_csv, write_analysis, write_metrics, AnalyzeRequest,
};
use adafilter::plot::plot_metrics;
use adafilter::{run_sweep, Combiner, Method, SweepConfig};
use clap::{Parser, Subcommand};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "adafilter",
    version,
    about = "Partial-conjunction testing with AdaFilter"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test the partial-conjunction nulls of a features-by-studies p-value CSV.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "adafilter-adabon")]
        method: Method,
        #[arg(long, default_value_t = 2)]
        u: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        /// Augment AdaFilter-AdaBon for FDX control at level gamma.
        #[arg(long)]
        augment: bool,
        /// PC combiner for the baseline methods (default fisher).
        #[arg(long)]
        combiner: Option<Combiner>,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long)]
        kappa: Option<usize>,
        /// Output CSV; standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a simulation sweep described by a TOML or JSON file.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Override the number of replicates.
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Draw SVG figures from a metrics CSV.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
}

fn sink(path: Option<&PathBuf>) -> adafilter::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn run(cli: Cli) -> adafilter::Result<()> {
    match cli.command {
        Command::Analyze {
            input,
            method,
            u,
            k,
            alpha,
            theta,
            gamma,
            augment,
            combiner,
            lambda,
            kappa,
            output,
        } => {
            let table = read_pvalue_csv(File::open(&input)?)?;
            let req = AnalyzeRequest {
                method,
                u,
                k,
                alpha,
                theta,
                gamma,
                augment,
                combiner,
                lambda,
                kappa,
            };
            let report = analyze(&table, &req)?;
            write_analysis(&report, sink(output.as_ref())?)?;
            eprintln!(
                "{}: {} of {} features rejected (threshold {})",
                report.method,
                report.result.num_rejected(),
                report.s.len(),
                report.result.threshold
            );
        }
        Command::Simulate {
            config,
            output,
            reps,
            seed,
        } => {
            let mut cfg = match &config {
                Some(p) => SweepConfig::from_path(p)?,
                None => SweepConfig::default(),
            };
            if let Some(r) = reps {
                cfg.reps = r;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            let records = run_sweep(&cfg)?;
            write_metrics(&records, &cfg, sink(output.as_ref())?)?;
        }
        Command::Plot { input, output_dir } => {
            let records = read_metrics(File::open(&input)?)?;
            for path in plot_metrics(&records, &output_dir)? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("ADAFILTER_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: ADAFILTER_THREADS must be a positive integer, got '{v}'");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
