use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use orthofield::cli::{run_file, Overrides, EXIT_ERROR};

/// Runs one experiment described by a JSON config.
#[derive(Parser, Debug)]
#[command(name = "orthofield", version)]
struct Args {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compare the report against the config's golden file.
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let ov = Overrides { seed: args.seed, workers: args.workers, out: args.out, check: args.check };
    match run_file(&args.config, &ov) {
        Ok(o) => {
            for s in &o.report.statistics {
                let mark = if s.passed { "ok  " } else { "FAIL" };
                eprintln!("{mark} {} = {:e}", s.name, s.value);
            }
            if let Some(m) = &o.golden_mismatch {
                eprintln!("golden mismatch: {m}");
            }
            eprintln!("{} -> {} ({})", o.report.kind, o.out.display(), if o.exit_code == 0 { "pass" } else { "fail" });
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
