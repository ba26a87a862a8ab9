use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lyapunov_cli::{
    render, run_constants, run_job, run_verify, JobConfig, JobError, OutputFormat, VerifyConfig,
};

/// Top Lyapunov exponent of i.i.d. products of positive 2x2 matrices.
#[derive(Parser)]
#[command(name = "lyapunov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Highest approximation level N.
    #[arg(long, global = true)]
    max_n: Option<u32>,

    /// Working precision in bits; a second run at twice this checks the digits.
    #[arg(long, global = true)]
    precision_bits: Option<u32>,

    /// Keep the original basis when computing bounds.
    #[arg(long, global = true)]
    no_optimize: bool,

    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Digits after the decimal point for Lambda_N.
    #[arg(long, global = true)]
    digits: Option<u32>,

    /// Monte Carlo seed (compute runs Monte Carlo only if the job has `verify`).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Lambda_N and error bounds for N = 1..max_n.
    Compute { file: PathBuf },
    /// Monte Carlo estimate only.
    Verify { file: PathBuf },
    /// Constants before and after basis optimization.
    Constants { file: PathBuf },
}

impl Cli {
    fn load(&self, file: &Path) -> Result<JobConfig, JobError> {
        let mut cfg = JobConfig::load(file)?;
        if let Some(n) = self.max_n {
            cfg.max_n = n;
        }
        if let Some(p) = self.precision_bits {
            cfg.precision_bits = p;
        }
        if self.no_optimize {
            cfg.optimize_basis = false;
        }
        if let Some(f) = self.format {
            cfg.output_format = f;
        }
        if let Some(d) = self.digits {
            cfg.digits = d;
        }
        if let Some(seed) = self.seed {
            if let Some(v) = cfg.verify.as_mut() {
                v.seed = seed;
            }
        }
        Ok(cfg)
    }

    fn run(&self) -> Result<String, JobError> {
        match &self.command {
            Command::Compute { file } => {
                let cfg = self.load(file)?;
                Ok(render::report(&run_job(&cfg)?, cfg.output_format))
            }
            Command::Verify { file } => {
                let mut cfg = self.load(file)?;
                cfg.verify.get_or_insert_with(|| VerifyConfig {
                    seed: self.seed.unwrap_or(VerifyConfig::default().seed),
                    ..VerifyConfig::default()
                });
                Ok(render::mc(&run_verify(&cfg)?, cfg.output_format))
            }
            Command::Constants { file } => {
                let cfg = self.load(file)?;
                Ok(render::constants(&run_constants(&cfg)?, cfg.output_format))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.run() {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
