use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use hog_core::harness::study::{convergence_rows, summary_row, write_rows, write_rows_to};
use hog_core::harness::{
    run_benchmark, run_config, run_convergence_study, run_reproducibility_check, RunConfig,
    RunSummary,
};
use hog_core::HydroError;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Check {
    Convergence,
    Benchmark,
    Repro,
}

/// Patch-based ADER-WENO solver for the 3D compressible Euler equations.
#[derive(Debug, Parser)]
#[command(name = "hog-hydro", version)]
struct Cli {
    /// key = value file; command-line flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["vortex", "sod", "constant"])]
    problem: Option<String>,
    #[arg(long, value_parser = ["2", "3"])]
    order: Option<String>,
    #[arg(long, value_parser = ["ader", "rk2", "rk3"])]
    integrator: Option<String>,
    #[arg(long, value_parser = ["rusanov", "hll"])]
    riemann: Option<String>,
    #[arg(long, value_parser = ["skinny", "full"])]
    strategy: Option<String>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    nz: Option<usize>,
    /// patch decomposition, e.g. 2x2x1
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long, conflicts_with = "steps")]
    tfinal: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
    /// CSV output path
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// worker threads (0: all cores)
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum)]
    check: Option<Check>,
    /// mesh sizes for --check convergence
    #[arg(long, value_delimiter = ',', default_value = "24,48")]
    meshes: Vec<usize>,
    /// worker count of the parallel run in --check repro
    #[arg(long, default_value_t = 4)]
    repro_workers: usize,
}

impl Cli {
    fn run_config(&self) -> Result<RunConfig, HydroError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let overrides: [(&str, Option<String>); 15] = [
            ("problem", self.problem.clone()),
            ("order", self.order.clone()),
            ("integrator", self.integrator.clone()),
            ("riemann", self.riemann.clone()),
            ("strategy", self.strategy.clone()),
            ("nx", self.nx.map(|v| v.to_string())),
            ("ny", self.ny.map(|v| v.to_string())),
            ("nz", self.nz.map(|v| v.to_string())),
            ("split", self.split.clone()),
            ("cfl", self.cfl.map(|v| v.to_string())),
            ("tfinal", self.tfinal.map(|v| v.to_string())),
            ("steps", self.steps.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("workers", self.workers.map(|v| v.to_string())),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                cfg.set(key, &value)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_summary(s: &RunSummary) {
    println!("steps {}  t = {:.6}  wall {:.3} s  {:.3e} zones/s", s.steps, s.t, s.wall.as_secs_f64(), s.zones_per_sec);
    if let Some(e) = s.error {
        println!("density L1 = {:.4e}  Linf = {:.4e}", e.l1[0], e.linf[0]);
    }
    let stages: Vec<String> = s
        .profile
        .seconds()
        .iter()
        .map(|(name, secs)| format!("{name} {secs:.3}"))
        .collect();
    println!("stage seconds: {}", stages.join(", "));
    println!("predictor fraction {:.3}", s.profile.predictor_fraction());
    println!(
        "ledger ({}): {} up, {} down, {} scalars up, {} up without ghosts",
        s.ledger.strategy, s.ledger.uploads, s.ledger.downloads, s.ledger.scalar_uploads, s.ledger.active_uploads
    );
    println!("riemann solves {}  degenerate fans {}", s.faces.calls, s.faces.degenerate_fans);
    let drift = s.conservation.iter().cloned().fold(0.0, f64::max);
    println!("conservation drift {drift:.2e}");
}

fn emit(cfg: &RunConfig, rows: &[hog_core::harness::study::Row]) -> Result<(), HydroError> {
    match &cfg.out {
        Some(path) => write_rows_to(path, rows),
        None => write_rows(std::io::stdout().lock(), rows),
    }
}

fn run(cli: &Cli) -> Result<(), HydroError> {
    let cfg = cli.run_config()?;
    match cli.check {
        None => {
            let (summary, _) = run_config(&cfg)?;
            print_summary(&summary);
            if cfg.out.is_some() {
                emit(&cfg, &[summary_row(0, &cfg, &summary, None)])?;
            }
        }
        Some(Check::Benchmark) => {
            let summary = run_benchmark(&cfg)?;
            print_summary(&summary);
            emit(&cfg, &[summary_row(0, &cfg, &summary, None)])?;
        }
        Some(Check::Convergence) => {
            let entries = run_convergence_study(&cfg, &cli.meshes)?;
            for e in &entries {
                let err = e.summary.error.expect("vortex error");
                match e.order {
                    Some(o) => println!("n = {:4}  density L1 = {:.4e}  order {o:.3}", e.n, err.l1[0]),
                    None => println!("n = {:4}  density L1 = {:.4e}", e.n, err.l1[0]),
                }
            }
            emit(&cfg, &convergence_rows(&cfg, &entries))?;
        }
        Some(Check::Repro) => {
            let r = run_reproducibility_check(&cfg, cli.repro_workers)?;
            println!("serial runs: max difference {:e}", r.serial_max_diff);
            println!(
                "1 vs {} workers: density L1 difference {:e}, max {:e}",
                r.workers, r.parallel_l1_diff, r.parallel_max_diff
            );
        }
    }
    Ok(())
}

fn exit_code(e: &HydroError) -> u8 {
    match e {
        HydroError::Config(_) => 2,
        HydroError::Shape { .. } => 3,
        HydroError::Unphysical { .. } => 4,
        HydroError::Reproducibility(_) => 5,
        HydroError::Io(_) | HydroError::Csv(_) => 6,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
