use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use viscoshell::scenario::config::{CaseConfig, ScenarioConfig};
use viscoshell::scenario::output::{ensure_dir, write_rows, write_toml};
use viscoshell::scenario::run::run_point;
use viscoshell::scenario::{output, study};
use viscoshell::{Error, Result};

#[derive(Parser)]
#[command(name = "viscoshell", version, about = "Viscoelastic Kirchhoff-Love shell scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its time series and summary.
    Run(Common),
    /// Run the configured convergence study and write error tables.
    Converge(Common),
    /// Run the scenario's homogeneous program with the material-point driver.
    Point(Common),
    /// Run the cyclic frequency sweep and write the dissipation table.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the time step.
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<f64>,
    /// Override the end time.
    #[arg(long, allow_hyphen_values = true)]
    tend: Option<f64>,
    /// Worker threads for parallel sweeps and assembly.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::load(&self.config)?;
        if let Some(dt) = self.dt {
            cfg.time.dt = dt;
        }
        if let Some(t) = self.tend {
            cfg.time.t_end = t;
        }
        cfg.validate()?;
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        }
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(c) => {
            let cfg = c.load()?;
            let (s, csv) = output::run_case(&cfg, &c.out)?;
            println!(
                "{}: {} steps, max Newton iterations {}, max local iterations {}, split defect {:.1e}, D = {:.6e} -> {}",
                s.name,
                s.steps,
                s.max_newton_iterations,
                s.max_local_iterations,
                s.max_split_defect,
                s.final_dissipation,
                csv.display()
            );
        }
        Command::Converge(c) => {
            let cfg = c.load()?;
            let table = study::convergence_study(&cfg)?;
            study::write_study(&table, &c.out)?;
            for p in &table.points {
                let errs: Vec<String> = p.errors.iter().map(|e| format!("{e:.4e}")).collect();
                println!("dt = {:.1e}  elements = {:4}  {}", p.dt, p.elements, errs.join("  "));
            }
            for (n, o) in table.error_names.iter().zip(&table.orders) {
                println!("order({n}) = {o:.3}");
            }
            println!("variation = {:.3}", table.variation);
        }
        Command::Point(c) => {
            let cfg = c.load()?;
            let program = match &cfg.case {
                CaseConfig::Point { program } | CaseConfig::Membrane { program, .. } => program.to_program(cfg.time.t_end)?,
                _ => return Err(Error::UnsupportedStudy(format!("`{}` has no homogeneous program", cfg.name))),
            };
            let out = run_point(&cfg.name, &program, &cfg.material, cfg.time.dt, cfg.time.t_end)?;
            ensure_dir(&c.out)?;
            let csv = c.out.join(format!("{}_point.csv", cfg.name));
            write_rows(&csv, &out.rows, cfg.output.every)?;
            write_toml(&c.out.join(format!("{}_point_summary.toml", cfg.name)), &out.summary)?;
            println!("{}: {} steps -> {}", cfg.name, out.summary.steps, csv.display());
        }
        Command::Sweep(c) => {
            let cfg = c.load()?;
            let table = study::sweep(&cfg)?;
            study::write_sweep(&cfg.name, &table, &c.out)?;
            for (eta, d) in table.eta_s.iter().zip(&table.dissipation) {
                let (k, dmax) = d.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (k, &v)| if v > a.1 { (k, v) } else { a });
                println!("eta_s = {eta}: peak D = {dmax:.4e} at omega = {:.4e}", table.omegas[k]);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{:?}]: {e}", e.category());
            ExitCode::from(e.category().exit_code() as u8)
        }
    }
}
