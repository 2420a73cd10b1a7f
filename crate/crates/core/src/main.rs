use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use gbopt::config::RunConfig;
use gbopt::geometry::{Architecture, GearboxDesign};
use gbopt::mass::BearingModel;
use gbopt::report::{run_sweep, write_outputs};
use gbopt::search::evaluate;
use gbopt::sheet::DimensionSheet;

#[derive(Parser)]
#[command(name = "gbopt", version, about = "Planetary gearbox design-space search for outer-rotor motors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search every ratio bin for both architectures and write reports
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated subset, e.g. `isspg` or `isspg,esspg`
        #[arg(long, value_delimiter = ',')]
        architectures: Option<Vec<Architecture>>,
        /// Output directory; overrides the config
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write every evaluated design to candidates.csv
        #[arg(long)]
        log_candidates: bool,
    },
    /// Evaluate one design vector and print the result as JSON
    Eval {
        #[arg(long)]
        config: PathBuf,
        /// `Ns,Np,Nr,m,np,arch`, e.g. `20,40,100,0.5,3,isspg`
        #[arg(long)]
        design: String,
    },
    /// Fit the bearing model to a table and print fit quality and residuals
    FitBearings {
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

fn parse_design(s: &str) -> Result<GearboxDesign> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [ns, np, nr, m, planets, arch] = parts.as_slice() else {
        bail!("expected Ns,Np,Nr,m,np,arch, got `{s}`");
    };
    let teeth = |v: &str, name: &str| v.parse::<u32>().with_context(|| format!("{name} `{v}` is not a tooth count"));
    let design = GearboxDesign::new(
        arch.parse::<Architecture>().map_err(anyhow::Error::msg)?,
        teeth(ns, "Ns")?,
        teeth(np, "Np")?,
        teeth(nr, "Nr")?,
        m.parse::<f64>().with_context(|| format!("module `{m}` is not a number"))?,
        teeth(planets, "np")?,
    )?;
    Ok(design)
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("GBOPT_THREADS") {
        let n: usize = v.parse().with_context(|| format!("GBOPT_THREADS=`{v}` is not a positive integer"))?;
        if n == 0 {
            bail!("GBOPT_THREADS must be at least 1");
        }
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep { config, architectures, out, log_candidates } => {
            let cfg = RunConfig::load(&config)?;
            let archs = architectures.map(|a| Architecture::ALL.into_iter().filter(|x| a.contains(x)).collect::<Vec<_>>());
            let output = thread_pool()?.install(|| run_sweep(&cfg, archs.as_deref()))?;
            let dir = out.unwrap_or_else(|| config.parent().unwrap_or(std::path::Path::new(".")).join(&cfg.sweep.output_dir));
            let written = write_outputs(&output, &dir, log_candidates)?;
            for s in &output.report.sweeps {
                let filled = s.bins.iter().filter(|b| b.best.is_some()).count();
                println!("{}: {} designs evaluated, {filled}/{} bins filled", s.arch, s.enumerated, s.bins.len());
            }
            println!("wrote {} files to {}", written.len(), dir.display());
        }
        Command::Eval { config, design } => {
            let cfg = RunConfig::load(&config)?;
            let problem = cfg.problem()?;
            let d = parse_design(&design)?;
            let ev = evaluate(&d, &problem);
            println!("{}", serde_json::to_string_pretty(&ev)?);
            if ev.feasible {
                let sheet = DimensionSheet::from_evaluation(&ev, &problem)?;
                println!("{}", serde_json::to_string_pretty(&sheet)?);
            }
        }
        Command::FitBearings { table } => {
            let model = match &table {
                Some(p) => BearingModel::from_path(p)?,
                None => BearingModel::embedded(),
            };
            for (name, fit) in [("mass_kg", model.mass_fit), ("od_mm", model.od_fit), ("width_mm", model.width_fit)] {
                println!(
                    "{name:>9} = {:.6e} * bore^{:.4}   R2(log) = {:.4}   R2(linear) = {:.4}",
                    fit.coefficient, fit.exponent, fit.r2_log, fit.r2_linear
                );
            }
            println!("\n{:>8} {:>10} {:>10} {:>9}", "bore_mm", "mass_kg", "fit_kg", "resid_%");
            for (row, r) in model.table.iter().zip(model.mass_residuals()) {
                println!("{:>8} {:>10.4} {:>10.4} {:>9.1}", row.bore_mm, row.mass_kg, model.mass_fit.eval(row.bore_mm), 100.0 * r);
            }
        }
    }
    Ok(())
}
