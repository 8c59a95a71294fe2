use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use posefollow::sim::{metrics, preset_by_name, run_closed_loop, SimConfig, PRESET_NAMES};

#[derive(Parser)]
#[command(name = "posefollow", version, about = "Closed-loop pose-following simulator")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Applied on top of every loaded or preset config.
#[derive(Args)]
struct Overrides {
    /// Integration step in seconds.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Seed for random initial poses. Has no other effect.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Export sampling rate in Hz.
    #[arg(long, global = true)]
    export_rate: Option<f64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut SimConfig) {
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(rate) = self.export_rate {
            cfg.export_rate = rate;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one config file and write `<name>.csv`, `<name>.json` and `<name>.config.json`.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every config of a built-in experiment.
    Preset {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run_one(cfg: &SimConfig, out: &Path) -> Result<()> {
    let record = run_closed_loop(cfg).with_context(|| format!("run '{}' failed", cfg.name))?;
    let summary = metrics(&record, &cfg.convergence);

    let csv_path = out.join(format!("{}.csv", cfg.name));
    let file = fs::File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    record.write_csv(std::io::BufWriter::new(file))?;

    let json_path = out.join(format!("{}.json", cfg.name));
    fs::write(&json_path, serde_json::to_string_pretty(&summary)?)
        .with_context(|| format!("writing {}", json_path.display()))?;
    fs::write(out.join(format!("{}.config.json", cfg.name)), cfg.to_json_pretty())?;
    log::info!(
        "{}: {} samples, convergence {:?}, max d_perp {:.4}",
        cfg.name,
        summary.samples,
        summary.convergence_time,
        summary.max_d_perp
    );
    Ok(())
}

fn run_all(configs: &[SimConfig], out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let results: Vec<Result<()>> = thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|cfg| s.spawn(move || run_one(cfg, out))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut failed = 0;
    for r in results {
        if let Err(e) = r {
            log::error!("{e:#}");
            failed += 1;
        }
    }
    anyhow::ensure!(failed == 0, "{failed} of {} runs failed", configs.len());
    for cfg in configs {
        println!("{}", out.join(format!("{}.csv", cfg.name)).display());
    }
    Ok(())
}

fn load(path: &Path, overrides: &Overrides) -> Result<SimConfig> {
    let mut cfg = SimConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    overrides.apply(&mut cfg);
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config, out } => {
            load(config, &cli.overrides).and_then(|cfg| run_all(std::slice::from_ref(&cfg), out))
        }
        Command::Preset { name, out } => preset_by_name(name)
            .map_err(anyhow::Error::from)
            .and_then(|mut configs| {
                configs.iter_mut().for_each(|c| cli.overrides.apply(c));
                run_all(&configs, out)
            }),
        Command::Validate { config } => load(config, &cli.overrides).and_then(|cfg| {
            let scenario = cfg.scenario()?;
            println!(
                "ok: {} ({} steps, {} per export, hash {})",
                cfg.name,
                scenario.total_steps,
                scenario.steps_per_export,
                cfg.hash()
            );
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
