use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use attitude_observer::reconstruct::{reconstruct, ReferenceBasis};
use attitude_observer::scenario::{paper_preset, run_scenario};
use attitude_observer::{Mat3, ScenarioConfig, Summary, Vec3};

#[derive(Parser)]
#[command(name = "attitude-observer", version, about = "Attitude and gyro-bias observer from vector measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write the CSV trace.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in reference scenario.
    PaperSim {
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the Lyapunov certificate for a scenario's gains and references.
    Certify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rebuild the attitude from one pair of estimated vectors.
    Project {
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        alpha: Vec3,
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        beta: Vec3,
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the reference scenario as TOML, a starting point for custom configs.
    PrintPreset,
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got {s:?}"));
    }
    let mut v = Vec3::zeros();
    for (slot, p) in v.iter_mut().zip(&parts) {
        let x: f64 = p.trim().parse().map_err(|e| format!("{p:?}: {e}"))?;
        if !x.is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
        *slot = x;
    }
    Ok(v)
}

fn load(path: &Path) -> anyhow::Result<ScenarioConfig> {
    ScenarioConfig::from_path(path).with_context(|| format!("reading {}", path.display()))
}

fn simulate(config: &ScenarioConfig, out: &Path) -> anyhow::Result<Summary> {
    let file = File::create(out).with_context(|| format!("creating {}", out.display()))?;
    Ok(run_scenario(config, file)?)
}

fn print_matrix(name: &str, m: &Mat3) {
    println!("{name}:");
    for r in 0..3 {
        println!("  {:>24.16e} {:>24.16e} {:>24.16e}", m[(r, 0)], m[(r, 1)], m[(r, 2)]);
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate { config, seed, out } => {
            let mut cfg = load(&config)?;
            cfg.seed = seed;
            cfg.validate()?;
            println!("{}", simulate(&cfg, &out)?);
        }
        Command::PaperSim { out } => println!("{}", simulate(&paper_preset(), &out)?),
        Command::Certify { config } => {
            let cfg = load(&config)?;
            let Some(cert) = cfg.certificate()? else {
                bail!("{}: no [certificate] section", config.display());
            };
            let p = &cert.params;
            println!("mu = {:.16e}", p.mu);
            println!("epsilon = {:.16e}", p.epsilon);
            println!("sigma1 = {:.16e}", p.sigma1);
            println!("sigma2 = {:.16e}", p.sigma2);
            println!("c_omega = {:.16e}", p.c_omega);
            for (name, value) in cert.coefficients.named() {
                println!("{name} = {value:.16e}");
            }
            println!("all_positive = {}", cert.coefficients.all_positive());
        }
        Command::Project { alpha, beta, config } => {
            let cfg = load(&config)?;
            let basis = ReferenceBasis::new(cfg.references.alpha_i, cfg.references.beta_i)?;
            let rec = reconstruct(&alpha, &beta, &basis);
            print_matrix("R_tilde", &rec.r_tilde);
            print_matrix("R_hat", rec.r_hat.matrix());
            println!("degenerate = {:?}", rec.degenerate);
        }
        Command::PrintPreset => print!("{}", paper_preset().to_toml_string()?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
