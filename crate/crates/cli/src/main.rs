//! Command-line harness: run experiment sweeps, validate configurations and
//! inspect the material database.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dmabeam::config::build_array_geometry;
use dmabeam::harness::{
    aggregate, emit_outputs, run_experiment, ExperimentConfig, Method, SweepVariable,
};
use dmabeam::MaterialDb64;

#[derive(Parser)]
#[command(name = "dmabeam", version, about = "Energy beamforming experiments for DMA wireless power transfer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON configuration file.
    Run(RunArgs),
    /// Check a configuration file and print the resolved sweep plan.
    Validate {
        /// Path to the configuration file.
        config: PathBuf,
        /// Extra material database merged over the built-in table.
        #[arg(long)]
        materials: Option<PathBuf>,
    },
    /// Material database commands.
    Materials {
        #[command(subcommand)]
        command: MaterialsCommand,
    },
}

#[derive(Subcommand)]
enum MaterialsCommand {
    /// List the known microstrip materials.
    List {
        /// Extra material database merged over the built-in table.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Path to the configuration file.
    config: PathBuf,
    /// Override the sweep, e.g. `frequency=2e9,10e9,20e9` or
    /// `antenna_length=0.05,0.10,0.15`.
    #[arg(long)]
    sweep: Option<String>,
    /// Override the method list, e.g. `EB_ASD,FD,MRT_BOUND`.
    #[arg(long)]
    methods: Option<String>,
    /// Override the base RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the number of realizations per sweep point.
    #[arg(long)]
    realizations: Option<usize>,
    /// Extra material database merged over the built-in table.
    #[arg(long)]
    materials: Option<PathBuf>,
}

fn load_materials(extra: Option<&PathBuf>) -> Result<MaterialDb64> {
    let mut db = MaterialDb64::builtin();
    if let Some(path) = extra {
        let user = MaterialDb64::from_path(path)
            .with_context(|| format!("loading materials from {}", path.display()))?;
        db.extend_from(user);
    }
    Ok(db)
}

fn parse_methods(spec: &str) -> Result<Vec<Method>> {
    spec.split(',')
        .map(|m| match m.trim() {
            "EB_ASD" => Ok(Method::EbAsd),
            "PSO" => Ok(Method::Pso),
            "FD" => Ok(Method::Fd),
            "MRT_BOUND" => Ok(Method::MrtBound),
            other => bail!("unknown method '{other}' (expected EB_ASD, PSO, FD or MRT_BOUND)"),
        })
        .collect()
}

fn apply_overrides(config: &mut ExperimentConfig, args: &RunArgs) -> Result<()> {
    if let Some(sweep) = &args.sweep {
        let (variable, values) = sweep
            .split_once('=')
            .context("--sweep expects `variable=v1,v2,...`")?;
        config.sweep_variable = match variable.trim() {
            "frequency" => SweepVariable::Frequency,
            "antenna_length" => SweepVariable::AntennaLength,
            "none" => SweepVariable::None,
            other => bail!("unknown sweep variable '{other}'"),
        };
        config.sweep_values = values
            .split(',')
            .map(|v| v.trim().parse::<f64>().context("sweep values must be numbers"))
            .collect::<Result<_>>()?;
    }
    if let Some(methods) = &args.methods {
        config.methods = parse_methods(methods)?;
    }
    if let Some(seed) = args.seed {
        config.base.rng_seed = seed;
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    if let Some(realizations) = args.realizations {
        config.base.realizations = realizations;
    }
    Ok(())
}

fn run(args: &RunArgs) -> Result<()> {
    let mut config = ExperimentConfig::from_path(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))?;
    apply_overrides(&mut config, args)?;
    let db = load_materials(args.materials.as_ref())?;
    config.validate(&db).context("invalid configuration")?;

    let outcome = run_experiment(&config, &db)?;
    let summary = aggregate(&outcome.records);
    let files = emit_outputs(&outcome, &summary, &config, &config.output_dir)?;

    let feasible = outcome.records.iter().filter(|r| r.feasible).count();
    println!(
        "{} records ({} feasible) across {} sweep point(s)",
        outcome.records.len(),
        feasible,
        config.sweep_points().len()
    );
    if outcome.near_field_violations > 0 {
        println!(
            "note: {} user draw(s) fell outside the radiating near field",
            outcome.near_field_violations
        );
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn validate(config_path: &PathBuf, materials: Option<&PathBuf>) -> Result<()> {
    let config = ExperimentConfig::from_path(config_path)
        .with_context(|| format!("loading {}", config_path.display()))?;
    let db = load_materials(materials)?;
    config.validate(&db).context("invalid configuration")?;

    println!("configuration ok: {}", config_path.display());
    println!("  material:     {}", config.material_name);
    println!("  methods:      {}", config.methods.iter().map(|m| m.label()).collect::<Vec<_>>().join(", "));
    println!("  realizations: {}", config.base.realizations);
    println!("  users:        {}", config.base.num_users);
    for point in config.sweep_points() {
        let geometry = build_array_geometry(&point)?;
        println!(
            "  point f={:.3} GHz, L={:.3} m -> {} waveguides x {} elements = {}",
            point.frequency_hz / 1e9,
            point.antenna_length_m,
            geometry.num_waveguides,
            geometry.elements_per_waveguide,
            geometry.total_elements
        );
    }
    Ok(())
}

fn list_materials(extra: Option<&PathBuf>) -> Result<()> {
    let db = load_materials(extra)?;
    println!(
        "{:<28} {:>6} {:>9} {:>12} {:>12} {:>12}",
        "name", "eps_r", "loss_tan", "thickness_m", "width_m", "sigma_S_m"
    );
    for m in db.iter() {
        println!(
            "{:<28} {:>6} {:>9} {:>12} {:>12} {:>12.3e}",
            m.name,
            m.dielectric_constant,
            m.loss_tangent,
            m.substrate_thickness_m,
            m.conductor_width_m,
            m.conductivity_s_per_m
        );
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Validate { config, materials } => validate(config, materials.as_ref()),
        Command::Materials {
            command: MaterialsCommand::List { file },
        } => list_materials(file.as_ref()),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
