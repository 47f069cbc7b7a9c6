//! `hres` — size and benchmark a wind/PV/biogas/battery microgrid from
//! the command line.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use hres_core::bench::{export_report, run_benchmark, BenchProfile, BenchReport};
use hres_core::config::AppConfig;
use hres_core::dispatch::{simulate_year, DesignVector};
use hres_core::economics::{check_constraints, fitness, system_cost};
use hres_core::optimize::{minimize, Algorithm, OptimizerConfig};
use hres_core::seeding;
use hres_core::timeseries::{load_scenario_csv, synth_scenario, write_scenario_csv, ScenarioData};

#[derive(Parser)]
#[command(
    name = "hres",
    version,
    about = "Hybrid renewable energy system sizing toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Configuration file (TOML); built-in defaults apply when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master random seed, overriding the config file
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for generated files
    #[arg(long, default_value = "out", global = true)]
    out_dir: PathBuf,

    /// Budget preset: "desk" (5 runs, pop 50, 100 iterations) or "paper"
    /// (30 runs, pop 150, 300 iterations)
    #[arg(long, global = true)]
    profile: Option<String>,

    /// Comma-separated algorithms (pso,ao,poa,doa,goa,zoa,ooa)
    #[arg(long, global = true, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,

    /// Keep and export hourly trace data where applicable
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a year-long scenario CSV (weather, load, feedstock)
    GenData {
        /// Output CSV path (default: <out-dir>/scenario.csv)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate one design over one scenario year
    Simulate {
        /// PV modules
        #[arg(long)]
        n_pv: u32,
        /// Wind turbines
        #[arg(long)]
        n_wg: u32,
        /// Parallel battery strings
        #[arg(long)]
        n_bat: u32,
        /// PV tilt angle, degrees
        #[arg(long)]
        tilt: f64,
        /// Turbine hub height, metres
        #[arg(long)]
        hub_height: f64,
        /// Biogas engines
        #[arg(long)]
        n_bio: u32,
        /// Scenario CSV; a synthetic year is generated when omitted
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Run one optimization with one algorithm
    Optimize {
        /// Algorithm tag (defaults to the config's optimizer.algorithm)
        #[arg(long)]
        algorithm: Option<String>,
        /// Scenario CSV; a synthetic year is generated when omitted
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Run the full benchmark protocol and export its tables
    Bench {
        /// Scenario CSV; a synthetic year is generated when omitted
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Re-export tables from a stored report.json
    Report {
        /// Path to a report.json produced by `bench`
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        // single line, stable prefix, causes chained with ": "
        eprintln!("hres: error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.global.config {
        Some(path) => AppConfig::load(path)?,
        None => AppConfig::default(),
    };
    if let Some(seed) = cli.global.seed {
        config.optimizer.seed = seed;
    }
    if let Some(profile) = &cli.global.profile {
        let profile: BenchProfile = profile.parse()?;
        let mut scratch = config.bench_config()?;
        profile.apply(&mut scratch);
        config.bench.runs = scratch.runs;
        config.optimizer.population = scratch.optimizer.population;
        config.optimizer.iterations = scratch.optimizer.iterations;
    }
    if let Some(tags) = &cli.global.algorithms {
        let parsed: Result<Vec<Algorithm>, _> = tags.iter().map(|t| t.parse()).collect();
        config.bench.algorithms = parsed?;
    }
    if cli.global.trace {
        config.fitness.simulation.trace = true;
    }

    match &cli.command {
        Command::GenData { out } => gen_data(&config, &cli.global, out.as_deref()),
        Command::Simulate {
            n_pv,
            n_wg,
            n_bat,
            tilt,
            hub_height,
            n_bio,
            scenario,
        } => {
            let design = DesignVector {
                n_pv: *n_pv,
                n_wg: *n_wg,
                n_bat_parallel: *n_bat,
                tilt_deg: *tilt,
                hub_height_m: *hub_height,
                n_bio: *n_bio,
            };
            simulate(&config, &cli.global, design, scenario.as_deref())
        }
        Command::Optimize {
            algorithm,
            scenario,
        } => optimize(&config, &cli.global, algorithm.as_deref(), scenario.as_deref()),
        Command::Bench { scenario } => bench(&config, &cli.global, scenario.as_deref()),
        Command::Report { input } => reexport(&cli.global, input),
    }
}

/// Scenario from a CSV when given, otherwise a synthetic year seeded
/// from the master seed. Returns the data and a label for reports.
fn obtain_scenario(
    config: &AppConfig,
    path: Option<&Path>,
) -> Result<(ScenarioData, String)> {
    match path {
        Some(p) => {
            let data = load_scenario_csv(p, config.site.clone())?;
            let label = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string());
            Ok((data, label))
        }
        None => {
            let seed = seeding::derive_named(config.optimizer.seed, "scenario", 0);
            let data = synth_scenario(&config.site, &config.synthesis, seed)?;
            Ok((data, format!("synthetic(seed={})", config.optimizer.seed)))
        }
    }
}

fn gen_data(config: &AppConfig, global: &GlobalArgs, out: Option<&Path>) -> Result<()> {
    let (scenario, _) = obtain_scenario(config, None)?;
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => global.out_dir.join("scenario.csv"),
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    write_scenario_csv(&scenario, &path)?;
    let annual_load_kwh: f64 = scenario.load.values.iter().sum::<f64>() / 1000.0;
    println!("wrote {}", path.display());
    println!("hours: {}", scenario.load.values.len());
    println!("annual load: {annual_load_kwh:.1} kWh");
    Ok(())
}

fn simulate(
    config: &AppConfig,
    global: &GlobalArgs,
    design: DesignVector,
    scenario_path: Option<&Path>,
) -> Result<()> {
    let (scenario, label) = obtain_scenario(config, scenario_path)?;
    let constraints = check_constraints(&design, &config.catalog);
    let result = simulate_year(
        &design,
        &scenario,
        &config.catalog,
        &config.fitness.simulation,
    )?;
    let cost = system_cost(&design, &config.catalog, &config.econ);

    println!("scenario: {label}");
    println!(
        "design: pv={} wg={} bat_strings={} tilt={:.2} hub={:.2} bio={}",
        design.n_pv,
        design.n_wg,
        design.n_bat_parallel,
        design.tilt_deg,
        design.hub_height_m,
        design.n_bio
    );
    if !constraints.feasible() {
        for v in &constraints.violations {
            println!("constraint violation: {}: {}", v.field, v.message);
        }
    }
    println!("lpsp: {:.6}", result.lpsp);
    println!("demand: {:.3} kWh", result.total_demand_wh / 1000.0);
    println!("served: {:.3} kWh", result.energy_served_wh / 1000.0);
    println!("unmet: {:.3} kWh", result.total_unmet_wh / 1000.0);
    println!("surplus: {:.3} kWh", result.total_surplus_wh / 1000.0);
    println!(
        "generation: wind={:.3} kWh pv={:.3} kWh biogas={:.3} kWh",
        result.generation_by_source_wh.wind_wh / 1000.0,
        result.generation_by_source_wh.pv_wh / 1000.0,
        result.generation_by_source_wh.biogas_wh / 1000.0
    );
    println!("final soc: {:.4}", result.final_soc);
    println!("system cost: {cost:.2} USD");

    if let Some(traces) = &result.hourly_traces {
        fs::create_dir_all(&global.out_dir)
            .with_context(|| format!("creating {}", global.out_dir.display()))?;
        let path = global.out_dir.join("trace.csv");
        let mut text = String::from(
            "hour,wind_w,pv_w,bio_w,load_w,soc,charge_wh,discharge_wh,unmet_wh,surplus_wh\n",
        );
        for t in traces {
            text.push_str(&format!(
                "{},{:.3},{:.3},{:.3},{:.3},{:.6},{:.3},{:.3},{:.3},{:.3}\n",
                t.hour,
                t.wind_w,
                t.pv_w,
                t.bio_w,
                t.load_w,
                t.soc,
                t.charge_wh,
                t.discharge_wh,
                t.unmet_wh,
                t.surplus_wh
            ));
        }
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        println!("trace: {}", path.display());
    }
    Ok(())
}

fn optimize(
    config: &AppConfig,
    global: &GlobalArgs,
    algorithm: Option<&str>,
    scenario_path: Option<&Path>,
) -> Result<()> {
    let algorithm = match algorithm {
        Some(tag) => tag.parse()?,
        None => config.optimizer.algorithm,
    };
    let (scenario, label) = obtain_scenario(config, scenario_path)?;
    let space = config.space.to_search_space()?;
    let run_config = OptimizerConfig {
        algorithm,
        ..config.optimizer.clone()
    };
    let objective = |x: &[f64]| -> f64 {
        match fitness(
            &DesignVector::from_position(x),
            &scenario,
            &config.catalog,
            &config.econ,
            &config.fitness,
        ) {
            Ok(v) => v,
            Err(_) => f64::INFINITY,
        }
    };
    let result = minimize(objective, &space, &run_config)?;
    let best = DesignVector::from_position(&result.best_position);
    let sim = simulate_year(
        &best,
        &scenario,
        &config.catalog,
        &config.fitness.simulation,
    )?;

    println!("scenario: {label}");
    println!("algorithm: {algorithm}");
    println!("seed: {}", run_config.seed);
    println!("best objective: {:.2} USD", result.best_fitness);
    println!(
        "best design: pv={} wg={} bat_strings={} tilt={:.2} hub={:.2} bio={}",
        best.n_pv, best.n_wg, best.n_bat_parallel, best.tilt_deg, best.hub_height_m, best.n_bio
    );
    println!(
        "system cost: {:.2} USD",
        system_cost(&best, &config.catalog, &config.econ)
    );
    println!("lpsp: {:.6}", sim.lpsp);
    println!("evaluations: {}", result.evaluations);
    println!("wall time: {:.2} s", result.wall_time_s);

    fs::create_dir_all(&global.out_dir)
        .with_context(|| format!("creating {}", global.out_dir.display()))?;
    let path = global.out_dir.join(format!("optimize_{algorithm}.csv"));
    let mut text = String::from("iteration,best_cost_usd\n");
    for (i, v) in result.convergence.iter().enumerate() {
        text.push_str(&format!("{},{:.6}\n", i + 1, v));
    }
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("convergence: {}", path.display());
    Ok(())
}

fn bench(config: &AppConfig, global: &GlobalArgs, scenario_path: Option<&Path>) -> Result<()> {
    let (scenario, label) = obtain_scenario(config, scenario_path)?;
    let mut bench_config = config.bench_config()?;
    bench_config.scenario = label;
    let report = run_benchmark(&bench_config, &scenario, &config.catalog, &config.econ)?;
    let files = export_report(&report, &global.out_dir)?;

    let winner = report
        .algorithms
        .iter()
        .min_by(|a, b| a.best_cost_usd.total_cmp(&b.best_cost_usd))
        .ok_or_else(|| anyhow!("benchmark produced no algorithm summaries"))?;
    println!(
        "benchmark: {} algorithms x {} runs (pop {}, {} iterations)",
        report.algorithms.len(),
        report.runs,
        report.population,
        report.iterations
    );
    println!(
        "best: {} at {:.2} USD (lpsp {:.6})",
        winner.algorithm, winner.best_cost_usd, winner.best_lpsp
    );
    println!("wall time: {:.2} s", report.wall_time_s);
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn reexport(global: &GlobalArgs, input: &Path) -> Result<()> {
    let text = fs::read_to_string(input)
        .with_context(|| format!("reading {}", input.display()))?;
    let report: BenchReport = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", input.display()))?;
    let files = export_report(&report, &global.out_dir)?;
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
