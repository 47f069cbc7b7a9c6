//! Release acceptance suite. Every gate the toolkit must clear before its
//! numbers are trusted, in one target: cross-checks of the cost-comparison
//! arithmetic against the reference result set, constraint consistency of
//! the reference designs, component equations against hand-computed values,
//! conservation and reliability properties of the year simulation, optimizer
//! equivalence with an exhaustive search on a small instance, convergence
//! floors on a classic test function, and full-protocol reproducibility.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hres_core::bench::{
    export_report, percent_difference, run_benchmark, BenchConfig, BenchProfile,
};
use hres_core::components::{BatteryBank, ComponentCatalog, VocTempModel};
use hres_core::config::AppConfig;
use hres_core::dispatch::{simulate_year, soc_step, DesignVector, SimulationOptions};
use hres_core::economics::{check_constraints, fitness, EconConfig, FitnessConfig};
use hres_core::optimize::{minimize, Algorithm, OptimizerConfig, SearchSpace};
use hres_core::seeding;
use hres_core::solar::{
    beam_ratio, declination, diffuse_fraction, hour_angle, tilted_irradiance, SolarAngles,
    TranspositionConvention,
};
use hres_core::timeseries::{synth_scenario, ScenarioData, SiteConfig, SynthesisParams};

/// Best costs of the reference result set, USD over the 25-year horizon.
fn reference_costs() -> BTreeMap<Algorithm, f64> {
    BTreeMap::from([
        (Algorithm::Pso, 4_399_402.5),
        (Algorithm::Ao, 4_375_318.69),
        (Algorithm::Poa, 4_276_504.73),
        (Algorithm::Doa, 4_394_996.11),
        (Algorithm::Goa, 4_284_792.80),
        (Algorithm::Zoa, 4_551_329.74),
        (Algorithm::Ooa, 4_440_412.0),
    ])
}

#[test]
fn percent_difference_reproduces_reference_column() {
    let reported = [
        (Algorithm::Pso, 2.87),
        (Algorithm::Ao, 2.31),
        (Algorithm::Poa, 0.0),
        (Algorithm::Doa, 2.76),
        (Algorithm::Goa, 0.19),
        (Algorithm::Zoa, 6.43),
        (Algorithm::Ooa, 3.85),
    ];
    let diffs = percent_difference(&reference_costs()).expect("valid cost table");
    for (alg, want) in reported {
        let got = diffs[&alg];
        assert!(
            (got - want).abs() <= 0.01 + 1e-9,
            "{alg}: cost column recomputes to {got}%, reference table lists {want}%"
        );
    }
}

/// The seven best designs of the reference result set, in the toolkit's
/// design-vector order.
fn reference_designs() -> Vec<(Algorithm, DesignVector)> {
    let d = |n_wg, n_pv, n_bat, tilt, hub, n_bio| DesignVector {
        n_pv,
        n_wg,
        n_bat_parallel: n_bat,
        tilt_deg: tilt,
        hub_height_m: hub,
        n_bio,
    };
    vec![
        (Algorithm::Pso, d(15, 125, 3427, 18.0, 22.0, 6)),
        (Algorithm::Ao, d(14, 168, 3381, 13.1, 16.0, 10)),
        (Algorithm::Poa, d(19, 69, 3343, 31.4, 11.3, 9)),
        (Algorithm::Doa, d(18, 267, 3338, 8.2, 12.4, 8)),
        (Algorithm::Goa, d(19, 46, 3362, 51.6, 12.6, 10)),
        (Algorithm::Zoa, d(12, 159, 3547, 14.4, 13.0, 3)),
        (Algorithm::Ooa, d(63, 79, 3367, 23.6, 14.7, 5)),
    ]
}

#[test]
fn reference_designs_satisfy_sizing_constraints() {
    let catalog = ComponentCatalog::default();
    for (alg, design) in reference_designs() {
        let report = check_constraints(&design, &catalog);
        assert!(
            report.feasible(),
            "{alg} reference design should pass all sizing constraints, got {:?}",
            report.violations
        );
    }
}

#[test]
fn component_equations_match_hand_oracle() {
    let catalog = ComponentCatalog::default();
    let site = SiteConfig::default();

    // Wind turbine power curve, W/m² of rotor.
    let wind = &catalog.wind;
    assert!((wind.specific_power_w_m2(7.0) - 55.06).abs() < 0.05);
    assert!((wind.specific_power_w_m2(11.0) - 221.24).abs() < 0.01);
    // Whole-machine electrical output.
    assert!((wind.electric_power_w(7.0, 1) - 224.0).abs() < 0.5);
    assert!((wind.electric_power_w(11.0, 19) - 17_101.0).abs() < 5.0);

    // Vertical shear extrapolation from the 33 m reference height.
    assert!((site.wind_speed_at_height(5.0, 40.0) - 5.146).abs() < 0.005);
    assert!((site.wind_speed_at_height(5.0, 11.0) - 4.240).abs() < 0.005);

    // Solar geometry.
    assert!((declination(172).unwrap() - 23.45).abs() < 0.01);
    assert!((declination(1).unwrap() - (-23.01)).abs() < 0.01);
    assert_eq!(hour_angle(10.0).unwrap(), -30.0);
    assert_eq!(hour_angle(18.0).unwrap(), 90.0);

    let noon_equinox = SolarAngles {
        declination_deg: 0.0,
        hour_angle_deg: 0.0,
        latitude_deg: 24.0,
        tilt_deg: 30.0,
    };
    let rb = beam_ratio(&noon_equinox, TranspositionConvention::PlusTilt).unwrap();
    assert!((rb - 0.6434).abs() < 0.0005, "noon equinox beam ratio {rb}");
    let summer_morning = SolarAngles {
        declination_deg: 23.45,
        hour_angle_deg: 30.0,
        ..noon_equinox
    };
    let rb = beam_ratio(&summer_morning, TranspositionConvention::PlusTilt).unwrap();
    assert!((rb - 0.8888).abs() < 0.0005, "summer morning beam ratio {rb}");

    assert!((diffuse_fraction(0.1).unwrap() - 0.991).abs() < 1e-9);
    assert!((diffuse_fraction(0.5).unwrap() - 0.6592).abs() < 0.0005);
    assert!((diffuse_fraction(0.9).unwrap() - 0.165).abs() < 1e-9);

    let poa = tilted_irradiance(800.0, 200.0, 1.1, 30.0, 0.2).unwrap();
    assert!((poa - 857.3).abs() < 0.1, "tilted plane irradiance {poa}");

    // PV thermal/electrical model.
    let pv = &catalog.pv;
    assert_eq!(pv.cell_temperature_c(25.0, 1000.0), 52.0);
    assert!((pv.cell_temperature_c(30.0, 800.0) - 51.6).abs() < 1e-9);
    assert!((pv.fill_factor() - 0.7927).abs() < 0.0005);
    let p1 = pv.module_power_w(25.0, 1000.0, VocTempModel::Absolute);
    assert!((p1 - 279.4).abs() < 0.5, "module output {p1}");
    let p69 = pv.array_power_w(25.0, 1000.0, 69, VocTempModel::Absolute);
    assert!((p69 - 18_315.0).abs() < 20.0, "69-module array output {p69}");
    let p_single = pv.array_power_w(25.0, 1000.0, 1, VocTempModel::Absolute);
    assert!((p_single - 265.4).abs() < 0.5);

    // Biogas chain: feedstock → gas → electricity, with digester and
    // nameplate caps.
    let bio = &catalog.biogas;
    assert_eq!(bio.daily_gas_volume_m3(100.0), 5.0);
    assert_eq!(bio.daily_gas_volume_m3(500.0), 22.183);
    assert!((bio.electric_power_w(1.0, 10) - 1639.5).abs() < 1.0);
    assert_eq!(bio.electric_power_w(10.0, 3), 9000.0);

    // Battery bank layout and idle drift.
    let battery = &catalog.battery;
    let bank = BatteryBank::layout(battery, 3343, 24.0).unwrap();
    assert_eq!(bank.total_capacity_ah, 1_193_451.0);
    let step = soc_step(0.5, 0.0, 1.0, &bank, battery).unwrap();
    assert!((step.soc_new - 0.499_958).abs() < 1e-6, "idle drift {}", step.soc_new);
    assert_eq!(step.charged_wh, 0.0);
    assert_eq!(step.discharged_wh, 0.0);
    assert_eq!(step.unmet_wh, 0.0);
    assert_eq!(step.surplus_wh, 0.0);
}

fn scenario_with_seed(seed: u64) -> ScenarioData {
    synth_scenario(&SiteConfig::default(), &SynthesisParams::default(), seed)
        .expect("default synthesis parameters are valid")
}

#[test]
fn dispatch_conserves_energy_on_random_designs() {
    let catalog = ComponentCatalog::default();
    let options = SimulationOptions {
        trace: true,
        ..SimulationOptions::default()
    };
    let spec = &catalog.battery;
    let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive_named(271_828, "dispatch-pairs", 0));

    for scenario_index in 0..20u64 {
        let scenario = scenario_with_seed(seeding::derive_named(271_828, "weather", scenario_index));
        for _ in 0..50 {
            let design = DesignVector {
                n_pv: rng.gen_range(0..=300),
                n_wg: rng.gen_range(0..=60),
                n_bat_parallel: rng.gen_range(0..=400),
                tilt_deg: rng.gen_range(0.0..=90.0),
                hub_height_m: rng.gen_range(11.0..=40.0),
                n_bio: rng.gen_range(0..=10),
            };
            let result = simulate_year(&design, &scenario, &catalog, &options)
                .expect("simulation of an in-range design succeeds");

            assert!(
                (0.0..=1.0).contains(&result.lpsp),
                "lpsp {} outside [0,1] for {design:?}",
                result.lpsp
            );

            let traces = result.hourly_traces.as_ref().expect("trace was requested");
            assert_eq!(traces.len(), 8760);
            for t in traces {
                let net_wh = t.wind_w + t.pv_w + t.bio_w - t.load_w;
                let residual =
                    net_wh - (t.charge_wh - t.discharge_wh + t.surplus_wh - t.unmet_wh);
                assert!(
                    residual.abs() < 1e-6,
                    "hour {}: energy balance residual {residual} Wh for {design:?}",
                    t.hour
                );
                assert!(
                    t.soc >= spec.soc_min - 1e-12 && t.soc <= spec.soc_max + 1e-12,
                    "hour {}: state of charge {} outside [{}, {}]",
                    t.hour,
                    t.soc,
                    spec.soc_min,
                    spec.soc_max
                );
            }
        }
    }
}

#[test]
fn lpsp_never_worsens_with_more_equipment() {
    let catalog = ComponentCatalog::default();
    let options = SimulationOptions::default();
    let scenario = scenario_with_seed(seeding::derive_named(271_828, "weather", 99));

    let pv_axis = [0u32, 15, 40];
    let wg_axis = [0u32, 2, 5];
    let bat_axis = [0u32, 5, 20];
    let mut lpsp = [[[0.0f64; 3]; 3]; 3];
    for (i, &n_pv) in pv_axis.iter().enumerate() {
        for (j, &n_wg) in wg_axis.iter().enumerate() {
            for (k, &n_bat) in bat_axis.iter().enumerate() {
                let design = DesignVector {
                    n_pv,
                    n_wg,
                    n_bat_parallel: n_bat,
                    tilt_deg: 20.0,
                    hub_height_m: 25.0,
                    n_bio: 0,
                };
                lpsp[i][j][k] = simulate_year(&design, &scenario, &catalog, &options)
                    .expect("lattice design simulates")
                    .lpsp;
            }
        }
    }

    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                if i + 1 < 3 {
                    assert!(
                        lpsp[i + 1][j][k] <= lpsp[i][j][k] + 1e-12,
                        "adding modules raised lpsp: {} -> {}",
                        lpsp[i][j][k],
                        lpsp[i + 1][j][k]
                    );
                }
                if j + 1 < 3 {
                    assert!(
                        lpsp[i][j + 1][k] <= lpsp[i][j][k] + 1e-12,
                        "adding turbines raised lpsp: {} -> {}",
                        lpsp[i][j][k],
                        lpsp[i][j + 1][k]
                    );
                }
                if k + 1 < 3 {
                    assert!(
                        lpsp[i][j][k + 1] <= lpsp[i][j][k] + 1e-12,
                        "adding battery strings raised lpsp: {} -> {}",
                        lpsp[i][j][k],
                        lpsp[i][j][k + 1]
                    );
                }
            }
        }
    }
}

/// A scaled-down sizing instance whose whole design lattice (16,000
/// points) can be enumerated: a tenth of the default demand, a feedstock
/// supply too small for the engines to carry the load alone, and tight
/// all-integer bounds on every dimension.
struct MiniInstance {
    scenario: ScenarioData,
    catalog: ComponentCatalog,
    econ: EconConfig,
    fitness_config: FitnessConfig,
    space: SearchSpace,
}

fn mini_instance() -> MiniInstance {
    let site = SiteConfig::default();
    let mut params = SynthesisParams::default();
    for slot in &mut params.load_daily_profile {
        *slot /= 10.0;
    }
    params.waste_kg_per_day = 60.0;
    let scenario = synth_scenario(&site, &params, seeding::derive_named(5, "mini-lattice", 0))
        .expect("mini synthesis parameters are valid");
    let catalog = ComponentCatalog::default();
    let econ = EconConfig::for_catalog(&catalog);
    let space = SearchSpace::new(
        vec![1.0, 1.0, 1.0, 20.0, 15.0, 1.0],
        vec![10.0, 5.0, 10.0, 23.0, 18.0, 2.0],
        vec![true; 6],
    )
    .expect("mini bounds are valid");
    MiniInstance {
        scenario,
        catalog,
        econ,
        fitness_config: FitnessConfig::default(),
        space,
    }
}

/// Exhaustively evaluate every lattice design of the mini instance.
fn brute_force_minimum(inst: &MiniInstance) -> (f64, DesignVector) {
    let mut lattice = Vec::new();
    for n_pv in 1..=10u32 {
        for n_wg in 1..=5u32 {
            for n_bat in 1..=10u32 {
                for tilt in 20..=23u32 {
                    for hub in 15..=18u32 {
                        for n_bio in 1..=2u32 {
                            lattice.push(DesignVector {
                                n_pv,
                                n_wg,
                                n_bat_parallel: n_bat,
                                tilt_deg: tilt as f64,
                                hub_height_m: hub as f64,
                                n_bio,
                            });
                        }
                    }
                }
            }
        }
    }
    assert_eq!(lattice.len(), 16_000, "full lattice enumeration");

    lattice
        .into_par_iter()
        .map(|design| {
            let value = fitness(
                &design,
                &inst.scenario,
                &inst.catalog,
                &inst.econ,
                &inst.fitness_config,
            )
            .expect("lattice design evaluates");
            (value, design)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("non-empty lattice")
}

#[test]
fn search_matches_exhaustive_minimum_on_small_instance() {
    let inst = mini_instance();
    let (oracle_minimum, oracle_design) = brute_force_minimum(&inst);

    let cfg = BenchConfig {
        runs: 5,
        optimizer: OptimizerConfig {
            population: 30,
            iterations: 80,
            seed: 17,
            algorithm: Algorithm::Pso,
            algorithm_params: BTreeMap::new(),
        },
        algorithms: Algorithm::ALL.to_vec(),
        scenario: "mini-lattice".to_string(),
        parallelism: 0,
        space: inst.space.clone(),
        fitness: inst.fitness_config.clone(),
    };
    let report = run_benchmark(&cfg, &inst.scenario, &inst.catalog, &inst.econ)
        .expect("mini benchmark runs");

    let mut exact_matches = Vec::new();
    for algorithm in Algorithm::ALL {
        let mut costs: Vec<f64> = report
            .run_records
            .iter()
            .filter(|r| r.algorithm == algorithm)
            .map(|r| r.best_cost_usd)
            .collect();
        assert_eq!(costs.len(), 5);
        for &c in &costs {
            assert!(
                c >= oracle_minimum - 1e-9,
                "{algorithm} reported {c}, below the exhaustive minimum {oracle_minimum} \
                 (oracle design {oracle_design:?})"
            );
        }
        costs.sort_by(f64::total_cmp);
        let median = costs[2];
        if (median - oracle_minimum).abs() <= 1e-9 {
            exact_matches.push(algorithm);
        }
    }
    assert!(
        exact_matches.len() >= 3,
        "only {exact_matches:?} matched the exhaustive minimum {oracle_minimum} \
         (oracle design {oracle_design:?})"
    );
}

#[test]
fn every_algorithm_reaches_sphere_floor() {
    let space = SearchSpace::new(vec![-100.0; 5], vec![100.0; 5], vec![false; 5])
        .expect("sphere bounds are valid");
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();

    for algorithm in Algorithm::ALL {
        let mut bests = Vec::new();
        for seed in 0..10u64 {
            let cfg = OptimizerConfig {
                population: 50,
                iterations: 300,
                seed,
                algorithm,
                algorithm_params: BTreeMap::new(),
            };
            let run = minimize(sphere, &space, &cfg).expect("sphere run succeeds");
            assert_eq!(run.convergence.len(), 300);
            for pair in run.convergence.windows(2) {
                assert!(
                    pair[1] <= pair[0],
                    "{algorithm} seed {seed}: convergence trace increased {} -> {}",
                    pair[0],
                    pair[1]
                );
            }
            bests.push(run.best_fitness);
        }
        bests.sort_by(f64::total_cmp);
        let median = (bests[4] + bests[5]) / 2.0;
        assert!(
            median <= 1e-3,
            "{algorithm}: median sphere best {median} above the 1e-3 floor \
             (all runs: {bests:?})"
        );
    }
}

/// The benchmark configuration the command-line tool uses for
/// `bench --profile desk` with stock settings, including the bundled
/// synthetic scenario derived from the default master seed.
fn desk_world() -> (BenchConfig, ScenarioData, ComponentCatalog, EconConfig) {
    let config = AppConfig::default();
    let scenario = synth_scenario(
        &config.site,
        &config.synthesis,
        seeding::derive_named(config.optimizer.seed, "scenario", 0),
    )
    .expect("bundled scenario synthesizes");
    let mut bench = config.bench_config().expect("default config is coherent");
    BenchProfile::Desk.apply(&mut bench);
    bench.scenario = format!("synthetic(seed={})", config.optimizer.seed);
    (bench, scenario, config.catalog, config.econ)
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .expect("export directory exists")
        .map(|e| {
            let e = e.expect("directory entry is readable");
            let name = e.file_name().to_string_lossy().into_owned();
            let bytes = fs::read(e.path()).expect("exported file is readable");
            (name, bytes)
        })
        .collect();
    entries.sort();
    entries
}

#[test]
fn desk_benchmark_is_reliable_and_byte_reproducible() {
    let (bench, scenario, catalog, econ) = desk_world();
    assert_eq!(bench.runs, 5);
    assert_eq!(bench.optimizer.population, 50);
    assert_eq!(bench.optimizer.iterations, 100);

    let first = run_benchmark(&bench, &scenario, &catalog, &econ).expect("first desk bench");
    let second = run_benchmark(&bench, &scenario, &catalog, &econ).expect("second desk bench");
    assert_eq!(
        first.strip_timing(),
        second.strip_timing(),
        "identical master seed must reproduce the identical report"
    );

    assert_eq!(first.algorithms.len(), 7);
    assert!(!first.partial, "all runs should succeed");
    for summary in &first.algorithms {
        assert_eq!(
            summary.best_lpsp, 0.0,
            "{}: best design leaves load unserved (lpsp {})",
            summary.algorithm, summary.best_lpsp
        );
    }
    let zero_count = first
        .algorithms
        .iter()
        .filter(|s| s.percent_difference == 0.0)
        .count();
    assert_eq!(
        zero_count, 1,
        "exactly one algorithm should sit at zero percent difference: {:?}",
        first
            .algorithms
            .iter()
            .map(|s| (s.algorithm, s.percent_difference))
            .collect::<Vec<_>>()
    );

    let dir_a = tempfile::tempdir().expect("tempdir");
    let dir_b = tempfile::tempdir().expect("tempdir");
    let files_a = export_report(&first, dir_a.path()).expect("first export");
    let files_b = export_report(&second, dir_b.path()).expect("second export");
    assert_eq!(files_a.len(), files_b.len());
    // summary/sizing/profitability + one convergence file per algorithm +
    // the JSON report itself
    assert_eq!(files_a.len(), 3 + 7 + 1);
    assert_eq!(
        read_dir_sorted(dir_a.path()),
        read_dir_sorted(dir_b.path()),
        "rerun exports must be byte-identical"
    );
}

#[test]
fn thread_count_does_not_change_results() {
    let (mut bench, scenario, catalog, econ) = desk_world();
    bench.runs = 3;
    bench.optimizer.population = 16;
    bench.optimizer.iterations = 25;
    bench.algorithms = vec![Algorithm::Pso, Algorithm::Poa, Algorithm::Doa];

    bench.parallelism = 1;
    let serial = run_benchmark(&bench, &scenario, &catalog, &econ).expect("serial bench");
    bench.parallelism = 8;
    let threaded = run_benchmark(&bench, &scenario, &catalog, &econ).expect("threaded bench");
    assert_eq!(
        serial.strip_timing(),
        threaded.strip_timing(),
        "results must not depend on the worker-pool width"
    );
}
