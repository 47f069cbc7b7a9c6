//! Hourly operating strategy over a full year for one candidate design:
//! renewables serve the load first, surplus charges the battery bank,
//! deficits discharge it, and whatever remains is counted as unmet demand
//! or curtailed surplus. The headline reliability figure is the loss of
//! power supply probability (LPSP): unmet energy over demanded energy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::{
    BatteryBank, BatterySpec, ComponentCatalog, ComponentError, VocTempModel,
};
use crate::solar::{self, BeamRatioTerms, TranspositionConvention};
use crate::timeseries::{validate_scenario, ScenarioData, HOURS_PER_YEAR};

/// Number of decision variables in a design.
pub const DESIGN_DIM: usize = 6;

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error("scenario failed validation with {count} violation(s), first: {first}")]
    InvalidScenario { count: usize, first: String },
    #[error(transparent)]
    Component(#[from] ComponentError),
    #[error("initial state of charge {0} outside the battery window")]
    BadInitialSoc(f64),
}

/// The six sizing decisions: device counts are integers; tilt and hub
/// height are continuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignVector {
    pub n_pv: u32,
    pub n_wg: u32,
    pub n_bat_parallel: u32,
    pub tilt_deg: f64,
    pub hub_height_m: f64,
    pub n_bio: u32,
}

impl DesignVector {
    /// Flatten into the optimizer's coordinate order:
    /// `[n_pv, n_wg, n_bat_parallel, tilt_deg, hub_height_m, n_bio]`.
    pub fn to_position(self) -> [f64; DESIGN_DIM] {
        [
            self.n_pv as f64,
            self.n_wg as f64,
            self.n_bat_parallel as f64,
            self.tilt_deg,
            self.hub_height_m,
            self.n_bio as f64,
        ]
    }

    /// Read a design back from optimizer coordinates, rounding the count
    /// dimensions to the nearest non-negative integer.
    pub fn from_position(x: &[f64]) -> Self {
        assert_eq!(x.len(), DESIGN_DIM, "design position must have 6 dims");
        let count = |v: f64| v.round().max(0.0) as u32;
        Self {
            n_pv: count(x[0]),
            n_wg: count(x[1]),
            n_bat_parallel: count(x[2]),
            tilt_deg: x[3],
            hub_height_m: x[4],
            n_bio: count(x[5]),
        }
    }

    /// Which optimizer dimensions are integer counts.
    pub fn integer_mask() -> [bool; DESIGN_DIM] {
        [true, true, true, false, false, true]
    }
}

/// Energy flows of one battery step. All energies are bus-side watt-hours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocStep {
    pub soc_new: f64,
    /// Energy drawn from the bus into the battery (before charge losses).
    pub charged_wh: f64,
    /// Energy delivered from the battery to the bus.
    pub discharged_wh: f64,
    /// Demand the bank could not cover.
    pub unmet_wh: f64,
    /// Generation the bank could not absorb (curtailed).
    pub surplus_wh: f64,
}

/// Advance the battery by one step of `dt_h` hours under a net bus power
/// (generation minus load; positive charges, negative discharges).
///
/// Self-discharge scales the state of charge by `1 − σ·dt/24` before the
/// net flow is applied, but never below the usable floor `soc_min`.
/// Charging stores `charged_wh · η_charge` and stops at `soc_max`;
/// discharging delivers `stored · η_discharge` and stops at `soc_min`.
/// A zero-capacity bank passes everything through as surplus or unmet.
///
/// Energy bookkeeping identity, asserted by tests:
/// `net_power_w·dt_h = charged_wh − discharged_wh + surplus_wh − unmet_wh`.
pub fn soc_step(
    soc_prev: f64,
    net_power_w: f64,
    dt_h: f64,
    bank: &BatteryBank,
    spec: &BatterySpec,
) -> Result<SocStep, DispatchError> {
    if !(spec.soc_min..=spec.soc_max).contains(&soc_prev) {
        return Err(DispatchError::BadInitialSoc(soc_prev));
    }
    assert!(dt_h > 0.0, "time step must be positive");
    Ok(soc_step_unchecked(soc_prev, net_power_w, dt_h, bank, spec))
}

fn soc_step_unchecked(
    soc_prev: f64,
    net_power_w: f64,
    dt_h: f64,
    bank: &BatteryBank,
    spec: &BatterySpec,
) -> SocStep {
    let e_max = bank.energy_max_wh();
    let net_wh = net_power_w * dt_h;

    if e_max <= 0.0 {
        // No storage: every imbalance flows straight through.
        return SocStep {
            soc_new: soc_prev,
            charged_wh: 0.0,
            discharged_wh: 0.0,
            unmet_wh: (-net_wh).max(0.0),
            surplus_wh: net_wh.max(0.0),
        };
    }

    let soc = (soc_prev * (1.0 - spec.self_discharge_per_day * dt_h / 24.0)).max(spec.soc_min);

    if net_wh > 0.0 {
        let headroom_wh = (spec.soc_max - soc) * e_max;
        let stored_wh = net_wh * spec.charge_efficiency;
        if stored_wh <= headroom_wh {
            SocStep {
                soc_new: soc + stored_wh / e_max,
                charged_wh: net_wh,
                discharged_wh: 0.0,
                unmet_wh: 0.0,
                surplus_wh: 0.0,
            }
        } else {
            let charged_wh = headroom_wh / spec.charge_efficiency;
            SocStep {
                soc_new: spec.soc_max,
                charged_wh,
                discharged_wh: 0.0,
                unmet_wh: 0.0,
                surplus_wh: net_wh - charged_wh,
            }
        }
    } else if net_wh < 0.0 {
        let deficit_wh = -net_wh;
        let usable_wh = (soc - spec.soc_min) * e_max;
        let needed_stored_wh = deficit_wh / spec.discharge_efficiency;
        if needed_stored_wh <= usable_wh {
            SocStep {
                soc_new: soc - needed_stored_wh / e_max,
                charged_wh: 0.0,
                discharged_wh: deficit_wh,
                unmet_wh: 0.0,
                surplus_wh: 0.0,
            }
        } else {
            let discharged_wh = usable_wh * spec.discharge_efficiency;
            SocStep {
                soc_new: spec.soc_min,
                charged_wh: 0.0,
                discharged_wh,
                unmet_wh: deficit_wh - discharged_wh,
                surplus_wh: 0.0,
            }
        }
    } else {
        SocStep {
            soc_new: soc,
            charged_wh: 0.0,
            discharged_wh: 0.0,
            unmet_wh: 0.0,
            surplus_wh: 0.0,
        }
    }
}

/// Annual energy produced by each source, watt-hours.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GenerationBySource {
    pub wind_wh: f64,
    pub pv_wh: f64,
    pub biogas_wh: f64,
}

/// One hour of the optional simulation trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourTrace {
    pub hour: usize,
    pub wind_w: f64,
    pub pv_w: f64,
    pub bio_w: f64,
    pub load_w: f64,
    pub soc: f64,
    pub charge_wh: f64,
    pub discharge_wh: f64,
    pub unmet_wh: f64,
    pub surplus_wh: f64,
}

/// Year-long simulation outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    /// Loss of power supply probability: unmet over demanded energy.
    pub lpsp: f64,
    pub total_demand_wh: f64,
    pub total_unmet_wh: f64,
    pub total_surplus_wh: f64,
    pub energy_served_wh: f64,
    pub generation_by_source_wh: GenerationBySource,
    pub final_soc: f64,
    pub hourly_traces: Option<Vec<HourTrace>>,
}

/// How to run the simulation: irradiance transposition and PV voltage
/// conventions, the battery's starting state, and whether to keep the
/// hourly trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationOptions {
    pub trace: bool,
    pub transposition: TranspositionConvention,
    pub voc_model: VocTempModel,
    /// Battery state of charge at hour 0; defaults to the top of the
    /// permitted window.
    pub initial_soc: Option<f64>,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            trace: false,
            transposition: TranspositionConvention::default(),
            voc_model: VocTempModel::default(),
            initial_soc: None,
        }
    }
}

/// LPSP of aggregate figures: zero when nothing was demanded.
pub fn lpsp_of(total_unmet_wh: f64, total_demand_wh: f64) -> f64 {
    if total_demand_wh > 0.0 {
        total_unmet_wh / total_demand_wh
    } else {
        0.0
    }
}

/// Simulate one design over one scenario year, hour by hour.
///
/// Each hour: wind speed is scaled to hub height and run through the
/// turbine curve; horizontal irradiance is transposed onto the tilted
/// plane and run through the PV array model; the biogas engines burn the
/// day's gas budget (digester-capped feedstock, drawn down uniformly per
/// hour, must-run); the battery absorbs or covers the remaining imbalance.
/// State of charge carries across hours, starting full unless overridden.
pub fn simulate_year(
    design: &DesignVector,
    scenario: &ScenarioData,
    catalog: &ComponentCatalog,
    options: &SimulationOptions,
) -> Result<SimulationResult, DispatchError> {
    let violations = validate_scenario(scenario);
    if !violations.is_empty() {
        return Err(DispatchError::InvalidScenario {
            count: violations.len(),
            first: violations[0].to_string(),
        });
    }

    let site = &scenario.site;
    let bank = BatteryBank::layout(&catalog.battery, design.n_bat_parallel, site.bus_voltage_v)?;
    let battery = &catalog.battery;
    let mut soc = match options.initial_soc {
        Some(s) if (battery.soc_min..=battery.soc_max).contains(&s) => s,
        Some(s) => return Err(DispatchError::BadInitialSoc(s)),
        None => battery.soc_max,
    };

    // Everything that depends only on the day, the hour of day, or the
    // design is precomputed; the hot loop is pure arithmetic.
    let height_factor = site.wind_speed_at_height(1.0, design.hub_height_m);
    let beam_terms =
        BeamRatioTerms::new(site.latitude_deg, design.tilt_deg, options.transposition);
    let (sky_view, ground_view) = solar::tilt_view_factors(design.tilt_deg);

    let mut decl_trig = Vec::with_capacity(365);
    let mut daily_gas_m3 = Vec::with_capacity(365);
    for day in 0..365usize {
        let decl = solar::declination(day as u32 + 1).expect("constructed day in 1..=365");
        decl_trig.push((solar::cos_deg(decl), solar::sin_deg(decl)));
        let feedstock: f64 = scenario.food_waste.values[day * 24..(day + 1) * 24]
            .iter()
            .sum();
        daily_gas_m3.push(catalog.biogas.daily_gas_volume_m3(feedstock) / 24.0);
    }
    let cos_omega: Vec<f64> = (0..24)
        .map(|hod| {
            let omega = solar::hour_angle(hod as f64 + 0.5).expect("hour midpoint within 0..24");
            solar::cos_deg(omega)
        })
        .collect();

    let mut totals = SimulationResult {
        lpsp: 0.0,
        total_demand_wh: 0.0,
        total_unmet_wh: 0.0,
        total_surplus_wh: 0.0,
        energy_served_wh: 0.0,
        generation_by_source_wh: GenerationBySource::default(),
        final_soc: soc,
        hourly_traces: options.trace.then(|| Vec::with_capacity(HOURS_PER_YEAR)),
    };

    for t in 0..HOURS_PER_YEAR {
        let day = t / 24;
        let hod = t % 24;

        let v_hub = scenario.wind_speed_ref.values[t] * height_factor;
        let wind_w = catalog.wind.electric_power_w(v_hub, design.n_wg);

        let ghi = scenario.ghi.values[t];
        let diff = scenario.diffuse.values[t];
        let (cos_d, sin_d) = decl_trig[day];
        let rb = beam_terms
            .eval(cos_d, sin_d, cos_omega[hod])
            .unwrap_or(0.0);
        let poa = solar::tilted_irradiance_terms(
            ghi,
            diff,
            rb,
            sky_view,
            ground_view,
            site.ground_reflectance,
        );
        let pv_w =
            catalog
                .pv
                .array_power_w(scenario.ambient_temp.values[t], poa, design.n_pv, options.voc_model);

        let bio_w = catalog.biogas.electric_power_w(daily_gas_m3[day], design.n_bio);

        let load_w = scenario.load.values[t];
        let net_w = wind_w + pv_w + bio_w - load_w;
        let step = soc_step_unchecked(soc, net_w, 1.0, &bank, battery);
        soc = step.soc_new;

        totals.total_demand_wh += load_w;
        totals.total_unmet_wh += step.unmet_wh;
        totals.total_surplus_wh += step.surplus_wh;
        totals.generation_by_source_wh.wind_wh += wind_w;
        totals.generation_by_source_wh.pv_wh += pv_w;
        totals.generation_by_source_wh.biogas_wh += bio_w;

        if let Some(traces) = totals.hourly_traces.as_mut() {
            traces.push(HourTrace {
                hour: t,
                wind_w,
                pv_w,
                bio_w,
                load_w,
                soc,
                charge_wh: step.charged_wh,
                discharge_wh: step.discharged_wh,
                unmet_wh: step.unmet_wh,
                surplus_wh: step.surplus_wh,
            });
        }
    }

    totals.final_soc = soc;
    totals.energy_served_wh = totals.total_demand_wh - totals.total_unmet_wh;
    totals.lpsp = lpsp_of(totals.total_unmet_wh, totals.total_demand_wh);
    Ok(totals)
}
