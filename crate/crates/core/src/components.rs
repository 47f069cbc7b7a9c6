//! Generation and storage hardware models: wind turbine power curve, PV
//! module thermal/electrical response, biogas generator set, and battery
//! bank layout.
//!
//! Each spec struct couples the device physics with its capital and
//! maintenance costs so that a single catalog describes the purchasable
//! hardware. All power figures are watts, energies watt-hours, speeds m/s.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Kilocalories per kilowatt-hour, used to convert fuel heating value into
/// electrical energy.
pub const KCAL_PER_KWH: f64 = 860.0;

#[derive(Debug, Error, PartialEq)]
pub enum ComponentError {
    #[error("bus voltage {bus_v} V is not an integer multiple of battery voltage {battery_v} V")]
    BusVoltageMismatch { bus_v: f64, battery_v: f64 },
}

/// Horizontal-axis wind turbine: piecewise-cubic power curve plus purchase,
/// tower and upkeep costs. Hub height is a design variable bounded by
/// `hub_height_min_m..=hub_height_max_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindTurbineSpec {
    /// Nameplate electrical rating of one machine, W.
    pub rated_power_w: f64,
    pub cut_in_m_s: f64,
    pub rated_m_s: f64,
    pub cut_out_m_s: f64,
    pub swept_area_m2: f64,
    /// Combined drivetrain/generator efficiency applied to the aerodynamic
    /// power curve.
    pub efficiency: f64,
    pub hub_height_min_m: f64,
    pub hub_height_max_m: f64,
    pub capital_cost_usd: f64,
    /// Tower cost per metre of hub height.
    pub tower_cost_usd_per_m: f64,
    pub maintenance_usd_per_year: f64,
    pub tower_maintenance_usd_per_m_year: f64,
}

impl Default for WindTurbineSpec {
    fn default() -> Self {
        Self {
            rated_power_w: 1000.0,
            cut_in_m_s: 2.5,
            rated_m_s: 11.0,
            cut_out_m_s: 25.0,
            swept_area_m2: 4.52,
            efficiency: 0.9,
            hub_height_min_m: 11.0,
            hub_height_max_m: 40.0,
            capital_cost_usd: 2400.0,
            tower_cost_usd_per_m: 55.0,
            maintenance_usd_per_year: 24.0,
            tower_maintenance_usd_per_m_year: 0.55,
        }
    }
}

impl WindTurbineSpec {
    /// Nameplate rating per square metre of rotor.
    pub fn rated_specific_power_w_m2(&self) -> f64 {
        self.rated_power_w / self.swept_area_m2
    }

    /// Aerodynamic power per square metre of rotor at hub-height wind speed
    /// `v`: zero outside the operating band, cubic between cut-in and rated,
    /// flat at the rated value up to cut-out.
    pub fn specific_power_w_m2(&self, v: f64) -> f64 {
        if !v.is_finite() || v < self.cut_in_m_s || v > self.cut_out_m_s {
            return 0.0;
        }
        let p_r = self.rated_specific_power_w_m2();
        if v >= self.rated_m_s {
            return p_r;
        }
        let vci3 = self.cut_in_m_s.powi(3);
        let span = self.rated_m_s.powi(3) - vci3;
        let a = p_r / span;
        let b = vci3 / span;
        a * v.powi(3) - b * p_r
    }

    /// Electrical output of `count` identical machines at hub-height wind
    /// speed `v`.
    pub fn electric_power_w(&self, v: f64, count: u32) -> f64 {
        self.specific_power_w_m2(v) * self.swept_area_m2 * self.efficiency * count as f64
    }
}

/// Temperature model for the PV open-circuit voltage.
///
/// `Absolute` subtracts the coefficient times the full cell temperature —
/// the form this toolkit's reference results use. `Delta25` is the
/// conventional datasheet form, applying the coefficient to the excursion
/// from 25 °C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum VocTempModel {
    #[default]
    Absolute,
    Delta25,
}

/// Flat-plate PV module with linear temperature corrections, a fill factor
/// fixed by the standard-test-condition datasheet values, and purchase cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PvModuleSpec {
    pub voc_stc_v: f64,
    pub isc_stc_a: f64,
    pub vmp_stc_v: f64,
    pub imp_stc_a: f64,
    /// Nameplate module rating at standard test conditions, W.
    pub pmax_stc_w: f64,
    /// Open-circuit voltage drop per °C (applied per [`VocTempModel`]).
    pub voc_temp_coeff_v_per_c: f64,
    /// Short-circuit current gain per °C above 25 °C.
    pub isc_temp_coeff_a_per_c: f64,
    pub nominal_operating_cell_temp_c: f64,
    /// Converter/derating efficiency applied at array level.
    pub converter_efficiency: f64,
    /// Modules per string within one purchasable unit.
    pub unit_series: u32,
    /// Strings per purchasable unit.
    pub unit_parallel: u32,
    pub capital_cost_usd: f64,
    pub maintenance_usd_per_year: f64,
}

impl Default for PvModuleSpec {
    fn default() -> Self {
        Self {
            voc_stc_v: 64.8,
            isc_stc_a: 6.24,
            vmp_stc_v: 54.7,
            imp_stc_a: 5.86,
            pmax_stc_w: 320.0,
            voc_temp_coeff_v_per_c: 0.176,
            isc_temp_coeff_a_per_c: 0.0035,
            nominal_operating_cell_temp_c: 47.0,
            converter_efficiency: 0.95,
            unit_series: 1,
            unit_parallel: 1,
            capital_cost_usd: 640.0,
            maintenance_usd_per_year: 6.4,
        }
    }
}

impl PvModuleSpec {
    /// Cell temperature from ambient temperature and plane-of-array
    /// irradiance via the nominal-operating-cell-temperature relation.
    pub fn cell_temperature_c(&self, ambient_c: f64, irradiance_w_m2: f64) -> f64 {
        ambient_c + (self.nominal_operating_cell_temp_c - 20.0) * irradiance_w_m2 / 1000.0
    }

    pub fn open_circuit_voltage_v(&self, cell_temp_c: f64, model: VocTempModel) -> f64 {
        let excursion = match model {
            VocTempModel::Absolute => cell_temp_c,
            VocTempModel::Delta25 => cell_temp_c - 25.0,
        };
        self.voc_stc_v - self.voc_temp_coeff_v_per_c * excursion
    }

    pub fn short_circuit_current_a(&self, cell_temp_c: f64, irradiance_w_m2: f64) -> f64 {
        (self.isc_stc_a + self.isc_temp_coeff_a_per_c * (cell_temp_c - 25.0)) * irradiance_w_m2
            / 1000.0
    }

    /// Fill factor fixed at its standard-test-condition value.
    pub fn fill_factor(&self) -> f64 {
        (self.vmp_stc_v * self.imp_stc_a) / (self.voc_stc_v * self.isc_stc_a)
    }

    /// DC output of one module, floored at zero (very hot, dim conditions
    /// can drive the linear voltage model negative).
    pub fn module_power_w(
        &self,
        ambient_c: f64,
        irradiance_w_m2: f64,
        model: VocTempModel,
    ) -> f64 {
        let t_cell = self.cell_temperature_c(ambient_c, irradiance_w_m2);
        let voc = self.open_circuit_voltage_v(t_cell, model);
        let isc = self.short_circuit_current_a(t_cell, irradiance_w_m2);
        (voc * isc * self.fill_factor()).max(0.0)
    }

    /// Converter-derated output of `count` identical units (each
    /// `unit_series × unit_parallel` modules; both default to 1).
    pub fn array_power_w(
        &self,
        ambient_c: f64,
        irradiance_w_m2: f64,
        count: u32,
        model: VocTempModel,
    ) -> f64 {
        let modules_per_unit = (self.unit_series * self.unit_parallel) as f64;
        self.converter_efficiency
            * modules_per_unit
            * count as f64
            * self.module_power_w(ambient_c, irradiance_w_m2, model)
    }
}

/// Biogas generator set fed from an anaerobic digester of fixed capacity.
/// The digester is a single site-level installation; engines are counted by
/// the design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BiogasSpec {
    /// Nameplate rating of one engine, W.
    pub rated_power_w: f64,
    /// Gas produced per kilogram of feedstock.
    pub gas_rate_m3_per_kg: f64,
    /// Most gas the digester can accumulate over one day.
    pub digester_volume_m3: f64,
    pub calorific_kcal_per_m3: f64,
    /// Fuel-to-electricity conversion efficiency of the engine.
    pub engine_efficiency: f64,
    pub engine_cost_usd: f64,
    pub engine_maintenance_usd_per_year: f64,
    pub digester_cost_usd: f64,
    pub digester_maintenance_usd_per_year: f64,
}

impl Default for BiogasSpec {
    fn default() -> Self {
        Self {
            rated_power_w: 3000.0,
            gas_rate_m3_per_kg: 0.05,
            digester_volume_m3: 22.183,
            calorific_kcal_per_m3: 4700.0,
            engine_efficiency: 0.30,
            engine_cost_usd: 720.0,
            engine_maintenance_usd_per_year: 7.2,
            digester_cost_usd: 2550.0,
            digester_maintenance_usd_per_year: 25.5,
        }
    }
}

impl BiogasSpec {
    /// Gas volume yielded by a day's feedstock, capped by digester volume.
    pub fn daily_gas_volume_m3(&self, feedstock_kg_per_day: f64) -> f64 {
        (feedstock_kg_per_day * self.gas_rate_m3_per_kg).min(self.digester_volume_m3)
    }

    /// Electrical power sustained by burning `gas_m3` over one hour, before
    /// any nameplate cap.
    pub fn power_from_gas_w(&self, gas_m3: f64) -> f64 {
        gas_m3 * self.calorific_kcal_per_m3 * self.engine_efficiency / KCAL_PER_KWH * 1000.0
    }

    /// Output of `count` engines burning `gas_m3` over one hour: the lesser
    /// of fuel-limited and nameplate-limited power.
    pub fn electric_power_w(&self, gas_m3: f64, count: u32) -> f64 {
        self.power_from_gas_w(gas_m3)
            .min(count as f64 * self.rated_power_w)
            .max(0.0)
    }
}

/// One battery as purchased: nominal voltage, capacity, round-trip losses,
/// permitted state-of-charge window, idle self-discharge, and cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatterySpec {
    pub voltage_v: f64,
    pub capacity_ah: f64,
    pub capital_cost_usd: f64,
    pub maintenance_usd_per_year: f64,
    /// Fraction of stored charge lost per idle day.
    pub self_discharge_per_day: f64,
    pub charge_efficiency: f64,
    pub discharge_efficiency: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    /// Calendar life used to plan replacements over the costing horizon.
    pub life_years: f64,
}

impl Default for BatterySpec {
    fn default() -> Self {
        Self {
            voltage_v: 12.0,
            capacity_ah: 357.0,
            capital_cost_usd: 1239.0,
            maintenance_usd_per_year: 12.39,
            self_discharge_per_day: 0.002,
            charge_efficiency: 0.8,
            discharge_efficiency: 1.0,
            soc_min: 0.2,
            soc_max: 1.0,
            life_years: 10.0,
        }
    }
}

/// A bank of identical batteries: strings of `n_series` modules reach the
/// bus voltage, `n_parallel` strings set the capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryBank {
    pub n_series: u32,
    pub n_parallel: u32,
    pub total_capacity_ah: f64,
    /// Nameplate energy of the whole bank.
    pub energy_max_kwh: f64,
}

impl BatteryBank {
    /// Lay out a bank of `n_parallel` strings for the given DC bus voltage.
    /// The bus must be an integer multiple of the battery voltage.
    pub fn layout(
        spec: &BatterySpec,
        n_parallel: u32,
        bus_voltage_v: f64,
    ) -> Result<Self, ComponentError> {
        let ratio = bus_voltage_v / spec.voltage_v;
        let n_series = ratio.round();
        if n_series < 1.0 || (ratio - n_series).abs() > 1e-9 {
            return Err(ComponentError::BusVoltageMismatch {
                bus_v: bus_voltage_v,
                battery_v: spec.voltage_v,
            });
        }
        let total_capacity_ah = spec.capacity_ah * n_parallel as f64;
        let energy_max_kwh = total_capacity_ah * (n_series * spec.voltage_v) / 1000.0;
        Ok(Self {
            n_series: n_series as u32,
            n_parallel,
            total_capacity_ah,
            energy_max_kwh,
        })
    }

    /// Number of individual battery modules in the bank.
    pub fn module_count(&self) -> u32 {
        self.n_series * self.n_parallel
    }

    pub fn energy_max_wh(&self) -> f64 {
        self.energy_max_kwh * 1000.0
    }
}

/// Everything purchasable: the four device specifications with their costs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComponentCatalog {
    pub wind: WindTurbineSpec,
    pub pv: PvModuleSpec,
    pub biogas: BiogasSpec,
    pub battery: BatterySpec,
}
