//! Microgrid assets and the hourly exogenous inputs they are scheduled against.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const HOURS_PER_DAY: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{unit}: {rule}")]
pub struct FleetError {
    pub unit: String,
    pub rule: String,
}

fn reject(unit: &str, rule: impl Into<String>) -> Result<(), FleetError> {
    Err(FleetError {
        unit: unit.to_string(),
        rule: rule.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispatchableUnit {
    pub name: String,
    pub cost_per_mwh: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// MW/h.
    pub ramp_up: f64,
    pub ramp_down: f64,
    /// Hours.
    pub min_up: u32,
    pub min_down: u32,
    #[serde(default)]
    pub initial_on: bool,
    #[serde(default)]
    pub initial_output: f64,
    /// How long the unit has held its initial state; `None` means long
    /// enough that no minimum time is pending.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_hours_in_state: Option<u32>,
}

impl DispatchableUnit {
    pub fn validate(&self) -> Result<(), FleetError> {
        let n = &self.name;
        if !(self.p_min >= 0.0 && self.p_min <= self.p_max && self.p_max.is_finite()) {
            return reject(n, format!("requires 0 <= p_min <= p_max (got {} and {})", self.p_min, self.p_max));
        }
        if !(self.ramp_up > 0.0 && self.ramp_down > 0.0) {
            return reject(n, "ramp rates must be positive");
        }
        if self.min_up < 1 || self.min_down < 1 {
            return reject(n, "minimum up and down times must be at least 1 h");
        }
        if !self.cost_per_mwh.is_finite() {
            return reject(n, "cost must be finite");
        }
        let out = self.initial_output;
        let ok = if self.initial_on {
            out >= self.p_min && out <= self.p_max
        } else {
            out == 0.0
        };
        if !ok {
            return reject(n, "initial output must be 0 when off and within [p_min, p_max] when on");
        }
        Ok(())
    }
}

/// A non-dispatchable unit whose hourly output comes from the time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenewableUnit {
    pub name: String,
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageUnit {
    pub name: String,
    pub energy_min: f64,
    pub energy_max: f64,
    pub charge_min: f64,
    pub charge_max: f64,
    pub discharge_min: f64,
    pub discharge_max: f64,
    /// Hours.
    pub min_charge_time: u32,
    pub min_discharge_time: u32,
    pub efficiency: f64,
    /// Hours per scheduling period.
    #[serde(default = "one")]
    pub period: f64,
    pub initial_energy: f64,
}

fn one() -> f64 {
    1.0
}

impl StorageUnit {
    pub fn validate(&self) -> Result<(), FleetError> {
        let n = &self.name;
        if !(0.0 <= self.energy_min && self.energy_min <= self.initial_energy && self.initial_energy <= self.energy_max) {
            return reject(n, "requires 0 <= energy_min <= initial_energy <= energy_max");
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return reject(n, "efficiency must lie in (0, 1]");
        }
        if !(0.0 <= self.charge_min && self.charge_min <= self.charge_max && self.charge_max.is_finite()) {
            return reject(n, "requires 0 <= charge_min <= charge_max");
        }
        if !(0.0 <= self.discharge_min && self.discharge_min <= self.discharge_max && self.discharge_max.is_finite()) {
            return reject(n, "requires 0 <= discharge_min <= discharge_max");
        }
        if self.min_charge_time < 1 || self.min_discharge_time < 1 {
            return reject(n, "minimum charge and discharge times must be at least 1 h");
        }
        if !(self.period > 0.0) {
            return reject(n, "period must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadKind {
    Shiftable,
    Curtailable,
}

/// A load that must receive `required_energy` every day inside its window.
/// Window hours are 1-based hours of the day, inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjustableLoad {
    pub name: String,
    pub d_min: f64,
    pub d_max: f64,
    pub required_energy: f64,
    pub window_start: u32,
    pub window_end: u32,
    pub min_on_time: u32,
    pub kind: LoadKind,
}

impl AdjustableLoad {
    /// Window and minimum on time actually scheduled: curtailable loads span
    /// the whole day and stay on for all of it once started.
    pub fn effective_window(&self) -> (usize, usize, usize) {
        match self.kind {
            LoadKind::Shiftable => (
                self.window_start as usize - 1,
                self.window_end as usize - 1,
                self.min_on_time as usize,
            ),
            LoadKind::Curtailable => (0, HOURS_PER_DAY - 1, HOURS_PER_DAY),
        }
    }

    pub fn validate(&self) -> Result<(), FleetError> {
        let n = &self.name;
        if !(0.0 <= self.d_min && self.d_min <= self.d_max && self.d_max.is_finite()) {
            return reject(n, "requires 0 <= d_min <= d_max");
        }
        if !(1 <= self.window_start && self.window_start <= self.window_end && self.window_end as usize <= HOURS_PER_DAY) {
            return reject(n, "window must satisfy 1 <= start <= end <= 24");
        }
        if self.min_on_time < 1 {
            return reject(n, "minimum on time must be at least 1 h");
        }
        let (s, e, _) = self.effective_window();
        let capacity = self.d_max * (e - s + 1) as f64;
        if !(self.required_energy >= 0.0 && self.required_energy <= capacity + 1e-9) {
            return reject(
                n,
                format!(
                    "required energy {} MWh must lie in [0, {capacity}] (d_max times window length)",
                    self.required_energy
                ),
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssetFleet {
    #[serde(default)]
    pub dispatchable: Vec<DispatchableUnit>,
    #[serde(default)]
    pub renewable: Vec<RenewableUnit>,
    #[serde(default)]
    pub storage: Vec<StorageUnit>,
    #[serde(default)]
    pub loads: Vec<AdjustableLoad>,
}

impl AssetFleet {
    pub fn validate(&self) -> Result<(), FleetError> {
        for u in &self.dispatchable {
            u.validate()?;
        }
        for u in &self.renewable {
            if !(u.capacity >= 0.0 && u.capacity.is_finite()) {
                return reject(&u.name, "capacity must be non-negative");
            }
        }
        for s in &self.storage {
            s.validate()?;
        }
        for l in &self.loads {
            l.validate()?;
        }
        let mut names: Vec<&str> = self
            .dispatchable
            .iter()
            .map(|u| u.name.as_str())
            .chain(self.renewable.iter().map(|u| u.name.as_str()))
            .chain(self.storage.iter().map(|u| u.name.as_str()))
            .chain(self.loads.iter().map(|u| u.name.as_str()))
            .collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return reject(w[0], "duplicate unit name");
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.dispatchable.is_empty() && self.renewable.is_empty() && self.storage.is_empty() && self.loads.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyInput {
    /// MW.
    pub fixed_load: f64,
    /// MW per renewable unit, in fleet order.
    pub renewable: Vec<f64>,
    /// Currency per MWh.
    pub price: f64,
    /// °C.
    pub ambient: f64,
    pub grid_connected: bool,
    /// MW.
    pub line_capacity: f64,
    /// Exchange limit as a fraction of the transformer rating.
    pub loading_cap_fraction: f64,
}

impl HourlyInput {
    /// Largest exchange magnitude allowed this hour.
    pub fn exchange_limit(&self, rated_power: f64) -> f64 {
        if self.grid_connected {
            self.line_capacity.min(self.loading_cap_fraction * rated_power)
        } else {
            0.0
        }
    }

    pub fn renewable_total(&self) -> f64 {
        self.renewable.iter().sum()
    }
}
