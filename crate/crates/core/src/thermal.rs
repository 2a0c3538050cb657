//! Insulation aging of an oil-immersed distribution transformer.
//!
//! Each interval is described by the loading ratio at its start (`K^I`) and
//! end (`K^U`) plus the ambient temperature. The steady-state top-oil and
//! hotspot rises at both loadings are blended with first-order exponential
//! responses, giving the hotspot temperature, the aging acceleration factor
//! and the percent of normal insulation life consumed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hotspot temperature at which insulation ages at its nominal rate.
pub const REFERENCE_HOTSPOT_C: f64 = 110.0;
const AGING_B: f64 = 15000.0;
const KELVIN: f64 = 273.0;
pub const HOURS_PER_YEAR: f64 = 8760.0;
/// Loading ratios below this have no usable derivative when `m < 1`.
pub const GRADIENT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermalError {
    #[error("invalid thermal parameter: {0}")]
    InvalidParams(String),
    #[error("series lengths differ: {loading} loading values, {ambient} ambient values")]
    LengthMismatch { loading: usize, ambient: usize },
    #[error("negative loading {value} MW at index {index}")]
    NegativePower { index: usize, value: f64 },
    #[error("empty series")]
    Empty,
    #[error("loading ratio {k} is below the gradient floor {GRADIENT_FLOOR}")]
    DegeneratePoint { k: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformerThermalParams {
    /// Top-oil rise over ambient at rated load, °C.
    pub rated_top_oil_rise: f64,
    /// Hotspot rise over top oil at rated load, °C.
    pub rated_hotspot_rise: f64,
    /// Hours.
    pub tau_top_oil: f64,
    /// Hours.
    pub tau_winding: f64,
    /// Load loss at rated load over no-load loss.
    pub loss_ratio: f64,
    pub exponent_m: f64,
    pub exponent_n: f64,
    /// MW.
    pub rated_power: f64,
    /// Hours.
    pub normal_insulation_life: f64,
    /// Value of one full insulation life, currency units.
    pub investment_cost: f64,
    /// Hours.
    pub interval_length: f64,
}

impl Default for TransformerThermalParams {
    fn default() -> Self {
        Self {
            rated_top_oil_rise: 55.0,
            rated_hotspot_rise: 25.0,
            tau_top_oil: 3.5,
            tau_winding: 0.0833,
            loss_ratio: 3.2,
            exponent_m: 0.8,
            exponent_n: 0.8,
            rated_power: 10.0,
            normal_insulation_life: 180_000.0,
            investment_cost: 150_000.0,
            interval_length: 1.0,
        }
    }
}

impl TransformerThermalParams {
    pub fn validate(&self) -> Result<(), ThermalError> {
        let bad = |what: &str| Err(ThermalError::InvalidParams(what.to_string()));
        let all = [
            self.rated_top_oil_rise,
            self.rated_hotspot_rise,
            self.tau_top_oil,
            self.tau_winding,
            self.loss_ratio,
            self.exponent_m,
            self.exponent_n,
            self.rated_power,
            self.normal_insulation_life,
            self.investment_cost,
            self.interval_length,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("all parameters must be finite");
        }
        if !(0.8..=1.0).contains(&self.exponent_m) || !(0.8..=1.0).contains(&self.exponent_n) {
            return bad("exponents m and n must lie in [0.8, 1.0]");
        }
        for (v, name) in [
            (self.tau_top_oil, "tau_top_oil"),
            (self.tau_winding, "tau_winding"),
            (self.loss_ratio, "loss_ratio"),
            (self.rated_power, "rated_power"),
            (self.normal_insulation_life, "normal_insulation_life"),
            (self.interval_length, "interval_length"),
        ] {
            if v <= 0.0 {
                return bad(&format!("{name} must be positive"));
            }
        }
        if self.rated_top_oil_rise < 0.0 || self.rated_hotspot_rise < 0.0 || self.investment_cost < 0.0 {
            return bad("rated rises and investment cost must be non-negative");
        }
        Ok(())
    }

    fn top_oil_weight(&self) -> f64 {
        1.0 - (-self.interval_length / self.tau_top_oil).exp()
    }

    fn winding_weight(&self) -> f64 {
        1.0 - (-self.interval_length / self.tau_winding).exp()
    }

    fn lol_per_aging(&self) -> f64 {
        self.interval_length * 100.0 / self.normal_insulation_life
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalLoading {
    pub k_initial: f64,
    pub k_ultimate: f64,
    /// °C.
    pub ambient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalThermalResult {
    pub top_oil_rise: f64,
    pub hotspot_rise: f64,
    pub hotspot_temp: f64,
    pub aging_factor: f64,
    pub lol_percent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossGradient {
    pub d_lol_d_k_initial: f64,
    pub d_lol_d_k_ultimate: f64,
}

pub fn aging_acceleration(hotspot_temp: f64) -> f64 {
    (AGING_B / (REFERENCE_HOTSPOT_C + KELVIN) - AGING_B / (hotspot_temp + KELVIN)).exp()
}

fn d_aging_d_temp(hotspot_temp: f64) -> f64 {
    let t = hotspot_temp + KELVIN;
    aging_acceleration(hotspot_temp) * AGING_B / (t * t)
}

/// Steady-state `(top_oil_rise, hotspot_rise)` at loading ratio `k`.
pub fn steady_rises(k: f64, p: &TransformerThermalParams) -> (f64, f64) {
    let r = p.loss_ratio;
    let top = p.rated_top_oil_rise * ((k * k * r + 1.0) / (r + 1.0)).powf(p.exponent_n);
    let hot = p.rated_hotspot_rise * k.powf(2.0 * p.exponent_m);
    (top, hot)
}

fn steady_rise_slopes(k: f64, p: &TransformerThermalParams) -> (f64, f64) {
    let r = p.loss_ratio;
    let base = (k * k * r + 1.0) / (r + 1.0);
    let top = p.rated_top_oil_rise * p.exponent_n * base.powf(p.exponent_n - 1.0) * 2.0 * k * r / (r + 1.0);
    let hot = if k == 0.0 {
        0.0
    } else {
        p.rated_hotspot_rise * 2.0 * p.exponent_m * k.powf(2.0 * p.exponent_m - 1.0)
    };
    (top, hot)
}

pub fn transient_rise(initial_rise: f64, ultimate_rise: f64, tau: f64, dt: f64) -> f64 {
    (ultimate_rise - initial_rise) * (1.0 - (-dt / tau).exp()) + initial_rise
}

pub fn interval_loss_of_life(l: &IntervalLoading, p: &TransformerThermalParams) -> IntervalThermalResult {
    let (top_i, hot_i) = steady_rises(l.k_initial, p);
    let (top_u, hot_u) = steady_rises(l.k_ultimate, p);
    let top_oil_rise = transient_rise(top_i, top_u, p.tau_top_oil, p.interval_length);
    let hotspot_rise = transient_rise(hot_i, hot_u, p.tau_winding, p.interval_length);
    let hotspot_temp = l.ambient + top_oil_rise + hotspot_rise;
    let aging_factor = aging_acceleration(hotspot_temp);
    IntervalThermalResult {
        top_oil_rise,
        hotspot_rise,
        hotspot_temp,
        aging_factor,
        lol_percent: aging_factor * p.lol_per_aging(),
    }
}

pub fn loss_gradient(l: &IntervalLoading, p: &TransformerThermalParams) -> Result<LossGradient, ThermalError> {
    if p.exponent_m < 1.0 {
        for k in [l.k_initial, l.k_ultimate] {
            if !(k >= GRADIENT_FLOOR) {
                return Err(ThermalError::DegeneratePoint { k });
            }
        }
    }
    let res = interval_loss_of_life(l, p);
    let dlol_dtemp = d_aging_d_temp(res.hotspot_temp) * p.lol_per_aging();
    let a = p.top_oil_weight();
    let b = p.winding_weight();
    let (dtop_i, dhot_i) = steady_rise_slopes(l.k_initial, p);
    let (dtop_u, dhot_u) = steady_rise_slopes(l.k_ultimate, p);
    Ok(LossGradient {
        d_lol_d_k_initial: dlol_dtemp * ((1.0 - a) * dtop_i + (1.0 - b) * dhot_i),
        d_lol_d_k_ultimate: dlol_dtemp * (a * dtop_u + b * dhot_u),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonLoss {
    pub total_lol_percent: f64,
    pub expected_lifetime_years: f64,
    pub intervals: Vec<IntervalThermalResult>,
}

/// Loading ratios `(K^I, K^U)` for each interval of an exchange-magnitude
/// series. `initial_mw` is the magnitude just before the first interval;
/// without it the first interval starts in steady state.
pub fn loading_ratios(loading_mw: &[f64], initial_mw: Option<f64>, rated_power: f64) -> Vec<(f64, f64)> {
    let mut prev = initial_mw.or_else(|| loading_mw.first().copied()).unwrap_or(0.0);
    loading_mw
        .iter()
        .map(|&p| {
            let pair = (prev / rated_power, p / rated_power);
            prev = p;
            pair
        })
        .collect()
}

/// Total percent loss of life over a series of transformer loadings (MW,
/// magnitudes) and the lifetime it implies if repeated year-round.
pub fn horizon_loss_of_life(
    loading_mw: &[f64],
    ambient_c: &[f64],
    initial_mw: Option<f64>,
    p: &TransformerThermalParams,
) -> Result<HorizonLoss, ThermalError> {
    p.validate()?;
    if loading_mw.len() != ambient_c.len() {
        return Err(ThermalError::LengthMismatch {
            loading: loading_mw.len(),
            ambient: ambient_c.len(),
        });
    }
    if loading_mw.is_empty() {
        return Err(ThermalError::Empty);
    }
    for (index, &value) in loading_mw.iter().chain(initial_mw.iter()).enumerate() {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(ThermalError::NegativePower { index, value });
        }
    }
    let intervals: Vec<IntervalThermalResult> = loading_ratios(loading_mw, initial_mw, p.rated_power)
        .into_iter()
        .zip(ambient_c)
        .map(|((ki, ku), &ambient)| {
            interval_loss_of_life(
                &IntervalLoading {
                    k_initial: ki,
                    k_ultimate: ku,
                    ambient,
                },
                p,
            )
        })
        .collect();
    let total: f64 = intervals.iter().map(|r| r.lol_percent).sum();
    Ok(HorizonLoss {
        total_lol_percent: total,
        expected_lifetime_years: lifetime_years(total, loading_mw.len(), p),
        intervals,
    })
}

/// Years of life implied by consuming `lol_percent` over `intervals`.
pub fn lifetime_years(lol_percent: f64, intervals: usize, p: &TransformerThermalParams) -> f64 {
    let annual = lol_percent * HOURS_PER_YEAR / (intervals as f64 * p.interval_length);
    100.0 / annual
}
