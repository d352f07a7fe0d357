//! Three ways of choosing `V_A`: fixed SNR, an objective with assumed
//! efficiency and FER, and the full optimisation.

use serde::{Deserialize, Serialize};

use super::{maximize, optimize_va_with, SearchOptions};
use crate::error::{Error, Result};
use crate::fer::FerCurve;
use crate::model::{skr_finite, total_noise, ChannelParams, FiniteSizeConfig, Protocol, WorstCaseBounds};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodSettings {
    /// SNR at which method one operates.
    pub fixed_snr: f64,
    /// Efficiency assumed by method two.
    pub assumed_beta: f64,
    /// FER assumed by method two.
    pub assumed_fer: f64,
}

impl Default for MethodSettings {
    fn default() -> Self {
        Self {
            fixed_snr: 0.1610,
            assumed_beta: 0.92,
            assumed_fer: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRecord {
    pub method: String,
    pub v_a: f64,
    pub beta: f64,
    pub snr: f64,
    pub fer: f64,
    pub skr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodComparison {
    pub code_rate: f64,
    pub settings: MethodSettings,
    pub method_one: MethodRecord,
    pub method_two: MethodRecord,
    pub ours: MethodRecord,
    /// `(K_ours − K_one)/K_one · 100`.
    pub improvement_over_one: f64,
    pub improvement_over_two: f64,
}

pub fn improvement(ours: f64, other: f64) -> f64 {
    (ours - other) / other * 100.0
}

fn round_to(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

impl MethodComparison {
    pub fn records(&self) -> [&MethodRecord; 3] {
        [&self.method_one, &self.method_two, &self.ours]
    }

    /// The comparison as printed in a results table: SKR and FER to four
    /// decimals, `V_A` to four, efficiency and SNR to four, with
    /// improvements recomputed from the rounded rates.
    pub fn tabulated(&self) -> Self {
        let round = |r: &MethodRecord| MethodRecord {
            method: r.method.clone(),
            v_a: round_to(r.v_a, 4),
            beta: round_to(r.beta, 4),
            snr: round_to(r.snr, 4),
            fer: round_to(r.fer, 4),
            skr: round_to(r.skr, 4),
        };
        let (one, two, ours) = (round(&self.method_one), round(&self.method_two), round(&self.ours));
        Self {
            code_rate: self.code_rate,
            settings: self.settings,
            improvement_over_one: improvement(ours.skr, one.skr),
            improvement_over_two: improvement(ours.skr, two.skr),
            method_one: one,
            method_two: two,
            ours,
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn compare_methods(
    params: &ChannelParams,
    protocol: Protocol,
    fs: &FiniteSizeConfig,
    code_rate: f64,
    fer: &dyn FerCurve,
    settings: &MethodSettings,
    search: &SearchOptions,
) -> Result<MethodComparison> {
    if !(settings.fixed_snr > 0.0) {
        return Err(Error::invalid("fixed_snr", "must be positive"));
    }
    if !(settings.assumed_beta > 0.0 && settings.assumed_beta <= 1.0) {
        return Err(Error::invalid("assumed_beta", "must be in (0, 1]"));
    }
    if !(0.0..1.0).contains(&settings.assumed_fer) {
        return Err(Error::invalid("assumed_fer", "must be in [0, 1)"));
    }
    let record = |method: &str, v_a: f64| -> Result<MethodRecord> {
        let b = skr_finite(params, protocol, fs, v_a, code_rate, fer.fer(v_a))?;
        Ok(MethodRecord {
            method: method.into(),
            v_a,
            beta: b.beta,
            snr: b.snr,
            fer: b.fer,
            skr: b.skr,
        })
    };

    // Method one: V_A set by the target SNR on the nominal channel.
    let chi = total_noise(params, protocol, &WorstCaseBounds::nominal(params))?;
    let method_one = record("method_one", settings.fixed_snr * (1.0 + chi))?;

    // Method two: optimise with the assumed efficiency and FER, then
    // evaluate what the real code delivers there.
    let assumed = |v: f64| {
        let b = skr_finite(params, protocol, fs, v, code_rate, settings.assumed_fer).ok()?;
        Some(b.key_ratio * (1.0 - settings.assumed_fer) * (settings.assumed_beta * b.mutual_info - b.holevo - b.delta_n))
    };
    let (best, _) = maximize(assumed, search);
    let (v_two, _) = best.ok_or_else(|| Error::NoFeasiblePoint("method two objective undefined everywhere".into()))?;
    let method_two = record("method_two", v_two)?;

    let opt = optimize_va_with(params, protocol, fs, code_rate, fer, search)?;
    let ours = record("ours", opt.v_a_opt)?;

    Ok(MethodComparison {
        code_rate,
        settings: *settings,
        improvement_over_one: improvement(ours.skr, method_one.skr),
        improvement_over_two: improvement(ours.skr, method_two.skr),
        method_one,
        method_two,
        ours,
    })
}
