//! One-parameter studies: each grid point is an independent optimisation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{optimize_va_with, SearchOptions};
use crate::error::{Error, Result};
use crate::fer::{reanchor_to_snr, FerCurve, FerModel};
use crate::model::{skr_finite, ChannelParams, FiniteSizeConfig, Protocol};

pub const SWEEP_CSV_HEADER: [&str; 7] = ["axis", "va_opt", "skr_opt", "beta", "fer", "snr", "error"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Key rate at each listed `V_A`, no optimisation.
    VA,
    /// Excess noise ξ.
    Xi,
    /// Electronic noise v_el.
    Vel,
    /// Block size N with n = N/2; `inf` selects the asymptotic regime.
    N,
    /// Code rate, choosing the candidate code of that rate.
    Code,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            Self::VA => "v_a",
            Self::Xi => "xi",
            Self::Vel => "vel",
            Self::N => "N",
            Self::Code => "code",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v_a" | "va" => Ok(Self::VA),
            "xi" => Ok(Self::Xi),
            "vel" | "v_el" => Ok(Self::Vel),
            "N" | "n" | "block_size" => Ok(Self::N),
            "code" | "rate" => Ok(Self::Code),
            other => Err(Error::invalid("axis", format!("unknown axis `{other}` (v_a, xi, vel, N, code)"))),
        }
    }
}

/// How the FER curve follows the swept channel.
#[derive(Debug, Clone, PartialEq)]
pub enum FerSource {
    /// Evaluate the model as measured, whatever the channel.
    Fixed(FerModel),
    /// Transport the model to each point's channel by SNR matching.
    Reanchored(FerModel),
}

impl FerSource {
    pub fn model(&self) -> &FerModel {
        match self {
            Self::Fixed(m) | Self::Reanchored(m) => m,
        }
    }

    pub fn curve_for(&self, params: &ChannelParams, protocol: Protocol) -> Result<Box<dyn FerCurve>> {
        Ok(match self {
            Self::Fixed(m) => Box::new(m.clone()),
            Self::Reanchored(m) => Box::new(reanchor_to_snr(m, params, protocol)?),
        })
    }

    fn with_model(&self, model: FerModel) -> Self {
        match self {
            Self::Fixed(_) => Self::Fixed(model),
            Self::Reanchored(_) => Self::Reanchored(model),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub params: ChannelParams,
    pub protocol: Protocol,
    pub finite_size: FiniteSizeConfig,
    pub code_rate: f64,
    pub fer: FerSource,
    /// Candidate `(rate, model)` pairs for the code axis.
    pub codes: Vec<(f64, FerModel)>,
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub search: SearchOptions,
}

impl SweepSpec {
    pub fn new(
        params: ChannelParams,
        protocol: Protocol,
        finite_size: FiniteSizeConfig,
        code_rate: f64,
        fer: FerSource,
        axis: SweepAxis,
        grid: Vec<f64>,
    ) -> Self {
        Self {
            params,
            protocol,
            finite_size,
            code_rate,
            fer,
            codes: Vec::new(),
            axis,
            grid,
            search: SearchOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: f64,
    pub va_opt: f64,
    pub skr_opt: f64,
    pub beta: f64,
    pub fer: f64,
    pub snr: f64,
    /// Set when this grid point failed; the numeric fields are then NaN.
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(axis: f64, err: Error) -> Self {
        Self {
            axis,
            va_opt: f64::NAN,
            skr_opt: f64::NAN,
            beta: f64::NAN,
            fer: f64::NAN,
            snr: f64::NAN,
            error: Some(err.to_string()),
        }
    }
}

fn point(spec: &SweepSpec, x: f64) -> Result<SweepRow> {
    let mut params = spec.params;
    let mut fs = spec.finite_size;
    let mut code_rate = spec.code_rate;
    let mut source = spec.fer.clone();
    match spec.axis {
        SweepAxis::VA => {}
        SweepAxis::Xi => params = params.with_excess_noise(x),
        SweepAxis::Vel => params = params.with_electronic_noise(x),
        SweepAxis::N => {
            fs = if x.is_infinite() {
                FiniteSizeConfig::asymptotic().with_epsilons(fs.eps_pe, fs.eps_bar, fs.eps_pa)
            } else {
                if !(x >= 2.0 && x.fract() == 0.0) {
                    return Err(Error::invalid("N", format!("{x} is not a block size")));
                }
                FiniteSizeConfig::half_split(x as u64)?
                    .with_epsilons(fs.eps_pe, fs.eps_bar, fs.eps_pa)
                    .with_confidence_coeff(fs.confidence_coeff)
            };
        }
        SweepAxis::Code => {
            let (rate, model) = spec
                .codes
                .iter()
                .find(|(r, _)| (r - x).abs() < 1e-12)
                .ok_or_else(|| Error::invalid("code", format!("no candidate code of rate {x}")))?;
            code_rate = *rate;
            source = source.with_model(model.clone());
        }
    }
    params.validate()?;
    let curve = source.curve_for(&params, spec.protocol)?;
    if spec.axis == SweepAxis::VA {
        let b = skr_finite(&params, spec.protocol, &fs, x, code_rate, curve.fer(x))?;
        return Ok(SweepRow {
            axis: x,
            va_opt: x,
            skr_opt: b.skr,
            beta: b.beta,
            fer: b.fer,
            snr: b.snr,
            error: None,
        });
    }
    let r = optimize_va_with(&params, spec.protocol, &fs, code_rate, curve.as_ref(), &spec.search)?;
    Ok(SweepRow {
        axis: x,
        va_opt: r.v_a_opt,
        skr_opt: r.skr_opt,
        beta: r.breakdown.beta,
        fer: r.breakdown.fer,
        snr: r.breakdown.snr,
        error: None,
    })
}

/// Evaluates every grid point in parallel; rows come back in grid order and
/// a failing point yields a row carrying the error instead of aborting.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.grid.is_empty() {
        return Err(Error::invalid("grid", "sweep grid is empty"));
    }
    if let Some(w) = spec.grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::invalid(
            "grid",
            format!("grid must be strictly increasing ({} then {})", w[0], w[1]),
        ));
    }
    Ok(spec
        .grid
        .par_iter()
        .map(|&x| point(spec, x).unwrap_or_else(|e| SweepRow::failed(x, e)))
        .collect())
}
