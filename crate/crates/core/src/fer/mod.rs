//! Frame-error-rate curves as functions of the modulation variance.
//!
//! A [`FerModel`] is piecewise: FER is 1 below `va_lo`, 0 above `va_hi`, and a
//! clamped sum of Gaussian bumps in between. The curve is tied to the channel
//! it was measured on, and [`reanchor_to_snr`] transports it to another
//! channel by matching decoder SNR.

mod fit;
mod measurement;
mod published;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{total_noise, ChannelParams, Protocol, WorstCaseBounds};

pub use fit::{fit_fer, fit_fer_with, FitOptions, FitReport};
pub use measurement::{FerMeasurementSet, FerPoint};
pub use published::{heterodyne_printed, homodyne_reference, HETERODYNE_REFERENCE_CHANNEL, HOMODYNE_REFERENCE_CHANNEL};

/// Most components a model may carry.
pub const MAX_COMPONENTS: usize = 4;

/// One term `a·exp(−((V_A − b)/c)²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    #[serde(rename = "a")]
    pub amplitude: f64,
    #[serde(rename = "b")]
    pub center: f64,
    #[serde(rename = "c")]
    pub width: f64,
}

impl GaussianComponent {
    pub fn new(amplitude: f64, center: f64, width: f64) -> Self {
        Self {
            amplitude,
            center,
            width,
        }
    }

    pub fn eval(&self, v_a: f64) -> f64 {
        let u = (v_a - self.center) / self.width;
        self.amplitude * (-u * u).exp()
    }
}

/// Channel a FER curve was measured under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceChannel {
    #[serde(rename = "T")]
    pub transmittance: f64,
    #[serde(rename = "xi")]
    pub excess_noise: f64,
    #[serde(rename = "eta")]
    pub detector_efficiency: f64,
    #[serde(rename = "vel")]
    pub electronic_noise: f64,
    pub protocol: Protocol,
}

impl ReferenceChannel {
    pub fn new(params: &ChannelParams, protocol: Protocol) -> Self {
        Self {
            transmittance: params.transmittance,
            excess_noise: params.excess_noise,
            detector_efficiency: params.detector_efficiency,
            electronic_noise: params.electronic_noise,
            protocol,
        }
    }

    pub fn params(&self) -> Result<ChannelParams> {
        ChannelParams::new(
            self.transmittance,
            self.excess_noise,
            self.detector_efficiency,
            self.electronic_noise,
        )
    }
}

/// Anything that maps a modulation variance to a frame error rate.
pub trait FerCurve: Send + Sync {
    fn fer(&self, v_a: f64) -> f64;
}

impl<F: Fn(f64) -> f64 + Send + Sync> FerCurve for F {
    fn fer(&self, v_a: f64) -> f64 {
        self(v_a).clamp(0.0, 1.0)
    }
}

/// Piecewise Gaussian-mixture FER curve of one parity-check matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerModel {
    pub code_id: String,
    pub va_lo: f64,
    pub va_hi: f64,
    pub components: Vec<GaussianComponent>,
    pub reference: ReferenceChannel,
}

impl FerModel {
    pub fn new(
        code_id: impl Into<String>,
        va_lo: f64,
        va_hi: f64,
        components: Vec<GaussianComponent>,
        reference: ReferenceChannel,
    ) -> Result<Self> {
        let model = Self {
            code_id: code_id.into(),
            va_lo,
            va_hi,
            components,
            reference,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.va_lo > 0.0 && self.va_lo < self.va_hi && self.va_hi.is_finite()) {
            return Err(Error::invalid(
                "va_lo",
                format!("window [{}, {}] must satisfy 0 < va_lo < va_hi", self.va_lo, self.va_hi),
            ));
        }
        if self.components.len() > MAX_COMPONENTS {
            return Err(Error::invalid(
                "components",
                format!("{} components, at most {MAX_COMPONENTS} allowed", self.components.len()),
            ));
        }
        if let Some(c) = self.components.iter().find(|c| !(c.width > 0.0) || !c.amplitude.is_finite()) {
            return Err(Error::invalid("components", format!("bad component {c:?}")));
        }
        self.reference.params()?;
        Ok(())
    }

    /// Raw mixture value, unclamped.
    pub fn mixture(&self, v_a: f64) -> f64 {
        self.components.iter().map(|c| c.eval(v_a)).sum()
    }

    /// FER at `v_a`.
    pub fn eval(&self, v_a: f64) -> f64 {
        if v_a < self.va_lo {
            1.0
        } else if v_a > self.va_hi {
            0.0
        } else {
            self.mixture(v_a).clamp(0.0, 1.0)
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(s)?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }
}

impl FerCurve for FerModel {
    fn fer(&self, v_a: f64) -> f64 {
        self.eval(v_a)
    }
}

/// A [`FerModel`] transported to a new channel by SNR matching.
#[derive(Debug, Clone, PartialEq)]
pub struct Reanchored {
    pub model: FerModel,
    /// `(1 + χ_ref) / (1 + χ_new)`: a query `V_A` is read off the model at
    /// `scale · V_A`.
    pub scale: f64,
}

impl Reanchored {
    /// Modulation variance on the reference curve equivalent to `v_a`.
    pub fn reference_va(&self, v_a: f64) -> f64 {
        self.scale * v_a
    }

    /// The re-anchored window `[va_lo, va_hi]` in the new channel's units.
    pub fn window(&self) -> (f64, f64) {
        (self.model.va_lo / self.scale, self.model.va_hi / self.scale)
    }
}

impl FerCurve for Reanchored {
    fn fer(&self, v_a: f64) -> f64 {
        self.model.eval(self.reference_va(v_a))
    }
}

/// Re-expresses `model` for `new_params`/`new_protocol`.
///
/// Decoder performance depends only on SNR, so a query `V_A` on the new
/// channel is mapped to the reference `V_A′` producing the same nominal SNR.
pub fn reanchor_to_snr(model: &FerModel, new_params: &ChannelParams, new_protocol: Protocol) -> Result<Reanchored> {
    let reference = model.reference.params()?;
    let chi_ref = total_noise(&reference, model.reference.protocol, &WorstCaseBounds::nominal(&reference))?;
    let chi_new = total_noise(new_params, new_protocol, &WorstCaseBounds::nominal(new_params))?;
    if !(chi_ref.is_finite() && chi_new.is_finite()) {
        return Err(Error::Domain("reference noise is not finite".into()));
    }
    Ok(Reanchored {
        model: model.clone(),
        scale: (1.0 + chi_ref) / (1.0 + chi_new),
    })
}
