//! Physical-layer and finite-size parameter sets.
//!
//! All noise variances are expressed in shot-noise units (SNU).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fibre span a transmittance was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberLink {
    pub distance_km: f64,
    pub attenuation_db_per_km: f64,
}

impl FiberLink {
    /// Standard single-mode fibre loss at 1550 nm (dB/km).
    pub const DEFAULT_ATTENUATION: f64 = 0.2;

    /// Power transmittance `10^(-α·L/10)` of the span.
    pub fn transmittance(&self) -> f64 {
        10f64.powf(-self.attenuation_db_per_km * self.distance_km / 10.0)
    }
}

/// Channel and detector parameters of a CV-QKD link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Present when the transmittance was derived from a fibre length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<FiberLink>,
    /// Channel transmittance `T` in `(0, 1]`.
    pub transmittance: f64,
    /// Excess noise `ξ` referred to the channel input (SNU).
    pub excess_noise: f64,
    /// Detector efficiency `η` in `(0, 1]`.
    pub detector_efficiency: f64,
    /// Detector electronic noise `v_el` (SNU).
    pub electronic_noise: f64,
}

impl ChannelParams {
    /// Builds a parameter set from an explicit transmittance.
    pub fn new(
        transmittance: f64,
        excess_noise: f64,
        detector_efficiency: f64,
        electronic_noise: f64,
    ) -> Result<Self> {
        let params = Self {
            link: None,
            transmittance,
            excess_noise,
            detector_efficiency,
            electronic_noise,
        };
        params.validate()?;
        Ok(params)
    }

    /// Builds a parameter set whose transmittance follows from fibre loss.
    pub fn from_fiber(
        distance_km: f64,
        attenuation_db_per_km: f64,
        excess_noise: f64,
        detector_efficiency: f64,
        electronic_noise: f64,
    ) -> Result<Self> {
        if !(distance_km >= 0.0 && distance_km.is_finite()) {
            return Err(Error::invalid("distance_km", "must be a finite non-negative length"));
        }
        if !(attenuation_db_per_km >= 0.0 && attenuation_db_per_km.is_finite()) {
            return Err(Error::invalid("attenuation_db_per_km", "must be finite and non-negative"));
        }
        let link = FiberLink {
            distance_km,
            attenuation_db_per_km,
        };
        let params = Self {
            link: Some(link),
            transmittance: link.transmittance(),
            excess_noise,
            detector_efficiency,
            electronic_noise,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.transmittance;
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::invalid("transmittance", format!("{t} is not in (0, 1]")));
        }
        let eta = self.detector_efficiency;
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::invalid("detector_efficiency", format!("{eta} is not in (0, 1]")));
        }
        if !(self.excess_noise >= 0.0 && self.excess_noise.is_finite()) {
            return Err(Error::invalid("excess_noise", "must be finite and non-negative"));
        }
        if !(self.electronic_noise >= 0.0 && self.electronic_noise.is_finite()) {
            return Err(Error::invalid("electronic_noise", "must be finite and non-negative"));
        }
        if let Some(link) = self.link {
            if (link.transmittance() - t).abs() >= 1e-12 {
                return Err(Error::invalid(
                    "transmittance",
                    "disagrees with the fibre length and attenuation it was derived from",
                ));
            }
        }
        Ok(())
    }

    /// Same parameters with a different excess noise.
    pub fn with_excess_noise(self, excess_noise: f64) -> Self {
        Self { excess_noise, ..self }
    }

    /// Same parameters with a different electronic noise.
    pub fn with_electronic_noise(self, electronic_noise: f64) -> Self {
        Self {
            electronic_noise,
            ..self
        }
    }

    /// Amplitude transmission `t = √(ηT)` seen at Bob's detector output.
    pub fn amplitude(&self) -> f64 {
        (self.detector_efficiency * self.transmittance).sqrt()
    }

    /// Variance of Bob's conditional noise, `σ_z² = ηTξ + v_el + 1`.
    pub fn sigma_z_sq(&self) -> f64 {
        self.detector_efficiency * self.transmittance * self.excess_noise + self.electronic_noise + 1.0
    }
}

/// Detection scheme and the protocol attached to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// GG02, one quadrature measured per pulse.
    HomodyneGg02,
    /// No-switching protocol, both quadratures measured per pulse.
    HeterodyneNoSwitching,
}

impl Protocol {
    /// Number of quadratures carrying key material per pulse.
    pub fn mu(self) -> u32 {
        match self {
            Protocol::HomodyneGg02 => 1,
            Protocol::HeterodyneNoSwitching => 2,
        }
    }

    pub fn from_mu(mu: u32) -> Option<Self> {
        match mu {
            1 => Some(Protocol::HomodyneGg02),
            2 => Some(Protocol::HeterodyneNoSwitching),
            _ => None,
        }
    }

    /// Detector-added noise referred to Bob's input.
    pub fn detector_noise(self, params: &ChannelParams) -> f64 {
        let eta = params.detector_efficiency;
        let vel = params.electronic_noise;
        match self {
            Protocol::HomodyneGg02 => (1.0 + vel) / eta - 1.0,
            Protocol::HeterodyneNoSwitching => (2.0 + 2.0 * vel) / eta - 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Protocol::HomodyneGg02 => "homodyne",
            Protocol::HeterodyneNoSwitching => "heterodyne",
        }
    }
}

impl std::str::FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "homodyne" | "homodyne_gg02" | "gg02" => Ok(Protocol::HomodyneGg02),
            "heterodyne" | "heterodyne_no_switching" | "no_switching" => {
                Ok(Protocol::HeterodyneNoSwitching)
            }
            other => Err(Error::invalid(
                "protocol",
                format!("unknown protocol `{other}` (expected homodyne or heterodyne)"),
            )),
        }
    }
}

/// Block-length regime of the key-rate computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    /// `N` symbols, `n` of them kept for key distillation and `m = N - n`
    /// disclosed for parameter estimation.
    Finite { block_size: u64, key_length: u64 },
    /// Infinite-sample limit. `Δ(n) = 0`, the channel is known exactly, and
    /// the key fraction `n/N` is kept as a prefactor.
    Asymptotic { key_ratio: f64 },
}

/// Block sizes and security parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteSizeConfig {
    pub regime: Regime,
    pub eps_pe: f64,
    pub eps_bar: f64,
    pub eps_pa: f64,
    /// Confidence coefficient `z_{ε_PE/2}`.
    pub confidence_coeff: f64,
}

pub const DEFAULT_EPSILON: f64 = 1e-10;
pub const DEFAULT_CONFIDENCE_COEFF: f64 = 6.5;

impl FiniteSizeConfig {
    /// Finite block of `block_size` symbols of which `key_length` feed the key.
    pub fn finite(block_size: u64, key_length: u64) -> Result<Self> {
        if key_length == 0 {
            return Err(Error::invalid("key_length", "n must be at least 1"));
        }
        if key_length >= block_size {
            return Err(Error::invalid(
                "key_length",
                format!("n = {key_length} leaves no parameter-estimation symbols in N = {block_size}"),
            ));
        }
        Ok(Self {
            regime: Regime::Finite {
                block_size,
                key_length,
            },
            eps_pe: DEFAULT_EPSILON,
            eps_bar: DEFAULT_EPSILON,
            eps_pa: DEFAULT_EPSILON,
            confidence_coeff: DEFAULT_CONFIDENCE_COEFF,
        })
    }

    /// Finite block split evenly, `n = N/2`.
    pub fn half_split(block_size: u64) -> Result<Self> {
        Self::finite(block_size, block_size / 2)
    }

    /// Asymptotic limit keeping the default `n/N = 1/2` prefactor.
    pub fn asymptotic() -> Self {
        Self::asymptotic_with_ratio(0.5)
    }

    pub fn asymptotic_with_ratio(key_ratio: f64) -> Self {
        Self {
            regime: Regime::Asymptotic { key_ratio },
            eps_pe: DEFAULT_EPSILON,
            eps_bar: DEFAULT_EPSILON,
            eps_pa: DEFAULT_EPSILON,
            confidence_coeff: DEFAULT_CONFIDENCE_COEFF,
        }
    }

    pub fn with_confidence_coeff(self, confidence_coeff: f64) -> Self {
        Self {
            confidence_coeff,
            ..self
        }
    }

    pub fn with_epsilons(self, eps_pe: f64, eps_bar: f64, eps_pa: f64) -> Self {
        Self {
            eps_pe,
            eps_bar,
            eps_pa,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, eps) in [("eps_pe", self.eps_pe), ("eps_bar", self.eps_bar), ("eps_pa", self.eps_pa)] {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::invalid(name, format!("{eps} is not a probability in (0, 1)")));
            }
        }
        if !(self.confidence_coeff > 0.0 && self.confidence_coeff.is_finite()) {
            return Err(Error::invalid("confidence_coeff", "must be positive"));
        }
        match self.regime {
            Regime::Finite {
                block_size,
                key_length,
            } => {
                if key_length == 0 || key_length >= block_size {
                    return Err(Error::invalid("key_length", "need 1 <= n < N"));
                }
            }
            Regime::Asymptotic { key_ratio } => {
                if !(key_ratio > 0.0 && key_ratio <= 1.0) {
                    return Err(Error::invalid("key_ratio", "must be in (0, 1]"));
                }
            }
        }
        Ok(())
    }

    pub fn is_asymptotic(&self) -> bool {
        matches!(self.regime, Regime::Asymptotic { .. })
    }

    /// Prefactor `n/N`.
    pub fn key_ratio(&self) -> f64 {
        match self.regime {
            Regime::Finite {
                block_size,
                key_length,
            } => key_length as f64 / block_size as f64,
            Regime::Asymptotic { key_ratio } => key_ratio,
        }
    }

    /// `N`, or `None` in the asymptotic regime.
    pub fn block_size(&self) -> Option<u64> {
        match self.regime {
            Regime::Finite { block_size, .. } => Some(block_size),
            Regime::Asymptotic { .. } => None,
        }
    }

    /// `n`, or `None` in the asymptotic regime.
    pub fn key_length(&self) -> Option<u64> {
        match self.regime {
            Regime::Finite { key_length, .. } => Some(key_length),
            Regime::Asymptotic { .. } => None,
        }
    }

    /// `m = N - n`, or `None` in the asymptotic regime.
    pub fn pe_length(&self) -> Option<u64> {
        match self.regime {
            Regime::Finite {
                block_size,
                key_length,
            } => Some(block_size - key_length),
            Regime::Asymptotic { .. } => None,
        }
    }
}

impl Default for FiniteSizeConfig {
    fn default() -> Self {
        Self::asymptotic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fiber_transmittance_matches_loss_formula() {
        let p = ChannelParams::from_fiber(50.0, 0.2, 0.005, 0.606, 0.041).unwrap();
        assert!((p.transmittance - 0.1).abs() < 1e-12);
        let p = ChannelParams::from_fiber(25.0, 0.2, 0.022, 0.56, 0.042).unwrap();
        assert!((p.transmittance - 10f64.powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        assert!(ChannelParams::new(0.0, 0.0, 0.5, 0.0).is_err());
        assert!(ChannelParams::new(1.5, 0.0, 0.5, 0.0).is_err());
        assert!(ChannelParams::new(0.1, -1e-3, 0.5, 0.0).is_err());
        assert!(ChannelParams::new(0.1, 0.0, 0.0, 0.0).is_err());
        assert!(ChannelParams::new(0.1, 0.0, 0.5, -0.1).is_err());
        assert!(ChannelParams::new(1.0, 0.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn protocol_mu_round_trips() {
        for p in [Protocol::HomodyneGg02, Protocol::HeterodyneNoSwitching] {
            assert_eq!(Protocol::from_mu(p.mu()), Some(p));
        }
        assert_eq!(Protocol::from_mu(3), None);
        assert_eq!("heterodyne".parse::<Protocol>().unwrap(), Protocol::HeterodyneNoSwitching);
    }

    #[test]
    fn finite_split_bookkeeping() {
        let fs = FiniteSizeConfig::half_split(200_000_000).unwrap();
        assert_eq!(fs.key_length(), Some(100_000_000));
        assert_eq!(fs.pe_length(), Some(100_000_000));
        assert_eq!(fs.key_ratio(), 0.5);
        assert_eq!(fs.eps_pe, 1e-10);
        assert_eq!(fs.confidence_coeff, 6.5);
        assert!(FiniteSizeConfig::finite(10, 10).is_err());
        assert!(FiniteSizeConfig::finite(10, 0).is_err());
        let asym = FiniteSizeConfig::asymptotic();
        assert!(asym.is_asymptotic());
        assert_eq!(asym.key_ratio(), 0.5);
        assert_eq!(asym.pe_length(), None);
    }
}
