//! Mutual information, finite-size corrections and the secret key rate.

use serde::{Deserialize, Serialize};

use super::holevo::holevo_bound;
use super::params::{ChannelParams, FiniteSizeConfig, Protocol};
use crate::error::{Error, Result};

/// Worst-case channel certified by parameter estimation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseBounds {
    /// Lower bound `T_min` on the transmittance.
    pub transmittance_min: f64,
    /// Upper bound `ξ_max` on the excess noise (SNU).
    pub excess_noise_max: f64,
    /// Nominal amplitude transmission `t = √(ηT)`.
    pub amplitude: f64,
    /// Nominal `σ_z² = ηTξ + v_el + 1` (SNU).
    pub sigma_z_sq: f64,
}

impl WorstCaseBounds {
    /// Bounds equal to the nominal channel (infinite estimation sample).
    pub fn nominal(params: &ChannelParams) -> Self {
        Self {
            transmittance_min: params.transmittance,
            excess_noise_max: params.excess_noise,
            amplitude: params.amplitude(),
            sigma_z_sq: params.sigma_z_sq(),
        }
    }
}

/// Worst-case `(T_min, ξ_max)` given `m` estimation symbols at modulation `v_a`.
pub fn finite_size_bounds(params: &ChannelParams, fs: &FiniteSizeConfig, v_a: f64) -> Result<WorstCaseBounds> {
    check_modulation(v_a)?;
    let Some(m) = fs.pe_length() else {
        return Ok(WorstCaseBounds::nominal(params));
    };
    let m = m as f64;
    let z = fs.confidence_coeff;
    let eta = params.detector_efficiency;
    let t = params.amplitude();
    let sigma_z_sq = params.sigma_z_sq();

    let delta_t = z * (sigma_z_sq / (m * v_a)).sqrt();
    let delta_sigma_sq = z * sigma_z_sq * std::f64::consts::SQRT_2 / m.sqrt();
    let t_min = t - delta_t;
    if t_min <= 0.0 {
        return Err(Error::Domain(format!(
            "worst-case amplitude t - Δt = {t_min:.3e} is not positive; \
             m = {m:.3e} estimation symbols cannot certify the channel at V_A = {v_a}"
        )));
    }
    Ok(WorstCaseBounds {
        transmittance_min: t_min * t_min / eta,
        excess_noise_max: (sigma_z_sq + delta_sigma_sq - params.electronic_noise - 1.0)
            / (eta * params.transmittance),
        amplitude: t,
        sigma_z_sq,
    })
}

/// Noise contributions referred to the channel input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct NoiseBudget {
    pub transmittance: f64,
    pub chi_line: f64,
    pub chi_det: f64,
    pub chi_tot: f64,
}

impl NoiseBudget {
    pub(crate) fn new(params: &ChannelParams, protocol: Protocol, bounds: &WorstCaseBounds) -> Result<Self> {
        let t_min = bounds.transmittance_min;
        if !(t_min > 0.0) {
            return Err(Error::Domain(format!(
                "worst-case transmittance T_min = {t_min:.3e} collapsed to zero"
            )));
        }
        let chi_line = (1.0 - t_min) / t_min + bounds.excess_noise_max;
        let chi_det = protocol.detector_noise(params);
        Ok(Self {
            transmittance: t_min,
            chi_line,
            chi_det,
            chi_tot: chi_line + chi_det / t_min,
        })
    }
}

/// Total noise `χ_tot` referred to the channel input.
pub fn total_noise(params: &ChannelParams, protocol: Protocol, bounds: &WorstCaseBounds) -> Result<f64> {
    NoiseBudget::new(params, protocol, bounds).map(|b| b.chi_tot)
}

pub(crate) fn check_modulation(v_a: f64) -> Result<()> {
    if v_a > 0.0 && v_a.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("v_a", "v_a must be positive"))
    }
}

/// Signal-to-noise ratio `V_A / (1 + χ_tot)` of one quadrature.
pub fn snr(params: &ChannelParams, protocol: Protocol, v_a: f64, bounds: &WorstCaseBounds) -> Result<f64> {
    check_modulation(v_a)?;
    let noise = NoiseBudget::new(params, protocol, bounds)?;
    Ok(v_a / (1.0 + noise.chi_tot))
}

/// Alice–Bob mutual information in bits per pulse.
///
/// `μ/2 · log2((V + χ_tot)/(1 + χ_tot))` with `V = V_A + 1`.
pub fn mutual_information(
    params: &ChannelParams,
    protocol: Protocol,
    v_a: f64,
    bounds: &WorstCaseBounds,
) -> Result<f64> {
    check_modulation(v_a)?;
    let noise = NoiseBudget::new(params, protocol, bounds)?;
    Ok(mutual_information_from(protocol, v_a, noise.chi_tot))
}

pub(crate) fn mutual_information_from(protocol: Protocol, v_a: f64, chi_tot: f64) -> f64 {
    // ln_1p keeps full precision as V_A -> 0.
    let ratio = v_a / (1.0 + chi_tot);
    0.5 * protocol.mu() as f64 * ratio.ln_1p() / std::f64::consts::LN_2
}

/// Reconciliation efficiency `β = μR / I`.
///
/// The result is not clamped; `β > 1` marks an operating point the code
/// cannot reach.
pub fn reconciliation_efficiency(code_rate: f64, mutual_info: f64, protocol: Protocol) -> Result<f64> {
    if !(mutual_info > 0.0) {
        return Err(Error::invalid("mutual_info", "must be positive"));
    }
    Ok(protocol.mu() as f64 * code_rate / mutual_info)
}

/// Privacy-amplification penalty `Δ(n)`; zero in the asymptotic regime.
pub fn delta_n(fs: &FiniteSizeConfig) -> f64 {
    match fs.key_length() {
        None => 0.0,
        Some(n) => {
            let n = n as f64;
            7.0 * ((1.0 / fs.eps_bar).log2() / n).sqrt() + 2.0 / n * (1.0 / fs.eps_pa).log2()
        }
    }
}

/// Every intermediate quantity of one key-rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkrBreakdown {
    /// Secret key rate (bits/pulse); may be negative.
    pub skr: f64,
    pub mutual_info: f64,
    pub beta: f64,
    pub holevo: f64,
    pub delta_n: f64,
    pub fer: f64,
    pub snr: f64,
    pub key_ratio: f64,
    pub v_a: f64,
    pub code_rate: f64,
    pub bounds: WorstCaseBounds,
}

impl SkrBreakdown {
    pub fn is_positive(&self) -> bool {
        self.skr > 0.0
    }

    /// `β ∈ [0, 1]`.
    pub fn is_feasible(&self) -> bool {
        (0.0..=1.0).contains(&self.beta)
    }
}

/// Finite-size secret key rate of a code of rate `code_rate` failing with
/// probability `fer` at modulation variance `v_a`.
///
/// `K = (n/N)·(1 − FER)·(μR − S − Δ(n))`, the Holevo term evaluated on the
/// worst-case channel.
pub fn skr_finite(
    params: &ChannelParams,
    protocol: Protocol,
    fs: &FiniteSizeConfig,
    v_a: f64,
    code_rate: f64,
    fer: f64,
) -> Result<SkrBreakdown> {
    check_modulation(v_a)?;
    if !(0.0..=1.0).contains(&fer) {
        return Err(Error::invalid("fer", format!("{fer} is not a probability")));
    }
    let bounds = finite_size_bounds(params, fs, v_a)?;
    skr_with_bounds(params, protocol, fs, v_a, code_rate, fer, &bounds)
}

pub(crate) fn skr_with_bounds(
    params: &ChannelParams,
    protocol: Protocol,
    fs: &FiniteSizeConfig,
    v_a: f64,
    code_rate: f64,
    fer: f64,
    bounds: &WorstCaseBounds,
) -> Result<SkrBreakdown> {
    let noise = NoiseBudget::new(params, protocol, bounds)?;
    let mutual_info = mutual_information_from(protocol, v_a, noise.chi_tot);
    let holevo = holevo_bound(params, protocol, v_a, bounds)?;
    let delta = delta_n(fs);
    let key_ratio = fs.key_ratio();
    let mu_r = protocol.mu() as f64 * code_rate;
    let beta = if mutual_info > 0.0 { mu_r / mutual_info } else { f64::INFINITY };
    Ok(SkrBreakdown {
        skr: key_ratio * (1.0 - fer) * (mu_r - holevo - delta),
        mutual_info,
        beta,
        holevo,
        delta_n: delta,
        fer,
        snr: v_a / (1.0 + noise.chi_tot),
        key_ratio,
        v_a,
        code_rate,
        bounds: *bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_link() -> ChannelParams {
        ChannelParams::new(0.1, 0.005, 0.606, 0.041).unwrap()
    }

    #[test]
    fn reference_snr_values() {
        let p = reference_link();
        let b = WorstCaseBounds::nominal(&p);
        let ours = snr(&p, Protocol::HomodyneGg02, 2.8165, &b).unwrap();
        let method_one = snr(&p, Protocol::HomodyneGg02, 2.7665, &b).unwrap();
        assert!((ours - 0.1639).abs() < 5e-5, "{ours}");
        assert!((method_one - 0.1610).abs() < 5e-5, "{method_one}");
        let tiny = snr(&p, Protocol::HomodyneGg02, 1e-15, &b).unwrap();
        assert!(tiny < 1e-15);
    }

    #[test]
    fn reference_efficiencies() {
        let p = reference_link();
        let b = WorstCaseBounds::nominal(&p);
        let hom = Protocol::HomodyneGg02;
        let i_ours = mutual_information(&p, hom, 2.8165, &b).unwrap();
        let i_one = mutual_information(&p, hom, 2.7665, &b).unwrap();
        let i_two = mutual_information(&p, hom, 3.2193, &b).unwrap();
        let beta = |i| reconciliation_efficiency(0.1, i, hom).unwrap();
        assert!((beta(i_ours) - 0.9134).abs() < 5e-4);
        assert!((beta(i_one) - 0.9285).abs() < 5e-4);
        assert!((beta(i_two) - 0.8071).abs() < 5e-4);
        assert_eq!(
            reconciliation_efficiency(0.1, 0.2, Protocol::HeterodyneNoSwitching).unwrap(),
            1.0
        );
        assert!(reconciliation_efficiency(0.1, 0.0, hom).is_err());
    }

    #[test]
    fn mutual_information_identity_with_snr() {
        let p = reference_link();
        let b = WorstCaseBounds::nominal(&p);
        for protocol in [Protocol::HomodyneGg02, Protocol::HeterodyneNoSwitching] {
            for &v_a in &[0.05, 0.3, 2.8, 17.0, 100.0] {
                let s = snr(&p, protocol, v_a, &b).unwrap();
                let i = mutual_information(&p, protocol, v_a, &b).unwrap();
                let expect = protocol.mu() as f64 * 0.5 * (1.0 + s).log2();
                assert!(((i - expect) / expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_n_values() {
        let fs = FiniteSizeConfig::half_split(200_000_000).unwrap();
        let d = delta_n(&fs);
        // 7·sqrt(log2(1e10)/1e8) + 2e-8·log2(1e10)
        let log_term: f64 = 1e10f64.log2();
        let expect = 7.0 * (log_term / 1e8).sqrt() + 2.0 / 1e8 * log_term;
        assert!((d - expect).abs() < 1e-15);
        assert!((d - 4.04e-3).abs() < 5e-6);
        let fs = FiniteSizeConfig::half_split(128_000_000).unwrap();
        assert!((delta_n(&fs) - 5.05e-3).abs() < 1e-5);
        assert_eq!(delta_n(&FiniteSizeConfig::asymptotic()), 0.0);
    }

    #[test]
    fn bounds_example_and_errors() {
        let p = reference_link();
        let fs = FiniteSizeConfig::finite(200_000_000, 100_000_000).unwrap();
        let b = finite_size_bounds(&p, &fs, 2.8).unwrap();
        assert!((b.transmittance_min - 0.0997).abs() < 5e-5);
        assert!((b.excess_noise_max - 0.0208).abs() < 5e-5);
        let asym = finite_size_bounds(&p, &FiniteSizeConfig::asymptotic(), 2.8).unwrap();
        assert_eq!(asym.transmittance_min, p.transmittance);
        assert_eq!(asym.excess_noise_max, p.excess_noise);
        // Two estimation symbols cannot certify anything.
        let tiny = FiniteSizeConfig::finite(3, 1).unwrap();
        assert!(matches!(finite_size_bounds(&p, &tiny, 2.8), Err(Error::Domain(_))));
        assert!(finite_size_bounds(&p, &fs, 0.0).is_err());
    }

    #[test]
    fn skr_reference_rows() {
        let p = reference_link();
        let fs = FiniteSizeConfig::asymptotic();
        let hom = Protocol::HomodyneGg02;
        let one = skr_finite(&p, hom, &fs, 2.7665, 0.1, 0.3192).unwrap();
        assert!((one.skr - 0.0070).abs() < 2e-4, "{}", one.skr);
        let two = skr_finite(&p, hom, &fs, 3.2193, 0.1, 0.0).unwrap();
        assert!((two.skr - 0.0029).abs() < 2e-4, "{}", two.skr);
        let dead = skr_finite(&p, hom, &fs, 3.0, 0.1, 1.0).unwrap();
        assert_eq!(dead.skr, 0.0);
        assert!(skr_finite(&p, hom, &fs, 3.0, 0.1, 1.5).is_err());
    }

    #[test]
    fn skr_first_term_bound_and_beta() {
        let p = reference_link();
        let fs = FiniteSizeConfig::half_split(2_000_000_000).unwrap();
        let b = skr_finite(&p, Protocol::HomodyneGg02, &fs, 2.81, 0.1, 0.05).unwrap();
        assert!(b.skr <= b.key_ratio * (1.0 - b.fer) * 0.1);
        assert!((b.beta - 0.1 / b.mutual_info).abs() < 1e-15);
    }
}
