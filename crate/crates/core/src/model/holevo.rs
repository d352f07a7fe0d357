//! Holevo bound on Eve's information from the symplectic spectrum of the
//! Alice–Bob covariance matrix.

use super::params::{ChannelParams, Protocol};
use super::rate::{check_modulation, NoiseBudget, WorstCaseBounds};
use crate::error::{Error, Result};

/// Absolute slack allowed on discriminants and on `λ ≥ 1`.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;

/// Von Neumann entropy of a thermal state with mean photon number `x`.
///
/// `G(x) = (x+1)·log2(x+1) − x·log2(x)`, with `G(0) = 0`.
pub fn g_entropy(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x + 1.0) * (x + 1.0).log2() - x * x.log2()
}

/// Symplectic eigenvalues `λ1..λ4` entering the bound (`λ5 = 1` is implicit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticSpectrum {
    pub lambda: [f64; 4],
}

impl SymplecticSpectrum {
    /// `G((λ1−1)/2) + G((λ2−1)/2) − G((λ3−1)/2) − G((λ4−1)/2)`.
    pub fn holevo(&self) -> f64 {
        let g = |l: f64| g_entropy((l - 1.0) / 2.0);
        let [l1, l2, l3, l4] = self.lambda;
        g(l1) + g(l2) - g(l3) - g(l4)
    }
}

/// Roots `λ±` of `λ⁴ − sλ² + p = 0`, the smaller one from `p/λ+²` to avoid
/// cancellation.
fn eigen_pair(sum: f64, product: f64, label: &str) -> Result<(f64, f64)> {
    let mut disc = sum * sum - 4.0 * product;
    if disc < 0.0 {
        if disc < -PHYSICALITY_TOLERANCE {
            return Err(Error::Domain(format!(
                "negative discriminant {disc:.3e} for {label}; covariance matrix is unphysical"
            )));
        }
        disc = 0.0;
    }
    let big_sq = 0.5 * (sum + disc.sqrt());
    if !(big_sq > 0.0) {
        return Err(Error::Domain(format!("non-positive eigenvalue for {label}")));
    }
    let small_sq = product / big_sq;
    Ok((big_sq.sqrt(), small_sq.max(0.0).sqrt()))
}

/// Symplectic eigenvalues for detection `protocol` on the worst-case channel.
pub fn symplectic_spectrum(
    params: &ChannelParams,
    protocol: Protocol,
    v_a: f64,
    bounds: &WorstCaseBounds,
) -> Result<SymplecticSpectrum> {
    check_modulation(v_a)?;
    let NoiseBudget {
        transmittance: t,
        chi_line,
        chi_det,
        chi_tot,
    } = NoiseBudget::new(params, protocol, bounds)?;
    let v = v_a + 1.0;

    let a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi_line).powi(2);
    let b = t * t * (v * chi_line + 1.0).powi(2);
    let sqrt_b = b.sqrt();
    let denom = t * (v + chi_tot);

    let (c, d) = match protocol {
        Protocol::HomodyneGg02 => (
            (v * sqrt_b + t * (v + chi_line) + a * chi_det) / denom,
            sqrt_b * (v + sqrt_b * chi_det) / denom,
        ),
        Protocol::HeterodyneNoSwitching => (
            (a * chi_det * chi_det
                + b
                + 1.0
                + 2.0 * chi_det * (v * sqrt_b + t * (v + chi_line))
                + 2.0 * t * (v * v - 1.0))
                / (denom * denom),
            ((v + sqrt_b * chi_det) / denom).powi(2),
        ),
    };

    let (l1, l2) = eigen_pair(a, b, "λ1,2")?;
    let (l3, l4) = eigen_pair(c, d, "λ3,4")?;
    let lambda = [l1, l2, l3, l4];
    if let Some(bad) = lambda.iter().find(|&&l| l < 1.0 - PHYSICALITY_TOLERANCE) {
        return Err(Error::Domain(format!(
            "symplectic eigenvalue {bad:.12} below 1; inputs are inconsistent"
        )));
    }
    Ok(SymplecticSpectrum { lambda })
}

/// Holevo bound `S(y:E)` in bits per pulse.
pub fn holevo_bound(params: &ChannelParams, protocol: Protocol, v_a: f64, bounds: &WorstCaseBounds) -> Result<f64> {
    let spectrum = symplectic_spectrum(params, protocol, v_a, bounds)?;
    Ok(spectrum.holevo().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_at_zero_and_one() {
        assert_eq!(g_entropy(0.0), 0.0);
        assert_eq!(g_entropy(-1e-12), 0.0);
        assert!((g_entropy(1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_channel_stays_physical() {
        // Cancellation in the small root used to put λ4 about 1e-8 below 1.
        let p = ChannelParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let b = WorstCaseBounds::nominal(&p);
        for protocol in [Protocol::HomodyneGg02, Protocol::HeterodyneNoSwitching] {
            for &v_a in &[1e-3, 1.0, 10.0, 100.0] {
                let s = symplectic_spectrum(&p, protocol, v_a, &b).unwrap();
                assert!(s.lambda.iter().all(|&l| l >= 1.0 - 1e-9), "{:?}", s.lambda);
            }
        }
    }

    #[test]
    fn unphysical_bounds_are_rejected() {
        let p = ChannelParams::new(0.1, 0.005, 0.606, 0.041).unwrap();
        let mut b = WorstCaseBounds::nominal(&p);
        b.excess_noise_max = -50.0;
        assert!(matches!(
            holevo_bound(&p, Protocol::HomodyneGg02, 2.8, &b),
            Err(Error::Domain(_))
        ));
        b.transmittance_min = 0.0;
        assert!(holevo_bound(&p, Protocol::HomodyneGg02, 2.8, &b).is_err());
    }
}
