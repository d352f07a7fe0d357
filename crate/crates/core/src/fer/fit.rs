//! Least-squares fitting of a Gaussian mixture to measured FER points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FerMeasurementSet, FerModel, GaussianComponent, ReferenceChannel, HOMODYNE_REFERENCE_CHANNEL, MAX_COMPONENTS};
use crate::error::{Error, Result};
use crate::numeric::nelder_mead;

/// Components with `|a|` at or below this do not count as used.
const EFFECTIVE_AMPLITUDE: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub max_components: usize,
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub code_id: String,
    pub reference: ReferenceChannel,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_components: MAX_COMPONENTS,
            starts: 20,
            seed: 0x00F1_7FE4,
            max_iter: 6000,
            code_id: "fitted".into(),
            reference: HOMODYNE_REFERENCE_CHANNEL,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub model: FerModel,
    /// RMS of `eval − observed` over the fitted window.
    pub rms_residual: f64,
    pub effective_components: usize,
    pub window_points: usize,
}

/// Fits up to `max_components` Gaussians to `data`, tagging the result with
/// the homodyne reference channel.
pub fn fit_fer(data: &FerMeasurementSet, max_components: usize) -> Result<FitReport> {
    fit_fer_with(
        data,
        &FitOptions {
            max_components,
            ..FitOptions::default()
        },
    )
}

pub fn fit_fer_with(data: &FerMeasurementSet, opts: &FitOptions) -> Result<FitReport> {
    data.validate()?;
    if opts.max_components == 0 || opts.max_components > MAX_COMPONENTS {
        return Err(Error::invalid(
            "max_components",
            format!("must be in 1..={MAX_COMPONENTS}"),
        ));
    }
    let pts = &data.points;
    if pts.is_empty() {
        return Err(Error::FitFailure("no measurement points".into()));
    }
    if !pts.iter().any(|p| p.failures > 0 && p.failures < p.trials) {
        return Err(Error::FitFailure(
            "no point with 0 < FER < 1; the V_A grid missed the waterfall region".into(),
        ));
    }

    // Saturation thresholds from the leading run of FER = 1 and the trailing
    // run of FER = 0.
    let lead = pts.iter().take_while(|p| p.failures == p.trials).count();
    let trail = pts.iter().rev().take_while(|p| p.failures == 0).count();
    let va_lo = if lead > 0 { pts[lead - 1].v_a } else { pts[0].v_a };
    let va_hi = if trail > 0 { pts[pts.len() - trail].v_a } else { pts[pts.len() - 1].v_a };
    let window: Vec<(f64, f64)> = pts
        .iter()
        .filter(|p| p.v_a >= va_lo && p.v_a <= va_hi)
        .map(|p| (p.v_a, p.fer()))
        .collect();
    let span = va_hi - va_lo;

    let k = opts.max_components;
    let sse = |theta: &[f64]| -> f64 {
        window
            .iter()
            .map(|&(v, obs)| {
                let m: f64 = theta
                    .chunks_exact(3)
                    .map(|c| {
                        let u = (v - c[1]) / c[2].exp();
                        c[0] * (-u * u).exp()
                    })
                    .sum();
                let r = m.clamp(0.0, 1.0) - obs;
                r * r
            })
            .sum()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let steps: Vec<f64> = (0..k).flat_map(|_| [0.25, span / 4.0, 0.5]).collect();
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for _ in 0..opts.starts.max(1) {
        let start: Vec<f64> = (0..k)
            .flat_map(|_| {
                let a = rng.random_range(0.0..1.0);
                let b = va_lo + rng.random_range(0.0..1.0) * span;
                let c = (span / 4.0).ln();
                [a, b, c]
            })
            .collect();
        let first = nelder_mead(sse, &start, &steps, 1e-16, opts.max_iter);
        // One restart from the converged point undoes premature collapse.
        let refined = nelder_mead(sse, &first.x, &steps.iter().map(|s| s * 0.1).collect::<Vec<_>>(), 1e-18, opts.max_iter);
        let theta = if refined.value <= first.value { refined.x } else { first.x };
        let value = sse(&theta);
        let effective = effective_components(&theta);
        let better = match &best {
            None => true,
            Some((bv, be, _)) => {
                let tie = (value - bv).abs() <= 1e-9 * bv.max(1e-30) + 1e-15;
                if tie {
                    effective < *be
                } else {
                    value < *bv
                }
            }
        };
        if better {
            best = Some((value, effective, theta));
        }
    }

    let (value, effective, theta) = best.expect("at least one start");
    let components = theta
        .chunks_exact(3)
        .map(|c| GaussianComponent::new(c[0], c[1], c[2].exp()))
        .collect();
    let model = FerModel::new(opts.code_id.clone(), va_lo, va_hi, components, opts.reference)?;
    Ok(FitReport {
        model,
        rms_residual: (value / window.len() as f64).sqrt(),
        effective_components: effective,
        window_points: window.len(),
    })
}

fn effective_components(theta: &[f64]) -> usize {
    theta.chunks_exact(3).filter(|c| c[0].abs() > EFFECTIVE_AMPLITUDE).count()
}
