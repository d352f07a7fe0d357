//! Frame-error-rate estimation by simulating whole frames.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bp::{BpDecoder, DEFAULT_MAX_ITER};
use super::channel::{frame_rng, simulate_block_with};
use super::matrix::ParityCheckMatrix;
use super::multidim::multidim_reconcile_with;
use crate::error::{Error, Result};
use crate::fer::{FerMeasurementSet, FerPoint};
use crate::model::{check_modulation, ChannelParams};

const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureOptions {
    pub dim: usize,
    pub max_iter: usize,
    /// Run frames on the rayon pool. Results do not depend on this.
    pub parallel: bool,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self {
            dim: 8,
            max_iter: DEFAULT_MAX_ITER,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FerEstimate {
    #[serde(rename = "va")]
    pub v_a: f64,
    pub trials: u64,
    pub failures: u64,
    pub fer: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl FerEstimate {
    pub fn point(&self) -> FerPoint {
        FerPoint {
            v_a: self.v_a,
            trials: self.trials,
            failures: self.failures,
        }
    }
}

/// Wilson score interval for `failures / trials` at confidence `z`.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if failures == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Whether frame `frame` of the run seeded by `seed` fails to decode.
pub fn frame_fails(
    decoder: &BpDecoder<'_>,
    h: &ParityCheckMatrix,
    params: &ChannelParams,
    v_a: f64,
    seed: u64,
    frame: u64,
    opts: &MeasureOptions,
) -> Result<bool> {
    let mut rng = frame_rng(seed, frame);
    let block = simulate_block_with(params, v_a, h.n_vars(), &mut rng)?;
    let rec = multidim_reconcile_with(&block, opts.dim, &mut rng)?;
    let syndrome = h.syndrome(&rec.bob_bits);
    let out = decoder.decode(&rec.llr, &syndrome, opts.max_iter);
    if out.converged {
        assert_eq!(h.syndrome(&out.bits), syndrome, "converged frame with a wrong syndrome");
    }
    Ok(!out.converged)
}

pub fn measure_fer(h: &ParityCheckMatrix, params: &ChannelParams, v_a: f64, trials: u64, seed: u64) -> Result<FerEstimate> {
    measure_fer_with(h, params, v_a, trials, seed, &MeasureOptions::default())
}

pub fn measure_fer_with(
    h: &ParityCheckMatrix,
    params: &ChannelParams,
    v_a: f64,
    trials: u64,
    seed: u64,
    opts: &MeasureOptions,
) -> Result<FerEstimate> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    check_modulation(v_a)?;
    params.validate()?;
    if h.n_vars() % opts.dim != 0 {
        return Err(Error::invalid(
            "dim",
            format!("code length {} is not a multiple of {}", h.n_vars(), opts.dim),
        ));
    }
    let decoder = BpDecoder::new(h);
    let run = |frame: u64| frame_fails(&decoder, h, params, v_a, seed, frame, opts).map(u64::from);
    let failures: u64 = if opts.parallel {
        (0..trials).into_par_iter().map(run).sum::<Result<u64>>()?
    } else {
        (0..trials).map(run).sum::<Result<u64>>()?
    };
    let (ci_low, ci_high) = wilson_interval(failures, trials, Z_95);
    Ok(FerEstimate {
        v_a,
        trials,
        failures,
        fer: failures as f64 / trials as f64,
        ci_low,
        ci_high,
    })
}

/// Measures every point of `grid`; point `i` uses seed `seed + i`.
pub fn measure_fer_curve(
    h: &ParityCheckMatrix,
    params: &ChannelParams,
    grid: &[f64],
    trials: u64,
    seed: u64,
    opts: &MeasureOptions,
) -> Result<(Vec<FerEstimate>, FerMeasurementSet)> {
    let estimates = grid
        .iter()
        .enumerate()
        .map(|(i, &v)| measure_fer_with(h, params, v, trials, seed.wrapping_add(i as u64), opts))
        .collect::<Result<Vec<_>>>()?;
    let set = FerMeasurementSet::new(estimates.iter().map(FerEstimate::point).collect())?;
    Ok((estimates, set))
}
