use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::model::{check_modulation, ChannelParams};

/// Random stream for frame `frame` of a run seeded with `seed`.
///
/// Streams are indexed by frame, so a frame's samples do not depend on which
/// thread draws them or in what order.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

/// Alice's Gaussian modulation and Bob's homodyne outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureBlock {
    pub alice: Vec<f64>,
    pub bob: Vec<f64>,
}

impl QuadratureBlock {
    pub fn len(&self) -> usize {
        self.alice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alice.is_empty()
    }

    /// Least-squares estimates `(t̂, σ̂_z²)` of `y = t·x + z` on this block.
    pub fn estimate_channel(&self) -> (f64, f64) {
        let n = self.len() as f64;
        let sxx: f64 = self.alice.iter().map(|x| x * x).sum();
        let sxy: f64 = self.alice.iter().zip(&self.bob).map(|(x, y)| x * y).sum();
        let t = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let noise: f64 = self
            .alice
            .iter()
            .zip(&self.bob)
            .map(|(x, y)| (y - t * x).powi(2))
            .sum::<f64>()
            / n;
        (t, noise)
    }

    /// Measured SNR `t̂²·Var(x)/σ̂_z²`.
    pub fn measured_snr(&self) -> f64 {
        let (t, noise) = self.estimate_channel();
        let var_x = self.alice.iter().map(|x| x * x).sum::<f64>() / self.len() as f64;
        t * t * var_x / noise
    }
}

/// Draws `length` symbols with `Var(x) = V_A`, `y = √(ηT)·x + z`,
/// `Var(z) = ηTξ + v_el + 1`.
pub fn simulate_block(params: &ChannelParams, v_a: f64, length: usize, seed: u64) -> Result<QuadratureBlock> {
    simulate_block_with(params, v_a, length, &mut frame_rng(seed, 0))
}

pub fn simulate_block_with<R: Rng>(
    params: &ChannelParams,
    v_a: f64,
    length: usize,
    rng: &mut R,
) -> Result<QuadratureBlock> {
    check_modulation(v_a)?;
    let t = params.amplitude();
    let sigma_x = v_a.sqrt();
    let sigma_z = params.sigma_z_sq().sqrt();
    let mut alice = Vec::with_capacity(length);
    let mut bob = Vec::with_capacity(length);
    for _ in 0..length {
        let x = sigma_x * rng.sample::<f64, _>(StandardNormal);
        let z = sigma_z * rng.sample::<f64, _>(StandardNormal);
        alice.push(x);
        bob.push(t * x + z);
    }
    Ok(QuadratureBlock { alice, bob })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_by_seed() {
        let p = ChannelParams::new(0.1, 0.005, 0.606, 0.041).unwrap();
        let a = simulate_block(&p, 2.8, 1000, 7).unwrap();
        let b = simulate_block(&p, 2.8, 1000, 7).unwrap();
        let c = simulate_block(&p, 2.8, 1000, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(simulate_block(&p, 0.0, 10, 7).is_err());
    }

    #[test]
    fn frame_streams_are_distinct() {
        let mut a = frame_rng(1, 0);
        let mut b = frame_rng(1, 1);
        let xa: u64 = a.random();
        let xb: u64 = b.random();
        assert_ne!(xa, xb);
    }
}
