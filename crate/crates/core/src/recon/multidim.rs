//! Reverse multidimensional reconciliation over d-tuples.
//!
//! Bob draws a sign vector `u ∈ {±1/√d}^d` for each tuple of his data and
//! reveals the algebra element `M = u·ȳ'` (with `y' = y/‖y‖`) and `‖y‖`.
//! Multiplication by a unit element is an isometry and `M·y' = u`, so Alice
//! applies `M` to her own tuple and reads off noisy copies of Bob's bits.

use rand::Rng;

use super::algebra;
use super::channel::{frame_rng, QuadratureBlock};
use crate::error::{Error, Result};

pub const SUPPORTED_DIMENSIONS: [usize; 4] = [1, 2, 4, 8];

/// Stream index used for Bob's bits when reconciling from a bare seed.
const BIT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct Reconciled {
    /// Alice's log-likelihood ratios `ln P(b=0)/P(b=1)`, one per symbol.
    pub llr: Vec<f64>,
    /// Bob's reference bits; bit 0 maps to `+1/√d`.
    pub bob_bits: Vec<u8>,
    pub dim: usize,
    /// Block estimates `(t̂, σ̂_z²)` used to scale the LLRs.
    pub estimate: (f64, f64),
}

/// Mapping `M` with `M·y' = u` for unit `y'`.
pub fn rotation_for(y_unit: &[f64], u: &[f64]) -> Vec<f64> {
    algebra::mul(u, &algebra::conj(y_unit))
}

pub fn apply_rotation(m: &[f64], x: &[f64]) -> Vec<f64> {
    algebra::mul(m, x)
}

fn check_dim(dim: usize, len: usize) -> Result<()> {
    if !SUPPORTED_DIMENSIONS.contains(&dim) {
        return Err(Error::invalid("dim", format!("{dim} is not one of 1, 2, 4, 8")));
    }
    if len == 0 || len % dim != 0 {
        return Err(Error::invalid(
            "length",
            format!("block length {len} is not a positive multiple of dim {dim}"),
        ));
    }
    Ok(())
}

pub fn multidim_reconcile(block: &QuadratureBlock, dim: usize, seed: u64) -> Result<Reconciled> {
    multidim_reconcile_with(block, dim, &mut frame_rng(seed, BIT_STREAM))
}

pub fn multidim_reconcile_with<R: Rng>(block: &QuadratureBlock, dim: usize, rng: &mut R) -> Result<Reconciled> {
    check_dim(dim, block.len())?;
    let (t_hat, noise_hat) = block.estimate_channel();
    let root_d = (dim as f64).sqrt();
    let scale = 2.0 * t_hat / (root_d * noise_hat);

    let mut llr = Vec::with_capacity(block.len());
    let mut bob_bits = Vec::with_capacity(block.len());
    let mut u = vec![0.0; dim];
    let mut y_unit = vec![0.0; dim];
    for (x, y) in block.alice.chunks_exact(dim).zip(block.bob.chunks_exact(dim)) {
        let y_norm = algebra::norm(y);
        for (k, uk) in u.iter_mut().enumerate() {
            let bit: bool = rng.random();
            bob_bits.push(bit as u8);
            *uk = if bit { -1.0 } else { 1.0 } / root_d;
            y_unit[k] = y[k] / y_norm;
        }
        let m = rotation_for(&y_unit, &u);
        let v = apply_rotation(&m, x);
        llr.extend(v.iter().map(|vi| scale * y_norm * vi));
    }
    Ok(Reconciled {
        llr,
        bob_bits,
        dim,
        estimate: (t_hat, noise_hat),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChannelParams;
    use crate::recon::simulate_block;

    #[test]
    fn rotation_maps_bob_tuple_to_u() {
        for &d in &SUPPORTED_DIMENSIONS {
            let y: Vec<f64> = (0..d).map(|i| (i as f64 * 0.7 + 0.3).sin()).collect();
            let n = algebra::norm(&y);
            let y_unit: Vec<f64> = y.iter().map(|v| v / n).collect();
            let u: Vec<f64> = (0..d)
                .map(|i| if i % 3 == 0 { -1.0 } else { 1.0 } / (d as f64).sqrt())
                .collect();
            let m = rotation_for(&y_unit, &u);
            let back = apply_rotation(&m, &y_unit);
            for (a, b) in back.iter().zip(&u) {
                assert!((a - b).abs() < 1e-12, "d={d}");
            }
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        let p = ChannelParams::new(0.1, 0.005, 0.606, 0.041).unwrap();
        let block = simulate_block(&p, 2.8, 12, 1).unwrap();
        assert!(multidim_reconcile(&block, 8, 1).is_err());
        assert!(multidim_reconcile(&block, 3, 1).is_err());
        assert!(multidim_reconcile(&block, 4, 1).is_ok());
    }
}
