//! Simulated quadratures through eight-dimensional reconciliation and BP.

use cvqkd::model::ChannelParams;
use cvqkd::recon::{multidim_reconcile, peg_construct, published_ensemble, simulate_block, BpDecoder, DEFAULT_MAX_ITER};

fn main() -> cvqkd::Result<()> {
    let link = ChannelParams::new(0.1, 0.005, 0.606, 0.041)?;
    let h = peg_construct(&published_ensemble(0.1)?, 10_000, 11)?;
    let decoder = BpDecoder::new(&h);
    for v_a in [2.5, 3.0, 3.5] {
        let block = simulate_block(&link, v_a, h.n_vars(), 7)?;
        let rec = multidim_reconcile(&block, 8, 7)?;
        let syndrome = h.syndrome(&rec.bob_bits);
        let out = decoder.decode(&rec.llr, &syndrome, DEFAULT_MAX_ITER);
        let errors = out.bits.iter().zip(&rec.bob_bits).filter(|(a, b)| a != b).count();
        println!(
            "V_A={v_a}: measured SNR {:.4}, converged {}, {errors} residual bit errors",
            block.measured_snr(),
            out.converged
        );
    }
    Ok(())
}
