//! Key rate breakdown at a single modulation variance.

use cvqkd::fer::homodyne_reference;
use cvqkd::model::{skr_finite, ChannelParams, FiniteSizeConfig, Protocol};

fn main() -> cvqkd::Result<()> {
    // 50 km of 0.2 dB/km fibre.
    let link = ChannelParams::from_fiber(50.0, 0.2, 0.005, 0.606, 0.041)?;
    let fer = homodyne_reference();
    let v_a = 2.8165;
    for fs in [FiniteSizeConfig::asymptotic(), FiniteSizeConfig::half_split(1_000_000_000)?] {
        let b = skr_finite(&link, Protocol::HomodyneGg02, &fs, v_a, 0.1, fer.eval(v_a))?;
        println!(
            "N={:?}: K={:.6} I_AB={:.5} chi_BE={:.5} beta={:.4} FER={:.4} SNR={:.4} delta={:.2e}",
            fs.block_size(),
            b.skr,
            b.mutual_info,
            b.holevo,
            b.beta,
            b.fer,
            b.snr,
            b.delta_n
        );
    }
    Ok(())
}
