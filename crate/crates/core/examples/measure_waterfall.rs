//! Monte Carlo FER at a few modulation variances.

use cvqkd::model::ChannelParams;
use cvqkd::recon::{measure_fer_curve, peg_construct, published_ensemble, MeasureOptions};

fn main() -> cvqkd::Result<()> {
    let link = ChannelParams::new(0.1, 0.005, 0.606, 0.041)?;
    let h = peg_construct(&published_ensemble(0.1)?, 10_000, 11)?;
    let grid = [2.75, 3.0, 3.5];
    let (est, set) = measure_fer_curve(&h, &link, &grid, 40, 1, &MeasureOptions::default())?;
    for e in &est {
        println!("V_A={:.2}: {}/{} FER {:.3} [{:.3}, {:.3}]", e.v_a, e.failures, e.trials, e.fer, e.ci_low, e.ci_high);
    }
    set.write_csv(std::io::stdout())?;
    Ok(())
}
