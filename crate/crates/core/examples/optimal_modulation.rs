//! Optimal modulation variance as the block size grows.

use cvqkd::fer::homodyne_reference;
use cvqkd::model::{ChannelParams, FiniteSizeConfig, Protocol};
use cvqkd::optimize::optimize_va;

fn main() -> cvqkd::Result<()> {
    let link = ChannelParams::new(0.1, 0.005, 0.606, 0.041)?;
    let fer = homodyne_reference();
    let sizes = [Some(200_000_000u64), Some(2_000_000_000), Some(20_000_000_000), None];
    for n in sizes {
        let fs = match n {
            Some(n) => FiniteSizeConfig::half_split(n)?,
            None => FiniteSizeConfig::asymptotic(),
        };
        let r = optimize_va(&link, Protocol::HomodyneGg02, &fs, 0.1, &fer)?;
        println!(
            "N={:>12}: V_A*={:.4} K*={:.6} ({} evaluations)",
            n.map_or("inf".to_string(), |n| format!("{n:.0e}")),
            r.v_a_opt,
            r.skr_opt,
            r.search_evals
        );
    }
    Ok(())
}
