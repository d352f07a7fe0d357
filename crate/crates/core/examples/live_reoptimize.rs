//! Plan on one block's estimates, apply on the next.

use cvqkd::fer::homodyne_reference;
use cvqkd::model::{ChannelParams, FiniteSizeConfig, Protocol};
use cvqkd::optimize::{reoptimize_live, SearchOptions};

fn main() -> cvqkd::Result<()> {
    let first = ChannelParams::new(0.1, 0.0324, 0.51, 0.1465)?;
    let second = ChannelParams::new(0.1, 0.0321, 0.51, 0.1507)?;
    let r = reoptimize_live(
        &first,
        &second,
        Some(3.6588),
        Protocol::HomodyneGg02,
        &FiniteSizeConfig::asymptotic(),
        0.1,
        &homodyne_reference(),
        &SearchOptions::default(),
    )?;
    println!("planned   V_A={:.4} K={:.6}", r.planned.v_a_opt, r.planned.skr_opt);
    println!("applied   V_A={:.4} K={:.6}", r.applied_va, r.achieved.skr);
    println!("replanned V_A={:.4} K={:.6}", r.replanned.v_a_opt, r.replanned.skr_opt);
    println!("deviation {:.2}% (from replanned {:.2}%)", r.deviation * 100.0, r.deviation_from_replanned * 100.0);
    Ok(())
}
