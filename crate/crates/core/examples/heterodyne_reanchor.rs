//! Moving a homodyne FER curve onto a heterodyne link by matching SNR.

use cvqkd::fer::{homodyne_reference, reanchor_to_snr, FerCurve};
use cvqkd::model::{ChannelParams, FiniteSizeConfig, Protocol};
use cvqkd::optimize::optimize_va;

fn main() -> cvqkd::Result<()> {
    let link = ChannelParams::new(0.3162, 0.022, 0.56, 0.042)?;
    let proto = Protocol::HeterodyneNoSwitching;
    let curve = reanchor_to_snr(&homodyne_reference(), &link, proto)?;
    let (lo, hi) = curve.window();
    println!("waterfall window on this link: [{lo:.4}, {hi:.4}]");
    for v in [1.85, 1.9, 1.95, 2.0] {
        println!("FER({v}) = {:.4}", curve.fer(v));
    }
    let r = optimize_va(&link, proto, &FiniteSizeConfig::half_split(2_000_000_000)?, 0.1, &curve)?;
    println!("V_A*={:.4} K*={:.6}", r.v_a_opt, r.skr_opt);
    Ok(())
}
