//! Fixed-SNR and fixed-efficiency rules against full optimisation.

use cvqkd::fer::homodyne_reference;
use cvqkd::model::{ChannelParams, FiniteSizeConfig, Protocol};
use cvqkd::optimize::{compare_methods, MethodSettings, SearchOptions};

fn main() -> cvqkd::Result<()> {
    let link = ChannelParams::new(0.1, 0.005, 0.606, 0.041)?;
    let c = compare_methods(
        &link,
        Protocol::HomodyneGg02,
        &FiniteSizeConfig::asymptotic(),
        0.1,
        &homodyne_reference(),
        &MethodSettings::default(),
        &SearchOptions::default(),
    )?;
    for r in c.records() {
        println!(
            "{:<10} V_A={:.4} beta={:.4} SNR={:.4} FER={:.4} K={:.6}",
            r.method, r.v_a, r.beta, r.snr, r.fer, r.skr
        );
    }
    let t = c.tabulated();
    println!(
        "gain: {:.2}% / {:.2}% (rates rounded to 4 places: {:.2}% / {:.2}%)",
        c.improvement_over_one, c.improvement_over_two, t.improvement_over_one, t.improvement_over_two
    );
    Ok(())
}
