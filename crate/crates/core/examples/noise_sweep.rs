//! How the optimum moves with excess and electronic noise.

use cvqkd::fer::homodyne_reference;
use cvqkd::model::{ChannelParams, FiniteSizeConfig, Protocol};
use cvqkd::optimize::{sweep, FerSource, SweepAxis, SweepSpec};

fn main() -> cvqkd::Result<()> {
    let link = ChannelParams::new(0.1, 0.005, 0.606, 0.041)?;
    for (axis, grid) in [
        (SweepAxis::Xi, vec![0.005, 0.01, 0.05, 0.08]),
        (SweepAxis::Vel, vec![0.13, 0.14, 0.15, 0.16]),
    ] {
        let spec = SweepSpec::new(
            link,
            Protocol::HomodyneGg02,
            FiniteSizeConfig::asymptotic(),
            0.1,
            FerSource::Reanchored(homodyne_reference()),
            axis,
            grid,
        );
        for row in sweep(&spec)? {
            println!("{}={:<6} V_A*={:.4} K*={:.6} FER={:.4}", axis.name(), row.axis, row.va_opt, row.skr_opt, row.fer);
        }
    }
    Ok(())
}
