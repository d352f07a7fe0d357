//! Ranking candidate codes by their best achievable key rate.

use cvqkd::fer::FerModel;
use cvqkd::model::{ChannelParams, FiniteSizeConfig, Protocol};
use cvqkd::optimize::{select_code, CodeCandidate, SearchOptions};

fn main() -> cvqkd::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let codes = [(0.05, "fer_r005.json"), (0.1, "fer_r010.json"), (0.15, "fer_r015.json")];
    let models = codes
        .iter()
        .map(|(_, f)| FerModel::load(format!("{dir}/{f}")))
        .collect::<cvqkd::Result<Vec<_>>>()?;
    let cands: Vec<CodeCandidate<'_>> = models
        .iter()
        .zip(codes)
        .map(|(m, (rate, _))| CodeCandidate { code_id: m.code_id.clone(), code_rate: rate, fer: m })
        .collect();
    let link = ChannelParams::new(0.1, 0.005, 0.606, 0.041)?;
    let ranking = select_code(
        &link,
        Protocol::HomodyneGg02,
        &FiniteSizeConfig::asymptotic(),
        &cands,
        &SearchOptions::default(),
    )?;
    for r in ranking {
        println!(
            "{:<6} R={:<5} V_A*={:.4} K*={:.6} behind best by {:.6}",
            r.code_id, r.code_rate, r.result.v_a_opt, r.result.skr_opt, r.delta
        );
    }
    Ok(())
}
