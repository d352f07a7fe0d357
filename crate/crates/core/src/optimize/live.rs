//! Setting `V_A` from one block's estimates and checking it on the next.

use serde::{Deserialize, Serialize};

use super::{optimize_va_with, OptimizationResult, SearchOptions};
use crate::error::Result;
use crate::fer::{reanchor_to_snr, FerCurve, FerModel};
use crate::model::{skr_finite, ChannelParams, FiniteSizeConfig, Protocol, SkrBreakdown};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiveReport {
    /// Optimum computed from the first block's estimates.
    pub planned: OptimizationResult,
    /// `V_A` actually applied to the second block.
    pub applied_va: f64,
    /// Key rate of the second block at `applied_va`.
    pub achieved: SkrBreakdown,
    /// Optimum the second block's own estimates would have given.
    pub replanned: OptimizationResult,
    /// `|K_achieved − K_planned| / K_planned`.
    pub deviation: f64,
    /// `|K_achieved − K_replanned| / K_replanned`.
    pub deviation_from_replanned: f64,
}

fn relative(a: f64, reference: f64) -> f64 {
    if a == reference {
        0.0
    } else {
        (a - reference).abs() / reference.abs()
    }
}

/// Plans `V_A` on `first`, applies it (or `applied_va`) to `second`, and
/// reports how far the achieved rate lands from both optima. The FER model
/// is transported to each block's channel by SNR matching.
#[allow(clippy::too_many_arguments)]
pub fn reoptimize_live(
    first: &ChannelParams,
    second: &ChannelParams,
    applied_va: Option<f64>,
    protocol: Protocol,
    fs: &FiniteSizeConfig,
    code_rate: f64,
    fer: &FerModel,
    search: &SearchOptions,
) -> Result<LiveReport> {
    let curve_first = reanchor_to_snr(fer, first, protocol)?;
    let curve_second = reanchor_to_snr(fer, second, protocol)?;
    let planned = optimize_va_with(first, protocol, fs, code_rate, &curve_first, search)?;
    let replanned = optimize_va_with(second, protocol, fs, code_rate, &curve_second, search)?;
    let applied_va = applied_va.unwrap_or(planned.v_a_opt);
    let achieved = skr_finite(second, protocol, fs, applied_va, code_rate, curve_second.fer(applied_va))?;
    Ok(LiveReport {
        deviation: relative(achieved.skr, planned.skr_opt),
        deviation_from_replanned: relative(achieved.skr, replanned.skr_opt),
        planned,
        applied_va,
        achieved,
        replanned,
    })
}
