//! Ranking candidate codes by the best key rate each can reach.

use serde::{Deserialize, Serialize};

use super::{optimize_va_with, OptimizationResult, SearchOptions};
use crate::error::{Error, Result};
use crate::fer::FerCurve;
use crate::model::{ChannelParams, FiniteSizeConfig, Protocol};

pub struct CodeCandidate<'a> {
    pub code_id: String,
    pub code_rate: f64,
    pub fer: &'a dyn FerCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeRanking {
    /// Position of the candidate in the input list.
    pub index: usize,
    pub code_id: String,
    pub code_rate: f64,
    pub result: OptimizationResult,
    /// `K_best − K_this`: key rate given up by choosing this code.
    pub delta: f64,
}

/// Optimises every candidate and ranks them by optimal key rate, best
/// first. Equal rates keep their input order.
pub fn select_code(
    params: &ChannelParams,
    protocol: Protocol,
    fs: &FiniteSizeConfig,
    candidates: &[CodeCandidate<'_>],
    search: &SearchOptions,
) -> Result<Vec<CodeRanking>> {
    if candidates.is_empty() {
        return Err(Error::invalid("candidates", "need at least one code"));
    }
    let mut ranked = candidates
        .iter()
        .enumerate()
        .map(|(index, c)| {
            let result = optimize_va_with(params, protocol, fs, c.code_rate, c.fer, search)?;
            Ok(CodeRanking {
                index,
                code_id: c.code_id.clone(),
                code_rate: c.code_rate,
                result,
                delta: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| b.result.skr_opt.total_cmp(&a.result.skr_opt).then(a.index.cmp(&b.index)));
    let best = ranked[0].result.skr_opt;
    for r in &mut ranked {
        r.delta = best - r.result.skr_opt;
    }
    Ok(ranked)
}
