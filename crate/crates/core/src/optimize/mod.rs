//! Modulation-variance optimisation and the studies built on it.

mod codes;
mod live;
mod methods;
mod sweep;

pub use codes::{select_code, CodeCandidate, CodeRanking};
pub use live::{reoptimize_live, LiveReport};
pub use methods::{compare_methods, MethodComparison, MethodRecord, MethodSettings};
pub use sweep::{sweep, FerSource, SweepAxis, SweepRow, SweepSpec, SWEEP_CSV_HEADER};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fer::FerCurve;
use crate::model::{skr_finite, ChannelParams, FiniteSizeConfig, Protocol, SkrBreakdown};
use crate::numeric::golden_section_max;

/// Upper end of the searched `V_A` range.
pub const VA_MAX: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub va_max: f64,
    pub grid_step: f64,
    /// Number of best grid brackets refined by golden section.
    pub refine_top: usize,
    pub tolerance: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            va_max: VA_MAX,
            grid_step: 0.01,
            refine_top: 5,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub v_a_opt: f64,
    pub skr_opt: f64,
    pub breakdown: SkrBreakdown,
    /// `β ∈ [0, 1]` at the optimum.
    pub feasible: bool,
    /// No admissible point yields a positive key.
    pub degenerate: bool,
    pub search_evals: usize,
}

/// Maximises a scalar objective over `(0, va_max]`; `None` marks points
/// outside the admissible set.
pub fn maximize<F>(objective: F, opts: &SearchOptions) -> (Option<(f64, f64)>, usize)
where
    F: Fn(f64) -> Option<f64>,
{
    let n = (opts.va_max / opts.grid_step).round() as usize;
    let at = |i: usize| (i as f64 * opts.grid_step).min(opts.va_max);
    let values: Vec<Option<f64>> = (1..=n).map(|i| objective(at(i))).collect();
    let mut evals = n;

    // Local maxima of the grid, best first.
    let score = |k: usize| values[k].unwrap_or(f64::NEG_INFINITY);
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&k| values[k].is_some())
        .filter(|&k| (k == 0 || score(k) >= score(k - 1)) && (k + 1 == n || score(k) >= score(k + 1)))
        .collect();
    peaks.sort_by(|&a, &b| score(b).total_cmp(&score(a)).then(a.cmp(&b)));
    peaks.truncate(opts.refine_top.max(1));

    let mut best: Option<(f64, f64)> = None;
    let take = |cand: Option<(f64, f64)>, best: &mut Option<(f64, f64)>| {
        if let Some((x, v)) = cand {
            if best.is_none_or(|(bx, bv)| v > bv || (v == bv && x < bx)) {
                *best = Some((x, v));
            }
        }
    };
    for &k in &peaks {
        take(Some((at(k + 1), score(k))), &mut best);
        let lo = if k == 0 { opts.grid_step * 1e-6 } else { at(k) };
        let hi = at(k + 2);
        let (found, e) = golden_section_max(&objective, lo, hi, opts.tolerance);
        evals += e;
        take(found, &mut best);
    }
    (best, evals)
}

/// Finds the `V_A` maximising the key rate of a code of rate `code_rate`
/// with FER curve `fer`, over `β ≤ 1`.
pub fn optimize_va(
    params: &ChannelParams,
    protocol: Protocol,
    fs: &FiniteSizeConfig,
    code_rate: f64,
    fer: &dyn FerCurve,
) -> Result<OptimizationResult> {
    optimize_va_with(params, protocol, fs, code_rate, fer, &SearchOptions::default())
}

pub fn optimize_va_with(
    params: &ChannelParams,
    protocol: Protocol,
    fs: &FiniteSizeConfig,
    code_rate: f64,
    fer: &dyn FerCurve,
    opts: &SearchOptions,
) -> Result<OptimizationResult> {
    params.validate()?;
    fs.validate()?;
    if !(code_rate > 0.0 && code_rate < 1.0) {
        return Err(Error::invalid("code_rate", format!("{code_rate} is not in (0, 1)")));
    }
    let eval = |v: f64| skr_finite(params, protocol, fs, v, code_rate, fer.fer(v)).ok();
    let admissible = |v: f64| eval(v).filter(SkrBreakdown::is_feasible);

    let (best, evals) = maximize(|v| admissible(v).map(|b| b.skr), opts);
    let (v_best, _) = best.ok_or_else(|| {
        Error::NoFeasiblePoint(format!(
            "beta exceeds 1 (or the rate is undefined) for every V_A in (0, {}]",
            opts.va_max
        ))
    })?;
    let breakdown = admissible(v_best).expect("optimum is admissible");

    // Decoding never succeeds anywhere: report a zero-rate degenerate point.
    let n = (opts.va_max / opts.grid_step).round() as usize;
    let ever_decodes = (1..=n).any(|i| fer.fer(i as f64 * opts.grid_step) < 1.0) || breakdown.fer < 1.0;
    let degenerate = !ever_decodes || breakdown.skr <= 0.0;
    Ok(OptimizationResult {
        v_a_opt: v_best,
        skr_opt: breakdown.skr,
        breakdown,
        feasible: breakdown.is_feasible(),
        degenerate,
        search_evals: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fer::homodyne_reference;

    fn reference_link() -> ChannelParams {
        ChannelParams::new(0.1, 0.005, 0.606, 0.041).unwrap()
    }

    #[test]
    fn asymptotic_optimum_of_reference_curve() {
        let fer = homodyne_reference();
        let r = optimize_va(&reference_link(), Protocol::HomodyneGg02, &FiniteSizeConfig::asymptotic(), 0.1, &fer).unwrap();
        assert!((r.v_a_opt - 2.8165).abs() < 5e-3, "{}", r.v_a_opt);
        assert!((r.skr_opt - 0.0087).abs() < 2e-4, "{}", r.skr_opt);
        assert!(r.feasible && !r.degenerate);
    }

    #[test]
    fn always_failing_code_is_degenerate() {
        let fer = |_v: f64| 1.0;
        let r = optimize_va(&reference_link(), Protocol::HomodyneGg02, &FiniteSizeConfig::asymptotic(), 0.1, &fer).unwrap();
        assert_eq!(r.skr_opt, 0.0);
        assert!(r.degenerate);
    }

    #[test]
    fn unreachable_rate_has_no_feasible_point() {
        let fer = |_v: f64| 0.0;
        let p = ChannelParams::new(0.001, 0.005, 0.606, 0.041).unwrap();
        let opts = SearchOptions { va_max: 1.0, ..SearchOptions::default() };
        let err = optimize_va_with(&p, Protocol::HomodyneGg02, &FiniteSizeConfig::asymptotic(), 0.9, &fer, &opts);
        assert!(matches!(err, Err(Error::NoFeasiblePoint(_))), "{err:?}");
    }
}
