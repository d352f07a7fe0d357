//! Monte Carlo reconciliation: channel simulation, multidimensional
//! reconciliation, LDPC construction and belief-propagation decoding.

pub mod algebra;
mod bp;
mod channel;
mod degree;
mod matrix;
mod montecarlo;
mod multidim;
mod peg;

pub use bp::{bp_decode, bp_decode_syndrome, BpDecoder, BpOutcome, DEFAULT_MAX_ITER};
pub use channel::{frame_rng, simulate_block, simulate_block_with, QuadratureBlock};
pub use degree::{published_ensemble, DegreeClass, DegreeDistribution, PUBLISHED_ENSEMBLES};
pub use matrix::ParityCheckMatrix;
pub use montecarlo::{
    frame_fails, measure_fer, measure_fer_curve, measure_fer_with, wilson_interval, FerEstimate, MeasureOptions,
};
pub use multidim::{
    apply_rotation, multidim_reconcile, multidim_reconcile_with, rotation_for, Reconciled, SUPPORTED_DIMENSIONS,
};
pub use peg::{peg_construct, peg_construct_named, round_counts};
