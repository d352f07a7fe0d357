//! Closed-form key-rate model for GG02 (homodyne) and no-switching
//! (heterodyne) CV-QKD with reverse reconciliation under collective attacks.

mod holevo;
mod params;
mod rate;

pub use holevo::{g_entropy, holevo_bound, symplectic_spectrum, SymplecticSpectrum, PHYSICALITY_TOLERANCE};
pub use params::{
    ChannelParams, FiberLink, FiniteSizeConfig, Protocol, Regime, DEFAULT_CONFIDENCE_COEFF, DEFAULT_EPSILON,
};
pub use rate::{
    delta_n, finite_size_bounds, mutual_information, reconciliation_efficiency, skr_finite, snr, total_noise,
    SkrBreakdown, WorstCaseBounds,
};

pub(crate) use rate::check_modulation;
