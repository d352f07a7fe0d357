//! FER fits published for the rate-0.1 reference codes.

use super::{FerModel, GaussianComponent, ReferenceChannel};
use crate::model::Protocol;

/// 50 km GG02 link the homodyne curve was measured on.
pub const HOMODYNE_REFERENCE_CHANNEL: ReferenceChannel = ReferenceChannel {
    transmittance: 0.1,
    excess_noise: 0.005,
    detector_efficiency: 0.606,
    electronic_noise: 0.041,
    protocol: Protocol::HomodyneGg02,
};

/// 25 km no-switching link the heterodyne curve was measured on.
pub const HETERODYNE_REFERENCE_CHANNEL: ReferenceChannel = ReferenceChannel {
    transmittance: 0.3162,
    excess_noise: 0.022,
    detector_efficiency: 0.56,
    electronic_noise: 0.042,
    protocol: Protocol::HeterodyneNoSwitching,
};

/// Homodyne rate-0.1 curve, waterfall over `[2.7, 3]` SNU.
pub fn homodyne_reference() -> FerModel {
    FerModel {
        code_id: "met-r0.10-homodyne".into(),
        va_lo: 2.7,
        va_hi: 3.0,
        components: vec![
            GaussianComponent::new(0.8310, 2.654, 0.08704),
            GaussianComponent::new(0.6753, 2.113, 0.4542),
            GaussianComponent::new(0.0, 2.4, 1.0),
            GaussianComponent::new(0.3437, 2.722, 0.03649),
        ],
        reference: HOMODYNE_REFERENCE_CHANNEL,
    }
}

/// Heterodyne rate-0.1 curve over `[1.84, 2.02]` SNU with its coefficients
/// exactly as printed.
///
/// The third amplitude reads `8727`; with it the interior mixture clamps to 0
/// over most of the window, so this curve is not a usable waterfall.
pub fn heterodyne_printed() -> FerModel {
    FerModel {
        code_id: "met-r0.10-heterodyne-printed".into(),
        va_lo: 1.84,
        va_hi: 2.02,
        components: vec![
            GaussianComponent::new(-0.1987, 1.851, 0.01752),
            GaussianComponent::new(-0.8834, 1.854, 0.03432),
            GaussianComponent::new(0.0, 1.9, 1.0),
            GaussianComponent::new(8727.0, 0.5462, 0.4082),
        ],
        reference: HETERODYNE_REFERENCE_CHANNEL,
    }
}
