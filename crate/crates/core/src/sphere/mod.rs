//! Excursion encoding of doubly marked spheres, the distance functional,
//! weighted ensembles and tail-exponent estimation.

pub mod clock;
pub mod encode;
pub mod ensemble;
pub mod tail;

pub use clock::{
    analytic_clock_constant, calibrate_clock_constant, clock_with_constant, quantum_natural_clock_from_jumps,
    ClockCalibration, CLOCK_CONSTANT,
};
pub use encode::{encode_sphere, quantum_distance, BubbleRecord, SphereSample, WeightKind};
pub use ensemble::{
    check_conditional_law, reweight, sample_sphere_ensemble, EnsembleSpec, MarkBin, Restriction,
    SphereEnsemble, SphereSummary,
};
pub use tail::{fit_tail_exponent, TailFit};
