//! Spectrally positive stable processes, their excursions and the
//! associated branching processes.

pub mod csbp;
pub mod excursion;
pub mod lamperti;
pub mod law;
pub mod path;
pub mod stable;

pub use csbp::{
    check_exponential_integral, check_extinction_law, check_laplace_functional, extinction_samples,
    integral_horizon, integral_samples, laplace_samples, simulate_csbp,
    CsbpSample, CsbpSimSpec, McCheck, StopReason,
};
pub use excursion::{
    lifetime_mass, sample_ito_excursion, sample_normalized_excursion, Excursion, ItoSpec,
    LifetimeProposal, StepLaw, WeightedExcursion,
};
pub use lamperti::{lamperti_csbp_to_levy, lamperti_levy_to_csbp, CsbpPath};
pub use law::StableLaw;
pub use path::{CadlagPath, Jump};
pub use stable::{sample_stable_path, stable_increment, JumpLedger, StablePathSpec};
