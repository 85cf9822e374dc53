//! Discrete Gaussian free field, circle averages and the regularized
//! γ-LQG area measure.

pub mod field;
pub mod io;
pub mod measure;

pub use field::{lqg_normalization, sample_dgff, BoundaryCondition, DgffSampler, GridField};
pub use io::{read_field, write_field, FieldSidecar};
pub use measure::{
    chord_boundary_length, circle_average, coord_change_check, coord_change_experiment, CoordChangeSummary, lqg_area, LqgMeasure, LqgParams, Mobius,
    Region,
};
pub use rustfft::num_complex::Complex64;
