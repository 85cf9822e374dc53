//! Simulation and verification toolkit for stable Lévy excursions, branching
//! processes, boundary-length growth and Liouville quantum gravity measures.

pub mod error;
pub mod levy;
pub mod lqg;
pub mod qle;
pub mod rng;
pub mod sphere;
pub mod stats;

pub use error::{Error, Result};
