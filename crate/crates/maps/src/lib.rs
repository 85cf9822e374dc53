//! Rooted planar triangulations with two marked 2-gons, their peeling
//! explorations and exact law comparisons.

pub mod count;
pub mod error;
pub mod explore;
pub mod generate;
pub mod law;
pub mod map;
pub mod reshuffle;
pub mod two_sided;

pub use count::{count_disk_triangulations, multi_edge_universe, DiskCounter};
pub use error::{MapError, Result};
pub use generate::{brute_force_disk_count, enumerate_triangulations, for_each_disk, for_each_sphere, EnumeratedMap, MAX_ENUM_VERTICES};
pub use map::{CombMap, FaceKind, MapClass};
pub use explore::{
    chain_moves, eden_chain, eden_exploration, percolation_exploration, percolation_exploration_with, reference_path,
    replay, trace_interface, ChainMove, Coloring, ExplorationTrace, Explorer, Necklace, NecklaceKind, PeelStep,
    ReferencePath, Side, StepOutcome,
};
pub use law::{total_variation, CodeBook, ExactLaw, LawReport, NecklaceKey, Statistic, TraceKey, UniverseLaws};
pub use reshuffle::{rebuild, reshuffle_necklaces};
pub use two_sided::{
    joint_law, passage_law, passage_swap_tv, swap_summary, two_sided_eden_experiment, Mark, SwapSummary,
    TwoSidedRecord,
};
