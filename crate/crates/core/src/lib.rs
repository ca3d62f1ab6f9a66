//! Replicated storage allocations under random demand.
//!
//! Builds allocation designs, decides whether a demand vector can be served
//! under a per-node load threshold, and estimates or bounds the probability
//! that it can.

pub mod allocation;
pub mod bounds;
pub mod demand;
pub mod error;
pub mod feasibility;
pub mod occupancy;
pub mod rng;
pub mod robustness;
pub mod scanstat;
pub mod stats;

pub use allocation::{DesignKind, OverlapProfile, SpanMethod, StorageAllocation};
pub use demand::{DemandModel, DemandVector};
pub use error::{Error, Result};
pub use feasibility::{check_flow, check_subsets, min_threshold, FeasibilityVerdict, Witness};
pub use robustness::{estimate_p, estimate_p_sweep, AllocationSource, RobustnessEstimate};
pub use stats::ProbabilityEstimate;
