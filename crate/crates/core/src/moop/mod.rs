//! Multi-objective allocation for a transmitter serving separated information
//! and energy receivers.

mod allocator;
mod lifting;
mod pareto;
mod structure;
mod weights;

pub use allocator::{
    ehee_closed_form, solve_ehee_max, solve_ehee_max_sdp, solve_iree_max, solve_power_min, solve_throughput_minmax, solve_weighted_minmax,
    MoopAllocation, MoopAnchors, MoopConfig, ThroughputAnchors,
};
pub use lifting::{lift, normalize, recover, LiftedVars};
pub use pareto::{pareto_filter, Sense};
pub use structure::{kkt_structure_check, line_angle, rank_one_extract, span_residual, StructureReport};
pub use weights::{boundary_path, edge_weights, sweep_weights, WeightVector};

#[cfg(test)]
mod tests;
