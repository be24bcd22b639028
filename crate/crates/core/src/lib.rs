//! Placement of remote-controlled sectionalizing switches and tie (maneuver)
//! points on radial distribution feeders.
//!
//! The crate is organised bottom-up:
//!
//! * [`network`]: radial feeder model, validation and tree queries.
//! * [`power_flow`]: backward-forward sweep load flow.
//! * [`reliability`]: FMEA-style outage classification, per-load-point
//!   indices, energy not supplied, and a sequential Monte Carlo cross-check.
//! * [`cost`]: capital, discounted maintenance and loss cost of a plan.
//! * [`moo`]: a problem-agnostic NSGA-II with dynamic crowding distance.
//! * [`placement`]: binds the engine to the placement problem.
//! * [`io`]: feeder files, run configuration, reports and the CLI commands.

// Parameter checks use `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cost;
pub mod io;
pub mod moo;
pub mod network;
pub mod placement;
pub mod plan;
pub mod power_flow;
pub mod reliability;

pub use cost::{placement_cost, present_worth_factor, CostBreakdown, CostParams};
pub use network::{validate_network, FeederData, Network, NetworkError, ValidationReport};
pub use placement::{
    decode, evaluate, exhaustive_pareto, select_compromise, EvaluatedPlan, PlacementProblem,
};
pub use plan::SwitchPlan;
pub use power_flow::{solve_power_flow, Loads, PowerFlowSettings, PowerFlowState};
pub use reliability::{
    classify_impact, ens_objective, load_point_reliability, monte_carlo_ens, ImpactClass, ReliabilityParams,
    ReliabilityResult,
};
