//! Terrain-aware belief-space navigation planning on a semantic belief
//! graph: categorical terrain beliefs over a roadmap, terrain-specific
//! controller edges, information-gathering actions, stochastic
//! shortest-path planning, and a Monte Carlo execution simulator.

pub mod belief;
pub mod cost;
pub mod error;
pub mod graph;
pub mod observation;
pub mod planner;
pub mod scenario;
pub mod sim;

pub use belief::{ClassId, ClassSet, GeoSemanticBelief, GeometricBelief, SemanticBelief};
pub use cost::CostModel;
pub use error::{Result, SbgError};
pub use graph::{build_sbg, Link, NodeId, OutcomeMode, Roadmap, Sbg, SbgEdge, Vertex};
pub use observation::ObservationModel;
pub use planner::{
    bellman_backup, conservative_policy, evaluate_policy, optimistic_policy, value_iteration,
    PlanResult, PlannerConfig, Policy, ValueTable,
};
pub use scenario::{generate_urban_course, Scenario};
pub use sim::{
    controller_accuracy, run_experiment, run_trial, ExperimentConfig, ExperimentOutput,
    GroundTruth, PolicyKind, RunSummary, TrialResult,
};
