//! Closed-loop Monte Carlo executor: a simulated robot follows a planned
//! policy over ground-truth terrain, receives noisy observations, filters
//! its working beliefs, and accrues ground-truth traversal time.
//!
//! Policies are static between scans. A scan's real outcome is associated
//! with the expanded outcome node carrying the post-update argmax class;
//! when the realized class was not among the sampled outcomes the node is
//! re-expanded and the policy recomputed (counted as a replan).

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::belief::ClassId;
use crate::cost::CostModel;
use crate::error::{Result, SbgError};
use crate::graph::{NodeId, Sbg, SbgEdge};
use crate::observation::ObservationModel;
use crate::planner::{
    conservative_policy, optimistic_policy, value_iteration, PlanResult, PlannerConfig, Policy,
};

/// True terrain class per roadmap vertex; never `unknown`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    classes: Vec<ClassId>,
}

impl GroundTruth {
    pub fn new(classes: Vec<ClassId>, named_count: usize) -> Result<Self> {
        for (v, c) in classes.iter().enumerate() {
            if c.0 >= named_count {
                return Err(SbgError::invalid(format!(
                    "ground truth for vertex {v} is not a named class"
                )));
            }
        }
        Ok(GroundTruth { classes })
    }

    pub fn class(&self, vertex: usize) -> ClassId {
        self.classes[vertex]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Which planner produced the executed policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PolicyKind {
    Sbg,
    Conservative,
    Optimistic,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [
        PolicyKind::Sbg,
        PolicyKind::Conservative,
        PolicyKind::Optimistic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Sbg => "sbg",
            PolicyKind::Conservative => "conservative",
            PolicyKind::Optimistic => "optimistic",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = SbgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sbg" => Ok(PolicyKind::Sbg),
            "conservative" => Ok(PolicyKind::Conservative),
            "optimistic" => Ok(PolicyKind::Optimistic),
            other => Err(SbgError::invalid(format!(
                "unknown policy `{other}` (expected sbg, conservative, or optimistic)"
            ))),
        }
    }
}

/// Traversal time split by how each second was spent.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TimeBreakdown {
    /// Navigation with the controller matching the true terrain.
    pub matched_nav: f64,
    /// Navigation with a mismatched controller.
    pub mismatched_nav: f64,
    /// Information-gathering scans.
    pub ig: f64,
}

impl TimeBreakdown {
    pub fn total(&self) -> f64 {
        self.matched_nav + self.mismatched_nav + self.ig
    }
}

/// One executed action with its charged ground-truth cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionRecord {
    pub node: NodeId,
    pub edge: SbgEdge,
    pub charged: f64,
}

/// Outcome of a single simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub policy: PolicyKind,
    pub seed: u64,
    pub traversal_time: f64,
    pub actions: Vec<ActionRecord>,
    /// Navigate actions whose controller matched the departed terrain.
    pub controller_correct: usize,
    pub controller_total: usize,
    pub ig_count: usize,
    pub reached_goal: bool,
    /// Scan outcomes outside the expanded set that forced a replan.
    pub replans: usize,
    pub breakdown: TimeBreakdown,
}

/// Aggregate statistics over one policy's trials.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub policy: PolicyKind,
    pub trials: usize,
    pub mean_time: f64,
    pub min_time: f64,
    pub max_time: f64,
    /// Pooled executed correct-controller percentage; `None` when no
    /// navigate action was executed.
    pub executed_controller_pct: Option<f64>,
    /// Static policy-map accuracy before any execution; `None` when the
    /// initial policy contains no navigate action.
    pub static_controller_pct: Option<f64>,
    pub mean_ig: f64,
    pub mean_replans: f64,
    pub goal_rate: f64,
    /// Mean per-trial time breakdown; components sum to `mean_time`.
    pub breakdown: TimeBreakdown,
}

/// Experiment knobs; trials share seeds across policies (common random
/// numbers).
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub base_seed: u64,
    /// Defaults to 50 x node count.
    pub step_cap: Option<usize>,
    /// Rayon worker threads; defaults to one per trial up to the CPU count.
    pub jobs: Option<usize>,
    pub planner: PlannerConfig,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    /// Every trial, ordered by (policy, seed).
    pub trials: Vec<TrialResult>,
    /// One summary per requested policy, in request order.
    pub summaries: Vec<RunSummary>,
}

fn plan_for(
    kind: PolicyKind,
    sbg: &Sbg,
    cost: &CostModel,
    goal: usize,
    cfg: &PlannerConfig,
) -> Result<PlanResult> {
    match kind {
        PolicyKind::Sbg => value_iteration(sbg, cost, NodeId::Base(goal), cfg.tol, None),
        PolicyKind::Conservative => {
            conservative_policy(sbg, cost, NodeId::Base(goal), cfg.confidence)
        }
        PolicyKind::Optimistic => optimistic_policy(sbg, cost, NodeId::Base(goal)),
    }
}

/// Static correct-controller percentage of a policy map: over the navigate
/// actions chosen at base nodes, the fraction whose controller matches the
/// true class of the departed vertex. `None` when the policy navigates
/// nowhere.
pub fn controller_accuracy(policy: &Policy, truth: &GroundTruth) -> Option<f64> {
    let mut correct = 0usize;
    let mut total = 0usize;
    for (node, edge) in policy.iter() {
        if !node.is_base() {
            continue;
        }
        if let SbgEdge::Navigate { controller, .. } = edge {
            total += 1;
            if *controller == truth.class(node.vertex()) {
                correct += 1;
            }
        }
    }
    if total == 0 {
        None
    } else {
        Some(100.0 * correct as f64 / total as f64)
    }
}

/// Associates a post-scan belief with an expanded outcome slot.
fn outcome_slot(sbg: &Sbg, vertex: usize, class: ClassId) -> Option<usize> {
    sbg.ig_outcomes(vertex)
        .iter()
        .position(|o| o.class == class)
}

/// Runs one closed-loop trial: expands the graph, plans with the requested
/// planner, then executes until the goal or the step cap.
#[allow(clippy::too_many_arguments)]
pub fn run_trial(
    base: &Sbg,
    cost: &CostModel,
    obs: &ObservationModel,
    truth: &GroundTruth,
    kind: PolicyKind,
    start: usize,
    goal: usize,
    seed: u64,
    cfg: &PlannerConfig,
    step_cap: usize,
) -> Result<TrialResult> {
    if step_cap == 0 {
        return Err(SbgError::invalid("step_cap must be positive"));
    }
    if truth.len() != base.vertex_count() {
        return Err(SbgError::invalid(
            "ground truth does not cover every vertex",
        ));
    }
    let mut working = base.clone();
    working.expand_all(cfg.top_k, cfg.resolved_confidence, cfg.outcome_mode)?;
    let mut policy = plan_for(kind, &working, cost, goal, cfg)?.policy;

    let k = working.classes().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = NodeId::Base(start);
    let mut out = TrialResult {
        policy: kind,
        seed,
        traversal_time: 0.0,
        actions: Vec::new(),
        controller_correct: 0,
        controller_total: 0,
        ig_count: 0,
        reached_goal: false,
        replans: 0,
        breakdown: TimeBreakdown::default(),
    };

    for _ in 0..step_cap {
        if current.vertex() == goal {
            out.reached_goal = true;
            break;
        }
        let action = policy
            .action(current)
            .ok_or_else(|| SbgError::MissingAction(format!("{current}")))?
            .clone();
        match &action {
            SbgEdge::Navigate {
                to,
                controller,
                length,
                ..
            } => {
                // passive look at the vertex we are about to enter
                let dest = to.vertex();
                let distance = working.distance(current.vertex(), dest);
                let z = obs.sample_observation(truth.class(dest), distance, k, &mut rng)?;
                let row = obs.likelihood_row(z, distance, k)?;
                let posterior = working.semantic(NodeId::Base(dest)).bayes_update(&row)?;
                working.set_semantic(dest, posterior)?;

                let departed = truth.class(current.vertex());
                let charged = cost.true_nav_cost(departed, *controller, *length)?;
                out.controller_total += 1;
                if *controller == departed {
                    out.controller_correct += 1;
                    out.breakdown.matched_nav += charged;
                } else {
                    out.breakdown.mismatched_nav += charged;
                }
                out.traversal_time += charged;
                out.actions.push(ActionRecord {
                    node: current,
                    edge: action.clone(),
                    charged,
                });
                current = *to;
            }
            SbgEdge::InfoGather { node } => {
                let v = node.vertex();
                let z = obs.sample_ig_observation(truth.class(v), k, &mut rng);
                let row = obs.ig_likelihood_row(z, k)?;
                let posterior = working.semantic(NodeId::Base(v)).bayes_update(&row)?;
                working.set_semantic(v, posterior.clone())?;

                let charged = cost.ig_action_cost(&working, *node);
                out.ig_count += 1;
                out.breakdown.ig += charged;
                out.traversal_time += charged;
                out.actions.push(ActionRecord {
                    node: current,
                    edge: action.clone(),
                    charged,
                });

                let (realized, _) = posterior.argmax_class();
                let slot = match outcome_slot(&working, v, realized) {
                    Some(s) => s,
                    None => {
                        // realized class was outside the sampled outcomes:
                        // re-expand this node and recompute the policy
                        out.replans += 1;
                        working.expand_ig_outcomes(
                            NodeId::Base(v),
                            cfg.top_k,
                            cfg.resolved_confidence,
                            cfg.outcome_mode,
                        )?;
                        policy = plan_for(kind, &working, cost, goal, cfg)?.policy;
                        match outcome_slot(&working, v, realized) {
                            Some(s) => s,
                            // argmax may be `unknown`, which never expands
                            // alongside named classes; fall back to the most
                            // probable named class
                            None => {
                                let (named, _) = posterior.argmax_named();
                                outcome_slot(&working, v, named).ok_or_else(|| {
                                    SbgError::invalid(format!(
                                        "no scan outcome at {v} matches the realized class"
                                    ))
                                })?
                            }
                        }
                    }
                };
                current = NodeId::Outcome { base: v, slot };
            }
        }
    }
    if current.vertex() == goal {
        out.reached_goal = true;
    }
    Ok(out)
}

fn summarize(kind: PolicyKind, trials: &[TrialResult], static_pct: Option<f64>) -> RunSummary {
    let n = trials.len().max(1) as f64;
    let times: Vec<f64> = trials.iter().map(|t| t.traversal_time).collect();
    let correct: usize = trials.iter().map(|t| t.controller_correct).sum();
    let total: usize = trials.iter().map(|t| t.controller_total).sum();
    RunSummary {
        policy: kind,
        trials: trials.len(),
        mean_time: times.iter().sum::<f64>() / n,
        min_time: times.iter().cloned().fold(f64::INFINITY, f64::min),
        max_time: times.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        executed_controller_pct: if total == 0 {
            None
        } else {
            Some(100.0 * correct as f64 / total as f64)
        },
        static_controller_pct: static_pct,
        mean_ig: trials.iter().map(|t| t.ig_count as f64).sum::<f64>() / n,
        mean_replans: trials.iter().map(|t| t.replans as f64).sum::<f64>() / n,
        goal_rate: trials.iter().filter(|t| t.reached_goal).count() as f64 / n,
        breakdown: TimeBreakdown {
            matched_nav: trials.iter().map(|t| t.breakdown.matched_nav).sum::<f64>() / n,
            mismatched_nav: trials
                .iter()
                .map(|t| t.breakdown.mismatched_nav)
                .sum::<f64>()
                / n,
            ig: trials.iter().map(|t| t.breakdown.ig).sum::<f64>() / n,
        },
    }
}

/// Runs `trials` seeded trials per policy with common random numbers
/// (trial i uses seed `base_seed + i` for every policy) and aggregates one
/// summary per policy. Output order is deterministic regardless of `jobs`.
#[allow(clippy::too_many_arguments)]
pub fn run_experiment(
    base: &Sbg,
    cost: &CostModel,
    obs: &ObservationModel,
    truth: &GroundTruth,
    kinds: &[PolicyKind],
    start: usize,
    goal: usize,
    cfg: &ExperimentConfig,
) -> Result<ExperimentOutput> {
    if cfg.trials == 0 {
        return Err(SbgError::invalid("trials must be at least 1"));
    }
    if kinds.is_empty() {
        return Err(SbgError::invalid("at least one policy must be selected"));
    }
    let mut expanded = base.clone();
    expanded.expand_all(
        cfg.planner.top_k,
        cfg.planner.resolved_confidence,
        cfg.planner.outcome_mode,
    )?;
    let step_cap = cfg.step_cap.unwrap_or(50 * expanded.node_count().max(1));

    let jobs: Vec<(PolicyKind, u64)> = kinds
        .iter()
        .flat_map(|k| (0..cfg.trials as u64).map(move |i| (*k, cfg.base_seed + i)))
        .collect();
    let run = |(kind, seed): &(PolicyKind, u64)| {
        run_trial(
            base,
            cost,
            obs,
            truth,
            *kind,
            start,
            goal,
            *seed,
            &cfg.planner,
            step_cap,
        )
    };
    let results: Vec<Result<TrialResult>> = match cfg.jobs {
        Some(1) => jobs.iter().map(run).collect(),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| SbgError::invalid(format!("thread pool: {e}")))?
            .install(|| jobs.par_iter().map(run).collect()),
        None => jobs.par_iter().map(run).collect(),
    };
    let trials: Vec<TrialResult> = results.into_iter().collect::<Result<_>>()?;

    let mut summaries = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let static_pct = controller_accuracy(
            &plan_for(*kind, &expanded, cost, goal, &cfg.planner)?.policy,
            truth,
        );
        let mine: Vec<TrialResult> = trials
            .iter()
            .filter(|t| t.policy == *kind)
            .cloned()
            .collect();
        summaries.push(summarize(*kind, &mine, static_pct));
    }
    Ok(ExperimentOutput { trials, summaries })
}
