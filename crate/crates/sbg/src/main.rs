//! Command-line front end: offline planning, policy comparison, and
//! scenario generation with deterministic CSV/DOT artifacts.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error,
//! 3 planner non-convergence.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use sbg::error::{Result, SbgError};
use sbg::graph::NodeId;
use sbg::planner::value_iteration;
use sbg::scenario::{generate_urban_course, Scenario};
use sbg::sim::{run_experiment, ExperimentConfig, PolicyKind, RunSummary, TrialResult};
use sbg::SbgEdge;

#[derive(Parser)]
#[command(
    name = "sbg",
    version,
    about = "Semantic belief graph planner and simulator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Plan offline: solve the scenario and export value/policy tables.
    Plan(PlanArgs),
    /// Simulate the selected policies with common random numbers.
    Compare(CompareArgs),
    /// Generate a procedural urban-course scenario document.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// Scenario document (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for values.csv and policy.csv.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also export graph.dot with the optimal policy highlighted.
    #[arg(long)]
    dot: bool,
    /// Override the scenario's value-iteration tolerance, seconds.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    /// Scenario document (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Trials per policy.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Base seed; trial i uses seed base+i for every policy.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated policies, or `all`.
    #[arg(long, default_value = "all")]
    policies: String,
    /// Output directory for trials.csv and summary.csv.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also export graph.dot with the optimal policy highlighted.
    #[arg(long)]
    dot: bool,
    /// Override the scenario's value-iteration tolerance, seconds.
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads for trial execution; output is identical for any value.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Main-chain segment count.
    #[arg(long, default_value_t = 27)]
    segments: usize,
    /// Main-chain length in meters.
    #[arg(long, default_value_t = 300.0)]
    total_length: f64,
    #[arg(long, default_value_t = 0.2)]
    stair_fraction: f64,
    #[arg(long, default_value_t = 0.2)]
    rubble_fraction: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output scenario path.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = match cli.cmd {
        Cmd::Plan(args) => cmd_plan(&args),
        Cmd::Compare(args) => cmd_compare(&args),
        Cmd::Generate(args) => cmd_generate(&args),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                SbgError::NonConvergence { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn load_expanded(scenario: &Scenario, tol: Option<f64>) -> Result<(sbg::Sbg, sbg::PlannerConfig)> {
    let mut cfg = scenario.planner.clone();
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(SbgError::invalid("--tol must be positive"));
        }
        cfg.tol = t;
    }
    let mut graph = scenario.build_graph()?;
    graph.expand_all(cfg.top_k, cfg.resolved_confidence, cfg.outcome_mode)?;
    Ok((graph, cfg))
}

fn edge_fields(scenario: &Scenario, edge: &SbgEdge) -> (String, String, String) {
    match edge {
        SbgEdge::Navigate { to, controller, .. } => (
            "navigate".to_string(),
            format!("{to}"),
            scenario.classes.name(*controller).to_string(),
        ),
        SbgEdge::InfoGather { node } => {
            ("info_gather".to_string(), format!("{node}"), String::new())
        }
    }
}

fn cmd_plan(args: &PlanArgs) -> Result<()> {
    let scenario = Scenario::from_path(&args.scenario)?;
    let (graph, cfg) = load_expanded(&scenario, args.tol)?;
    let plan = value_iteration(
        &graph,
        &scenario.cost,
        NodeId::Base(scenario.goal),
        cfg.tol,
        None,
    )?;

    std::fs::create_dir_all(&args.out)?;
    let mut values = String::from("node,value_s,reachable\n");
    let mut policy = String::from("node,action,target,controller\n");
    for node in graph.node_ids() {
        match plan.values.get(node) {
            Some(v) => {
                let _ = writeln!(values, "{node},{v:.6},true");
            }
            None => {
                let _ = writeln!(values, "{node},,false");
            }
        }
        if let Some(edge) = plan.policy.action(node) {
            let (action, target, controller) = edge_fields(&scenario, edge);
            let _ = writeln!(policy, "{node},{action},{target},{controller}");
        }
    }
    std::fs::write(args.out.join("values.csv"), values)?;
    std::fs::write(args.out.join("policy.csv"), policy)?;
    if args.dot {
        std::fs::write(
            args.out.join("graph.dot"),
            graph.export_dot(Some(&plan.policy)),
        )?;
    }

    let start = NodeId::Base(scenario.start);
    match plan.values.get(start) {
        Some(j) => println!(
            "J({}) = {j:.6} s  ({} sweeps, residual {:.3e})",
            graph.vertex_id(scenario.start),
            plan.sweeps,
            plan.residuals.last().copied().unwrap_or(0.0),
        ),
        None => println!("J({}) = unreachable", graph.vertex_id(scenario.start)),
    }
    Ok(())
}

fn parse_policies(spec: &str) -> Result<Vec<PolicyKind>> {
    if spec == "all" {
        return Ok(PolicyKind::ALL.to_vec());
    }
    let mut kinds = Vec::new();
    for part in spec.split(',') {
        let kind: PolicyKind = part.trim().parse()?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    Ok(kinds)
}

fn trial_row(t: &TrialResult) -> String {
    format!(
        "{},{},{:.6},{},{},{},{}\n",
        t.seed,
        t.policy,
        t.traversal_time,
        t.controller_correct,
        t.controller_total,
        t.ig_count,
        t.reached_goal
    )
}

fn pct_field(p: Option<f64>) -> String {
    match p {
        Some(v) => format!("{v:.3}"),
        None => "na".to_string(),
    }
}

fn summary_row(s: &RunSummary) -> String {
    format!(
        "{},{},{:.6},{:.6},{:.6},{},{},{:.3},{:.3},{:.3},{:.6},{:.6},{:.6}\n",
        s.policy,
        s.trials,
        s.mean_time,
        s.min_time,
        s.max_time,
        pct_field(s.executed_controller_pct),
        pct_field(s.static_controller_pct),
        s.mean_ig,
        s.mean_replans,
        s.goal_rate,
        s.breakdown.matched_nav,
        s.breakdown.mismatched_nav,
        s.breakdown.ig
    )
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let scenario = Scenario::from_path(&args.scenario)?;
    let kinds = parse_policies(&args.policies)?;
    let (graph, planner) = load_expanded(&scenario, args.tol)?;
    let cfg = ExperimentConfig {
        trials: args.trials,
        base_seed: args.seed,
        step_cap: None,
        jobs: args.jobs,
        planner,
    };
    let base = scenario.build_graph()?;
    let out = run_experiment(
        &base,
        &scenario.cost,
        &scenario.observation,
        &scenario.truth,
        &kinds,
        scenario.start,
        scenario.goal,
        &cfg,
    )?;

    std::fs::create_dir_all(&args.out)?;
    let mut trials = String::from(
        "seed,policy,traversal_time_s,controller_correct,controller_total,ig_count,reached_goal\n",
    );
    for t in &out.trials {
        trials.push_str(&trial_row(t));
    }
    std::fs::write(args.out.join("trials.csv"), trials)?;

    let mut summary = String::from(
        "policy,trials,mean_time_s,min_time_s,max_time_s,executed_controller_pct,\
         static_controller_pct,mean_ig,mean_replans,goal_rate,matched_nav_s,mismatched_nav_s,ig_s\n",
    );
    for s in &out.summaries {
        summary.push_str(&summary_row(s));
    }
    std::fs::write(args.out.join("summary.csv"), summary)?;

    if args.dot {
        let plan = value_iteration(
            &graph,
            &scenario.cost,
            NodeId::Base(scenario.goal),
            cfg.planner.tol,
            None,
        )?;
        std::fs::write(
            args.out.join("graph.dot"),
            graph.export_dot(Some(&plan.policy)),
        )?;
    }

    println!(
        "{:<14} {:>10} {:>14} {:>8}",
        "policy", "correct-%", "mean-time-s", "mean-IG"
    );
    for s in &out.summaries {
        println!(
            "{:<14} {:>10} {:>14.3} {:>8.2}",
            s.policy.name(),
            pct_field(s.static_controller_pct),
            s.mean_time,
            s.mean_ig
        );
    }
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let scenario = generate_urban_course(
        args.segments,
        args.total_length,
        args.stair_fraction,
        args.rubble_fraction,
        args.seed,
    )?;
    if let Some(dir) = args.out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(&args.out, scenario.to_json())?;
    println!(
        "wrote {} ({} vertices, {} links)",
        args.out.display(),
        scenario.roadmap.vertices().len(),
        scenario.roadmap.links().len()
    );
    Ok(())
}
