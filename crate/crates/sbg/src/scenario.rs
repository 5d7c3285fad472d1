//! Scenario documents: a versioned, self-contained JSON format bundling the
//! roadmap, ground truth, priors, cost table, observation model, and planner
//! configuration, plus a procedural urban-course generator.
//!
//! Loading is total: a document either yields a fully validated [`Scenario`]
//! or an error located by a JSON-pointer-style path.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{ClassId, ClassSet, SemanticBelief};
use crate::cost::{CostModel, DEFAULT_UNSAFE_COST};
use crate::error::{Result, SbgError};
use crate::graph::{build_sbg, Link, OutcomeMode, Roadmap, Sbg, Vertex};
use crate::observation::ObservationModel;
use crate::planner::PlannerConfig;
use crate::sim::GroundTruth;

pub const SCHEMA: &str = "sbg-scenario/1";

/// Position covariance assigned to every vertex; localization is assumed
/// accurate, so this is a small fixed blob.
pub const DEFAULT_COVARIANCE: [[f64; 3]; 3] =
    [[0.01, 0.0, 0.0], [0.0, 0.01, 0.0], [0.0, 0.0, 0.01]];

/// Fully validated experiment definition.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub classes: ClassSet,
    pub roadmap: Roadmap,
    pub truth: GroundTruth,
    /// Per-vertex priors; `None` falls back to the full-unknown prior.
    pub priors: Vec<Option<SemanticBelief>>,
    pub cost: CostModel,
    pub observation: ObservationModel,
    pub planner: PlannerConfig,
    pub start: usize,
    pub goal: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    id: String,
    position: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkDoc {
    from: String,
    to: String,
    length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostDoc {
    nav: Vec<Vec<f64>>,
    ig_cost: f64,
    #[serde(default = "default_unsafe")]
    unsafe_cost: f64,
}

fn default_unsafe() -> f64 {
    DEFAULT_UNSAFE_COST
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObsDoc {
    accuracy_at_zero: f64,
    accuracy_floor: f64,
    falloff_rate: f64,
    ig_accuracy: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlannerDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    top_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolved_confidence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outcome_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    confidence: Option<f64>,
}

/// On-disk document shape; field order is fixed for diff-friendly output.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    schema: String,
    name: String,
    /// Named classes only; `unknown` is implicit.
    classes: Vec<String>,
    vertices: Vec<VertexDoc>,
    links: Vec<LinkDoc>,
    /// Vertex id -> named class.
    ground_truth: BTreeMap<String, String>,
    /// Vertex id -> categorical prior over named classes + unknown.
    /// Missing vertices get the full-unknown prior.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    priors: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cost: Option<CostDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    observation: Option<ObsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    planner: Option<PlannerDoc>,
    start: String,
    goal: String,
}

fn located<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| SbgError::scenario(path, e.to_string()))
}

fn validate(doc: &ScenarioDoc) -> Result<Scenario> {
    if doc.schema != SCHEMA {
        return Err(SbgError::scenario(
            "/schema",
            format!("unsupported schema `{}`, expected `{SCHEMA}`", doc.schema),
        ));
    }
    let classes = located("/classes", ClassSet::new(&doc.classes))?;

    let vertices: Vec<Vertex> = doc
        .vertices
        .iter()
        .map(|v| Vertex {
            id: v.id.clone(),
            position: v.position,
        })
        .collect();
    let links: Vec<Link> = doc
        .links
        .iter()
        .map(|l| Link {
            from: l.from.clone(),
            to: l.to.clone(),
            length: l.length,
        })
        .collect();
    let roadmap = located("/links", Roadmap::new(vertices, links))?;

    let mut truth = Vec::with_capacity(roadmap.vertices().len());
    for v in roadmap.vertices() {
        let path = format!("/ground_truth/{}", v.id);
        let name = doc
            .ground_truth
            .get(&v.id)
            .ok_or_else(|| SbgError::scenario(&path, "vertex has no ground-truth label"))?;
        let class = classes
            .index_of(name)
            .ok_or_else(|| SbgError::scenario(&path, format!("unknown class name `{name}`")))?;
        if classes.is_unknown(class) {
            return Err(SbgError::scenario(
                &path,
                "ground truth must be a named class",
            ));
        }
        truth.push(class);
    }
    for id in doc.ground_truth.keys() {
        if roadmap.index_of(id).is_none() {
            return Err(SbgError::scenario(
                format!("/ground_truth/{id}"),
                "label references a vertex that does not exist",
            ));
        }
    }
    let truth = located(
        "/ground_truth",
        GroundTruth::new(truth, classes.named_count()),
    )?;

    let mut priors: Vec<Option<SemanticBelief>> = vec![None; roadmap.vertices().len()];
    for (id, probs) in &doc.priors {
        let path = format!("/priors/{id}");
        let v = roadmap.index_of(id).ok_or_else(|| {
            SbgError::scenario(&path, "prior references a vertex that does not exist")
        })?;
        if probs.len() != classes.len() {
            return Err(SbgError::scenario(
                &path,
                format!(
                    "prior has {} entries, class set needs {} (named + unknown)",
                    probs.len(),
                    classes.len()
                ),
            ));
        }
        priors[v] = Some(located(&path, SemanticBelief::new(probs.clone()))?);
    }

    let cost = match &doc.cost {
        Some(c) => {
            if c.nav.len() != classes.named_count() {
                return Err(SbgError::scenario(
                    "/cost/nav",
                    format!(
                        "table has {} rows, class set has {} named classes",
                        c.nav.len(),
                        classes.named_count()
                    ),
                ));
            }
            located(
                "/cost",
                CostModel::new(c.nav.clone(), c.ig_cost, c.unsafe_cost),
            )?
        }
        None => {
            if classes.named_count() != 3 {
                return Err(SbgError::scenario(
                    "/cost",
                    "no cost table given and the built-in default needs exactly 3 named classes",
                ));
            }
            CostModel::default_three_class(5.0)
        }
    };

    let observation = match &doc.observation {
        Some(o) => located(
            "/observation",
            ObservationModel::new(
                o.accuracy_at_zero,
                o.accuracy_floor,
                o.falloff_rate,
                o.ig_accuracy,
            ),
        )?,
        None => ObservationModel::defaults_for(classes.len()),
    };

    let defaults = PlannerConfig::default();
    let planner = match &doc.planner {
        Some(p) => PlannerConfig {
            top_k: p.top_k.unwrap_or(defaults.top_k),
            resolved_confidence: p
                .resolved_confidence
                .unwrap_or(defaults.resolved_confidence),
            tol: p.tol.unwrap_or(defaults.tol),
            outcome_mode: match p.outcome_mode.as_deref() {
                None => defaults.outcome_mode,
                Some("belief_proportional") => OutcomeMode::BeliefProportional,
                Some("uniform") => OutcomeMode::Uniform,
                Some(other) => {
                    return Err(SbgError::scenario(
                        "/planner/outcome_mode",
                        format!("unknown mode `{other}` (expected belief_proportional or uniform)"),
                    ))
                }
            },
            confidence: p.confidence.unwrap_or(defaults.confidence),
        },
        None => defaults,
    };
    if planner.top_k < 1 {
        return Err(SbgError::scenario("/planner/top_k", "must be at least 1"));
    }
    if !(planner.resolved_confidence > 0.5 && planner.resolved_confidence <= 1.0) {
        return Err(SbgError::scenario(
            "/planner/resolved_confidence",
            "must be in (0.5, 1]",
        ));
    }
    if !(planner.tol > 0.0) {
        return Err(SbgError::scenario("/planner/tol", "must be positive"));
    }
    if !(planner.confidence > 0.0 && planner.confidence <= 1.0) {
        return Err(SbgError::scenario(
            "/planner/confidence",
            "must be in (0, 1]",
        ));
    }

    let start = roadmap
        .index_of(&doc.start)
        .ok_or_else(|| SbgError::scenario("/start", format!("unknown vertex `{}`", doc.start)))?;
    let goal = roadmap
        .index_of(&doc.goal)
        .ok_or_else(|| SbgError::scenario("/goal", format!("unknown vertex `{}`", doc.goal)))?;

    // goal must be reachable from start on the undirected roadmap
    let n = roadmap.vertices().len();
    let mut adj = vec![Vec::new(); n];
    for l in roadmap.links() {
        let a = roadmap.index_of(&l.from).expect("validated");
        let b = roadmap.index_of(&l.to).expect("validated");
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if !seen[goal] {
        return Err(SbgError::scenario(
            "/goal",
            format!("vertex `{}` is unreachable from `{}`", doc.goal, doc.start),
        ));
    }

    Ok(Scenario {
        name: doc.name.clone(),
        classes,
        roadmap,
        truth,
        priors,
        cost,
        observation,
        planner,
        start,
        goal,
    })
}

impl Scenario {
    /// Parses and fully validates a scenario document.
    pub fn from_json(text: &str) -> Result<Scenario> {
        let doc: ScenarioDoc = serde_json::from_str(text)?;
        validate(&doc)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Scenario> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            SbgError::scenario(path.display().to_string(), format!("cannot read file: {e}"))
        })?;
        Scenario::from_json(&text).map_err(|e| match e {
            SbgError::Scenario { path: p, message } => SbgError::Scenario {
                path: format!("{}:{p}", path.display()),
                message,
            },
            other => other,
        })
    }

    /// Serializes back to the canonical document form. Loading the output
    /// yields an identical `Scenario`.
    pub fn to_json(&self) -> String {
        let doc = self.to_doc();
        serde_json::to_string_pretty(&doc).expect("scenario document serializes")
    }

    fn to_doc(&self) -> ScenarioDoc {
        ScenarioDoc {
            schema: SCHEMA.to_string(),
            name: self.name.clone(),
            classes: self.classes.names()[..self.classes.named_count()].to_vec(),
            vertices: self
                .roadmap
                .vertices()
                .iter()
                .map(|v| VertexDoc {
                    id: v.id.clone(),
                    position: v.position,
                })
                .collect(),
            links: self
                .roadmap
                .links()
                .iter()
                .map(|l| LinkDoc {
                    from: l.from.clone(),
                    to: l.to.clone(),
                    length: l.length,
                })
                .collect(),
            ground_truth: self
                .roadmap
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    (
                        v.id.clone(),
                        self.classes.name(self.truth.class(i)).to_string(),
                    )
                })
                .collect(),
            priors: self
                .roadmap
                .vertices()
                .iter()
                .enumerate()
                .filter_map(|(i, v)| {
                    self.priors[i]
                        .as_ref()
                        .map(|p| (v.id.clone(), p.probs().to_vec()))
                })
                .collect(),
            cost: Some(CostDoc {
                nav: self.cost.nav_table().to_vec(),
                ig_cost: self.cost.ig_cost(),
                unsafe_cost: self.cost.unsafe_cost(),
            }),
            observation: Some(ObsDoc {
                accuracy_at_zero: self.observation.accuracy_at_zero,
                accuracy_floor: self.observation.accuracy_floor,
                falloff_rate: self.observation.falloff_rate,
                ig_accuracy: self.observation.ig_accuracy,
            }),
            planner: Some(PlannerDoc {
                top_k: Some(self.planner.top_k),
                resolved_confidence: Some(self.planner.resolved_confidence),
                tol: Some(self.planner.tol),
                outcome_mode: Some(
                    match self.planner.outcome_mode {
                        OutcomeMode::BeliefProportional => "belief_proportional",
                        OutcomeMode::Uniform => "uniform",
                    }
                    .to_string(),
                ),
                confidence: Some(self.planner.confidence),
            }),
            start: self.roadmap.vertices()[self.start].id.clone(),
            goal: self.roadmap.vertices()[self.goal].id.clone(),
        }
    }

    /// Builds the belief graph with priors applied (not yet expanded).
    pub fn build_graph(&self) -> Result<Sbg> {
        build_sbg(
            &self.roadmap,
            &self.priors,
            &self.classes,
            DEFAULT_COVARIANCE,
        )
    }
}

/// Prior archetypes used by the urban generator, loosely mirroring how
/// confident an aerial map is about each terrain kind: most flat and rubble
/// segments are mapped exactly, some flat segments look like rubble from
/// above ("suspect"), and stairs are recognized but not confidently enough
/// to commit without a scan.
fn urban_prior(truth: ClassId, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match truth.0 {
        0 => {
            if rng.gen::<f64>() < 0.25 {
                // debris shadows make this flat segment look like rubble
                vec![0.35, 0.05, 0.45, 0.15]
            } else {
                vec![1.0, 0.0, 0.0, 0.0]
            }
        }
        1 => vec![0.08, 0.85, 0.04, 0.03],
        _ => vec![0.0, 0.0, 1.0, 0.0],
    }
}

/// Generates a linear urban course with detour branches around each
/// non-flat cluster. Deterministic given the seed.
pub fn generate_urban_course(
    segments: usize,
    total_length: f64,
    stair_fraction: f64,
    rubble_fraction: f64,
    seed: u64,
) -> Result<Scenario> {
    if segments < 2 {
        return Err(SbgError::invalid("segments must be at least 2"));
    }
    if !(stair_fraction >= 0.0 && rubble_fraction >= 0.0 && stair_fraction + rubble_fraction <= 1.0)
    {
        return Err(SbgError::invalid(
            "terrain fractions must be non-negative and sum to at most 1",
        ));
    }
    if !(total_length > 0.0) {
        return Err(SbgError::invalid("total_length must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // segment lengths: jittered then scaled to hit total_length exactly
    let raw: Vec<f64> = (0..segments).map(|_| rng.gen_range(0.7..1.3)).collect();
    let scale = total_length / raw.iter().sum::<f64>();
    let lengths: Vec<f64> = raw.iter().map(|r| r * scale).collect();

    // terrain per interior main vertex; endpoints stay flat so every
    // non-flat cluster is bracketed by flat detour anchors
    let n_main = segments + 1;
    let mut truth = vec![ClassId(0); n_main];
    for t in truth.iter_mut().take(n_main - 1).skip(1) {
        let u: f64 = rng.gen();
        *t = if u < stair_fraction {
            ClassId(1)
        } else if u < stair_fraction + rubble_fraction {
            ClassId(2)
        } else {
            ClassId(0)
        };
    }

    let mut vertices = Vec::new();
    let mut x = 0.0;
    vertices.push(VertexDoc {
        id: "m0".to_string(),
        position: [0.0, 0.0, 0.0],
    });
    for (i, len) in lengths.iter().enumerate() {
        x += len;
        vertices.push(VertexDoc {
            id: format!("m{}", i + 1),
            position: [x, 0.0, 0.0],
        });
    }
    let mut links: Vec<LinkDoc> = lengths
        .iter()
        .enumerate()
        .map(|(i, len)| LinkDoc {
            from: format!("m{i}"),
            to: format!("m{}", i + 1),
            length: *len,
        })
        .collect();

    // one flat detour branch per maximal non-flat cluster, anchored at the
    // flat vertices bracketing it; the detour is markedly longer so it only
    // pays off when the direct terrain is hostile
    let mut truth_map: BTreeMap<String, ClassId> = truth
        .iter()
        .enumerate()
        .map(|(i, c)| (format!("m{i}"), *c))
        .collect();
    let mut branch = 0usize;
    let mut i = 1;
    while i < n_main - 1 {
        if truth[i] == ClassId(0) {
            i += 1;
            continue;
        }
        let first = i;
        while i < n_main - 1 && truth[i] != ClassId(0) {
            i += 1;
        }
        let a = first - 1; // flat anchor before the cluster
        let b = i; // flat anchor after it
        let ax = vertices[a].position[0];
        let bx = vertices[b].position[0];
        let direct = bx - ax;
        let detour_len = 3.5 * direct;
        let half = detour_len / 2.0;
        // bypass vertex placed so each half-link is exactly Euclidean
        let dy = (half * half - (direct / 2.0) * (direct / 2.0)).sqrt();
        let id = format!("b{branch}");
        vertices.push(VertexDoc {
            id: id.clone(),
            position: [(ax + bx) / 2.0, dy, 0.0],
        });
        truth_map.insert(id.clone(), ClassId(0));
        links.push(LinkDoc {
            from: vertices[a].id.clone(),
            to: id.clone(),
            length: half,
        });
        links.push(LinkDoc {
            from: id.clone(),
            to: vertices[b].id.clone(),
            length: half,
        });
        branch += 1;
    }

    let classes = ClassSet::new(&["flat_ground", "stair", "rubble"])?;
    let mut priors = BTreeMap::new();
    let mut ground_truth = BTreeMap::new();
    for v in &vertices {
        let t = truth_map[&v.id];
        ground_truth.insert(v.id.clone(), classes.name(t).to_string());
        priors.insert(v.id.clone(), urban_prior(t, &mut rng));
    }

    let doc = ScenarioDoc {
        schema: SCHEMA.to_string(),
        name: format!("urban-course-seed{seed}"),
        classes: vec![
            "flat_ground".to_string(),
            "stair".to_string(),
            "rubble".to_string(),
        ],
        vertices,
        links,
        ground_truth,
        priors,
        cost: Some(CostDoc {
            nav: CostModel::default_three_class(10.0).nav_table().to_vec(),
            ig_cost: 10.0,
            unsafe_cost: DEFAULT_UNSAFE_COST,
        }),
        observation: Some(ObsDoc {
            accuracy_at_zero: 0.95,
            accuracy_floor: 0.25,
            falloff_rate: 0.05,
            ig_accuracy: 0.99,
        }),
        planner: Some(PlannerDoc {
            top_k: Some(2),
            resolved_confidence: Some(1.0),
            tol: Some(1e-6),
            outcome_mode: Some("belief_proportional".to_string()),
            confidence: Some(0.95),
        }),
        start: "m0".to_string(),
        goal: format!("m{segments}"),
    };
    validate(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_doc() -> serde_json::Value {
        serde_json::json!({
            "schema": SCHEMA,
            "name": "mini",
            "classes": ["flat_ground", "stair", "rubble"],
            "vertices": [
                {"id": "a", "position": [0.0, 0.0, 0.0]},
                {"id": "b", "position": [3.0, 0.0, 0.0]}
            ],
            "links": [{"from": "a", "to": "b", "length": 3.0}],
            "ground_truth": {"a": "flat_ground", "b": "stair"},
            "start": "a",
            "goal": "b"
        })
    }

    #[test]
    fn minimal_document_loads_with_defaults() {
        let s = Scenario::from_json(&minimal_doc().to_string()).unwrap();
        assert_eq!(s.name, "mini");
        assert_eq!(s.classes.named_count(), 3);
        assert_eq!(s.planner, PlannerConfig::default());
        // omitted priors become the full-unknown prior at build time
        let sbg = s.build_graph().unwrap();
        let unknown = s.classes.unknown();
        assert_eq!(
            sbg.semantic(crate::graph::NodeId::Base(0)).prob(unknown),
            1.0
        );
    }

    #[test]
    fn round_trip_is_stable() {
        let s = Scenario::from_json(&minimal_doc().to_string()).unwrap();
        let re = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(s, re);
        assert_eq!(s.to_json(), re.to_json());
    }

    #[test]
    fn located_errors() {
        let mut doc = minimal_doc();
        doc["ground_truth"]["b"] = "lava".into();
        let err = Scenario::from_json(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains("/ground_truth/b"), "{err}");

        let mut doc = minimal_doc();
        doc["cost"] = serde_json::json!({"nav": [[1.0, 2.0]], "ig_cost": 5.0});
        let err = Scenario::from_json(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains("/cost/nav"), "{err}");

        let mut doc = minimal_doc();
        doc["cost"] = serde_json::json!({
            "nav": [[1.0, 2.0, 2.0, 2.0], [2.0, 1.0, 2.0, 2.0], [2.0, 2.0, -1.0, 2.0]],
            "ig_cost": 5.0
        });
        let err = Scenario::from_json(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains("/cost"), "{err}");

        let mut doc = minimal_doc();
        doc["goal"] = "zzz".into();
        let err = Scenario::from_json(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains("/goal"), "{err}");

        let mut doc = minimal_doc();
        doc["priors"] = serde_json::json!({"a": [0.5, 0.5]});
        let err = Scenario::from_json(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains("/priors/a"), "{err}");
    }

    #[test]
    fn unreachable_goal_rejected() {
        let doc = serde_json::json!({
            "schema": SCHEMA,
            "name": "split",
            "classes": ["flat_ground", "stair", "rubble"],
            "vertices": [
                {"id": "a", "position": [0.0, 0.0, 0.0]},
                {"id": "b", "position": [3.0, 0.0, 0.0]},
                {"id": "c", "position": [9.0, 0.0, 0.0]}
            ],
            "links": [{"from": "a", "to": "b", "length": 3.0}],
            "ground_truth": {"a": "flat_ground", "b": "flat_ground", "c": "flat_ground"},
            "start": "a",
            "goal": "c"
        });
        let err = Scenario::from_json(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains("unreachable"), "{err}");
    }

    #[test]
    fn wrong_schema_rejected() {
        let mut doc = minimal_doc();
        doc["schema"] = "sbg-scenario/999".into();
        assert!(Scenario::from_json(&doc.to_string()).is_err());
    }

    #[test]
    fn urban_generator_meets_paper_statistics() {
        let s = generate_urban_course(27, 300.0, 0.2, 0.2, 7).unwrap();
        let main_links: Vec<_> = s
            .roadmap
            .links()
            .iter()
            .filter(|l| l.from.starts_with('m') && l.to.starts_with('m'))
            .collect();
        assert_eq!(main_links.len(), 27);
        let total: f64 = main_links.iter().map(|l| l.length).sum();
        assert!((297.0..=303.0).contains(&total), "main length {total}");
    }

    #[test]
    fn urban_generator_is_deterministic() {
        let a = generate_urban_course(27, 300.0, 0.2, 0.2, 7).unwrap();
        let b = generate_urban_course(27, 300.0, 0.2, 0.2, 7).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = generate_urban_course(27, 300.0, 0.2, 0.2, 8).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }

    #[test]
    fn all_flat_course_has_no_branches() {
        let s = generate_urban_course(10, 100.0, 0.0, 0.0, 3).unwrap();
        assert_eq!(s.roadmap.vertices().len(), 11);
        assert_eq!(s.roadmap.links().len(), 10);
        for i in 0..11 {
            assert_eq!(s.truth.class(i), ClassId(0));
        }
    }

    #[test]
    fn generator_rejects_bad_fractions() {
        assert!(generate_urban_course(10, 100.0, 0.8, 0.5, 1).is_err());
        assert!(generate_urban_course(1, 100.0, 0.1, 0.1, 1).is_err());
    }
}
