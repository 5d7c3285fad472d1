//! The semantic belief graph: belief nodes over a roadmap, parallel
//! terrain-controller edges, information-gathering self-loops, and the
//! sampled scan-outcome virtual nodes with their transition probabilities.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use crate::belief::{ClassId, ClassSet, GeoSemanticBelief, GeometricBelief, SemanticBelief};
use crate::error::{Result, SbgError};
use crate::planner::Policy;

/// Node identifier. Base nodes come from roadmap vertices; outcome nodes are
/// the virtual realizations of a base node after an information-gathering
/// scan. Ordering puts base nodes first, then outcomes by (base, slot).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeId {
    Base(usize),
    Outcome { base: usize, slot: usize },
}

impl NodeId {
    /// Roadmap vertex this node sits on.
    pub fn vertex(&self) -> usize {
        match self {
            NodeId::Base(i) => *i,
            NodeId::Outcome { base, .. } => *base,
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self, NodeId::Base(_))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Base(i) => write!(f, "v{i}"),
            NodeId::Outcome { base, slot } => write!(f, "v{base}.o{slot}"),
        }
    }
}

/// Roadmap vertex: opaque string id plus a 3D position in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub position: [f64; 3],
}

/// Undirected roadmap link with a travel length in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub from: String,
    pub to: String,
    pub length: f64,
}

/// Geometric roadmap ingested from a scenario; sampling is out of scope.
#[derive(Debug, Clone, PartialEq)]
pub struct Roadmap {
    vertices: Vec<Vertex>,
    links: Vec<Link>,
}

impl Roadmap {
    pub fn new(vertices: Vec<Vertex>, links: Vec<Link>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.id.clone()) {
                return Err(SbgError::invalid(format!("duplicate vertex id `{}`", v.id)));
            }
            if v.position.iter().any(|c| !c.is_finite()) {
                return Err(SbgError::invalid(format!(
                    "vertex `{}` has a non-finite position",
                    v.id
                )));
            }
        }
        let index_of = |id: &str| vertices.iter().position(|v| v.id == id);
        for l in &links {
            let a = index_of(&l.from).ok_or_else(|| {
                SbgError::invalid(format!("link references missing vertex `{}`", l.from))
            })?;
            let b = index_of(&l.to).ok_or_else(|| {
                SbgError::invalid(format!("link references missing vertex `{}`", l.to))
            })?;
            if a == b {
                return Err(SbgError::invalid(format!(
                    "link `{}` -> `{}` is a self-loop",
                    l.from, l.to
                )));
            }
            if !(l.length > 0.0) {
                return Err(SbgError::invalid(format!(
                    "link `{}` -> `{}` has non-positive length",
                    l.from, l.to
                )));
            }
            let d: f64 = vertices[a]
                .position
                .iter()
                .zip(&vertices[b].position)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            if l.length < d - 1e-6 {
                return Err(SbgError::invalid(format!(
                    "link `{}` -> `{}` length {} is shorter than the Euclidean distance {d}",
                    l.from, l.to, l.length
                )));
            }
        }
        Ok(Roadmap { vertices, links })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }
}

/// One sampled realization of a node after an information-gathering scan.
#[derive(Debug, Clone, PartialEq)]
pub struct IgOutcome {
    /// Class the scan is assumed to reveal.
    pub class: ClassId,
    /// Transition probability of landing on this realization.
    pub prob: f64,
    /// Concentrated semantic belief of the realization.
    pub belief: SemanticBelief,
}

/// How scan-outcome transition probabilities are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeMode {
    /// Current belief mass, renormalized over the selected top-k classes.
    BeliefProportional,
    /// Uniform over the selected top-k classes.
    Uniform,
}

/// Graph edge: a terrain-specific navigation controller or an
/// information-gathering self-loop.
#[derive(Debug, Clone, PartialEq)]
pub enum SbgEdge {
    Navigate {
        from: NodeId,
        to: NodeId,
        controller: ClassId,
        length: f64,
    },
    InfoGather {
        node: NodeId,
    },
}

impl SbgEdge {
    pub fn from_node(&self) -> NodeId {
        match self {
            SbgEdge::Navigate { from, .. } => *from,
            SbgEdge::InfoGather { node } => *node,
        }
    }
}

/// The semantic belief graph.
#[derive(Debug, Clone)]
pub struct Sbg {
    classes: ClassSet,
    vertex_ids: Vec<String>,
    beliefs: Vec<GeoSemanticBelief>,
    /// Sorted (neighbor, length) pairs per vertex.
    adjacency: Vec<Vec<(usize, f64)>>,
    link_count: usize,
    /// Scan outcomes per vertex; empty until expanded.
    outcomes: Vec<Vec<IgOutcome>>,
}

/// Builds the graph: one base node per roadmap vertex, `d_l` parallel
/// navigation edges per link per direction, and one information-gathering
/// self-loop per base node. Outcome nodes appear only after expansion.
pub fn build_sbg(
    roadmap: &Roadmap,
    priors: &[Option<SemanticBelief>],
    classes: &ClassSet,
    default_covariance: [[f64; 3]; 3],
) -> Result<Sbg> {
    if priors.len() != roadmap.vertices().len() {
        return Err(SbgError::invalid(format!(
            "got {} priors for {} vertices",
            priors.len(),
            roadmap.vertices().len()
        )));
    }
    let n = roadmap.vertices().len();
    let mut beliefs = Vec::with_capacity(n);
    for (v, prior) in roadmap.vertices().iter().zip(priors) {
        let semantic = match prior {
            Some(p) => {
                if p.len() != classes.len() {
                    return Err(SbgError::invalid(format!(
                        "prior for vertex `{}` has {} entries, class set has {}",
                        v.id,
                        p.len(),
                        classes.len()
                    )));
                }
                p.clone()
            }
            None => SemanticBelief::unknown_prior(classes, 1.0)?,
        };
        beliefs.push(GeoSemanticBelief {
            geometric: GeometricBelief::new(v.position, default_covariance)?,
            semantic,
        });
    }
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for l in roadmap.links() {
        let a = roadmap
            .index_of(&l.from)
            .expect("validated by Roadmap::new");
        let b = roadmap.index_of(&l.to).expect("validated by Roadmap::new");
        adjacency[a].push((b, l.length));
        adjacency[b].push((a, l.length));
    }
    for adj in &mut adjacency {
        adj.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.partial_cmp(&y.1).unwrap()));
    }
    Ok(Sbg {
        classes: classes.clone(),
        vertex_ids: roadmap.vertices().iter().map(|v| v.id.clone()).collect(),
        beliefs,
        adjacency,
        link_count: roadmap.links().len(),
        outcomes: vec![Vec::new(); n],
    })
}

impl Sbg {
    pub fn classes(&self) -> &ClassSet {
        &self.classes
    }

    pub fn vertex_count(&self) -> usize {
        self.beliefs.len()
    }

    pub fn vertex_id(&self, vertex: usize) -> &str {
        &self.vertex_ids[vertex]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertex_ids.iter().position(|v| v == id)
    }

    pub fn position(&self, vertex: usize) -> [f64; 3] {
        self.beliefs[vertex].geometric.mean()
    }

    pub fn neighbors(&self, vertex: usize) -> &[(usize, f64)] {
        &self.adjacency[vertex]
    }

    /// Euclidean distance between two vertex positions.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.beliefs[a]
            .geometric
            .distance_to(&self.beliefs[b].geometric)
    }

    fn check_node(&self, node: NodeId) -> Result<()> {
        match node {
            NodeId::Base(i) if i < self.beliefs.len() => Ok(()),
            NodeId::Outcome { base, slot }
                if base < self.beliefs.len() && slot < self.outcomes[base].len() =>
            {
                Ok(())
            }
            _ => Err(SbgError::invalid(format!("node {node} does not exist"))),
        }
    }

    /// Joint belief at a node. Outcome nodes share the parent's geometric
    /// belief exactly and carry their own concentrated semantic belief.
    pub fn semantic(&self, node: NodeId) -> &SemanticBelief {
        match node {
            NodeId::Base(i) => &self.beliefs[i].semantic,
            NodeId::Outcome { base, slot } => &self.outcomes[base][slot].belief,
        }
    }

    pub fn geometric(&self, node: NodeId) -> &GeometricBelief {
        &self.beliefs[node.vertex()].geometric
    }

    /// Replaces the semantic belief of a base node (simulator filter state).
    pub fn set_semantic(&mut self, vertex: usize, belief: SemanticBelief) -> Result<()> {
        if belief.len() != self.classes.len() {
            return Err(SbgError::invalid("belief length does not match class set"));
        }
        self.beliefs[vertex].semantic = belief;
        Ok(())
    }

    pub fn ig_outcomes(&self, vertex: usize) -> &[IgOutcome] {
        &self.outcomes[vertex]
    }

    /// Scan transition distribution of a base node's IG loop.
    pub fn ig_transitions(&self, node: NodeId) -> Result<Vec<(NodeId, f64)>> {
        self.check_node(node)?;
        match node {
            NodeId::Base(base) => Ok(self.outcomes[base]
                .iter()
                .enumerate()
                .map(|(slot, o)| (NodeId::Outcome { base, slot }, o.prob))
                .collect()),
            NodeId::Outcome { .. } => Err(SbgError::invalid(
                "outcome nodes carry no information-gathering loop",
            )),
        }
    }

    /// Expands the sampled scan outcomes of one base node. Re-expansion
    /// replaces any previous outcomes for that node.
    pub fn expand_ig_outcomes(
        &mut self,
        node: NodeId,
        top_k: usize,
        resolved_confidence: f64,
        mode: OutcomeMode,
    ) -> Result<()> {
        let base = match node {
            NodeId::Base(i) if i < self.beliefs.len() => i,
            _ => {
                return Err(SbgError::invalid(format!(
                    "expansion target {node} is not an existing base node"
                )))
            }
        };
        if top_k < 1 {
            return Err(SbgError::invalid("top_k must be at least 1"));
        }
        if !(resolved_confidence > 0.5 && resolved_confidence <= 1.0) {
            return Err(SbgError::invalid("resolved_confidence must be in (0.5, 1]"));
        }
        let prior = &self.beliefs[base].semantic;
        let unknown = self.classes.unknown();
        // Named classes with positive mass, heaviest first, ties to lowest index.
        let mut candidates: Vec<(ClassId, f64)> = self
            .classes
            .named()
            .map(|c| (c, prior.prob(c)))
            .filter(|(_, p)| *p > 0.0)
            .collect();
        candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        candidates.truncate(top_k);
        if candidates.is_empty() {
            // unknown is the only positive class
            candidates.push((unknown, prior.prob(unknown)));
        }
        let total: f64 = candidates.iter().map(|(_, p)| p).sum();
        let k = candidates.len();
        let mut outs = Vec::with_capacity(k);
        for (class, mass) in candidates {
            let prob = match mode {
                OutcomeMode::BeliefProportional => mass / total,
                OutcomeMode::Uniform => 1.0 / k as f64,
            };
            outs.push(IgOutcome {
                class,
                prob,
                belief: SemanticBelief::concentrated(
                    self.classes.len(),
                    class,
                    resolved_confidence,
                )?,
            });
        }
        self.outcomes[base] = outs;
        Ok(())
    }

    /// Expands every base node.
    pub fn expand_all(
        &mut self,
        top_k: usize,
        resolved_confidence: f64,
        mode: OutcomeMode,
    ) -> Result<()> {
        for i in 0..self.beliefs.len() {
            self.expand_ig_outcomes(NodeId::Base(i), top_k, resolved_confidence, mode)?;
        }
        Ok(())
    }

    /// All node ids in deterministic order: base nodes, then outcomes.
    pub fn node_ids(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = (0..self.beliefs.len()).map(NodeId::Base).collect();
        for (base, outs) in self.outcomes.iter().enumerate() {
            for slot in 0..outs.len() {
                ids.push(NodeId::Outcome { base, slot });
            }
        }
        ids
    }

    pub fn node_count(&self) -> usize {
        self.beliefs.len() + self.outcomes.iter().map(Vec::len).sum::<usize>()
    }

    /// All navigation edges out of a node plus, for base nodes, the IG loop.
    /// Outcome nodes inherit the parent's navigation edges but no IG loop.
    pub fn actions_from(&self, node: NodeId) -> Result<Vec<SbgEdge>> {
        self.check_node(node)?;
        let vertex = node.vertex();
        let mut edges = Vec::new();
        for &(to, length) in &self.adjacency[vertex] {
            for controller in self.classes.named() {
                edges.push(SbgEdge::Navigate {
                    from: node,
                    to: NodeId::Base(to),
                    controller,
                    length,
                });
            }
        }
        if node.is_base() {
            edges.push(SbgEdge::InfoGather { node });
        }
        Ok(edges)
    }

    /// Total navigation edge count (directed, all parallel controllers),
    /// counting base nodes only.
    pub fn navigate_edge_count(&self) -> usize {
        self.link_count * 2 * self.classes.named_count()
    }

    /// Deterministic Graphviz DOT rendering. Nodes are labeled with their
    /// most probable class; edges chosen by `policy` are highlighted.
    pub fn export_dot(&self, policy: Option<&Policy>) -> String {
        let mut out = String::new();
        out.push_str("digraph sbg {\n");
        out.push_str("  rankdir=LR;\n");
        let chosen = |edge: &SbgEdge| -> bool {
            policy.and_then(|p| p.action(edge.from_node())) == Some(edge)
        };
        for node in self.node_ids() {
            let b = self.semantic(node);
            let (c, p) = b.argmax_class();
            let label = match node {
                NodeId::Base(i) => {
                    format!("{}\\n{} {:.2}", self.vertex_ids[i], self.classes.name(c), p)
                }
                NodeId::Outcome { base, slot } => format!(
                    "{}~{}\\n{} {:.2}",
                    self.vertex_ids[base],
                    slot,
                    self.classes.name(c),
                    p
                ),
            };
            let shape = if node.is_base() { "ellipse" } else { "box" };
            let _ = writeln!(out, "  \"{node}\" [label=\"{label}\", shape={shape}];");
        }
        for node in self.node_ids() {
            for edge in self.actions_from(node).expect("node exists") {
                let attrs = match &edge {
                    SbgEdge::Navigate {
                        to,
                        controller,
                        length,
                        ..
                    } => {
                        let mut a = format!(
                            "label=\"{} {:.1}m\"",
                            self.classes.name(*controller),
                            length
                        );
                        if chosen(&edge) {
                            a.push_str(", color=red, penwidth=2");
                        }
                        let _ = to;
                        a
                    }
                    SbgEdge::InfoGather { .. } => {
                        let mut a = "label=\"IG\", style=dashed".to_string();
                        if chosen(&edge) {
                            a.push_str(", color=red, penwidth=2");
                        }
                        a
                    }
                };
                let to = match &edge {
                    SbgEdge::Navigate { to, .. } => *to,
                    SbgEdge::InfoGather { node } => *node,
                };
                let _ = writeln!(out, "  \"{node}\" -> \"{to}\" [{attrs}];");
            }
        }
        out.push_str("}\n");
        out
    }
}
