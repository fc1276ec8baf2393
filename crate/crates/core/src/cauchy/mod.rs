//! Initial value problems on quad-graphs.
//!
//! Data is prescribed on a connected subgraph `P`. Whether it determines a
//! solution depends only on how the strips meet `P`: the problem is correct
//! exactly when every strip crosses `P` in a single edge. A strip crossing it
//! twice or more carries conflicting data, a strip missing it leaves a free
//! function.

mod immersion;
mod split;

pub use immersion::{hypercube_immersion, CubeImmersion, CubePoint};
pub use split::{split_self_intersecting_strips, DiagonalChoice, SplitReport};

use crate::graph::{EdgeId, GraphError, QuadGraph, Strip, StripId, VertexId};
use crate::unionfind::UnionFind;
use std::collections::{BTreeSet, HashSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CauchyError {
    #[error("vertices {0} and {1} are not joined by an edge")]
    NotAnEdge(VertexId, VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("initial subgraph is empty")]
    Empty,
    #[error("initial subgraph is not connected")]
    Disconnected,
    #[error("strip {0} crosses itself; split it first")]
    SelfIntersectingStrip(StripId),
    #[error("initial data does not give a correct problem")]
    NotCorrectIvp,
    #[error("initial subgraph is not a simple path")]
    NotSimplePath,
    #[error("the equation does not factor at equal parameters, so strips cannot be split")]
    NoSplittingProperty,
    #[error("coordinates of vertex {0} depend on the path")]
    PathDependentCoordinates(VertexId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A connected set of edges carrying the initial data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialSubgraph {
    edges: BTreeSet<EdgeId>,
    vertices: BTreeSet<VertexId>,
    path: Option<Vec<VertexId>>,
}

impl InitialSubgraph {
    /// A walk given by consecutive vertices. A single vertex is allowed.
    pub fn from_path(g: &QuadGraph, path: &[VertexId]) -> Result<Self, CauchyError> {
        if path.is_empty() {
            return Err(CauchyError::Empty);
        }
        if let Some(&v) = path.iter().find(|&&v| v >= g.vertex_count()) {
            return Err(CauchyError::UnknownVertex(v));
        }
        let mut edges = BTreeSet::new();
        for w in path.windows(2) {
            let e = g.edge_between(w[0], w[1]).ok_or(CauchyError::NotAnEdge(w[0], w[1]))?;
            edges.insert(e);
        }
        let vertices: BTreeSet<VertexId> = path.iter().copied().collect();
        let simple = vertices.len() == path.len();
        Ok(InitialSubgraph {
            edges,
            vertices,
            path: simple.then(|| path.to_vec()),
        })
    }

    /// An arbitrary connected edge set.
    pub fn from_edges(g: &QuadGraph, edges: &[EdgeId]) -> Result<Self, CauchyError> {
        if edges.is_empty() {
            return Err(CauchyError::Empty);
        }
        if let Some(&e) = edges.iter().find(|&&e| e >= g.edge_count()) {
            return Err(CauchyError::UnknownEdge(e));
        }
        let mut uf = UnionFind::new(g.vertex_count());
        let mut vertices = BTreeSet::new();
        for &e in edges {
            let [a, b] = g.edge(e);
            uf.union(a, b);
            vertices.insert(a);
            vertices.insert(b);
        }
        let first = *vertices.iter().next().unwrap();
        if vertices.iter().any(|&v| !uf.same(v, first)) {
            return Err(CauchyError::Disconnected);
        }
        let edges: BTreeSet<EdgeId> = edges.iter().copied().collect();
        let path = simple_path_order(g, &edges, &vertices);
        Ok(InitialSubgraph { edges, vertices, path })
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn is_simple_path(&self) -> bool {
        self.path.is_some()
    }

    /// The vertices in walking order, when the subgraph is a simple path.
    pub fn path(&self) -> Option<&[VertexId]> {
        self.path.as_deref()
    }

    /// The same subgraph with vertices relabelled by `map`.
    pub fn relabelled(&self, g: &QuadGraph, map: &[VertexId]) -> Result<Self, CauchyError> {
        match &self.path {
            Some(p) => Self::from_path(g, &p.iter().map(|&v| map[v]).collect::<Vec<_>>()),
            None => Err(CauchyError::NotSimplePath),
        }
    }
}

/// Orders an edge set as a path if it is one: a tree with all degrees at most two.
fn simple_path_order(g: &QuadGraph, edges: &BTreeSet<EdgeId>, vertices: &BTreeSet<VertexId>) -> Option<Vec<VertexId>> {
    if edges.len() + 1 != vertices.len() {
        return None;
    }
    let mut nbrs: std::collections::BTreeMap<VertexId, Vec<VertexId>> = Default::default();
    for &e in edges {
        let [a, b] = g.edge(e);
        nbrs.entry(a).or_default().push(b);
        nbrs.entry(b).or_default().push(a);
    }
    if nbrs.values().any(|n| n.len() > 2) {
        return None;
    }
    let start = *nbrs.iter().find(|(_, n)| n.len() == 1)?.0;
    let mut path = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(&next) = nbrs[&cur].iter().find(|&&w| w != prev) {
        path.push(next);
        prev = cur;
        cur = next;
    }
    Some(path)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Correct,
    Overdetermined,
    Underdetermined,
    Both,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Correct => "correct",
            Verdict::Overdetermined => "overdetermined",
            Verdict::Underdetermined => "underdetermined",
            Verdict::Both => "both",
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Correct => 0,
            Verdict::Overdetermined => 2,
            Verdict::Underdetermined => 3,
            Verdict::Both => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IvpClassification {
    pub verdict: Verdict,
    /// Strips meeting the initial subgraph in two or more edges.
    pub over_witnesses: Vec<StripId>,
    /// Strips that do not meet it at all.
    pub under_witnesses: Vec<StripId>,
    /// Number of shared edges, indexed by strip id.
    pub index: Vec<usize>,
}

/// Number of edges of `p` crossing the strip. Only the strip's transversal
/// edges count, end edges included; its side edges never do.
pub fn strip_path_index(strip: &Strip, p: &InitialSubgraph) -> usize {
    let trans: HashSet<EdgeId> = strip.transversal.iter().copied().collect();
    trans.iter().filter(|e| p.contains_edge(**e)).count()
}

/// Decides whether data on `p` determines a unique solution, using strip
/// crossings only. Field values are never inspected.
pub fn classify_ivp(g: &QuadGraph, p: &InitialSubgraph) -> Result<IvpClassification, CauchyError> {
    if let Some(&s) = g.strips_with_self_crossing().first() {
        return Err(CauchyError::SelfIntersectingStrip(s));
    }
    let mut index = vec![0; g.strips().len()];
    for e in p.edges() {
        index[g.strip_of_edge(e)] += 1;
    }
    let over_witnesses: Vec<StripId> = (0..index.len()).filter(|&s| index[s] >= 2).collect();
    let under_witnesses: Vec<StripId> = (0..index.len()).filter(|&s| index[s] == 0).collect();
    let verdict = match (over_witnesses.is_empty(), under_witnesses.is_empty()) {
        (true, true) => Verdict::Correct,
        (false, true) => Verdict::Overdetermined,
        (true, false) => Verdict::Underdetermined,
        (false, false) => Verdict::Both,
    };
    Ok(IvpClassification { verdict, over_witnesses, under_witnesses, index })
}
