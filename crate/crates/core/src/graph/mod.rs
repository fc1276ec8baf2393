//! Planar quad-graphs and their strips (characteristics).
//!
//! A [`QuadGraph`] is a finite, simply connected complex of quadrilaterals.
//! Faces are stored as cyclic tuples `(v, v1, v12, v2)`; the edges `v-v1` and
//! `v2-v12` are opposite and carry the first parameter, `v1-v12` and `v-v2`
//! carry the second. Parameters live on strips, so opposite edges always agree.

pub mod io;
pub mod lattice;
pub mod zd;

use crate::scalar::Rational;
use crate::unionfind::UnionFind;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;
pub type StripId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("face {face} is not a quadrilateral with 4 distinct vertices")]
    NonQuadFace { face: usize },
    #[error("face {face} references unknown vertex {vertex}")]
    UnknownVertex { face: usize, vertex: usize },
    #[error("edge ({0}, {1}) is shared by more than two faces")]
    NonManifoldEdge(VertexId, VertexId),
    #[error("graph is not simply connected (V - E + F = {0})")]
    NotSimplyConnected(i64),
    #[error("graph is disconnected or has isolated vertices")]
    Disconnected,
    #[error("odd number of boundary edges ({0})")]
    OddBoundary(usize),
    #[error("parameter list has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("edges of strip {0} carry different parameters")]
    InconsistentStripParam(StripId),
    #[error("strip {0} has no parameter assigned")]
    MissingStripParam(StripId),
    #[error("defect patch boundary does not match the host rectangle")]
    BoundaryMismatch,
    #[error("degenerate plane normal")]
    DegenerateNormal,
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Optional geometric data attached to a vertex. Nothing in the solvers reads it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VertexInfo {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Vec<i64>>,
}

/// One passage of a strip through a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StripStep {
    pub face: FaceId,
    pub entry: EdgeId,
    pub exit: EdgeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strip {
    pub id: StripId,
    pub steps: Vec<StripStep>,
    /// Edges crossed by the strip in walking order, end edges included.
    pub transversal: Vec<EdgeId>,
    pub closed: bool,
    pub self_crossing: bool,
    pub self_tangent: bool,
}

impl Strip {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The two boundary edges of an open strip.
    pub fn end_edges(&self) -> Option<(EdgeId, EdgeId)> {
        if self.closed {
            None
        } else {
            Some((self.transversal[0], *self.transversal.last().unwrap()))
        }
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.steps.iter().map(|s| s.face)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Balance {
    pub faces: usize,
    pub vertices: usize,
    /// Length of the boundary walk; equals the number of boundary vertices on a disk.
    pub boundary_vertices: usize,
    pub required_initial_vertices: usize,
}

#[derive(Clone, Debug)]
pub struct QuadGraph {
    vertices: Vec<VertexInfo>,
    edges: Vec<[VertexId; 2]>,
    edge_lookup: HashMap<(VertexId, VertexId), EdgeId>,
    faces: Vec<[VertexId; 4]>,
    face_edges: Vec<[EdgeId; 4]>,
    edge_faces: Vec<Vec<FaceId>>,
    strips: Vec<Strip>,
    edge_strip: Vec<StripId>,
    strip_params: Vec<Rational>,
}

fn key(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl QuadGraph {
    /// Validates the complex and traces its strips. All strip parameters start at zero.
    pub fn build(vertices: Vec<VertexInfo>, faces: Vec<Vec<VertexId>>) -> Result<Self, GraphError> {
        Self::build_with_edges(vertices, faces, Vec::new())
    }

    /// As [`QuadGraph::build`], with extra edges that need not lie on any face.
    /// Such an edge forms a strip of its own without faces; these appear when
    /// strips are erased down to a tree.
    pub fn build_with_edges(
        vertices: Vec<VertexInfo>,
        faces: Vec<Vec<VertexId>>,
        extra_edges: Vec<[VertexId; 2]>,
    ) -> Result<Self, GraphError> {
        let n = vertices.len();
        let mut quads = Vec::with_capacity(faces.len());
        for (i, f) in faces.iter().enumerate() {
            if f.len() != 4 {
                return Err(GraphError::NonQuadFace { face: i });
            }
            for &v in f {
                if v >= n {
                    return Err(GraphError::UnknownVertex { face: i, vertex: v });
                }
            }
            let distinct: HashSet<_> = f.iter().collect();
            if distinct.len() != 4 {
                return Err(GraphError::NonQuadFace { face: i });
            }
            quads.push([f[0], f[1], f[2], f[3]]);
        }

        for &[a, b] in &extra_edges {
            if a >= n || b >= n || a == b {
                return Err(GraphError::Invalid(format!("bad edge ({a}, {b})")));
            }
        }
        let mut pairs: Vec<(VertexId, VertexId)> = quads
            .iter()
            .flat_map(|q| (0..4).map(move |k| key(q[k], q[(k + 1) % 4])))
            .chain(extra_edges.iter().map(|&[a, b]| key(a, b)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let edge_lookup: HashMap<_, _> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let edges: Vec<[VertexId; 2]> = pairs.iter().map(|&(a, b)| [a, b]).collect();

        let mut edge_faces = vec![Vec::new(); edges.len()];
        let mut face_edges = Vec::with_capacity(quads.len());
        for (fi, q) in quads.iter().enumerate() {
            let mut fe = [0; 4];
            for k in 0..4 {
                let e = edge_lookup[&key(q[k], q[(k + 1) % 4])];
                fe[k] = e;
                edge_faces[e].push(fi);
            }
            face_edges.push(fe);
        }
        for (e, fs) in edge_faces.iter().enumerate() {
            if fs.len() > 2 {
                return Err(GraphError::NonManifoldEdge(edges[e][0], edges[e][1]));
            }
        }

        // connectivity; a graph without edges may consist of a single vertex
        if edges.is_empty() {
            if n != 1 {
                return Err(GraphError::Disconnected);
            }
        } else {
            let mut uf = UnionFind::new(n);
            for e in &edges {
                uf.union(e[0], e[1]);
            }
            let mut used = vec![false; n];
            for e in &edges {
                used[e[0]] = true;
                used[e[1]] = true;
            }
            let root = uf.find(edges[0][0]);
            if (0..n).any(|v| !used[v] || uf.find(v) != root) {
                return Err(GraphError::Disconnected);
            }
        }
        let euler = n as i64 - edges.len() as i64 + quads.len() as i64;
        if euler != 1 {
            return Err(GraphError::NotSimplyConnected(euler));
        }

        let mut g = QuadGraph {
            vertices,
            edges,
            edge_lookup,
            faces: quads,
            face_edges,
            edge_faces,
            strips: Vec::new(),
            edge_strip: Vec::new(),
            strip_params: Vec::new(),
        };
        let strips = trace_strips(&g);
        let mut edge_strip = vec![0; g.edges.len()];
        for s in &strips {
            for &e in &s.transversal {
                edge_strip[e] = s.id;
            }
        }
        g.strip_params = vec![Rational::zero(); strips.len()];
        g.strips = strips;
        g.edge_strip = edge_strip;
        Ok(g)
    }

    /// Builds the graph and takes each strip's parameter from its edges.
    /// Every strip needs at least one edge with a parameter, and all of its
    /// parametrised edges must agree.
    pub fn build_with_edge_params<F>(
        vertices: Vec<VertexInfo>,
        faces: Vec<Vec<VertexId>>,
        edge_param: F,
    ) -> Result<Self, GraphError>
    where
        F: Fn(VertexId, VertexId) -> Option<Rational>,
    {
        Self::build(vertices, faces)?.with_params_from_edges(edge_param)
    }

    /// Takes each strip's parameter from its edges, as in
    /// [`QuadGraph::build_with_edge_params`].
    pub fn with_params_from_edges<F>(self, edge_param: F) -> Result<Self, GraphError>
    where
        F: Fn(VertexId, VertexId) -> Option<Rational>,
    {
        let mut params = Vec::with_capacity(self.strips.len());
        for s in &self.strips {
            let mut found: Option<Rational> = None;
            for &e in &s.transversal {
                let [a, b] = self.edges[e];
                if let Some(p) = edge_param(a, b) {
                    match &found {
                        Some(q) if *q != p => return Err(GraphError::InconsistentStripParam(s.id)),
                        _ => found = Some(p),
                    }
                }
            }
            params.push(found.ok_or(GraphError::MissingStripParam(s.id))?);
        }
        self.with_strip_params(params)
    }

    /// Builds from faces keyed by arbitrary ordered labels. Vertex ids follow the
    /// label order, which makes fixtures reproducible.
    pub fn from_keyed_faces<K, F>(
        faces: &[[K; 4]],
        info: F,
    ) -> Result<(Self, BTreeMap<K, VertexId>), GraphError>
    where
        K: Ord + Clone,
        F: Fn(&K) -> VertexInfo,
    {
        let mut ids: BTreeMap<K, VertexId> = BTreeMap::new();
        for f in faces {
            for k in f {
                ids.entry(k.clone()).or_insert(0);
            }
        }
        for (i, v) in ids.values_mut().enumerate() {
            *v = i;
        }
        let vertices = ids.keys().map(&info).collect();
        let face_ids = faces
            .iter()
            .map(|f| f.iter().map(|k| ids[k]).collect())
            .collect();
        let g = Self::build(vertices, face_ids)?;
        Ok((g, ids))
    }

    pub fn with_strip_params(mut self, params: Vec<Rational>) -> Result<Self, GraphError> {
        if params.len() != self.strips.len() {
            return Err(GraphError::LengthMismatch {
                expected: self.strips.len(),
                got: params.len(),
            });
        }
        self.strip_params = params;
        Ok(self)
    }

    pub fn with_params_by<F>(self, mut f: F) -> Self
    where
        F: FnMut(&QuadGraph, &Strip) -> Rational,
    {
        let params = self.strips.iter().map(|s| f(&self, s)).collect();
        QuadGraph {
            strip_params: params,
            ..self
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }
    pub fn vertex(&self, v: VertexId) -> &VertexInfo {
        &self.vertices[v]
    }
    pub fn vertices(&self) -> &[VertexInfo] {
        &self.vertices
    }
    pub fn edge(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e]
    }
    pub fn edges(&self) -> &[[VertexId; 2]] {
        &self.edges
    }
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.edge_lookup.get(&key(a, b)).copied()
    }
    pub fn face(&self, f: FaceId) -> [VertexId; 4] {
        self.faces[f]
    }
    pub fn faces(&self) -> &[[VertexId; 4]] {
        &self.faces
    }
    /// Edges that lie on no face.
    pub fn dangling_edges(&self) -> Vec<[VertexId; 2]> {
        (0..self.edges.len()).filter(|&e| self.edge_faces[e].is_empty()).map(|e| self.edges[e]).collect()
    }
    pub fn face_edges(&self, f: FaceId) -> [EdgeId; 4] {
        self.face_edges[f]
    }
    pub fn edge_faces(&self, e: EdgeId) -> &[FaceId] {
        &self.edge_faces[e]
    }
    pub fn is_boundary_edge(&self, e: EdgeId) -> bool {
        self.edge_faces[e].len() == 1
    }
    pub fn strips(&self) -> &[Strip] {
        &self.strips
    }
    pub fn strip(&self, s: StripId) -> &Strip {
        &self.strips[s]
    }
    pub fn strip_of_edge(&self, e: EdgeId) -> StripId {
        self.edge_strip[e]
    }
    pub fn strip_params(&self) -> &[Rational] {
        &self.strip_params
    }
    pub fn strip_param(&self, s: StripId) -> &Rational {
        &self.strip_params[s]
    }
    pub fn edge_param(&self, e: EdgeId) -> &Rational {
        &self.strip_params[self.edge_strip[e]]
    }

    /// Strips through edges `v-v1` and `v-v2` of a face.
    pub fn face_strips(&self, f: FaceId) -> (StripId, StripId) {
        let fe = self.face_edges[f];
        (self.edge_strip[fe[0]], self.edge_strip[fe[1]])
    }

    /// Parameters `(alpha1, alpha2)` of a face in its corner convention.
    pub fn face_params(&self, f: FaceId) -> (&Rational, &Rational) {
        let (a, b) = self.face_strips(f);
        (&self.strip_params[a], &self.strip_params[b])
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.adjacency()[v].clone()
    }

    pub fn adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &[a, b] in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e[0] == v || e[1] == v).count()
    }

    pub fn boundary_edges(&self) -> Vec<EdgeId> {
        (0..self.edges.len()).filter(|&e| self.is_boundary_edge(e)).collect()
    }

    pub fn boundary_vertices(&self) -> Vec<VertexId> {
        let mut vs: Vec<_> = self
            .boundary_edges()
            .into_iter()
            .flat_map(|e| self.edges[e])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// The edge opposite to `e` inside face `f`.
    pub fn opposite_edge(&self, f: FaceId, e: EdgeId) -> EdgeId {
        let fe = self.face_edges[f];
        let k = fe.iter().position(|&x| x == e).expect("edge not in face");
        fe[(k + 2) % 4]
    }

    /// Equation count against unknowns: `F = V - V_b/2 - 1`.
    pub fn vertex_balance(&self) -> Result<Balance, GraphError> {
        let vb = self.boundary_edges().len();
        if !vb.is_multiple_of(2) {
            return Err(GraphError::OddBoundary(vb));
        }
        let b = Balance {
            faces: self.faces.len(),
            vertices: self.vertices.len(),
            boundary_vertices: vb,
            required_initial_vertices: vb / 2 + 1,
        };
        if b.faces + b.boundary_vertices / 2 + 1 != b.vertices {
            return Err(GraphError::NotSimplyConnected(
                b.vertices as i64 - self.edges.len() as i64 + b.faces as i64,
            ));
        }
        Ok(b)
    }

    /// Vertex ids in breadth-first order from `root`, with the tree edge used to reach each.
    pub fn bfs_tree(&self, root: VertexId) -> Vec<(VertexId, Option<VertexId>)> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut out = Vec::with_capacity(self.vertices.len());
        let mut queue = VecDeque::from([(root, None)]);
        seen[root] = true;
        while let Some((v, parent)) = queue.pop_front() {
            out.push((v, parent));
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back((w, Some(v)));
                }
            }
        }
        out
    }

    pub fn strips_with_self_crossing(&self) -> Vec<StripId> {
        self.strips.iter().filter(|s| s.self_crossing).map(|s| s.id).collect()
    }
}

/// Partitions edges into strips and orders each strip's faces.
///
/// Strips are numbered by their lowest edge id. An open strip is walked from
/// its lower-numbered end edge; a closed one from its lowest edge.
pub fn trace_strips(g: &QuadGraph) -> Vec<Strip> {
    let ne = g.edges.len();
    let mut uf = UnionFind::new(ne);
    for fe in &g.face_edges {
        uf.union(fe[0], fe[2]);
        uf.union(fe[1], fe[3]);
    }
    let mut classes: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
    for e in 0..ne {
        classes.entry(uf.find(e)).or_default().push(e);
    }
    let mut groups: Vec<Vec<EdgeId>> = classes.into_values().collect();
    groups.sort_by_key(|c| c[0]);

    groups
        .into_iter()
        .enumerate()
        .map(|(id, class)| walk_strip(g, id, &class))
        .collect()
}

fn walk_strip(g: &QuadGraph, id: StripId, class: &[EdgeId]) -> Strip {
    if g.edge_faces[class[0]].is_empty() {
        return Strip {
            id,
            steps: Vec::new(),
            transversal: class.to_vec(),
            closed: false,
            self_crossing: false,
            self_tangent: false,
        };
    }
    let start_boundary = class.iter().copied().find(|&e| g.is_boundary_edge(e));
    let closed = start_boundary.is_none();
    let start = start_boundary.unwrap_or(class[0]);

    let mut steps = Vec::new();
    let mut transversal = vec![start];
    let mut edge = start;
    let mut face = *g.edge_faces[start].iter().min().unwrap();
    loop {
        let exit = g.opposite_edge(face, edge);
        steps.push(StripStep { face, entry: edge, exit });
        if closed && exit == start {
            break;
        }
        transversal.push(exit);
        let fs = &g.edge_faces[exit];
        if fs.len() == 1 {
            break;
        }
        face = if fs[0] == face { fs[1] } else { fs[0] };
        edge = exit;
        assert!(steps.len() <= 2 * g.faces.len(), "strip walk does not terminate");
    }

    let mut seen = HashSet::new();
    let self_crossing = steps.iter().any(|s| !seen.insert(s.face));
    let trans: HashSet<EdgeId> = transversal.iter().copied().collect();
    let strip_faces: HashSet<FaceId> = steps.iter().map(|s| s.face).collect();
    let self_tangent = steps.iter().any(|s| {
        g.face_edges[s.face]
            .iter()
            .filter(|e| !trans.contains(e))
            .any(|&e| {
                let fs = &g.edge_faces[e];
                fs.len() == 2 && fs[0] != fs[1] && fs.iter().all(|f| strip_faces.contains(f))
            })
    });

    Strip {
        id,
        steps,
        transversal,
        closed,
        self_crossing,
        self_tangent,
    }
}
