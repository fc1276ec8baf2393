use super::CauchyError;
use crate::equations::EquationDef;
use crate::graph::{FaceId, QuadGraph, VertexId};
use crate::scalar::Rational;
use std::collections::HashMap;

/// Which diagonal of a self-crossing face is glued.
///
/// At equal parameters the equation factors as `(v12 − v)(v2 − v1) = 0`, so
/// either diagonal may be identified. `Default` keeps the planar picture: when
/// a corner of the face belongs to no other face it is dropped and the opposite
/// diagonal is glued; otherwise the diagonal `(v, v12)` is glued. `Other`
/// always takes the remaining diagonal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DiagonalChoice {
    #[default]
    Default,
    Other,
}

#[derive(Clone, Debug)]
pub struct SplitReport {
    pub graph: QuadGraph,
    /// New id of every original vertex; `None` for vertices that disappear.
    pub vertex_map: Vec<Option<VertexId>>,
    /// Number of faces removed.
    pub splits: usize,
    /// Glued vertex pairs, in original ids.
    pub identified: Vec<(VertexId, VertexId)>,
}

/// Removes every face crossed twice by the same strip and glues one of its
/// diagonals, until no strip crosses itself. Only valid for equations that
/// degenerate into a product at equal parameters.
pub fn split_self_intersecting_strips(
    g: &QuadGraph,
    eq: &EquationDef,
    choice: DiagonalChoice,
) -> Result<SplitReport, CauchyError> {
    let mut graph = g.clone();
    let mut vertex_map: Vec<Option<VertexId>> = (0..g.vertex_count()).map(Some).collect();
    let mut identified = Vec::new();
    let mut splits = 0;
    while let Some(f) = self_crossing_face(&graph) {
        if !eq.degenerate_splitting {
            return Err(CauchyError::NoSplittingProperty);
        }
        let (next, step_map, (a, b)) = split_face(&graph, f, choice)?;
        let original = |x: VertexId| vertex_map.iter().position(|&m| m == Some(x)).expect("current vertex has a preimage");
        identified.push((original(a), original(b)));
        for m in vertex_map.iter_mut() {
            *m = m.and_then(|x| step_map[x]);
        }
        graph = next;
        splits += 1;
    }
    Ok(SplitReport { graph, vertex_map, splits, identified })
}

fn self_crossing_face(g: &QuadGraph) -> Option<FaceId> {
    (0..g.face_count()).find(|&f| {
        let (s1, s2) = g.face_strips(f);
        s1 == s2
    })
}

type StepMap = Vec<Option<VertexId>>;

fn split_face(g: &QuadGraph, f: FaceId, choice: DiagonalChoice) -> Result<(QuadGraph, StepMap, (VertexId, VertexId)), CauchyError> {
    let corners = g.face(f);
    let only_here = |v: VertexId| (0..g.face_count()).all(|h| h == f || !g.face(h).contains(&v));
    let default_pair = match (0..4).find(|&k| only_here(corners[k])) {
        Some(k) => (k + 1) % 2,
        None => 0,
    };
    let pair = match choice {
        DiagonalChoice::Default => default_pair,
        DiagonalChoice::Other => 1 - default_pair,
    };
    let (a, b) = (corners[pair].min(corners[pair + 2]), corners[pair].max(corners[pair + 2]));

    let merged = |v: VertexId| if v == b { a } else { v };
    let faces: Vec<[VertexId; 4]> = (0..g.face_count()).filter(|&h| h != f).map(|h| g.face(h).map(merged)).collect();
    let mut used = vec![false; g.vertex_count()];
    for q in &faces {
        for &v in q {
            used[v] = true;
        }
    }
    let mut step_map: StepMap = vec![None; g.vertex_count()];
    let mut vertices = Vec::new();
    for v in 0..g.vertex_count() {
        if used[v] {
            step_map[v] = Some(vertices.len());
            vertices.push(g.vertex(v).clone());
        }
    }
    step_map[b] = step_map[a];

    let mut params: HashMap<(VertexId, VertexId), Rational> = HashMap::new();
    for (e, &[x, y]) in g.edges().iter().enumerate() {
        if let (Some(x), Some(y)) = (step_map[x], step_map[y]) {
            if x != y {
                params.insert((x.min(y), x.max(y)), g.edge_param(e).clone());
            }
        }
    }
    let faces = faces.iter().map(|q| q.iter().map(|&v| step_map[v].unwrap()).collect()).collect();
    let next = QuadGraph::build_with_edge_params(vertices, faces, |x, y| params.get(&(x.min(y), x.max(y))).cloned())?;
    Ok((next, step_map, (a, b)))
}
