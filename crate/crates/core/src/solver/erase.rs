//! Erasing a strip and inserting it back.
//!
//! A strip `C` with parameter `α` cuts the graph into a kept part and a
//! transformed part. Applying the Bäcklund transformation with `λ = α` to the
//! transformed part, seeded so that `v̄` at one vertex equals the value across
//! the strip, makes the fields on both borders agree; the strip can then be
//! contracted. The kept part is untouched. Remembering the original value at
//! the seed makes the operation invertible, since the transformation with the
//! same `λ` is an involution on the pair `(v, v̄)`.

use super::{check_solution, SolveError};
use crate::equations::{backlund_step, EquationDef};
use crate::field::{FieldSolution, Provenance};
use crate::graph::{EdgeId, GraphError, QuadGraph, StripId, VertexId};
use crate::scalar::{Rational, Scalar};
use crate::unionfind::UnionFind;
use std::collections::{HashMap, HashSet, VecDeque};

#[derive(Clone, Debug)]
pub struct EraseMemo<T> {
    /// The graph before erasing; it records where the strip goes back in.
    pub original: QuadGraph,
    pub strip: StripId,
    pub lambda: Rational,
    /// Id in the reduced graph of every original vertex.
    pub vertex_map: Vec<VertexId>,
    /// Original vertices whose values were not transformed.
    pub kept: Vec<bool>,
    /// For each transformed piece: its seed vertex and the value it had.
    pub seeds: Vec<(VertexId, T)>,
    pub provenance: Vec<Option<Provenance>>,
}

#[derive(Clone, Debug)]
pub struct Erased<T> {
    pub graph: QuadGraph,
    pub solution: FieldSolution<T>,
    pub memo: EraseMemo<T>,
}

/// Pieces of the graph once the strip's transversal edges are cut.
struct Sides {
    transversal: HashSet<EdgeId>,
    component: Vec<usize>,
    kept: Vec<bool>,
    /// Transformed pieces as (component, seed, vertex across the strip from the seed).
    transformed: Vec<(usize, VertexId, VertexId)>,
}

fn sides(g: &QuadGraph, s: StripId, keep: VertexId) -> Result<Sides, SolveError> {
    let strip = g.strip(s);
    if strip.self_crossing {
        return Err(SolveError::NotErasable(s, "strip crosses itself".into()));
    }
    let transversal: HashSet<EdgeId> = strip.transversal.iter().copied().collect();
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        if !transversal.contains(&e) {
            uf.union(a, b);
        }
    }
    let mut roots: HashMap<usize, usize> = HashMap::new();
    let component: Vec<usize> = (0..n)
        .map(|v| {
            let r = uf.find(v);
            let next = roots.len();
            *roots.entry(r).or_insert(next)
        })
        .collect();
    let nc = roots.len();

    // two-colour the pieces: every transversal edge joins a kept and a transformed one
    let mut links = vec![Vec::new(); nc];
    let mut order: Vec<EdgeId> = transversal.iter().copied().collect();
    order.sort_unstable();
    for &e in &order {
        let [a, b] = g.edge(e);
        let (ca, cb) = (component[a], component[b]);
        if ca == cb {
            return Err(SolveError::NotErasable(s, "strip does not separate the graph".into()));
        }
        links[ca].push((cb, b, a));
        links[cb].push((ca, a, b));
    }
    let mut colour: Vec<Option<bool>> = vec![None; nc];
    let mut seeds: Vec<Option<(VertexId, VertexId)>> = vec![None; nc];
    let start = component[keep];
    colour[start] = Some(true);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        let here = colour[c].unwrap();
        for &(d, vd, vc) in &links[c] {
            match colour[d] {
                None => {
                    colour[d] = Some(!here);
                    if here {
                        seeds[d] = Some((vd, vc));
                    }
                    queue.push_back(d);
                }
                Some(x) if x == here => {
                    return Err(SolveError::NotErasable(s, "pieces on both sides of the strip are joined".into()));
                }
                _ => {}
            }
        }
    }
    let kept: Vec<bool> = (0..n).map(|v| colour[component[v]].unwrap_or(true)).collect();
    let mut transformed = Vec::new();
    for c in 0..nc {
        if colour[c] == Some(false) {
            let (seed, across) = seeds[c].ok_or_else(|| SolveError::NotErasable(s, "piece not reached".into()))?;
            transformed.push((c, seed, across));
        }
    }
    Ok(Sides { transversal, component, kept, transformed })
}

fn small<T: Scalar>(r: &T) -> bool {
    if T::EXACT {
        r.is_negligible(&T::one())
    } else {
        r.magnitude() <= 1e-9
    }
}

/// Bäcklund transformation of `field` on one piece, seeded at `seed`.
#[allow(clippy::too_many_arguments)]
fn transform_piece<T: Scalar>(
    g: &QuadGraph,
    eq: &EquationDef,
    sides: &Sides,
    piece: usize,
    field: &FieldSolution<T>,
    seed: VertexId,
    seed_value: T,
    lambda: &T,
    out: &mut FieldSolution<T>,
    s: StripId,
) -> Result<(), SolveError> {
    let adj = g.adjacency();
    let inside = |v: VertexId| sides.component[v] == piece;
    out.set(seed, seed_value, Provenance::Propagated);
    let mut queue = VecDeque::from([seed]);
    let mut seen = HashSet::from([seed]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if inside(w) && seen.insert(w) {
                let bar_u = out.get(u).unwrap().clone();
                let x = backlund_step(g, eq, field, (u, w), &bar_u, lambda, false)
                    .map_err(|_| SolveError::Singular(None))?;
                out.set(w, x, Provenance::Propagated);
                queue.push_back(w);
            }
        }
    }
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        if inside(a) && inside(b) && !sides.transversal.contains(&e) {
            let alpha = T::from_rational(g.edge_param(e));
            let r = eq.eval(
                [field.get(a).unwrap(), field.get(b).unwrap(), out.get(a).unwrap(), out.get(b).unwrap()],
                &alpha,
                lambda,
            );
            if !small(&r) {
                return Err(SolveError::NotErasable(s, format!("transformation is inconsistent on edge ({a}, {b})")));
            }
        }
    }
    Ok(())
}

/// Removes strip `s`, keeping the values on the side of vertex `keep`.
pub fn erase_strip<T: Scalar>(
    g: &QuadGraph,
    eq: &EquationDef,
    sol: &FieldSolution<T>,
    s: StripId,
    keep: VertexId,
) -> Result<Erased<T>, SolveError> {
    if sol.len() != g.vertex_count() {
        return Err(GraphError::LengthMismatch { expected: g.vertex_count(), got: sol.len() }.into());
    }
    if let Some((v, _)) = sol.iter().find(|(_, x)| x.is_none()) {
        return Err(SolveError::Undetermined(v));
    }
    let sd = sides(g, s, keep)?;
    let lambda_r = g.strip_param(s).clone();
    let lambda = T::from_rational(&lambda_r);
    let n = g.vertex_count();

    let mut values = FieldSolution::empty(n);
    for v in (0..n).filter(|&v| sd.kept[v]) {
        values.set(v, sol.get(v).unwrap().clone(), sol.provenance(v).unwrap_or(Provenance::Propagated));
    }
    let mut seeds = Vec::new();
    for &(piece, seed, across) in &sd.transformed {
        let target = sol.get(across).unwrap().clone();
        transform_piece(g, eq, &sd, piece, sol, seed, target, &lambda, &mut values, s)?;
        seeds.push((seed, sol.get(seed).unwrap().clone()));
    }

    // contract the transversal edges
    let mut uf = UnionFind::new(n);
    for &e in &sd.transversal {
        let [a, b] = g.edge(e);
        uf.union(a, b);
    }
    let mut rep: HashMap<usize, VertexId> = HashMap::new();
    for v in 0..n {
        let r = uf.find(v);
        let cur = rep.entry(r).or_insert(v);
        // prefer a kept vertex, then the lowest id
        if (sd.kept[v], std::cmp::Reverse(v)) > (sd.kept[*cur], std::cmp::Reverse(*cur)) {
            *cur = v;
        }
    }
    for v in 0..n {
        let r = rep[&uf.find(v)];
        if !small(&(values.get(v).unwrap().clone() - values.get(r).unwrap().clone())) {
            return Err(SolveError::NotErasable(s, format!("values at {v} and {r} do not match across the strip")));
        }
    }
    let mut reps: Vec<VertexId> = rep.values().copied().collect();
    reps.sort_unstable();
    let new_id: HashMap<VertexId, VertexId> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let vertex_map: Vec<VertexId> = (0..n).map(|v| new_id[&rep[&uf.find(v)]]).collect();

    let strip_faces: HashSet<usize> = g.strip(s).faces().collect();
    let faces: Vec<Vec<VertexId>> = (0..g.face_count())
        .filter(|f| !strip_faces.contains(f))
        .map(|f| g.face(f).iter().map(|&v| vertex_map[v]).collect())
        .collect();
    let mut params: HashMap<(VertexId, VertexId), Rational> = HashMap::new();
    let mut extra = Vec::new();
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        let (x, y) = (vertex_map[a], vertex_map[b]);
        if sd.transversal.contains(&e) || x == y {
            continue;
        }
        params.insert((x.min(y), x.max(y)), g.edge_param(e).clone());
        extra.push([x, y]);
    }
    let infos = reps.iter().map(|&r| g.vertex(r).clone()).collect();
    let graph = QuadGraph::build_with_edges(infos, faces, extra)?
        .with_params_from_edges(|x, y| params.get(&(x.min(y), x.max(y))).cloned())?;

    let mut solution = FieldSolution::empty(reps.len());
    for (i, &r) in reps.iter().enumerate() {
        solution.set(i, values.get(r).unwrap().clone(), values.provenance(r).unwrap());
    }
    check_solution(&graph, eq, &solution, 1e-9)?;
    let memo = EraseMemo {
        original: g.clone(),
        strip: s,
        lambda: lambda_r,
        vertex_map,
        kept: sd.kept,
        seeds,
        provenance: (0..n).map(|v| sol.provenance(v)).collect(),
    };
    Ok(Erased { graph, solution, memo })
}

/// Inverse of [`erase_strip`]: rebuilds the original graph and field.
pub fn insert_strip<T: Scalar>(
    eq: &EquationDef,
    reduced: &QuadGraph,
    sol: &FieldSolution<T>,
    memo: &EraseMemo<T>,
) -> Result<(QuadGraph, FieldSolution<T>), SolveError> {
    let g = &memo.original;
    let n = g.vertex_count();
    if memo.vertex_map.len() != n
        || sol.len() != reduced.vertex_count()
        || memo.vertex_map.iter().any(|&v| v >= sol.len())
        || !sol.is_total()
    {
        return Err(SolveError::MemoMismatch);
    }
    let keep = (0..n).find(|&v| memo.kept[v]).ok_or(SolveError::MemoMismatch)?;
    let sd = sides(g, memo.strip, keep)?;
    if sd.kept != memo.kept || sd.transformed.len() != memo.seeds.len() {
        return Err(SolveError::MemoMismatch);
    }
    let mut bar = FieldSolution::empty(n);
    for v in 0..n {
        bar.set(v, sol.get(memo.vertex_map[v]).unwrap().clone(), Provenance::Propagated);
    }
    let lambda = T::from_rational(&memo.lambda);
    let mut values = FieldSolution::empty(n);
    for (&(piece, seed, _), (mseed, value)) in sd.transformed.iter().zip(&memo.seeds) {
        if seed != *mseed {
            return Err(SolveError::MemoMismatch);
        }
        transform_piece(g, eq, &sd, piece, &bar, seed, value.clone(), &lambda, &mut values, memo.strip)?;
    }
    let mut out = FieldSolution::empty(n);
    for v in 0..n {
        let x = if memo.kept[v] { bar.get(v) } else { values.get(v) };
        out.set(v, x.unwrap().clone(), memo.provenance[v].unwrap_or(Provenance::Propagated));
    }
    check_solution(g, eq, &out, 1e-9)?;
    Ok((g.clone(), out))
}
