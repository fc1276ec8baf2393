//! Square lattices, rectangle defects and the weak-defect test.
//!
//! Lattice-like graphs are described on a fine integer grid where one lattice
//! square has side [`FINE`]. That leaves room for the interior vertices of a
//! defect patch while keeping every coordinate an exact integer.

use super::{GraphError, QuadGraph, Strip, StripId, VertexId, VertexInfo};
use crate::scalar::Rational;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Fine grid units per lattice step.
pub const FINE: i64 = 20;

pub type FinePoint = [i64; 2];
pub type FineFace = [FinePoint; 4];

/// The unit square with lower-left corner `(m, n)`, in `(v, v1, v12, v2)` order.
pub fn unit_square(m: i64, n: i64) -> FineFace {
    let (x, y) = (m * FINE, n * FINE);
    [[x, y], [x + FINE, y], [x + FINE, y + FINE], [x, y + FINE]]
}

fn fine_info(p: &FinePoint) -> VertexInfo {
    let lattice = (p[0] % FINE == 0 && p[1] % FINE == 0).then(|| vec![p[0] / FINE, p[1] / FINE]);
    VertexInfo {
        pos: Some([p[0] as f64 / FINE as f64, p[1] as f64 / FINE as f64]),
        lattice,
    }
}

/// Recovers the fine coordinate stored in a vertex position.
pub fn fine_point(info: &VertexInfo) -> Option<FinePoint> {
    info.pos
        .map(|[x, y]| [(x * FINE as f64).round() as i64, (y * FINE as f64).round() as i64])
}

/// Builds a graph from fine-grid faces. Strip parameters follow the square
/// lattice rule: a strip whose end edge is horizontal in column `m` carries
/// `alphas[m]`, one whose end edge is vertical in row `n` carries `betas[n]`.
pub fn build_fine(
    faces: &[FineFace],
    alphas: &[Rational],
    betas: &[Rational],
) -> Result<(QuadGraph, BTreeMap<FinePoint, VertexId>), GraphError> {
    let (g, ids) = QuadGraph::from_keyed_faces(faces, fine_info)?;
    let mut params = Vec::with_capacity(g.strips().len());
    for s in g.strips() {
        params.push(lattice_strip_param(&g, s, alphas, betas)?);
    }
    Ok((g.with_strip_params(params)?, ids))
}

/// Horizontal or vertical family of a strip, judged by its first end edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripKind {
    /// Crosses horizontal edges; carries the column parameter.
    Vertical(i64),
    /// Crosses vertical edges; carries the row parameter.
    Horizontal(i64),
}

pub fn strip_kind(g: &QuadGraph, s: &Strip) -> Option<StripKind> {
    let (e, _) = s.end_edges()?;
    let [a, b] = g.edge(e);
    let (pa, pb) = (fine_point(g.vertex(a))?, fine_point(g.vertex(b))?);
    if pa[1] == pb[1] {
        Some(StripKind::Vertical(pa[0].min(pb[0]).div_euclid(FINE)))
    } else if pa[0] == pb[0] {
        Some(StripKind::Horizontal(pa[1].min(pb[1]).div_euclid(FINE)))
    } else {
        None
    }
}

fn lattice_strip_param(
    g: &QuadGraph,
    s: &Strip,
    alphas: &[Rational],
    betas: &[Rational],
) -> Result<Rational, GraphError> {
    let pick = |list: &[Rational], i: i64| {
        usize::try_from(i)
            .ok()
            .and_then(|i| list.get(i).cloned())
            .ok_or(GraphError::MissingStripParam(s.id))
    };
    match strip_kind(g, s) {
        Some(StripKind::Vertical(m)) => pick(alphas, m),
        Some(StripKind::Horizontal(n)) => pick(betas, n),
        None => Err(GraphError::MissingStripParam(s.id)),
    }
}

/// Regular `w × h` lattice. Column `m` carries `alphas[m]`, row `n` carries `betas[n]`;
/// vertex ids follow the lexicographic order of `(m, n)`.
pub fn gen_square_lattice(
    w: usize,
    h: usize,
    alphas: &[Rational],
    betas: &[Rational],
) -> Result<QuadGraph, GraphError> {
    if w == 0 || h == 0 {
        return Err(GraphError::Invalid("lattice needs w, h >= 1".into()));
    }
    if alphas.len() != w {
        return Err(GraphError::LengthMismatch { expected: w, got: alphas.len() });
    }
    if betas.len() != h {
        return Err(GraphError::LengthMismatch { expected: h, got: betas.len() });
    }
    let faces: Vec<FineFace> = (0..w as i64)
        .flat_map(|m| (0..h as i64).map(move |n| unit_square(m, n)))
        .collect();
    Ok(build_fine(&faces, alphas, betas)?.0)
}

/// Same lattice with one parameter for all columns and one for all rows.
pub fn homogeneous_lattice(w: usize, h: usize, alpha: Rational, beta: Rational) -> Result<QuadGraph, GraphError> {
    gen_square_lattice(w, h, &vec![alpha; w], &vec![beta; h])
}

/// Map from lattice coordinate to vertex id, for vertices that have one.
pub fn lattice_index(g: &QuadGraph) -> HashMap<Vec<i64>, VertexId> {
    g.vertices()
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.lattice.clone().map(|c| (c, i)))
        .collect()
}

/// Expands a polyline of axis-aligned lattice corners into a vertex path.
/// Lattice points missing from the graph (inside stretched faces) are skipped,
/// but consecutive points of the result must be joined by an edge.
pub fn lattice_path(g: &QuadGraph, corners: &[[i64; 2]]) -> Result<Vec<VertexId>, GraphError> {
    let idx = lattice_index(g);
    let lookup = |p: [i64; 2]| {
        idx.get(p.as_slice())
            .copied()
            .ok_or_else(|| GraphError::Invalid(format!("no lattice vertex at {p:?}")))
    };
    let mut out = Vec::new();
    let Some(&first) = corners.first() else {
        return Ok(out);
    };
    out.push(lookup(first)?);
    for pair in corners.windows(2) {
        let ([x0, y0], [x1, y1]) = (pair[0], pair[1]);
        if x0 != x1 && y0 != y1 {
            return Err(GraphError::Invalid("path segment is not axis-aligned".into()));
        }
        let steps = (x1 - x0).abs().max((y1 - y0).abs());
        let (dx, dy) = ((x1 - x0).signum(), (y1 - y0).signum());
        for t in 1..=steps {
            let p = [x0 + t * dx, y0 + t * dy];
            match lookup(p) {
                Ok(v) => {
                    let last = *out.last().unwrap();
                    if g.edge_between(last, v).is_none() {
                        return Err(GraphError::Invalid(format!("no edge into lattice vertex {p:?}")));
                    }
                    out.push(v);
                }
                Err(e) if t == steps => return Err(e),
                Err(_) => {}
            }
        }
    }
    Ok(out)
}

/// Axis-aligned block of lattice faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub m0: i64,
    pub n0: i64,
    pub w: i64,
    pub h: i64,
}

impl Rect {
    fn fine_bounds(&self) -> (i64, i64, i64, i64) {
        (
            self.m0 * FINE,
            self.n0 * FINE,
            (self.m0 + self.w) * FINE,
            (self.n0 + self.h) * FINE,
        )
    }

    pub fn contains_face(&self, m: i64, n: i64) -> bool {
        (self.m0..self.m0 + self.w).contains(&m) && (self.n0..self.n0 + self.h).contains(&n)
    }

    /// Strictly inside, so boundary vertices of the rectangle are excluded.
    pub fn contains_fine_strictly(&self, p: FinePoint) -> bool {
        let (x0, y0, x1, y1) = self.fine_bounds();
        p[0] > x0 && p[0] < x1 && p[1] > y0 && p[1] < y1
    }

    /// Position of a fine-grid edge on the rectangle's perimeter, if it lies there.
    pub fn side_of(&self, a: FinePoint, b: FinePoint) -> Option<(Side, i64)> {
        let (x0, y0, x1, y1) = self.fine_bounds();
        let within = |lo: i64, hi: i64, v: i64| v >= lo && v <= hi;
        let horiz = a[1] == b[1] && within(x0, x1, a[0]) && within(x0, x1, b[0]);
        let vert = a[0] == b[0] && within(y0, y1, a[1]) && within(y0, y1, b[1]);
        if horiz && a[1] == y0 {
            Some((Side::Bottom, a[0].min(b[0]) / FINE - self.m0))
        } else if horiz && a[1] == y1 {
            Some((Side::Top, a[0].min(b[0]) / FINE - self.m0))
        } else if vert && a[0] == x0 {
            Some((Side::Left, a[1].min(b[1]) / FINE - self.n0))
        } else if vert && a[0] == x1 {
            Some((Side::Right, a[1].min(b[1]) / FINE - self.n0))
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::Bottom => Side::Top,
            Side::Top => Side::Bottom,
        }
    }
}

/// A replacement patch for a rectangle of a square lattice. Patch faces are
/// given in fine coordinates relative to the rectangle's lower-left corner.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectSpec {
    pub rect: Rect,
    pub patch: Vec<FineFace>,
}

impl DefectSpec {
    /// The rectangle's own unit squares: a defect that changes nothing.
    pub fn identity(rect: Rect) -> Self {
        let patch = (0..rect.w)
            .flat_map(|m| (0..rect.h).map(move |n| unit_square(m, n)))
            .collect();
        DefectSpec { rect, patch }
    }

    fn absolute_patch(&self) -> Vec<FineFace> {
        let (dx, dy) = (self.rect.m0 * FINE, self.rect.n0 * FINE);
        self.patch
            .iter()
            .map(|f| f.map(|p| [p[0] + dx, p[1] + dy]))
            .collect()
    }
}

/// One passage of a strip through the defect rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub strip: StripId,
    pub entry: (Side, i64),
    pub exit: (Side, i64),
}

#[derive(Clone, Debug)]
pub struct DefectedLattice {
    pub graph: QuadGraph,
    pub rect: Rect,
    pub w: usize,
    pub h: usize,
    pub alphas: Vec<Rational>,
    pub betas: Vec<Rational>,
    pub points: BTreeMap<FinePoint, VertexId>,
    pub crossings: Vec<Crossing>,
}

impl DefectedLattice {
    /// Vertex at lattice coordinate `(m, n)`; `None` for points removed by the patch.
    pub fn at(&self, m: i64, n: i64) -> Option<VertexId> {
        self.points.get(&[m * FINE, n * FINE]).copied()
    }

    /// Vertices strictly inside the defect rectangle.
    pub fn inside(&self) -> BTreeSet<VertexId> {
        self.points
            .iter()
            .filter(|(p, _)| self.rect.contains_fine_strictly(**p))
            .map(|(_, &v)| v)
            .collect()
    }

    pub fn weakness(&self) -> WeakReport {
        weakness_of(&self.crossings)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakReport {
    pub weak: bool,
    pub witness: Option<StripId>,
}

fn weakness_of(crossings: &[Crossing]) -> WeakReport {
    let witness = crossings
        .iter()
        .find(|c| c.exit.0 != c.entry.0.opposite())
        .map(|c| c.strip);
    WeakReport { weak: witness.is_none(), witness }
}

/// Infers `(w, h, alphas, betas)` of a regular square lattice.
pub fn lattice_shape(g: &QuadGraph) -> Result<(usize, usize, Vec<Rational>, Vec<Rational>), GraphError> {
    let idx = lattice_index(g);
    let not_square = || GraphError::Invalid("graph is not a square lattice".into());
    let w = idx.keys().filter(|c| c.len() == 2).map(|c| c[0]).max().ok_or_else(not_square)?;
    let h = idx.keys().filter(|c| c.len() == 2).map(|c| c[1]).max().ok_or_else(not_square)?;
    if (w + 1) * (h + 1) != g.vertex_count() as i64 || w * h != g.face_count() as i64 {
        return Err(not_square());
    }
    let edge = |a: [i64; 2], b: [i64; 2]| {
        let (va, vb) = (idx.get(a.as_slice()), idx.get(b.as_slice()));
        match (va, vb) {
            (Some(&x), Some(&y)) => g.edge_between(x, y).ok_or_else(not_square),
            _ => Err(not_square()),
        }
    };
    let alphas = (0..w)
        .map(|m| edge([m, 0], [m + 1, 0]).map(|e| g.edge_param(e).clone()))
        .collect::<Result<_, _>>()?;
    let betas = (0..h)
        .map(|n| edge([0, n], [0, n + 1]).map(|e| g.edge_param(e).clone()))
        .collect::<Result<_, _>>()?;
    Ok((w as usize, h as usize, alphas, betas))
}

fn boundary_segments(faces: &[FineFace]) -> BTreeSet<(FinePoint, FinePoint)> {
    let mut count: BTreeMap<(FinePoint, FinePoint), usize> = BTreeMap::new();
    for f in faces {
        for k in 0..4 {
            let (a, b) = (f[k], f[(k + 1) % 4]);
            *count.entry(if a < b { (a, b) } else { (b, a) }).or_default() += 1;
        }
    }
    count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect()
}

/// Replaces a rectangle of a square lattice by a patch with the same boundary.
pub fn insert_defect(g: &QuadGraph, defect: &DefectSpec) -> Result<DefectedLattice, GraphError> {
    let (w, h, alphas, betas) = lattice_shape(g)?;
    let r = defect.rect;
    if r.w < 1 || r.h < 1 || r.m0 < 0 || r.n0 < 0 || r.m0 + r.w > w as i64 || r.n0 + r.h > h as i64 {
        return Err(GraphError::Invalid("defect rectangle outside the lattice".into()));
    }
    let patch = defect.absolute_patch();
    let identity = DefectSpec::identity(r).absolute_patch();
    if boundary_segments(&patch) != boundary_segments(&identity) {
        return Err(GraphError::BoundaryMismatch);
    }
    let mut faces: Vec<FineFace> = (0..w as i64)
        .flat_map(|m| (0..h as i64).map(move |n| (m, n)))
        .filter(|&(m, n)| !r.contains_face(m, n))
        .map(|(m, n)| unit_square(m, n))
        .collect();
    faces.extend(patch);
    let (graph, points) = build_fine(&faces, &alphas, &betas)?;
    let crossings = rect_crossings(&graph, r);
    Ok(DefectedLattice { graph, rect: r, w, h, alphas, betas, points, crossings })
}

/// Entry/exit sides of every strip that passes through the rectangle.
pub fn rect_crossings(g: &QuadGraph, r: Rect) -> Vec<Crossing> {
    let mut out = Vec::new();
    for s in g.strips() {
        let hits: Vec<(Side, i64)> = s
            .transversal
            .iter()
            .filter_map(|&e| {
                let [a, b] = g.edge(e);
                r.side_of(fine_point(g.vertex(a))?, fine_point(g.vertex(b))?)
            })
            .collect();
        for pair in hits.chunks_exact(2) {
            // report passages from the left/bottom side where possible
            let near = |side: Side| matches!(side, Side::Left | Side::Bottom);
            let (entry, exit) = if !near(pair[0].0) && near(pair[1].0) {
                (pair[1], pair[0])
            } else {
                (pair[0], pair[1])
            };
            out.push(Crossing { strip: s.id, entry, exit });
        }
    }
    out
}

/// True iff every strip entering the rectangle leaves through the opposite side.
pub fn is_weak_defect(g: &QuadGraph, r: Rect) -> WeakReport {
    weakness_of(&rect_crossings(g, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn three_by_three_counts() {
        let g = homogeneous_lattice(3, 3, rat(2), rat(1)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count(), g.face_count()), (16, 24, 9));
        assert_eq!(g.strips().len(), 6);
        let b = g.vertex_balance().unwrap();
        assert_eq!((b.boundary_vertices, b.required_initial_vertices), (12, 7));
    }

    #[test]
    fn column_and_row_parameters() {
        let g = gen_square_lattice(2, 1, &[rat(5), rat(6)], &[rat(1)]).unwrap();
        let idx = lattice_index(&g);
        let e = g.edge_between(idx[&vec![1, 1]], idx[&vec![2, 1]]).unwrap();
        assert_eq!(g.edge_param(e), &rat(6));
        let e = g.edge_between(idx[&vec![2, 0]], idx[&vec![2, 1]]).unwrap();
        assert_eq!(g.edge_param(e), &rat(1));
        // corner convention: the first face parameter is the column one
        assert_eq!(g.face_params(0), (&rat(5), &rat(1)));
    }

    #[test]
    fn length_mismatch() {
        let err = gen_square_lattice(2, 1, &[rat(1), rat(2), rat(3)], &[rat(1)]).unwrap_err();
        assert_eq!(err, GraphError::LengthMismatch { expected: 2, got: 3 });
    }

    #[test]
    fn identity_defect_keeps_strips() {
        let g = homogeneous_lattice(4, 3, rat(3), rat(1)).unwrap();
        let d = insert_defect(&g, &DefectSpec::identity(Rect { m0: 1, n0: 1, w: 2, h: 1 })).unwrap();
        let partition = |g: &QuadGraph| g.strips().iter().map(|s| s.transversal.clone()).collect::<Vec<_>>();
        assert_eq!(partition(&d.graph), partition(&g));
        assert!(d.weakness().weak);
        assert_eq!(d.crossings.len(), 3);
    }

    #[test]
    fn mismatched_patch_is_rejected() {
        let g = homogeneous_lattice(3, 3, rat(3), rat(1)).unwrap();
        let spec = DefectSpec { rect: Rect { m0: 1, n0: 1, w: 1, h: 1 }, patch: vec![unit_square(0, 0), unit_square(1, 0)] };
        assert_eq!(insert_defect(&g, &spec).unwrap_err(), GraphError::BoundaryMismatch);
    }

    #[test]
    fn path_expansion() {
        let g = homogeneous_lattice(2, 2, rat(3), rat(1)).unwrap();
        let p = lattice_path(&g, &[[0, 2], [0, 0], [2, 0]]).unwrap();
        assert_eq!(p.len(), 5);
        assert!(lattice_path(&g, &[[0, 0], [1, 1]]).is_err());
    }
}
