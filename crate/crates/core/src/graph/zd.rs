//! Quad-graphs cut out of the cell complex of ℤᵈ.
//!
//! Every vertex keeps its integer coordinate, so fields defined on ℤᵈ (the
//! multidimensional kink) can be evaluated directly on the section.

use super::{GraphError, QuadGraph, VertexInfo};
use crate::scalar::Rational;
use crate::unionfind::UnionFind;
use std::collections::{BTreeMap, HashMap};

type Point = Vec<i64>;
type Face = [Point; 4];

/// How faces of ℤᵈ are selected.
#[derive(Clone, Debug, PartialEq)]
pub enum Selector {
    /// Faces crossing the plane `c·x = offset`, inside the box `[-radius, radius]^d`.
    Plane {
        normal: Vec<f64>,
        radius: i64,
        offset: Option<f64>,
    },
    /// Union of coordinate quadrants of ℤ³ (see [`Quadrant`]), within `radius`.
    Quadrants { quadrants: Vec<Quadrant>, radius: i64 },
}

/// The quadrant of the coordinate plane `n_axis = 0` where the two remaining
/// coordinates (in increasing axis order) have the given signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quadrant {
    pub axis: usize,
    pub signs: [i8; 2],
}

impl Quadrant {
    /// The three quadrants with all coordinates positive.
    pub fn positive_octant() -> Vec<Quadrant> {
        (0..3).map(|axis| Quadrant { axis, signs: [1, 1] }).collect()
    }

    /// The six quadrants with `n_i n_j < 0`.
    pub fn mixed_signs() -> Vec<Quadrant> {
        (0..3)
            .flat_map(|axis| [[1, -1], [-1, 1]].map(|signs| Quadrant { axis, signs }))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ZdSection {
    pub graph: QuadGraph,
    pub dim: usize,
    /// Offset actually used when the requested one put lattice points on the plane.
    pub perturbed_offset: Option<f64>,
}

/// Default offset shift applied when lattice points lie exactly on the cutting plane.
pub fn default_epsilon() -> f64 {
    1e-3
}

fn unit(d: usize, i: usize) -> Point {
    let mut e = vec![0; d];
    e[i] = 1;
    e
}

fn add(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Face spanned by axes `j < k` at base corner `x`, in `(v, v1, v12, v2)` order.
fn face_at(x: &[i64], j: usize, k: usize) -> Face {
    let d = x.len();
    let x1 = add(x, &unit(d, j));
    let x12 = add(&x1, &unit(d, k));
    let x2 = add(x, &unit(d, k));
    [x.to_vec(), x1, x12, x2]
}

fn dot(c: &[f64], x: &[i64]) -> f64 {
    c.iter().zip(x).map(|(a, b)| a * *b as f64).sum()
}

fn box_points(d: usize, lo: i64, hi: i64) -> Vec<Point> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// Builds the quad-graph of the selected faces, trimmed to a topological disk.
pub fn gen_zd_subcomplex(d: usize, selector: &Selector) -> Result<ZdSection, GraphError> {
    let (faces, perturbed) = match selector {
        Selector::Plane { normal, radius, offset } => plane_faces(d, normal, *radius, *offset)?,
        Selector::Quadrants { quadrants, radius } => {
            if d != 3 {
                return Err(GraphError::Invalid("quadrant selector needs d = 3".into()));
            }
            (quadrant_faces(quadrants, *radius)?, None)
        }
    };
    let faces = trim_to_disk(faces);
    if faces.is_empty() {
        return Err(GraphError::Invalid("selector picked no faces".into()));
    }
    let basis = match selector {
        Selector::Plane { normal, .. } => plane_basis(normal),
        Selector::Quadrants { .. } => plane_basis(&[1.0, 1.0, 1.0]),
    };
    let info = |p: &Point| VertexInfo {
        pos: Some([dot(&basis[0], p), dot(&basis[1], p)]),
        lattice: Some(p.clone()),
    };
    let (graph, _) = QuadGraph::from_keyed_faces(&faces, info)?;
    Ok(ZdSection { graph, dim: d, perturbed_offset: perturbed })
}

fn plane_faces(
    d: usize,
    c: &[f64],
    radius: i64,
    offset: Option<f64>,
) -> Result<(Vec<Face>, Option<f64>), GraphError> {
    if c.len() != d || c.iter().all(|x| x.abs() < 1e-12) || !c.iter().all(|x| x.is_finite()) {
        return Err(GraphError::DegenerateNormal);
    }
    match d {
        2 => {
            // both-signs rule: a face is kept iff its corners lie on both sides
            let mut rho = offset.unwrap_or(0.0);
            let mut perturbed = None;
            let pts = box_points(2, -radius, radius);
            if pts.iter().any(|p| (dot(c, p) - rho).abs() < 1e-12) {
                rho += default_epsilon();
                perturbed = Some(rho);
            }
            let faces = box_points(2, -radius, radius - 1)
                .into_iter()
                .map(|x| face_at(&x, 0, 1))
                .filter(|f| {
                    let vals: Vec<f64> = f.iter().map(|p| dot(c, p) - rho).collect();
                    vals.iter().any(|&v| v < 0.0) && vals.iter().any(|&v| v > 0.0)
                })
                .collect();
            Ok((faces, perturbed))
        }
        3 => {
            // stepped surface: face normal to axis i at base x is kept iff
            // rho <= |c|·x' < rho + |c_i|, with x' the reflected coordinates
            let abs: Vec<f64> = c.iter().map(|x| x.abs()).collect();
            let rho = offset.unwrap_or(-0.5 * abs.iter().sum::<f64>());
            let flip: Vec<bool> = c.iter().map(|&x| x < 0.0).collect();
            let mut faces = Vec::new();
            for x in box_points(3, -radius, radius - 1) {
                for i in 0..3 {
                    let s = dot(&abs, &x);
                    if !(rho <= s && s < rho + abs[i]) {
                        continue;
                    }
                    let (j, k) = match i {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    let f = face_at(&x, j, k).map(|p| {
                        p.iter()
                            .enumerate()
                            .map(|(a, &v)| if flip[a] { -v } else { v })
                            .collect::<Point>()
                    });
                    if f.iter().all(|p| p.iter().all(|v| v.abs() <= radius)) {
                        faces.push(f);
                    }
                }
            }
            Ok((faces, None))
        }
        _ => Err(GraphError::Invalid(format!("plane sections are supported for d = 2, 3 (got {d})"))),
    }
}

fn quadrant_faces(quadrants: &[Quadrant], radius: i64) -> Result<Vec<Face>, GraphError> {
    let mut faces = Vec::new();
    for q in quadrants {
        if q.axis > 2 || q.signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(GraphError::Invalid(format!("bad quadrant {q:?}")));
        }
        let others: Vec<usize> = (0..3).filter(|&a| a != q.axis).collect();
        let range = |s: i8| if s > 0 { 0..radius } else { -radius..0 };
        for u in range(q.signs[0]) {
            for v in range(q.signs[1]) {
                let mut x = vec![0; 3];
                x[others[0]] = u;
                x[others[1]] = v;
                faces.push(face_at(&x, others[0], others[1]));
            }
        }
    }
    Ok(faces)
}

/// Orthonormal basis of the plane orthogonal to `c` (first two axes for d = 2).
fn plane_basis(c: &[f64]) -> [Vec<f64>; 2] {
    let d = c.len();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n: Vec<f64> = c.iter().map(|x| x / norm(c)).collect();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        let mut v = unit(d, i).iter().map(|&x| x as f64).collect::<Vec<_>>();
        for b in std::iter::once(&n).chain(basis.iter()) {
            let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let l = norm(&v);
        if l > 1e-9 {
            basis.push(v.iter().map(|x| x / l).collect());
        }
        if basis.len() == 2 {
            break;
        }
    }
    while basis.len() < 2 {
        basis.push(vec![0.0; d]);
    }
    [basis[0].clone(), basis[1].clone()]
}

fn edge_key(a: &Point, b: &Point) -> (Point, Point) {
    if a < b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Keeps the largest edge-connected component and removes faces at pinch
/// vertices until every vertex link is a single fan.
fn trim_to_disk(mut faces: Vec<Face>) -> Vec<Face> {
    faces.sort();
    faces.dedup();
    loop {
        faces = largest_component(faces);
        let mut by_vertex: BTreeMap<&Point, Vec<usize>> = BTreeMap::new();
        for (i, f) in faces.iter().enumerate() {
            for p in f {
                by_vertex.entry(p).or_default().push(i);
            }
        }
        let mut drop = vec![false; faces.len()];
        for (v, inc) in &by_vertex {
            let mut uf = UnionFind::new(inc.len());
            let mut seen: HashMap<Point, usize> = HashMap::new();
            for (slot, &fi) in inc.iter().enumerate() {
                let f = &faces[fi];
                let k = f.iter().position(|p| p == *v).unwrap();
                for nb in [&f[(k + 1) % 4], &f[(k + 3) % 4]] {
                    if let Some(&other) = seen.get(nb) {
                        uf.union(slot, other);
                    } else {
                        seen.insert(nb.clone(), slot);
                    }
                }
            }
            let mut fans: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for slot in 0..inc.len() {
                fans.entry(uf.find(slot)).or_default().push(inc[slot]);
            }
            if fans.len() > 1 {
                let keep = fans.values().max_by_key(|f| (f.len(), std::cmp::Reverse(f[0]))).unwrap().clone();
                for fi in inc {
                    if !keep.contains(fi) {
                        drop[*fi] = true;
                    }
                }
                break;
            }
        }
        if !drop.iter().any(|&x| x) {
            return faces;
        }
        faces = faces.into_iter().zip(drop).filter(|(_, d)| !d).map(|(f, _)| f).collect();
    }
}

fn largest_component(faces: Vec<Face>) -> Vec<Face> {
    let mut uf = UnionFind::new(faces.len());
    let mut owner: HashMap<(Point, Point), usize> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for k in 0..4 {
            let e = edge_key(&f[k], &f[(k + 1) % 4]);
            if let Some(&j) = owner.get(&e) {
                uf.union(i, j);
            } else {
                owner.insert(e, i);
            }
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..faces.len() {
        comps.entry(uf.find(i)).or_default().push(i);
    }
    let Some(best) = comps.values().max_by_key(|c| (c.len(), std::cmp::Reverse(c[0]))) else {
        return faces;
    };
    let keep: std::collections::HashSet<usize> = best.iter().copied().collect();
    faces
        .into_iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .map(|(_, f)| f)
        .collect()
}

/// Axis and lower coordinate of an edge of a ℤᵈ section.
pub fn edge_axis(g: &QuadGraph, a: usize, b: usize) -> Option<(usize, i64)> {
    let (pa, pb) = (g.vertex(a).lattice.as_ref()?, g.vertex(b).lattice.as_ref()?);
    let diff: Vec<usize> = (0..pa.len()).filter(|&i| pa[i] != pb[i]).collect();
    match diff.as_slice() {
        [i] if (pa[*i] - pb[*i]).abs() == 1 => Some((*i, pa[*i].min(pb[*i]))),
        _ => None,
    }
}

/// Assigns strip parameters of a ℤᵈ section from a per-axis rule `f(axis, n)`.
pub fn with_axis_params<F>(g: QuadGraph, f: F) -> QuadGraph
where
    F: Fn(usize, i64) -> Rational,
{
    g.with_params_by(|g, s| {
        let [a, b] = g.edge(s.transversal[0]);
        let (axis, n) = edge_axis(g, a, b).expect("edge of a ℤᵈ section");
        f(axis, n)
    })
}
