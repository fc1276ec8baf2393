//! Small hand-made quad-graphs with known behaviour: bent and transparent
//! defects, strips that return to the initial line, a self-crossing strip and
//! a lattice whose strips are all closed.

use crate::graph::lattice::{build_fine, insert_defect, lattice_path, DefectSpec, DefectedLattice, FineFace, Rect, FINE};
use crate::graph::{GraphError, QuadGraph, VertexId, VertexInfo};
use crate::scalar::{rat, Rational};
use std::collections::BTreeMap;

fn scaled(face: [[i64; 2]; 4], k: i64) -> FineFace {
    face.map(|[x, y]| [x * k, y * k])
}

/// One lattice square cut along a diagonal. Two strips turn by a right angle
/// inside it, so the defect is not weak.
pub fn diagonal_defect() -> DefectSpec {
    DefectSpec {
        rect: Rect { m0: 1, n0: 1, w: 1, h: 1 },
        patch: vec![
            [[0, 0], [20, 0], [10, 10], [0, 20]],
            [[20, 0], [20, 20], [0, 20], [10, 10]],
        ],
    }
}

/// One lattice square with a small rhombus inside; strips cross it straight.
pub fn transparent_defect() -> DefectSpec {
    DefectSpec {
        rect: Rect { m0: 1, n0: 1, w: 1, h: 1 },
        patch: vec![
            [[0, 0], [20, 0], [7, 7], [0, 20]],
            [[7, 7], [20, 0], [13, 13], [0, 20]],
            [[20, 0], [20, 20], [0, 20], [13, 13]],
        ],
    }
}

/// Three lattice squares in a row, rebuilt so that the left and right vertical
/// strips swap places. Data on the bottom and right sides needs an implicit step.
pub fn swapping_defect() -> DefectSpec {
    DefectSpec {
        rect: Rect { m0: 1, n0: 1, w: 3, h: 1 },
        patch: vec![
            [[0, 0], [20, 0], [10, 13], [0, 20]],
            [[10, 13], [20, 0], [40, 0], [20, 13]],
            [[0, 20], [10, 13], [20, 13], [20, 20]],
            [[20, 13], [40, 0], [40, 7], [20, 20]],
            [[20, 20], [40, 7], [50, 7], [40, 20]],
            [[40, 0], [60, 0], [50, 7], [40, 7]],
            [[50, 7], [60, 0], [60, 20], [40, 20]],
        ],
    }
}

/// A 3×2 block whose middle horizontal strips are sheared; used for wave runs.
pub fn sheared_block_defect() -> DefectSpec {
    DefectSpec {
        rect: Rect { m0: 1, n0: 1, w: 3, h: 2 },
        patch: vec![
            [[0, 0], [20, 0], [20, 10], [0, 20]],
            [[20, 0], [40, 0], [40, 15], [20, 10]],
            [[40, 0], [60, 0], [60, 20], [40, 15]],
            [[0, 20], [20, 10], [40, 15], [20, 25]],
            [[20, 25], [40, 15], [60, 20], [40, 30]],
            [[0, 20], [20, 25], [20, 40], [0, 40]],
            [[20, 25], [40, 30], [40, 40], [20, 40]],
            [[40, 30], [60, 20], [60, 40], [40, 40]],
        ],
    }
}

/// A defect placed in a homogeneous host lattice of the given size.
pub fn defect_in_host(spec: &DefectSpec, w: usize, h: usize, alpha: Rational, beta: Rational) -> Result<DefectedLattice, GraphError> {
    let host = crate::graph::lattice::homogeneous_lattice(w, h, alpha, beta)?;
    insert_defect(&host, spec)
}

/// Smallest host that leaves one lattice square around the defect.
pub fn default_host_size(spec: &DefectSpec) -> (usize, usize) {
    ((spec.rect.m0 + spec.rect.w + 1) as usize, (spec.rect.n0 + spec.rect.h + 1) as usize)
}

/// A graph together with named vertex paths.
#[derive(Clone, Debug)]
pub struct PathFixture {
    pub graph: QuadGraph,
    pub paths: Vec<(String, Vec<VertexId>)>,
}

impl PathFixture {
    pub fn path(&self, name: &str) -> &[VertexId] {
        &self.paths.iter().find(|(n, _)| n == name).expect("known path").1
    }
}

fn distinct_params(n: usize, offset: i64) -> Vec<Rational> {
    (0..n as i64).map(|i| rat(offset + 2 * i)).collect()
}

/// A 7×4 lattice with an L-shaped path and a staircase path.
pub fn lattice_with_l_and_staircase() -> PathFixture {
    let graph = crate::graph::lattice::gen_square_lattice(7, 4, &distinct_params(7, 3), &distinct_params(4, -4)).expect("lattice");
    let l = lattice_path(&graph, &[[0, 4], [0, 0], [7, 0]]).expect("path");
    let stairs = lattice_path(
        &graph,
        &[[0, 4], [0, 3], [2, 3], [2, 2], [3, 2], [3, 1], [6, 1], [6, 0], [7, 0]],
    )
    .expect("path");
    PathFixture { graph, paths: vec![("l-path".into(), l), ("staircase".into(), stairs)] }
}

/// A 6×6 lattice in which one strip bends from the left side to the bottom.
/// Left+bottom data is overdetermined, right+top underdetermined and
/// bottom+right correct.
pub fn bent_corner_lattice() -> PathFixture {
    let mut faces = Vec::new();
    let in_middle = |i: i64, j: i64| (2..4).contains(&i) && (2..4).contains(&j);
    for i in 0..6 {
        for j in 0..6 {
            let wide = (2..4).contains(&i) && j >= 4;
            let tall = (2..4).contains(&j) && i >= 4;
            if !(in_middle(i, j) && !(i == 2 && j == 2)) && !wide && !tall {
                faces.push(scaled([[i, j], [i + 1, j], [i + 1, j + 1], [i, j + 1]], FINE));
            }
        }
    }
    faces.push(scaled([[2, 3], [3, 3], [4, 4], [2, 4]], FINE));
    faces.push(scaled([[3, 2], [4, 2], [4, 4], [3, 3]], FINE));
    for j in 4..6 {
        faces.push(scaled([[2, j], [4, j], [4, j + 1], [2, j + 1]], FINE));
    }
    for i in 4..6 {
        faces.push(scaled([[i, 2], [i + 1, 2], [i + 1, 4], [i, 4]], FINE));
    }
    let (graph, _) = build_fine(&faces, &distinct_params(6, 3), &distinct_params(6, -4)).expect("bent corner lattice");
    let p = |c: &[[i64; 2]]| lattice_path(&graph, c).expect("path");
    let paths = vec![
        ("left-bottom".into(), p(&[[0, 6], [0, 0], [6, 0]])),
        ("right-top".into(), p(&[[6, 0], [6, 6], [0, 6]])),
        ("bottom-right".into(), p(&[[0, 0], [6, 0], [6, 6]])),
    ];
    PathFixture { graph, paths }
}

/// Vertical strips that bend back to the bottom line, so that they cross data
/// on the bottom twice, while the horizontal strips never meet it.
pub fn returning_strips_lattice() -> PathFixture {
    let mut faces: Vec<FineFace> = Vec::new();
    for row in 0..4 {
        for col in (0..2).chain(11..13) {
            faces.push(scaled([[col, row], [col + 1, row], [col + 1, row + 1], [col, row + 1]], 20));
        }
    }
    for k in 1..=4i64 {
        let x = 20 + 40 * k;
        let h = 20 * k - 10;
        let (y0, y1) = (20 * (k - 1), 20 * k);
        faces.push([[40, y0], [x, y0], [x, h], [40, y1]]);
        faces.push([[x, y0], [x + 20, y0], [x + 20, h], [x, h]]);
        faces.push([[x, h], [x + 20, h], [x + 40, y1], [40, y1]]);
        faces.push([[x + 20, y0], [x + 40, y0], [x + 40, y1], [x + 20, h]]);
        let mut c = x + 40;
        while c < 220 {
            faces.push([[c, y0], [c + 20, y0], [c + 20, y1], [c, y1]]);
            c += 20;
        }
    }
    let (graph, _) = build_fine(&faces, &distinct_params(13, 3), &distinct_params(4, -4)).expect("returning strips");
    let bottom = lattice_path(&graph, &[[0, 0], [13, 0]]).expect("path");
    PathFixture { graph, paths: vec![("bottom".into(), bottom)] }
}

/// Six faces where one strip crosses itself; data on the path `2, 3, 4, 5`
/// (labels are vertex id + 1).
pub fn self_crossing_graph() -> PathFixture {
    let pos: [[f64; 2]; 10] = [
        [20.0, 20.0],
        [40.0, 20.0],
        [40.0, 40.0],
        [20.0, 40.0],
        [0.0, 40.0],
        [0.0, 0.0],
        [60.0, 0.0],
        [60.0, 60.0],
        [20.0, 60.0],
        [0.0, 60.0],
    ];
    let faces: [[usize; 4]; 6] = [
        [6, 7, 2, 1],
        [7, 8, 3, 2],
        [1, 2, 3, 4],
        [4, 3, 8, 9],
        [10, 5, 4, 9],
        [6, 1, 4, 5],
    ];
    let vertices = pos
        .iter()
        .map(|&[x, y]| VertexInfo { pos: Some([x / 20.0, y / 20.0]), lattice: None })
        .collect();
    let g = QuadGraph::build(vertices, faces.iter().map(|f| f.iter().map(|l| l - 1).collect()).collect())
        .expect("self-crossing graph");
    let g = g.with_params_by(|_, s| if s.self_crossing { rat(5) } else { rat(1 + 2 * s.id as i64) });
    PathFixture { graph: g, paths: vec![("data".into(), vec![1, 2, 3, 4])] }
}

/// Hexagons of a parallelogram patch, each cut into six quadrilaterals by
/// joining its centre to the edge midpoints. Every strip that does not reach
/// the boundary closes around a hexagon.
pub fn closed_strip_lattice(n: i64) -> QuadGraph {
    // integer coordinates in the basis e1 = (1, 0), e2 = (1/2, √3/2), scaled by 6
    const CORNERS: [[i64; 2]; 6] = [[1, 1], [-1, 2], [-2, 1], [-1, -1], [1, -2], [2, -1]];
    let mut faces = Vec::new();
    for q in 0..n {
        for r in 0..n {
            let c = [6 * q, 6 * r];
            let corner = |i: usize| [c[0] + 2 * CORNERS[i % 6][0], c[1] + 2 * CORNERS[i % 6][1]];
            let mid = |i: usize| {
                let (a, b) = (CORNERS[i % 6], CORNERS[(i + 1) % 6]);
                [c[0] + a[0] + b[0], c[1] + a[1] + b[1]]
            };
            for i in 0..6 {
                faces.push([corner(i), mid(i), c, mid(i + 5)]);
            }
        }
    }
    let info = |p: &[i64; 2]| {
        let (x, y) = (p[0] as f64 / 6.0, p[1] as f64 / 6.0);
        VertexInfo { pos: Some([x + 0.5 * y, y * 3f64.sqrt() / 2.0]), lattice: None }
    };
    QuadGraph::from_keyed_faces(&faces, info).expect("hexagon patch").0
}

/// Number of hexagons of [`closed_strip_lattice`] that do not touch the boundary.
pub fn interior_hexagons(n: i64) -> usize {
    (n - 2).max(0) as usize * (n - 2).max(0) as usize
}

/// Positions of fine points by vertex id, for reports.
pub fn fine_points(d: &DefectedLattice) -> BTreeMap<VertexId, [i64; 2]> {
    d.points.iter().map(|(p, &v)| (v, *p)).collect()
}
