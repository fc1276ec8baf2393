use super::{classify_ivp, CauchyError, InitialSubgraph, Verdict};
use crate::graph::{EdgeId, QuadGraph, StripId, VertexId};
use std::fmt;

/// A vertex of the unit cube `{0,1}^N`, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubePoint {
    words: Vec<u64>,
    dim: usize,
}

impl CubePoint {
    pub fn origin(dim: usize) -> Self {
        CubePoint { words: vec![0; dim.div_ceil(64)], dim }
    }

    /// `(1, …, 1, 0, …, 0)` with `k` leading ones.
    pub fn staircase(dim: usize, k: usize) -> Self {
        let mut p = Self::origin(dim);
        for i in 0..k {
            p.set(i, true);
        }
        p
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut p = Self::origin(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            p.set(i, b);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.dim);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        assert!(i < self.dim);
        let mask = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut p = self.clone();
        p.set(i, !self.get(i));
        p
    }

    pub fn with(&self, i: usize, b: bool) -> Self {
        let mut p = self.clone();
        p.set(i, b);
        p
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices where the two points differ.
    pub fn difference(&self, other: &CubePoint) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.get(i) != other.get(i)).collect()
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.dim).map(|i| self.get(i)).collect()
    }

    /// If the point lies on the staircase, the number of leading ones.
    pub fn staircase_position(&self) -> Option<usize> {
        let k = self.weight();
        (0..k).all(|i| self.get(i)).then_some(k)
    }

    /// Pairs `i < j` with a zero at `i` and a one at `j`; zero exactly on the staircase.
    pub fn inversions(&self) -> usize {
        let mut zeros = 0;
        let mut count = 0;
        for i in 0..self.dim {
            if self.get(i) {
                count += zeros;
            } else {
                zeros += 1;
            }
        }
        count
    }
}

impl fmt::Debug for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits().iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "({s})")
    }
}

/// Map of the graph into the cube whose directions are the strips: crossing a
/// strip flips its coordinate. The initial path becomes the staircase.
#[derive(Clone, Debug)]
pub struct CubeImmersion {
    dim: usize,
    coords: Vec<CubePoint>,
    strip_index: Vec<usize>,
    path: Vec<VertexId>,
}

impl CubeImmersion {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coord(&self, v: VertexId) -> &CubePoint {
        &self.coords[v]
    }

    pub fn coords(&self) -> &[CubePoint] {
        &self.coords
    }

    /// Cube direction of a strip.
    pub fn strip_index(&self, s: StripId) -> usize {
        self.strip_index[s]
    }

    /// Cube direction (shift operator) of an edge.
    pub fn edge_index(&self, g: &QuadGraph, e: EdgeId) -> usize {
        self.strip_index[g.strip_of_edge(e)]
    }

    /// Strip assigned to each cube direction.
    pub fn strip_of_index(&self) -> Vec<StripId> {
        let mut out = vec![0; self.dim];
        for (s, &i) in self.strip_index.iter().enumerate() {
            out[i] = s;
        }
        out
    }

    pub fn path(&self) -> &[VertexId] {
        &self.path
    }

    /// Coordinates obtained by walking from the first path vertex along `walk`,
    /// flipping one coordinate per edge.
    pub fn walk_coordinates(&self, g: &QuadGraph, walk: &[VertexId]) -> CubePoint {
        let mut p = self.coords[walk[0]].clone();
        for w in walk.windows(2) {
            let e = g.edge_between(w[0], w[1]).expect("walk along edges");
            p = p.flipped(self.edge_index(g, e));
        }
        p
    }
}

/// Immerses the graph into the unit cube of dimension `|P|`, assigning the
/// `k`-th path edge's strip to direction `k`. Requires a correct problem on a
/// simple path, so that every strip gets exactly one direction.
pub fn hypercube_immersion(g: &QuadGraph, p: &InitialSubgraph) -> Result<CubeImmersion, CauchyError> {
    let path = p.path().ok_or(CauchyError::NotSimplePath)?.to_vec();
    if classify_ivp(g, p)?.verdict != Verdict::Correct {
        return Err(CauchyError::NotCorrectIvp);
    }
    let dim = path.len() - 1;
    let mut strip_index = vec![usize::MAX; g.strips().len()];
    for (k, w) in path.windows(2).enumerate() {
        let e = g.edge_between(w[0], w[1]).expect("path edge");
        strip_index[g.strip_of_edge(e)] = k;
    }
    debug_assert!(strip_index.iter().all(|&i| i < dim));

    let mut coords: Vec<Option<CubePoint>> = vec![None; g.vertex_count()];
    for (v, parent) in g.bfs_tree(path[0]) {
        coords[v] = Some(match parent {
            None => CubePoint::origin(dim),
            Some(u) => {
                let e = g.edge_between(u, v).unwrap();
                coords[u].as_ref().unwrap().flipped(strip_index[g.strip_of_edge(e)])
            }
        });
    }
    let coords: Vec<CubePoint> = coords.into_iter().map(|c| c.expect("connected graph")).collect();

    // every edge, not only the tree edges, must flip exactly its strip's coordinate
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        if coords[a].difference(&coords[b]) != [strip_index[g.strip_of_edge(e)]] {
            return Err(CauchyError::PathDependentCoordinates(b));
        }
    }
    Ok(CubeImmersion { dim, coords, strip_index, path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::lattice::{gen_square_lattice, homogeneous_lattice, lattice_path};
    use crate::scalar::rat;

    #[test]
    fn single_face_is_the_square() {
        let g = homogeneous_lattice(1, 1, rat(2), rat(1)).unwrap();
        // ids: 0=(0,0), 1=(0,1), 2=(1,0), 3=(1,1)
        let p = InitialSubgraph::from_path(&g, &[0, 2, 3]).unwrap();
        let im = hypercube_immersion(&g, &p).unwrap();
        assert_eq!(im.dim(), 2);
        assert_eq!(im.coord(0), &CubePoint::from_bits(&[false, false]));
        assert_eq!(im.coord(2), &CubePoint::from_bits(&[true, false]));
        assert_eq!(im.coord(3), &CubePoint::from_bits(&[true, true]));
        assert_eq!(im.coord(1), &CubePoint::from_bits(&[false, true]));
    }

    #[test]
    fn path_maps_to_staircase() {
        let g = gen_square_lattice(3, 3, &[rat(1), rat(2), rat(3)], &[rat(4), rat(5), rat(6)]).unwrap();
        let path = lattice_path(&g, &[[0, 3], [0, 0], [3, 0]]).unwrap();
        let im = hypercube_immersion(&g, &InitialSubgraph::from_path(&g, &path).unwrap()).unwrap();
        for (k, &v) in path.iter().enumerate() {
            assert_eq!(im.coord(v), &CubePoint::staircase(6, k));
        }
    }

    #[test]
    fn underdetermined_data_is_rejected() {
        let g = homogeneous_lattice(2, 2, rat(2), rat(1)).unwrap();
        let path = lattice_path(&g, &[[0, 0], [2, 0]]).unwrap();
        let err = hypercube_immersion(&g, &InitialSubgraph::from_path(&g, &path).unwrap()).unwrap_err();
        assert_eq!(err, CauchyError::NotCorrectIvp);
    }

    #[test]
    fn inversions_vanish_on_staircase() {
        assert_eq!(CubePoint::staircase(70, 65).inversions(), 0);
        assert_eq!(CubePoint::staircase(70, 65).staircase_position(), Some(65));
        assert_eq!(CubePoint::from_bits(&[false, true, true]).inversions(), 2);
        assert_eq!(CubePoint::from_bits(&[false, true]).staircase_position(), None);
    }
}
