use super::{path_data, propagate, SolveError, SolveOptions};
use crate::cauchy::InitialSubgraph;
use crate::equations::EquationDef;
use crate::field::{max_relative_residual, FieldSolution};
use crate::graph::lattice::{lattice_index, lattice_path, DefectedLattice, FINE};
use crate::graph::{QuadGraph, StripId, VertexId};
use crate::scalar::{rat, Rational, Scalar};
use std::collections::BTreeSet;

/// The strips through a defect rectangle together with the defect itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossRegion {
    pub strips: Vec<StripId>,
    /// Vertices of the defected graph lying on those strips or inside the rectangle.
    pub vertices: BTreeSet<VertexId>,
}

impl CrossRegion {
    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }
}

pub fn cross_region(d: &DefectedLattice) -> CrossRegion {
    let g = &d.graph;
    let inside = d.inside();
    let mut strips: BTreeSet<StripId> = d.crossings.iter().map(|c| c.strip).collect();
    // strips that never leave the rectangle, such as closed ones
    for s in g.strips() {
        let all_inside = s
            .transversal
            .iter()
            .all(|&e| g.edge(e).iter().any(|v| inside.contains(v)));
        if all_inside {
            strips.insert(s.id);
        }
    }
    let mut vertices = inside;
    for &s in &strips {
        for f in g.strip(s).faces() {
            vertices.extend(g.face(f));
        }
        for &e in &g.strip(s).transversal {
            vertices.extend(g.edge(e));
        }
    }
    CrossRegion { strips: strips.into_iter().collect(), vertices }
}

#[derive(Clone, Debug)]
pub struct DefectComparison<T> {
    pub plain: FieldSolution<T>,
    pub defected: FieldSolution<T>,
    /// Lattice points outside the defect present in both graphs.
    pub compared: usize,
    /// Those of them where the two solutions differ, as `(m, n)`.
    pub differing: Vec<[i64; 2]>,
    /// Largest relative face residual over both solutions.
    pub max_residual: f64,
}

fn differs<T: Scalar>(a: &T, b: &T, tol: f64) -> bool {
    let d = a.clone() - b.clone();
    if T::EXACT {
        !d.is_negligible(&T::one())
    } else {
        d.magnitude() > tol * a.magnitude().max(b.magnitude()).max(1.0)
    }
}

/// Solves the same problem with and without the defect and compares the two
/// solutions at every lattice point outside the defect rectangle's interior.
/// The data path is a polyline of lattice corners and must avoid the defect.
pub fn defect_experiment<T: Scalar>(
    d: &DefectedLattice,
    plain: &QuadGraph,
    eq: &EquationDef,
    corners: &[[i64; 2]],
    values: &[T],
    opts: &SolveOptions,
) -> Result<DefectComparison<T>, SolveError> {
    let solve = |g: &QuadGraph| -> Result<FieldSolution<T>, SolveError> {
        let path = lattice_path(g, corners)?;
        let p = InitialSubgraph::from_path(g, &path)?;
        let data = path_data(g, &path, values)?;
        Ok(propagate(g, eq, &p, &data, opts)?.solution)
    };
    let plain_sol = solve(plain)?;
    let defected_sol = solve(&d.graph)?;
    let inside = d.inside();
    let plain_idx = lattice_index(plain);
    let mut compared = 0;
    let mut differing = Vec::new();
    for (p, &v) in &d.points {
        if inside.contains(&v) || p[0] % FINE != 0 || p[1] % FINE != 0 {
            continue;
        }
        let m = [p[0] / FINE, p[1] / FINE];
        let Some(&u) = plain_idx.get(m.as_slice()) else { continue };
        compared += 1;
        if differs(plain_sol.get(u).unwrap(), defected_sol.get(v).unwrap(), opts.float_tol) {
            differing.push(m);
        }
    }
    let max_residual = max_relative_residual(plain, eq, &plain_sol).max(max_relative_residual(&d.graph, eq, &defected_sol));
    Ok(DefectComparison { plain: plain_sol, defected: defected_sol, compared, differing, max_residual })
}

/// Value 1 at position `k` of a path of length `len`, 0 elsewhere.
pub fn delta_data(len: usize, k: usize) -> Vec<Rational> {
    (0..len).map(|i| rat(i64::from(i == k))).collect()
}

#[derive(Clone, Debug)]
pub struct WaveRegionReport {
    /// Vertices of the defected graph, outside the defect, where the solutions differ.
    pub affected: BTreeSet<VertexId>,
    pub cross: CrossRegion,
    pub within_cross: bool,
    /// Whether the affected set avoids the parts of the cross below and to the
    /// left of the defect; reported for information only.
    pub within_hook: bool,
    pub comparison: DefectComparison<Rational>,
}

/// Runs the wave equation with a unit value at path position `delta` and
/// locates where the defect changes the solution.
pub fn wave_affected_region(
    d: &DefectedLattice,
    plain: &QuadGraph,
    corners: &[[i64; 2]],
    delta: usize,
) -> Result<WaveRegionReport, SolveError> {
    let eq = EquationDef::wave();
    let len = lattice_path(plain, corners)?.len();
    let values = delta_data(len, delta);
    let comparison = defect_experiment(d, plain, &eq, corners, &values, &SolveOptions::default())?;
    let cross = cross_region(d);
    let affected: BTreeSet<VertexId> = comparison
        .differing
        .iter()
        .map(|m| d.at(m[0], m[1]).expect("compared point exists"))
        .collect();
    let within_cross = affected.iter().all(|&v| cross.contains(v));
    let r = d.rect;
    let within_hook = comparison.differing.iter().all(|m| m[0] >= r.m0 && m[1] >= r.n0);
    Ok(WaveRegionReport { affected, cross, within_cross, within_hook, comparison })
}
