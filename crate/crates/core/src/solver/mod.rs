//! Solving initial value problems, erasing strips, and defect experiments.

mod cube;
mod defect;
mod erase;

pub use cube::CubeEvaluator;
pub use defect::{
    cross_region, defect_experiment, delta_data, wave_affected_region, CrossRegion, DefectComparison, WaveRegionReport,
};
pub use erase::{erase_strip, insert_strip, EraseMemo, Erased};

use crate::cauchy::{classify_ivp, hypercube_immersion, CauchyError, InitialSubgraph, Verdict};
use crate::equations::{Corner, EquationDef, EquationError};
use crate::field::{violated_faces, FieldSolution, Provenance};
use crate::graph::{FaceId, GraphError, QuadGraph, VertexId};
use crate::scalar::Scalar;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("singular step on face {0:?}: the data is not generic")]
    Singular(Option<FaceId>),
    #[error("vertex {0} of the initial subgraph has no value")]
    MissingData(VertexId),
    #[error("vertex {0} carries data but is not on the initial subgraph")]
    DataOffSubgraph(VertexId),
    #[error("equation is not 3D-consistent; implicit regions cannot be resolved")]
    NotConsistent,
    #[error("solution violates the equation on face {0}")]
    Residual(FaceId),
    #[error("vertex {0} is left undetermined")]
    Undetermined(VertexId),
    #[error("strip {0} cannot be erased: {1}")]
    NotErasable(usize, String),
    #[error("memo does not match the graph and field")]
    MemoMismatch,
    #[error(transparent)]
    Cauchy(#[from] CauchyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Equation(#[from] EquationError),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Shuffles the order in which faces are visited; `None` keeps face order.
    pub order_seed: Option<u64>,
    /// Relative face residual accepted in float mode.
    pub float_tol: f64,
    /// Whether to resolve implicit regions through the cube immersion.
    pub cube_fallback: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { order_seed: None, float_tol: 1e-9, cube_fallback: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Propagation<T> {
    pub solution: FieldSolution<T>,
    /// Vertices found from a face with three known corners.
    pub explicit_steps: usize,
    /// Corner solves performed on the cube.
    pub cube_steps: usize,
    pub used_cube: bool,
}

/// Faces around each vertex.
pub fn vertex_faces(g: &QuadGraph) -> Vec<Vec<FaceId>> {
    let mut vf = vec![Vec::new(); g.vertex_count()];
    for (f, q) in g.faces().iter().enumerate() {
        for &v in q {
            vf[v].push(f);
        }
    }
    vf
}

/// Repeatedly solves faces with exactly three known corners. Returns the
/// number of vertices assigned.
pub fn greedy_closure<T: Scalar>(
    g: &QuadGraph,
    eq: &EquationDef,
    sol: &mut FieldSolution<T>,
    order: &[FaceId],
) -> Result<usize, SolveError> {
    let vf = vertex_faces(g);
    let mut queue: VecDeque<FaceId> = order.iter().copied().collect();
    let mut count = 0;
    while let Some(f) = queue.pop_front() {
        let q = g.face(f);
        let unknown: Vec<usize> = (0..4).filter(|&k| !sol.is_assigned(q[k])).collect();
        if unknown.len() != 1 {
            continue;
        }
        let k = unknown[0];
        let (a1, a2) = g.face_params(f);
        let zero = T::zero();
        let val = |i: usize| if i == k { &zero } else { sol.get(q[i]).unwrap() };
        // corners in slot order (v, v1, v2, v12) from face order (v, v1, v12, v2)
        let corners = [val(0), val(1), val(3), val(2)];
        let x = eq
            .solve_corner(Corner::at_face_position(k), corners, &T::from_rational(a1), &T::from_rational(a2))
            .map_err(|_| SolveError::Singular(Some(f)))?;
        sol.set(q[k], x, Provenance::Propagated);
        count += 1;
        queue.extend(vf[q[k]].iter().copied().filter(|&h| h != f));
    }
    Ok(count)
}

fn face_order(g: &QuadGraph, seed: Option<u64>) -> Vec<FaceId> {
    let mut order: Vec<FaceId> = (0..g.face_count()).collect();
    if let Some(s) = seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
    }
    order
}

/// Checks that `data` assigns exactly the vertices of `p`.
fn check_data<T: Scalar>(p: &InitialSubgraph, data: &FieldSolution<T>) -> Result<(), SolveError> {
    if let Some(v) = p.vertices().find(|&v| !data.is_assigned(v)) {
        return Err(SolveError::MissingData(v));
    }
    if let Some((v, _)) = data.iter().find(|(v, x)| x.is_some() && !p.contains_vertex(*v)) {
        return Err(SolveError::DataOffSubgraph(v));
    }
    Ok(())
}

/// Final check that every face is satisfied.
pub fn check_solution<T: Scalar>(g: &QuadGraph, eq: &EquationDef, sol: &FieldSolution<T>, tol: f64) -> Result<(), SolveError> {
    if let Some((v, _)) = sol.iter().find(|(_, x)| x.is_none()) {
        return Err(SolveError::Undetermined(v));
    }
    match violated_faces(g, eq, sol, tol).first() {
        Some(&f) => Err(SolveError::Residual(f)),
        None => Ok(()),
    }
}

/// Solves a correct initial value problem.
///
/// Faces with three known corners are solved first. If that stalls (an
/// implicit region), the graph is mapped into the cube spanned by its strips,
/// where the staircase image of the path makes every step explicit; only the
/// cube vertices actually needed are evaluated.
pub fn propagate<T: Scalar>(
    g: &QuadGraph,
    eq: &EquationDef,
    p: &InitialSubgraph,
    data: &FieldSolution<T>,
    opts: &SolveOptions,
) -> Result<Propagation<T>, SolveError> {
    if data.len() != g.vertex_count() {
        return Err(SolveError::Graph(GraphError::LengthMismatch { expected: g.vertex_count(), got: data.len() }));
    }
    check_data(p, data)?;
    if classify_ivp(g, p)?.verdict != Verdict::Correct {
        return Err(CauchyError::NotCorrectIvp.into());
    }
    let mut sol = data.clone();
    let explicit_steps = greedy_closure(g, eq, &mut sol, &face_order(g, opts.order_seed))?;
    let mut cube_steps = 0;
    let used_cube = !sol.is_total();
    if used_cube {
        if !opts.cube_fallback {
            let v = sol.iter().find(|(_, x)| x.is_none()).unwrap().0;
            return Err(SolveError::Undetermined(v));
        }
        if !eq.consistent_3d {
            return Err(SolveError::NotConsistent);
        }
        let im = hypercube_immersion(g, p)?;
        let params = im.strip_of_index().iter().map(|&s| T::from_rational(g.strip_param(s))).collect();
        let mut cube = CubeEvaluator::new(eq, params);
        for (v, x) in sol.iter() {
            if let Some(x) = x {
                cube.insert(im.coord(v).clone(), x.clone());
            }
        }
        for v in 0..g.vertex_count() {
            if !sol.is_assigned(v) {
                let x = cube.evaluate(im.coord(v))?;
                sol.set(v, x, Provenance::Propagated);
            }
        }
        cube_steps = cube.steps();
    }
    check_solution(g, eq, &sol, opts.float_tol)?;
    Ok(Propagation { solution: sol, explicit_steps, cube_steps, used_cube })
}

/// Initial data on the vertices of a path.
pub fn path_data<T: Scalar>(g: &QuadGraph, path: &[VertexId], values: &[T]) -> Result<FieldSolution<T>, SolveError> {
    if path.len() != values.len() {
        return Err(GraphError::LengthMismatch { expected: path.len(), got: values.len() }.into());
    }
    let mut data = FieldSolution::empty(g.vertex_count());
    for (&v, x) in path.iter().zip(values) {
        data.set(v, x.clone(), Provenance::Initial);
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::lattice::{gen_square_lattice, homogeneous_lattice, lattice_index, lattice_path};
    use crate::scalar::{rat, ratio, Rational};

    fn solve_on(g: &QuadGraph, eq: &EquationDef, path: &[VertexId], values: &[Rational], seed: Option<u64>) -> Result<Propagation<Rational>, SolveError> {
        let p = InitialSubgraph::from_path(g, path).unwrap();
        let data = path_data(g, path, values).unwrap();
        propagate(g, eq, &p, &data, &SolveOptions { order_seed: seed, ..Default::default() })
    }

    fn at(g: &QuadGraph, m: i64, n: i64) -> VertexId {
        lattice_index(g)[&vec![m, n]]
    }

    #[test]
    fn l_path_matches_explicit_recurrence() {
        let (w, h) = (3, 3);
        let g = homogeneous_lattice(w, h, rat(2), rat(1)).unwrap();
        // walked from (3, 0); starting at (0, 3) this data hits a zero denominator
        let path = lattice_path(&g, &[[3, 0], [0, 0], [0, 3]]).unwrap();
        let vals: Vec<Rational> = [0, 1, 2, 3, 1, 2, 3].map(rat).to_vec();
        let r = solve_on(&g, &EquationDef::dkdv(), &path, &vals, None).unwrap();
        assert!(!r.used_cube);

        // v(m+1, n+1) = v(m, n) + (α - β) / (v(m+1, n) - v(m, n+1))
        let mut v = vec![vec![rat(0); h + 1]; w + 1];
        for m in 0..=w {
            v[m][0] = vals[w - m].clone();
        }
        for n in 0..=h {
            v[0][n] = vals[w + n].clone();
        }
        for m in 0..w {
            for n in 0..h {
                v[m + 1][n + 1] = &v[m][n] + rat(1) / (&v[m + 1][n] - &v[m][n + 1]);
            }
        }
        for m in 0..=w {
            for n in 0..=h {
                assert_eq!(r.solution.get(at(&g, m as i64, n as i64)), Some(&v[m][n]));
            }
        }
    }

    #[test]
    fn wave_on_axes_is_a_sum() {
        let g = gen_square_lattice(4, 3, &[rat(1), rat(2), rat(3), rat(4)], &[rat(5), rat(6), rat(7)]).unwrap();
        let path = lattice_path(&g, &[[0, 3], [0, 0], [4, 0]]).unwrap();
        let vals: Vec<Rational> = (0..path.len() as i64).map(|i| ratio(i * i - 3, 2)).collect();
        let r = solve_on(&g, &EquationDef::wave(), &path, &vals, None).unwrap();
        let s = &r.solution;
        for m in 0..=4 {
            for n in 0..=3 {
                let expected = s.get(at(&g, m, 0)).unwrap() + s.get(at(&g, 0, n)).unwrap() - s.get(at(&g, 0, 0)).unwrap();
                assert_eq!(s.get(at(&g, m, n)), Some(&expected));
            }
        }
    }

    #[test]
    fn implicit_region_uses_the_cube() {
        let spec = fixtures::transparent_defect();
        let d = fixtures::defect_in_host(&spec, 3, 3, rat(3), rat(1)).unwrap();
        let path = lattice_path(&d.graph, &[[0, 0], [3, 0], [3, 3]]).unwrap();
        let vals: Vec<Rational> = [5, -2, 7, 1, 4, 9, -3].map(rat).to_vec();
        let r = solve_on(&d.graph, &EquationDef::dkdv(), &path, &vals, None).unwrap();
        assert!(r.used_cube && r.cube_steps > 0);
        let inner = |p: [i64; 2]| d.points[&[20 + p[0], 20 + p[1]]];
        let (u, w) = (inner([7, 7]), inner([13, 13]));
        let s = &r.solution;
        assert_eq!(s.get(u), s.get(d.at(2, 2).unwrap()));
        assert_eq!(s.get(w), s.get(d.at(1, 1).unwrap()));
    }

    #[test]
    fn face_order_does_not_matter() {
        let f = fixtures::lattice_with_l_and_staircase();
        let path = f.path("staircase");
        let vals: Vec<Rational> = (0..path.len() as i64).map(|i| ratio(3 * i * i + 1, i + 2)).collect();
        let eq = EquationDef::dkdv();
        let first = solve_on(&f.graph, &eq, path, &vals, None).unwrap().solution;
        for seed in 0..5 {
            assert_eq!(solve_on(&f.graph, &eq, path, &vals, Some(seed)).unwrap().solution, first);
        }
    }

    #[test]
    fn incorrect_problem_is_refused() {
        let g = homogeneous_lattice(2, 2, rat(2), rat(1)).unwrap();
        let path = lattice_path(&g, &[[0, 0], [2, 0]]).unwrap();
        let err = solve_on(&g, &EquationDef::dkdv(), &path, &[rat(0), rat(1), rat(2)], None).unwrap_err();
        assert_eq!(err, SolveError::Cauchy(CauchyError::NotCorrectIvp));
    }

    #[test]
    fn singular_data_reports_the_face() {
        let g = homogeneous_lattice(1, 1, rat(2), rat(1)).unwrap();
        // v1 = v2 makes the dKdV step divide by zero
        let err = solve_on(&g, &EquationDef::dkdv(), &[1, 0, 2], &[rat(4), rat(0), rat(4)], None).unwrap_err();
        assert_eq!(err, SolveError::Singular(Some(0)));
    }

    #[test]
    fn floats_agree_with_rationals() {
        let f = fixtures::lattice_with_l_and_staircase();
        let path = f.path("l-path");
        let vals: Vec<Rational> = (0..path.len() as i64).map(|i| ratio(i * 7 % 5 + i, 3)).collect();
        let eq = EquationDef::dkdv();
        let exact = solve_on(&f.graph, &eq, path, &vals, None).unwrap().solution;
        let fv: Vec<f64> = vals.iter().map(f64::from_rational).collect();
        let p = InitialSubgraph::from_path(&f.graph, path).unwrap();
        let approx = propagate(&f.graph, &eq, &p, &path_data(&f.graph, path, &fv).unwrap(), &SolveOptions::default()).unwrap();
        for v in 0..f.graph.vertex_count() {
            let (a, b) = (f64::from_rational(exact.get(v).unwrap()), *approx.solution.get(v).unwrap());
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{a} vs {b}");
        }
    }
}
