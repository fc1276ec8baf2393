use super::{Corner, EquationDef, EquationError};
use crate::field::{FieldSolution, Provenance};
use crate::graph::{QuadGraph, VertexId};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct BacklundResult<T> {
    pub values: FieldSolution<T>,
    pub lambda: T,
    pub seed: VertexId,
    pub seed_value: T,
}

fn value<T: Scalar>(sol: &FieldSolution<T>, v: VertexId) -> Result<&T, EquationError> {
    sol.get(v).ok_or(EquationError::Unassigned(v))
}

/// One step `v̄_i → v̄_j` across the edge `(i, j)`.
pub(crate) fn backlund_step<T: Scalar>(
    g: &QuadGraph,
    eq: &EquationDef,
    sol: &FieldSolution<T>,
    (i, j): (VertexId, VertexId),
    bar_i: &T,
    lambda: &T,
    strict: bool,
) -> Result<T, EquationError> {
    let e = g.edge_between(i, j).expect("step along an edge");
    let alpha = T::from_rational(g.edge_param(e));
    let (vi, vj) = (value(sol, i)?, value(sol, j)?);
    if strict {
        let [a, b, c, d] = eq.edge_map(vi, vj, &alpha, lambda);
        if (a * d - b * c).is_negligible(&T::one()) {
            return Err(EquationError::DegenerateEdgeMap(i, j));
        }
    }
    eq.solve_corner(Corner::V12, [vi, vj, bar_i, &T::zero()], &alpha, lambda)
}

/// Relative residual accepted for float fields.
const FLOAT_TOL: f64 = 1e-9;

/// Exact zero, or for floats small against the largest term of `Q`.
fn negligible<T: Scalar>(eq: &EquationDef, x: &[T; 6]) -> bool {
    let r = eq.polynomial().eval(x);
    if T::EXACT {
        r.is_negligible(&T::one())
    } else {
        r.magnitude() <= FLOAT_TOL * eq.polynomial().term_scale(x).max(1.0)
    }
}

/// New solution from `Q(v_i, v_j, v̄_i, v̄_j; α_ij, λ) = 0` on every edge,
/// propagated along a breadth-first tree and then checked on all edges and faces.
pub fn backlund_transform<T: Scalar>(
    g: &QuadGraph,
    eq: &EquationDef,
    sol: &FieldSolution<T>,
    seed: VertexId,
    seed_value: T,
    lambda: T,
) -> Result<BacklundResult<T>, EquationError> {
    backlund_transform_with(g, eq, sol, seed, seed_value, lambda, true)
}

/// As [`backlund_transform`]; with `strict = false` degenerate edge maps are
/// accepted as long as each individual solve is regular.
pub fn backlund_transform_with<T: Scalar>(
    g: &QuadGraph,
    eq: &EquationDef,
    sol: &FieldSolution<T>,
    seed: VertexId,
    seed_value: T,
    lambda: T,
    strict: bool,
) -> Result<BacklundResult<T>, EquationError> {
    let mut bar = FieldSolution::empty(g.vertex_count());
    bar.set(seed, seed_value.clone(), Provenance::Initial);
    for (v, parent) in g.bfs_tree(seed) {
        if let Some(p) = parent {
            let x = backlund_step(g, eq, sol, (p, v), bar.get(p).expect("parent first"), &lambda, strict)?;
            bar.set(v, x, Provenance::Propagated);
        }
    }
    for &[i, j] in g.edges() {
        let e = g.edge_between(i, j).unwrap();
        let alpha = T::from_rational(g.edge_param(e));
        let x = [value(sol, i)?.clone(), value(sol, j)?.clone(), value(&bar, i)?.clone(), value(&bar, j)?.clone(), alpha, lambda.clone()];
        if !negligible(eq, &x) {
            return Err(EquationError::PathDependent(i, j));
        }
    }
    for f in 0..g.face_count() {
        let r = crate::field::face_residual(g, eq, &bar, f).expect("total field");
        let rel = crate::field::relative_face_residual(g, eq, &bar, f).expect("total field");
        if if T::EXACT { !r.is_negligible(&T::one()) } else { rel > FLOAT_TOL } {
            let [a, b, ..] = g.face(f);
            return Err(EquationError::PathDependent(a, b));
        }
    }
    Ok(BacklundResult { values: bar, lambda, seed, seed_value })
}

/// `v̄` at the end of a walk, computed only along that walk.
pub fn backlund_along_path<T: Scalar>(
    g: &QuadGraph,
    eq: &EquationDef,
    sol: &FieldSolution<T>,
    path: &[VertexId],
    seed_value: T,
    lambda: &T,
) -> Result<T, EquationError> {
    let mut bar = seed_value;
    for w in path.windows(2) {
        bar = backlund_step(g, eq, sol, (w[0], w[1]), &bar, lambda, true)?;
    }
    Ok(bar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::lattice::homogeneous_lattice;
    use crate::scalar::{rat, Rational};

    fn one_face() -> (QuadGraph, FieldSolution<Rational>) {
        // ids: 0=(0,0) v, 1=(0,1) v2, 2=(1,0) v1, 3=(1,1) v12
        let g = homogeneous_lattice(1, 1, rat(3), rat(1)).unwrap();
        let sol = FieldSolution::from_values(vec![rat(0), rat(2), rat(1), rat(-2)], Provenance::Initial);
        (g, sol)
    }

    #[test]
    fn one_face_transform_closes() {
        let (g, sol) = one_face();
        let eq = EquationDef::dkdv();
        let r = backlund_transform(&g, &eq, &sol, 0, rat(5), rat(0)).unwrap();
        // v̄_j = v_i + (α_ij - λ)/(v_j - v̄_i) from the seed: v1 = 0 + 3/(1-5)
        assert_eq!(r.values.get(2), Some(&crate::scalar::ratio(-3, 4)));
        assert!(r.values.is_total());
    }

    #[test]
    fn wave_transform_is_a_shift() {
        let g = homogeneous_lattice(2, 2, rat(3), rat(1)).unwrap();
        let eq = EquationDef::wave();
        let vals: Vec<Rational> = (0..9).map(|i| rat((i % 3) + 2 * (i / 3))).collect();
        let sol = FieldSolution::from_values(vals.clone(), Provenance::Initial);
        let r = backlund_transform(&g, &eq, &sol, 4, vals[4].clone() + rat(7), rat(2)).unwrap();
        for (v, x) in vals.iter().enumerate() {
            assert_eq!(r.values.get(v).unwrap(), &(x + rat(7)));
        }
    }

    #[test]
    fn lambda_on_strip_parameter_is_degenerate() {
        let (g, sol) = one_face();
        let eq = EquationDef::dkdv();
        let err = backlund_transform(&g, &eq, &sol, 0, rat(5), rat(3)).unwrap_err();
        assert!(matches!(err, EquationError::DegenerateEdgeMap(..)));
    }
}
