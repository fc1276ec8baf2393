//! Transition matrices of the discrete KdV equation.
//!
//! Along an edge `i → j` with parameter `α` the field is transported by
//!
//! ```text
//! L(j, i) = [ -v_i   v_i v_j + α - λ ]
//!           [ -1     v_j             ]
//! ```
//!
//! The product over two edges of a face does not depend on which pair is
//! taken, and `L(i, j) L(j, i) = (λ − α) I`. Consequently the product around
//! a closed walk is the scalar `∏_C (λ − α_C)^{ind(C)/2}` and a product along
//! one path can be refactorized along another path crossing the same strips,
//! which recovers the field there. Products multiply on the left: the matrix
//! of the last edge stands leftmost.
//!
//! Everything is exact; `λ` stays symbolic.

mod poly;

pub use poly::Poly;

use crate::field::FieldSolution;
use crate::graph::lattice::{lattice_path, DefectedLattice};
use crate::graph::{EdgeId, GraphError, QuadGraph, StripId, VertexId};
use crate::scalar::{rat, Rational};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaxError {
    #[error("vertices {0} and {1} are not joined by an edge")]
    NotAnEdge(VertexId, VertexId),
    #[error("no field value at vertex {0}")]
    Unassigned(VertexId),
    #[error("rank of the product at λ = {alpha} is not one (refactorization step {step}); special solution")]
    RankDrop { step: usize, alpha: Rational },
    #[error("product is not divisible by λ − {alpha} at refactorization step {step}")]
    NonDivisible { step: usize, alpha: Rational },
    #[error("closed walk crosses strip {0} an odd number of times")]
    OddClosedIndex(StripId),
    #[error("paths do not start and end at the same vertices")]
    EndpointMismatch,
    #[error("strip {0} is crossed a different number of times by the two paths, or more than once")]
    IndexMismatch(StripId),
    #[error("defect is not weak (strip {0:?} changes direction)")]
    NotWeak(Option<StripId>),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A 2×2 matrix of polynomials in `λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix2 {
    pub m: [[Poly; 2]; 2],
}

impl PolyMatrix2 {
    pub fn identity() -> Self {
        Self::scalar(Poly::one())
    }

    pub fn scalar(p: Poly) -> Self {
        PolyMatrix2 { m: [[p.clone(), Poly::zero()], [Poly::zero(), p]] }
    }

    pub fn mul(&self, o: &PolyMatrix2) -> PolyMatrix2 {
        let e = |i: usize, j: usize| &(&self.m[i][0] * &o.m[0][j]) + &(&self.m[i][1] * &o.m[1][j]);
        PolyMatrix2 { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    pub fn det(&self) -> Poly {
        &(&self.m[0][0] * &self.m[1][1]) - &(&self.m[0][1] * &self.m[1][0])
    }

    pub fn eval(&self, lambda: &Rational) -> [[Rational; 2]; 2] {
        let e = |i: usize, j: usize| self.m[i][j].eval(lambda);
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }

    /// The common diagonal entry when the matrix is a scalar multiple of the identity.
    pub fn as_scalar(&self) -> Option<&Poly> {
        (self.m[0][1].is_zero() && self.m[1][0].is_zero() && self.m[0][0] == self.m[1][1]).then_some(&self.m[0][0])
    }

    /// Largest entry degree; `None` for the zero matrix.
    pub fn degree(&self) -> Option<usize> {
        self.m.iter().flatten().filter_map(Poly::degree).max()
    }

    /// Divides every entry by `λ − a`, failing if any remainder is nonzero.
    pub fn div_linear(&self, a: &Rational) -> Option<PolyMatrix2> {
        let mut out = self.m.clone();
        for (i, row) in self.m.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                let (q, r) = p.div_linear(a);
                if !r.is_zero() {
                    return None;
                }
                out[i][j] = q;
            }
        }
        Some(PolyMatrix2 { m: out })
    }
}

/// The transition matrix `L(j, i)` of an edge from a vertex with value `vi`
/// to one with value `vj`.
pub fn edge_matrix(vi: &Rational, vj: &Rational, alpha: &Rational) -> PolyMatrix2 {
    let c = |x: Rational| Poly::constant(x);
    let corner = Poly::new(vec![vi * vj + alpha, rat(-1)]);
    PolyMatrix2 { m: [[c(-vi.clone()), corner], [c(rat(-1)), c(vj.clone())]] }
}

/// Ordered product of transition matrices along a walk.
#[derive(Clone, Debug, PartialEq)]
pub struct PathProduct {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub matrix: PolyMatrix2,
    /// Number of walk steps crossing each strip, indexed by strip id.
    pub strip_counts: Vec<usize>,
    /// For a closed walk, the scalar `∏ (λ − α_C)^{count/2}` it must equal.
    pub closed_scalar: Option<Poly>,
}

impl PathProduct {
    pub fn is_closed(&self) -> bool {
        self.closed_scalar.is_some()
    }

    /// Whether a closed walk's product equals its predicted scalar matrix.
    pub fn scalar_identity_holds(&self) -> Option<bool> {
        self.closed_scalar.as_ref().map(|s| self.matrix.as_scalar() == Some(s))
    }

    /// Edge parameters in walking order.
    pub fn params<'a>(&self, g: &'a QuadGraph) -> Vec<&'a Rational> {
        self.edges.iter().map(|&e| g.edge_param(e)).collect()
    }
}

/// Multiplies the edge matrices along a walk given by consecutive vertices.
/// A walk of at least one step returning to its start is closed; its product
/// is compared with the scalar predicted from the strip counts.
pub fn path_product(g: &QuadGraph, sol: &FieldSolution<Rational>, walk: &[VertexId]) -> Result<PathProduct, LaxError> {
    let value = |v: VertexId| sol.get(v).ok_or(LaxError::Unassigned(v));
    let mut matrix = PolyMatrix2::identity();
    let mut edges = Vec::with_capacity(walk.len().saturating_sub(1));
    let mut strip_counts = vec![0; g.strips().len()];
    if let Some(&v0) = walk.first() {
        value(v0)?;
    }
    for w in walk.windows(2) {
        let (i, j) = (w[0], w[1]);
        let e = g.edge_between(i, j).ok_or(LaxError::NotAnEdge(i, j))?;
        matrix = edge_matrix(value(i)?, value(j)?, g.edge_param(e)).mul(&matrix);
        strip_counts[g.strip_of_edge(e)] += 1;
        edges.push(e);
    }
    let closed = walk.len() > 1 && walk.first() == walk.last();
    let closed_scalar = if closed {
        let mut s = Poly::one();
        for (c, &n) in strip_counts.iter().enumerate() {
            if n % 2 == 1 {
                return Err(LaxError::OddClosedIndex(c));
            }
            s = &s * &Poly::linear_root(g.strip_param(c)).pow(n / 2);
        }
        Some(s)
    } else {
        None
    };
    Ok(PathProduct { vertices: walk.to_vec(), edges, matrix, strip_counts, closed_scalar })
}

/// Field values recovered by refactorization, with what is left of the product.
#[derive(Clone, Debug, PartialEq)]
pub struct Refactorization {
    /// Starting value followed by one recovered value per step.
    pub values: Vec<Rational>,
    /// The matrix left after peeling every step off; the identity when the
    /// two paths cross the same strips.
    pub remainder: PolyMatrix2,
}

/// Kernel direction `(x, 1)` of a rank-one constant matrix.
fn kernel_value(m: &[[Rational; 2]; 2]) -> Option<Rational> {
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if !det.is_zero() || m.iter().flatten().all(Zero::is_zero) {
        return None;
    }
    let row = if m[0].iter().any(|x| !x.is_zero()) { 0 } else { 1 };
    let [p, q] = &m[row];
    if p.is_zero() {
        // kernel along (1, 0): the value would be infinite
        return None;
    }
    let x = -q / p;
    let [p2, q2] = &m[1 - row];
    assert!((p2 * &x + q2).is_zero(), "rank-one rows disagree on the kernel");
    Some(x)
}

/// Writes `l` as `L̃ · L(i_n, i_{n-1}) ⋯ L(i_1, i_0)` along a path starting at
/// a vertex with value `v0` whose edges carry `params`, recovering the values
/// `v_{i_1}, …, v_{i_n}` one at a time: each is read off the kernel of the
/// current product at `λ = α`, after which the factor is divided out exactly.
pub fn refactorize(l: &PolyMatrix2, v0: &Rational, params: &[&Rational]) -> Result<Refactorization, LaxError> {
    let mut cur = l.clone();
    let mut values = vec![v0.clone()];
    for (step, &alpha) in params.iter().enumerate() {
        let prev = values.last().unwrap().clone();
        let next = kernel_value(&cur.eval(alpha)).ok_or_else(|| LaxError::RankDrop { step, alpha: alpha.clone() })?;
        cur = cur
            .mul(&edge_matrix(&next, &prev, alpha))
            .div_linear(alpha)
            .ok_or_else(|| LaxError::NonDivisible { step, alpha: alpha.clone() })?;
        values.push(next);
    }
    Ok(Refactorization { values, remainder: cur })
}

/// Recovers the field along `target` from its values along `source`, which
/// must share its endpoints and cross each strip exactly as often, at most once.
pub fn refactorize_between(
    g: &QuadGraph,
    sol: &FieldSolution<Rational>,
    source: &[VertexId],
    target: &[VertexId],
) -> Result<(PathProduct, Refactorization), LaxError> {
    if source.first() != target.first() || source.last() != target.last() {
        return Err(LaxError::EndpointMismatch);
    }
    let prod = path_product(g, sol, source)?;
    let mut counts = vec![0usize; g.strips().len()];
    let mut params = Vec::with_capacity(target.len().saturating_sub(1));
    for w in target.windows(2) {
        let e = g.edge_between(w[0], w[1]).ok_or(LaxError::NotAnEdge(w[0], w[1]))?;
        counts[g.strip_of_edge(e)] += 1;
        params.push(g.edge_param(e));
    }
    if let Some(c) = (0..counts.len()).find(|&c| counts[c] != prod.strip_counts[c] || counts[c] > 1) {
        return Err(LaxError::IndexMismatch(c));
    }
    let v0 = sol.get(source[0]).ok_or(LaxError::Unassigned(source[0]))?;
    let r = refactorize(&prod.matrix, v0, &params)?;
    Ok((prod, r))
}

/// Outcome of recovering the far sides of a defect from its near sides.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectLaxReport {
    /// Bottom then left side, from the lower right corner to the upper left.
    pub near: Vec<VertexId>,
    /// Right then top side, between the same corners.
    pub far: Vec<VertexId>,
    pub recovered: Vec<Rational>,
    pub expected: Vec<Rational>,
    pub remainder_is_identity: bool,
}

impl DefectLaxReport {
    pub fn matches(&self) -> bool {
        self.recovered == self.expected && self.remainder_is_identity
    }
}

/// Refactorizes the transition matrix along the two sides of the defect
/// rectangle facing data on the axes into a product along the two far sides.
/// The interior of the defect is never consulted.
pub fn weak_defect_lax_check(d: &DefectedLattice, sol: &FieldSolution<Rational>) -> Result<DefectLaxReport, LaxError> {
    let w = d.weakness();
    if !w.weak {
        return Err(LaxError::NotWeak(w.witness));
    }
    let r = d.rect;
    let (x0, y0, x1, y1) = (r.m0, r.n0, r.m0 + r.w, r.n0 + r.h);
    let near = lattice_path(&d.graph, &[[x1, y0], [x0, y0], [x0, y1]])?;
    let far = lattice_path(&d.graph, &[[x1, y0], [x1, y1], [x0, y1]])?;
    let (_, fact) = refactorize_between(&d.graph, sol, &near, &far)?;
    let expected = far
        .iter()
        .map(|&v| sol.get(v).cloned().ok_or(LaxError::Unassigned(v)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DefectLaxReport {
        near,
        far,
        remainder_is_identity: fact.remainder == PolyMatrix2::identity(),
        recovered: fact.values,
        expected,
    })
}
