use super::{KinkSpec, SolitonError};
use crate::equations::EquationDef;
use crate::field::{face_residual, max_relative_residual, FieldSolution, Provenance};
use crate::graph::lattice::{lattice_index, DefectedLattice, FINE};
use crate::graph::zd::{edge_axis, with_axis_params};
use crate::graph::QuadGraph;
use crate::scalar::{Rational, Scalar};
use num_traits::ToPrimitive;
use crate::solver::{defect_experiment, SolveError, SolveOptions};

/// Evaluates `f` at the lattice coordinate of every vertex.
pub fn sample_field<F>(g: &QuadGraph, f: F) -> Result<FieldSolution<f64>, SolitonError>
where
    F: Fn(&[i64]) -> Result<f64, SolitonError>,
{
    let values = (0..g.vertex_count())
        .map(|v| {
            let site = g.vertex(v).lattice.as_ref().ok_or(SolitonError::MissingCoordinate(v))?;
            f(site)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FieldSolution::from_values(values, Provenance::Initial))
}

pub fn kink_field(g: &QuadGraph, spec: &KinkSpec) -> Result<FieldSolution<f64>, SolitonError> {
    sample_field(g, |s| spec.kink_value(s))
}

/// Sets every strip parameter from the axis and position of its edges, as
/// `param(axis, n)` for edges from `n` to `n + 1`. Parameters are stored as
/// the exact rationals of the given floats.
pub fn assign_kink_params<F>(g: QuadGraph, param: F) -> Result<QuadGraph, SolitonError>
where
    F: Fn(usize, i64) -> Result<f64, SolitonError>,
{
    for (v, &[a, b]) in g.edges().iter().enumerate() {
        let (axis, n) = edge_axis(&g, a, b).ok_or(SolitonError::MissingCoordinate(v))?;
        param(axis, n)?;
    }
    Ok(with_axis_params(g, |axis, n| {
        let x = param(axis, n).expect("checked above");
        Rational::from_float(x).expect("finite parameter")
    }))
}

/// Face residuals of a float field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldCheck {
    pub faces: usize,
    pub max_abs: f64,
    /// Largest residual relative to the largest term of its face polynomial.
    pub max_relative: f64,
}

pub fn verify_field(g: &QuadGraph, eq: &EquationDef, sol: &FieldSolution<f64>) -> FieldCheck {
    let max_abs = (0..g.face_count())
        .filter_map(|f| face_residual(g, eq, sol, f))
        .map(f64::abs)
        .fold(0.0, f64::max);
    FieldCheck { faces: g.face_count(), max_abs, max_relative: max_relative_residual(g, eq, sol) }
}

/// Value and largest term magnitude of the quartic equation for `u = −2 v_x`:
///
/// ```text
/// ¼(u₁₂ − u)²(u₁ − u₂)² − (α − β)(u₁₂ − u)(u₁ − u₂)(u + u₁ + u₂ + u₁₂)
///   + (α − β)²((u₁₂ − u)² + (u₁ − u₂)²) + 2(α² − β²)(u₁₂ − u)(u₁ − u₂) = 0
/// ```
pub fn u_equation_residual(u: f64, u1: f64, u2: f64, u12: f64, alpha: f64, beta: f64) -> (f64, f64) {
    let (d, e) = (u12 - u, u1 - u2);
    let g = alpha - beta;
    let terms = [
        0.25 * d * d * e * e,
        -g * d * e * (u + u1 + u2 + u12),
        g * g * (d * d + e * e),
        2.0 * (alpha * alpha - beta * beta) * d * e,
    ];
    let scale = terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
    (terms.iter().sum(), scale)
}

/// Residuals of the `u` equation on every face of a ℤᵈ graph, with face
/// parameters taken from [`KinkSpec::u_param`]. Relative residuals are
/// measured against the largest term, floored at `k⁴ (|α| + |β|)²` so that
/// faces far from the soliton, where every term is tiny, do not dominate.
pub fn verify_u_equation(g: &QuadGraph, spec: &KinkSpec, u: &FieldSolution<f64>) -> Result<FieldCheck, SolitonError> {
    let mut max_abs: f64 = 0.0;
    let mut max_relative: f64 = 0.0;
    for f in 0..g.face_count() {
        let [v, v1, v12, v2] = g.face(f);
        let param = |a: usize, b: usize| {
            let (axis, n) = edge_axis(g, a, b).ok_or(SolitonError::MissingCoordinate(a))?;
            spec.u_param(axis, n)
        };
        let (alpha, beta) = (param(v, v1)?, param(v, v2)?);
        let val = |x| *u.get(x).expect("u assigned everywhere");
        let (r, scale) = u_equation_residual(val(v), val(v1), val(v2), val(v12), alpha, beta);
        let floor = spec.k().powi(4) * (alpha.abs() + beta.abs()).powi(2);
        max_abs = max_abs.max(r.abs());
        max_relative = max_relative.max(r.abs() / scale.max(floor).max(f64::MIN_POSITIVE));
    }
    Ok(FieldCheck { faces: g.face_count(), max_abs, max_relative })
}

/// A kink solved through a defected lattice from its values on the axes.
#[derive(Clone, Debug)]
pub struct KinkDefectReport {
    pub compared: usize,
    /// Largest difference from the same problem solved without the defect.
    pub max_vs_plain: f64,
    /// Largest difference from the closed form.
    pub max_vs_formula: f64,
    /// Mean phase offset `atanh((seed − v)/k) − phase` beyond the defect
    /// (above or to the right of it), over sites where it is well conditioned.
    pub mean_phase_shift: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum KinkDefectError {
    #[error(transparent)]
    Soliton(#[from] SolitonError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Solves the lattice with and without the defect from kink values on the
/// left column and bottom row, and compares both with the closed form.
///
/// The solves run in exact arithmetic on the rationals nearest the float
/// data: forward propagation of this equation amplifies perturbations by a
/// large factor per step, so float solves drift from the closed form for
/// reasons unrelated to the defect.
pub fn kink_defect_comparison(
    d: &DefectedLattice,
    plain: &QuadGraph,
    spec: &KinkSpec,
    opts: &SolveOptions,
) -> Result<KinkDefectReport, KinkDefectError> {
    let (w, h) = (d.w as i64, d.h as i64);
    let corners = [[w, 0], [0, 0], [0, h]];
    let data: Vec<Rational> = (0..=w)
        .rev()
        .map(|m| [m, 0])
        .chain((1..=h).map(|n| [0, n]))
        .map(|s| Ok(Rational::from_float(spec.kink_value(&s)?).expect("finite kink value")))
        .collect::<Result<_, SolitonError>>()?;
    let cmp = defect_experiment(d, plain, &EquationDef::dkdv(), &corners, &data, opts)?;
    let idx = lattice_index(plain);
    let inside = d.inside();
    let r = d.rect;
    let (mut max_vs_plain, mut max_vs_formula) = (0.0f64, 0.0f64);
    let mut shifts = Vec::new();
    let mut compared = 0;
    for (p, &v) in &d.points {
        if inside.contains(&v) || p[0] % FINE != 0 || p[1] % FINE != 0 {
            continue;
        }
        let site = [p[0] / FINE, p[1] / FINE];
        let Some(&u) = idx.get(site.as_slice()) else { continue };
        compared += 1;
        let exact = cmp.defected.get(v).expect("solved");
        let here = exact.to_f64().unwrap_or(f64::NAN);
        let there = cmp.plain.get(u).expect("solved");
        max_vs_plain = max_vs_plain.max((exact - there).magnitude());
        let (seed, phase) = spec.seed_and_phase(&site)?;
        max_vs_formula = max_vs_formula.max((here - (seed - spec.k() * phase.tanh())).abs());
        let beyond = site[0] > r.m0 + r.w || site[1] > r.n0 + r.h;
        let t = (seed - here) / spec.k();
        if beyond && phase.turns == 0 && t.abs() < 0.99 {
            shifts.push(t.atanh() - phase.re);
        }
    }
    let mean_phase_shift = (!shifts.is_empty()).then(|| shifts.iter().sum::<f64>() / shifts.len() as f64);
    Ok(KinkDefectReport { compared, max_vs_plain, max_vs_formula, mean_phase_shift })
}
