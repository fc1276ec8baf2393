//! Quad-equations `Q(v, v1, v2, v12; α1, α2) = 0`.
//!
//! An [`EquationDef`] wraps a polynomial and records the properties checked at
//! registration: degree one in every field variable, the D4 symmetry signs,
//! 3D consistency, independence of `v123` from `v`, and whether the equation
//! factorises when both parameters coincide.

mod backlund;
mod poly;

pub(crate) use backlund::backlund_step;
pub use backlund::{backlund_along_path, backlund_transform, backlund_transform_with, BacklundResult};
pub use poly::{Corner, QuadPolynomial, NVARS, PARAM1, PARAM2};

use crate::scalar::{random_rational, rat, Rational, Scalar};
use crate::graph::VertexId;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquationError {
    #[error("singular corner solve for {corner:?} (non-generic data)")]
    Singular { corner: Corner },
    #[error("Q has degree {degree} in field slot {slot}; degree one is required")]
    NotDegreeOne { slot: usize, degree: u8 },
    #[error("Q is not D4-symmetric")]
    NotD4Symmetric,
    #[error("edge map ({0}, {1}) is degenerate for this Bäcklund parameter")]
    DegenerateEdgeMap(VertexId, VertexId),
    #[error("Bäcklund values disagree on edge ({0}, {1})")]
    PathDependent(VertexId, VertexId),
    #[error("field is not assigned at vertex {0}")]
    Unassigned(VertexId),
    #[error("unknown equation {0:?}")]
    UnknownEquation(String),
}

/// A registered quad-equation.
#[derive(Clone, Debug)]
pub struct EquationDef {
    pub name: String,
    q: QuadPolynomial,
    linear: [(QuadPolynomial, QuadPolynomial); 4],
    /// Sign for swapping the two directions, `Q(v,v2,v1,v12;α2,α1) = ε Q`.
    pub epsilon: i8,
    /// Sign for the reflection `Q(v1,v,v12,v2;α1,α2) = σ Q`.
    pub sigma: i8,
    pub consistent_3d: bool,
    pub v_independent_v123: bool,
    pub degenerate_splitting: bool,
}

const REGISTRATION_SEED: u64 = 0x3d_c0_15;
const SAMPLE_BOUND: i64 = 1000;

fn random_point<R: Rng>(rng: &mut R) -> [Rational; NVARS] {
    std::array::from_fn(|_| random_rational(rng, SAMPLE_BOUND))
}

/// Field variables must each appear with degree exactly one.
pub fn check_degree_one(q: &QuadPolynomial) -> Result<(), EquationError> {
    for c in Corner::ALL {
        let degree = q.degree_in(c.slot());
        if degree != 1 {
            return Err(EquationError::NotDegreeOne { slot: c.slot(), degree });
        }
    }
    Ok(())
}

fn sign_on_samples<R: Rng>(q: &QuadPolynomial, other: &QuadPolynomial, samples: usize, rng: &mut R) -> Option<i8> {
    let mut sign = None;
    for _ in 0..samples {
        let x = random_point(rng);
        let (a, b) = (q.eval(&x), other.eval(&x));
        let s = if a.is_zero() && b.is_zero() {
            continue;
        } else if a == b {
            1
        } else if a == -b {
            -1
        } else {
            return None;
        };
        match sign {
            None => sign = Some(s),
            Some(t) if t != s => return None,
            _ => {}
        }
    }
    sign
}

/// Checks both symmetry identities on random rational samples and returns `(ε, σ)`.
pub fn check_d4_symmetry<R: Rng>(q: &QuadPolynomial, samples: usize, rng: &mut R) -> Result<(i8, i8), EquationError> {
    let swapped = q.permuted([0, 2, 1, 3, 5, 4]);
    let reflected = q.permuted([1, 0, 3, 2, 4, 5]);
    let eps = sign_on_samples(q, &swapped, samples, rng).ok_or(EquationError::NotD4Symmetric)?;
    let sig = sign_on_samples(q, &reflected, samples, rng).ok_or(EquationError::NotD4Symmetric)?;
    Ok((eps, sig))
}

/// Which back face closes the cube last when computing `v123`.
pub const V123_ORDERS: usize = 3;

/// `v123` from initial data at `v, v1, v2, v3`. Order 0 closes the cube on the
/// face through `v1`, order 1 through `v2`, order 2 through `v3`.
#[allow(clippy::too_many_arguments)]
pub fn v123_raw<T: Scalar>(
    q: &QuadPolynomial,
    v: &T,
    vi: [&T; 3],
    alphas: [&T; 3],
    order: usize,
) -> Result<T, EquationError> {
    let solve = |a: &T, b: &T, c: &T, p1: &T, p2: &T| {
        let x = [a.clone(), b.clone(), c.clone(), T::zero(), p1.clone(), p2.clone()];
        q.solve_slot(Corner::V12.slot(), &x).ok_or(EquationError::Singular { corner: Corner::V12 })
    };
    let [v1, v2, v3] = vi;
    let [a1, a2, a3] = alphas;
    let v12 = solve(v, v1, v2, a1, a2)?;
    let v13 = solve(v, v1, v3, a1, a3)?;
    let v23 = solve(v, v2, v3, a2, a3)?;
    match order {
        0 => solve(v1, &v12, &v13, a2, a3),
        1 => solve(v2, &v12, &v23, a1, a3),
        2 => solve(v3, &v13, &v23, a1, a2),
        _ => panic!("order must be 0, 1 or 2"),
    }
}

/// Closed form of `v123` for the discrete potential KdV equation.
pub fn dkdv_v123_closed_form(vi: [&Rational; 3], alphas: [&Rational; 3]) -> Option<Rational> {
    let [v1, v2, v3] = vi;
    let [a1, a2, a3] = alphas;
    let num = (a1 - a2) * v1 * v2 + (a3 - a1) * v3 * v1 + (a2 - a3) * v2 * v3;
    let den = (a3 - a2) * v1 + (a1 - a3) * v2 + (a2 - a1) * v3;
    (!den.is_zero()).then(|| num / den)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport {
    pub trials: usize,
    /// Trials skipped because some corner solve was singular.
    pub non_generic: usize,
    /// Trials where the three orders did not agree.
    pub discrepancies: usize,
    pub max_discrepancy: f64,
    pub v_independent: bool,
}

impl ConsistencyReport {
    pub fn consistent(&self) -> bool {
        self.discrepancies == 0 && self.non_generic < self.trials
    }
}

/// Runs all three computation orders on random rational data.
pub fn check_3d_consistency<R: Rng>(q: &QuadPolynomial, trials: usize, rng: &mut R) -> ConsistencyReport {
    let mut report = ConsistencyReport {
        trials,
        non_generic: 0,
        discrepancies: 0,
        max_discrepancy: 0.0,
        v_independent: true,
    };
    for _ in 0..trials {
        let x: [Rational; 8] = std::array::from_fn(|_| random_rational(rng, SAMPLE_BOUND));
        let [v, v1, v2, v3, a1, a2, a3, v_alt] = &x;
        let run = |v: &Rational| -> Result<Vec<Rational>, EquationError> {
            (0..V123_ORDERS)
                .map(|o| v123_raw(q, v, [v1, v2, v3], [a1, a2, a3], o))
                .collect()
        };
        let Ok(vals) = run(v) else {
            report.non_generic += 1;
            continue;
        };
        let spread = vals
            .iter()
            .map(|a| (a - &vals[0]).abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        if vals.iter().any(|a| a != &vals[0]) {
            report.discrepancies += 1;
            report.max_discrepancy = report.max_discrepancy.max(spread);
        }
        match run(v_alt) {
            Ok(alt) if alt[0] != vals[0] => report.v_independent = false,
            _ => {}
        }
    }
    report
}

/// `Q(α, α)` vanishes on both diagonals `v12 = v` and `v2 = v1`, and not identically.
pub fn check_degenerate_splitting<R: Rng>(q: &QuadPolynomial, samples: usize, rng: &mut R) -> bool {
    let eq = q.with_equal_params();
    if eq.is_zero() {
        return false;
    }
    (0..samples).all(|_| {
        let mut x = random_point(rng);
        let generic = !eq.eval(&x).is_zero();
        let mut y = x.clone();
        x[Corner::V12.slot()] = x[Corner::V.slot()].clone();
        y[Corner::V2.slot()] = y[Corner::V1.slot()].clone();
        generic && eq.eval(&x).is_zero() && eq.eval(&y).is_zero()
    })
}

impl EquationDef {
    /// Validates degree one and D4 symmetry, and records the integrability flags.
    pub fn register(name: &str, q: QuadPolynomial) -> Result<Self, EquationError> {
        check_degree_one(&q)?;
        let mut rng = ChaCha8Rng::seed_from_u64(REGISTRATION_SEED);
        let (epsilon, sigma) = check_d4_symmetry(&q, 32, &mut rng)?;
        let report = check_3d_consistency(&q, 32, &mut rng);
        let degenerate_splitting = check_degenerate_splitting(&q, 16, &mut rng);
        let linear = Corner::ALL.map(|c| q.split_linear(c.slot()).expect("degree checked"));
        Ok(EquationDef {
            name: name.to_string(),
            q,
            linear,
            epsilon,
            sigma,
            consistent_3d: report.consistent(),
            v_independent_v123: report.consistent() && report.v_independent,
            degenerate_splitting,
        })
    }

    /// `(v12 - v)(v1 - v2) = α1 - α2`.
    pub fn dkdv() -> Self {
        static CELL: OnceLock<EquationDef> = OnceLock::new();
        CELL.get_or_init(|| {
            let [v, v1, v2, v12, a1, a2] = QuadPolynomial::vars();
            let q = &(&v12 - &v) * &(&v1 - &v2) - (&a1 - &a2);
            EquationDef::register("dkdv", q).expect("dkdv registers")
        })
        .clone()
    }

    /// `v12 - v1 - v2 + v = 0`.
    pub fn wave() -> Self {
        static CELL: OnceLock<EquationDef> = OnceLock::new();
        CELL.get_or_init(|| {
            let [v, v1, v2, v12, ..] = QuadPolynomial::vars();
            let q = &(&(&v12 - &v1) - &v2) + &v;
            EquationDef::register("wave", q).expect("wave registers")
        })
        .clone()
    }

    pub fn by_name(name: &str) -> Result<Self, EquationError> {
        match name.to_ascii_lowercase().as_str() {
            "dkdv" => Ok(Self::dkdv()),
            "wave" => Ok(Self::wave()),
            _ => Err(EquationError::UnknownEquation(name.to_string())),
        }
    }

    pub fn polynomial(&self) -> &QuadPolynomial {
        &self.q
    }

    pub fn eval<T: Scalar>(&self, corners: [&T; 4], a1: &T, a2: &T) -> T {
        let [v, v1, v2, v12] = corners;
        self.q.eval(&[v.clone(), v1.clone(), v2.clone(), v12.clone(), a1.clone(), a2.clone()])
    }

    /// Solves for `corner`; the entry of `corners` at that position is ignored.
    pub fn solve_corner<T: Scalar>(&self, corner: Corner, corners: [&T; 4], a1: &T, a2: &T) -> Result<T, EquationError> {
        let [v, v1, v2, v12] = corners;
        let x = [v.clone(), v1.clone(), v2.clone(), v12.clone(), a1.clone(), a2.clone()];
        let (a, b) = &self.linear[corner.slot()];
        let av = a.eval(&x);
        if av.is_negligible(&T::one()) {
            return Err(EquationError::Singular { corner });
        }
        Ok(-b.eval(&x) / av)
    }

    pub fn compute_v123<T: Scalar>(&self, v: &T, vi: [&T; 3], alphas: [&T; 3], order: usize) -> Result<T, EquationError> {
        v123_raw(&self.q, v, vi, alphas, order)
    }

    /// Coefficients `(a, b, c, d)` of the edge map `y = (a x + b) / (c x + d)` solving
    /// `Q(v_i, v_j, x, y; α, λ) = 0` for `y`.
    pub fn edge_map<T: Scalar>(&self, vi: &T, vj: &T, alpha: &T, lambda: &T) -> [T; 4] {
        // Q = (p x + q) y + (r x + s)
        let zero = T::zero();
        let one = T::one();
        let at = |x: &T, y: &T| self.eval([vi, vj, x, y], alpha, lambda);
        let s = at(&zero, &zero);
        let r = at(&one, &zero) - s.clone();
        let q = at(&zero, &one) - s.clone();
        let p = at(&one, &one) - s.clone() - r.clone() - q.clone();
        [-r, -s, p, q]
    }
}

/// Small integer helper for tests and fixtures.
pub fn rats<const N: usize>(xs: [i64; N]) -> [Rational; N] {
    xs.map(rat)
}
