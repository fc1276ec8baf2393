//! Closed-form kink solutions of the discrete KdV equation.
//!
//! Along every lattice axis `i` the seed carries amplitudes `a^i_n` and the
//! kink a phase `ν^i_n`, linked by
//! `(a^i_{n+1} − a^i_n) tanh(ν^i_{n+1} − ν^i_n) = k`. The field
//!
//! ```text
//! v(n_1, …, n_d) = Σ a^i_{n_i} + p x + q − k tanh(k x + Σ ν^i_{n_i} + ξ)
//! ```
//!
//! solves the equation on every 2-face of ℤᵈ whose parameters are
//! `α^i_n = (a^i_{n+1} − a^i_n)² − δ`, hence on any quad-graph cut out of ℤᵈ.
//! When `|k|` exceeds a constant step, the phase step picks up `iπ/2`, which
//! turns `tanh` into `coth` on alternate sites; the field stays real.

mod two_kink;
mod verify;

pub use two_kink::TwoKinkSpec;
pub use verify::{
    assign_kink_params, kink_defect_comparison, kink_field, KinkDefectError, sample_field, u_equation_residual, verify_field,
    verify_u_equation, FieldCheck, KinkDefectReport,
};

use crate::graph::VertexId;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolitonError {
    #[error("phase is not real: |k| = {k} against step {step} on axis {axis} at n = {n}")]
    RealityViolation { axis: usize, n: i64, step: f64, k: f64 },
    #[error("site {n} on axis {axis} is outside the tabulated amplitudes")]
    OutOfRange { axis: usize, n: i64 },
    #[error("site has {got} coordinates, the solution has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vertex {0} has no lattice coordinate")]
    MissingCoordinate(VertexId),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("two-kink denominator vanishes")]
    SingularDenominator,
}

/// Amplitudes `a_n` along one axis.
#[derive(Clone, Debug, PartialEq)]
pub enum AxisProfile {
    /// `a_n = slope · n` for every integer `n`.
    Linear { slope: f64 },
    /// `a_0 = 0` and `a_{n+1} − a_n = steps[n]`, for `0 ≤ n ≤ steps.len()`.
    Steps { steps: Vec<f64> },
}

impl AxisProfile {
    /// Profile with `a_n − a_{n−1} = f(n)` for `n = 1..=len`.
    pub fn from_increments(len: usize, f: impl Fn(f64) -> f64) -> Self {
        AxisProfile::Steps { steps: (1..=len).map(|n| f(n as f64)).collect() }
    }

    fn in_range(&self, n: i64) -> bool {
        match self {
            AxisProfile::Linear { .. } => true,
            AxisProfile::Steps { steps } => (0..=steps.len() as i64).contains(&n),
        }
    }

    /// `a_{n+1} − a_n`.
    pub fn step(&self, n: i64) -> Option<f64> {
        match self {
            AxisProfile::Linear { slope } => Some(*slope),
            AxisProfile::Steps { steps } => usize::try_from(n).ok().and_then(|i| steps.get(i).copied()),
        }
    }
}

/// Phase `θ + iπ/2 · turns`; only the parity of `turns` matters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phase {
    pub re: f64,
    pub turns: i64,
}

impl Phase {
    /// `tanh` of the phase: `tanh θ` or, shifted by `iπ/2`, `coth θ`.
    pub fn tanh(self) -> f64 {
        if self.turns.rem_euclid(2) == 0 {
            self.re.tanh()
        } else {
            1.0 / self.re.tanh()
        }
    }

    /// Derivative of [`Phase::tanh`] with respect to `θ`.
    pub fn tanh_derivative(self) -> f64 {
        if self.turns.rem_euclid(2) == 0 {
            1.0 / self.re.cosh().powi(2)
        } else {
            -1.0 / self.re.sinh().powi(2)
        }
    }

    fn add(self, o: Phase) -> Phase {
        Phase { re: self.re + o.re, turns: self.turns + o.turns }
    }

    fn scale(self, n: i64) -> Phase {
        Phase { re: self.re * n as f64, turns: self.turns * n }
    }
}

/// Phase increment `½ log((s + k)/(s − k))` across a step `s`.
fn phase_step(s: f64, k: f64) -> Option<Phase> {
    let r = (s + k) / (s - k);
    if !r.is_finite() || r == 0.0 {
        return None;
    }
    Some(Phase { re: 0.5 * r.abs().ln(), turns: i64::from(r < 0.0) })
}

/// Amplitudes and phases along one axis.
#[derive(Clone, Debug, PartialEq)]
struct AxisTable {
    profile: AxisProfile,
    /// Constant phase step for linear profiles.
    linear_phase: Option<Phase>,
    /// Cumulative `(a_n, ν_n)` for tabulated profiles.
    table: Vec<(f64, Phase)>,
}

impl AxisTable {
    fn new(axis: usize, profile: AxisProfile, k: f64, allow_branch: bool) -> Result<Self, SolitonError> {
        let check = |n: i64, s: f64| -> Result<Phase, SolitonError> {
            let ph = phase_step(s, k).ok_or(SolitonError::RealityViolation { axis, n, step: s, k })?;
            if ph.turns != 0 && !allow_branch {
                return Err(SolitonError::RealityViolation { axis, n, step: s, k });
            }
            Ok(ph)
        };
        match &profile {
            AxisProfile::Linear { slope } => {
                let ph = check(0, *slope)?;
                Ok(AxisTable { profile, linear_phase: Some(ph), table: Vec::new() })
            }
            AxisProfile::Steps { steps } => {
                let mut table = vec![(0.0, Phase { re: 0.0, turns: 0 })];
                for (n, &s) in steps.iter().enumerate() {
                    let ph = check(n as i64, s)?;
                    let (a, nu) = *table.last().unwrap();
                    table.push((a + s, nu.add(ph)));
                }
                Ok(AxisTable { profile, linear_phase: None, table })
            }
        }
    }

    fn at(&self, axis: usize, n: i64) -> Result<(f64, Phase), SolitonError> {
        match (&self.profile, self.linear_phase) {
            (AxisProfile::Linear { slope }, Some(ph)) => Ok((slope * n as f64, ph.scale(n))),
            _ => usize::try_from(n)
                .ok()
                .and_then(|i| self.table.get(i).copied())
                .ok_or(SolitonError::OutOfRange { axis, n }),
        }
    }
}

/// Parameters of a single kink on ℤᵈ.
#[derive(Clone, Debug, PartialEq)]
pub struct KinkSpec {
    axes: Vec<AxisTable>,
    k: f64,
    pub p: f64,
    pub q: f64,
    pub x: f64,
    pub xi: f64,
    /// Constant linking amplitudes to lattice parameters.
    pub delta: f64,
}

impl KinkSpec {
    /// A kink over the given axis profiles with all offsets zero.
    ///
    /// With only linear profiles `|k|` must stay below the largest slope;
    /// smaller slopes then take the `coth` branch. Tabulated profiles need
    /// `|k|` below every step.
    pub fn new(profiles: Vec<AxisProfile>, k: f64) -> Result<Self, SolitonError> {
        if profiles.is_empty() {
            return Err(SolitonError::Degenerate("no axes".into()));
        }
        let all_linear = profiles.iter().all(|p| matches!(p, AxisProfile::Linear { .. }));
        if all_linear {
            let max = profiles
                .iter()
                .map(|p| p.step(0).unwrap().abs())
                .fold(0.0, f64::max);
            if k.abs() >= max {
                return Err(SolitonError::RealityViolation { axis: 0, n: 0, step: max, k });
            }
        }
        let axes = profiles
            .into_iter()
            .enumerate()
            .map(|(i, p)| AxisTable::new(i, p, k, all_linear))
            .collect::<Result<_, _>>()?;
        Ok(KinkSpec { axes, k, p: 0.0, q: 0.0, x: 0.0, xi: 0.0, delta: 0.0 })
    }

    /// The square-lattice kink with constant amplitudes `a` and `b`.
    pub fn constant(a: f64, b: f64, k: f64) -> Result<Self, SolitonError> {
        Self::new(vec![AxisProfile::Linear { slope: a }, AxisProfile::Linear { slope: b }], k)
    }

    /// The ℤᵈ kink with constant amplitude `a[i]` along axis `i`.
    pub fn linear(a: &[f64], k: f64) -> Result<Self, SolitonError> {
        Self::new(a.iter().map(|&slope| AxisProfile::Linear { slope }).collect(), k)
    }

    /// Kink with variable velocity: `a_m − a_{m−1} = √m`, `b_n − b_{n−1} = √(2n)`,
    /// tabulated up to `m = w`, `n = h`.
    pub fn bended(w: usize, h: usize, k: f64) -> Result<Self, SolitonError> {
        Self::new(
            vec![
                AxisProfile::from_increments(w, f64::sqrt),
                AxisProfile::from_increments(h, |n| (2.0 * n).sqrt()),
            ],
            k,
        )
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_x(mut self, x: f64) -> Self {
        self.x = x;
        self
    }

    pub fn with_pq(mut self, p: f64, q: f64) -> Self {
        self.p = p;
        self.q = q;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn profile(&self, axis: usize) -> &AxisProfile {
        &self.axes[axis].profile
    }

    /// Whether every coordinate of `site` lies where the amplitudes are known.
    pub fn covers(&self, site: &[i64]) -> bool {
        site.len() == self.dim() && self.axes.iter().zip(site).all(|(t, &n)| t.profile.in_range(n))
    }

    /// Lattice parameter `(a^i_{n+1} − a^i_n)² − δ` of the edges along `axis` from `n`.
    pub fn axis_param(&self, axis: usize, n: i64) -> Result<f64, SolitonError> {
        let s = self.axes[axis].profile.step(n).ok_or(SolitonError::OutOfRange { axis, n })?;
        Ok(s * s - self.delta)
    }

    /// Seed value `Σ a^i_{n_i} + p x + q` and phase `k x + Σ ν^i_{n_i} + ξ`.
    pub fn seed_and_phase(&self, site: &[i64]) -> Result<(f64, Phase), SolitonError> {
        if site.len() != self.dim() {
            return Err(SolitonError::DimensionMismatch { expected: self.dim(), got: site.len() });
        }
        let mut seed = self.p * self.x + self.q;
        let mut phase = Phase { re: self.k * self.x + self.xi, turns: 0 };
        for (i, (t, &n)) in self.axes.iter().zip(site).enumerate() {
            let (a, nu) = t.at(i, n)?;
            seed += a;
            phase = phase.add(nu);
        }
        Ok((seed, phase))
    }

    /// The seed solution alone.
    pub fn seed_value(&self, site: &[i64]) -> Result<f64, SolitonError> {
        Ok(self.seed_and_phase(site)?.0)
    }

    pub fn kink_value(&self, site: &[i64]) -> Result<f64, SolitonError> {
        let (seed, phase) = self.seed_and_phase(site)?;
        Ok(seed - self.k * phase.tanh())
    }

    /// Analytic `∂v/∂x`.
    pub fn dv_dx(&self, site: &[i64]) -> Result<f64, SolitonError> {
        let (_, phase) = self.seed_and_phase(site)?;
        Ok(self.p - self.k * self.k * phase.tanh_derivative())
    }

    /// The soliton `u = −2 ∂v/∂x = −2p + 2k² sech²(phase)`.
    pub fn soliton_u(&self, site: &[i64]) -> Result<f64, SolitonError> {
        Ok(-2.0 * self.dv_dx(site)?)
    }

    /// Parameter of the equation satisfied by `u` along `axis` from `n`:
    /// `(a^i_{n+1} − a^i_n)² − 2p`.
    pub fn u_param(&self, axis: usize, n: i64) -> Result<f64, SolitonError> {
        let s = self.axes[axis].profile.step(n).ok_or(SolitonError::OutOfRange { axis, n })?;
        Ok(s * s - 2.0 * self.p)
    }
}

impl KinkSpec {
    /// Whether some phase step took the `coth` branch.
    pub fn uses_branch(&self) -> bool {
        self.axes.iter().any(|t| t.linear_phase.is_some_and(|p| p.turns != 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::EquationDef;
    use crate::scalar::{rat, ratio, Rational};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn dkdv_residual(v: f64, v1: f64, v2: f64, v12: f64, alpha: f64, beta: f64) -> f64 {
        (v12 - v) * (v1 - v2) - (alpha - beta)
    }

    #[test]
    fn kink_values_at_the_first_face() {
        let s = KinkSpec::constant(1.0, 2.0, 0.3).unwrap();
        let v = |m, n| s.kink_value(&[m, n]).unwrap();
        assert_eq!(v(0, 0), 0.0);
        // tanh of the phase step equals k / a
        assert!(close(v(1, 0), 0.91, 1e-14));
        assert!(close(v(0, 1), 1.955, 1e-14));
        assert!(close(v(1, 1), 3.0 - 0.3 * 0.45 / 1.045, 1e-14));
        assert!(close(dkdv_residual(v(0, 0), v(1, 0), v(0, 1), v(1, 1), 1.0, 4.0), 0.0, 1e-14));
    }

    #[test]
    fn phase_steps_satisfy_the_tanh_relation() {
        for (a, k) in [(1.0, 0.3), (2.5, -0.7), (-3.0, 0.4)] {
            let ph = phase_step(a, k).unwrap();
            assert_eq!(ph.turns, 0);
            assert!(close(a * ph.re.tanh(), k, 1e-14));
        }
    }

    #[test]
    fn reality_conditions() {
        assert!(matches!(KinkSpec::constant(1.0, 2.0, 2.0), Err(SolitonError::RealityViolation { .. })));
        assert!(matches!(KinkSpec::constant(0.2, 0.1, 0.3), Err(SolitonError::RealityViolation { .. })));
        // a small step in a tabulated profile is not allowed
        let bad = AxisProfile::Steps { steps: vec![1.0, 0.2, 1.0] };
        let err = KinkSpec::new(vec![bad, AxisProfile::Linear { slope: 2.0 }], 0.3).unwrap_err();
        assert!(matches!(err, SolitonError::RealityViolation { axis: 0, n: 1, .. }));
        assert!(KinkSpec::bended(30, 30, 0.3).is_ok());
    }

    #[test]
    fn small_amplitude_takes_the_coth_branch() {
        let s = KinkSpec::constant(0.2, 2.0, 0.3).unwrap().with_xi(0.123);
        assert!(s.uses_branch());
        let mut worst: f64 = 0.0;
        for m in -5..5 {
            for n in -5..5 {
                let v = |dm: i64, dn: i64| s.kink_value(&[m + dm, n + dn]).unwrap();
                let r = dkdv_residual(v(0, 0), v(1, 0), v(0, 1), v(1, 1), 0.04, 4.0);
                let scale = ((v(1, 1) - v(0, 0)) * (v(1, 0) - v(0, 1))).abs().max(1.0);
                worst = worst.max(r.abs() / scale);
            }
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn soliton_peak_and_tails() {
        let s = KinkSpec::constant(1.0, 2.0, 0.3).unwrap();
        assert!(close(s.soliton_u(&[0, 0]).unwrap(), 2.0 * 0.09, 1e-15));
        let shifted = s.clone().with_pq(0.5, 0.0);
        assert!(close(shifted.soliton_u(&[200, 0]).unwrap(), -1.0, 1e-12));
        assert!(close(shifted.soliton_u(&[-200, 0]).unwrap(), -1.0, 1e-12));
    }

    #[test]
    fn x_derivative_matches_finite_differences() {
        let h = 1e-5;
        let base = KinkSpec::bended(10, 10, 0.3).unwrap().with_xi(-3.0).with_pq(0.2, 1.0).with_x(0.7);
        for site in [[0, 0], [3, 4], [7, 2], [10, 10]] {
            let plus = base.clone().with_x(0.7 + h).kink_value(&site).unwrap();
            let minus = base.clone().with_x(0.7 - h).kink_value(&site).unwrap();
            let fd = (plus - minus) / (2.0 * h);
            assert!(close(fd, base.dv_dx(&site).unwrap(), 1e-9), "{site:?}");
        }
    }

    #[test]
    fn seed_is_an_exact_solution() {
        // rational amplitudes keep the seed exact
        let (a, b) = (ratio(3, 2), ratio(-1, 3));
        let eq = EquationDef::dkdv();
        let seed = |m: i64, n: i64| &a * rat(m) + &b * rat(n) + ratio(1, 7);
        for m in -3..3 {
            for n in -3..3 {
                let r: Rational = eq.eval(
                    [&seed(m, n), &seed(m + 1, n), &seed(m, n + 1), &seed(m + 1, n + 1)],
                    &(&a * &a),
                    &(&b * &b),
                );
                assert_eq!(r, rat(0));
            }
        }
    }

    #[test]
    fn sites_are_checked() {
        let s = KinkSpec::bended(4, 4, 0.3).unwrap();
        assert!(matches!(s.kink_value(&[5, 0]), Err(SolitonError::OutOfRange { axis: 0, n: 5 })));
        assert!(matches!(s.kink_value(&[0, -1]), Err(SolitonError::OutOfRange { axis: 1, n: -1 })));
        assert!(matches!(s.kink_value(&[0]), Err(SolitonError::DimensionMismatch { .. })));
        assert!(s.covers(&[4, 4]) && !s.covers(&[4, 5]));
        assert!(close(s.axis_param(1, 2).unwrap(), 6.0, 1e-12));
    }
}
