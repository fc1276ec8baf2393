use super::{AxisProfile, KinkSpec, SolitonError};

/// Two kinks superposed over a common seed.
///
/// The superposition `v₀ − (k₂² − k₁²)/(k₂ tanh φ₂ − k₁ tanh φ₁)` is singular
/// wherever the denominator vanishes. Shifting `φ₂` by `iπ/2` replaces
/// `tanh φ₂` by `coth φ₂`, and with `0 < k₁ < k₂` the denominator
/// `k₂ coth φ₂ − k₁ tanh φ₁` never vanishes; that real form is used here.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoKinkSpec {
    first: KinkSpec,
    second: KinkSpec,
}

impl TwoKinkSpec {
    /// Both kinks share the axis profiles; every phase step must be real.
    pub fn new(profiles: Vec<AxisProfile>, k1: f64, k2: f64) -> Result<Self, SolitonError> {
        if !(0.0 < k1 && k1 < k2) {
            return Err(SolitonError::Degenerate(format!("need 0 < k1 < k2, got k1 = {k1}, k2 = {k2}")));
        }
        let first = KinkSpec::new(profiles.clone(), k1)?;
        let second = KinkSpec::new(profiles, k2)?;
        if second.uses_branch() {
            return Err(SolitonError::Degenerate("k2 must be below every amplitude step".into()));
        }
        Ok(TwoKinkSpec { first, second })
    }

    pub fn constant(a: f64, b: f64, k1: f64, k2: f64) -> Result<Self, SolitonError> {
        Self::new(vec![AxisProfile::Linear { slope: a }, AxisProfile::Linear { slope: b }], k1, k2)
    }

    /// Phase offsets of the two kinks.
    pub fn with_xi(mut self, xi1: f64, xi2: f64) -> Self {
        self.first.xi = xi1;
        self.second.xi = xi2;
        self
    }

    pub fn with_x(mut self, x: f64) -> Self {
        self.first.x = x;
        self.second.x = x;
        self
    }

    pub fn with_pq(mut self, p: f64, q: f64) -> Self {
        self.first = self.first.with_pq(p, q);
        self.second = self.second.with_pq(p, q);
        self
    }

    /// The first kink; it carries the seed and the lattice parameters.
    pub fn first(&self) -> &KinkSpec {
        &self.first
    }

    pub fn second(&self) -> &KinkSpec {
        &self.second
    }

    pub fn dim(&self) -> usize {
        self.first.dim()
    }

    pub fn axis_param(&self, axis: usize, n: i64) -> Result<f64, SolitonError> {
        self.first.axis_param(axis, n)
    }

    pub fn two_kink_value(&self, site: &[i64]) -> Result<f64, SolitonError> {
        let (seed, phi1) = self.first.seed_and_phase(site)?;
        let (_, phi2) = self.second.seed_and_phase(site)?;
        let (k1, k2) = (self.first.k(), self.second.k());
        // (k₂² − k₁²)/(k₂ coth φ₂ − k₁ tanh φ₁), multiplied through by sinh φ₂
        // so that φ₂ = 0 gives a zero correction instead of 0/∞
        let (s, c) = (phi2.re.sinh(), phi2.re.cosh());
        let den = k2 * c - k1 * phi1.tanh() * s;
        if den == 0.0 || !den.is_finite() {
            return Err(SolitonError::SingularDenominator);
        }
        Ok(seed - (k2 * k2 - k1 * k1) * s / den)
    }

    /// Analytic `∂v/∂x` of [`TwoKinkSpec::two_kink_value`].
    pub fn dv_dx(&self, site: &[i64]) -> Result<f64, SolitonError> {
        let (_, phi1) = self.first.seed_and_phase(site)?;
        let (_, phi2) = self.second.seed_and_phase(site)?;
        let (k1, k2) = (self.first.k(), self.second.k());
        let (s, c) = (phi2.re.sinh(), phi2.re.cosh());
        let t1 = phi1.tanh();
        let den = k2 * c - k1 * t1 * s;
        if den == 0.0 || !den.is_finite() {
            return Err(SolitonError::SingularDenominator);
        }
        let d_den = k2 * k2 * s - k1 * (k1 * phi1.tanh_derivative() * s + t1 * k2 * c);
        let d_correction = (k2 * k2 - k1 * k1) * (k2 * c * den - s * d_den) / (den * den);
        Ok(self.first.p - d_correction)
    }

    /// `u = −2 ∂v/∂x`.
    pub fn soliton_u(&self, site: &[i64]) -> Result<f64, SolitonError> {
        Ok(-2.0 * self.dv_dx(site)?)
    }
}
