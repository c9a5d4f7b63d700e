use crate::{Family, KernelError, KernelSpec, Result};

/// `1 ∧ x^(-delta)`; errors on non-positive input.
pub fn rho(x: f64, delta: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(KernelError::NonPositiveArgument(x));
    }
    Ok(rho_unchecked(x, delta))
}

/// `rho` extended by `rho(0) = 1`.
#[inline(always)]
pub fn rho_unchecked(x: f64, delta: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else {
        x.powf(-delta)
    }
}

/// Canonical Pareto radius `t^(-gamma/d)`.
pub fn radius_from_mark(t: f64, gamma: f64, d: usize) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(KernelError::InvalidMark(t));
    }
    if d == 0 {
        return Err(KernelError::InvalidParameter("dimension must be at least 1".into()));
    }
    Ok(t.powf(-gamma / d as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkFeatures {
    pub t: f64,
    tg: f64,
    t1g: f64,
    radius: f64,
    wpow: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairContext {
    pub r: f64,
    pub t: f64,
    pub s: f64,
    pub u: f64,
    pub weights: Option<(f64, f64)>,
}

impl PairContext {
    pub fn new(r: f64, t: f64, s: f64, u: f64) -> Self {
        PairContext { r, t, s, u, weights: None }
    }

    pub fn with_weights(mut self, wx: f64, wy: f64) -> Self {
        self.weights = Some((wx, wy));
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(KernelError::InvalidContext(format!("distance {}", self.r)));
        }
        for m in [self.t, self.s] {
            if !(m > 0.0 && m < 1.0) {
                return Err(KernelError::InvalidMark(m));
            }
        }
        if !(self.u >= 0.0 && self.u < 1.0) {
            return Err(KernelError::InvalidContext(format!("pair uniform {}", self.u)));
        }
        if let Some((a, b)) = self.weights {
            if !(a > 0.0 && b > 0.0) {
                return Err(KernelError::InvalidContext(format!("weights ({a}, {b})")));
            }
        }
        Ok(())
    }
}

/// A validated [`KernelSpec`] bound to a dimension, with the powers it
/// needs precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    spec: KernelSpec,
    dim: usize,
    kappa_scale: f64,
    inv_beta: f64,
    delta_d: f64,
    radius_exp: f64,
}

impl Kernel {
    pub fn new(spec: &KernelSpec, dim: usize) -> Result<Self> {
        spec.validate()?;
        if dim == 0 {
            return Err(KernelError::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(Kernel {
            spec: spec.clone(),
            dim,
            kappa_scale: spec.kappa.powf(-1.0 / spec.delta),
            inv_beta: 1.0 / spec.beta,
            delta_d: spec.delta * dim as f64,
            radius_exp: -spec.gamma / dim as f64,
        })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn needs_weights(&self) -> bool {
        self.spec.family == Family::ReinforcedAge
    }

    #[inline(always)]
    fn rd(&self, r: f64) -> f64 {
        match self.dim {
            1 => r,
            2 => r * r,
            3 => r * r * r,
            d => r.powi(d as i32),
        }
    }

    #[inline(always)]
    fn radius(&self, t: f64) -> f64 {
        t.powf(self.radius_exp)
    }

    /// Per-vertex powers reused across all pairs of that vertex.
    #[inline]
    pub fn features(&self, t: f64, w: f64) -> MarkFeatures {
        let g = self.spec.gamma;
        MarkFeatures {
            t,
            tg: t.powf(g),
            t1g: t.powf(1.0 - g),
            radius: self.radius(t),
            wpow: if self.needs_weights() { w.powf(-1.0 / self.spec.delta) } else { 1.0 },
        }
    }

    /// Connection probability from precomputed features. Every other
    /// evaluation path goes through here, so all builders agree bit for bit.
    #[inline]
    pub fn prob_features(&self, r: f64, a: &MarkFeatures, b: &MarkFeatures) -> f64 {
        let delta = self.spec.delta;
        let pa = || if a.t <= b.t { a.tg * b.t1g } else { b.tg * a.t1g };
        match self.spec.family {
            Family::PaEnvelope => rho_unchecked(self.kappa_scale * pa() * self.rd(r), delta),
            Family::MinEnvelope => {
                let lo = if a.t <= b.t { a.tg } else { b.tg };
                self.spec.alpha * rho_unchecked(self.kappa_scale * lo * self.rd(r), delta)
            }
            Family::ProductSfp => rho_unchecked(self.kappa_scale * a.tg * b.tg * self.rd(r), delta),
            Family::AgeDependent => rho_unchecked(pa() * self.rd(r) * self.inv_beta, delta),
            Family::ReinforcedAge => {
                rho_unchecked(a.wpow * b.wpow * pa() * self.rd(r) * self.inv_beta, delta)
            }
            Family::SoftBooleanSum => rho_unchecked(r / (a.radius + b.radius), self.delta_d),
            Family::GilbertMax => rho_unchecked(r / a.radius.max(b.radius), self.delta_d),
            Family::HardBoolean => {
                if r < a.radius + b.radius {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Connection probability without validation. Weights are ignored unless
    /// the family is reinforced.
    #[inline]
    pub fn prob_raw(&self, r: f64, t: f64, s: f64, wx: f64, wy: f64) -> f64 {
        self.prob_features(r, &self.features(t, wx), &self.features(s, wy))
    }

    fn weights_of(&self, ctx: &PairContext) -> Result<(f64, f64)> {
        match (self.needs_weights(), ctx.weights) {
            (true, None) => Err(KernelError::MissingWeights(self.spec.family)),
            (_, Some(w)) => Ok(w),
            (false, None) => Ok((1.0, 1.0)),
        }
    }

    pub fn probability(&self, ctx: &PairContext) -> Result<f64> {
        ctx.validate()?;
        let (wx, wy) = self.weights_of(ctx)?;
        Ok(self.prob_raw(ctx.r, ctx.t, ctx.s, wx, wy))
    }

    pub fn sample_edge(&self, ctx: &PairContext) -> Result<bool> {
        Ok(ctx.u < self.probability(ctx)?)
    }

    /// Pareto variable `X` with `P(X > x) = x^(-delta d)` obtained from the pair uniform.
    pub fn boolean_scale(&self, u: f64) -> f64 {
        if u <= 0.0 {
            f64::INFINITY
        } else {
            u.powf(-1.0 / self.delta_d)
        }
    }

    /// The Boolean sampling path: compares the rescaled distance with `X`.
    /// Only defined for the Boolean families.
    pub fn sample_edge_via_scale(&self, ctx: &PairContext) -> Result<bool> {
        ctx.validate()?;
        let x = self.boolean_scale(ctx.u);
        match self.spec.family {
            Family::SoftBooleanSum => Ok(ctx.r / (self.radius(ctx.t) + self.radius(ctx.s)) < x),
            Family::GilbertMax => Ok(ctx.r / self.radius(ctx.t.min(ctx.s)) <= x),
            Family::HardBoolean => Ok(ctx.r < self.radius(ctx.t) + self.radius(ctx.s)),
            f => Err(KernelError::InvalidParameter(format!("{f:?} has no Boolean sampling path"))),
        }
    }

    /// Upper bound on the probability of any pair at distance at least
    /// `r_min` with marks at least `t_min`, `s_min` and weights at most `w_max`.
    /// Every built-in family is monotone in distance and marks, so the
    /// bound is the probability at the corner.
    pub fn dominating_probability(&self, r_min: f64, t_min: f64, s_min: f64, w_max: f64) -> Option<f64> {
        if !self.spec.family.mark_monotone() {
            return None;
        }
        Some(self.prob_raw(r_min, t_min, s_min, w_max, w_max))
    }

    /// `(alpha, kappa)` for which the min envelope lies below this kernel
    /// everywhere, if such a pair exists. `weight_lower` is the almost-sure
    /// lower bound of the weights (reinforced family only).
    pub fn lower_envelope(&self, weight_lower: Option<f64>) -> Option<(f64, f64)> {
        let s = &self.spec;
        match s.family {
            Family::PaEnvelope | Family::ProductSfp => Some((1.0, s.kappa)),
            Family::MinEnvelope => Some((s.alpha, s.kappa)),
            Family::AgeDependent => Some((1.0, s.beta.powf(s.delta))),
            Family::ReinforcedAge => {
                let a = weight_lower.or(s.weight_law.as_ref().map(|w| w.lower_bound()))?;
                Some((1.0, s.beta.powf(s.delta) * a * a))
            }
            Family::SoftBooleanSum | Family::GilbertMax => Some((1.0, 1.0)),
            Family::HardBoolean => None,
        }
    }

    /// `kappa'` with `p <= 1 ∧ kappa' (t∧s)^(-delta gamma) (t∨s)^(delta(gamma-1)) r^(-delta d)`.
    pub fn upper_envelope_kappa(&self, weight_upper: Option<f64>) -> Option<f64> {
        let s = &self.spec;
        match s.family {
            Family::PaEnvelope | Family::MinEnvelope => Some(s.kappa),
            Family::ProductSfp => (s.gamma <= 0.5).then_some(s.kappa),
            Family::AgeDependent => Some(s.beta.powf(s.delta)),
            Family::ReinforcedAge => {
                let h = weight_upper.or(s.weight_law.as_ref().map(|w| w.upper_bound()))?;
                Some(s.beta.powf(s.delta) * h * h)
            }
            Family::SoftBooleanSum | Family::HardBoolean => Some(2f64.powf(self.delta_d)),
            Family::GilbertMax => Some(1.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_values() {
        assert_eq!(rho(1.0, 2.0).unwrap(), 1.0);
        assert_eq!(rho(0.5, 3.0).unwrap(), 1.0);
        assert!((rho(2.0, 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(rho(0.0, 2.0).is_err());
        assert!(rho(-1.0, 2.0).is_err());
    }

    #[test]
    fn radius_values() {
        assert_eq!(radius_from_mark(0.3, 0.0, 2).unwrap(), 1.0);
        assert!((radius_from_mark(0.01, 0.5, 1).unwrap() - 10.0).abs() < 1e-12);
        assert!((radius_from_mark(1.0 - 1e-12, 0.7, 3).unwrap() - 1.0).abs() < 1e-9);
        assert!(radius_from_mark(1.0, 0.5, 1).is_err());
    }

    #[test]
    fn missing_weights() {
        let spec = KernelSpec::new(Family::ReinforcedAge, 0.5, 2.0);
        let k = Kernel::new(&spec, 1).unwrap();
        let ctx = PairContext::new(1.0, 0.5, 0.5, 0.1);
        assert_eq!(k.probability(&ctx), Err(KernelError::MissingWeights(Family::ReinforcedAge)));
        assert!(k.probability(&ctx.with_weights(1.0, 1.0)).is_ok());
    }
}
