use serde::{Deserialize, Serialize};

use crate::{KernelError, Result, WeightLaw};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PaEnvelope,
    MinEnvelope,
    SoftBooleanSum,
    GilbertMax,
    /// Boolean model with deterministic radii (X = 1).
    HardBoolean,
    AgeDependent,
    ProductSfp,
    ReinforcedAge,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::PaEnvelope,
        Family::MinEnvelope,
        Family::SoftBooleanSum,
        Family::GilbertMax,
        Family::HardBoolean,
        Family::AgeDependent,
        Family::ProductSfp,
        Family::ReinforcedAge,
    ];

    /// Families whose probability is non-increasing in each mark.
    pub fn mark_monotone(self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// phi(x) = 1 ∧ x^(-delta), unnormalised; beta absorbs the constant.
    #[default]
    SharpPareto,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub family: Family,
    pub gamma: f64,
    pub delta: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default)]
    pub profile: Profile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_law: Option<WeightLaw>,
}

impl KernelSpec {
    pub fn new(family: Family, gamma: f64, delta: f64) -> Self {
        KernelSpec {
            family,
            gamma,
            delta,
            kappa: 1.0,
            alpha: 1.0,
            beta: 1.0,
            profile: Profile::SharpPareto,
            weight_law: None,
        }
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_weight_law(mut self, law: WeightLaw) -> Self {
        self.weight_law = Some(law);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(KernelError::InvalidParameter(m));
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma must lie in [0,1), got {}", self.gamma));
        }
        if !(self.delta > 1.0 && self.delta.is_finite()) {
            return bad(format!("delta must be finite and > 1, got {}", self.delta));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must lie in (0,1], got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if let Some(w) = &self.weight_law {
            w.validate()?;
        }
        Ok(())
    }
}
