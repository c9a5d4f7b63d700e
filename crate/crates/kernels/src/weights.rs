use rand::Rng;
use serde::{Deserialize, Serialize};
use wdrcm_core::{SeedSpec, Stream};

use crate::{KernelError, Result};

/// Law of the reinforcement weights. Both built-ins are bounded below
/// almost surely and have a finite second moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightLaw {
    Constant { value: f64 },
    /// Pareto on `[lower, upper]` with density proportional to `w^(-tail_index-1)`.
    BoundedPareto { lower: f64, upper: f64, tail_index: f64 },
}

impl WeightLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightLaw::Constant { value } => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(KernelError::InvalidWeightLaw(format!("constant weight {value} not positive")));
                }
            }
            WeightLaw::BoundedPareto { lower, upper, tail_index } => {
                if !(lower > 0.0 && upper > lower && upper.is_finite()) {
                    return Err(KernelError::InvalidWeightLaw(format!(
                        "need 0 < lower < upper < inf, got [{lower}, {upper}]"
                    )));
                }
                if !(tail_index > 2.0 && tail_index.is_finite()) {
                    return Err(KernelError::InvalidWeightLaw(format!("tail index {tail_index} must exceed 2")));
                }
            }
        }
        Ok(())
    }

    /// The almost-sure lower bound `alpha_w`.
    pub fn lower_bound(&self) -> f64 {
        match *self {
            WeightLaw::Constant { value } => value,
            WeightLaw::BoundedPareto { lower, .. } => lower,
        }
    }

    pub fn upper_bound(&self) -> f64 {
        match *self {
            WeightLaw::Constant { value } => value,
            WeightLaw::BoundedPareto { upper, .. } => upper,
        }
    }

    /// Inverse CDF at `u` in `[0,1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            WeightLaw::Constant { value } => value,
            WeightLaw::BoundedPareto { lower, upper, tail_index: a } => {
                let tail = (lower / upper).powf(a);
                let w = lower * (1.0 - u * (1.0 - tail)).powf(-1.0 / a);
                w.clamp(lower, upper)
            }
        }
    }

    pub fn second_moment(&self) -> f64 {
        match *self {
            WeightLaw::Constant { value } => value * value,
            WeightLaw::BoundedPareto { lower: l, upper: h, tail_index: a } => {
                let norm = a * l.powf(a) / (1.0 - (l / h).powf(a));
                norm * (h.powf(2.0 - a) - l.powf(2.0 - a)) / (2.0 - a)
            }
        }
    }
}

pub fn sample_reinforcement_weights(n: usize, law: &WeightLaw, seed: &SeedSpec) -> Result<Vec<f64>> {
    law.validate()?;
    let mut rng = seed.rng(Stream::Weights);
    Ok((0..n).map(|_| law.quantile(rng.random::<f64>())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid() {
        assert!(WeightLaw::Constant { value: 0.0 }.validate().is_err());
        assert!(WeightLaw::BoundedPareto { lower: 1.0, upper: 5.0, tail_index: 1.5 }.validate().is_err());
        assert!(WeightLaw::BoundedPareto { lower: 2.0, upper: 1.0, tail_index: 3.0 }.validate().is_err());
    }

    #[test]
    fn quantile_endpoints() {
        let w = WeightLaw::BoundedPareto { lower: 0.5, upper: 8.0, tail_index: 2.5 };
        assert_eq!(w.quantile(0.0), 0.5);
        assert!((w.quantile(1.0 - 1e-16) - 8.0).abs() < 1e-6);
    }
}
