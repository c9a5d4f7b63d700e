use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wdrcm_core::{Boundary, BoxGeometry, SeedSpec};
use wdrcm_kernels::{Family, KernelSpec};

use crate::{ExperimentError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Degree,
    DistanceScaling,
    PhaseSweep,
    TheoryChecks,
    LayerPath,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Degree => "degree",
            ExperimentKind::DistanceScaling => "distance_scaling",
            ExperimentKind::PhaseSweep => "phase_sweep",
            ExperimentKind::TheoryChecks => "theory_checks",
            ExperimentKind::LayerPath => "layer_path",
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub dimension: usize,
    pub side: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default = "one")]
    pub intensity: f64,
    pub kernel: KernelSpec,
}

impl ModelConfig {
    pub fn geometry(&self) -> Result<BoxGeometry> {
        BoxGeometry::new(self.dimension, self.side, self.boundary).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry()?;
        if !(self.intensity > 0.0 && self.intensity.is_finite()) {
            return Err(ExperimentError::Config(format!("intensity must be positive, got {}", self.intensity)));
        }
        self.kernel.validate().map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn expected_points(&self) -> f64 {
        self.intensity * self.side.powi(self.dimension as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Used when `--out` is not given.
    pub dir: Option<PathBuf>,
    /// Also write one `src,dst,hops,dw,euclidean_distance` file per trial.
    pub distance_rows: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DegreeKnobs {
    pub tail_fraction: f64,
    pub bootstrap: usize,
    pub mark_bins: usize,
    pub log_bins: usize,
}

impl Default for DegreeKnobs {
    fn default() -> Self {
        DegreeKnobs { tail_fraction: 0.05, bootstrap: 200, mark_bins: 10, log_bins: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistanceKnobs {
    /// Absolute rung separations. When absent the rungs are
    /// `rung_fractions` times the box side.
    pub ladder: Option<Vec<f64>>,
    pub rung_fractions: Vec<f64>,
    pub pairs_per_rung: usize,
    /// Relative half-width of the separation window around a rung.
    pub band: f64,
    pub min_pairs: usize,
    /// Endpoint draws per wanted pair before a rung gives up.
    pub attempts_per_pair: usize,
}

impl Default for DistanceKnobs {
    fn default() -> Self {
        DistanceKnobs {
            ladder: None,
            rung_fractions: vec![1.0 / 64.0, 1.0 / 16.0, 1.0 / 4.0],
            pairs_per_rung: 100,
            band: 0.1,
            min_pairs: 20,
            attempts_per_pair: 50_000,
        }
    }
}

impl DistanceKnobs {
    pub fn rungs(&self, geom: &BoxGeometry) -> Result<Vec<f64>> {
        let rungs = match &self.ladder {
            Some(l) => l.clone(),
            None => self.rung_fractions.iter().map(|f| f * geom.side).collect(),
        };
        if rungs.is_empty() {
            return Err(ExperimentError::Config("distance ladder is empty".into()));
        }
        if rungs.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(ExperimentError::Config("ladder distances must be positive".into()));
        }
        if rungs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::Config("ladder distances must be strictly increasing".into()));
        }
        let cap = geom.diameter();
        if let Some(&last) = rungs.last() {
            if last * (1.0 + self.band) >= cap {
                return Err(ExperimentError::Config(format!(
                    "largest rung {last} (band included) must stay below {cap}"
                )));
            }
        }
        if !(self.band > 0.0 && self.band < 1.0) {
            return Err(ExperimentError::Config(format!("band must lie in (0,1), got {}", self.band)));
        }
        if self.pairs_per_rung == 0 {
            return Err(ExperimentError::Config("pairs_per_rung must be positive".into()));
        }
        Ok(rungs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepKnobs {
    pub gammas: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Separation at which distances are measured; defaults to the last rung
    /// of the distance ladder.
    pub rung: Option<f64>,
}

impl Default for SweepKnobs {
    fn default() -> Self {
        SweepKnobs { gammas: vec![0.4, 0.6, 0.8], deltas: vec![1.5], rung: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayerKnobs {
    /// Defaults to 1.5, or the midpoint of the admissible interval when that
    /// is narrower. Small values leave more candidates per ascent step.
    pub alpha1: Option<f64>,
    /// Defaults to the value that balances both terms of eta.
    pub alpha2: Option<f64>,
    pub pairs: usize,
    pub launch_hops: u32,
    /// Constant in the connector failure bound `exp(-c t^e)`.
    pub connector_c: f64,
    /// Mark at which the connector bound is evaluated.
    pub connector_t: f64,
}

impl Default for LayerKnobs {
    fn default() -> Self {
        LayerKnobs { alpha1: None, alpha2: None, pairs: 50, launch_hops: 4, connector_c: 1.0, connector_t: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TheoryKnobs {
    /// Randomised admissible contexts per lemma.
    pub contexts: usize,
    pub dimension: usize,
    pub mc_samples: u64,
    pub k_max: usize,
    pub epsilon: f64,
    pub c: f64,
    pub ell0: f64,
    pub ultrasmall_n: usize,
    pub small_n: usize,
    pub small_p: f64,
    /// `(gamma, delta)` of the ultrasmall truncation sequence.
    pub ultrasmall: (f64, f64),
    /// `(gamma, delta)` of the non-ultrasmall truncation sequence.
    pub small: (f64, f64),
    pub kappa_tilde: f64,
    pub nu_t: f64,
    pub nu_n: usize,
    pub nu2_points: usize,
    /// Judge every bound with the inequality reversed. Only useful as a
    /// negative control of the harness.
    pub invert: bool,
}

impl Default for TheoryKnobs {
    fn default() -> Self {
        TheoryKnobs {
            contexts: 100,
            dimension: 1,
            mc_samples: 100_000,
            k_max: 4,
            epsilon: 0.1,
            c: 10.0,
            ell0: 0.3,
            ultrasmall_n: 60,
            small_n: 200,
            small_p: 1.5,
            ultrasmall: (0.9, 1.1),
            small: (0.4, 2.0),
            kappa_tilde: 1.0,
            nu_t: 0.5,
            nu_n: 30,
            nu2_points: 20,
            invert: false,
        }
    }
}

fn default_trials() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    /// Optional; when present it must agree with the CLI subcommand.
    #[serde(default)]
    pub experiment: Option<ExperimentKind>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seeds: SeedSpec,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub degree: DegreeKnobs,
    #[serde(default)]
    pub distance: DistanceKnobs,
    #[serde(default)]
    pub sweep: SweepKnobs,
    #[serde(default)]
    pub layer: LayerKnobs,
    #[serde(default)]
    pub theory: TheoryKnobs,
}

impl RunConfig {
    pub fn new(model: ModelConfig) -> Self {
        RunConfig {
            model,
            experiment: None,
            trials: 1,
            seeds: SeedSpec::default(),
            output: OutputConfig::default(),
            degree: DegreeKnobs::default(),
            distance: DistanceKnobs::default(),
            sweep: SweepKnobs::default(),
            layer: LayerKnobs::default(),
            theory: TheoryKnobs::default(),
        }
    }

    /// A 2-d torus of `n` expected points at unit intensity.
    pub fn torus(n: f64, kernel: KernelSpec) -> Self {
        Self::new(ModelConfig { dimension: 2, side: n.sqrt(), boundary: Boundary::Torus, intensity: 1.0, kernel })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(ExperimentError::Config("trials must be at least 1".into()));
        }
        self.model.validate()?;
        self.distance.rungs(&self.model.geometry()?)?;
        Ok(())
    }

    /// Checks that the config can drive `kind`.
    pub fn check_kind(&self, kind: ExperimentKind) -> Result<()> {
        if let Some(k) = self.experiment {
            if k != kind {
                return Err(ExperimentError::Config(format!(
                    "config is for experiment {}, not {}",
                    k.name(),
                    kind.name()
                )));
            }
        }
        if kind == ExperimentKind::Degree
            && !matches!(
                self.model.kernel.family,
                Family::PaEnvelope | Family::MinEnvelope | Family::SoftBooleanSum | Family::AgeDependent
            )
        {
            return Err(ExperimentError::Config(format!(
                "degree experiment does not support kernel {:?}",
                self.model.kernel.family
            )));
        }
        Ok(())
    }
}
