//! Experiment configuration: a sectioned TOML file with every key checked.

use crate::error::CliError;
use halfspace_rtm::forward::{make_curve, BcKind, CurveKind, ImpedanceProfile, Obstacle, SolverOptions, SurveyGeometry};
use halfspace_rtm::imaging::{ApertureWeights, GridSpec};
use halfspace_rtm::ElasticMedium;
use serde::Deserialize;
use std::path::Path;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MediumBlock {
    pub lambda: f64,
    pub mu: f64,
    pub omega: Option<f64>,
    pub omegas: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ObstacleBlock {
    pub kind: String,
    pub center: [f64; 2],
    #[serde(default = "one")]
    pub scale: f64,
    pub radius: Option<f64>,
    pub p: Option<u32>,
    pub bc: String,
    pub eta: Option<f64>,
    pub eta_amp: Option<f64>,
    pub eta_freq: Option<u32>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SurveyBlock {
    pub d: f64,
    pub n_src: usize,
    pub n_rcv: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ImagingBlock {
    pub z1: [f64; 2],
    pub z2: [f64; 2],
    pub n1: usize,
    pub n2: usize,
    #[serde(default)]
    pub weights: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NoiseBlock {
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    pub points_per_wavelength: Option<f64>,
    pub min_nodes: Option<usize>,
    pub max_condition: Option<f64>,
    /// Retry once at `1.001·ω` when the boundary system is ill-conditioned.
    pub retry_perturbed: Option<bool>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PsfBlock {
    pub c1: Option<f64>,
    pub c2: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub output_dir: Option<String>,
    pub medium: MediumBlock,
    #[serde(default)]
    pub obstacle: Vec<ObstacleBlock>,
    pub survey: SurveyBlock,
    pub imaging: Option<ImagingBlock>,
    #[serde(default)]
    pub noise: NoiseBlock,
    pub solver: Option<SolverBlock>,
    pub psf: Option<PsfBlock>,
}

fn one() -> f64 {
    1.0
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let c: ExperimentConfig = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        c.check()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Ok((Self::parse(text)?, bytes))
    }

    /// Structural checks that need no numerical work.
    fn check(&self) -> Result<(), CliError> {
        self.omegas()?;
        self.media()?;
        self.survey()?;
        self.obstacles()?;
        if self.imaging.is_some() {
            self.grid()?;
            self.weights()?;
        }
        if !(self.noise.sigma >= 0.0) || !self.noise.sigma.is_finite() {
            return Err(bad(format!("noise.sigma must be nonnegative, got {}", self.noise.sigma)));
        }
        Ok(())
    }

    pub fn omegas(&self) -> Result<Vec<f64>, CliError> {
        let v = match (&self.medium.omega, &self.medium.omegas) {
            (Some(w), None) => vec![*w],
            (None, Some(v)) => v.clone(),
            _ => return Err(bad("medium needs exactly one of omega or omegas")),
        };
        if v.is_empty() {
            return Err(bad("medium.omegas is empty"));
        }
        if v.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(bad("frequencies must be positive"));
        }
        Ok(v)
    }

    pub fn media(&self) -> Result<Vec<ElasticMedium>, CliError> {
        self.omegas()?
            .into_iter()
            .map(|w| ElasticMedium::new(self.medium.lambda, self.medium.mu, w).map_err(|e| bad(e.to_string())))
            .collect()
    }

    pub fn survey(&self) -> Result<SurveyGeometry, CliError> {
        let s = self.survey;
        SurveyGeometry::new(s.d, s.n_src, s.n_rcv).map_err(|e| bad(e.to_string()))
    }

    pub fn obstacles(&self) -> Result<Vec<Obstacle>, CliError> {
        self.obstacle.iter().enumerate().map(|(i, b)| b.build().map_err(|e| bad(format!("obstacle {i}: {e}")))).collect()
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        let im = self.imaging.as_ref().ok_or_else(|| bad("missing [imaging] block"))?;
        GridSpec::new(im.z1, im.z2, im.n1, im.n2).map_err(|e| bad(format!("imaging: {e}")))
    }

    pub fn weights(&self) -> Result<ApertureWeights, CliError> {
        let w = self.imaging.as_ref().and_then(|i| i.weights.as_deref()).unwrap_or("uniform");
        match w {
            "uniform" => Ok(ApertureWeights::Uniform),
            "trapezoid" => Ok(ApertureWeights::Trapezoid),
            other => Err(bad(format!("unknown imaging.weights {other:?}"))),
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        let mut o = SolverOptions::default();
        if let Some(s) = &self.solver {
            if let Some(v) = s.points_per_wavelength {
                o.points_per_wavelength = v;
            }
            if let Some(v) = s.min_nodes {
                o.min_nodes = v;
            }
            if let Some(v) = s.max_condition {
                o.max_condition = v;
            }
        }
        o
    }

    pub fn retry_perturbed(&self) -> bool {
        self.solver.and_then(|s| s.retry_perturbed).unwrap_or(true)
    }

    pub fn psf_window(&self) -> (f64, f64) {
        let p = self.psf.unwrap_or(PsfBlock { c1: None, c2: None });
        (p.c1.unwrap_or(0.9), p.c2.unwrap_or(10.0))
    }
}

impl ObstacleBlock {
    pub fn build(&self) -> Result<Obstacle, String> {
        let kind = match self.kind.as_str() {
            "circle" => CurveKind::Circle { radius: self.radius.ok_or("circle needs radius")? },
            "kite" => CurveKind::Kite,
            "leaf" => CurveKind::Leaf { p: self.p.ok_or("leaf needs p")? },
            "peanut" => CurveKind::Peanut,
            "rounded_square" => CurveKind::RoundedSquare,
            other => return Err(format!("unknown obstacle kind {other:?}")),
        };
        if self.radius.is_some() && self.kind != "circle" {
            return Err("radius only applies to circles".into());
        }
        if self.p.is_some() && self.kind != "leaf" {
            return Err("p only applies to leaves".into());
        }
        let bc = match self.bc.as_str() {
            "dirichlet" => BcKind::Dirichlet,
            "neumann" => BcKind::Neumann,
            "impedance" => {
                let mean = self.eta.ok_or("impedance needs eta")?;
                match (self.eta_amp, self.eta_freq) {
                    (None, None) => BcKind::Impedance(ImpedanceProfile::Constant(mean)),
                    (Some(amp), Some(freq)) => BcKind::Impedance(ImpedanceProfile::Cosine { mean, amp, freq }),
                    _ => return Err("eta_amp and eta_freq go together".into()),
                }
            }
            other => return Err(format!("unknown boundary condition {other:?}")),
        };
        if self.bc != "impedance" && (self.eta.is_some() || self.eta_amp.is_some() || self.eta_freq.is_some()) {
            return Err("eta only applies to impedance obstacles".into());
        }
        let curve = make_curve(kind, self.center, self.scale).map_err(|e| e.to_string())?;
        Obstacle::new(curve, bc).map_err(|e| e.to_string())
    }
}
