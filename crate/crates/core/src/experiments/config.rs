//! Scenario configuration: defaults, a flat `key = value` file (TOML) and
//! command-line overrides, merged in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::closed_form::Observable;
use crate::error::{LabError, Result};
use crate::experiments::rng::{CouplingNorm, Sampling};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    CoherenceVsN,
    CoherenceVsT,
    SurfaceNT,
    FiniteVsInfinite,
    EnsembleAverage,
    DmTopography1q,
    DmTopography2q,
    BellTable,
    DfsDemo,
    ReduceDemo,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::CoherenceVsN,
        Scenario::CoherenceVsT,
        Scenario::SurfaceNT,
        Scenario::FiniteVsInfinite,
        Scenario::EnsembleAverage,
        Scenario::DmTopography1q,
        Scenario::DmTopography2q,
        Scenario::BellTable,
        Scenario::DfsDemo,
        Scenario::ReduceDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::CoherenceVsN => "coherence_vs_n",
            Scenario::CoherenceVsT => "coherence_vs_t",
            Scenario::SurfaceNT => "surface_n_t",
            Scenario::FiniteVsInfinite => "finite_vs_infinite",
            Scenario::EnsembleAverage => "ensemble_average",
            Scenario::DmTopography1q => "dm_topography_1q",
            Scenario::DmTopography2q => "dm_topography_2q",
            Scenario::BellTable => "bell_table",
            Scenario::DfsDemo => "dfs_demo",
            Scenario::ReduceDemo => "reduce_demo",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn unknown(kind: &str, s: &str, options: &[&str]) -> LabError {
    LabError::Config(format!("unknown {kind} '{s}' (expected one of: {})", options.join(", ")))
}

impl FromStr for Scenario {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == norm)
            .ok_or_else(|| unknown("scenario", s, &Scenario::ALL.map(|s| s.name())))
    }
}

impl FromStr for Sampling {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        let all = [Sampling::ComplexSquare, Sampling::RealUnit, Sampling::Balanced];
        all.into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| unknown("sampling", s, &all.map(|x| x.name())))
    }
}

impl FromStr for Observable {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        let all = [Observable::Magnitude, Observable::RealPart];
        all.into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| unknown("observable", s, &all.map(|x| x.name())))
    }
}

impl FromStr for CouplingNorm {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        let all = [CouplingNorm::PerSpin, CouplingNorm::Aggregate];
        all.into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| unknown("coupling_norm", s, &all.map(|x| x.name())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub n_env: usize,
    pub t_max: f64,
    pub steps: usize,
    pub seed: u64,
    pub lam: f64,
    pub runs: usize,
    pub sampling: Sampling,
    pub observable: Observable,
    pub basis_theta: f64,
    pub coupling_norm: CouplingNorm,
    pub out_path: PathBuf,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            n_env: 10,
            t_max: 10.0,
            steps: 200,
            seed: 42,
            lam: 0.2,
            runs: 10,
            sampling: Sampling::ComplexSquare,
            observable: Observable::Magnitude,
            basis_theta: 0.0,
            coupling_norm: CouplingNorm::PerSpin,
            out_path: PathBuf::from(format!("{}.csv", scenario.name())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 1 {
            return Err(LabError::Config("steps must be >= 1".into()));
        }
        if self.runs < 1 {
            return Err(LabError::Config("runs must be >= 1".into()));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(LabError::Config(format!("t_max must be positive, got {}", self.t_max)));
        }
        if !(self.lam > 0.0) || !self.lam.is_finite() {
            return Err(LabError::Config(format!("lam must be positive, got {}", self.lam)));
        }
        if !self.basis_theta.is_finite() {
            return Err(LabError::Config("basis_theta must be finite".into()));
        }
        Ok(())
    }

    /// Uniform endpoint-inclusive grid `t_k = k·t_max/steps`.
    pub fn time_grid(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| k as f64 * self.t_max / self.steps as f64).collect()
    }
}

/// Every field optional; used for both the config file and CLI flags.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub scenario: Option<String>,
    pub n_env: Option<usize>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    #[serde(alias = "lambda")]
    pub lam: Option<f64>,
    pub runs: Option<usize>,
    pub sampling: Option<String>,
    pub observable: Option<String>,
    pub basis_theta: Option<f64>,
    pub coupling_norm: Option<String>,
    pub out_path: Option<PathBuf>,
}

impl ConfigOverrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Config(e.to_string().replace('\n', " ")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Fields set in `over` win.
    pub fn merged(self, over: ConfigOverrides) -> Self {
        Self {
            scenario: over.scenario.or(self.scenario),
            n_env: over.n_env.or(self.n_env),
            t_max: over.t_max.or(self.t_max),
            steps: over.steps.or(self.steps),
            seed: over.seed.or(self.seed),
            lam: over.lam.or(self.lam),
            runs: over.runs.or(self.runs),
            sampling: over.sampling.or(self.sampling),
            observable: over.observable.or(self.observable),
            basis_theta: over.basis_theta.or(self.basis_theta),
            coupling_norm: over.coupling_norm.or(self.coupling_norm),
            out_path: over.out_path.or(self.out_path),
        }
    }

    pub fn resolve(self) -> Result<ScenarioConfig> {
        let scenario: Scenario = self
            .scenario
            .as_deref()
            .ok_or_else(|| LabError::Config("no scenario given".into()))?
            .parse()?;
        let mut c = ScenarioConfig::new(scenario);
        if let Some(v) = self.n_env {
            c.n_env = v;
        }
        if let Some(v) = self.t_max {
            c.t_max = v;
        }
        if let Some(v) = self.steps {
            c.steps = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.lam {
            c.lam = v;
        }
        if let Some(v) = self.runs {
            c.runs = v;
        }
        if let Some(v) = self.sampling {
            c.sampling = v.parse()?;
        }
        if let Some(v) = self.observable {
            c.observable = v.parse()?;
        }
        if let Some(v) = self.basis_theta {
            c.basis_theta = v;
        }
        if let Some(v) = self.coupling_norm {
            c.coupling_norm = v.parse()?;
        }
        if let Some(v) = self.out_path {
            c.out_path = v;
        }
        c.validate()?;
        Ok(c)
    }
}
