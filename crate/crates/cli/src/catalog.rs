//! Experiment kinds, their defaults and the keys each one reads.

use crate::config::ExperimentConfig;
use crate::{CliError, Result};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    GapFind,
    ShellSearch,
    ManifoldBuild,
    TrackVerify,
    ConeCheck,
    DimensionEstimate,
    ManeProject,
    CounterexampleRun,
}

pub const KINDS: [Kind; 8] = [
    Kind::GapFind,
    Kind::ShellSearch,
    Kind::ManifoldBuild,
    Kind::TrackVerify,
    Kind::ConeCheck,
    Kind::DimensionEstimate,
    Kind::ManeProject,
    Kind::CounterexampleRun,
];

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::GapFind => "gap-find",
            Kind::ShellSearch => "shell-search",
            Kind::ManifoldBuild => "manifold-build",
            Kind::TrackVerify => "track-verify",
            Kind::ConeCheck => "cone-check",
            Kind::DimensionEstimate => "dimension-estimate",
            Kind::ManeProject => "mane-project",
            Kind::CounterexampleRun => "counterexample-run",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Kind::GapFind => "spectral cuts satisfying the gap condition for a given Lipschitz constant",
            Kind::ShellSearch => "cuts N whose lattice shell has no short nonzero differences",
            Kind::ManifoldBuild => "inertial manifold graph of the cut-off reaction-diffusion model on a grid",
            Kind::TrackVerify => "exponential tracking of off-manifold starts by manifold trajectories",
            Kind::ConeCheck => "cone invariance over random trajectory pairs",
            Kind::DimensionEstimate => "box-counting dimension of a synthetic or sampled point cloud",
            Kind::ManeProject => "random rank-N projections of a limit-cycle cloud: injectivity and Hölder fit",
            Kind::CounterexampleRun => "Floquet period map, C1 obstruction spectra or the segments attractor",
        }
    }

    /// Defaults of the kind's first variant.
    pub fn default_config(self) -> ExperimentConfig {
        ExperimentConfig { kind: Some(self.name().to_string()), ..Default::default() }
            .resolve()
            .expect("catalog defaults validate")
            .1
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        KINDS.iter().copied().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<&str> = KINDS.iter().map(|k| k.name()).collect();
            CliError::Validation(format!("unknown experiment kind `{s}`{}", suggest(s, &names)))
        })
    }
}

/// `"; did you mean `x`?"` for the closest candidate, or nothing when none is close.
pub fn suggest(given: &str, candidates: &[&str]) -> String {
    candidates
        .iter()
        .map(|c| (strsim::jaro_winkler(given, c), *c))
        .filter(|(s, _)| *s > 0.7)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map_or(String::new(), |(_, c)| format!("; did you mean `{c}`?"))
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub kind: &'static str,
    pub description: &'static str,
    pub defaults: ExperimentConfig,
}

pub fn catalog() -> Vec<CatalogEntry> {
    KINDS
        .iter()
        .map(|k| CatalogEntry { kind: k.name(), description: k.description(), defaults: k.default_config() })
        .collect()
}
