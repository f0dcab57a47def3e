//! Flat experiment configuration.
//!
//! A config is a single TOML table of scalars. Unset keys are filled from the
//! defaults of the selected kind and variant; keys the variant does not read
//! are rejected, as are unknown keys.

use crate::catalog::{suggest, Kind};
use crate::{CliError, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};

/// Environment override `INMAN_<KEY>` for the common keys.
pub const ENV_PREFIX: &str = "INMAN_";
const ENV_KEYS: [&str; 5] = ["seed", "dt", "modes", "tol", "out"];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,

    /// RNG seed
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// integrator step
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Galerkin truncation M
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// output directory
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// interval | torus2d | torus3d | sphere
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<String>,
    /// largest eigenvalue kept for lattice spectra
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lmax: Option<u64>,
    /// Lipschitz constant
    #[arg(long = "L")]
    #[serde(default, rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// most cuts reported
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// shell half-width
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmax: Option<u64>,

    /// rde | rotation
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// radius of the nonlinearity cut-off
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    /// rotation strength
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
    /// number of low modes N
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<usize>,

    /// lp | bvp
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// grid points per axis, or cloud size
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// grid half-width
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,

    /// starts or trajectory pairs
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    /// size of the off-manifold kick
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kick: Option<f64>,
    /// radius of the ball starts are drawn from
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,

    /// segment | square | hopf
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    /// smallest box radius
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<usize>,
    /// expected dimension
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<f64>,
    /// projection rank
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// number of random projections
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,

    /// floquet | c1 | segments
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub which: Option<String>,
    /// half period
    #[arg(long = "T")]
    #[serde(default, rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// RK4 steps per half period
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

fn to_map(c: &ExperimentConfig) -> Map<String, Value> {
    match serde_json::to_value(c).expect("config serialises") {
        Value::Object(m) => m,
        _ => unreachable!(),
    }
}

fn from_map(m: Map<String, Value>) -> Result<ExperimentConfig> {
    serde_json::from_value(Value::Object(m)).map_err(|e| CliError::Validation(e.to_string()))
}

fn pick<'a>(given: &'a Option<String>, key: &str, options: &[&'a str]) -> Result<&'a str> {
    match given {
        None => Ok(options[0]),
        Some(s) if options.contains(&s.as_str()) => Ok(s.as_str()),
        Some(s) => Err(CliError::Validation(format!(
            "`{key}` must be one of {}, got `{s}`{}",
            options.join(", "),
            suggest(s, options)
        ))),
    }
}

/// `(key, default)` for every key the selected variant reads.
fn defaults_for(kind: Kind, c: &ExperimentConfig) -> Result<Vec<(&'static str, Value)>> {
    let rde = || vec![("modes", json!(32)), ("kappa", json!(1.5)), ("cutoff", json!(50.0)), ("cut", json!(2))];
    let sq_lo = 2.0 / 99.0;
    let d = match kind {
        Kind::GapFind => {
            let s = pick(&c.spectrum, "spectrum", &["torus2d", "torus3d", "interval", "sphere"])?;
            let mut d = vec![("spectrum", json!(s)), ("L", json!(3.0)), ("beta", json!(0.0)), ("count", json!(1000))];
            match s {
                "torus2d" | "torus3d" => d.push(("lmax", json!(10_000))),
                _ => d.push(("modes", json!(64))),
            }
            d
        }
        Kind::ShellSearch => vec![("k", json!(2.0)), ("rho", json!(3.0)), ("nmax", json!(2000))],
        Kind::ManifoldBuild => {
            let mut d = rde();
            let m = pick(&c.method, "method", &["lp", "bvp"])?;
            d.extend([("method", json!(m)), ("points", json!(9)), ("extent", json!(1.5)), ("dt", json!(2e-3))]);
            d.push(("tol", json!(if m == "lp" { 1e-8 } else { 1e-9 })));
            d
        }
        Kind::TrackVerify => {
            let mut d = rde();
            d.extend([
                ("points", json!(21)),
                ("extent", json!(1.5)),
                ("starts", json!(20)),
                ("kick", json!(0.08)),
                ("horizon", json!(0.5)),
                ("dt", json!(2e-3)),
                ("seed", json!(0)),
            ]);
            d
        }
        Kind::ConeCheck => {
            let m = pick(&c.model, "model", &["rde", "rotation"])?;
            let mut d = if m == "rde" {
                let mut d = rde();
                d.extend([("starts", json!(100)), ("ball", json!(3.0))]);
                d
            } else {
                vec![("modes", json!(8)), ("cut", json!(2)), ("strength", json!(3.0)), ("starts", json!(20)), ("ball", json!(2.0))]
            };
            d.extend([("model", json!(m)), ("horizon", json!(1.0)), ("dt", json!(2e-3)), ("seed", json!(0))]);
            d
        }
        Kind::DimensionEstimate => {
            let s = pick(&c.set, "set", &["square", "segment", "hopf"])?;
            let mut d = vec![("set", json!(s))];
            match s {
                "square" => d.extend([
                    ("points", json!(10_000)),
                    ("lo", json!(sq_lo)),
                    ("hi", json!(sq_lo * 10f64.powf(1.5))),
                    ("radii", json!(8)),
                    ("expect", json!(2.0)),
                    ("tol", json!(0.2)),
                ]),
                "segment" => d.extend([
                    ("points", json!(1000)),
                    ("lo", json!(3e-3)),
                    ("hi", json!(0.3)),
                    ("radii", json!(9)),
                    ("expect", json!(1.0)),
                    ("tol", json!(0.15)),
                ]),
                _ => d.extend([
                    ("points", json!(1000)),
                    ("modes", json!(8)),
                    ("dt", json!(1e-3)),
                    ("seed", json!(0)),
                    ("lo", json!(0.02)),
                    ("hi", json!(0.64)),
                    ("radii", json!(8)),
                    ("expect", json!(1.0)),
                    ("tol", json!(0.15)),
                ]),
            }
            d
        }
        Kind::ManeProject => vec![
            ("points", json!(400)),
            ("rank", json!(3)),
            ("trials", json!(100)),
            ("modes", json!(8)),
            ("dt", json!(1e-3)),
            ("seed", json!(0)),
        ],
        Kind::CounterexampleRun => {
            let w = pick(&c.which, "which", &["floquet", "c1", "segments"])?;
            let mut d = vec![("which", json!(w))];
            match w {
                "floquet" => d.extend([
                    ("T", json!(1.0)),
                    ("L", json!(4.0)),
                    ("modes", json!(16)),
                    ("steps", json!(20_000)),
                    ("tol", json!(1e-6)),
                ]),
                "c1" => d.extend([("L", json!(1.5)), ("modes", json!(8))]),
                _ => d.extend([("modes", json!(6)), ("tol", json!(1e-6))]),
            }
            d
        }
    };
    Ok(d)
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(e.message().to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serialises")
    }

    /// Names of the keys that are set.
    pub fn set_keys(&self) -> Vec<String> {
        to_map(self).into_iter().filter(|(_, v)| !v.is_null()).map(|(k, _)| k).collect()
    }

    /// Applies `INMAN_<KEY>` from `lookup` to the common keys the variant reads.
    /// With `overwrite` the environment beats keys already set.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>, overwrite: bool) -> Result<()> {
        let kind: Kind = self.kind.as_deref().unwrap_or("").parse()?;
        let used: Vec<&str> = defaults_for(kind, self)?.iter().map(|(k, _)| *k).chain(["out"]).collect();
        let mut m = to_map(self);
        for key in ENV_KEYS.iter().filter(|k| used.contains(k)) {
            let var = format!("{ENV_PREFIX}{}", key.to_uppercase());
            let Some(raw) = lookup(&var) else { continue };
            if m.contains_key(*key) && !overwrite {
                continue;
            }
            let v = if *key == "out" {
                json!(raw)
            } else {
                serde_json::from_str::<Value>(raw.trim())
                    .ok()
                    .filter(Value::is_number)
                    .ok_or_else(|| CliError::Validation(format!("{var}={raw} is not a number")))?
            };
            m.insert(key.to_string(), v);
        }
        *self = from_map(m)?;
        Ok(())
    }

    /// Fills defaults and validates; the result is what a run echoes.
    pub fn resolve(self) -> Result<(Kind, ExperimentConfig)> {
        let kind: Kind = match &self.kind {
            Some(k) => k.parse()?,
            None => return Err(CliError::Validation("missing `kind`".into())),
        };
        let defaults = defaults_for(kind, &self)?;
        let mut m = to_map(&self);
        for key in m.keys() {
            if key != "kind" && key != "out" && !defaults.iter().any(|(k, _)| k == key) {
                return Err(CliError::Validation(format!("`{key}` is not read by {kind} with these settings")));
            }
        }
        for (k, v) in defaults {
            m.entry(k).or_insert(v);
        }
        let c = from_map(m)?;
        c.check_ranges(kind)?;
        Ok((kind, c))
    }

    fn check_ranges(&self, kind: Kind) -> Result<()> {
        fn bad(key: &str, why: &str) -> CliError {
            CliError::Validation(format!("`{key}` {why}"))
        }
        let positive = [
            ("dt", self.dt),
            ("tol", self.tol),
            ("L", self.l),
            ("k", self.k),
            ("rho", self.rho),
            ("kappa", self.kappa),
            ("cutoff", self.cutoff),
            ("strength", self.strength),
            ("extent", self.extent),
            ("kick", self.kick),
            ("ball", self.ball),
            ("horizon", self.horizon),
            ("lo", self.lo),
            ("hi", self.hi),
            ("T", self.t),
        ];
        for (k, v) in positive {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(bad(k, &format!("must be positive and finite, got {v}")));
                }
            }
        }
        let counts = [
            ("modes", self.modes),
            ("count", self.count),
            ("cut", self.cut),
            ("points", self.points),
            ("starts", self.starts),
            ("radii", self.radii),
            ("rank", self.rank),
            ("trials", self.trials),
            ("steps", self.steps),
        ];
        for (k, v) in counts {
            if v == Some(0) {
                return Err(bad(k, "must be at least 1"));
            }
        }
        if self.lmax == Some(0) || self.nmax == Some(0) {
            return Err(bad("lmax/nmax", "must be at least 1"));
        }
        if let Some(b) = self.beta {
            if !(b > -2.0 && b <= 0.0) {
                return Err(bad("beta", &format!("must lie in (-2, 0], got {b}")));
            }
        }
        if let Some(e) = self.expect {
            if !(e.is_finite() && e >= 0.0) {
                return Err(bad("expect", "must be a finite nonnegative dimension"));
            }
        }
        if let (Some(lo), Some(hi)) = (self.lo, self.hi) {
            if hi <= lo {
                return Err(bad("hi", "must exceed `lo`"));
            }
            if hi / lo < 10f64.powf(1.5) * (1.0 - 1e-12) {
                return Err(bad("hi", "must be at least 10^1.5 times `lo`"));
            }
        }
        if let (Some(cut), Some(m)) = (self.cut, self.modes) {
            if cut >= m {
                return Err(bad("cut", &format!("must be below modes = {m}")));
            }
        }
        match kind {
            Kind::ManifoldBuild | Kind::TrackVerify => {
                if self.points.unwrap_or(0) < 2 {
                    return Err(bad("points", "needs at least 2 nodes per axis"));
                }
            }
            Kind::ManeProject => {
                if self.rank >= self.modes {
                    return Err(bad("rank", "must be below modes"));
                }
                if self.points.unwrap_or(0) < 2 {
                    return Err(bad("points", "needs at least 2 samples"));
                }
            }
            Kind::ConeCheck if self.model.as_deref() == Some("rotation") && self.modes.unwrap_or(0) < 3 => {
                return Err(bad("modes", "rotation needs at least 3 modes"));
            }
            Kind::CounterexampleRun => match self.which.as_deref() {
                Some("floquet") if self.steps.unwrap_or(0) < 2000 => return Err(bad("steps", "must be at least 2000")),
                Some("floquet") | Some("c1") if self.modes.unwrap_or(0) < 3 => return Err(bad("modes", "must be at least 3")),
                _ => {}
            },
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<(Kind, ExperimentConfig)> {
        ExperimentConfig::from_toml(text)?.resolve()
    }

    #[test]
    fn unknown_key_is_rejected() {
        let e = ExperimentConfig::from_toml("kind = \"gap-find\"\nlmaxx = 3").unwrap_err();
        assert!(matches!(e, CliError::Validation(_)));
        assert!(e.to_string().contains("lmaxx"), "{e}");
    }

    #[test]
    fn unread_key_is_rejected() {
        assert!(cfg("kind = \"gap-find\"\ndt = 0.1").is_err());
        // modes is read by the interval spectrum but not by the torus
        assert!(cfg("kind = \"gap-find\"\nspectrum = \"torus2d\"\nmodes = 5").is_err());
        let (_, c) = cfg("kind = \"gap-find\"\nspectrum = \"interval\"\nmodes = 5").unwrap();
        assert_eq!(c.lmax, None);
    }

    #[test]
    fn ranges_are_checked() {
        assert!(cfg("kind = \"manifold-build\"\ndt = -1.0").is_err());
        assert!(cfg("kind = \"manifold-build\"\ncut = 32").is_err());
        assert!(cfg("kind = \"gap-find\"\nbeta = 0.5").is_err());
        assert!(cfg("kind = \"dimension-estimate\"\nlo = 0.5\nhi = 0.1").is_err());
        assert!(cfg("kind = \"dimension-estimate\"\nlo = 0.1\nhi = 1.0").is_err());
        assert!(cfg("kind = \"counterexample-run\"\nsteps = 10").is_err());
        assert!(cfg("kind = \"mane-project\"\nrank = 8").is_err());
    }

    #[test]
    fn integers_are_accepted_for_reals() {
        let (_, c) = cfg("kind = \"gap-find\"\nL = 3\nlmax = 100").unwrap();
        assert_eq!(c.l, Some(3.0));
    }

    #[test]
    fn bad_choice_suggests() {
        let e = cfg("kind = \"counterexample-run\"\nwhich = \"floquett\"").unwrap_err().to_string();
        assert!(e.contains("did you mean `floquet`"), "{e}");
    }

    #[test]
    fn environment_overrides() {
        let env = |k: &str| match k {
            "INMAN_SEED" => Some("7".to_string()),
            "INMAN_DT" => Some("0.001".to_string()),
            _ => None,
        };
        let mut c = ExperimentConfig::from_toml("kind = \"cone-check\"\nseed = 3").unwrap();
        c.apply_env(env, false).unwrap();
        assert_eq!((c.seed, c.dt), (Some(3), Some(1e-3)));
        c.apply_env(env, true).unwrap();
        assert_eq!(c.seed, Some(7));
        // not read by gap-find, so not applied
        let mut g = ExperimentConfig::from_toml("kind = \"gap-find\"").unwrap();
        g.apply_env(env, true).unwrap();
        assert_eq!(g.dt, None);
        let mut c = ExperimentConfig::from_toml("kind = \"cone-check\"").unwrap();
        assert!(c.apply_env(|_| Some("abc".into()), true).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let (_, c) = cfg("kind = \"track-verify\"\nstarts = 3").unwrap();
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }
}
