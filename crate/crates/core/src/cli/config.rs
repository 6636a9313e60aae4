//! The JSON run configuration shared by every subcommand.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::parallelisms::{Gamma, ParallelismSpec, Placement};
use crate::spreads::{Handedness, Profile, RotationalSpread};
use crate::verify::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: Profile,
    #[serde(default = "right")]
    pub handedness: Handedness,
    #[serde(default)]
    pub placement: Placement,
    #[serde(default)]
    pub gamma: Gamma,
    #[serde(default = "yes")]
    pub oriented: bool,
    /// Subcommand for `run`, e.g. `"spread check"`.
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tol: Tolerances,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Second configuration for `distinct`; only its geometry is used.
    #[serde(default)]
    pub other: Option<Box<RunConfig>>,
}

fn right() -> Handedness {
    Handedness::Right
}

fn yes() -> bool {
    true
}

fn default_samples() -> usize {
    1000
}

impl RunConfig {
    pub fn new(profile: Profile) -> Self {
        Self {
            profile,
            handedness: Handedness::Right,
            placement: Placement::default(),
            gamma: Gamma::default(),
            oriented: true,
            command: None,
            samples: default_samples(),
            seed: 0,
            tol: Tolerances::default(),
            output: None,
            other: None,
        }
    }

    /// Accepts either a full configuration or a bare profile object
    /// (recognized by its `"kind"` field).
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = if value.get("kind").is_some() {
            Self::new(serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?)
        } else {
            serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?
        };
        cfg.validate().map_err(|e| match e {
            Error::Config(m) => Error::Config(m),
            e => Error::Config(e.to_string()),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn validate(&self) -> Result<()> {
        Placement::new(self.placement.s, self.placement.t)?;
        let t = &self.tol;
        for (name, v) in [
            ("algebraic", t.algebraic),
            ("solver", t.solver),
            ("classification", t.classification),
            ("round_trip", t.round_trip),
            ("acceptance", t.acceptance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if let Some(o) = &self.other {
            o.validate()?;
        }
        Ok(())
    }

    /// The spread with the placement folded into the profile.
    pub fn spread(&self) -> Result<RotationalSpread> {
        let p = self.profile.transform(self.placement.s, self.placement.t)?;
        Ok(RotationalSpread::new(p, self.handedness))
    }

    pub fn parallelism_spec(&self) -> ParallelismSpec {
        ParallelismSpec::new(self.profile.clone())
            .handedness(self.handedness)
            .placement(self.placement.s, self.placement.t)
            .oriented(self.oriented)
            .gamma(self.gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_profile_gets_defaults() {
        let cfg = RunConfig::from_json(r#"{"kind": "satz2", "d": 1.0}"#).unwrap();
        assert_eq!(cfg.profile, Profile::satz2(1.0).unwrap());
        assert_eq!(cfg.samples, 1000);
        assert!(cfg.oriented);
        assert_eq!(cfg.handedness, Handedness::Right);
    }

    #[test]
    fn full_config_parses() {
        let text = r#"{
            "profile": {"kind": "regular", "d": 2.0},
            "handedness": -1,
            "placement": {"s": 2.0, "t": 0.5},
            "gamma": "SO2",
            "oriented": false,
            "command": "spread check",
            "samples": 10,
            "seed": 7,
            "tol": {"solver": 1e-8}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.handedness, Handedness::Left);
        assert_eq!(cfg.placement.t, 0.5);
        assert_eq!(cfg.tol.solver, 1e-8);
        assert_eq!(cfg.tol.algebraic, 1e-12);
        assert_eq!(cfg.command.as_deref(), Some("spread check"));
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            r#"{"profile": {"kind": "regular", "d": 1.0}, "colour": 1}"#,
            r#"{"profile": {"kind": "regular", "d": -1.0}}"#,
            r#"{"profile": {"kind": "regular", "d": 1.0}, "placement": {"s": 0.0, "t": 0.0}}"#,
            r#"{"profile": {"kind": "regular", "d": 1.0}, "tol": {"solver": -1.0}}"#,
            r#"{"profile": {"kind": "cubic"}}"#,
            "not json",
        ] {
            assert!(matches!(RunConfig::from_json(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn round_trips() {
        let mut cfg = RunConfig::new(Profile::satz1(0.5, 1.0).unwrap());
        cfg.other = Some(Box::new(RunConfig::new(Profile::regular(1.0).unwrap())));
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }
}
