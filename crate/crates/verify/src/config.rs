//! Suite configuration: TOML file, command-line overrides, validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::checks::{self, SUITES};
use crate::VerifyError;

pub const DEFAULT_POINTS: usize = 16;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_JET_ORDER: usize = 3;
pub const DEFAULT_RANDOM_XI: usize = 16;

/// Which vector fields feed the checks that hold for arbitrary ξ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XiSelection {
    Killing,
    Random(usize),
}

impl XiSelection {
    pub fn parse(s: &str) -> Result<Self, VerifyError> {
        let bad = || VerifyError::Config(format!("invalid --xi `{s}`; expected killing, random or random:N"));
        match s {
            "killing" => Ok(XiSelection::Killing),
            "random" => Ok(XiSelection::Random(DEFAULT_RANDOM_XI)),
            _ => {
                let n = s.strip_prefix("random:").ok_or_else(bad)?;
                match n.parse::<usize>() {
                    Ok(n) if n > 0 => Ok(XiSelection::Random(n)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl fmt::Display for XiSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XiSelection::Killing => write!(f, "killing"),
            XiSelection::Random(n) => write!(f, "random:{n}"),
        }
    }
}

impl Serialize for XiSelection {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Fully resolved configuration, echoed into the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub suite: String,
    pub metric: String,
    pub theory: Option<String>,
    pub fields: Vec<String>,
    pub xi: XiSelection,
    pub points: usize,
    pub seed: u64,
    pub jet_order: usize,
    /// global override for bound-type checks
    pub tol: Option<f64>,
    /// per-check overrides
    pub tolerances: BTreeMap<String, f64>,
    /// variational quadrature cells per axis
    pub grid: Option<usize>,
}

impl SuiteConfig {
    pub fn new(suite: &str, metric: &str) -> Self {
        Self {
            suite: suite.to_string(),
            metric: metric.to_string(),
            theory: None,
            fields: Vec::new(),
            xi: XiSelection::Random(DEFAULT_RANDOM_XI),
            points: DEFAULT_POINTS,
            seed: DEFAULT_SEED,
            jet_order: DEFAULT_JET_ORDER,
            tol: None,
            tolerances: BTreeMap::new(),
            grid: None,
        }
    }

    /// Effective tolerance of `spec` under this configuration.
    pub fn tolerance(&self, spec: &checks::CheckSpec) -> f64 {
        if let Some(t) = self.tolerances.get(spec.id) {
            return *t;
        }
        match (spec.kind, self.tol) {
            (checks::Kind::Floor, _) | (_, None) => spec.tolerance,
            (_, Some(t)) => t,
        }
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        if !SUITES.contains(&self.suite.as_str()) {
            return Err(VerifyError::Config(format!(
                "unknown suite `{}`; expected one of {}",
                self.suite,
                SUITES.join(", ")
            )));
        }
        if let Some(t) = &self.theory {
            if t != "scalar" && t != "maxwell" {
                return Err(VerifyError::Config(format!("unknown theory `{t}`; expected scalar or maxwell")));
            }
        }
        if self.points == 0 {
            return Err(VerifyError::Config("--points must be at least 1".into()));
        }
        if self.jet_order > tilde_core::jet::MAX_ORDER {
            return Err(VerifyError::Config(format!(
                "jet order {} exceeds the maximum {}",
                self.jet_order,
                tilde_core::jet::MAX_ORDER
            )));
        }
        if let Some(spec) = checks::in_suite(&self.suite).find(|c| c.min_order > self.jet_order) {
            return Err(VerifyError::Config(format!(
                "check `{}` needs jet order >= {}, got {}",
                spec.id, spec.min_order, self.jet_order
            )));
        }
        for id in self.tolerances.keys() {
            if checks::find(id).is_none() {
                return Err(VerifyError::Config(format!("tolerance override for unknown check `{id}`")));
            }
        }
        if let Some(t) = self.tol.iter().chain(self.tolerances.values()).find(|t| !(**t > 0.0)) {
            return Err(VerifyError::Config(format!("tolerance must be positive, got {t}")));
        }
        match self.grid {
            Some(0) => Err(VerifyError::Config("--grid must be at least 1".into())),
            _ => Ok(()),
        }
    }
}

/// Key-value file mirroring the command-line flags.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub suite: Option<String>,
    pub metric: Option<String>,
    pub theory: Option<String>,
    pub fields: Option<Vec<String>>,
    pub xi: Option<String>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub jet_order: Option<usize>,
    pub tol: Option<f64>,
    pub tolerances: Option<BTreeMap<String, f64>>,
    pub grid: Option<usize>,
    pub report: Option<String>,
    pub quiet: Option<bool>,
    pub timing: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, VerifyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| VerifyError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| VerifyError::Config(format!("{}: {e}", path.display())))
    }
}

/// Splits a `--tol` value into a global tolerance or a per-check override.
pub fn parse_tol(s: &str) -> Result<(Option<String>, f64), VerifyError> {
    let bad = || VerifyError::Config(format!("invalid --tol `{s}`; expected a number or check-id=number"));
    match s.split_once('=') {
        Some((id, v)) => Ok((Some(id.trim().to_string()), v.trim().parse().map_err(|_| bad())?)),
        None => Ok((None, s.trim().parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_parsing() {
        assert_eq!(XiSelection::parse("killing").unwrap(), XiSelection::Killing);
        assert_eq!(XiSelection::parse("random:3").unwrap(), XiSelection::Random(3));
        assert_eq!(XiSelection::parse("random").unwrap().to_string(), "random:16");
        assert!(XiSelection::parse("random:0").is_err());
        assert!(XiSelection::parse("boost").is_err());
    }

    #[test]
    fn tolerance_resolution() {
        let mut c = SuiteConfig::new("gauge", "minkowski4");
        let floor = checks::find("gauge-tc-control").unwrap();
        let bound = checks::find("gauge-tm").unwrap();
        c.tol = Some(1e-6);
        assert_eq!(c.tolerance(bound), 1e-6);
        assert_eq!(c.tolerance(floor), 1e-4);
        c.tolerances.insert("gauge-tc-control".into(), 1e-2);
        assert_eq!(c.tolerance(floor), 1e-2);
    }

    #[test]
    fn order_too_low_names_the_check() {
        let mut c = SuiteConfig::new("emt-onshell", "minkowski4");
        c.jet_order = 2;
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("div-tb"), "{e}");
    }

    #[test]
    fn tol_values() {
        assert_eq!(parse_tol("1e-9").unwrap(), (None, 1e-9));
        assert_eq!(parse_tol("div-tb=1e-7").unwrap(), (Some("div-tb".into()), 1e-7));
        assert!(parse_tol("x").is_err());
    }
}
