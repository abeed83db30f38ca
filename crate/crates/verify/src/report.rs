//! Check records and the JSON report.

use serde::Serialize;

use crate::checks::{CheckSpec, Kind};
use crate::config::SuiteConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: &'static str,
    pub equation: &'static str,
    pub scenario: String,
    pub points: usize,
    pub max_abs: f64,
    pub max_rel: Option<f64>,
    pub tolerance: f64,
    pub kind: Kind,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    /// `null` unless timing was requested, so reports stay reproducible
    pub wall_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub engine_version: &'static str,
    pub config: SuiteConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl CheckReport {
    pub fn new(config: SuiteConfig, checks: Vec<CheckRecord>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        let failed = checks.len() - passed;
        Self {
            schema_version: SCHEMA_VERSION,
            engine_version: env!("CARGO_PKG_VERSION"),
            config,
            checks,
            summary: Summary {
                passed,
                failed,
                wall_ms: None,
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let cmp = if c.kind == Kind::Floor { ">=" } else { "<=" };
            let value = match (c.kind, c.max_rel) {
                (Kind::Rel, Some(r)) => r,
                _ => c.max_abs,
            };
            out.push_str(&format!(
                "{} {:<30} {:<36} {:>10.3e} {} {:.0e} ({} pts)\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.scenario,
                value,
                cmp,
                c.tolerance,
                c.points
            ));
        }
        out.push_str(&format!("{} passed, {} failed\n", self.summary.passed, self.summary.failed));
        out
    }
}

/// Running maximum of one check over evaluation points.
#[derive(Clone, Debug)]
pub struct Accumulator {
    spec: &'static CheckSpec,
    scenario: String,
    points: usize,
    max_abs: f64,
    max_ref: f64,
    nan: bool,
}

impl Accumulator {
    pub fn new(spec: &'static CheckSpec, scenario: impl Into<String>) -> Self {
        Self {
            spec,
            scenario: scenario.into(),
            points: 0,
            max_abs: 0.0,
            max_ref: 0.0,
            nan: false,
        }
    }

    /// Adds one point's residual and the magnitude of the terms it compares.
    pub fn add(&mut self, residual: f64, reference: f64) {
        self.points += 1;
        if residual.is_nan() || reference.is_nan() {
            self.nan = true;
        }
        self.max_abs = self.max_abs.max(residual.abs());
        self.max_ref = self.max_ref.max(reference.abs());
    }

    /// Adds an aggregate over `points` evaluations.
    pub fn add_aggregate(&mut self, residual: f64, reference: f64, points: usize) {
        self.add(residual, reference);
        self.points += points - 1;
    }

    pub fn finish(self, config: &SuiteConfig) -> CheckRecord {
        let tolerance = config.tolerance(self.spec);
        let max_abs = if self.nan { f64::NAN } else { self.max_abs };
        let max_rel = if self.max_ref > 0.0 {
            Some(max_abs / self.max_ref)
        } else {
            None
        };
        let pass = self.points > 0
            && match self.spec.kind {
                Kind::Abs => max_abs <= tolerance,
                Kind::Rel => max_rel.map_or(max_abs == 0.0, |r| r <= tolerance),
                Kind::Floor => max_abs >= tolerance,
            };
        CheckRecord {
            id: self.spec.id,
            equation: self.spec.equation,
            scenario: self.scenario,
            points: self.points,
            max_abs,
            max_rel,
            tolerance,
            kind: self.spec.kind,
            pass,
        }
    }
}
