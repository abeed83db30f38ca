//! Identity suites over the tilde-core catalog, with deterministic JSON
//! reports.

pub mod checks;
pub mod config;
pub mod report;
pub mod suites;

use thiserror::Error;
use tilde_core::scenarios::{catalog, CatalogError};

pub use config::{FileConfig, SuiteConfig, XiSelection};
pub use report::{CheckRecord, CheckReport};
pub use suites::run_suite;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("catalog claim failed: {0}")]
    Claim(String),
    #[error("evaluation error: {0}")]
    Engine(String),
}

impl VerifyError {
    pub fn exit_code(&self) -> i32 {
        match self {
            VerifyError::Config(_) | VerifyError::Engine(_) => 2,
            VerifyError::Claim(_) => 3,
        }
    }
}

impl From<CatalogError> for VerifyError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Claim { .. } => VerifyError::Claim(e.to_string()),
            CatalogError::Geometry(_) | CatalogError::Field(_) => VerifyError::Engine(e.to_string()),
            _ => VerifyError::Config(e.to_string()),
        }
    }
}

macro_rules! engine_error {
    ($($t:ty),*) => {$(
        impl From<$t> for VerifyError {
            fn from(e: $t) -> Self {
                VerifyError::Engine(e.to_string())
            }
        }
    )*};
}

engine_error!(
    tilde_core::TensorError,
    tilde_core::JetError,
    tilde_core::geometry::GeometryError,
    tilde_core::field::FieldError
);

/// Exit status for a finished suite.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;

/// Catalog listing for `list`.
pub fn list_catalog() -> String {
    let cat = catalog();
    let mut out = String::from("metrics\n");
    for m in &cat.metrics {
        out.push_str(&format!(
            "  {:<16} dim={} killing={} parallel={}{}\n",
            m.name,
            m.dim(),
            m.killing_vectors().count(),
            m.vectors.iter().filter(|v| v.parallel).count(),
            if m.flat { " flat" } else { "" }
        ));
    }
    out.push_str("fields\n");
    for f in &cat.fields {
        out.push_str(&format!(
            "  {:<22} theory={:<13} {:<9} metrics={}\n",
            f.name,
            f.theory.name(),
            if f.on_shell { "on-shell" } else { "off-shell" },
            f.metrics.join(",")
        ));
    }
    out.push_str("suites\n");
    for s in checks::SUITES {
        let ids: Vec<&str> = checks::in_suite(s).map(|c| c.id).collect();
        out.push_str(&format!("  {:<22} {}\n", s, ids.join(" ")));
    }
    out
}

pub fn explain_check(id: &str) -> Result<String, VerifyError> {
    checks::find(id)
        .map(checks::explain)
        .ok_or_else(|| VerifyError::Config(format!("unknown check `{id}`")))
}
