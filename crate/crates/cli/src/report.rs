use serde::Serialize;
use serde_json::Value;
use shearmap::{Certificate, HarnessReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One check. `margin` is the signed slack: non-negative means the check
/// holds. For error checks it is `tolerance - error`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub margin: f64,
    pub certificate: Option<Certificate>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn positive(name: impl Into<String>, margin: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            margin,
            certificate: None,
            passed: margin >= -tolerance,
            note: None,
        }
    }

    pub fn error_bound(name: impl Into<String>, error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            margin: tolerance - error,
            certificate: None,
            passed: error <= tolerance,
            note: None,
        }
    }

    pub fn certificate(name: impl Into<String>, cert: Option<Certificate>, fallback_margin: f64) -> Self {
        let passed = cert.as_ref().is_some_and(Certificate::passes);
        let margin = cert.as_ref().map_or(fallback_margin, |c| c.min_value);
        Self {
            name: name.into(),
            margin,
            note: (!passed).then(|| "no certificate at grid resolution".to_string()),
            certificate: cert,
            passed,
        }
    }

    pub fn from_harness(report: &HarnessReport) -> Vec<Self> {
        let mut out: Vec<Self> = report
            .hypotheses
            .iter()
            .map(|h| Self {
                name: format!("{}: {}", report.theorem_id, h.name),
                margin: h.margin,
                certificate: None,
                passed: h.holds,
                note: None,
            })
            .collect();
        out.push(Self::certificate(
            format!("{}: convexity certificate", report.theorem_id),
            report.conclusion_certificate.clone(),
            f64::NEG_INFINITY,
        ));
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub results: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
    pub artifacts: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, inputs: Value, results: Vec<CheckResult>) -> Self {
        let passed = results.iter().all(|r| r.passed);
        Self {
            tool: "shearmap",
            version: TOOL_VERSION,
            command: command.to_string(),
            inputs,
            results,
            data: None,
            artifacts: Vec::new(),
            passed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
