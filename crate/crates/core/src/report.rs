//! Versioned JSON reports.
//!
//! A report is written to a temporary file in the target directory and
//! renamed into place. Output is a pure function of the results: maps are
//! ordered and nothing time- or host-dependent is recorded.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardcore_sim::{ConcentrationVerdict, DecompositionVerdict, NuMomentVerdict, SeparationTable, TrajectoryStats};
use crate::mixing::{MixingCurve, MixingReport};
use crate::projections::SweepRow;
use crate::schedules::Certificate;
use crate::spectral::SpectralReport;
use crate::suites::{CertificateStats, CertifiedNormStats};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Eigenvalues of a reversible kernel, descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub label: String,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum ResultBody {
    Spectral(SpectralReport),
    Spectrum(Spectrum),
    Mixing(MixingReport),
    MixingCurve(MixingCurve),
    Certificate(Certificate),
    CertificateStats(CertificateStats),
    CertifiedNorm(CertifiedNormStats),
    ProjectionSweep(Vec<SweepRow>),
    Separation(SeparationTable),
    Trajectory(TrajectoryStats),
    NuMoments(NuMomentVerdict),
    Decomposition(DecompositionVerdict),
    Concentration(ConcentrationVerdict),
}

impl ResultBody {
    /// Pass/fail for verdict-bearing results, `None` for plain data.
    pub fn verdict(&self) -> Option<bool> {
        match self {
            ResultBody::Spectral(r) => Some(r.pass),
            ResultBody::Mixing(r) => Some(r.sandwich_holds()),
            ResultBody::Certificate(c) => Some(c.accepted),
            ResultBody::CertificateStats(s) => Some(s.pass),
            ResultBody::CertifiedNorm(s) => Some(s.pass),
            ResultBody::Separation(t) => Some(t.rows.iter().all(|r| r.bound_check)),
            ResultBody::NuMoments(v) => Some(v.pass),
            ResultBody::Decomposition(v) => Some(v.pass),
            ResultBody::Concentration(v) => Some(v.pass),
            ResultBody::Spectrum(_)
            | ResultBody::MixingCurve(_)
            | ResultBody::ProjectionSweep(_)
            | ResultBody::Trajectory(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedResult {
    pub name: String,
    #[serde(flatten)]
    pub body: ResultBody,
}

impl NamedResult {
    pub fn new(name: impl Into<String>, body: ResultBody) -> Self {
        Self { name: name.into(), body }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub results: Vec<NamedResult>,
    pub overall_pass: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, config: serde_json::Value, results: Vec<NamedResult>) -> Self {
        let overall_pass = results.iter().all(|r| r.body.verdict().unwrap_or(true));
        Self {
            schema_version: SCHEMA_VERSION,
            tool: TOOL.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            command: command.into(),
            config,
            results,
            overall_pass,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    write_atomic(path, &report.to_json())
}

pub fn parse_report(text: &str) -> Result<Report> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Schema(format!("not a JSON report: {e}")))?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        None => return Err(Error::Schema("missing field `schema_version`".into())),
        Some(v) if v != SCHEMA_VERSION as u64 => {
            return Err(Error::Schema(format!(
                "schema version {v} is not supported (expected {SCHEMA_VERSION})"
            )))
        }
        Some(_) => {}
    }
    serde_json::from_value(value).map_err(|e| Error::Schema(format!("schema version {SCHEMA_VERSION}: {e}")))
}

pub fn read_report(path: &Path) -> Result<Report> {
    parse_report(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::{certify_sequence, UpdateSequence};

    fn sample() -> Report {
        let cert = certify_sequence(&UpdateSequence::new(vec![0, 1, 2], 3).unwrap()).with_delta(0.25);
        let rejected = certify_sequence(&UpdateSequence::new(vec![0, 0, 0], 3).unwrap());
        Report::new(
            "certify",
            serde_json::json!({"n": 3}),
            vec![
                NamedResult::new("accepted", ResultBody::Certificate(cert)),
                NamedResult::new(
                    "spectrum",
                    ResultBody::Spectrum(Spectrum {
                        label: "x".into(),
                        eigenvalues: vec![1.0, 0.5],
                    }),
                ),
                NamedResult::new("rejected", ResultBody::Certificate(rejected)),
            ],
        )
    }

    #[test]
    fn overall_pass_needs_every_verdict() {
        let r = sample();
        assert!(!r.overall_pass);
        let mut ok = r.clone();
        ok.results.pop();
        assert!(Report::new("certify", ok.config.clone(), ok.results).overall_pass);
    }

    #[test]
    fn round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let r = sample();
        write_report(&r, &path).unwrap();
        assert_eq!(read_report(&path).unwrap(), r);
        assert_eq!(fs::read_to_string(&path).unwrap(), r.to_json());
    }

    #[test]
    fn schema_errors_name_the_problem() {
        let mut v: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        v["schema_version"] = 99.into();
        let err = parse_report(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("99"), "{err}");

        let mut v: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        v.as_object_mut().unwrap().remove("overall_pass");
        let err = parse_report(&v.to_string()).unwrap_err();
        assert!(matches!(&err, Error::Schema(m) if m.contains("overall_pass")), "{err}");

        let mut v: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        v.as_object_mut().unwrap().remove("schema_version");
        let err = parse_report(&v.to_string()).unwrap_err();
        assert!(matches!(&err, Error::Schema(m) if m.contains("schema_version")), "{err}");
    }
}
