//! Report assembly and serialization: verdicts, the JSON report envelope,
//! and CSV profile output.

use crate::error::Result;
use crate::monotonicity::{DensityEstimate, IdentityReport, MonotonicityVerdict, RadialProfile};
use crate::support::SupportInequalityVerdict;
use crate::tangent_point::CurveEnergyReport;
use crate::willmore::{LiYauVerdict, WillmoreReport};
use serde::Serialize;
use std::path::Path;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One named check with its measured value.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl Verdict {
    pub fn new(name: &str, pass: bool, measured: f64, expected: f64, tolerance: f64) -> Verdict {
        Verdict { name: name.to_string(), pass, measured, expected, tolerance }
    }
}

/// Headline quantities, handy for scripting against the report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub willmore_energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_tilde_density: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e1: Option<f64>,
}

/// Profile plus its verdict for one center.
#[derive(Debug, Clone, Serialize)]
pub struct CenterAnalysis {
    pub profile: RadialProfile,
    pub verdict: MonotonicityVerdict,
    pub identity: IdentityReport,
    pub density: DensityEstimate,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Results {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub willmore: Option<WillmoreReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub li_yau: Option<LiYauVerdict>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub monotonicity: Vec<CenterAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<SupportInequalityVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_energy: Option<CurveEnergyReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub timestamp: String,
    pub input: String,
    pub results: Results,
    pub verdicts: Vec<Verdict>,
}

impl AnalysisReport {
    pub fn new(input: &str) -> AnalysisReport {
        AnalysisReport {
            tool_version: TOOL_VERSION.to_string(),
            timestamp: rfc3339_now(),
            input: input.to_string(),
            results: Results::default(),
            verdicts: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// RFC 3339 timestamp (UTC, seconds) without external clock dependencies.
pub fn rfc3339_now() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs() as i64)
        .unwrap_or(0);
    rfc3339_from_unix(secs)
}

fn rfc3339_from_unix(secs: i64) -> String {
    let days = secs.div_euclid(86_400);
    let rem = secs.rem_euclid(86_400);
    let (h, m, s) = (rem / 3600, (rem % 3600) / 60, rem % 60);
    // Civil-from-days (proleptic Gregorian).
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let mth = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = if mth <= 2 { y + 1 } else { y };
    format!("{y:04}-{mth:02}-{d:02}T{h:02}:{m:02}:{s:02}Z")
}

/// Write a report as JSON.
pub fn save_report(path: &Path, report: &AnalysisReport) -> Result<()> {
    std::fs::write(path, report.to_json())?;
    Ok(())
}

/// Write a radial profile as CSV.
pub fn save_profile(path: &Path, profile: &RadialProfile) -> Result<()> {
    std::fs::write(path, profile.to_csv())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotonicity::RadialProfile;

    #[test]
    fn timestamp_format() {
        assert_eq!(rfc3339_from_unix(0), "1970-01-01T00:00:00Z");
        assert_eq!(rfc3339_from_unix(951_782_400), "2000-02-29T00:00:00Z");
    }

    #[test]
    fn empty_profile_is_header_only() {
        let p = RadialProfile {
            center: [0.0; 3],
            radii: vec![],
            g: vec![],
            g_hat: vec![],
            sum: vec![],
            annulus_lhs: vec![],
            delta_rhs: vec![],
        };
        assert_eq!(p.to_csv(), "r,g,g_hat,sum,lhs_residual,rhs_diff\n");
    }

    #[test]
    fn profile_rows_match_radii() {
        let p = RadialProfile {
            center: [0.0; 3],
            radii: (1..=10).map(|k| k as f64 * 0.1).collect(),
            g: vec![0.0; 10],
            g_hat: vec![0.0; 10],
            sum: vec![0.0; 10],
            annulus_lhs: vec![0.0; 10],
            delta_rhs: vec![0.0; 10],
        };
        let csv = p.to_csv();
        assert_eq!(csv.lines().count(), 11);
        let radii: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert!(radii.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn report_json_has_envelope_keys() {
        let mut r = AnalysisReport::new("disk.off");
        r.results.summary = Some(Summary {
            willmore_energy: Some(6.2832),
            ..Default::default()
        });
        r.verdicts.push(Verdict::new("demo", true, 1.0, 1.0, 0.1));
        let json = r.to_json();
        for key in ["tool_version", "timestamp", "input", "results", "verdicts", "willmore_energy"] {
            assert!(json.contains(key), "missing {key}");
        }
    }
}
