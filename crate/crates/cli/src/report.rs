//! JSON report envelope and CSV tables.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use chocobar::nimpass::{IsomorphismReport, PassTheoremReport};
use chocobar::nsprop::NsReport;
use chocobar::verify::{Mismatch, Verdict, VerificationReport};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ReportEnvelope {
    pub schema_version: u32,
    pub tool: Tool,
    pub command: Vec<String>,
    pub timestamp: String,
    pub seed: u64,
    pub payload: Payload,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Payload {
    Verification(VerificationReport),
    Ns(NsPayload),
    GrundyTable(GrundyTablePayload),
}

#[derive(Debug, Serialize)]
pub struct NsPayload {
    pub function: String,
    pub verdict: String,
    #[serde(flatten)]
    pub report: NsReport,
}

#[derive(Debug, Serialize)]
pub struct GrundyTablePayload {
    pub game: String,
    /// Coordinate names followed by `grundy`.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass_theorem: Option<PassSummary>,
}

/// Pass-Nim verdict without the full value table, which goes in `rows`.
#[derive(Debug, Serialize)]
pub struct PassSummary {
    pub t: u32,
    pub k: usize,
    pub bound: u32,
    pub states_checked: u64,
    pub expected_to_hold: bool,
    pub characterization_holds: bool,
    pub witness: Option<Mismatch>,
    pub witness_reverified: Option<bool>,
    pub verdict: Verdict,
    pub summary: String,
    pub isomorphism: IsomorphismReport,
}

impl PassSummary {
    pub fn new(r: &PassTheoremReport, isomorphism: IsomorphismReport) -> Self {
        Self {
            t: r.t,
            k: r.k,
            bound: r.bound,
            states_checked: r.states_checked,
            expected_to_hold: r.expected_to_hold,
            characterization_holds: r.characterization_holds,
            witness: r.witness.clone(),
            witness_reverified: r.witness_reverified,
            verdict: r.verdict,
            summary: r.summary.clone(),
            isomorphism,
        }
    }
}

impl ReportEnvelope {
    pub fn new(seed: u64, payload: Payload) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: Tool {
                name: env!("CARGO_BIN_NAME"),
                version: env!("CARGO_PKG_VERSION"),
            },
            command: std::env::args().skip(1).collect(),
            timestamp: timestamp(),
            seed,
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// RFC 3339 UTC time; `SOURCE_DATE_EPOCH` overrides the clock.
fn timestamp() -> String {
    let secs = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<i64>().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs() as i64)
                .unwrap_or(0)
        });
    OffsetDateTime::from_unix_timestamp(secs)
        .unwrap_or(OffsetDateTime::UNIX_EPOCH)
        .format(&Rfc3339)
        .expect("RFC 3339 formatting")
}

/// Header-first, comma-separated, LF-terminated.
pub fn csv_table(columns: &[String], rows: &[Vec<u32>]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let cols = vec!["y".to_string(), "z".into(), "grundy".into()];
        assert_eq!(csv_table(&cols, &[vec![1, 2, 3]]), "y,z,grundy\n1,2,3\n");
    }

    #[test]
    fn payload_tags() {
        let p = Payload::GrundyTable(GrundyTablePayload {
            game: "g".into(),
            columns: vec![],
            rows: vec![],
            pass_theorem: None,
        });
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["kind"], "grundy_table");
    }
}
