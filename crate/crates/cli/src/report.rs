//! The report document and its JSON and text renderings.
//!
//! Field order is fixed by the struct layouts below. Timings are the only
//! schedule-dependent data and live in an optional trailing field.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use gklo_core::gklo::Perturbation;
use gklo_core::quiver::{FramedQuiver, VertexId};
use gklo_core::verify::{RelationCheck, Status, Suite, Summary, CITED_ASSUMPTIONS};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn digest(input: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(input)))
}

#[derive(Serialize)]
pub struct DimEntry {
    pub vertex: VertexId,
    pub v: u32,
    pub w: u32,
}

#[derive(Serialize)]
pub struct QuiverInfo {
    pub vertices: Vec<VertexId>,
    pub tau: Vec<[VertexId; 2]>,
    pub edges: Vec<[VertexId; 2]>,
    pub positive_half: Vec<VertexId>,
    pub dims: Vec<DimEntry>,
}

impl QuiverInfo {
    pub fn new(fq: &FramedQuiver) -> Self {
        let vertices = fq.vertices().to_vec();
        let tau = vertices.iter().filter(|&&i| i < fq.tau(i)).map(|&i| [i, fq.tau(i)]).collect();
        QuiverInfo {
            tau,
            edges: fq.edges().iter().map(|&(s, t)| [s, t]).collect(),
            positive_half: fq.positive_vertices().collect(),
            dims: vertices.iter().map(|&i| DimEntry { vertex: i, v: fq.v(i), w: fq.w(i) }).collect(),
            vertices,
        }
    }
}

/// Options that influence results; the worker count is deliberately absent.
#[derive(Serialize)]
pub struct OptionsInfo {
    pub suites: Vec<String>,
    pub max_mode: u32,
    pub seed: Option<u64>,
    pub fail_fast: bool,
    pub perturbation: Option<String>,
}

impl OptionsInfo {
    pub fn new(suites: &[Suite], max_mode: u32, seed: Option<u64>, fail_fast: bool, p: Option<Perturbation>) -> Self {
        OptionsInfo {
            suites: suites.iter().map(|s| s.name().to_string()).collect(),
            max_mode,
            seed,
            fail_fast,
            perturbation: p.map(|p| p.name().to_string()),
        }
    }
}

/// Serializes index pairs as a JSON object in their given order.
pub struct Indices(pub Vec<(String, i64)>);

impl Serialize for Indices {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

#[derive(Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub indices: Indices,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

impl CheckEntry {
    pub fn new(c: &RelationCheck) -> Self {
        CheckEntry {
            name: c.name.clone(),
            indices: Indices(c.indices.clone()),
            status: c.status.label(),
            reason: match &c.status {
                Status::Skipped(r) => Some(r.clone()),
                _ => None,
            },
            note: c.note.clone(),
            residual: c.residual.as_ref().map(|r| r.to_string()),
        }
    }
}

#[derive(Serialize)]
pub struct SummaryInfo {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl From<Summary> for SummaryInfo {
    fn from(s: Summary) -> Self {
        SummaryInfo { total: s.total, passed: s.passed, failed: s.failed, skipped: s.skipped }
    }
}

#[derive(Serialize)]
pub struct Timing {
    pub check: String,
    pub seconds: f64,
}

#[derive(Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub input_digest: String,
    pub quiver: QuiverInfo,
    pub options: OptionsInfo,
    pub cited_assumptions: Vec<&'static str>,
    pub checks: Vec<CheckEntry>,
    pub summary: SummaryInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl ReportDocument {
    pub fn new(
        input: &[u8],
        fq: &FramedQuiver,
        options: OptionsInfo,
        checks: &[RelationCheck],
        with_timings: bool,
    ) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION,
            input_digest: digest(input),
            quiver: QuiverInfo::new(fq),
            options,
            cited_assumptions: CITED_ASSUMPTIONS.to_vec(),
            checks: checks.iter().map(CheckEntry::new).collect(),
            summary: gklo_core::verify::summarize(checks).into(),
            timings: with_timings.then(|| {
                checks.iter().map(|c| Timing { check: c.label(), seconds: c.elapsed.as_secs_f64() }).collect()
            }),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

/// Human-readable report; residuals are cut to `max_terms` terms.
pub fn render_text(fq: &FramedQuiver, checks: &[RelationCheck], max_terms: usize, with_timings: bool) -> String {
    let mut out = String::new();
    let dims: Vec<String> = fq.vertices().iter().map(|&i| format!("{i}:v={},w={}", fq.v(i), fq.w(i))).collect();
    out.push_str(&format!("quiver {}\n", dims.join(" ")));
    for c in checks {
        let mut line = format!("{:7} {}", c.status.label().to_uppercase(), c.label());
        if let Status::Skipped(r) = &c.status {
            line.push_str(&format!("  [{r}]"));
        }
        if let Some(n) = &c.note {
            line.push_str(&format!("  ({n})"));
        }
        if with_timings {
            line.push_str(&format!("  {:.3}s", c.elapsed.as_secs_f64()));
        }
        out.push_str(&line);
        out.push('\n');
        if let Some(r) = &c.residual {
            out.push_str(&format!("        residual: {}\n", r.to_string_truncated(max_terms)));
        }
    }
    let s = gklo_core::verify::summarize(checks);
    out.push_str(&format!("summary: {} checks, {} passed, {} failed, {} skipped\n", s.total, s.passed, s.failed, s.skipped));
    out
}
