//! Machine-readable verification reports. Schema version 1.
//!
//! Every record asserts `lhs ≥ rhs` with margin `lhs - rhs` and the uniform
//! tolerance `1e-9`: a record passes iff `margin ≥ -1e-9`. Records flagged
//! `gate` assert a hypothesis rather than a conclusion — a failed gate makes
//! the verdict `hypothesis-not-met` instead of `fail`. Records whose name
//! starts with `diagnostic/` never affect exit codes. Reports are
//! deterministic except for the `timing_ms` field.

use anyhow::{bail, Context, Result};
use bbl_core::Verdict;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Margin below which a record fails.
pub const RECORD_TOLERANCE: f64 = 1e-9;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub gate: bool,
    pub verdict: Verdict,
}

impl CheckRecord {
    /// Builds a record asserting `lhs ≥ rhs`.
    pub fn bound(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let margin = lhs - rhs;
        CheckRecord {
            name: name.into(),
            lhs,
            rhs,
            margin,
            gate: false,
            verdict: if margin >= -RECORD_TOLERANCE {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        }
    }

    /// Builds a hypothesis record asserting `lhs ≥ rhs`; failure reads as
    /// `hypothesis-not-met`.
    pub fn gate(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let margin = lhs - rhs;
        CheckRecord {
            name: name.into(),
            lhs,
            rhs,
            margin,
            gate: true,
            verdict: if margin >= -RECORD_TOLERANCE {
                Verdict::Pass
            } else {
                Verdict::HypothesisNotMet
            },
        }
    }

    pub fn is_diagnostic(&self) -> bool {
        self.name.starts_with("diagnostic/")
    }

    /// The verdict implied by `lhs`, `rhs`, and the gate flag.
    pub fn derived_verdict(&self) -> Verdict {
        if self.margin >= -RECORD_TOLERANCE {
            Verdict::Pass
        } else if self.gate {
            Verdict::HypothesisNotMet
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction_bound: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_side: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub overall: Verdict,
    pub passes: usize,
    pub failures: usize,
    pub hypothesis_not_met: usize,
    pub worst_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_record: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance_digest: Option<String>,
    pub parameters: Parameters,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
    pub timing_ms: u128,
}

impl ReportFile {
    pub fn new(
        command: &str,
        instance_digest: Option<String>,
        parameters: Parameters,
        records: Vec<CheckRecord>,
        extra_hypothesis_not_met: usize,
    ) -> Self {
        let summary = summarize(&records, extra_hypothesis_not_met);
        ReportFile {
            schema: SCHEMA_VERSION,
            tool: "bbl-lab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            instance_digest,
            parameters,
            records,
            summary,
            timing_ms: 0,
        }
    }

    /// Process exit code implied by the summary: 0 pass, 2 fail,
    /// 3 hypothesis-not-met.
    pub fn exit_code(&self) -> i32 {
        match self.summary.overall {
            Verdict::Pass => 0,
            Verdict::Fail => 2,
            Verdict::HypothesisNotMet => 3,
        }
    }

    /// Writes pretty JSON to `--out` or stdout.
    pub fn emit(&self, out: Option<&Path>) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        match out {
            Some(path) => std::fs::write(path, json.as_bytes())
                .with_context(|| format!("cannot write report to {}", path.display()))?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(json.as_bytes())?;
                stdout.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    /// Writes the per-record rows as CSV.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("name,lhs,rhs,margin,gate,verdict\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.name, r.lhs, r.rhs, r.margin, r.gate, r.verdict
            ));
        }
        std::fs::write(path, out.as_bytes())
            .with_context(|| format!("cannot write CSV to {}", path.display()))
    }

    /// Validates internal consistency: schema version, margin arithmetic,
    /// verdict derivability, and the summary.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            bail!("unsupported report schema {}", self.schema);
        }
        for r in &self.records {
            if (r.margin - (r.lhs - r.rhs)).abs() > 1e-12 {
                bail!("record {}: margin {} != lhs - rhs", r.name, r.margin);
            }
            if r.verdict != r.derived_verdict() {
                bail!(
                    "record {}: verdict {} not derivable from margin {}",
                    r.name,
                    r.verdict,
                    r.margin
                );
            }
        }
        let expected = summarize(&self.records, self.summary.hypothesis_not_met.saturating_sub(
            self.records
                .iter()
                .filter(|r| !r.is_diagnostic() && r.verdict == Verdict::HypothesisNotMet)
                .count(),
        ));
        if expected.overall != self.summary.overall
            || expected.passes != self.summary.passes
            || expected.failures != self.summary.failures
        {
            bail!("summary is inconsistent with the records");
        }
        Ok(())
    }
}

/// Aggregates records (diagnostics excluded) into a summary.
/// `extra_hypothesis_not_met` counts trials excluded before any record was
/// emitted, e.g. degenerate campaign instances.
fn summarize(records: &[CheckRecord], extra_hypothesis_not_met: usize) -> Summary {
    let mut passes = 0;
    let mut failures = 0;
    let mut hypothesis_not_met = extra_hypothesis_not_met;
    let mut worst_margin = f64::INFINITY;
    let mut worst_record = None;
    for r in records {
        if r.is_diagnostic() {
            continue;
        }
        match r.verdict {
            Verdict::Pass => passes += 1,
            Verdict::Fail => failures += 1,
            Verdict::HypothesisNotMet => hypothesis_not_met += 1,
        }
        if r.margin < worst_margin {
            worst_margin = r.margin;
            worst_record = Some(r.name.clone());
        }
    }
    let overall = if failures > 0 {
        Verdict::Fail
    } else if hypothesis_not_met > 0 {
        Verdict::HypothesisNotMet
    } else {
        Verdict::Pass
    };
    Summary {
        overall,
        passes,
        failures,
        hypothesis_not_met,
        worst_margin: if worst_margin.is_finite() { worst_margin } else { 0.0 },
        worst_record,
    }
}
