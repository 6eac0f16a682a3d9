//! Check reports and their JSON-lines / CSV encodings.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod float {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(D::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

/// `"2"`, `"inf"`, `"0.5"`.
pub fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

pub fn fmt_pair(v: [f64; 2]) -> String {
    format!("({},{})", fmt_num(v[0]), fmt_num(v[1]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: String,
    #[serde(with = "float")]
    pub lhs: f64,
    #[serde(with = "float")]
    pub rhs: f64,
    #[serde(with = "float")]
    pub ratio: f64,
}

/// How `tolerance` enters a case ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToleranceMode {
    /// `lhs / (rhs + tol)`
    Absolute,
    /// `lhs / (rhs·(1 + tol))`
    Relative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedCase {
    pub case: String,
    pub reason: String,
}

/// One verified inequality at one parameter point.
///
/// Each case contributes `ratio = lhs / (rhs + tolerance)` (or the relative
/// form, see [`ToleranceMode`]), and `pass ⇔ max_ratio ≤ pass_threshold`. Reports with `gated = false` are
/// diagnostics and never affect the exit status.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub param_point: BTreeMap<String, String>,
    pub corpus_hash: String,
    pub cases: Vec<CaseResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedCase>,
    #[serde(with = "float")]
    pub max_ratio: f64,
    #[serde(with = "float")]
    pub pass_threshold: f64,
    #[serde(with = "float")]
    pub tolerance: f64,
    pub tolerance_mode: ToleranceMode,
    pub pass: bool,
    pub gated: bool,
    /// Approximations affecting either side, e.g. `"lhs:under"`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub approximations: Vec<String>,
    /// Set when an approximation could turn a failure into a pass.
    pub adverse_approximation: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_witness: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn param_string(&self) -> String {
        self.param_point.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }

    pub fn worst_case(&self) -> Option<&CaseResult> {
        self.cases.iter().fold(None, |best: Option<&CaseResult>, c| match best {
            Some(b) if !(c.ratio > b.ratio) => Some(b),
            _ => Some(c),
        })
    }
}

/// Accumulates cases in a fixed order and finalizes a [`CheckReport`].
#[derive(Debug)]
pub struct ReportBuilder {
    report: CheckReport,
    worst_index: Option<usize>,
}

impl ReportBuilder {
    pub fn new(check_id: impl Into<String>, corpus_hash: impl Into<String>, threshold: f64, tolerance: f64) -> Self {
        Self {
            report: CheckReport {
                check_id: check_id.into(),
                param_point: BTreeMap::new(),
                corpus_hash: corpus_hash.into(),
                cases: Vec::new(),
                skipped: Vec::new(),
                max_ratio: 0.0,
                pass_threshold: threshold,
                tolerance,
                tolerance_mode: ToleranceMode::Absolute,
                pass: true,
                gated: true,
                approximations: Vec::new(),
                adverse_approximation: false,
                worst_witness: None,
                notes: Vec::new(),
            },
            worst_index: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<String>) -> Self {
        self.report.param_point.insert(key.to_string(), value.into());
        self
    }

    pub fn relative(mut self) -> Self {
        self.report.tolerance_mode = ToleranceMode::Relative;
        self
    }

    pub fn ungated(mut self) -> Self {
        self.report.gated = false;
        self
    }

    pub fn note(&mut self, note: impl Into<String>) {
        let note = note.into();
        if !self.report.notes.contains(&note) {
            self.report.notes.push(note);
        }
    }

    pub fn approximation(&mut self, tag: impl Into<String>, adverse: bool) {
        let tag = tag.into();
        if !self.report.approximations.contains(&tag) {
            self.report.approximations.push(tag);
        }
        self.report.adverse_approximation |= adverse;
    }

    /// Records `lhs ≤ rhs`. Both sides infinite is recorded as skipped.
    pub fn case(&mut self, case: impl Into<String>, lhs: f64, rhs: f64) -> usize {
        let case = case.into();
        let denom = match self.report.tolerance_mode {
            ToleranceMode::Absolute => rhs + self.report.tolerance,
            ToleranceMode::Relative => rhs * (1.0 + self.report.tolerance),
        };
        let ratio = if lhs <= 0.0 {
            0.0
        } else if lhs.is_infinite() && denom.is_infinite() {
            self.skip(case, "both sides infinite");
            return usize::MAX;
        } else {
            lhs / denom
        };
        self.report.cases.push(CaseResult { case, lhs, rhs, ratio });
        let idx = self.report.cases.len() - 1;
        let better = match self.worst_index {
            None => true,
            Some(w) => ratio > self.report.cases[w].ratio || ratio.is_nan(),
        };
        if better {
            self.worst_index = Some(idx);
        }
        idx
    }

    pub fn skip(&mut self, case: impl Into<String>, reason: impl Into<String>) {
        self.report.skipped.push(SkippedCase { case: case.into(), reason: reason.into() });
    }

    /// Index of the current worst case.
    pub fn worst_index(&self) -> Option<usize> {
        self.worst_index
    }

    /// Finalizes; `witness` maps the worst case index to its serialized input.
    pub fn finish(mut self, witness: impl FnOnce(usize) -> Option<serde_json::Value>) -> CheckReport {
        let r = &mut self.report;
        r.max_ratio = r.cases.iter().map(|c| c.ratio).fold(0.0, |a, b| if b.is_nan() || b > a { b } else { a });
        r.pass = r.max_ratio <= r.pass_threshold;
        r.worst_witness = self.worst_index.and_then(witness);
        self.report
    }
}

/// Writes one JSON object per line: the header first, then every report.
pub fn write_jsonl<W: Write>(mut out: W, header: &serde_json::Value, reports: &[CheckReport]) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string(header)?)?;
    for r in reports {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    Ok(())
}

/// `check_id,param_point,max_ratio,threshold,pass,gated` summary.
pub fn write_summary_csv<W: Write>(out: W, reports: &[CheckReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["check_id", "param_point", "max_ratio", "threshold", "pass", "gated"]).map_err(csv_err)?;
    for r in reports {
        w.write_record([
            r.check_id.clone(),
            r.param_string(),
            fmt_num(r.max_ratio),
            fmt_num(r.pass_threshold),
            r.pass.to_string(),
            r.gated.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `true` iff every gated report passes.
pub fn all_gated_pass(reports: &[CheckReport]) -> bool {
    reports.iter().filter(|r| r.gated).all(|r| r.pass)
}
