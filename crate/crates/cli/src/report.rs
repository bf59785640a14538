use std::fmt;
use std::path::PathBuf;
use std::time::Duration;

use lapsep::{Classification, Verdict};
use serde::Serialize;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub parse_ms: f64,
    pub compute_ms: f64,
}

impl Timings {
    pub fn new(parse: Duration, compute: Duration) -> Self {
        Self {
            parse_ms: parse.as_secs_f64() * 1e3,
            compute_ms: compute.as_secs_f64() * 1e3,
        }
    }
}

/// Outcome of one command on one input, printable as a text line or JSON.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub input: PathBuf,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_vector: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_sum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub tol: f64,
    pub timings: Timings,
    pub artifacts: Vec<PathBuf>,
    #[serde(skip)]
    pub exit_code: u8,
}

impl RunReport {
    pub fn from_classification(input: PathBuf, c: &Classification, tol: f64) -> Self {
        let mut r = RunReport {
            input,
            verdict: c.verdict.kind().to_string(),
            rule: c.verdict.rule().map(|r| r.id().to_string()),
            tol,
            ..Default::default()
        };
        match &c.verdict {
            Verdict::Separable { decomposition, .. } => {
                r.terms = Some(decomposition.terms.len());
                if let Some(v) = &c.diagnostics.verification {
                    r.max_error = Some(v.max_error);
                    r.weight_sum = Some(v.weight_sum);
                }
            }
            Verdict::Entangled { witness, .. } => {
                r.witness_eigenvalue = Some(witness.eigenvalue);
                r.witness_vector = Some(witness.vector.iter().map(|z| [z.re, z.im]).collect());
            }
            Verdict::Invalid { reason } => r.reason = Some(reason.clone()),
            Verdict::SeparableNonConstructive { .. } | Verdict::Unknown => {}
        }
        r
    }

    pub fn print(&self, json: bool, with_input: bool) {
        if json {
            println!(
                "{}",
                serde_json::to_string(self).expect("report serializes")
            );
        } else if with_input {
            println!("{}: {self}", self.input.display());
        } else {
            println!("{self}");
        }
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict.as_str() {
            "SeparableNonConstructive" => "Separable",
            v => v,
        };
        f.write_str(verdict)?;
        if let Some(rule) = &self.rule {
            write!(f, " (rule {rule})")?;
        }
        if let Some(t) = self.terms {
            write!(f, ", {t} terms")?;
        } else if self.verdict == "SeparableNonConstructive" {
            f.write_str(", no decomposition")?;
        }
        if let Some(e) = self.witness_eigenvalue {
            write!(f, ", witness eigenvalue {e}")?;
        }
        if let Some(reason) = &self.reason {
            write!(f, ": {reason}")?;
        }
        Ok(())
    }
}
