use indexmap::IndexMap;
use serde::Serialize;
use serde_json::Value;

use cinf_core::{Status, Verdict, VerdictReport};

/// Exit status for the whole session.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Ok,
    Refuted,
    Error,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Refuted => 1,
            Outcome::Error => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub result: IndexMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub summary: Vec<String>,
    #[serde(skip)]
    verdict_text: Option<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), result: IndexMap::new(), verdict: None, error: None, summary: Vec::new(), verdict_text: None }
    }

    pub fn failed(command: impl Into<String>, error: impl ToString) -> Self {
        let mut r = Report::new(command);
        r.error = Some(error.to_string());
        r
    }

    /// Adds a structured field and a summary line showing `text`.
    pub fn field(&mut self, key: &str, value: impl Serialize, text: impl std::fmt::Display) -> &mut Self {
        self.result.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self.summary.push(format!("{key}: {text}"));
        self
    }

    /// Adds a structured field shown in the summary as its JSON text.
    pub fn data(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("serializable");
        self.summary.push(format!("{key}: {v}"));
        self.result.insert(key.to_string(), v);
        self
    }

    pub fn verdict(&mut self, v: &Verdict) -> &mut Self {
        self.verdict = Some(v.report());
        self.verdict_text = Some(v.to_string());
        self
    }

    pub fn outcome(&self) -> Outcome {
        match (&self.error, &self.verdict) {
            (Some(_), _) => Outcome::Error,
            (None, Some(v)) if v.status == Status::Refuted => Outcome::Refuted,
            _ => Outcome::Ok,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("> {}\n", self.command);
        for line in &self.summary {
            out.push_str(&format!("  {line}\n"));
        }
        if let Some(v) = &self.verdict_text {
            out.push_str(&format!("  verdict: {v}\n"));
        }
        if let Some(e) = &self.error {
            out.push_str(&format!("  error: {e}\n"));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Clone, Debug, Serialize)]
pub struct SessionReport {
    pub config: IndexMap<String, Value>,
    pub reports: Vec<Report>,
    pub outcome: Outcome,
    pub exit_code: i32,
}

impl SessionReport {
    pub fn new(config: IndexMap<String, Value>, reports: Vec<Report>) -> Self {
        let outcome = reports.iter().map(Report::outcome).max().unwrap_or(Outcome::Ok);
        SessionReport { config, reports, outcome, exit_code: outcome.exit_code() }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Structured => serde_json::to_string_pretty(self).expect("serializable") + "\n",
            Format::Text => {
                let mut out: String = self.reports.iter().map(Report::render_text).collect();
                out.push_str(&format!("exit: {} ({:?})\n", self.exit_code, self.outcome).to_lowercase());
                out
            }
        }
    }
}
