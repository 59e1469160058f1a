use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A failure that is listed in the anomalies sidecar.
    Anomaly,
}

#[derive(Clone, Debug, Serialize)]
pub struct Item {
    pub id: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Item {
    pub fn pass(id: impl Into<String>, detail: impl Into<String>) -> Self {
        Item { id: id.into(), status: Status::Pass, detail: detail.into(), error: None }
    }

    pub fn fail(id: impl Into<String>, detail: impl Into<String>, error: Option<String>) -> Self {
        Item { id: id.into(), status: Status::Fail, detail: detail.into(), error }
    }

    pub fn check(id: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        if ok {
            Item::pass(id, detail)
        } else {
            Item::fail(id, detail, None)
        }
    }
}

/// Everything a run produced. Apart from `elapsed_ms`, which is only
/// filled in on request, two runs with the same arguments serialize to
/// the same bytes.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub status: Status,
    pub passed: usize,
    pub failed: usize,
    pub anomalies: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub output: Vec<String>,
    pub items: Vec<Item>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

impl RunReport {
    pub fn new(command: String) -> Self {
        RunReport {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed: None,
            status: Status::Pass,
            passed: 0,
            failed: 0,
            anomalies: 0,
            worst_error: None,
            output: Vec::new(),
            items: Vec::new(),
            elapsed_ms: None,
        }
    }

    pub fn push(&mut self, item: Item) {
        self.items.push(item);
    }

    /// Tallies the items and sets the overall status.
    pub fn finish(&mut self) {
        let count = |s| self.items.iter().filter(|i| i.status == s).count();
        self.passed = count(Status::Pass);
        self.failed = count(Status::Fail);
        self.anomalies = count(Status::Anomaly);
        self.status = if self.failed > 0 {
            Status::Fail
        } else if self.anomalies > 0 {
            Status::Anomaly
        } else {
            Status::Pass
        };
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Anomaly => 3,
        }
    }

    pub fn to_text(&self, verbose: bool) -> String {
        let mut s = String::new();
        for line in &self.output {
            let _ = writeln!(s, "{line}");
        }
        for item in &self.items {
            if !verbose && item.status == Status::Pass && self.items.len() > 12 {
                continue;
            }
            let tag = match item.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Anomaly => "ANOMALY",
            };
            let _ = write!(s, "{tag:<7} {:<14} {}", item.id, item.detail);
            if let Some(e) = &item.error {
                let _ = write!(s, " [{e}]");
            }
            s.push('\n');
        }
        let _ = write!(
            s,
            "{}: {} passed, {} failed, {} anomalies",
            match self.status {
                Status::Pass => "ok",
                Status::Fail => "FAILED",
                Status::Anomaly => "ANOMALIES",
            },
            self.passed,
            self.failed,
            self.anomalies
        );
        if let Some(w) = &self.worst_error {
            let _ = write!(s, "; worst error {w}");
        }
        if let Some(ms) = self.elapsed_ms {
            let _ = write!(s, "; {ms} ms");
        }
        s.push('\n');
        s
    }
}
