//! Report model and its JSON and CSV renderings.

use martinwalk::report::{StatisticalReport, VerificationReport};
use martinwalk::ProbValue;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordMode {
    Exact,
    Float,
    MonteCarlo,
}

impl RecordMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordMode::Exact => "exact",
            RecordMode::Float => "float",
            RecordMode::MonteCarlo => "montecarlo",
        }
    }
}

/// One check outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub name: String,
    pub mode: RecordMode,
    pub passed: bool,
    pub checked: usize,
    pub residual: Option<Value>,
    pub expected: Option<f64>,
    pub estimate: Option<f64>,
    pub std_error: Option<f64>,
    pub z: Option<f64>,
    pub limit: Option<f64>,
    pub detail: Option<String>,
}

fn residual_value(v: &ProbValue) -> Value {
    match v {
        ProbValue::Exact(_) => Value::String(v.to_string()),
        ProbValue::Float(x) => json!(x),
    }
}

fn failure_detail(report: &VerificationReport) -> Option<String> {
    let first = report.failures.first()?;
    let more = report.failures.len() - 1;
    Some(if more > 0 { format!("{first} (+{more} more)") } else { first.to_string() })
}

impl Record {
    fn bare(name: impl Into<String>, mode: RecordMode, passed: bool) -> Self {
        Self {
            name: name.into(),
            mode,
            passed,
            checked: 1,
            residual: None,
            expected: None,
            estimate: None,
            std_error: None,
            z: None,
            limit: None,
            detail: None,
        }
    }

    /// An exact identity check; the residual is the largest |observed - expected|.
    pub fn from_verification(name: impl Into<String>, report: &VerificationReport, float_mode: bool) -> Self {
        let mode = if float_mode { RecordMode::Float } else { RecordMode::Exact };
        let mut r = Self::bare(name, mode, report.is_clean());
        r.checked = report.checked;
        r.residual = Some(residual_value(&report.max_residual()));
        r.detail = failure_detail(report).or_else(|| (!report.notes.is_empty()).then(|| report.notes.join("; ")));
        if report.checked == 0 {
            r.passed = false;
            r.detail = Some("nothing was checked".into());
        }
        r
    }

    /// A check that must find violations, such as a non-exchangeable control.
    pub fn expect_violations(name: impl Into<String>, report: &VerificationReport, float_mode: bool) -> Self {
        let mut r = Self::from_verification(name, report, float_mode);
        r.passed = !report.is_clean();
        r.detail = Some(format!("{} of {} comparisons violated, as required", report.failures.len(), report.checked));
        if report.is_clean() {
            r.detail = Some(format!("no violation among {} comparisons", report.checked));
        }
        r
    }

    pub fn from_statistical(name: impl Into<String>, report: &StatisticalReport) -> Self {
        let mut r = Self::bare(name, RecordMode::MonteCarlo, report.passed());
        r.checked = report.replicates;
        r.expected = Some(report.expected);
        r.estimate = Some(report.estimate);
        r.std_error = Some(report.std_error);
        r.z = Some(report.z_score());
        r.limit = Some(report.z_limit);
        r
    }

    /// A scalar compared against a threshold.
    pub fn threshold(name: impl Into<String>, mode: RecordMode, estimate: f64, limit: f64, passed: bool) -> Self {
        let mut r = Self::bare(name, mode, passed);
        r.estimate = Some(estimate);
        r.limit = Some(limit);
        r
    }

    /// A check that could not run because the library rejected its input.
    pub fn error(name: impl Into<String>, err: &martinwalk::Error) -> Self {
        let mut r = Self::bare(name, RecordMode::Exact, false);
        r.checked = 0;
        r.detail = Some(err.to_string());
        r
    }

    pub fn with_checked(mut self, checked: usize) -> Self {
        self.checked = checked;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn with_expected(mut self, expected: f64) -> Self {
        self.expected = Some(expected);
        self
    }

    pub fn with_std_error(mut self, se: f64, z: f64) -> Self {
        self.std_error = Some(se);
        self.z = Some(z);
        self
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), json!(self.name));
        m.insert("mode".into(), json!(self.mode.as_str()));
        m.insert("status".into(), json!(status(self.passed)));
        m.insert("checked".into(), json!(self.checked));
        let optional = [
            ("expected", self.expected),
            ("estimate", self.estimate),
            ("std_error", self.std_error),
            ("z", self.z),
            ("limit", self.limit),
        ];
        for (key, value) in optional {
            if let Some(v) = value {
                m.insert(key.into(), float_json(v));
            }
        }
        if let Some(res) = &self.residual {
            m.insert("residual".into(), res.clone());
        }
        if let Some(detail) = &self.detail {
            m.insert("detail".into(), json!(detail));
        }
        Value::Object(m)
    }
}

fn status(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

/// Non-finite floats are written as strings so the JSON stays valid.
fn float_json(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

/// Per-row output such as trajectories or sampled simplex points.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub config: Value,
    pub records: Vec<Record>,
    pub data: Option<Table>,
}

impl Report {
    pub fn new(config: Value) -> Self {
        Self { config, records: Vec::new(), data: None }
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn passed(&self) -> usize {
        self.records.iter().filter(|r| r.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.records.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("config".into(), self.config.clone());
        m.insert("records".into(), Value::Array(self.records.iter().map(Record::to_json).collect()));
        m.insert(
            "summary".into(),
            json!({ "records": self.records.len(), "passed": self.passed(), "failed": self.failed() }),
        );
        if let Some(table) = &self.data {
            m.insert("data".into(), json!({ "columns": table.columns, "rows": table.rows }));
        }
        Value::Object(m)
    }
}

pub const CSV_COLUMNS: [&str; 11] =
    ["name", "mode", "status", "checked", "residual", "expected", "estimate", "std_error", "z", "limit", "detail"];

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| cell(&float_json(x))).unwrap_or_default()
}

/// JSON with sorted keys and a trailing newline.
pub fn emit_json(report: &Report) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&report.to_json()).expect("JSON values serialize");
    out.push(b'\n');
    out
}

/// `#`-prefixed config echo and summary, the record table, then the data table after a `# data` line.
pub fn emit_csv(report: &Report) -> Vec<u8> {
    let mut out = Vec::new();
    if let Value::Object(config) = &report.config {
        for (key, value) in config {
            out.extend_from_slice(format!("# {key}={}\n", cell(value)).as_bytes());
        }
    }
    out.extend_from_slice(
        format!("# summary records={} passed={} failed={}\n", report.records.len(), report.passed(), report.failed())
            .as_bytes(),
    );
    {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(&mut out);
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for r in &report.records {
            w.write_record([
                r.name.clone(),
                r.mode.as_str().to_string(),
                status(r.passed).to_string(),
                r.checked.to_string(),
                r.residual.as_ref().map(cell).unwrap_or_default(),
                opt_cell(r.expected),
                opt_cell(r.estimate),
                opt_cell(r.std_error),
                opt_cell(r.z),
                opt_cell(r.limit),
                r.detail.clone().unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        w.flush().expect("in-memory write");
    }
    if let Some(table) = &report.data {
        out.extend_from_slice(b"# data\n");
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&table.columns).expect("in-memory write");
        for row in &table.rows {
            w.write_record(row.iter().map(cell)).expect("in-memory write");
        }
        w.flush().expect("in-memory write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use martinwalk::report::Failure;

    #[test]
    fn empty_report_is_header_only_csv() {
        let report = Report::new(json!({"command": "verify", "seed": 0}));
        let text = String::from_utf8(emit_csv(&report)).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, vec![CSV_COLUMNS.join(",")]);
        assert!(text.contains("# seed=0\n"));
    }

    #[test]
    fn exact_failure_renders_rational_residual() {
        let mut v = VerificationReport::new("demo");
        v.fail(Failure::new("x", ProbValue::ratio(1, 2), ProbValue::ratio(5, 6)));
        let mut report = Report::new(json!({}));
        report.push(Record::from_verification("demo", &v, false));
        let json = report.to_json();
        assert_eq!(json["records"][0]["residual"], json!("1/3"));
        assert_eq!(json["records"][0]["status"], json!("fail"));
        let csv = String::from_utf8(emit_csv(&report)).unwrap();
        assert!(csv.contains("demo,exact,fail,1,1/3,"));
    }

    #[test]
    fn clean_exact_record_has_zero_residual() {
        let mut v = VerificationReport::new("demo");
        v.compare(|| "x".into(), ProbValue::ratio(1, 3), ProbValue::ratio(2, 6));
        let r = Record::from_verification("demo", &v, false);
        assert!(r.passed);
        assert_eq!(r.residual, Some(json!("0")));
    }

    #[test]
    fn json_keys_are_sorted() {
        let mut report = Report::new(json!({"zeta": 1, "alpha": 2}));
        report.push(Record::threshold("t", RecordMode::Float, 0.5, 1.0, true));
        let text = String::from_utf8(emit_json(&report)).unwrap();
        assert!(text.find("\"alpha\"").unwrap() < text.find("\"zeta\"").unwrap());
        assert!(text.find("\"config\"").unwrap() < text.find("\"records\"").unwrap());
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn data_table_follows_records() {
        let mut report = Report::new(json!({}));
        let mut t = Table::new(&["step", "y_1"]);
        t.push(vec![json!(0), json!(0)]);
        t.push(vec![json!(1), json!(1)]);
        report.data = Some(t);
        let text = String::from_utf8(emit_csv(&report)).unwrap();
        assert!(text.ends_with("# data\nstep,y_1\n0,0\n1,1\n"));
    }
}
