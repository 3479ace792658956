//! Deterministic job reports: a versioned JSON document plus a plain-text
//! rendering with one line per check, both written atomically. Scalars are
//! embedded as exact grammar strings, never floats.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub const SCHEMA_VERSION: u64 = 1;

/// Environment variable naming the directory that relative output paths are
/// resolved against.
pub const SCRATCH_ENV: &str = "QPB_SCRATCH_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("i/o failure at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad input document: {0}")]
    BadDocument(String),
}

#[derive(Serialize, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// Accumulates named inputs, named exact values, and pass/fail checks for
/// one job. Field maps are ordered, so serialization is deterministic.
#[derive(Serialize)]
pub struct Report {
    schema: u64,
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
    values: BTreeMap<String, serde_json::Value>,
    checks: Vec<Check>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report {
            schema: SCHEMA_VERSION,
            command: command.into(),
            seed: None,
            inputs: BTreeMap::new(),
            values: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn input(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.inputs.insert(key.into(), value.into());
    }

    pub fn value(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.values
            .insert(key.into(), serde_json::Value::String(value.into()));
    }

    pub fn value_int(&mut self, key: impl Into<String>, value: u64) {
        self.values.insert(key.into(), serde_json::json!(value));
    }

    pub fn value_list(&mut self, key: impl Into<String>, items: Vec<String>) {
        self.values.insert(
            key.into(),
            serde_json::Value::Array(
                items.into_iter().map(serde_json::Value::String).collect(),
            ),
        );
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("report: {}\n", self.command));
        out.push_str(&format!("schema: {}\n", self.schema));
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        for (k, v) in &self.inputs {
            out.push_str(&format!("input {k} = {v}\n"));
        }
        for (k, v) in &self.values {
            match v {
                serde_json::Value::String(s) => out.push_str(&format!("value {k} = {s}\n")),
                serde_json::Value::Array(items) => {
                    out.push_str(&format!("value {k} = [{}]\n", {
                        let parts: Vec<&str> =
                            items.iter().filter_map(|x| x.as_str()).collect();
                        parts.join(", ")
                    }));
                }
                other => out.push_str(&format!("value {k} = {other}\n")),
            }
        }
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                out.push_str(&format!("check {}: {verdict}\n", c.name));
            } else {
                out.push_str(&format!("check {}: {verdict} ({})\n", c.name, c.detail));
            }
        }
        let verdict = if self.all_pass() { "PASS" } else { "FAIL" };
        out.push_str(&format!("result: {verdict} ({} checks)\n", self.checks.len()));
        out
    }

    /// Writes `<base>.json` and `<base>.txt` atomically: each file is
    /// staged next to its target and renamed into place.
    pub fn write(&self, base: &Path) -> Result<(), ReportError> {
        let json_path = base.with_extension("json");
        let text_path = base.with_extension("txt");
        atomic_write(&json_path, self.to_json().as_bytes())?;
        atomic_write(&text_path, self.to_text().as_bytes())?;
        Ok(())
    }
}

/// Resolves an output base path: relative paths land in the scratch
/// directory when the environment names one.
pub fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(SCRATCH_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), ReportError> {
    let err = |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(err)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = std::fs::File::create(&tmp).map_err(err)?;
        f.write_all(bytes).map_err(err)?;
        f.sync_all().map_err(err)?;
    }
    std::fs::rename(&tmp, path).map_err(err)
}

/// Checks and strips the version envelope of an input document: the top
/// level must be an object carrying `"schema": 1`; the remaining fields are
/// handed back re-serialized for the inner parser.
pub fn unwrap_schema(text: &str) -> Result<String, ReportError> {
    let mut v: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| ReportError::BadDocument(format!("not JSON: {e}")))?;
    let obj = v
        .as_object_mut()
        .ok_or_else(|| ReportError::BadDocument("top level must be an object".into()))?;
    match obj.remove("schema") {
        Some(serde_json::Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(other) => {
            return Err(ReportError::BadDocument(format!(
                "unsupported schema version {other}"
            )))
        }
        None => {
            return Err(ReportError::BadDocument(
                "missing \"schema\" field (expected 1)".into(),
            ))
        }
    }
    Ok(serde_json::Value::Object(std::mem::take(obj)).to_string())
}

/// Adds the version envelope to an inner document.
pub fn wrap_schema(inner: &str) -> Result<String, ReportError> {
    let v: serde_json::Value = serde_json::from_str(inner)
        .map_err(|e| ReportError::BadDocument(format!("not JSON: {e}")))?;
    let mut obj = v
        .as_object()
        .cloned()
        .ok_or_else(|| ReportError::BadDocument("top level must be an object".into()))?;
    obj.insert(
        "schema".into(),
        serde_json::Value::Number(SCHEMA_VERSION.into()),
    );
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(obj))
        .expect("document serializes");
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("cohomology nerve");
        r.seed(7);
        r.input("cover", "circle-3");
        r.value_int("h1", 1);
        r.value("coefficient", "1/2");
        r.value_list("representatives", vec!["e01 -> 1".into()]);
        r.check("dimension matches oracle", true, "");
        r.check("cocycle condition", true, "27 candidates");
        r
    }

    #[test]
    fn serialization_is_deterministic() {
        assert_eq!(sample().to_json(), sample().to_json());
        assert_eq!(sample().to_text(), sample().to_text());
        let j = sample().to_json();
        assert!(j.contains("\"schema\": 1"));
        assert!(j.contains("\"1/2\""));
        let t = sample().to_text();
        assert!(t.contains("check dimension matches oracle: PASS"));
        assert!(t.contains("result: PASS (2 checks)"));
    }

    #[test]
    fn failed_checks_fail_the_report() {
        let mut r = sample();
        assert!(r.all_pass());
        r.check("curvature vanishes", false, "witness e12");
        assert!(!r.all_pass());
        assert!(r.to_text().contains("check curvature vanishes: FAIL (witness e12)"));
        assert!(r.to_text().contains("result: FAIL"));
    }

    #[test]
    fn atomic_write_replaces_the_target() {
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("out");
        sample().write(&base).unwrap();
        let first = std::fs::read(base.with_extension("json")).unwrap();
        sample().write(&base).unwrap();
        let second = std::fs::read(base.with_extension("json")).unwrap();
        assert_eq!(first, second);
        let text = std::fs::read_to_string(base.with_extension("txt")).unwrap();
        assert!(text.starts_with("report: cohomology nerve\n"));
        assert!(!dir.path().join("out.json.tmp").exists());
    }

    #[test]
    fn schema_envelope_round_trips() {
        let inner = "{\"elements\":[\"e\"],\"table\":[[0]],\"identity\":0}";
        let wrapped = wrap_schema(inner).unwrap();
        assert!(wrapped.contains("\"schema\": 1"));
        let back = unwrap_schema(&wrapped).unwrap();
        let v: serde_json::Value = serde_json::from_str(&back).unwrap();
        assert_eq!(v["identity"], 0);
        assert!(v.get("schema").is_none());
        assert!(unwrap_schema(inner).is_err());
        assert!(unwrap_schema("{\"schema\":2}").is_err());
        assert!(unwrap_schema("[1,2]").is_err());
    }

    #[test]
    fn scratch_env_resolves_relative_paths() {
        // process-wide env var: keep the mutation inside this one test
        let dir = tempfile::tempdir().unwrap();
        std::env::set_var(SCRATCH_ENV, dir.path());
        let got = resolve_out(Path::new("report"));
        assert_eq!(got, dir.path().join("report"));
        let abs = dir.path().join("elsewhere").join("x");
        assert_eq!(resolve_out(&abs), abs);
        std::env::remove_var(SCRATCH_ENV);
        assert_eq!(resolve_out(Path::new("report")), PathBuf::from("report"));
    }
}
