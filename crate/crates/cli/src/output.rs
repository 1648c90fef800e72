use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// Shortest decimal string that parses back to the same `f64`.
pub fn float(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && x.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// An artifact assembled in memory and written in one piece, so a failed
/// run never leaves a partial file behind.
pub struct Artifact {
    body: String,
}

impl Artifact {
    /// CSV whose leading `#` lines carry the configuration.
    pub fn csv(header: &[(&str, Value)], columns: &[&str]) -> Self {
        let mut body = String::new();
        for (key, value) in header {
            writeln!(body, "# {key} {value}").unwrap();
        }
        body.push_str(&columns.join(","));
        body.push('\n');
        Artifact { body }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.body.push_str(&cells.join(","));
        self.body.push('\n');
    }

    /// JSON object with the configuration under `config`.
    pub fn json(header: &[(&str, Value)], key: &str, payload: &impl Serialize) -> serde_json::Result<Self> {
        let mut object = serde_json::Map::new();
        object.insert(
            "config".into(),
            Value::Object(header.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()),
        );
        object.insert(key.into(), serde_json::to_value(payload)?);
        let mut body = serde_json::to_string_pretty(&Value::Object(object))?;
        body.push('\n');
        Ok(Artifact { body })
    }

    #[cfg(test)]
    pub fn body(&self) -> &str {
        &self.body
    }

    /// Writes to `path` via a temporary sibling, or to standard output.
    pub fn commit(&self, path: Option<&Path>) -> io::Result<()> {
        let Some(path) = path else {
            let mut out = io::stdout().lock();
            out.write_all(self.body.as_bytes())?;
            return out.flush();
        };
        let staging = staging_path(path);
        let written = fs::write(&staging, &self.body).and_then(|()| fs::rename(&staging, path));
        if written.is_err() {
            let _ = fs::remove_file(&staging);
        }
        written
    }
}

fn staging_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [
            0.0,
            1.0,
            -2.5,
            0.1,
            1.0 / 3.0,
            1e-300,
            6.02e23,
            49.934_648_678_718,
            f64::MIN_POSITIVE,
        ] {
            assert_eq!(float(x).parse::<f64>().unwrap(), x, "{}", float(x));
        }
        assert_eq!(float(0.5), "0.5");
        assert_eq!(float(1e-9), "1e-9");
    }

    #[test]
    fn csv_layout() {
        let mut a = Artifact::csv(&[("config", serde_json::json!({"a": 1}))], &["x", "y"]);
        a.row(&[float(1.0), float(2.0)]);
        assert_eq!(a.body(), "# config {\"a\":1}\nx,y\n1,2\n");
    }

    #[test]
    fn failed_commit_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("missing").join("out.csv");
        let a = Artifact::csv(&[], &["x"]);
        assert!(a.commit(Some(&target)).is_err());
        assert!(!target.exists() && !staging_path(&target).exists());
    }
}
