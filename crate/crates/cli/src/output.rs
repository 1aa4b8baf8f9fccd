use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, unreadable or invalid input files.
    Input(anyhow::Error),
    /// Solver or precision failure.
    Numerical(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "input error: {e:#}"),
            Failure::Numerical(e) => write!(f, "numerical failure: {e:#}"),
        }
    }
}

pub trait Classify<T> {
    fn input(self) -> Result<T, Failure>;
    fn numerical(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }

    fn numerical(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Numerical(e.into()))
    }
}

pub fn input_error(msg: impl fmt::Display) -> Failure {
    Failure::Input(anyhow::anyhow!("{msg}"))
}

/// Report envelope shared by every JSON output.
#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
    pub command: &'static str,
    pub warnings: Vec<String>,
    #[serde(flatten)]
    pub body: T,
}

pub fn timestamp(disabled: bool) -> Option<u64> {
    if disabled {
        return None;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| input_error(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| input_error(format!("cannot write output: {e}")))
        }
    }
}

pub fn write_json<T: Serialize>(path: Option<&Path>, report: &Report<T>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(report).numerical()?;
    text.push('\n');
    write_text(path, &text)
}

/// Writes through an in-memory buffer so a failed run leaves no partial file.
pub fn write_with<F>(path: &Path, f: F) -> Result<(), Failure>
where
    F: FnOnce(&mut Vec<u8>) -> io::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf).map_err(input_error)?;
    fs::write(path, buf).map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
}

/// CSV header comment carrying the timestamp.
pub fn csv_stamp(ts: Option<u64>) -> String {
    match ts {
        Some(t) => format!("# generated_unix={t}\n"),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Body {
        x: u32,
    }

    #[test]
    fn exit_codes() {
        assert_eq!(input_error("bad").exit_code(), 2);
        let e: Result<(), std::fmt::Error> = Err(std::fmt::Error);
        assert_eq!(e.numerical().unwrap_err().exit_code(), 3);
    }

    #[test]
    fn envelope_flattens_body_and_drops_missing_timestamp() {
        let r = Report {
            schema_version: SCHEMA_VERSION,
            generated_unix: None,
            command: "t",
            warnings: vec![],
            body: Body { x: 4 },
        };
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["x"], 4);
        assert!(v.get("generated_unix").is_none());
        assert_eq!(csv_stamp(None), "");
        assert_eq!(csv_stamp(Some(5)), "# generated_unix=5\n");
    }
}
