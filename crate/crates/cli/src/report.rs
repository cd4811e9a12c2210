use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "ainfty/1";

#[derive(Clone, Debug, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Error => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: u128,
}

/// Everything but `timing` is a function of the command, its inputs and its bounds.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    pub inputs: Vec<InputRecord>,
    pub truncation: Map<String, Value>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    pub message: String,
    pub witnesses: Map<String, Value>,
    pub artifacts: Vec<String>,
    pub timing: Timing,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Inputs read so far, with their hashes, and artifacts waiting to be written.
#[derive(Default)]
pub struct Ctx {
    pub inputs: Vec<InputRecord>,
    pub truncation: Map<String, Value>,
    pub witnesses: Map<String, Value>,
    pub artifacts: Vec<(PathBuf, String)>,
    pub lines: Vec<String>,
}

impl Ctx {
    pub fn read(&mut self, path: &Path) -> std::io::Result<String> {
        let bytes = std::fs::read(path)?;
        self.inputs.push(InputRecord { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        String::from_utf8(bytes).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }

    pub fn bound(&mut self, key: &str, v: impl Into<Value>) {
        self.truncation.insert(key.into(), v.into());
    }

    pub fn witness(&mut self, key: &str, v: impl Serialize) {
        self.witnesses.insert(key.into(), serde_json::to_value(v).expect("serializable witness"));
    }

    pub fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn emit(&mut self, path: PathBuf, contents: String) {
        self.artifacts.push((path, contents));
    }
}

/// Write through a temporary file in the destination directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
