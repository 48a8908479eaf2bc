//! Input files (text and binary) and the JSON result file.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::Provenance;
use crate::machine::{Direction, Key, RunSequence};

pub const BINARY_MAGIC: &[u8; 5] = b"RGEN1";
pub const RESULT_SCHEMA: &str = "runsmith/1";

/// One decimal integer per line, LF terminated.
pub fn parse_text(data: &str) -> Result<Vec<Key>> {
    if data.is_empty() {
        return Ok(Vec::new());
    }
    let body = data.strip_suffix('\n').unwrap_or(data);
    body.split('\n')
        .enumerate()
        .map(|(i, line)| {
            let digits = line.strip_prefix('-').unwrap_or(line);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Format(format!("line {}: not an integer: {line:?}", i + 1)));
            }
            line.parse()
                .map_err(|_| Error::Format(format!("line {}: out of range: {line}", i + 1)))
        })
        .collect()
}

pub fn to_text(keys: &[Key]) -> String {
    let mut out = String::with_capacity(keys.len() * 8);
    for k in keys {
        out.push_str(&k.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_binary(data: &[u8]) -> Result<Vec<Key>> {
    let rest = data
        .strip_prefix(BINARY_MAGIC.as_slice())
        .ok_or_else(|| Error::Format("missing RGEN1 header".into()))?;
    if rest.len() < 8 {
        return Err(Error::Format("truncated count".into()));
    }
    let (count, payload) = rest.split_at(8);
    let count = u64::from_le_bytes(count.try_into().expect("8 bytes"));
    if payload.len() % 8 != 0 || payload.len() as u64 / 8 != count {
        return Err(Error::Format(format!(
            "header declares {count} keys but payload holds {} bytes",
            payload.len()
        )));
    }
    Ok(payload
        .chunks_exact(8)
        .map(|c| Key::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

pub fn to_binary(keys: &[Key]) -> Vec<u8> {
    let mut out = Vec::with_capacity(13 + keys.len() * 8);
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&(keys.len() as u64).to_le_bytes());
    for k in keys {
        out.extend_from_slice(&k.to_le_bytes());
    }
    out
}

/// Detects the format from the header.
pub fn parse_input(data: &[u8]) -> Result<Vec<Key>> {
    if data.starts_with(BINARY_MAGIC) {
        parse_binary(data)
    } else {
        let text = std::str::from_utf8(data).map_err(|_| Error::Format("input is not UTF-8".into()))?;
        parse_text(text)
    }
}

pub fn read_input(path: &Path) -> Result<Vec<Key>> {
    parse_input(&fs::read(path)?)
}

pub fn write_input(path: &Path, keys: &[Key], binary: bool) -> Result<()> {
    if binary {
        fs::write(path, to_binary(keys))?;
    } else {
        fs::write(path, to_text(keys))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunEntry {
    pub dir: Direction,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultFile {
    pub schema: String,
    pub algo: String,
    pub m: usize,
    pub seed: Option<u64>,
    pub runs: Vec<RunEntry>,
    pub r: usize,
    pub opt: Option<usize>,
    pub opt_provenance: Option<Provenance>,
    pub ratio: Option<f64>,
}

impl ResultFile {
    pub fn new(algo: &str, m: usize, seed: Option<u64>, output: &RunSequence) -> Self {
        let runs: Vec<RunEntry> = output
            .runs
            .iter()
            .map(|r| RunEntry {
                dir: r.direction,
                len: r.len(),
            })
            .collect();
        Self {
            schema: RESULT_SCHEMA.into(),
            algo: algo.into(),
            m,
            seed,
            r: runs.len(),
            runs,
            opt: None,
            opt_provenance: None,
            ratio: None,
        }
    }

    pub fn with_opt(mut self, opt: usize, provenance: Provenance) -> Self {
        self.opt = Some(opt);
        self.opt_provenance = Some(provenance);
        self.ratio = (opt > 0).then(|| self.r as f64 / opt as f64);
        self
    }

    pub fn total_len(&self) -> usize {
        self.runs.iter().map(|r| r.len).sum()
    }

    /// Checks `r` against the run list and, if given, the input length.
    pub fn validate(&self, input_len: Option<usize>) -> Result<()> {
        if self.schema != RESULT_SCHEMA {
            return Err(Error::Format(format!("unknown schema {:?}", self.schema)));
        }
        if self.r != self.runs.len() {
            return Err(Error::Format(format!("r = {} but {} runs listed", self.r, self.runs.len())));
        }
        if let Some(n) = input_len {
            if self.total_len() != n {
                return Err(Error::Format(format!(
                    "runs hold {} elements, input has {n}",
                    self.total_len()
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(data: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(data)?;
        r.validate(None)?;
        Ok(r)
    }
}
