//! JSON run reports.
//!
//! Every invocation prints exactly one report on standard output, whatever
//! happened, so callers can always parse the result. Reports carry the
//! schema key, the subcommand, a digest of each input file, the seed and
//! every tolerance that influenced the verdict, and a command-specific
//! payload (witnesses, payoffs, floor traces). Two runs with the same
//! inputs, flags, and seeds print identical bytes once the volatile fields
//! (wall-clock time) are left out with `--no-timestamp`.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "dyngame_report_v1";

/// Verdict holds or a solution was produced.
pub const EXIT_OK: i32 = 0;
/// Verdict fails; the payload carries the witness.
pub const EXIT_FAILS: i32 = 1;
/// No verdict either way: sampling, enumeration, or iteration gave out.
pub const EXIT_INCONCLUSIVE: i32 = 2;
/// The input could not be used: file, parse, flag, or shape problems.
pub const EXIT_INPUT: i32 = 3;

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Digest a file's bytes so reports pin down exactly what was analyzed.
pub fn digest_input(path: &Path) -> io::Result<InputDigest> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    Ok(InputDigest { path: path.display().to_string(), sha256: hex })
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub threads: usize,
    /// Every tolerance the verdict depended on, by role.
    pub tolerances: BTreeMap<String, f64>,
    pub verdict: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
    pub payload: serde_json::Value,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        // Serialization of these value types cannot fail.
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Accumulates report fields while a command runs.
pub struct ReportBuilder {
    command: String,
    inputs: Vec<InputDigest>,
    seed: Option<u64>,
    threads: usize,
    tolerances: BTreeMap<String, f64>,
    include_time: bool,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(command: &str, threads: usize, include_time: bool) -> Self {
        ReportBuilder {
            command: command.to_string(),
            inputs: Vec::new(),
            seed: None,
            threads,
            tolerances: BTreeMap::new(),
            include_time,
            started: Instant::now(),
        }
    }

    pub fn input(&mut self, digest: InputDigest) {
        self.inputs.push(digest);
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn tolerance(&mut self, role: &str, value: f64) {
        self.tolerances.insert(role.to_string(), value);
    }

    pub fn finish(
        self,
        verdict: impl Into<String>,
        exit_code: i32,
        payload: serde_json::Value,
    ) -> AnalysisReport {
        let (timestamp_unix, wall_ms) = if self.include_time {
            let now = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            (Some(now), Some(self.started.elapsed().as_millis() as u64))
        } else {
            (None, None)
        };
        AnalysisReport {
            schema: SCHEMA,
            command: self.command,
            inputs: self.inputs,
            seed: self.seed,
            threads: self.threads,
            tolerances: self.tolerances,
            verdict: verdict.into(),
            exit_code,
            timestamp_unix,
            wall_ms,
            payload,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volatile_fields_are_excludable() {
        let mut b = ReportBuilder::new("validate", 1, false);
        b.tolerance("model", 1e-12);
        let r = b.finish("valid", EXIT_OK, serde_json::json!({}));
        let text = r.to_json();
        assert!(text.contains("\"dyngame_report_v1\""));
        assert!(!text.contains("timestamp_unix"), "{text}");
        assert!(!text.contains("wall_ms"), "{text}");

        let b2 = ReportBuilder::new("validate", 1, true);
        let r2 = b2.finish("valid", EXIT_OK, serde_json::json!({}));
        let text2 = r2.to_json();
        assert!(text2.contains("timestamp_unix"), "{text2}");
    }

    #[test]
    fn digests_are_stable_hex() {
        let dir = std::env::temp_dir().join("dyngame-report-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("input.game");
        std::fs::write(&path, b"abc").unwrap();
        let d = digest_input(&path).unwrap();
        assert_eq!(
            d.sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
