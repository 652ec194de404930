//! Run manifests and CSV rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Everything that determines a run's numbers, plus provenance.
///
/// The hash covers the tool version, seed, configuration and input hashes.
/// The command line and timestamp are recorded but not hashed, so two runs
/// with the same inputs share a hash.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunManifest {
    pub tool_version: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    /// Input name to SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub command: Vec<String>,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(seed: u64) -> Self {
        Self { tool_version: env!("CARGO_PKG_VERSION").to_string(), seed, ..Self::default() }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn input(&mut self, name: &str, contents: &[u8]) -> &mut Self {
        self.inputs.insert(name.to_string(), sha256_hex(contents));
        self
    }

    fn hashed_body(&self) -> String {
        let mut out = format!("version={}\nseed={}\n", self.tool_version, self.seed);
        for (k, v) in &self.config {
            let _ = writeln!(out, "config.{k}={v}");
        }
        for (k, v) in &self.inputs {
            let _ = writeln!(out, "input.{k}={v}");
        }
        out
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.hashed_body().as_bytes())
    }

    pub fn render(&self) -> String {
        let mut out = format!("manifest={}\n", self.hash());
        out.push_str(&self.hashed_body());
        let _ = writeln!(out, "command={}", self.command.join(" "));
        let _ = writeln!(out, "timestamp={}", self.timestamp);
        out
    }
}

/// CSV text: a `# manifest=<hash>` line, the header, then the rows.
pub fn render_csv<R, S>(manifest_hash: &str, header: &[&str], rows: R) -> String
where
    R: IntoIterator<Item = Vec<S>>,
    S: AsRef<str>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(AsRef::as_ref)).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields");
    format!("# manifest={manifest_hash}\n{body}")
}

/// Header of per-trial CSVs.
pub const TRIAL_COLUMNS: [&str; 5] = ["trial", "prime", "n", "statistic", "value"];

/// Round-trip-exact float rendering used in every CSV.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}
