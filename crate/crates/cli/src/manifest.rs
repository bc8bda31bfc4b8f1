use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde_json::json;
use sha2::{Digest, Sha256};

/// Provenance written next to every output file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub master_seed: u64,
    pub version: &'static str,
    pub started: String,
    pub finished: String,
    /// SHA-256 of the output bytes, hex encoded.
    pub output_sha256: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, argv: &[String], master_seed: u64, started: SystemTime, output: &[u8]) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            argv: argv.to_vec(),
            master_seed,
            version: env!("CARGO_PKG_VERSION"),
            started: humantime::format_rfc3339_seconds(started).to_string(),
            finished: humantime::format_rfc3339_seconds(SystemTime::now()).to_string(),
            output_sha256: format!("{:x}", Sha256::digest(output)),
        }
    }

    pub fn to_json(&self) -> String {
        let value = json!({
            "subcommand": self.subcommand,
            "argv": self.argv,
            "master_seed": self.master_seed,
            "version": self.version,
            "started": self.started,
            "finished": self.finished,
            "output_sha256": self.output_sha256,
        });
        let mut s = serde_json::to_string_pretty(&value).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// `<out>.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_and_path() {
        let m = RunManifest::new("divisor", &["expsum".into()], 1, SystemTime::UNIX_EPOCH, b"abc");
        assert_eq!(
            m.output_sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(m.started, "1970-01-01T00:00:00Z");
        assert_eq!(
            manifest_path(Path::new("out/run.csv")),
            PathBuf::from("out/run.csv.manifest.json")
        );
        let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(v["master_seed"], 1);
    }
}
