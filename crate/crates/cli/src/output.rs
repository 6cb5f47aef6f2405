//! Output directory with atomic writes and a checksummed run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::failure::OutputError;

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub artifact: &'static str,
    pub version: &'static str,
    pub status: &'a str,
    pub config: &'a RunConfig,
    pub wall_clock_seconds: f64,
    pub files: &'a [FileEntry],
}

pub struct OutputDir {
    root: PathBuf,
    files: Vec<FileEntry>,
    started: Instant,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> anyhow::Error {
    OutputError(format!("{}: {e}", path.display())).into()
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new(), started: Instant::now() })
    }

    /// Write `name` through a temporary file in the same directory and rename it
    /// into place.
    pub fn write(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> mindisk_core::Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        self.write_bytes(name, &buf)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut buf = serde_json::to_vec_pretty(value)?;
        buf.push(b'\n');
        self.write_bytes(name, &buf)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.tmp"));
        let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| io_err(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| io_err(&path, e))?;
        let entry = FileEntry { name: name.to_string(), bytes: bytes.len() as u64, sha256: hex::encode(Sha256::digest(bytes)) };
        self.files.retain(|e| e.name != name);
        self.files.push(entry);
        Ok(())
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Write `manifest.json` listing every file written so far.
    pub fn finish(mut self, config: &RunConfig, status: &str) -> Result<PathBuf> {
        let mut files = self.files.clone();
        files.sort_by(|a, b| a.name.cmp(&b.name));
        let manifest = RunManifest {
            artifact: "mindisk",
            version: env!("CARGO_PKG_VERSION"),
            status,
            config,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            files: &files,
        };
        self.write_json("manifest.json", &manifest)?;
        Ok(self.path("manifest.json"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_are_checksummed() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write_bytes("a.txt", b"abc").unwrap();
        assert_eq!(out.files[0].sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert!(!dir.path().join(".a.txt.tmp").exists());
        let cfg = RunConfig::default();
        let m = out.finish(&cfg, "ok").unwrap();
        let v: serde_json::Value = serde_json::from_slice(&fs::read(m).unwrap()).unwrap();
        assert_eq!(v["files"][0]["name"], "a.txt");
        assert_eq!(v["status"], "ok");
    }
}
