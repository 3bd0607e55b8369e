//! Run manifests: a small JSON provenance record every subcommand writes
//! next to its outputs, so an artifact directory documents the tool
//! version, effective configuration, seeds, and turbulence pool that
//! produced it. Manifests carry a wall-clock timestamp and are therefore
//! excluded from byte-identity comparisons between runs.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::sim::TurbulenceBox;

/// Provenance record for one CLI invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    /// Crate version of the binary that ran.
    pub tool_version: String,
    /// Full argv of the invocation.
    pub command_line: Vec<String>,
    /// SHA-256 of the effective configuration serialized to TOML; `None`
    /// for commands that take no configuration.
    pub config_hash: Option<String>,
    /// Seeds the command ran with.
    pub seeds: Vec<u64>,
    /// SHA-256 over the headers of the turbulence boxes involved, if any.
    pub box_pool_hash: Option<String>,
    /// Wall-clock start, seconds since the Unix epoch.
    pub started_unix: u64,
}

impl RunManifest {
    /// Captures the current invocation. `config` should be the effective
    /// configuration after flag overrides.
    pub fn new(config: Option<&Config>, seeds: Vec<u64>, box_pool_hash: Option<String>) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command_line: std::env::args().collect(),
            config_hash: config.map(|c| sha256_hex(c.to_toml().as_bytes())),
            seeds,
            box_pool_hash,
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// Writes the manifest as pretty JSON, atomically (temp file + rename),
    /// so a crash mid-write never leaves a truncated manifest behind.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut bytes =
            serde_json::to_vec_pretty(self).map_err(|e| Error::Runtime(format!("{e}")))?;
        bytes.push(b'\n');
        let tmp = tmp_sibling(path);
        let mut file = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        file.write_all(&bytes).map_err(|e| Error::io(&tmp, e))?;
        file.flush().map_err(|e| Error::io(&tmp, e))?;
        drop(file);
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}

/// Temp path in the same directory as `path` (rename is atomic only within
/// a filesystem).
fn tmp_sibling(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Lowercase hex SHA-256 digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Hashes the headers (id, lattice, spacings, target std) of every `.tbox`
/// file in `dir`, sorted by file name. Grids are not read, so this stays
/// cheap even for multi-gigabyte pools. Returns `None` when the directory
/// does not exist or holds no boxes.
pub fn pool_header_hash(dir: &Path) -> Result<Option<String>> {
    let entries = match std::fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::io(dir, e)),
    };
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "tbox"))
        .collect();
    if paths.is_empty() {
        return Ok(None);
    }
    paths.sort();
    let mut hasher = Sha256::new();
    for path in &paths {
        let h = TurbulenceBox::load_header(path)?;
        // f64 fields go in via Display (shortest round-trip), so the line
        // is a faithful, stable rendering of the header.
        let line = format!(
            "id={:#018x} nx={} ny={} nz={} dx={} dy={} dz={} sigma_u={}\n",
            h.id, h.nx, h.ny, h.nz, h.dx, h.dy, h.dz, h.sigma_u
        );
        hasher.update(line.as_bytes());
    }
    let mut out = String::with_capacity(64);
    for b in hasher.finalize() {
        out.push_str(&format!("{b:02x}"));
    }
    Ok(Some(out))
}
