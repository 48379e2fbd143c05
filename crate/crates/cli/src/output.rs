//! Output-file plumbing: atomic writes and the reproducibility manifest.

use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

/// Writes a file atomically (temp file in the same directory, then rename).
pub fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    std::fs::write(&tmp, contents).with_context(|| format!("cannot write {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("cannot move {} into place", path.display()))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    /// SHA-256 of the resolved configuration serialization below.
    pub config_hash: String,
    /// The seed every trial seed derives from (after CLI/env overrides).
    pub root_seed: u64,
    pub trials: usize,
    pub trial_seeds: Vec<u64>,
    /// Fully resolved configuration (defaults filled in, overrides applied).
    pub resolved: &'a ExperimentConfig,
}

/// Builds the manifest for a run; together with the binary it pins everything
/// needed to reproduce the outputs bit for bit.
pub fn manifest<'a>(
    command: &'a str,
    cfg: &'a ExperimentConfig,
    trial_seeds: Vec<u64>,
) -> anyhow::Result<Manifest<'a>> {
    let resolved_text = toml::to_string_pretty(cfg).context("cannot serialize config")?;
    let digest = Sha256::digest(resolved_text.as_bytes());
    let mut hash = String::with_capacity(64);
    for b in digest {
        hash.push_str(&format!("{b:02x}"));
    }
    Ok(Manifest {
        command,
        config_hash: hash,
        root_seed: cfg.root_seed,
        trials: trial_seeds.len(),
        trial_seeds,
        resolved: cfg,
    })
}

pub fn write_manifest(path: &Path, m: &Manifest<'_>) -> anyhow::Result<()> {
    let text = toml::to_string_pretty(m).context("cannot serialize manifest")?;
    write_atomic(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        write_atomic(&path, "a,b\n1,2\n").unwrap();
        write_atomic(&path, "a,b\n3,4\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n3,4\n");
        // No leftover temp files.
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn manifest_hash_tracks_config_changes() {
        let a = ExperimentConfig::default();
        let mut b = ExperimentConfig::default();
        b.root_seed = 99;
        let ma = manifest("run", &a, vec![1, 2]).unwrap();
        let mb = manifest("run", &b, vec![1, 2]).unwrap();
        assert_ne!(ma.config_hash, mb.config_hash);
        assert_eq!(ma.config_hash.len(), 64);
    }
}
