//! Content-addressed on-disk cache of serialised characters.
//!
//! Each entry lives in `<dir>/<sha256(key)>.json` and wraps the payload with
//! its key and a SHA-256 checksum; any entry that fails to parse, carries a
//! different key or a wrong checksum is a miss.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Overrides the cache directory when `--cache-dir` is not given.
pub const CACHE_DIR_ENV: &str = "FS_CHARACTERS_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    checksum: String,
    payload: String,
}

fn sha256_hex(data: &str) -> String {
    hex::encode(Sha256::digest(data.as_bytes()))
}

/// Canonical key string for one character computation.
pub fn character_key(ell: usize, level: u32, parts: &[u32], order: u32, method: &str) -> String {
    let parts: Vec<String> = parts.iter().map(u32::to_string).collect();
    format!(
        "fs-characters/{};ell={ell};k={level};K={};M={order};method={method}",
        env!("CARGO_PKG_VERSION"),
        parts.join(",")
    )
}

#[derive(Debug, Clone)]
pub struct CharacterCache {
    dir: PathBuf,
}

impl CharacterCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.json", sha256_hex(key)))
    }

    pub fn load(&self, key: &str) -> Option<String> {
        let raw = fs::read_to_string(self.path_for(key)).ok()?;
        let entry: Entry = serde_json::from_str(&raw).ok()?;
        (entry.key == key && entry.checksum == sha256_hex(&entry.payload)).then_some(entry.payload)
    }

    pub fn store(&self, key: &str, payload: &str) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let entry = Entry {
            key: key.to_owned(),
            checksum: sha256_hex(payload),
            payload: payload.to_owned(),
        };
        let path = self.path_for(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_string(&entry)?)?;
        fs::rename(tmp, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CharacterCache::new(dir.path());
        let key = character_key(1, 1, &[1, 0], 5, "enum");
        assert_eq!(cache.load(&key), None);
        cache.store(&key, "{\"x\":1}").unwrap();
        assert_eq!(cache.load(&key).as_deref(), Some("{\"x\":1}"));
        assert_eq!(cache.load(&character_key(1, 1, &[1, 0], 5, "solve")), None);

        let path = cache.path_for(&key);
        let tampered = fs::read_to_string(&path)
            .unwrap()
            .replace("\\\"x\\\":1", "\\\"x\\\":2");
        fs::write(&path, tampered).unwrap();
        assert_eq!(cache.load(&key), None);

        fs::write(&path, "not json").unwrap();
        assert_eq!(cache.load(&key), None);
    }

    #[test]
    fn keys_separate_parameters() {
        let a = character_key(2, 2, &[1, 1, 0], 8, "enum");
        let b = character_key(2, 2, &[1, 1, 0], 9, "enum");
        assert_ne!(a, b);
        assert!(a.contains(env!("CARGO_PKG_VERSION")));
    }
}
