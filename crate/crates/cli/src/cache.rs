//! One file per level: `u32` schema version, `u64` payload length, the
//! canonical JSON payload, then the SHA-256 of everything before it.
//! Anything that fails to verify is deleted and recomputed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::records::LevelRecord;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// Directory from `MODFOL_CACHE`, else `.modfol-cache` under the
    /// working directory.
    pub fn from_env() -> Self {
        let dir = std::env::var_os("MODFOL_CACHE")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".modfol-cache"));
        Self { dir }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(&self, level: u64) -> PathBuf {
        self.dir.join(format!("level-{level}.bin"))
    }

    pub fn load(&self, level: u64) -> Option<LevelRecord> {
        let path = self.path_for(level);
        let bytes = fs::read(&path).ok()?;
        match decode(&bytes) {
            Some(r) if r.curve.n == level => Some(r),
            _ => {
                let _ = fs::remove_file(&path);
                None
            }
        }
    }

    /// Best effort: a cache that cannot be written is simply not used.
    pub fn store(&self, record: &LevelRecord) {
        let _ = self.try_store(record);
    }

    fn try_store(&self, record: &LevelRecord) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(record.curve.n);
        let tmp = temp_name(&path);
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&encode(record))?;
        f.sync_all()?;
        drop(f);
        fs::rename(&tmp, &path).inspect_err(|_| {
            let _ = fs::remove_file(&tmp);
        })
    }
}

fn temp_name(path: &Path) -> PathBuf {
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("level");
    let unique = format!(
        ".{name}.{}.{:?}.tmp",
        std::process::id(),
        std::thread::current().id()
    )
    .replace(
        |c: char| !c.is_ascii_alphanumeric() && c != '.' && c != '-',
        "",
    );
    path.with_file_name(unique)
}

pub fn encode(record: &LevelRecord) -> Vec<u8> {
    let payload = serde_json::to_vec(record).expect("records serialize");
    let mut out = Vec::with_capacity(payload.len() + 44);
    out.extend_from_slice(&SCHEMA_VERSION.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    let hash = Sha256::digest(&out);
    out.extend_from_slice(&hash);
    out
}

pub fn decode(bytes: &[u8]) -> Option<LevelRecord> {
    if bytes.len() < 12 + 32 {
        return None;
    }
    let version = u32::from_le_bytes(bytes[..4].try_into().ok()?);
    if version != SCHEMA_VERSION {
        return None;
    }
    let len = u64::from_le_bytes(bytes[4..12].try_into().ok()?) as usize;
    if bytes.len() != 12 + len + 32 {
        return None;
    }
    let (body, hash) = bytes.split_at(12 + len);
    if Sha256::digest(body).as_slice() != hash {
        return None;
    }
    serde_json::from_slice(&body[12..]).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compute_record;

    #[test]
    fn round_trip_and_corruption() {
        let r = compute_record(11).unwrap();
        let bytes = encode(&r);
        assert_eq!(decode(&bytes), Some(r.clone()));
        let mut flipped = bytes.clone();
        flipped[20] ^= 1;
        assert_eq!(decode(&flipped), None);
        assert_eq!(decode(&bytes[..bytes.len() - 1]), None);
        let mut versioned = bytes.clone();
        versioned[0] = 99;
        assert_eq!(decode(&versioned), None);
    }

    #[test]
    fn store_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path());
        assert!(cache.load(11).is_none());
        let r = compute_record(11).unwrap();
        cache.store(&r);
        assert_eq!(cache.load(11), Some(r));
        // a record filed under the wrong level is rejected and removed
        std::fs::copy(cache.path_for(11), cache.path_for(14)).unwrap();
        assert!(cache.load(14).is_none());
        assert!(!cache.path_for(14).exists());
        let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
    }
}
